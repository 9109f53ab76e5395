//! The two convolution products: kernel ∘ kernel on Y×Y×V* and
//! kernel ∘ module acting on Y×X, implemented as pullback → tensor →
//! certified middle-variable elimination, with exact potential bookkeeping
//! at every stage.

use crate::dgmod::DGModule;
use crate::error::Error;
use crate::koszul::kappa;
use crate::mf::MatrixFactorization;
use crate::reduce::{eliminate_variables, ReductionTrace};
use crate::ring::{Poly, RingMap};
use crate::scenario::{Kernel, ModuleObject, Scenario};

/// Verifies both potential identities of the scenario exactly.
pub fn potential_identities(s: &Scenario) -> Result<(), Error> {
    s.check_potential_identities()
}

/// Kernel acting on a module: pull back along p = Id×Id×μ and p₂₃, tensor
/// (the potential is w∘p₁₃ by the potential identity), then eliminate every
/// middle-Y variable.
pub fn convolve_kernel_module(
    s: &Scenario,
    k: &Kernel,
    m: &ModuleObject,
) -> Result<(ModuleObject, ReductionTrace), Error> {
    let kb = k.mf.pullback(&s.p_map()?)?;
    let mb = m.mf.pullback(&s.p23()?)?;
    let t = kb.tensor(&mb)?;
    let expected = s.w.substitute(&s.p13()?)?;
    if *t.potential() != expected {
        return Err(Error::PotentialMismatch(format!(
            "tensor-stage potential {} differs from w∘p13 = {expected}",
            t.potential()
        )));
    }
    let (res, trace) = eliminate_variables(&t, &s.middle_vars())?;
    if *res.ring() != s.r_yx {
        return Err(Error::Validation(
            "elimination did not land in O(Y×X)".into(),
        ));
    }
    Ok((ModuleObject::new(s, res)?, trace))
}

/// Kernel ∘ kernel: pull back along π₁₂ and π₂₃, tensor (potential h∘π₁₃),
/// eliminate the middle Y copy, and rename the third copy back.
pub fn convolve_kernels(
    s: &Scenario,
    k1: &Kernel,
    k2: &Kernel,
) -> Result<(Kernel, ReductionTrace), Error> {
    let a = k1.mf.pullback(&s.pi(0, 1)?)?;
    let b = k2.mf.pullback(&s.pi(1, 2)?)?;
    let t = a.tensor(&b)?;
    let expected = s.h.substitute(&s.pi(0, 2)?)?;
    if *t.potential() != expected {
        return Err(Error::PotentialMismatch(format!(
            "tensor-stage potential {} differs from h∘π13 = {expected}",
            t.potential()
        )));
    }
    let (res, trace) = eliminate_variables(&t, &s.middle_vars())?;
    // Result lives on (y, y'', t); rename y'' → y'.
    let table: Vec<(String, String)> = s
        .y_vars()
        .iter()
        .map(|v| (format!("{v}''"), format!("{v}'")))
        .collect();
    let table_refs: Vec<(&str, &str)> = table
        .iter()
        .map(|(a, b)| (a.as_str(), b.as_str()))
        .collect();
    let rename = RingMap::renaming(res.ring(), &s.r_yyv, &table_refs)?;
    let renamed = res.pullback(&rename)?;
    Ok((Kernel::new(s, renamed)?, trace))
}

/// DG-side convolution of two Perf modules over O(Y×Y) ⊗ Λ(V*), computed
/// through the explicit q-maps: base change along p₁₂/p₂₃ to O(Y×Y×Y),
/// graded tensor over the base, restriction along q₁₃ (the two ξ-families
/// sum), then κ and middle-variable elimination on the factorization side.
pub fn convolve_dg_kernels(
    s: &Scenario,
    m: &DGModule,
    n: &DGModule,
) -> Result<(Kernel, ReductionTrace), Error> {
    if *m.ext().base() != s.r_yy || *n.ext().base() != s.r_yy {
        return Err(Error::RingMismatch);
    }
    let to_triple = |first: usize, second: usize| -> Result<RingMap, Error> {
        let mut images = Vec::new();
        for v in s.y_vars() {
            let name = format!("{v}{}", "'".repeat(first));
            images.push(Poly::var(&s.r_yyy, &name)?);
        }
        for v in s.y_vars() {
            let name = format!("{v}{}", "'".repeat(second));
            images.push(Poly::var(&s.r_yyy, &name)?);
        }
        RingMap::new(s.r_yy.clone(), s.r_yyy.clone(), images)
    };
    let m12 = m.base_change(&to_triple(0, 1)?)?;
    let n23 = n.base_change(&to_triple(1, 2)?)?;
    let tensor = m12.tensor_over_base(&n23)?;
    let q13 = tensor.collapse_xi_pairs()?;
    let big = kappa(&q13, s.t_names())?;
    let (res, trace) = eliminate_variables(&big, &s.middle_vars())?;
    let table: Vec<(String, String)> = s
        .y_vars()
        .iter()
        .map(|v| (format!("{v}''"), format!("{v}'")))
        .collect();
    let table_refs: Vec<(&str, &str)> = table
        .iter()
        .map(|(a, b)| (a.as_str(), b.as_str()))
        .collect();
    let rename = RingMap::renaming(res.ring(), &s.r_yyv, &table_refs)?;
    let renamed = res.pullback(&rename)?;
    Ok((Kernel::new(s, renamed)?, trace))
}

/// Direct sum of kernels (the convolution is additive in each argument).
pub fn kernel_sum(s: &Scenario, a: &Kernel, b: &Kernel) -> Result<Kernel, Error> {
    Kernel::new(s, a.mf.direct_sum(&b.mf)?)
}

pub fn module_sum(
    s: &Scenario,
    a: &ModuleObject,
    b: &ModuleObject,
) -> Result<ModuleObject, Error> {
    ModuleObject::new(s, a.mf.direct_sum(&b.mf)?)
}

/// Zero-object shortcut used in tests: a zero kernel annihilates.
pub fn is_zero_mf(m: &MatrixFactorization) -> bool {
    m.is_zero_object()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduce::{equiv_check, EquivResult};
    use crate::scenario::{scenario_a1_id, scenario_a1_nu_zero, scenario_a2_id};

    #[test]
    fn potential_identities_hold() {
        potential_identities(&scenario_a1_id()).unwrap();
        potential_identities(&scenario_a1_nu_zero()).unwrap();
        potential_identities(&scenario_a2_id()).unwrap();
    }

    #[test]
    fn unit_acts_as_identity_a1() {
        let s = scenario_a1_id();
        let unit = s.unit_kernel().unwrap();
        let modules = s.sample_modules().unwrap();
        for m in &modules {
            let (res, trace) = convolve_kernel_module(&s, &unit, m).unwrap();
            trace.verify().unwrap();
            match equiv_check(&res.mf, &m.mf, 6).unwrap() {
                EquivResult::Equivalent(c) => c.verify().unwrap(),
                other => panic!("unit law failed: {other:?}"),
            }
        }
    }

    #[test]
    fn unit_act_is_literal_on_k_x_y() {
        // The flagship byte-identical case: unit ∗ K(x; y) = K(x; y).
        let s = scenario_a1_id();
        let unit = s.unit_kernel().unwrap();
        let m = &s.sample_modules().unwrap()[0];
        let (res, _) = convolve_kernel_module(&s, &unit, m).unwrap();
        assert_eq!(res.mf, m.mf);
    }

    #[test]
    fn unit_convolve_unit_is_unit() {
        let s = scenario_a1_id();
        let unit = s.unit_kernel().unwrap();
        let (res, trace) = convolve_kernels(&s, &unit, &unit).unwrap();
        trace.verify().unwrap();
        assert_eq!(res.mf, unit.mf);
    }

    #[test]
    fn zero_kernel_annihilates() {
        let s = scenario_a1_id();
        let z = Kernel::zero(&s);
        let m = &s.sample_modules().unwrap()[0];
        let (res, _) = convolve_kernel_module(&s, &z, m).unwrap();
        assert!(res.mf.is_zero_object());
    }

    #[test]
    fn unit_sum_doubles() {
        let s = scenario_a1_id();
        let unit = s.unit_kernel().unwrap();
        let two = kernel_sum(&s, &unit, &unit).unwrap();
        let m = &s.sample_modules().unwrap()[0];
        let (res, _) = convolve_kernel_module(&s, &two, m).unwrap();
        let mm = module_sum(&s, m, m).unwrap();
        match equiv_check(&res.mf, &mm.mf, 6).unwrap() {
            EquivResult::Equivalent(c) => c.verify().unwrap(),
            other => panic!("additivity failed: {other:?}"),
        }
    }

    #[test]
    fn unit_acts_as_identity_a2() {
        let s = scenario_a2_id();
        let unit = s.unit_kernel().unwrap();
        let m = &s.sample_modules().unwrap()[0];
        let (res, trace) = convolve_kernel_module(&s, &unit, m).unwrap();
        trace.verify().unwrap();
        match equiv_check(&res.mf, &m.mf, 6).unwrap() {
            EquivResult::Equivalent(c) => c.verify().unwrap(),
            other => panic!("unit law failed in 𝔸²: {other:?}"),
        }
    }

    #[test]
    fn kernel_associativity_sample() {
        let s = scenario_a1_id();
        let kernels = s.sample_kernels().unwrap();
        let k1 = &kernels[0];
        let k2 = &kernels[1];
        let k3 = &kernels[0];
        let (k12, _) = convolve_kernels(&s, k1, k2).unwrap();
        let (lhs, _) = convolve_kernels(&s, &k12, k3).unwrap();
        let (k23, _) = convolve_kernels(&s, k2, k3).unwrap();
        let (rhs, _) = convolve_kernels(&s, k1, &k23).unwrap();
        match equiv_check(&lhs.mf, &rhs.mf, 6).unwrap() {
            EquivResult::Equivalent(c) => c.verify().unwrap(),
            other => panic!("associativity failed: {other:?}"),
        }
    }

    #[test]
    fn dg_convolution_unit_route() {
        let s = scenario_a1_id();
        let d = s.diagonal_module().unwrap();
        let (res, trace) = convolve_dg_kernels(&s, &d, &d).unwrap();
        trace.verify().unwrap();
        let unit = s.unit_kernel().unwrap();
        match equiv_check(&res.mf, &unit.mf, 6).unwrap() {
            EquivResult::Equivalent(c) => c.verify().unwrap(),
            other => panic!("DG-side unit convolution failed: {other:?}"),
        }
    }
}
