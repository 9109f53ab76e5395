//! Affine toy geometries instantiating the convolution setup: Y, X affine
//! spaces, V a vector space, polynomial maps ν : Y → V and μ : X → V*,
//! generating the potentials w(y,x) = μ(x)(ν(y)) and
//! h(y₁,y₂,g) = g(ν(y₁) − ν(y₂)), the unit kernel, and sample objects.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::dgmod::{DGModule, ExteriorData};
use crate::error::Error;
use crate::koszul::{default_t_names, kappa};
use crate::matrix::PolyMatrix;
use crate::mf::MatrixFactorization;
use crate::ring::{Poly, Ring, RingMap};

fn primed(name: &str, copies: usize) -> String {
    format!("{}{}", name, "'".repeat(copies))
}

/// An affine scenario with a weight grading making w and h homogeneous of
/// weight 2. Rings and projections for the convolution diagrams are
/// precomputed.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    y_vars: Vec<String>,
    y_weights: Vec<i64>,
    x_vars: Vec<String>,
    x_weights: Vec<i64>,
    t_names: Vec<String>,
    t_weights: Vec<i64>,
    /// components of ν over O(Y)
    nu: Vec<Poly>,
    /// components of μ over O(X)
    mu: Vec<Poly>,
    ring_y: Arc<Ring>,
    ring_x: Arc<Ring>,
    pub r_yx: Arc<Ring>,
    pub r_yy: Arc<Ring>,
    pub r_yyv: Arc<Ring>,
    pub r_yyx: Arc<Ring>,
    pub r_yyy: Arc<Ring>,
    pub r_yyyv: Arc<Ring>,
    /// w = Σ μ_k(x)·ν_k(y) over r_yx
    pub w: Poly,
    /// ρ♯(ξ_k) = ν_k(y) − ν_k(y′) over r_yy
    pub rho_sharp: Vec<Poly>,
    /// h = Σ t_k·ρ♯(ξ_k) over r_yyv
    pub h: Poly,
    /// Explicit DG-modules over O(Y×Y) ⊗ Λ(V*) contributing extra kernels
    /// through κ; the route for non-coordinate ν.
    extra_dg: Vec<DGModule>,
}

impl Scenario {
    pub fn new(
        name: &str,
        y: Vec<(String, i64)>,
        x: Vec<(String, i64)>,
        nu_texts: &[&str],
        mu_texts: &[&str],
    ) -> Result<Scenario, Error> {
        let y_vars: Vec<String> = y.iter().map(|(v, _)| v.clone()).collect();
        let y_weights: Vec<i64> = y.iter().map(|(_, w)| *w).collect();
        let x_vars: Vec<String> = x.iter().map(|(v, _)| v.clone()).collect();
        let x_weights: Vec<i64> = x.iter().map(|(_, w)| *w).collect();
        let ring_y = Ring::graded(y_vars.clone(), y_weights.clone())?;
        let ring_x = Ring::graded(x_vars.clone(), x_weights.clone())?;
        let nu = nu_texts
            .iter()
            .map(|s| Poly::parse(&ring_y, s))
            .collect::<Result<Vec<_>, _>>()?;
        let mu = mu_texts
            .iter()
            .map(|s| Poly::parse(&ring_x, s))
            .collect::<Result<Vec<_>, _>>()?;
        Scenario::from_parts(name, y_vars, y_weights, x_vars, x_weights, nu, mu)
    }

    pub fn from_parts(
        name: &str,
        y_vars: Vec<String>,
        y_weights: Vec<i64>,
        x_vars: Vec<String>,
        x_weights: Vec<i64>,
        nu: Vec<Poly>,
        mu: Vec<Poly>,
    ) -> Result<Scenario, Error> {
        if nu.len() != mu.len() {
            return Err(Error::DimensionMismatch(
                "ν and μ must have the same number of components".into(),
            ));
        }
        let n = nu.len();
        let ring_y = Ring::graded(y_vars.clone(), y_weights.clone())?;
        let ring_x = Ring::graded(x_vars.clone(), x_weights.clone())?;
        for p in &nu {
            if *p.ring() != ring_y {
                return Err(Error::RingMismatch);
            }
        }
        for p in &mu {
            if *p.ring() != ring_x {
                return Err(Error::RingMismatch);
            }
        }
        let t_names = default_t_names(n);

        // t_k weighs 2 − deg ν_k; every ν_k and μ_k must be homogeneous with
        // deg μ_k + deg ν_k = 2 so that w and h are homogeneous of weight 2.
        let mut t_weights = Vec::with_capacity(n);
        for (k, nu_k) in nu.iter().enumerate() {
            let dn = match nu_k.weight_degree()? {
                crate::ring::WeightDegree::Homogeneous(d) => d,
                crate::ring::WeightDegree::Zero => 0,
                crate::ring::WeightDegree::Inhomogeneous => {
                    return Err(Error::Validation(format!(
                        "ν_{k} is inhomogeneous under the declared weights"
                    )))
                }
            };
            if !mu[k].is_homogeneous_of(2 - dn) {
                return Err(Error::Validation(format!(
                    "μ_{k} is not homogeneous of weight {}",
                    2 - dn
                )));
            }
            t_weights.push(2 - dn);
        }

        let pack = |vars: &[(String, i64)]| -> Result<Arc<Ring>, Error> {
            Ring::graded(
                vars.iter().map(|(v, _)| v.clone()).collect(),
                vars.iter().map(|(_, w)| *w).collect(),
            )
        };
        let yw: Vec<(String, i64)> = y_vars
            .iter()
            .zip(&y_weights)
            .map(|(v, &w)| (v.clone(), w))
            .collect();
        let y1w: Vec<(String, i64)> = y_vars
            .iter()
            .zip(&y_weights)
            .map(|(v, &w)| (primed(v, 1), w))
            .collect();
        let y2w: Vec<(String, i64)> = y_vars
            .iter()
            .zip(&y_weights)
            .map(|(v, &w)| (primed(v, 2), w))
            .collect();
        let xw: Vec<(String, i64)> = x_vars
            .iter()
            .zip(&x_weights)
            .map(|(v, &w)| (v.clone(), w))
            .collect();
        let tw: Vec<(String, i64)> = t_names
            .iter()
            .zip(&t_weights)
            .map(|(v, &w)| (v.clone(), w))
            .collect();
        let cat = |parts: &[&[(String, i64)]]| -> Vec<(String, i64)> {
            parts.iter().flat_map(|p| p.iter().cloned()).collect()
        };
        let r_yx = pack(&cat(&[&yw, &xw]))?;
        let r_yy = pack(&cat(&[&yw, &y1w]))?;
        let r_yyv = pack(&cat(&[&yw, &y1w, &tw]))?;
        let r_yyx = pack(&cat(&[&yw, &y1w, &xw]))?;
        let r_yyy = pack(&cat(&[&yw, &y1w, &y2w]))?;
        let r_yyyv = pack(&cat(&[&yw, &y1w, &y2w, &tw]))?;

        let lift_nu_0 = RingMap::by_name(&ring_y, &r_yx)?;
        let lift_mu_yx = RingMap::by_name(&ring_x, &r_yx)?;
        let mut w = Poly::zero(&r_yx);
        for k in 0..n {
            w = w.add(&mu[k].substitute(&lift_mu_yx)?.mul(&nu[k].substitute(&lift_nu_0)?));
        }
        if !w.is_homogeneous_of(2) {
            return Err(Error::Validation(
                "w is not homogeneous of weight 2".into(),
            ));
        }

        let nu_copy = |copy: usize, target: &Arc<Ring>| -> Result<RingMap, Error> {
            let images = y_vars
                .iter()
                .map(|v| Poly::var(target, &primed(v, copy)))
                .collect::<Result<Vec<_>, _>>()?;
            RingMap::new(ring_y.clone(), target.clone(), images)
        };
        let mut rho_sharp = Vec::with_capacity(n);
        for nu_k in &nu {
            let a = nu_k.substitute(&nu_copy(0, &r_yy)?)?;
            let b = nu_k.substitute(&nu_copy(1, &r_yy)?)?;
            rho_sharp.push(a.sub(&b));
        }
        let lift_rho = RingMap::by_name(&r_yy, &r_yyv)?;
        let mut h = Poly::zero(&r_yyv);
        for k in 0..n {
            let t_k = Poly::var(&r_yyv, &t_names[k])?;
            h = h.add(&t_k.mul(&rho_sharp[k].substitute(&lift_rho)?));
        }
        if !h.is_homogeneous_of(2) {
            return Err(Error::Validation(
                "h is not homogeneous of weight 2".into(),
            ));
        }

        let s = Scenario {
            name: name.to_string(),
            y_vars,
            y_weights,
            x_vars,
            x_weights,
            t_names,
            t_weights,
            nu,
            mu,
            ring_y,
            ring_x,
            r_yx,
            r_yy,
            r_yyv,
            r_yyx,
            r_yyy,
            r_yyyv,
            w,
            rho_sharp,
            h,
            extra_dg: Vec::new(),
        };
        s.check_potential_identities()?;
        Ok(s)
    }

    /// Attaches an explicit DG-module (over O(Y×Y) ⊗ Λ(V*), with this
    /// scenario's ρ♯) whose κ-image joins the kernel corpus.
    pub fn add_dg_kernel(&mut self, m: DGModule) -> Result<(), Error> {
        if *m.ext().base() != self.r_yy {
            return Err(Error::RingMismatch);
        }
        if m.ext().rho_sharp() != self.rho_sharp.as_slice() {
            return Err(Error::Validation(
                "DG kernel has different ρ♯ data than the scenario".into(),
            ));
        }
        m.validate()?;
        self.extra_dg.push(m);
        Ok(())
    }

    pub fn extra_dg(&self) -> &[DGModule] {
        &self.extra_dg
    }

    pub fn n(&self) -> usize {
        self.nu.len()
    }

    pub fn y_vars(&self) -> &[String] {
        &self.y_vars
    }

    pub fn x_vars(&self) -> &[String] {
        &self.x_vars
    }

    pub fn t_names(&self) -> &[String] {
        &self.t_names
    }

    pub fn t_weights(&self) -> &[i64] {
        &self.t_weights
    }

    pub fn nu(&self) -> &[Poly] {
        &self.nu
    }

    pub fn mu(&self) -> &[Poly] {
        &self.mu
    }

    pub fn y_weights(&self) -> &[i64] {
        &self.y_weights
    }

    pub fn x_weights(&self) -> &[i64] {
        &self.x_weights
    }

    /// Names of the middle Y-copy in O(Y×Y×X) and O(Y×Y×Y×V*).
    pub fn middle_vars(&self) -> Vec<String> {
        self.y_vars.iter().map(|v| primed(v, 1)).collect()
    }

    /// p = Id × Id × μ : O(Y×Y×V*) → O(Y×Y×X).
    pub fn p_map(&self) -> Result<RingMap, Error> {
        let mut images = Vec::new();
        for v in &self.y_vars {
            images.push(Poly::var(&self.r_yyx, v)?);
        }
        for v in &self.y_vars {
            images.push(Poly::var(&self.r_yyx, &primed(v, 1))?);
        }
        let lift_mu = RingMap::by_name(&self.ring_x, &self.r_yyx)?;
        for mu_k in &self.mu {
            images.push(mu_k.substitute(&lift_mu)?);
        }
        RingMap::new(self.r_yyv.clone(), self.r_yyx.clone(), images)
    }

    /// p₂₃, p₁₃ : O(Y×X) → O(Y×Y×X).
    pub fn p23(&self) -> Result<RingMap, Error> {
        self.pair_projection(1)
    }

    pub fn p13(&self) -> Result<RingMap, Error> {
        self.pair_projection(0)
    }

    fn pair_projection(&self, y_copy: usize) -> Result<RingMap, Error> {
        let mut images = Vec::new();
        for v in &self.y_vars {
            images.push(Poly::var(&self.r_yyx, &primed(v, y_copy))?);
        }
        for v in &self.x_vars {
            images.push(Poly::var(&self.r_yyx, v)?);
        }
        RingMap::new(self.r_yx.clone(), self.r_yyx.clone(), images)
    }

    /// π_{ij} : O(Y×Y×V*) → O(Y×Y×Y×V*).
    pub fn pi(&self, first: usize, second: usize) -> Result<RingMap, Error> {
        let mut images = Vec::new();
        for v in &self.y_vars {
            images.push(Poly::var(&self.r_yyyv, &primed(v, first))?);
        }
        for v in &self.y_vars {
            images.push(Poly::var(&self.r_yyyv, &primed(v, second))?);
        }
        for t in &self.t_names {
            images.push(Poly::var(&self.r_yyyv, t)?);
        }
        RingMap::new(self.r_yyv.clone(), self.r_yyyv.clone(), images)
    }

    /// Verifies h∘p + w∘p₂₃ = w∘p₁₃ and h∘π₁₂ + h∘π₂₃ = h∘π₁₃ exactly.
    pub fn check_potential_identities(&self) -> Result<(), Error> {
        let lhs = self
            .h
            .substitute(&self.p_map()?)?
            .add(&self.w.substitute(&self.p23()?)?);
        let rhs = self.w.substitute(&self.p13()?)?;
        if lhs != rhs {
            return Err(Error::Validation(format!(
                "h∘p + w∘p23 = {lhs} differs from w∘p13 = {rhs}"
            )));
        }
        let lhs2 = self
            .h
            .substitute(&self.pi(0, 1)?)?
            .add(&self.h.substitute(&self.pi(1, 2)?)?);
        let rhs2 = self.h.substitute(&self.pi(0, 2)?)?;
        if lhs2 != rhs2 {
            return Err(Error::Validation(format!(
                "h∘π12 + h∘π23 = {lhs2} differs from h∘π13 = {rhs2}"
            )));
        }
        Ok(())
    }

    /// The Koszul resolution of the diagonal on the coordinate differences
    /// y_i − y_i′, with ξ_k acting by wedge with the ν_k-th coordinate
    /// direction; requires each ν_k to be a single coordinate.
    pub fn diagonal_module(&self) -> Result<DGModule, Error> {
        let dy = self.y_vars.len();
        let mut coord_of = Vec::with_capacity(self.n());
        for (k, nu_k) in self.nu.iter().enumerate() {
            let coord = nu_k.as_single_term().and_then(|(c, m)| {
                use num_traits::One;
                if !c.is_one() {
                    return None;
                }
                let mut idx = None;
                for (i, &e) in m.0.iter().enumerate() {
                    match (e, idx) {
                        (0, _) => {}
                        (1, None) => idx = Some(i),
                        _ => return None,
                    }
                }
                idx
            });
            match coord {
                Some(i) => coord_of.push(i),
                None => {
                    return Err(Error::Validation(format!(
                        "ν_{k} is not a coordinate projection; supply an explicit diagonal module"
                    )))
                }
            }
        }
        let base = self.r_yy.clone();
        let lift_rho = RingMap::by_name(&self.r_yy, &base)?;
        let rho: Vec<Poly> = self
            .rho_sharp
            .iter()
            .map(|p| p.substitute(&lift_rho))
            .collect::<Result<_, _>>()?;
        let ext = ExteriorData::new(base.clone(), rho)?;
        // Λ(W) on dy generators; subsets ordered by (size, lex).
        let mut subsets: Vec<Vec<usize>> = (0u32..(1 << dy))
            .map(|mask| (0..dy).filter(|&k| mask >> k & 1 == 1).collect())
            .collect();
        subsets.sort_by_key(|s| (s.len(), s.clone()));
        let index_of: BTreeMap<Vec<usize>, usize> = subsets
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let by_degree = |deg: i64| -> Vec<usize> {
            (0..subsets.len())
                .filter(|&i| -(subsets[i].len() as i64) == deg)
                .collect()
        };
        let pos_in_degree = |i: usize| -> usize {
            let deg = -(subsets[i].len() as i64);
            by_degree(deg).iter().position(|&j| j == i).unwrap()
        };
        let mut ranks = BTreeMap::new();
        for s in &subsets {
            *ranks.entry(-(s.len() as i64)).or_insert(0) += 1;
        }
        let diffs: Vec<Poly> = (0..dy)
            .map(|i| {
                Poly::var(&base, &self.y_vars[i])
                    .unwrap()
                    .sub(&Poly::var(&base, &primed(&self.y_vars[i], 1)).unwrap())
            })
            .collect();
        let mut diff: BTreeMap<i64, PolyMatrix> = BTreeMap::new();
        for (i, set) in subsets.iter().enumerate() {
            let deg = -(set.len() as i64);
            for (pos, &a) in set.iter().enumerate() {
                let mut new = set.clone();
                new.remove(pos);
                let sign = if pos % 2 == 0 { 1 } else { -1 };
                let j = index_of[&new];
                let entry = diff
                    .entry(deg)
                    .or_insert_with(|| {
                        PolyMatrix::zero(
                            &base,
                            ranks[&(deg + 1)],
                            ranks[&deg],
                        )
                    });
                let mut val = diffs[a].clone();
                if sign < 0 {
                    val = val.neg();
                }
                let r = pos_in_degree(j);
                let c = pos_in_degree(i);
                let prev = entry.get(r, c).add(&val);
                entry.set(r, c, prev);
            }
        }
        let mut xi: Vec<BTreeMap<i64, PolyMatrix>> = Vec::with_capacity(self.n());
        for k in 0..self.n() {
            let gen = coord_of[k];
            let mut fam: BTreeMap<i64, PolyMatrix> = BTreeMap::new();
            for (i, set) in subsets.iter().enumerate() {
                if set.contains(&gen) {
                    continue;
                }
                let deg = -(set.len() as i64);
                let below = set.iter().filter(|&&s| s < gen).count();
                let mut new = set.clone();
                new.push(gen);
                new.sort_unstable();
                let j = index_of[&new];
                let entry = fam.entry(deg).or_insert_with(|| {
                    PolyMatrix::zero(&base, ranks[&(deg - 1)], ranks[&deg])
                });
                let val = if below % 2 == 0 {
                    Poly::int(&base, 1)
                } else {
                    Poly::int(&base, -1)
                };
                let r = pos_in_degree(j);
                let c = pos_in_degree(i);
                entry.set(r, c, val);
            }
            xi.push(fam);
        }
        let weights = Some(
            ranks
                .keys()
                .map(|&d| (d, vec![0i64; ranks[&d]]))
                .collect(),
        );
        DGModule::new(ext, ranks, diff, xi, weights)
    }

    /// The unit kernel: κ of the diagonal's Koszul resolution.
    pub fn unit_kernel(&self) -> Result<Kernel, Error> {
        let diag = self.diagonal_module()?;
        let mf = kappa(&diag, &self.t_names)?;
        Kernel::new(self, mf)
    }

    /// Deterministic Koszul-type kernels ⊗_k K(a_k; b_k) with Σ a_k b_k = h:
    /// the unit kernel followed by the 2ⁿ factor-swap combinations.
    pub fn sample_kernels(&self) -> Result<Vec<Kernel>, Error> {
        // The unit kernel needs coordinate ν; skip it otherwise.
        let mut out = match self.unit_kernel() {
            Ok(u) => vec![u],
            Err(_) => Vec::new(),
        };
        let lift_rho = RingMap::by_name(&self.r_yy, &self.r_yyv)?;
        let n = self.n();
        for mask in 0u32..(1 << n) {
            let mut acc: Option<MatrixFactorization> = None;
            for k in 0..n {
                let rho_k = self.rho_sharp[k].substitute(&lift_rho)?;
                let t_k = Poly::var(&self.r_yyv, &self.t_names[k])?;
                let (a, b) = if mask >> k & 1 == 0 {
                    (rho_k, t_k)
                } else {
                    (t_k, rho_k)
                };
                let pair = MatrixFactorization::koszul_pair(&a, &b)?;
                acc = Some(match acc {
                    None => pair,
                    Some(prev) => prev.tensor(&pair)?,
                });
            }
            let mf = acc.unwrap_or_else(|| {
                MatrixFactorization::bar(&self.r_yyv, 1)
            });
            if out.iter().all(|k| k.mf != mf) {
                out.push(Kernel::new(self, mf)?);
            }
        }
        for m in &self.extra_dg {
            let mf = kappa(m, &self.t_names)?;
            if out.iter().all(|k| k.mf != mf) {
                out.push(Kernel::new(self, mf)?);
            }
        }
        Ok(out)
    }

    /// Deterministic modules ⊗_k K(a_k; b_k) with Σ a_k b_k = w.
    pub fn sample_modules(&self) -> Result<Vec<ModuleObject>, Error> {
        let lift_nu = RingMap::by_name(&self.ring_y, &self.r_yx)?;
        let lift_mu = RingMap::by_name(&self.ring_x, &self.r_yx)?;
        let n = self.n();
        let mut out: Vec<ModuleObject> = Vec::new();
        for mask in 0u32..(1 << n) {
            let mut acc: Option<MatrixFactorization> = None;
            for k in 0..n {
                let nu_k = self.nu[k].substitute(&lift_nu)?;
                let mu_k = self.mu[k].substitute(&lift_mu)?;
                let (a, b) = if mask >> k & 1 == 0 {
                    (mu_k, nu_k)
                } else {
                    (nu_k, mu_k)
                };
                let pair = MatrixFactorization::koszul_pair(&a, &b)?;
                acc = Some(match acc {
                    None => pair,
                    Some(prev) => prev.tensor(&pair)?,
                });
            }
            let mf = acc.unwrap_or_else(|| MatrixFactorization::bar(&self.r_yx, 1));
            if out.iter().all(|m| m.mf != mf) {
                out.push(ModuleObject::new(self, mf)?);
            }
        }
        Ok(out)
    }
}

/// A kernel object: a factorization over O(Y×Y×V*) whose potential is the
/// scenario's h.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kernel {
    pub mf: MatrixFactorization,
}

impl Kernel {
    pub fn new(s: &Scenario, mf: MatrixFactorization) -> Result<Kernel, Error> {
        if *mf.ring() != s.r_yyv {
            return Err(Error::RingMismatch);
        }
        if *mf.potential() != s.h {
            return Err(Error::PotentialMismatch(format!(
                "kernel potential {} differs from h = {}",
                mf.potential(),
                s.h
            )));
        }
        Ok(Kernel { mf })
    }

    pub fn zero(s: &Scenario) -> Kernel {
        Kernel {
            mf: MatrixFactorization::zero_object(&s.r_yyv, s.h.clone()),
        }
    }
}

/// A module object: a factorization over O(Y×X) with potential w.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleObject {
    pub mf: MatrixFactorization,
}

impl ModuleObject {
    pub fn new(s: &Scenario, mf: MatrixFactorization) -> Result<ModuleObject, Error> {
        if *mf.ring() != s.r_yx {
            return Err(Error::RingMismatch);
        }
        if *mf.potential() != s.w {
            return Err(Error::PotentialMismatch(format!(
                "module potential {} differs from w = {}",
                mf.potential(),
                s.w
            )));
        }
        Ok(ModuleObject { mf })
    }

    pub fn zero(s: &Scenario) -> ModuleObject {
        ModuleObject {
            mf: MatrixFactorization::zero_object(&s.r_yx, s.w.clone()),
        }
    }
}

/// The standard desk scenarios.
pub fn scenario_a1_id() -> Scenario {
    Scenario::new(
        "a1-id",
        vec![("y".into(), 0)],
        vec![("x".into(), 2)],
        &["y"],
        &["x"],
    )
    .expect("a1-id scenario")
}

pub fn scenario_a2_id() -> Scenario {
    Scenario::new(
        "a2-id",
        vec![("y1".into(), 0), ("y2".into(), 0)],
        vec![("x1".into(), 2), ("x2".into(), 2)],
        &["y1", "y2"],
        &["x1", "x2"],
    )
    .expect("a2-id scenario")
}

pub fn scenario_a1_nu_zero() -> Scenario {
    Scenario::new(
        "a1-nu0",
        vec![("y".into(), 0)],
        vec![("x".into(), 2)],
        &["0"],
        &["x"],
    )
    .expect("a1-nu0 scenario")
}

pub fn scenario_a2_mixed() -> Scenario {
    Scenario::new(
        "a2-mixed",
        vec![("y1".into(), 0), ("y2".into(), 0)],
        vec![("x1".into(), 2), ("x2".into(), 2)],
        &["y1", "y2^2"],
        &["x1", "x2"],
    )
    .expect("a2-mixed scenario")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_standard_scenarios() {
        let s = scenario_a1_id();
        assert_eq!(s.w.to_string(), "y*x");
        assert_eq!(s.h.to_string(), "y*t - y'*t");
        let s0 = scenario_a1_nu_zero();
        assert!(s0.w.is_zero());
        assert!(s0.h.is_zero());
        let s2 = scenario_a2_mixed();
        s2.check_potential_identities().unwrap();
    }

    #[test]
    fn unit_kernel_a1() {
        let s = scenario_a1_id();
        let u = s.unit_kernel().unwrap();
        assert_eq!(u.mf.rank_minus1(), 1);
        assert_eq!(
            u.mf.d_minus1().get(0, 0),
            Poly::parse(&s.r_yyv, "y - y'").unwrap()
        );
        assert_eq!(u.mf.d_zero().get(0, 0), Poly::parse(&s.r_yyv, "t").unwrap());
    }

    #[test]
    fn unit_kernel_a2_validates() {
        let s = scenario_a2_id();
        let u = s.unit_kernel().unwrap();
        assert_eq!(u.mf.rank_minus1(), 2);
        u.mf.validate().unwrap();
    }

    #[test]
    fn unit_kernel_a2_is_tensor_of_coordinate_pairs() {
        use crate::mf::signed_permutation_iso;
        let s = scenario_a2_id();
        let u = s.unit_kernel().unwrap();
        let lift = RingMap::by_name(&s.r_yy, &s.r_yyv).unwrap();
        let pair = |k: usize| {
            MatrixFactorization::koszul_pair(
                &s.rho_sharp[k].substitute(&lift).unwrap(),
                &Poly::var(&s.r_yyv, &s.t_names()[k]).unwrap(),
            )
            .unwrap()
        };
        let tensor = pair(0).tensor(&pair(1)).unwrap();
        // κ of the diagonal resolution agrees with K(ρ₁;t₁) ⊗ K(ρ₂;t₂) up
        // to a signed permutation of the bases.
        let iso = signed_permutation_iso(&u.mf, &tensor, &[0, 1], &[0, 1]).unwrap();
        assert!(iso.is_closed().unwrap());
    }

    #[test]
    fn samples_validate() {
        let s = scenario_a1_id();
        let kernels = s.sample_kernels().unwrap();
        let modules = s.sample_modules().unwrap();
        assert!(kernels.len() >= 2);
        assert_eq!(modules.len(), 2);
        for k in &kernels {
            k.mf.validate().unwrap();
        }
        for m in &modules {
            m.mf.validate().unwrap();
        }
        // The ν = 0 scenario produces two-periodic zero-potential objects.
        let s0 = scenario_a1_nu_zero();
        for k in s0.sample_kernels().unwrap() {
            assert!(k.mf.potential().is_zero());
        }
        // The 𝔸² scenario has 4 swap-combination kernels (plus the unit).
        let s2 = scenario_a2_id();
        let k2 = s2.sample_kernels().unwrap();
        assert!(k2.len() >= 4);
    }

    #[test]
    fn mixed_nu_rejects_unit_kernel() {
        let s = scenario_a2_mixed();
        assert!(s.unit_kernel().is_err());
    }
}
