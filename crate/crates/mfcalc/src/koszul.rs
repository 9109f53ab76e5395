//! The Koszul bimodule K and the duality functor κ sending a Perf DG-module
//! over O ⊗ Λ(V*) to a matrix factorization over O[t_1..t_n] with potential
//! h = Σ_k ρ♯(ξ_k)·t_k.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::dgmod::{DGModule, DGMorphism};
use crate::error::Error;
use crate::matrix::PolyMatrix;
use crate::mf::{signed_permutation_iso, MFMorphism, MatrixFactorization, Parity};
use crate::reduce::EquivalenceCertificate;
use crate::ring::{Poly, Ring, RingMap, WeightDegree};

/// Default names t, or t1..tn, for the Sym(V) variables.
pub fn default_t_names(n: usize) -> Vec<String> {
    if n == 1 {
        vec!["t".to_string()]
    } else {
        (1..=n).map(|k| format!("t{k}")).collect()
    }
}

/// The ring O[t_1..t_n]; each t_k weighs 2 − weight(ρ♯_k) so that h has
/// weight 2 (ungraded when the base is ungraded or some ρ♯ is mixed).
pub fn extended_ring(
    base: &Arc<Ring>,
    rho_sharp: &[Poly],
    t_names: &[String],
) -> Result<Arc<Ring>, Error> {
    if t_names.len() != rho_sharp.len() {
        return Err(Error::DimensionMismatch(
            "one t variable per exterior generator".into(),
        ));
    }
    for t in t_names {
        if base.var_index(t).is_some() {
            return Err(Error::BadRing(format!("variable `{t}` already in base")));
        }
    }
    if base.is_graded() {
        let mut extra = Vec::with_capacity(t_names.len());
        for (t, rho) in t_names.iter().zip(rho_sharp) {
            let w = match rho.weight_degree()? {
                WeightDegree::Homogeneous(d) => 2 - d,
                WeightDegree::Zero => 2,
                WeightDegree::Inhomogeneous => {
                    let vars: Vec<String> = base
                        .vars()
                        .iter()
                        .cloned()
                        .chain(t_names.iter().cloned())
                        .collect();
                    return Ring::new(vars);
                }
            };
            extra.push((t.clone(), w));
        }
        base.with_vars(&extra)
    } else {
        let vars: Vec<String> = base
            .vars()
            .iter()
            .cloned()
            .chain(t_names.iter().cloned())
            .collect();
        Ring::new(vars)
    }
}

/// The Koszul complex K = O ⊗ Λ(V*) ⊗ Sym(V), ℤ/2-folded over O[t] into a
/// rank-2ⁿ matrix factorization of h.
#[derive(Debug, Clone)]
pub struct KoszulComplex {
    pub extended: Arc<Ring>,
    pub h: Poly,
    pub mf: MatrixFactorization,
}

/// Subsets of {0..n−1} ordered by (size, lexicographic), the Λ basis order.
fn lambda_basis(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0u32..(1 << n))
        .map(|mask| (0..n).filter(|&k| mask >> k & 1 == 1).collect())
        .collect();
    out.sort_by_key(|s| (s.len(), s.clone()));
    out
}

fn wedge_sign(set: &[usize], k: usize) -> Option<(Vec<usize>, i64)> {
    if set.contains(&k) {
        return None;
    }
    let below = set.iter().filter(|&&s| s < k).count();
    let mut new = set.to_vec();
    new.push(k);
    new.sort_unstable();
    Some((new, if below % 2 == 0 { 1 } else { -1 }))
}

fn contract_sign(set: &[usize], a: usize) -> Option<(Vec<usize>, i64)> {
    let pos = set.iter().position(|&s| s == a)?;
    let mut new = set.to_vec();
    new.remove(pos);
    Some((new, if pos % 2 == 0 { 1 } else { -1 }))
}

/// Builds K for the given exterior data; the folded differential is
/// contraction with ρ♯ plus Σ_k t_k·(ξ_k ∧ −), and d² = h·id exactly.
pub fn build_koszul_complex(
    base: &Arc<Ring>,
    rho_sharp: &[Poly],
    t_names: &[String],
) -> Result<KoszulComplex, Error> {
    let n = rho_sharp.len();
    let ext_ring = extended_ring(base, rho_sharp, t_names)?;
    let lift = RingMap::by_name(base, &ext_ring)?;
    let rho_lifted: Vec<Poly> = rho_sharp
        .iter()
        .map(|p| p.substitute(&lift))
        .collect::<Result<_, _>>()?;
    let t_polys: Vec<Poly> = t_names
        .iter()
        .map(|t| Poly::var(&ext_ring, t))
        .collect::<Result<_, _>>()?;
    let mut h = Poly::zero(&ext_ring);
    for k in 0..n {
        h = h.add(&rho_lifted[k].mul(&t_polys[k]));
    }

    let basis = lambda_basis(n);
    let odd: Vec<usize> = (0..basis.len()).filter(|&i| basis[i].len() % 2 == 1).collect();
    let even: Vec<usize> = (0..basis.len()).filter(|&i| basis[i].len() % 2 == 0).collect();
    let pos_odd: BTreeMap<usize, usize> = odd.iter().enumerate().map(|(p, &i)| (i, p)).collect();
    let pos_even: BTreeMap<usize, usize> = even.iter().enumerate().map(|(p, &i)| (i, p)).collect();
    let index_of: BTreeMap<Vec<usize>, usize> = basis
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();

    let mut d_minus1 = PolyMatrix::zero(&ext_ring, even.len(), odd.len());
    let mut d_zero = PolyMatrix::zero(&ext_ring, odd.len(), even.len());
    for (i, set) in basis.iter().enumerate() {
        let src_odd = set.len() % 2 == 1;
        let mut add_entry = |target_set: &[usize], value: Poly| {
            let j = index_of[target_set];
            if src_odd {
                let r = pos_even[&j];
                let c = pos_odd[&i];
                let v = d_minus1.get(r, c).add(&value);
                d_minus1.set(r, c, v);
            } else {
                let r = pos_odd[&j];
                let c = pos_even[&i];
                let v = d_zero.get(r, c).add(&value);
                d_zero.set(r, c, v);
            }
        };
        for &a in set.iter() {
            let (new, sign) = contract_sign(set, a).unwrap();
            let mut val = rho_lifted[a].clone();
            if sign < 0 {
                val = val.neg();
            }
            add_entry(&new, val);
        }
        for k in 0..n {
            if let Some((new, sign)) = wedge_sign(set, k) {
                let mut val = t_polys[k].clone();
                if sign < 0 {
                    val = val.neg();
                }
                add_entry(&new, val);
            }
        }
    }
    let weights = if ext_ring.is_graded() {
        (
            Some(odd.iter().map(|&i| -(basis[i].len() as i64)).collect()),
            Some(even.iter().map(|&i| -(basis[i].len() as i64)).collect()),
        )
    } else {
        (None, None)
    };
    let mf = MatrixFactorization::new_graded(
        ext_ring.clone(),
        h.clone(),
        d_minus1,
        d_zero,
        weights.0,
        weights.1,
    )?;
    Ok(KoszulComplex {
        extended: ext_ring,
        h,
        mf,
    })
}

/// Fold position of (degree, index) inside κ's output: which parity block
/// and the offset within it. Blocks are ordered by ascending degree.
pub fn fold_position(m: &DGModule, degree: i64, idx: usize) -> (Parity, usize) {
    let odd = degree.rem_euclid(2) == 1;
    let mut off = 0;
    for i in m.degrees() {
        if i.rem_euclid(2) != degree.rem_euclid(2) {
            continue;
        }
        if i == degree {
            return (
                if odd { Parity::Odd } else { Parity::Even },
                off + idx,
            );
        }
        off += m.rank(i);
    }
    unreachable!("degree not present in module")
}

fn fold_rank(m: &DGModule, odd: bool) -> usize {
    m.degrees()
        .into_iter()
        .filter(|i| (i.rem_euclid(2) == 1) == odd)
        .map(|i| m.rank(i))
        .sum()
}

fn fold_weights(m: &DGModule, odd: bool) -> Vec<i64> {
    let mut out = Vec::new();
    for i in m.degrees() {
        if (i.rem_euclid(2) == 1) != odd {
            continue;
        }
        for a in 0..m.rank(i) {
            out.push(i + m.weight_at(i, a));
        }
    }
    out
}

/// κ: the ℤ/2 fold of M ⊗ Sym(V) with differential d_M + Σ_k ξ_k·t_k,
/// a matrix factorization of h over the extended ring. The odd fold is the
/// (−1)-term.
pub fn kappa(m: &DGModule, t_names: &[String]) -> Result<MatrixFactorization, Error> {
    m.validate()?;
    let base = m.ext().base();
    let rho = m.ext().rho_sharp();
    let ext_ring = extended_ring(base, rho, t_names)?;
    let lift = RingMap::by_name(base, &ext_ring)?;
    let t_polys: Vec<Poly> = t_names
        .iter()
        .map(|t| Poly::var(&ext_ring, t))
        .collect::<Result<_, _>>()?;
    let mut h = Poly::zero(&ext_ring);
    for k in 0..rho.len() {
        h = h.add(&rho[k].substitute(&lift)?.mul(&t_polys[k]));
    }
    let rank_odd = fold_rank(m, true);
    let rank_even = fold_rank(m, false);
    let mut d_minus1 = PolyMatrix::zero(&ext_ring, rank_even, rank_odd);
    let mut d_zero = PolyMatrix::zero(&ext_ring, rank_odd, rank_even);
    let mut add = |src: (Parity, usize), dst: (Parity, usize), val: Poly| {
        if val.is_zero() {
            return;
        }
        match src.0 {
            Parity::Odd => {
                debug_assert!(matches!(dst.0, Parity::Even));
                let v = d_minus1.get(dst.1, src.1).add(&val);
                d_minus1.set(dst.1, src.1, v);
            }
            Parity::Even => {
                debug_assert!(matches!(dst.0, Parity::Odd));
                let v = d_zero.get(dst.1, src.1).add(&val);
                d_zero.set(dst.1, src.1, v);
            }
        }
    };
    for i in m.degrees() {
        let d_i = m.d_at(i);
        for (&(r, c), p) in d_i.entries() {
            let src = fold_position(m, i, c);
            let dst = fold_position(m, i + 1, r);
            add(src, dst, p.substitute(&lift)?);
        }
        for k in 0..m.ext().n() {
            let x = m.xi_at(k, i);
            for (&(r, c), p) in x.entries() {
                let src = fold_position(m, i, c);
                let dst = fold_position(m, i - 1, r);
                add(src, dst, p.substitute(&lift)?.mul(&t_polys[k]));
            }
        }
    }
    let (w_m1, w_0) = if ext_ring.is_graded() {
        (Some(fold_weights(m, true)), Some(fold_weights(m, false)))
    } else {
        (None, None)
    };
    MatrixFactorization::new_graded(ext_ring, h, d_minus1, d_zero, w_m1, w_0)
}

/// κ applied to a homogeneous DG-map: blocks folded and lifted, of the
/// matching ℤ/2 parity. For a Λ-linear map this lands in the Hom complex of
/// the κ-images compatibly with hom_diff.
pub fn kappa_morphism(
    f: &DGMorphism,
    kappa_source: &MatrixFactorization,
    kappa_target: &MatrixFactorization,
) -> Result<MFMorphism, Error> {
    let parity = if f.degree.rem_euclid(2) == 0 {
        Parity::Even
    } else {
        Parity::Odd
    };
    let ring = kappa_source.ring().clone();
    let lift = RingMap::by_name(f.source.ext().base(), &ring)?;
    let mut out = MFMorphism::zero(kappa_source, kappa_target, parity);
    for i in f.source.degrees() {
        let block = f.block_at(i);
        for (&(r, c), p) in block.entries() {
            let src = fold_position(&f.source, i, c);
            let dst = fold_position(&f.target, i + f.degree, r);
            let val = p.substitute(&lift)?;
            match src.0 {
                Parity::Odd => {
                    let v = out.f_minus1.get(dst.1, src.1).add(&val);
                    out.f_minus1.set(dst.1, src.1, v);
                }
                Parity::Even => {
                    let v = out.f_zero.get(dst.1, src.1).add(&val);
                    out.f_zero.set(dst.1, src.1, v);
                }
            }
        }
    }
    Ok(out)
}

/// The ⊠-compatibility certificate: the signed basis permutation
/// identifying κ(M) ⊠ κ(N) with κ(M ⊠ N), verified by matrix arithmetic.
pub fn kappa_box_compat(
    m: &DGModule,
    n: &DGModule,
    t_names_m: &[String],
    t_names_n: &[String],
) -> Result<EquivalenceCertificate, Error> {
    let box_mn = m.box_product(n)?;
    let t_all: Vec<String> = t_names_m.iter().chain(t_names_n).cloned().collect();
    let rhs = kappa(&box_mn, &t_all)?;

    let km = kappa(m, t_names_m)?;
    let kn = kappa(n, t_names_n)?;
    // Lift both κ's into rhs's ring; the variable sets are
    // (base_m, t_m) and (base_n, t_n), both inside (base_m, base_n, t_all).
    let big = rhs.ring().clone();
    let km_big = km.pullback(&RingMap::by_name(km.ring(), &big)?)?;
    let kn_big = kn.pullback(&RingMap::by_name(kn.ring(), &big)?)?;
    let lhs = km_big.tensor(&kn_big)?;

    // Index bookkeeping. lhs basis: tensor pairs (fold(m) index, fold(n)
    // index); rhs basis: fold of box blocks (i, a, j, b).
    let mr = |odd: bool| fold_rank(m, odd);
    let nr = |odd: bool| fold_rank(n, odd);
    // Position of a fold-pair inside the tensor blocks.
    let pos_in_tensor = |pm: Parity, im: usize, pn: Parity, in_: usize| -> (Parity, usize) {
        match (pm, pn) {
            (Parity::Odd, Parity::Even) => (Parity::Odd, im * nr(false) + in_),
            (Parity::Even, Parity::Odd) => {
                (Parity::Odd, mr(true) * nr(false) + im * nr(true) + in_)
            }
            (Parity::Odd, Parity::Odd) => (Parity::Even, im * nr(true) + in_),
            (Parity::Even, Parity::Even) => {
                (Parity::Even, mr(true) * nr(true) + im * nr(false) + in_)
            }
        }
    };
    // Position of (i, a, j, b) inside box_mn: blocks of total degree p
    // ordered by ascending i, Kronecker row-major within.
    let box_pos = |i: i64, a: usize, j: i64, b: usize| -> (i64, usize) {
        let p = i + j;
        let mut off = 0;
        for i2 in m.degrees() {
            let j2 = p - i2;
            if n.rank(j2) == 0 {
                continue;
            }
            if i2 == i {
                return (p, off + a * n.rank(j2) + b);
            }
            off += m.rank(i2) * n.rank(j2);
        }
        unreachable!("box block not found")
    };
    let mut perm_minus1 = vec![0usize; lhs.rank_minus1()];
    let mut perm_zero = vec![0usize; lhs.rank_zero()];
    for i in m.degrees() {
        for a in 0..m.rank(i) {
            let (pm, fm) = fold_position(m, i, a);
            for j in n.degrees() {
                for b in 0..n.rank(j) {
                    let (pn, fn_) = fold_position(n, j, b);
                    let (pt, src) = pos_in_tensor(pm, fm, pn, fn_);
                    let (p, inner) = box_pos(i, a, j, b);
                    let (pr, dst) = fold_position(&box_mn, p, inner);
                    debug_assert_eq!(pt, pr);
                    match pt {
                        Parity::Odd => perm_minus1[src] = dst,
                        Parity::Even => perm_zero[src] = dst,
                    }
                }
            }
        }
    }
    let iso = signed_permutation_iso(&lhs, &rhs, &perm_minus1, &perm_zero)?;
    let back = signed_permutation_iso(
        &rhs,
        &lhs,
        &invert_perm(&perm_minus1),
        &invert_perm(&perm_zero),
    )?;
    EquivalenceCertificate::from_iso(iso, back)
}

fn invert_perm(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0usize; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v] = i;
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgmod::ExteriorData;
    use crate::reduce::{equiv_check, EquivResult};

    fn qring(vars: &[&str]) -> Arc<Ring> {
        Ring::new(vars.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    fn wring(vars: &[(&str, i64)]) -> Arc<Ring> {
        Ring::graded(
            vars.iter().map(|(s, _)| s.to_string()).collect(),
            vars.iter().map(|(_, w)| *w).collect(),
        )
        .unwrap()
    }

    fn p(ring: &Arc<Ring>, s: &str) -> Poly {
        Poly::parse(ring, s).unwrap()
    }

    fn diagonal(ring: &Arc<Ring>, y: &str, yp: &str) -> DGModule {
        let rho = vec![p(ring, &format!("{y} - {yp}"))];
        let ext = ExteriorData::new(ring.clone(), rho).unwrap();
        let mut ranks = BTreeMap::new();
        ranks.insert(-1, 1);
        ranks.insert(0, 1);
        let mut diff = BTreeMap::new();
        diff.insert(
            -1,
            PolyMatrix::from_entries(ring, 1, 1, [(0, 0, p(ring, &format!("{y} - {yp}")))])
                .unwrap(),
        );
        let mut fam = BTreeMap::new();
        fam.insert(0, PolyMatrix::identity(ring, 1));
        let weights = Some(BTreeMap::from([(-1, vec![0]), (0, vec![0])]));
        DGModule::new(ext, ranks, diff, vec![fam], weights).unwrap()
    }

    #[test]
    fn koszul_complex_squares_to_h() {
        // n = 1, ρ♯ = y − y' → h = t(y − y').
        let r = wring(&[("y", 0), ("y'", 0)]);
        let k = build_koszul_complex(&r, &[p(&r, "y - y'")], &["t".into()]).unwrap();
        assert_eq!(k.h, Poly::parse(&k.extended, "t*y - t*y'").unwrap());
        k.mf.validate().unwrap();

        // n = 2 with the coordinate differences.
        let r2 = wring(&[("y1", 0), ("y2", 0), ("y1'", 0), ("y2'", 0)]);
        let k2 = build_koszul_complex(
            &r2,
            &[p(&r2, "y1 - y1'"), p(&r2, "y2 - y2'")],
            &["t1".into(), "t2".into()],
        )
        .unwrap();
        k2.mf.validate().unwrap();
        assert_eq!(k2.mf.rank_minus1(), 2);

        // All-zero ρ♯: h = 0, d² = 0.
        let k0 =
            build_koszul_complex(&r, &[Poly::zero(&r)], &["t".into()]).unwrap();
        assert!(k0.h.is_zero());
        k0.mf.validate().unwrap();
    }

    #[test]
    fn koszul_complex_n3_random_quadratics() {
        let r = qring(&["a", "b"]);
        let rho = vec![p(&r, "a^2 - b"), p(&r, "a*b + 1"), p(&r, "b^2 - 3*a")];
        let k = build_koszul_complex(
            &r,
            &rho,
            &["t1".into(), "t2".into(), "t3".into()],
        )
        .unwrap();
        k.mf.validate().unwrap();
        assert_eq!(k.mf.rank_minus1(), 4);
    }

    #[test]
    fn kappa_of_diagonal_is_unit_kernel() {
        let r = wring(&[("y", 0), ("y'", 0)]);
        let d = diagonal(&r, "y", "y'");
        let k = kappa(&d, &["t".into()]).unwrap();
        let ext = k.ring().clone();
        assert_eq!(k.rank_minus1(), 1);
        assert_eq!(k.d_minus1().get(0, 0), p(&ext, "y - y'"));
        assert_eq!(k.d_zero().get(0, 0), p(&ext, "t"));
        assert_eq!(k.potential(), &p(&ext, "t*y - t*y'"));
        k.validate().unwrap();
    }

    #[test]
    fn kappa_additive_on_sums_and_shifts() {
        let r = wring(&[("y", 0), ("y'", 0)]);
        let d = diagonal(&r, "y", "y'");
        let sum = d.direct_sum(&d.shift(1).unwrap()).unwrap();
        let k = kappa(&sum, &["t".into()]).unwrap();
        k.validate().unwrap();
        assert_eq!(k.rank_minus1(), 2);
        assert_eq!(k.rank_zero(), 2);
    }

    #[test]
    fn kappa_commutes_with_base_change() {
        let r = wring(&[("y", 0), ("y'", 0)]);
        let d = diagonal(&r, "y", "y'");
        // Flat base change of the O-part: adjoin a spectator variable.
        let r2 = wring(&[("y", 0), ("y'", 0), ("z", 0)]);
        let incl = RingMap::by_name(&r, &r2).unwrap();
        let d2 = d.base_change(&incl).unwrap();
        let k_then = kappa(&d2, &["t".into()]).unwrap();
        let k_first = kappa(&d, &["t".into()]).unwrap();
        let ext2 = k_then.ring().clone();
        let lift = RingMap::by_name(k_first.ring(), &ext2).unwrap();
        assert_eq!(k_first.pullback(&lift).unwrap(), k_then);
    }

    #[test]
    fn kappa_vector_space_inclusion() {
        // V ↪ V ⊕ W with the W-action zero: κ over V⊕W followed by t_W ↦ 0
        // equals κ over V.
        let r = wring(&[("y", 0), ("y'", 0)]);
        let d = diagonal(&r, "y", "y'");
        // Extend by one zero ξ with ρ♯ = 0.
        let ext_vw = ExteriorData::new(
            r.clone(),
            vec![p(&r, "y - y'"), Poly::zero(&r)],
        )
        .unwrap();
        let d_vw = DGModule::new(
            ext_vw,
            d.ranks().clone(),
            BTreeMap::from([(-1, d.d_at(-1))]),
            vec![
                BTreeMap::from([(0, d.xi_at(0, 0))]),
                BTreeMap::new(),
            ],
            d.weights().cloned(),
        )
        .unwrap();
        let k_vw = kappa(&d_vw, &["t".into(), "s".into()]).unwrap();
        let k_v = kappa(&d, &["t".into()]).unwrap();
        // Specialize s ↦ 0.
        let ext_v = k_v.ring().clone();
        let spec = RingMap::new(
            k_vw.ring().clone(),
            ext_v.clone(),
            vec![
                p(&ext_v, "y"),
                p(&ext_v, "y'"),
                p(&ext_v, "t"),
                Poly::zero(&ext_v),
            ],
        )
        .unwrap();
        assert_eq!(k_vw.pullback(&spec).unwrap(), k_v);
    }

    #[test]
    fn kappa_box_compatibility_diag_diag() {
        let r1 = wring(&[("y", 0), ("y'", 0)]);
        let r2 = wring(&[("z", 0), ("z'", 0)]);
        let m = diagonal(&r1, "y", "y'");
        let n = diagonal(&r2, "z", "z'");
        let cert = kappa_box_compat(&m, &n, &["t".into()], &["s".into()]).unwrap();
        cert.verify().unwrap();
        // 4×4 signed permutation on each side.
        assert_eq!(cert.forward.source.rank_minus1(), 2);
    }

    #[test]
    fn kappa_box_with_unit() {
        let r1 = wring(&[("y", 0), ("y'", 0)]);
        let m = diagonal(&r1, "y", "y'");
        let r2 = wring(&[("w", 0)]);
        let unit = DGModule::new(
            ExteriorData::new(r2.clone(), vec![]).unwrap(),
            BTreeMap::from([(0, 1)]),
            BTreeMap::new(),
            vec![],
            Some(BTreeMap::from([(0, vec![0])])),
        )
        .unwrap();
        let cert = kappa_box_compat(&m, &unit, &["t".into()], &[]).unwrap();
        cert.verify().unwrap();
    }

    #[test]
    fn kappa_sends_dg_homotopy_data_to_mf_certificates() {
        // f : D ⊕ C → D with C the contractible pair (deg 0 → deg 1, d = 1,
        // ξ(c₁) = ρ♯·c₀); the DG homotopy h transports to hom-complex data
        // under κ, giving a verified equivalence certificate.
        let r = wring(&[("y", 0), ("y'", 0)]);
        let d = diagonal(&r, "y", "y'");
        let rho = p(&r, "y - y'");
        let c = DGModule::new(
            ExteriorData::new(r.clone(), vec![rho.clone()]).unwrap(),
            BTreeMap::from([(0, 1), (1, 1)]),
            BTreeMap::from([(0, PolyMatrix::identity(&r, 1))]),
            vec![BTreeMap::from([(
                1,
                PolyMatrix::from_entries(&r, 1, 1, [(0, 0, rho.clone())]).unwrap(),
            )])],
            Some(BTreeMap::from([(0, vec![0]), (1, vec![0])])),
        )
        .unwrap();
        let sum = d.direct_sum(&c).unwrap();
        // f: projection onto D, g: inclusion; gf − id = hom_diff(h̃) with
        // h̃ the (negated) contraction of C.
        let blocks_f = BTreeMap::from([
            (-1, PolyMatrix::identity(&r, 1)),
            (0, PolyMatrix::from_entries(&r, 1, 2, [(0, 0, p(&r, "1"))]).unwrap()),
        ]);
        let f = DGMorphism {
            source: sum.clone(),
            target: d.clone(),
            degree: 0,
            blocks: blocks_f,
        };
        let blocks_g = BTreeMap::from([
            (-1, PolyMatrix::identity(&r, 1)),
            (0, PolyMatrix::from_entries(&r, 2, 1, [(0, 0, p(&r, "1"))]).unwrap()),
        ]);
        let g = DGMorphism {
            source: d.clone(),
            target: sum.clone(),
            degree: 0,
            blocks: blocks_g,
        };
        assert!(f.is_closed().unwrap() && g.is_closed().unwrap());
        assert!(f.is_lambda_linear().unwrap() && g.is_lambda_linear().unwrap());
        // h̃: degree −1 on D ⊕ C, −contraction on the C part.
        let h = DGMorphism {
            source: sum.clone(),
            target: sum.clone(),
            degree: -1,
            blocks: BTreeMap::from([(
                1,
                PolyMatrix::from_entries(&r, 2, 1, [(1, 0, p(&r, "-1"))]).unwrap(),
            )]),
        };
        assert!(h.is_lambda_linear().unwrap());
        let t = vec!["t".to_string()];
        let k_sum = kappa(&sum, &t).unwrap();
        let k_d = kappa(&d, &t).unwrap();
        let forward = kappa_morphism(&f, &k_sum, &k_d).unwrap();
        let backward = kappa_morphism(&g, &k_d, &k_sum).unwrap();
        let h_source = kappa_morphism(&h, &k_sum, &k_sum).unwrap();
        let cert = EquivalenceCertificate {
            h_target: crate::mf::MFMorphism::zero(&k_d, &k_d, crate::mf::Parity::Odd),
            forward,
            backward,
            h_source,
        };
        cert.verify().unwrap();
    }

    #[test]
    fn kappa_descends_homotopy_equivalences() {
        // f: D ⊕ contractible → D collapses; κ(f)-style certificate on the
        // matrix side via equiv_check of the κ images.
        let r = wring(&[("y", 0), ("y'", 0)]);
        let d = diagonal(&r, "y", "y'");
        let sum = d.direct_sum(&d).unwrap();
        let k_sum = kappa(&sum, &["t".into()]).unwrap();
        let k_d = kappa(&d, &["t".into()]).unwrap();
        let two = k_d.direct_sum(&k_d).unwrap();
        // κ(M ⊕ M) is literally κ(M) ⊕ κ(M) after basis reordering; verify
        // equivalence with certificates.
        match equiv_check(&k_sum, &two, 4).unwrap() {
            EquivResult::Equivalent(c) => c.verify().unwrap(),
            other => panic!("expected equivalence, got {other:?}"),
        }
    }
}
