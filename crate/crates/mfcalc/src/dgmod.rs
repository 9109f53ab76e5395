//! Perf DG-modules over O ⊗ Λ(V*): finite free ℤ-graded modules with a
//! degree-+1 differential and degree-−1 exterior actions ξ_k satisfying
//! d∘ξ_k + ξ_k∘d = ρ♯(ξ_k)·id, plus the external product ⊠.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::Error;
use crate::matrix::PolyMatrix;
use crate::ring::{Poly, Ring, RingMap};

/// The base ring together with the images ρ♯(ξ_k) of the dual basis of V*.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExteriorData {
    base: Arc<Ring>,
    rho_sharp: Vec<Poly>,
}

impl ExteriorData {
    pub fn new(base: Arc<Ring>, rho_sharp: Vec<Poly>) -> Result<ExteriorData, Error> {
        for p in &rho_sharp {
            if *p.ring() != base {
                return Err(Error::RingMismatch);
            }
        }
        Ok(ExteriorData { base, rho_sharp })
    }

    pub fn base(&self) -> &Arc<Ring> {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.rho_sharp.len()
    }

    pub fn rho_sharp(&self) -> &[Poly] {
        &self.rho_sharp
    }

    pub fn base_change(&self, map: &RingMap) -> Result<ExteriorData, Error> {
        let rho = self
            .rho_sharp
            .iter()
            .map(|p| p.substitute(map))
            .collect::<Result<Vec<_>, _>>()?;
        ExteriorData::new(map.target().clone(), rho)
    }
}

/// Finite free ℤ-graded DG-module over O ⊗ Λ(V*). `diff[i]` maps degree i to
/// i+1 and `xi[k][i]` maps degree i to i−1; absent matrices are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DGModule {
    ext: ExteriorData,
    ranks: BTreeMap<i64, usize>,
    diff: BTreeMap<i64, PolyMatrix>,
    xi: Vec<BTreeMap<i64, PolyMatrix>>,
    weights: Option<BTreeMap<i64, Vec<i64>>>,
}

impl DGModule {
    pub fn new(
        ext: ExteriorData,
        ranks: BTreeMap<i64, usize>,
        diff: BTreeMap<i64, PolyMatrix>,
        xi: Vec<BTreeMap<i64, PolyMatrix>>,
        weights: Option<BTreeMap<i64, Vec<i64>>>,
    ) -> Result<DGModule, Error> {
        let m = DGModule {
            ext,
            ranks: ranks.into_iter().filter(|&(_, r)| r > 0).collect(),
            diff,
            xi,
            weights,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn ext(&self) -> &ExteriorData {
        &self.ext
    }

    pub fn ranks(&self) -> &BTreeMap<i64, usize> {
        &self.ranks
    }

    pub fn rank(&self, degree: i64) -> usize {
        self.ranks.get(&degree).copied().unwrap_or(0)
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.ranks.keys().copied().collect()
    }

    pub fn weights(&self) -> Option<&BTreeMap<i64, Vec<i64>>> {
        self.weights.as_ref()
    }

    pub fn weight_at(&self, degree: i64, idx: usize) -> i64 {
        self.weights
            .as_ref()
            .and_then(|w| w.get(&degree))
            .map(|v| v[idx])
            .unwrap_or(0)
    }

    pub fn d_at(&self, degree: i64) -> PolyMatrix {
        self.diff.get(&degree).cloned().unwrap_or_else(|| {
            PolyMatrix::zero(self.ext.base(), self.rank(degree + 1), self.rank(degree))
        })
    }

    pub fn xi_at(&self, k: usize, degree: i64) -> PolyMatrix {
        self.xi
            .get(k)
            .and_then(|m| m.get(&degree))
            .cloned()
            .unwrap_or_else(|| {
                PolyMatrix::zero(self.ext.base(), self.rank(degree - 1), self.rank(degree))
            })
    }

    /// Checks shapes, d² = 0, ξ-anticommutation, and the Leibniz identity
    /// d∘ξ_k + ξ_k∘d = ρ♯(ξ_k)·id, all exactly.
    pub fn validate(&self) -> Result<(), Error> {
        let base = self.ext.base().clone();
        if self.xi.len() != self.ext.n() {
            return Err(Error::DimensionMismatch(format!(
                "{} xi families for an exterior algebra on {} generators",
                self.xi.len(),
                self.ext.n()
            )));
        }
        for (&i, d) in &self.diff {
            if *d.ring() != base || d.rows() != self.rank(i + 1) || d.cols() != self.rank(i) {
                return Err(Error::DimensionMismatch(format!(
                    "differential at degree {i} has shape {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    self.rank(i + 1),
                    self.rank(i)
                )));
            }
        }
        for (k, fam) in self.xi.iter().enumerate() {
            for (&i, x) in fam {
                if *x.ring() != base || x.rows() != self.rank(i - 1) || x.cols() != self.rank(i) {
                    return Err(Error::DimensionMismatch(format!(
                        "xi_{k} at degree {i} has shape {}x{}, expected {}x{}",
                        x.rows(),
                        x.cols(),
                        self.rank(i - 1),
                        self.rank(i)
                    )));
                }
            }
        }
        let degrees = self.degrees();
        for &i in &degrees {
            // d² = 0 out of degree i.
            let dd = self.d_at(i + 1).compose(&self.d_at(i))?;
            if !dd.is_zero() {
                return Err(Error::Validation(format!("d² ≠ 0 out of degree {i}")));
            }
            for k in 0..self.ext.n() {
                for l in k..self.ext.n() {
                    let anti = self
                        .xi_at(k, i - 1)
                        .compose(&self.xi_at(l, i))?
                        .add(&self.xi_at(l, i - 1).compose(&self.xi_at(k, i))?)?;
                    if !anti.is_zero() {
                        return Err(Error::Validation(format!(
                            "ξ_{k}ξ_{l} + ξ_{l}ξ_{k} ≠ 0 at degree {i}"
                        )));
                    }
                }
                let leib = self
                    .d_at(i - 1)
                    .compose(&self.xi_at(k, i))?
                    .add(&self.xi_at(k, i + 1).compose(&self.d_at(i))?)?;
                let want = PolyMatrix::scalar(&base, self.rank(i), &self.ext.rho_sharp()[k]);
                if leib != want {
                    return Err(Error::Validation(format!(
                        "Leibniz identity fails for ξ_{k} at degree {i}"
                    )));
                }
            }
        }
        if let Some(w) = &self.weights {
            for (&i, v) in w {
                if v.len() != self.rank(i) {
                    return Err(Error::DimensionMismatch(
                        "weight vector length mismatch".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn base_change(&self, map: &RingMap) -> Result<DGModule, Error> {
        let ext = self.ext.base_change(map)?;
        let diff = self
            .diff
            .iter()
            .map(|(&i, d)| Ok((i, d.base_change(map)?)))
            .collect::<Result<BTreeMap<_, _>, Error>>()?;
        let xi = self
            .xi
            .iter()
            .map(|fam| {
                fam.iter()
                    .map(|(&i, x)| Ok((i, x.base_change(map)?)))
                    .collect::<Result<BTreeMap<_, _>, Error>>()
            })
            .collect::<Result<Vec<_>, Error>>()?;
        DGModule::new(ext, self.ranks.clone(), diff, xi, self.weights.clone())
    }

    pub fn direct_sum(&self, other: &DGModule) -> Result<DGModule, Error> {
        if self.ext != other.ext {
            return Err(Error::Validation(
                "direct sum requires equal exterior data".into(),
            ));
        }
        let mut ranks = BTreeMap::new();
        let degrees: std::collections::BTreeSet<i64> = self
            .degrees()
            .into_iter()
            .chain(other.degrees())
            .collect();
        for &i in &degrees {
            ranks.insert(i, self.rank(i) + other.rank(i));
        }
        let mut diff = BTreeMap::new();
        for &i in &degrees {
            let d = self.d_at(i).direct_sum(&other.d_at(i))?;
            if !d.is_zero() {
                diff.insert(i, d);
            }
        }
        let mut xi = Vec::new();
        for k in 0..self.ext.n() {
            let mut fam = BTreeMap::new();
            for &i in &degrees {
                let x = self.xi_at(k, i).direct_sum(&other.xi_at(k, i))?;
                if !x.is_zero() {
                    fam.insert(i, x);
                }
            }
            xi.push(fam);
        }
        let weights = match (&self.weights, &other.weights) {
            (Some(a), Some(b)) => {
                let mut w = BTreeMap::new();
                for &i in &degrees {
                    let mut v = a.get(&i).cloned().unwrap_or_default();
                    v.extend(b.get(&i).cloned().unwrap_or_default());
                    w.insert(i, v);
                }
                Some(w)
            }
            _ => None,
        };
        DGModule::new(self.ext.clone(), ranks, diff, xi, weights)
    }

    /// Degree shift M[s]^i = M^{i+s}; differentials and ξ-actions pick up
    /// the sign (−1)^s.
    pub fn shift(&self, s: i64) -> Result<DGModule, Error> {
        let sign = if s.rem_euclid(2) == 0 { 1 } else { -1 };
        let adjust = |m: &PolyMatrix| {
            if sign == 1 {
                m.clone()
            } else {
                m.neg()
            }
        };
        let ranks = self.ranks.iter().map(|(&i, &r)| (i - s, r)).collect();
        let diff = self
            .diff
            .iter()
            .map(|(&i, d)| (i - s, adjust(d)))
            .collect();
        let xi = self
            .xi
            .iter()
            .map(|fam| fam.iter().map(|(&i, x)| (i - s, adjust(x))).collect())
            .collect();
        let weights = self
            .weights
            .as_ref()
            .map(|w| w.iter().map(|(&i, v)| (i - s, v.clone())).collect());
        DGModule::new(self.ext.clone(), ranks, diff, xi, weights)
    }

    /// Graded tensor product over a common base ring, with the Koszul sign
    /// on the second factor: d(a⊗b) = da⊗b + (−1)^|a| a⊗db; the first
    /// factor's ξ's act plainly, the second factor's with (−1)^|a|.
    /// The exterior generators concatenate.
    pub fn tensor_over_base(&self, other: &DGModule) -> Result<DGModule, Error> {
        if self.ext.base() != other.ext.base() {
            return Err(Error::RingMismatch);
        }
        let base = self.ext.base().clone();
        let mut rho = self.ext.rho_sharp().to_vec();
        rho.extend(other.ext.rho_sharp().iter().cloned());
        let ext = ExteriorData::new(base.clone(), rho)?;

        // Blocks of total degree p: (i, j = p − i) ordered by ascending i.
        let blocks_of = |p: i64| -> Vec<(i64, i64)> {
            self.degrees()
                .into_iter()
                .filter_map(|i| {
                    let j = p - i;
                    (other.rank(j) > 0).then_some((i, j))
                })
                .collect()
        };
        let mut total_degrees: std::collections::BTreeSet<i64> = Default::default();
        for i in self.degrees() {
            for j in other.degrees() {
                total_degrees.insert(i + j);
            }
        }
        let mut ranks = BTreeMap::new();
        for &p in &total_degrees {
            let r: usize = blocks_of(p)
                .iter()
                .map(|&(i, j)| self.rank(i) * other.rank(j))
                .sum();
            if r > 0 {
                ranks.insert(p, r);
            }
        }
        let offsets = |p: i64| -> Vec<((i64, i64), usize)> {
            let mut out = Vec::new();
            let mut off = 0;
            for (i, j) in blocks_of(p) {
                out.push(((i, j), off));
                off += self.rank(i) * other.rank(j);
            }
            out
        };
        let rank_total =
            |p: i64| -> usize { ranks.get(&p).copied().unwrap_or(0) };

        let mut diff: BTreeMap<i64, PolyMatrix> = BTreeMap::new();
        let mut xi: Vec<BTreeMap<i64, PolyMatrix>> =
            vec![BTreeMap::new(); self.ext.n() + other.ext.n()];
        for &p in &total_degrees {
            let src_offsets = offsets(p);
            let dst_offsets_up = offsets(p + 1);
            let dst_offsets_down = offsets(p - 1);
            let find = |list: &[((i64, i64), usize)], key: (i64, i64)| -> Option<usize> {
                list.iter().find(|(k, _)| *k == key).map(|&(_, o)| o)
            };
            let mut d_p = PolyMatrix::zero(&base, rank_total(p + 1), rank_total(p));
            let mut xi_p: Vec<PolyMatrix> = (0..xi.len())
                .map(|_| PolyMatrix::zero(&base, rank_total(p - 1), rank_total(p)))
                .collect();
            for &((i, j), src_off) in &src_offsets {
                let sign_even = i.rem_euclid(2) == 0;
                let id_i = PolyMatrix::identity(&base, self.rank(i));
                let id_j = PolyMatrix::identity(&base, other.rank(j));
                // d_m ⊗ id
                if let Some(dst) = find(&dst_offsets_up, (i + 1, j)) {
                    let block = self.d_at(i).kronecker(&id_j)?;
                    copy_block(&mut d_p, dst, src_off, &block, false);
                }
                // ±id ⊗ d_n
                if let Some(dst) = find(&dst_offsets_up, (i, j + 1)) {
                    let block = id_i.kronecker(&other.d_at(j))?;
                    copy_block(&mut d_p, dst, src_off, &block, !sign_even);
                }
                // first-factor ξ's
                for k in 0..self.ext.n() {
                    if let Some(dst) = find(&dst_offsets_down, (i - 1, j)) {
                        let block = self.xi_at(k, i).kronecker(&id_j)?;
                        copy_block(&mut xi_p[k], dst, src_off, &block, false);
                    }
                }
                // second-factor ξ's with the Koszul sign
                for l in 0..other.ext.n() {
                    if let Some(dst) = find(&dst_offsets_down, (i, j - 1)) {
                        let block = id_i.kronecker(&other.xi_at(l, j))?;
                        copy_block(
                            &mut xi_p[self.ext.n() + l],
                            dst,
                            src_off,
                            &block,
                            !sign_even,
                        );
                    }
                }
            }
            if !d_p.is_zero() {
                diff.insert(p, d_p);
            }
            for (k, x) in xi_p.into_iter().enumerate() {
                if !x.is_zero() {
                    xi[k].insert(p, x);
                }
            }
        }
        let weights = match (&self.weights, &other.weights) {
            (Some(_), Some(_)) => {
                let mut w = BTreeMap::new();
                for &p in &total_degrees {
                    let mut v = Vec::new();
                    for ((i, j), _) in offsets(p) {
                        for a in 0..self.rank(i) {
                            for b in 0..other.rank(j) {
                                v.push(self.weight_at(i, a) + other.weight_at(j, b));
                            }
                        }
                    }
                    if !v.is_empty() {
                        w.insert(p, v);
                    }
                }
                Some(w)
            }
            _ => None,
        };
        DGModule::new(ext, ranks, diff, xi, weights)
    }

    /// External product ⊠: lifts both factors to the concatenated ring and
    /// takes the graded tensor there.
    pub fn box_product(&self, other: &DGModule) -> Result<DGModule, Error> {
        let r1 = self.ext.base();
        let r2 = other.ext.base();
        for v in r2.vars() {
            if r1.var_index(v).is_some() {
                return Err(Error::BadRing(format!(
                    "box product requires disjoint variables, `{v}` repeats"
                )));
            }
        }
        let mut vars: Vec<String> = r1.vars().to_vec();
        vars.extend(r2.vars().iter().cloned());
        let product = match (r1.weights(), r2.weights()) {
            (Some(w1), Some(w2)) => {
                let mut w = w1.to_vec();
                w.extend_from_slice(w2);
                Ring::graded(vars, w)?
            }
            _ => Ring::new(vars)?,
        };
        let lift1 = RingMap::by_name(r1, &product)?;
        let lift2 = RingMap::by_name(r2, &product)?;
        self.base_change(&lift1)?
            .tensor_over_base(&other.base_change(&lift2)?)
    }

    /// Restriction of scalars along the sum embedding ξ_k ↦ ξ_k + ξ_{n+k}
    /// of Λ(V) into Λ(V)⊗Λ(V): the two ξ-families are summed pairwise and
    /// the ρ♯ images add. The underlying complex is unchanged.
    pub fn collapse_xi_pairs(&self) -> Result<DGModule, Error> {
        let n2 = self.ext.n();
        if n2 % 2 != 0 {
            return Err(Error::Validation(
                "collapse requires an even number of exterior generators".into(),
            ));
        }
        let n = n2 / 2;
        let mut rho = Vec::with_capacity(n);
        for k in 0..n {
            rho.push(self.ext.rho_sharp()[k].add(&self.ext.rho_sharp()[n + k]));
        }
        let ext = ExteriorData::new(self.ext.base().clone(), rho)?;
        let mut xi = Vec::with_capacity(n);
        for k in 0..n {
            let mut fam = BTreeMap::new();
            for i in self.degrees() {
                let sum = self.xi_at(k, i).add(&self.xi_at(n + k, i))?;
                if !sum.is_zero() {
                    fam.insert(i, sum);
                }
            }
            xi.push(fam);
        }
        DGModule::new(
            ext,
            self.ranks.clone(),
            self.diff.clone(),
            xi,
            self.weights.clone(),
        )
    }
}

fn copy_block(dst: &mut PolyMatrix, roff: usize, coff: usize, block: &PolyMatrix, negate: bool) {
    for (&(r, c), p) in block.entries() {
        let v = if negate { p.neg() } else { p.clone() };
        let prev = dst.get(roff + r, coff + c).add(&v);
        dst.set(roff + r, coff + c, prev);
    }
}

/// The free Koszul module O ⊗ Λ(V*) over itself: subsets of the generators
/// in degree −|S|, differential the contraction with ρ♯, ξ_k acting by
/// wedge. A Perf representative of O_{ρ = 0} for any regular ρ♯.
pub fn free_koszul_module(ext: &ExteriorData) -> Result<DGModule, Error> {
    let n = ext.n();
    let base = ext.base().clone();
    let mut subsets: Vec<Vec<usize>> = (0u32..(1 << n))
        .map(|mask| (0..n).filter(|&k| mask >> k & 1 == 1).collect())
        .collect();
    subsets.sort_by_key(|s| (s.len(), s.clone()));
    let index_of: BTreeMap<Vec<usize>, usize> = subsets
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    let mut ranks: BTreeMap<i64, usize> = BTreeMap::new();
    for s in &subsets {
        *ranks.entry(-(s.len() as i64)).or_insert(0) += 1;
    }
    let pos_in_degree = |i: usize| -> usize {
        let deg = -(subsets[i].len() as i64);
        subsets
            .iter()
            .enumerate()
            .filter(|(_, s)| -(s.len() as i64) == deg)
            .position(|(j, _)| j == i)
            .unwrap()
    };
    let mut diff: BTreeMap<i64, PolyMatrix> = BTreeMap::new();
    let mut xi: Vec<BTreeMap<i64, PolyMatrix>> = vec![BTreeMap::new(); n];
    for (i, set) in subsets.iter().enumerate() {
        let deg = -(set.len() as i64);
        for (pos, &a) in set.iter().enumerate() {
            let mut new = set.clone();
            new.remove(pos);
            let j = index_of[&new];
            let entry = diff
                .entry(deg)
                .or_insert_with(|| PolyMatrix::zero(&base, ranks[&(deg + 1)], ranks[&deg]));
            let mut val = ext.rho_sharp()[a].clone();
            if pos % 2 == 1 {
                val = val.neg();
            }
            let prev = entry.get(pos_in_degree(j), pos_in_degree(i)).add(&val);
            entry.set(pos_in_degree(j), pos_in_degree(i), prev);
        }
        for k in 0..n {
            if set.contains(&k) {
                continue;
            }
            let below = set.iter().filter(|&&s| s < k).count();
            let mut new = set.clone();
            new.push(k);
            new.sort_unstable();
            let j = index_of[&new];
            let entry = xi[k]
                .entry(deg)
                .or_insert_with(|| PolyMatrix::zero(&base, ranks[&(deg - 1)], ranks[&deg]));
            let val = Poly::int(&base, if below % 2 == 0 { 1 } else { -1 });
            entry.set(pos_in_degree(j), pos_in_degree(i), val);
        }
    }
    let weights = base
        .is_graded()
        .then(|| ranks.iter().map(|(&d, &r)| (d, vec![0; r])).collect());
    DGModule::new(ext.clone(), ranks, diff, xi, weights)
}

/// A homogeneous map of DG-modules: blocks M^i → N^{i+degree}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DGMorphism {
    pub source: DGModule,
    pub target: DGModule,
    pub degree: i64,
    pub blocks: BTreeMap<i64, PolyMatrix>,
}

impl DGMorphism {
    pub fn block_at(&self, i: i64) -> PolyMatrix {
        self.blocks.get(&i).cloned().unwrap_or_else(|| {
            PolyMatrix::zero(
                self.source.ext().base(),
                self.target.rank(i + self.degree),
                self.source.rank(i),
            )
        })
    }

    /// d_N ∘ f − (−1)^{degree} f ∘ d_M, blockwise.
    pub fn hom_diff(&self) -> Result<DGMorphism, Error> {
        let sign = if self.degree.rem_euclid(2) == 0 { 1 } else { -1 };
        let mut blocks = BTreeMap::new();
        let mut degrees: std::collections::BTreeSet<i64> =
            self.source.degrees().into_iter().collect();
        degrees.extend(self.blocks.keys().copied());
        for &i in &degrees {
            let a = self
                .target
                .d_at(i + self.degree)
                .compose(&self.block_at(i))?;
            let b = self.block_at(i + 1).compose(&self.source.d_at(i))?;
            let total = if sign == 1 { a.sub(&b)? } else { a.add(&b)? };
            if !total.is_zero() {
                blocks.insert(i, total);
            }
        }
        Ok(DGMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            degree: self.degree + 1,
            blocks,
        })
    }

    pub fn is_closed(&self) -> Result<bool, Error> {
        Ok(self.hom_diff()?.blocks.is_empty())
    }

    /// Graded Λ-linearity: f(ξx) = (−1)^{degree} ξ f(x) for every generator.
    pub fn is_lambda_linear(&self) -> Result<bool, Error> {
        let sign = if self.degree.rem_euclid(2) == 0 { 1 } else { -1 };
        for k in 0..self.source.ext().n() {
            for i in self.source.degrees() {
                let lhs = self.block_at(i - 1).compose(&self.source.xi_at(k, i))?;
                let rhs = self
                    .target
                    .xi_at(k, i + self.degree)
                    .compose(&self.block_at(i))?;
                let rhs = if sign == 1 { rhs } else { rhs.neg() };
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qring(vars: &[&str]) -> Arc<Ring> {
        Ring::new(vars.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    fn p(ring: &Arc<Ring>, s: &str) -> Poly {
        Poly::parse(ring, s).unwrap()
    }

    /// The diagonal module for Y = 𝔸¹: degrees −1, 0 of rank 1,
    /// d(e) = (y − y')·1, ξ·1 = e, ξ·e = 0.
    pub(crate) fn diagonal_a1(scale: i64) -> DGModule {
        let r = qring(&["y", "y'"]);
        let rho = vec![p(&r, "y - y'")];
        let ext = ExteriorData::new(r.clone(), rho).unwrap();
        let mut ranks = BTreeMap::new();
        ranks.insert(-1, 1);
        ranks.insert(0, 1);
        let mut diff = BTreeMap::new();
        diff.insert(
            -1,
            PolyMatrix::from_entries(&r, 1, 1, [(0, 0, p(&r, "y - y'"))]).unwrap(),
        );
        let mut fam = BTreeMap::new();
        fam.insert(
            0,
            PolyMatrix::from_entries(&r, 1, 1, [(0, 0, Poly::int(&r, scale))]).unwrap(),
        );
        DGModule::new(ext, ranks, diff, vec![fam], None).unwrap()
    }

    #[test]
    fn validate_diagonal_and_free() {
        let m = diagonal_a1(1);
        m.validate().unwrap();
    }

    #[test]
    fn leibniz_violation_reported() {
        let r = qring(&["y", "y'"]);
        let rho = vec![p(&r, "y - y'")];
        let ext = ExteriorData::new(r.clone(), rho).unwrap();
        let mut ranks = BTreeMap::new();
        ranks.insert(-1, 1);
        ranks.insert(0, 1);
        let mut diff = BTreeMap::new();
        diff.insert(
            -1,
            PolyMatrix::from_entries(&r, 1, 1, [(0, 0, p(&r, "y - y'"))]).unwrap(),
        );
        // ξ·1 = 2e breaks d(ξ1) = ρ♯·1.
        let mut fam = BTreeMap::new();
        fam.insert(
            0,
            PolyMatrix::from_entries(&r, 1, 1, [(0, 0, p(&r, "2"))]).unwrap(),
        );
        let err = DGModule::new(ext, ranks, diff, vec![fam], None).unwrap_err();
        assert!(matches!(err, Error::Validation(ref m) if m.contains("Leibniz")));
    }

    #[test]
    fn box_ranks_convolve() {
        let m = diagonal_a1(1);
        // Rename the second copy's variables.
        let r2 = qring(&["z", "z'"]);
        let map = RingMap::new(
            m.ext().base().clone(),
            r2.clone(),
            vec![p(&r2, "z"), p(&r2, "z'")],
        )
        .unwrap();
        let n = m.base_change(&map).unwrap();
        let b = m.box_product(&n).unwrap();
        assert_eq!(b.rank(-2), 1);
        assert_eq!(b.rank(-1), 2);
        assert_eq!(b.rank(0), 1);
        b.validate().unwrap();
    }

    #[test]
    fn box_with_unit_module() {
        let m = diagonal_a1(1);
        let r2 = qring(&["w"]);
        let ext2 = ExteriorData::new(r2.clone(), vec![]).unwrap();
        let mut ranks = BTreeMap::new();
        ranks.insert(0, 1);
        let unit = DGModule::new(ext2, ranks, BTreeMap::new(), vec![], None).unwrap();
        let b = m.box_product(&unit).unwrap();
        assert_eq!(b.ranks(), m.ranks());
        b.validate().unwrap();
    }

    #[test]
    fn collapse_xi_after_box() {
        // Two 𝔸¹ diagonals over a shared triple ring glued by ξ₁ + ξ₂.
        let r3 = qring(&["y", "y'", "y''"]);
        let m = diagonal_a1(1);
        let m12 = m
            .base_change(
                &RingMap::new(
                    m.ext().base().clone(),
                    r3.clone(),
                    vec![p(&r3, "y"), p(&r3, "y'")],
                )
                .unwrap(),
            )
            .unwrap();
        let m23 = m
            .base_change(
                &RingMap::new(
                    m.ext().base().clone(),
                    r3.clone(),
                    vec![p(&r3, "y'"), p(&r3, "y''")],
                )
                .unwrap(),
            )
            .unwrap();
        let t = m12.tensor_over_base(&m23).unwrap();
        t.validate().unwrap();
        let c = t.collapse_xi_pairs().unwrap();
        assert_eq!(c.ext().n(), 1);
        assert_eq!(c.ext().rho_sharp()[0], p(&r3, "y - y''"));
        c.validate().unwrap();
    }

    #[test]
    fn shift_and_sum() {
        let m = diagonal_a1(1);
        let s = m.shift(1).unwrap();
        assert_eq!(s.rank(-2), 1);
        s.validate().unwrap();
        let sum = m.direct_sum(&m).unwrap();
        assert_eq!(sum.rank(0), 2);
        sum.validate().unwrap();
    }
}
