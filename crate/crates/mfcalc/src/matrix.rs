//! Finite free modules presented by rank and module maps presented by sparse
//! polynomial matrices: composition, base change, and finite restriction of
//! scalars along a free ring extension with an explicit monomial basis.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::ring::{Coeff, Monomial, Poly, Ring, RingMap};

/// Sparse matrix of polynomials; maps a rank-`cols` free module to a
/// rank-`rows` free module over the same ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    ring: Arc<Ring>,
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Poly>,
}

impl PolyMatrix {
    pub fn zero(ring: &Arc<Ring>, rows: usize, cols: usize) -> PolyMatrix {
        PolyMatrix {
            ring: ring.clone(),
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(ring: &Arc<Ring>, n: usize) -> PolyMatrix {
        let mut m = PolyMatrix::zero(ring, n, n);
        for i in 0..n {
            m.set(i, i, Poly::int(ring, 1));
        }
        m
    }

    pub fn scalar(ring: &Arc<Ring>, n: usize, p: &Poly) -> PolyMatrix {
        let mut m = PolyMatrix::zero(ring, n, n);
        for i in 0..n {
            m.set(i, i, p.clone());
        }
        m
    }

    pub fn from_entries<I>(
        ring: &Arc<Ring>,
        rows: usize,
        cols: usize,
        entries: I,
    ) -> Result<PolyMatrix, Error>
    where
        I: IntoIterator<Item = (usize, usize, Poly)>,
    {
        let mut m = PolyMatrix::zero(ring, rows, cols);
        for (r, c, p) in entries {
            if r >= rows || c >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({r},{c}) out of bounds for {rows}x{cols}"
                )));
            }
            if *p.ring() != *ring {
                return Err(Error::RingMismatch);
            }
            m.set(r, c, p);
        }
        Ok(m)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Poly {
        self.entries
            .get(&(r, c))
            .cloned()
            .unwrap_or_else(|| Poly::zero(&self.ring))
    }

    pub fn get_ref(&self, r: usize, c: usize) -> Option<&Poly> {
        self.entries.get(&(r, c))
    }

    pub fn set(&mut self, r: usize, c: usize, p: Poly) {
        assert!(r < self.rows && c < self.cols, "matrix index out of bounds");
        if p.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), p);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Poly)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut m = PolyMatrix::zero(&self.ring, self.cols, self.rows);
        for (&(r, c), p) in &self.entries {
            m.set(c, r, p.clone());
        }
        m
    }

    pub fn neg(&self) -> PolyMatrix {
        PolyMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|(&k, p)| (k, p.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Coeff) -> PolyMatrix {
        if c.is_zero() {
            return PolyMatrix::zero(&self.ring, self.rows, self.cols);
        }
        PolyMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|(&k, p)| (k, p.scale(c)))
                .collect(),
        }
    }

    pub fn add(&self, other: &PolyMatrix) -> Result<PolyMatrix, Error> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (&(r, c), p) in &other.entries {
            let s = out.get(r, c).add(p);
            out.set(r, c, s);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PolyMatrix) -> Result<PolyMatrix, Error> {
        self.add(&other.neg())
    }

    /// Exact matrix product `self ∘ other` (self applied after other).
    pub fn compose(&self, other: &PolyMatrix) -> Result<PolyMatrix, Error> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "compose {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = PolyMatrix::zero(&self.ring, self.rows, other.cols);
        // Sparse product: group other's entries by row.
        let mut by_row: BTreeMap<usize, Vec<(usize, &Poly)>> = BTreeMap::new();
        for (&(r, c), p) in &other.entries {
            by_row.entry(r).or_default().push((c, p));
        }
        for (&(r, k), p) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(c, q) in row {
                    let s = out.get(r, c).add(&p.mul(q));
                    out.set(r, c, s);
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product with row-major pair ordering:
    /// index (i,j) of self⊗other is i·other_dim + j.
    pub fn kronecker(&self, other: &PolyMatrix) -> Result<PolyMatrix, Error> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        let mut out = PolyMatrix::zero(
            &self.ring,
            self.rows * other.rows,
            self.cols * other.cols,
        );
        for (&(r1, c1), p) in &self.entries {
            for (&(r2, c2), q) in &other.entries {
                out.set(
                    r1 * other.rows + r2,
                    c1 * other.cols + c2,
                    p.mul(q),
                );
            }
        }
        Ok(out)
    }

    /// Entrywise substitution along a ring homomorphism.
    pub fn base_change(&self, map: &RingMap) -> Result<PolyMatrix, Error> {
        if *self.ring != **map.source() {
            return Err(Error::RingMismatch);
        }
        let mut out = PolyMatrix::zero(map.target(), self.rows, self.cols);
        for (&(r, c), p) in &self.entries {
            out.set(r, c, p.substitute(map)?);
        }
        Ok(out)
    }

    /// Re-expresses all entries in `target`, mapping variables by name.
    pub fn project_to(&self, target: &Arc<Ring>) -> Result<PolyMatrix, Error> {
        let mut out = PolyMatrix::zero(target, self.rows, self.cols);
        for (&(r, c), p) in &self.entries {
            out.set(r, c, p.project_to(target)?);
        }
        Ok(out)
    }

    /// Substitutes one variable by a polynomial of the same ring, entrywise.
    pub fn subst_var(&self, idx: usize, value: &Poly) -> PolyMatrix {
        let mut out = PolyMatrix::zero(&self.ring, self.rows, self.cols);
        for (&(r, c), p) in &self.entries {
            out.set(r, c, p.subst_var(idx, value));
        }
        out
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, other: &PolyMatrix) -> Result<PolyMatrix, Error> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        let mut out =
            PolyMatrix::zero(&self.ring, self.rows + other.rows, self.cols + other.cols);
        for (&(r, c), p) in &self.entries {
            out.set(r, c, p.clone());
        }
        for (&(r, c), p) in &other.entries {
            out.set(self.rows + r, self.cols + c, p.clone());
        }
        Ok(out)
    }

    /// Assembles a matrix from a grid of blocks. Row i of the grid must share
    /// a common row count, column j a common column count.
    pub fn from_blocks(blocks: &[Vec<&PolyMatrix>]) -> Result<PolyMatrix, Error> {
        let ring = blocks
            .first()
            .and_then(|row| row.first())
            .map(|b| b.ring.clone())
            .ok_or_else(|| Error::DimensionMismatch("empty block grid".into()))?;
        let row_heights: Vec<usize> = blocks.iter().map(|row| row[0].rows).collect();
        let col_widths: Vec<usize> = blocks[0].iter().map(|b| b.cols).collect();
        for (i, row) in blocks.iter().enumerate() {
            if row.len() != col_widths.len() {
                return Err(Error::DimensionMismatch("ragged block grid".into()));
            }
            for (j, b) in row.iter().enumerate() {
                if b.rows != row_heights[i] || b.cols != col_widths[j] {
                    return Err(Error::DimensionMismatch(format!(
                        "block ({i},{j}) is {}x{}, expected {}x{}",
                        b.rows, b.cols, row_heights[i], col_widths[j]
                    )));
                }
                if b.ring != ring {
                    return Err(Error::RingMismatch);
                }
            }
        }
        let rows: usize = row_heights.iter().sum();
        let cols: usize = col_widths.iter().sum();
        let mut out = PolyMatrix::zero(&ring, rows, cols);
        let mut roff = 0;
        for (i, row) in blocks.iter().enumerate() {
            let mut coff = 0;
            for (j, b) in row.iter().enumerate() {
                for (&(r, c), p) in &b.entries {
                    out.set(roff + r, coff + c, p.clone());
                }
                coff += col_widths[j];
            }
            roff += row_heights[i];
        }
        Ok(out)
    }

    /// Submatrix on explicit row/column index lists (in the given order).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        let mut out = PolyMatrix::zero(&self.ring, rows.len(), cols.len());
        for (ri, &r) in rows.iter().enumerate() {
            for (ci, &c) in cols.iter().enumerate() {
                if let Some(p) = self.entries.get(&(r, c)) {
                    out.set(ri, ci, p.clone());
                }
            }
        }
        out
    }

    /// Conjugation-by-permutation-and-scale helper: returns the matrix of the
    /// same map after reindexing rows by `row_order` and columns by
    /// `col_order` and rescaling the new basis vectors: entry (i,j) becomes
    /// row_scale[i] · old[row_order[i]][col_order[j]] / col_scale[j].
    pub fn reindex_scaled(
        &self,
        row_order: &[usize],
        row_scale: &[Coeff],
        col_order: &[usize],
        col_scale: &[Coeff],
    ) -> PolyMatrix {
        let mut out = PolyMatrix::zero(&self.ring, row_order.len(), col_order.len());
        for (i, &r) in row_order.iter().enumerate() {
            for (j, &c) in col_order.iter().enumerate() {
                if let Some(p) = self.entries.get(&(r, c)) {
                    let factor = row_scale[i].clone() / col_scale[j].clone();
                    out.set(i, j, p.scale(&factor));
                }
            }
        }
        out
    }

    /// Checks that entry (i,j) is homogeneous of weight
    /// `src_weights[j] − tgt_weights[i] + delta` (zero entries are exempt).
    pub fn check_homogeneous(
        &self,
        src_weights: &[i64],
        tgt_weights: &[i64],
        delta: i64,
    ) -> Result<(), Error> {
        if src_weights.len() != self.cols || tgt_weights.len() != self.rows {
            return Err(Error::DimensionMismatch(
                "weight vector length mismatch".into(),
            ));
        }
        for (&(r, c), p) in &self.entries {
            let want = src_weights[c] - tgt_weights[r] + delta;
            if !p.is_homogeneous_of(want) {
                return Err(Error::Validation(format!(
                    "entry ({r},{c}) = {p} is not homogeneous of weight {want}"
                )));
            }
        }
        Ok(())
    }

    /// The matrix of the same map viewed over `map.source()` via a free
    /// monomial basis: `map` embeds its source ring T into this matrix's
    /// ring S, S free as a T-module on `basis`. Each image of `map` must be
    /// a single term. Row/column index (i, k) ↦ i·|basis| + k.
    pub fn restrict_scalars(
        &self,
        map: &RingMap,
        basis: &[Monomial],
    ) -> Result<PolyMatrix, Error> {
        if *self.ring != **map.target() {
            return Err(Error::RingMismatch);
        }
        let rewriter = Rewriter::new(map, basis)?;
        let nb = basis.len();
        let mut out = PolyMatrix::zero(map.source(), self.rows * nb, self.cols * nb);
        for (&(r, c), p) in &self.entries {
            for (k, b) in basis.iter().enumerate() {
                // p · b decomposed over the basis with T-coefficients.
                let shifted = p.mul(&Poly::from_terms(&self.ring, [(b.clone(), Coeff::one())]));
                let decomp = rewriter.decompose(&shifted)?;
                for (l, q) in decomp.into_iter().enumerate() {
                    if q.is_zero() {
                        continue;
                    }
                    let s = out.get(r * nb + l, c * nb + k).add(&q);
                    out.set(r * nb + l, c * nb + k, s);
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for PolyMatrix {
    /// Matrix text format: `rows cols` header then `r c : polynomial` lines.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for (&(r, c), p) in &self.entries {
            writeln!(f, "{r} {c} : {p}")?;
        }
        Ok(())
    }
}

/// Rewrites ring elements over a free monomial basis of a monomial ring
/// extension T → S: every monomial of S must factor uniquely as
/// φ(monomial of T) · basis element.
pub struct Rewriter<'a> {
    map: &'a RingMap,
    basis: &'a [Monomial],
    /// (coefficient, monomial) of each source variable's image.
    images: Vec<(Coeff, Monomial)>,
}

impl<'a> Rewriter<'a> {
    pub fn new(map: &'a RingMap, basis: &'a [Monomial]) -> Result<Rewriter<'a>, Error> {
        let mut images = Vec::with_capacity(map.images().len());
        for img in map.images() {
            match img.as_single_term() {
                Some((c, m)) if !c.is_zero() => images.push((c, m)),
                _ => {
                    return Err(Error::NotFiniteOverTarget(
                        "restriction of scalars requires a monomial ring map".into(),
                    ))
                }
            }
        }
        for b in basis {
            if b.0.len() != map.target().arity() {
                return Err(Error::NotFiniteOverTarget(
                    "basis monomial arity mismatch".into(),
                ));
            }
        }
        Ok(Rewriter { map, basis, images })
    }

    /// Writes `p = Σ_k out[k] · φ(basis[k])`... more precisely finds
    /// T-polynomials out[k] with p = Σ_k φ(out[k]) · basis[k].
    pub fn decompose(&self, p: &Poly) -> Result<Vec<Poly>, Error> {
        let mut out = vec![Poly::zero(self.map.source()); self.basis.len()];
        for (m, c) in p.terms() {
            let (k, tau, img_coeff) = self.factor_monomial(m)?;
            let t_term = Poly::from_terms(
                self.map.source(),
                [(tau, c.clone() / img_coeff)],
            );
            out[k] = out[k].add(&t_term);
        }
        Ok(out)
    }

    /// Factors a target monomial as basis[k] · Π images[i]^{e_i}; the
    /// decomposition must exist and be unique across basis choices.
    fn factor_monomial(&self, m: &Monomial) -> Result<(usize, Monomial, Coeff), Error> {
        let mut found: Option<(usize, Monomial, Coeff)> = None;
        for (k, b) in self.basis.iter().enumerate() {
            if let Some(rest) = m.div(b) {
                if let Some((tau, coeff)) = self.factor_over_images(&rest) {
                    if found.is_some() {
                        return Err(Error::NotFiniteOverTarget(
                            "monomial admits two decompositions over the basis".into(),
                        ));
                    }
                    found = Some((k, tau, coeff));
                }
            }
        }
        found.ok_or_else(|| {
            Error::NotFiniteOverTarget("monomial not spanned by the declared basis".into())
        })
    }

    /// Greedy factorization of a monomial as a product of variable images.
    fn factor_over_images(&self, m: &Monomial) -> Option<(Monomial, Coeff)> {
        fn go(
            images: &[(Coeff, Monomial)],
            m: &Monomial,
            from: usize,
            exps: &mut Vec<u32>,
        ) -> Option<(Vec<u32>, Coeff)> {
            if m.is_one() {
                return Some((exps.clone(), Coeff::one()));
            }
            for i in from..images.len() {
                let (c, im) = &images[i];
                if im.is_one() {
                    continue;
                }
                if let Some(rest) = m.div(im) {
                    exps[i] += 1;
                    if let Some((e, acc)) = go(images, &rest, i, exps) {
                        return Some((e, acc * c.clone()));
                    }
                    exps[i] -= 1;
                }
            }
            None
        }
        let mut exps = vec![0u32; self.images.len()];
        let (e, coeff) = go(&self.images, m, 0, &mut exps)?;
        Some((Monomial(e), coeff))
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

    #[test]
    fn compose_examples() {
        let r = qring(&["x", "y"]);
        let a = PolyMatrix::from_entries(&r, 1, 1, [(0, 0, p(&r, "x"))]).unwrap();
        let b = PolyMatrix::from_entries(&r, 1, 1, [(0, 0, p(&r, "y"))]).unwrap();
        assert_eq!(a.compose(&b).unwrap().get(0, 0), p(&r, "x*y"));

        let d = PolyMatrix::from_entries(
            &r,
            2,
            2,
            [(0, 0, p(&r, "x")), (0, 1, p(&r, "y^2")), (1, 0, p(&r, "1"))],
        )
        .unwrap();
        let id = PolyMatrix::identity(&r, 2);
        assert_eq!(id.compose(&d).unwrap(), d);
        assert_eq!(d.compose(&id).unwrap(), d);
    }

    #[test]
    fn base_change_multiplicative() {
        let r = qring(&["t", "y"]);
        let s = qring(&["x", "y"]);
        let m = RingMap::new(r.clone(), s.clone(), vec![p(&s, "x"), p(&s, "y")]).unwrap();
        let a = PolyMatrix::from_entries(
            &r,
            2,
            2,
            [(0, 0, p(&r, "t")), (0, 1, p(&r, "y")), (1, 1, p(&r, "t*y"))],
        )
        .unwrap();
        let b = PolyMatrix::from_entries(
            &r,
            2,
            2,
            [(0, 0, p(&r, "y")), (1, 0, p(&r, "t^2")), (1, 1, p(&r, "2"))],
        )
        .unwrap();
        let lhs = a.compose(&b).unwrap().base_change(&m).unwrap();
        let rhs = a
            .base_change(&m)
            .unwrap()
            .compose(&b.base_change(&m).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn restrict_scalars_sqrt_example() {
        // k[x] over k[u], u ↦ x², basis {1, x}: multiplication by x.
        let s = qring(&["x"]);
        let t = qring(&["u"]);
        let phi = RingMap::new(t.clone(), s.clone(), vec![p(&s, "x^2")]).unwrap();
        let basis = vec![Monomial::one(1), Monomial::var(1, 0)];
        let mul_x = PolyMatrix::from_entries(&s, 1, 1, [(0, 0, p(&s, "x"))]).unwrap();
        let down = mul_x.restrict_scalars(&phi, &basis).unwrap();
        let expected = PolyMatrix::from_entries(
            &t,
            2,
            2,
            [(0, 1, p(&t, "u")), (1, 0, p(&t, "1"))],
        )
        .unwrap();
        assert_eq!(down, expected);

        // multiplication by u pulled back is the block scalar diag(u, u).
        let mul_u = PolyMatrix::from_entries(&s, 1, 1, [(0, 0, p(&s, "x^2"))]).unwrap();
        let down_u = mul_u.restrict_scalars(&phi, &basis).unwrap();
        assert_eq!(down_u, PolyMatrix::scalar(&t, 2, &p(&t, "u")));
    }

    #[test]
    fn restrict_scalars_is_multiplicative() {
        let s = qring(&["x"]);
        let t = qring(&["u"]);
        let phi = RingMap::new(t.clone(), s.clone(), vec![p(&s, "x^2")]).unwrap();
        let basis = vec![Monomial::one(1), Monomial::var(1, 0)];
        let a = PolyMatrix::from_entries(&s, 1, 1, [(0, 0, p(&s, "x^3 + x"))]).unwrap();
        let b = PolyMatrix::from_entries(&s, 1, 1, [(0, 0, p(&s, "x^2 - 1"))]).unwrap();
        let lhs = a
            .restrict_scalars(&phi, &basis)
            .unwrap()
            .compose(&b.restrict_scalars(&phi, &basis).unwrap())
            .unwrap();
        let rhs = a
            .compose(&b)
            .unwrap()
            .restrict_scalars(&phi, &basis)
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn restrict_scalars_renaming_iso() {
        let s = qring(&["x"]);
        let t = qring(&["z"]);
        let phi = RingMap::new(t.clone(), s.clone(), vec![p(&s, "x")]).unwrap();
        let basis = vec![Monomial::one(1)];
        let a = PolyMatrix::from_entries(&s, 1, 2, [(0, 0, p(&s, "x^2 - 3")), (0, 1, p(&s, "x"))])
            .unwrap();
        let down = a.restrict_scalars(&phi, &basis).unwrap();
        let expected =
            PolyMatrix::from_entries(&t, 1, 2, [(0, 0, p(&t, "z^2 - 3")), (0, 1, p(&t, "z"))])
                .unwrap();
        assert_eq!(down, expected);
    }

    #[test]
    fn basis_failure_reported() {
        let s = qring(&["x"]);
        let t = qring(&["u"]);
        let phi = RingMap::new(t.clone(), s.clone(), vec![p(&s, "x^2")]).unwrap();
        // Basis {1} does not span k[x] over k[x²].
        let basis = vec![Monomial::one(1)];
        let a = PolyMatrix::from_entries(&s, 1, 1, [(0, 0, p(&s, "x"))]).unwrap();
        assert!(matches!(
            a.restrict_scalars(&phi, &basis),
            Err(Error::NotFiniteOverTarget(_))
        ));
    }

    #[test]
    fn homogeneity_check() {
        let r = Ring::graded(vec!["x".into(), "y".into()], vec![1, 1]).unwrap();
        let d = PolyMatrix::from_entries(&r, 1, 1, [(0, 0, p(&r, "x"))]).unwrap();
        // deg(x) = src − tgt + delta with weights 0,0 and delta 1.
        d.check_homogeneous(&[0], &[0], 1).unwrap();
        assert!(d.check_homogeneous(&[0], &[0], 0).is_err());
    }
}
