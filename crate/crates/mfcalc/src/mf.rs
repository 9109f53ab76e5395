//! ℤ/2-graded matrix factorizations and their functor calculus: validation,
//! shift, cone, totalization, tensor product, pullback, finite pushforward,
//! Hom-complex differential, and the bar embedding of plain free modules.

use std::fmt;
use std::sync::Arc;

use crate::error::Error;
use crate::matrix::PolyMatrix;
use crate::ring::{Coeff, Monomial, Poly, Ring, RingMap, WeightDegree};

/// A matrix factorization of `potential`: two free modules M⁻¹, M⁰ with
/// d₋₁ : M⁻¹ → M⁰ and d₀ : M⁰ → M⁻¹ whose both composites are potential·id.
///
/// When the ring is graded the optional basis-weight vectors make both
/// differentials homogeneous of weight 1 and the potential of weight 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFactorization {
    ring: Arc<Ring>,
    potential: Poly,
    d_minus1: PolyMatrix,
    d_zero: PolyMatrix,
    weights_minus1: Option<Vec<i64>>,
    weights_zero: Option<Vec<i64>>,
}

pub const DIFFERENTIAL_WEIGHT: i64 = 1;
pub const POTENTIAL_WEIGHT: i64 = 2;

impl MatrixFactorization {
    pub fn new(
        ring: Arc<Ring>,
        potential: Poly,
        d_minus1: PolyMatrix,
        d_zero: PolyMatrix,
    ) -> Result<MatrixFactorization, Error> {
        Self::new_graded(ring, potential, d_minus1, d_zero, None, None)
    }

    pub fn new_graded(
        ring: Arc<Ring>,
        potential: Poly,
        d_minus1: PolyMatrix,
        d_zero: PolyMatrix,
        weights_minus1: Option<Vec<i64>>,
        weights_zero: Option<Vec<i64>>,
    ) -> Result<MatrixFactorization, Error> {
        let mf = MatrixFactorization {
            ring,
            potential,
            d_minus1,
            d_zero,
            weights_minus1,
            weights_zero,
        };
        mf.validate()?;
        Ok(mf)
    }

    /// The zero factorization (ranks (0,0)); valid for any potential.
    pub fn zero_object(ring: &Arc<Ring>, potential: Poly) -> MatrixFactorization {
        MatrixFactorization {
            ring: ring.clone(),
            potential,
            d_minus1: PolyMatrix::zero(ring, 0, 0),
            d_zero: PolyMatrix::zero(ring, 0, 0),
            weights_minus1: ring.is_graded().then(Vec::new),
            weights_zero: ring.is_graded().then(Vec::new),
        }
    }

    /// The rank-(1,1) Koszul pair K(a; b) with d₋₁ = [a], d₀ = [b].
    pub fn koszul_pair(a: &Poly, b: &Poly) -> Result<MatrixFactorization, Error> {
        let ring = a.ring().clone();
        let potential = a.try_mul(b)?;
        let d_minus1 = PolyMatrix::from_entries(&ring, 1, 1, [(0, 0, a.clone())])?;
        let d_zero = PolyMatrix::from_entries(&ring, 1, 1, [(0, 0, b.clone())])?;
        // From deg(entry) = src − tgt + 1: with the M⁻¹ basis at weight 0,
        // the M⁰ basis sits at 1 − deg(a) (equivalently deg(b) − 1).
        let (w_m1, w_0) = if ring.is_graded() {
            match a.weight_degree()? {
                WeightDegree::Homogeneous(da) if b.is_homogeneous_of(2 - da) => {
                    (Some(vec![0]), Some(vec![1 - da]))
                }
                WeightDegree::Zero => match b.weight_degree()? {
                    WeightDegree::Homogeneous(db) => (Some(vec![0]), Some(vec![db - 1])),
                    WeightDegree::Zero => (Some(vec![0]), Some(vec![0])),
                    WeightDegree::Inhomogeneous => (None, None),
                },
                _ => (None, None),
            }
        } else {
            (None, None)
        };
        MatrixFactorization::new_graded(ring, potential, d_minus1, d_zero, w_m1, w_0)
    }

    /// The bar object (0, O^rank, 0, 0) with potential 0; tensoring with
    /// bar(1) is the identity.
    pub fn bar(ring: &Arc<Ring>, rank: usize) -> MatrixFactorization {
        MatrixFactorization {
            ring: ring.clone(),
            potential: Poly::zero(ring),
            d_minus1: PolyMatrix::zero(ring, rank, 0),
            d_zero: PolyMatrix::zero(ring, 0, rank),
            weights_minus1: ring.is_graded().then(Vec::new),
            weights_zero: ring.is_graded().then(|| vec![0; rank]),
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn potential(&self) -> &Poly {
        &self.potential
    }

    pub fn d_minus1(&self) -> &PolyMatrix {
        &self.d_minus1
    }

    pub fn d_zero(&self) -> &PolyMatrix {
        &self.d_zero
    }

    pub fn rank_minus1(&self) -> usize {
        self.d_minus1.cols()
    }

    pub fn rank_zero(&self) -> usize {
        self.d_zero.cols()
    }

    pub fn weights_minus1(&self) -> Option<&[i64]> {
        self.weights_minus1.as_deref()
    }

    pub fn weights_zero(&self) -> Option<&[i64]> {
        self.weights_zero.as_deref()
    }

    pub fn is_graded(&self) -> bool {
        self.weights_minus1.is_some() && self.weights_zero.is_some()
    }

    pub fn is_zero_object(&self) -> bool {
        self.rank_minus1() == 0 && self.rank_zero() == 0
    }

    /// Drops basis-weight data.
    pub fn forget_weights(mut self) -> MatrixFactorization {
        self.weights_minus1 = None;
        self.weights_zero = None;
        self
    }

    /// Checks both composites equal potential·id (and the grading
    /// constraints when weight data is present). Reports the first failing
    /// entry.
    pub fn validate(&self) -> Result<(), Error> {
        if *self.potential.ring() != self.ring
            || *self.d_minus1.ring() != self.ring
            || *self.d_zero.ring() != self.ring
        {
            return Err(Error::RingMismatch);
        }
        let (rm1, r0) = (self.rank_minus1(), self.rank_zero());
        if self.d_minus1.rows() != r0 || self.d_zero.rows() != rm1 {
            return Err(Error::DimensionMismatch(format!(
                "d-1 is {}x{}, d0 is {}x{}",
                self.d_minus1.rows(),
                self.d_minus1.cols(),
                self.d_zero.rows(),
                self.d_zero.cols()
            )));
        }
        // Over a domain a nonzero potential forces equal ranks.
        if !self.potential.is_zero() && rm1 != r0 {
            return Err(Error::Validation(format!(
                "nonzero potential with unequal ranks ({rm1}, {r0})"
            )));
        }
        let comp0 = self.d_zero.compose(&self.d_minus1)?; // M⁻¹ → M⁻¹
        let comp1 = self.d_minus1.compose(&self.d_zero)?; // M⁰ → M⁰
        for (n, comp) in [(rm1, &comp0), (r0, &comp1)] {
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j {
                        self.potential.clone()
                    } else {
                        Poly::zero(&self.ring)
                    };
                    let got = comp.get(i, j);
                    if got != want {
                        return Err(Error::Validation(format!(
                            "composite entry ({i},{j}) = {got}, expected {want}"
                        )));
                    }
                }
            }
        }
        if let (Some(wm1), Some(w0)) = (&self.weights_minus1, &self.weights_zero) {
            if !self.ring.is_graded() {
                return Err(Error::UngradedRing);
            }
            if wm1.len() != rm1 || w0.len() != r0 {
                return Err(Error::DimensionMismatch(
                    "basis weight vector length mismatch".into(),
                ));
            }
            if !self.potential.is_homogeneous_of(POTENTIAL_WEIGHT) {
                return Err(Error::Validation(format!(
                    "potential {} is not homogeneous of weight {POTENTIAL_WEIGHT}",
                    self.potential
                )));
            }
            self.d_minus1
                .check_homogeneous(wm1, w0, DIFFERENTIAL_WEIGHT)?;
            self.d_zero.check_homogeneous(w0, wm1, DIFFERENTIAL_WEIGHT)?;
        }
        Ok(())
    }

    /// Swaps the two terms and negates both differentials.
    pub fn shift(&self) -> MatrixFactorization {
        MatrixFactorization {
            ring: self.ring.clone(),
            potential: self.potential.clone(),
            d_minus1: self.d_zero.neg(),
            d_zero: self.d_minus1.neg(),
            weights_minus1: self.weights_zero.clone(),
            weights_zero: self.weights_minus1.clone(),
        }
    }

    /// Direct sum, first summand's basis first.
    pub fn direct_sum(&self, other: &MatrixFactorization) -> Result<MatrixFactorization, Error> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        if self.potential != other.potential {
            return Err(Error::PotentialMismatch(format!(
                "{} vs {}",
                self.potential, other.potential
            )));
        }
        let combine = |a: Option<&Vec<i64>>, b: Option<&Vec<i64>>| match (a, b) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
            _ => None,
        };
        Ok(MatrixFactorization {
            ring: self.ring.clone(),
            potential: self.potential.clone(),
            d_minus1: self.d_minus1.direct_sum(&other.d_minus1)?,
            d_zero: self.d_zero.direct_sum(&other.d_zero)?,
            weights_minus1: combine(self.weights_minus1.as_ref(), other.weights_minus1.as_ref()),
            weights_zero: combine(self.weights_zero.as_ref(), other.weights_zero.as_ref()),
        })
    }

    /// Tensor product over the common ring; potentials add.
    ///
    /// Basis order: T⁻¹ = M⁻¹⊗N⁰ ⊕ M⁰⊗N⁻¹, T⁰ = M⁻¹⊗N⁻¹ ⊕ M⁰⊗N⁰,
    /// Kronecker pairs row-major, with the sign on the second factor:
    /// d(m⊗n) = d(m)⊗n + (−1)^|m| m⊗d(n).
    pub fn tensor(&self, other: &MatrixFactorization) -> Result<MatrixFactorization, Error> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        let (m, n) = (self, other);
        let id_m_m1 = PolyMatrix::identity(&self.ring, m.rank_minus1());
        let id_m_0 = PolyMatrix::identity(&self.ring, m.rank_zero());
        let id_n_m1 = PolyMatrix::identity(&self.ring, n.rank_minus1());
        let id_n_0 = PolyMatrix::identity(&self.ring, n.rank_zero());

        // d_T,-1 : (M⁻¹N⁰, M⁰N⁻¹) → (M⁻¹N⁻¹, M⁰N⁰)
        let a = PolyMatrix::from_blocks(&[
            vec![
                &id_m_m1.kronecker(&n.d_zero)?.neg(),
                &m.d_zero.kronecker(&id_n_m1)?,
            ],
            vec![
                &m.d_minus1.kronecker(&id_n_0)?,
                &id_m_0.kronecker(&n.d_minus1)?,
            ],
        ])?;
        // d_T,0 : (M⁻¹N⁻¹, M⁰N⁰) → (M⁻¹N⁰, M⁰N⁻¹)
        let b = PolyMatrix::from_blocks(&[
            vec![
                &id_m_m1.kronecker(&n.d_minus1)?.neg(),
                &m.d_zero.kronecker(&id_n_0)?,
            ],
            vec![
                &m.d_minus1.kronecker(&id_n_m1)?,
                &id_m_0.kronecker(&n.d_zero)?,
            ],
        ])?;
        let potential = self.potential.try_add(&other.potential)?;
        let weights = |a: Option<&[i64]>, b: Option<&[i64]>| -> Option<Vec<i64>> {
            match (a, b) {
                (Some(a), Some(b)) => {
                    let mut out = Vec::with_capacity(a.len() * b.len());
                    for wa in a {
                        for wb in b {
                            out.push(wa + wb);
                        }
                    }
                    Some(out)
                }
                _ => None,
            }
        };
        let w_m1 = match (
            weights(m.weights_minus1(), n.weights_zero()),
            weights(m.weights_zero(), n.weights_minus1()),
        ) {
            (Some(mut x), Some(y)) => {
                x.extend(y);
                Some(x)
            }
            _ => None,
        };
        let w_0 = match (
            weights(m.weights_minus1(), n.weights_minus1()),
            weights(m.weights_zero(), n.weights_zero()),
        ) {
            (Some(mut x), Some(y)) => {
                x.extend(y);
                Some(x)
            }
            _ => None,
        };
        MatrixFactorization::new_graded(self.ring.clone(), potential, a, b, w_m1, w_0)
    }

    /// Entrywise base change; the potential is substituted.
    pub fn pullback(&self, map: &RingMap) -> Result<MatrixFactorization, Error> {
        let potential = self.potential.substitute(map)?;
        let d_minus1 = self.d_minus1.base_change(map)?;
        let d_zero = self.d_zero.base_change(map)?;
        let keep_weights = map.target().is_graded() && map.is_graded();
        MatrixFactorization::new_graded(
            map.target().clone(),
            potential,
            d_minus1,
            d_zero,
            if keep_weights {
                self.weights_minus1.clone()
            } else {
                None
            },
            if keep_weights {
                self.weights_zero.clone()
            } else {
                None
            },
        )
    }

    /// Finite pushforward along a free monomial ring extension
    /// `map : T → S` with the given monomial basis; `target_potential` must
    /// pull back to this factorization's potential.
    pub fn pushforward_finite(
        &self,
        map: &RingMap,
        basis: &[Monomial],
        target_potential: &Poly,
    ) -> Result<MatrixFactorization, Error> {
        if target_potential.substitute(map)? != self.potential {
            return Err(Error::PotentialMismatch(
                "target potential does not pull back to the source potential".into(),
            ));
        }
        let d_minus1 = self.d_minus1.restrict_scalars(map, basis)?;
        let d_zero = self.d_zero.restrict_scalars(map, basis)?;
        let weights = |w: Option<&[i64]>| -> Option<Vec<i64>> {
            let w = w?;
            let ring = self.ring.as_ref();
            ring.weights()?;
            let mut out = Vec::with_capacity(w.len() * basis.len());
            for wi in w {
                for b in basis {
                    out.push(wi + b.weight(ring));
                }
            }
            Some(out)
        };
        let keep = map.source().is_graded() && map.is_graded();
        MatrixFactorization::new_graded(
            map.source().clone(),
            target_potential.clone(),
            d_minus1,
            d_zero,
            if keep {
                weights(self.weights_minus1())
            } else {
                None
            },
            if keep {
                weights(self.weights_zero())
            } else {
                None
            },
        )
    }

    /// Total object of a finite complex of factorizations. `maps[i]` is the
    /// closed even map from `objects[i]` to `objects[i+1]`; consecutive
    /// composites must vanish. `start_pos` is the complex position of the
    /// first object. The differential is the internal one plus
    /// (−1)^(MF-parity) times the connecting maps.
    pub fn tot(
        objects: &[MatrixFactorization],
        maps: &[MFMorphism],
        start_pos: i64,
    ) -> Result<MatrixFactorization, Error> {
        if objects.is_empty() {
            return Err(Error::DimensionMismatch("empty complex".into()));
        }
        if maps.len() + 1 != objects.len() {
            return Err(Error::DimensionMismatch(
                "need exactly one map per consecutive pair".into(),
            ));
        }
        let ring = objects[0].ring.clone();
        let potential = objects[0].potential.clone();
        for o in objects {
            if o.ring != ring {
                return Err(Error::RingMismatch);
            }
            if o.potential != potential {
                return Err(Error::PotentialMismatch("in Tot input".into()));
            }
        }
        for (i, g) in maps.iter().enumerate() {
            if g.parity != Parity::Even {
                return Err(Error::Validation("Tot maps must be even".into()));
            }
            if g.source != objects[i] || g.target != objects[i + 1] {
                return Err(Error::Validation(
                    "Tot map endpoints do not match the complex".into(),
                ));
            }
            if !g.hom_diff()?.is_zero() {
                return Err(Error::Validation(format!("Tot map {i} is not closed")));
            }
        }
        for i in 0..maps.len().saturating_sub(1) {
            if !maps[i + 1].compose(&maps[i])?.is_zero() {
                return Err(Error::Validation(format!(
                    "composite of Tot maps {i},{} is nonzero",
                    i + 1
                )));
            }
        }

        // Tot parity of M_i^p is (pos_i + p) mod 2. Blocks ordered by
        // complex position; within a position, the single relevant term.
        #[derive(Clone, Copy, PartialEq)]
        enum Part {
            Minus1,
            Zero,
        }
        let pos = |i: usize| start_pos + i as i64;
        // For each object: which part lands in Tot⁻¹ (odd total parity).
        let odd_part = |i: usize| -> Part {
            if pos(i).rem_euclid(2) == 0 {
                Part::Minus1
            } else {
                Part::Zero
            }
        };
        let rank_of = |o: &MatrixFactorization, p: Part| match p {
            Part::Minus1 => o.rank_minus1(),
            Part::Zero => o.rank_zero(),
        };
        let weights_of = |o: &MatrixFactorization, p: Part| match p {
            Part::Minus1 => o.weights_minus1.clone(),
            Part::Zero => o.weights_zero.clone(),
        };
        let n = objects.len();
        let odd_offsets: Vec<usize> = {
            let mut off = vec![0];
            for i in 0..n {
                off.push(off[i] + rank_of(&objects[i], odd_part(i)));
            }
            off
        };
        let even_offsets: Vec<usize> = {
            let mut off = vec![0];
            for i in 0..n {
                let p = if odd_part(i) == Part::Minus1 {
                    Part::Zero
                } else {
                    Part::Minus1
                };
                off.push(off[i] + rank_of(&objects[i], p));
            }
            off
        };
        let total_odd = *odd_offsets.last().unwrap();
        let total_even = *even_offsets.last().unwrap();
        let mut d_minus1 = PolyMatrix::zero(&ring, total_even, total_odd);
        let mut d_zero = PolyMatrix::zero(&ring, total_odd, total_even);

        let insert =
            |dst: &mut PolyMatrix, roff: usize, coff: usize, block: &PolyMatrix, negate: bool| {
                for (&(r, c), p) in block.entries() {
                    let val = if negate { p.neg() } else { p.clone() };
                    let prev = dst.get(roff + r, coff + c).add(&val);
                    dst.set(roff + r, coff + c, prev);
                }
            };

        for i in 0..n {
            let o = &objects[i];
            match odd_part(i) {
                Part::Minus1 => {
                    // M_i⁻¹ ⊂ Tot⁻¹ (at odd_offsets[i]),
                    // M_i⁰ ⊂ Tot⁰ (at even_offsets[i]).
                    insert(&mut d_minus1, even_offsets[i], odd_offsets[i], &o.d_minus1, false);
                    insert(&mut d_zero, odd_offsets[i], even_offsets[i], &o.d_zero, false);
                    if i + 1 < n {
                        let g = &maps[i];
                        // g on M_i⁻¹ (odd: sign −); object i+1 has odd part Zero,
                        // so g_{-1}: M_i⁻¹ → M_{i+1}⁻¹ lands in Tot⁰.
                        insert(&mut d_minus1, even_offsets[i + 1], odd_offsets[i], &g.f_minus1, true);
                        // g on M_i⁰ (even: sign +) lands in M_{i+1}⁰ ⊂ Tot⁻¹.
                        insert(&mut d_zero, odd_offsets[i + 1], even_offsets[i], &g.f_zero, false);
                    }
                }
                Part::Zero => {
                    insert(&mut d_minus1, even_offsets[i], odd_offsets[i], &o.d_zero, false);
                    insert(&mut d_zero, odd_offsets[i], even_offsets[i], &o.d_minus1, false);
                    if i + 1 < n {
                        let g = &maps[i];
                        insert(&mut d_minus1, even_offsets[i + 1], odd_offsets[i], &g.f_zero, true);
                        insert(&mut d_zero, odd_offsets[i + 1], even_offsets[i], &g.f_minus1, false);
                    }
                }
            }
        }

        // Basis weights: position i contributes +pos(i).
        let mut w_odd: Option<Vec<i64>> = Some(Vec::new());
        let mut w_even: Option<Vec<i64>> = Some(Vec::new());
        for i in 0..n {
            let o = &objects[i];
            let (odd_w, even_w) = match odd_part(i) {
                Part::Minus1 => (weights_of(o, Part::Minus1), weights_of(o, Part::Zero)),
                Part::Zero => (weights_of(o, Part::Zero), weights_of(o, Part::Minus1)),
            };
            match (&mut w_odd, odd_w) {
                (Some(acc), Some(w)) => acc.extend(w.iter().map(|x| x + pos(i))),
                _ => w_odd = None,
            }
            match (&mut w_even, even_w) {
                (Some(acc), Some(w)) => acc.extend(w.iter().map(|x| x + pos(i))),
                _ => w_even = None,
            }
        }

        MatrixFactorization::new_graded(ring, potential, d_minus1, d_zero, w_odd, w_even)
    }

    /// Cone of a closed even morphism, as Tot of the two-term complex with
    /// the source in position −1.
    pub fn cone(f: &MFMorphism) -> Result<MatrixFactorization, Error> {
        if f.parity != Parity::Even {
            return Err(Error::Validation("cone requires an even morphism".into()));
        }
        if !f.hom_diff()?.is_zero() {
            return Err(Error::Validation("cone requires a closed morphism".into()));
        }
        MatrixFactorization::tot(
            &[f.source.clone(), f.target.clone()],
            std::slice::from_ref(f),
            -1,
        )
    }
}

impl fmt::Display for MatrixFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mf")?;
        writeln!(f, "ring {}", self.ring.decl_string())?;
        writeln!(f, "potential {}", self.potential)?;
        writeln!(f, "dminus1")?;
        write!(f, "{}", self.d_minus1)?;
        writeln!(f, "dzero")?;
        write!(f, "{}", self.d_zero)?;
        if let (Some(wm1), Some(w0)) = (&self.weights_minus1, &self.weights_zero) {
            writeln!(
                f,
                "weightsminus1 {}",
                wm1.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ")
            )?;
            writeln!(
                f,
                "weightszero {}",
                w0.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ")
            )?;
        }
        writeln!(f, "end")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// A homogeneous element of the Hom complex between two factorizations.
/// `f_minus1` is the component out of M⁻¹ and `f_zero` out of M⁰; an even
/// morphism preserves parities, an odd one crosses them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MFMorphism {
    pub source: MatrixFactorization,
    pub target: MatrixFactorization,
    pub parity: Parity,
    pub f_minus1: PolyMatrix,
    pub f_zero: PolyMatrix,
}

impl MFMorphism {
    pub fn new(
        source: MatrixFactorization,
        target: MatrixFactorization,
        parity: Parity,
        f_minus1: PolyMatrix,
        f_zero: PolyMatrix,
    ) -> Result<MFMorphism, Error> {
        if source.ring() != target.ring() {
            return Err(Error::RingMismatch);
        }
        let (want_m1_rows, want_0_rows) = match parity {
            Parity::Even => (target.rank_minus1(), target.rank_zero()),
            Parity::Odd => (target.rank_zero(), target.rank_minus1()),
        };
        if f_minus1.rows() != want_m1_rows
            || f_minus1.cols() != source.rank_minus1()
            || f_zero.rows() != want_0_rows
            || f_zero.cols() != source.rank_zero()
        {
            return Err(Error::DimensionMismatch(
                "morphism component shapes do not match parity".into(),
            ));
        }
        Ok(MFMorphism {
            source,
            target,
            parity,
            f_minus1,
            f_zero,
        })
    }

    pub fn identity(m: &MatrixFactorization) -> MFMorphism {
        MFMorphism {
            source: m.clone(),
            target: m.clone(),
            parity: Parity::Even,
            f_minus1: PolyMatrix::identity(m.ring(), m.rank_minus1()),
            f_zero: PolyMatrix::identity(m.ring(), m.rank_zero()),
        }
    }

    pub fn zero(
        source: &MatrixFactorization,
        target: &MatrixFactorization,
        parity: Parity,
    ) -> MFMorphism {
        let (m1_rows, z_rows) = match parity {
            Parity::Even => (target.rank_minus1(), target.rank_zero()),
            Parity::Odd => (target.rank_zero(), target.rank_minus1()),
        };
        MFMorphism {
            source: source.clone(),
            target: target.clone(),
            parity,
            f_minus1: PolyMatrix::zero(source.ring(), m1_rows, source.rank_minus1()),
            f_zero: PolyMatrix::zero(source.ring(), z_rows, source.rank_zero()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.f_minus1.is_zero() && self.f_zero.is_zero()
    }

    pub fn neg(&self) -> MFMorphism {
        MFMorphism {
            f_minus1: self.f_minus1.neg(),
            f_zero: self.f_zero.neg(),
            ..self.clone()
        }
    }

    pub fn scale(&self, c: &Coeff) -> MFMorphism {
        MFMorphism {
            f_minus1: self.f_minus1.scale(c),
            f_zero: self.f_zero.scale(c),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &MFMorphism) -> Result<MFMorphism, Error> {
        if self.parity != other.parity || self.source != other.source || self.target != other.target
        {
            return Err(Error::Validation(
                "morphism addition requires equal parity and endpoints".into(),
            ));
        }
        Ok(MFMorphism {
            f_minus1: self.f_minus1.add(&other.f_minus1)?,
            f_zero: self.f_zero.add(&other.f_zero)?,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &MFMorphism) -> Result<MFMorphism, Error> {
        self.add(&other.neg())
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &MFMorphism) -> Result<MFMorphism, Error> {
        if other.target != self.source {
            return Err(Error::Validation(
                "composition endpoints do not match".into(),
            ));
        }
        let parity = if self.parity == other.parity {
            Parity::Even
        } else {
            Parity::Odd
        };
        // other.f_minus1 lands in self's (M⁻¹ or M⁰) depending on other's parity.
        let (g_from_m1, g_from_0) = (&self.f_minus1, &self.f_zero);
        let (f_minus1, f_zero) = match other.parity {
            Parity::Even => (
                g_from_m1.compose(&other.f_minus1)?,
                g_from_0.compose(&other.f_zero)?,
            ),
            Parity::Odd => (
                g_from_0.compose(&other.f_minus1)?,
                g_from_m1.compose(&other.f_zero)?,
            ),
        };
        Ok(MFMorphism {
            source: other.source.clone(),
            target: self.target.clone(),
            parity,
            f_minus1,
            f_zero,
        })
    }

    /// The Hom-complex differential d(f) = d_N ∘ f − (−1)^{|f|} f ∘ d_M.
    pub fn hom_diff(&self) -> Result<MFMorphism, Error> {
        let m = &self.source;
        let n = &self.target;
        match self.parity {
            Parity::Even => {
                let f_minus1 = n
                    .d_minus1()
                    .compose(&self.f_minus1)?
                    .sub(&self.f_zero.compose(m.d_minus1())?)?;
                let f_zero = n
                    .d_zero()
                    .compose(&self.f_zero)?
                    .sub(&self.f_minus1.compose(m.d_zero())?)?;
                MFMorphism::new(m.clone(), n.clone(), Parity::Odd, f_minus1, f_zero)
            }
            Parity::Odd => {
                let f_minus1 = n
                    .d_zero()
                    .compose(&self.f_minus1)?
                    .add(&self.f_zero.compose(m.d_minus1())?)?;
                let f_zero = n
                    .d_minus1()
                    .compose(&self.f_zero)?
                    .add(&self.f_minus1.compose(m.d_zero())?)?;
                MFMorphism::new(m.clone(), n.clone(), Parity::Even, f_minus1, f_zero)
            }
        }
    }

    pub fn is_closed(&self) -> Result<bool, Error> {
        Ok(self.hom_diff()?.is_zero())
    }

    /// Checks homogeneity of the components at the given morphism degree
    /// (0 for chain maps, −1 for homotopies). Trivially true when either
    /// endpoint lacks weight data.
    pub fn check_homogeneous(&self, delta: i64) -> Result<(), Error> {
        let (m, n) = (&self.source, &self.target);
        let (Some(src_m1), Some(src_0)) = (m.weights_minus1(), m.weights_zero()) else {
            return Ok(());
        };
        let (Some(tgt_m1), Some(tgt_0)) = (n.weights_minus1(), n.weights_zero()) else {
            return Ok(());
        };
        match self.parity {
            Parity::Even => {
                self.f_minus1.check_homogeneous(src_m1, tgt_m1, delta)?;
                self.f_zero.check_homogeneous(src_0, tgt_0, delta)?;
            }
            Parity::Odd => {
                self.f_minus1.check_homogeneous(src_m1, tgt_0, delta)?;
                self.f_zero.check_homogeneous(src_0, tgt_m1, delta)?;
            }
        }
        Ok(())
    }
}

/// The explicit symmetry isomorphism M⊗N → N⊗M, m⊗n ↦ (−1)^{|m||n|} n⊗m.
pub fn tensor_swap_iso(
    m: &MatrixFactorization,
    n: &MatrixFactorization,
) -> Result<MFMorphism, Error> {
    let mn = m.tensor(n)?;
    let nm = n.tensor(m)?;
    let ring = m.ring();
    let one = Poly::int(ring, 1);
    // T⁻¹(M⊗N): M⁻¹N⁰ (block 0), M⁰N⁻¹ (block 1);
    // T⁻¹(N⊗M): N⁻¹M⁰ (block 0), N⁰M⁻¹ (block 1).
    let mut f_minus1 = PolyMatrix::zero(ring, nm.rank_minus1(), mn.rank_minus1());
    let (mm1, m0, nm1, n0) = (
        m.rank_minus1(),
        m.rank_zero(),
        n.rank_minus1(),
        n.rank_zero(),
    );
    // M⁻¹N⁰ → N⁰M⁻¹: (i,j) at col i·n0 + j, row (n⁻¹M⁰-block size) + j·mm1 + i.
    for i in 0..mm1 {
        for j in 0..n0 {
            f_minus1.set(nm1 * m0 + j * mm1 + i, i * n0 + j, one.clone());
        }
    }
    // M⁰N⁻¹ → N⁻¹M⁰ (both even·odd: sign +).
    for i in 0..m0 {
        for j in 0..nm1 {
            f_minus1.set(j * m0 + i, mm1 * n0 + i * nm1 + j, one.clone());
        }
    }
    let mut f_zero = PolyMatrix::zero(ring, nm.rank_zero(), mn.rank_zero());
    // M⁻¹N⁻¹ → N⁻¹M⁻¹ with sign (−1)^{1·1} = −1.
    for i in 0..mm1 {
        for j in 0..nm1 {
            f_zero.set(j * mm1 + i, i * nm1 + j, one.neg());
        }
    }
    // M⁰N⁰ → N⁰M⁰, sign +.
    for i in 0..m0 {
        for j in 0..n0 {
            f_zero.set(nm1 * mm1 + j * m0 + i, mm1 * nm1 + i * n0 + j, one.clone());
        }
    }
    let iso = MFMorphism::new(mn, nm, Parity::Even, f_minus1, f_zero)?;
    if !iso.is_closed()? {
        return Err(Error::Validation("tensor swap iso is not closed".into()));
    }
    Ok(iso)
}

/// Finds the signed permutation identifying two factorizations whose
/// matrices agree up to a diagonal-±-permutation change of basis, given the
/// underlying index bijections (per parity). Signs are propagated through
/// the differentials and verified; the result is a strict isomorphism.
pub fn signed_permutation_iso(
    source: &MatrixFactorization,
    target: &MatrixFactorization,
    perm_minus1: &[usize],
    perm_zero: &[usize],
) -> Result<MFMorphism, Error> {
    let rm1 = source.rank_minus1();
    let r0 = source.rank_zero();
    if target.rank_minus1() != rm1 || target.rank_zero() != r0 {
        return Err(Error::DimensionMismatch("rank mismatch in signed perm".into()));
    }
    // Unknown signs s⁻[i], s⁰[j] with target[perm(i)][perm(j)]·s = source.
    // Propagate: fix first sign of each connected component to +1.
    let mut sign_m1: Vec<Option<i8>> = vec![None; rm1];
    let mut sign_0: Vec<Option<i8>> = vec![None; r0];
    // Constraint list: d⁻¹ entries relate (col ∈ M⁻¹, row ∈ M⁰).
    // t.d(perm_zero[r], perm_minus1[c]) * s0[r] ... sign relation:
    // s0[r] = ratio * s_m1[c] where ratio = src_entry / tgt_entry (must be ±1).
    #[derive(Clone, Copy)]
    struct Rel {
        m1: usize,
        z: usize,
        ratio: i8,
    }
    let mut rels: Vec<Rel> = Vec::new();
    let ratio_of = |a: &Poly, b: &Poly| -> Result<i8, Error> {
        if a == b {
            Ok(1)
        } else if a.neg() == *b {
            Ok(-1)
        } else {
            Err(Error::Validation(
                "entries differ by more than a sign".into(),
            ))
        }
    };
    for (&(r, c), p) in source.d_minus1().entries() {
        let q = target.d_minus1().get(perm_zero[r], perm_minus1[c]);
        rels.push(Rel {
            m1: c,
            z: r,
            ratio: ratio_of(p, &q)?,
        });
    }
    for (&(r, c), p) in source.d_zero().entries() {
        let q = target.d_zero().get(perm_minus1[r], perm_zero[c]);
        rels.push(Rel {
            m1: r,
            z: c,
            ratio: ratio_of(p, &q)?,
        });
    }
    // Iterative propagation.
    loop {
        let mut progressed = false;
        for rel in &rels {
            match (sign_m1[rel.m1], sign_0[rel.z]) {
                (Some(a), None) => {
                    sign_0[rel.z] = Some(a * rel.ratio);
                    progressed = true;
                }
                (None, Some(b)) => {
                    sign_m1[rel.m1] = Some(b * rel.ratio);
                    progressed = true;
                }
                (Some(a), Some(b)) => {
                    if a * rel.ratio != b {
                        return Err(Error::Validation(
                            "inconsistent sign system in permutation iso".into(),
                        ));
                    }
                }
                (None, None) => {}
            }
        }
        if !progressed {
            match sign_m1
                .iter()
                .position(|s| s.is_none())
                .map(|i| (true, i))
                .or_else(|| sign_0.iter().position(|s| s.is_none()).map(|i| (false, i)))
            {
                Some((true, i)) => sign_m1[i] = Some(1),
                Some((false, i)) => sign_0[i] = Some(1),
                None => break,
            }
        }
    }
    let ring = source.ring();
    let mut f_minus1 = PolyMatrix::zero(ring, rm1, rm1);
    for (i, s) in sign_m1.iter().enumerate() {
        f_minus1.set(perm_minus1[i], i, Poly::int(ring, s.unwrap() as i64));
    }
    let mut f_zero = PolyMatrix::zero(ring, r0, r0);
    for (j, s) in sign_0.iter().enumerate() {
        f_zero.set(perm_zero[j], j, Poly::int(ring, s.unwrap() as i64));
    }
    let iso = MFMorphism::new(
        source.clone(),
        target.clone(),
        Parity::Even,
        f_minus1,
        f_zero,
    )?;
    if !iso.is_closed()? {
        return Err(Error::Validation(
            "signed permutation is not a chain map".into(),
        ));
    }
    Ok(iso)
}

/// The reassociation isomorphism (A⊗B)⊗C → A⊗(B⊗C) as a signed permutation.
pub fn tensor_assoc_iso(
    a: &MatrixFactorization,
    b: &MatrixFactorization,
    c: &MatrixFactorization,
) -> Result<MFMorphism, Error> {
    let ab_c = a.tensor(b)?.tensor(c)?;
    let a_bc = a.tensor(&b.tensor(c)?)?;
    // Enumerate source basis as (pa, pb, pc, ia, ib, ic) triples, map to
    // target position; parities p ∈ {1 (M⁻¹), 0 (M⁰)}.
    let ranks = |m: &MatrixFactorization, p: u8| {
        if p == 1 {
            m.rank_minus1()
        } else {
            m.rank_zero()
        }
    };
    // Block orders in tensor(M, N): T⁻¹ = [(1,0), (0,1)], T⁰ = [(1,1), (0,0)].
    let block_order = |parity_total: u8| -> [(u8, u8); 2] {
        if parity_total == 1 {
            [(1, 0), (0, 1)]
        } else {
            [(1, 1), (0, 0)]
        }
    };
    // Position of (pm, im, pn, in) in tensor(M, N) of total parity.
    let pos_in_tensor = |m: &MatrixFactorization,
                         n: &MatrixFactorization,
                         pm: u8,
                         im: usize,
                         pn: u8,
                         in_: usize|
     -> usize {
        let total = (pm + pn) % 2;
        let mut off = 0;
        for (qm, qn) in block_order(total) {
            if qm == pm && qn == pn {
                return off + im * ranks(n, pn) + in_;
            }
            off += ranks(m, qm) * ranks(n, qn);
        }
        unreachable!("block not found")
    };
    let mut perm_minus1 = vec![0usize; ab_c.rank_minus1()];
    let mut perm_zero = vec![0usize; a_bc.rank_zero()];
    let bc = b.tensor(c)?;
    let ab = a.tensor(b)?;
    for pa in [1u8, 0] {
        for pb in [1u8, 0] {
            for pc in [1u8, 0] {
                let total = (pa + pb + pc) % 2;
                for ia in 0..ranks(a, pa) {
                    for ib in 0..ranks(b, pb) {
                        for ic in 0..ranks(c, pc) {
                            let pab = (pa + pb) % 2;
                            let i_ab = pos_in_tensor(a, b, pa, ia, pb, ib);
                            let src = pos_in_tensor(&ab, c, pab, i_ab, pc, ic);
                            let pbc = (pb + pc) % 2;
                            let i_bc = pos_in_tensor(b, c, pb, ib, pc, ic);
                            let dst = pos_in_tensor(a, &bc, pa, ia, pbc, i_bc);
                            if total == 1 {
                                perm_minus1[src] = dst;
                            } else {
                                perm_zero[src] = dst;
                            }
                        }
                    }
                }
            }
        }
    }
    signed_permutation_iso(&ab_c, &a_bc, &perm_minus1, &perm_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::coeff_int;

    fn qring(vars: &[&str]) -> Arc<Ring> {
        Ring::new(vars.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    fn p(ring: &Arc<Ring>, s: &str) -> Poly {
        Poly::parse(ring, s).unwrap()
    }

    fn kpair(ring: &Arc<Ring>, a: &str, b: &str) -> MatrixFactorization {
        MatrixFactorization::koszul_pair(&p(ring, a), &p(ring, b)).unwrap()
    }

    #[test]
    fn validate_examples() {
        let r = qring(&["x", "y"]);
        kpair(&r, "x", "y").validate().unwrap();
        // x·x ≠ x·y: rejected with the failing entry named.
        let d1 = PolyMatrix::from_entries(&r, 1, 1, [(0, 0, p(&r, "x"))]).unwrap();
        let err = MatrixFactorization::new(r.clone(), p(&r, "x*y"), d1.clone(), d1).unwrap_err();
        assert!(matches!(err, Error::Validation(ref m) if m.contains("(0,0)")));
    }

    #[test]
    fn shift_squares_to_identity() {
        let r = qring(&["x", "y"]);
        let m = kpair(&r, "x", "y");
        let s = m.shift();
        s.validate().unwrap();
        assert_eq!(s.d_minus1().get(0, 0), p(&r, "-y"));
        assert_eq!(m.shift().shift(), m);
        let z = MatrixFactorization::zero_object(&r, Poly::zero(&r));
        assert_eq!(z.shift(), z);
    }

    #[test]
    fn tensor_bar_is_identity() {
        let r = qring(&["x", "y"]);
        let m = kpair(&r, "x", "y");
        let bar1 = MatrixFactorization::bar(&r, 1);
        assert_eq!(m.tensor(&bar1).unwrap(), m.clone().forget_weights());
        // bar(0) kills everything.
        let bar0 = MatrixFactorization::bar(&r, 0);
        assert!(m.tensor(&bar0).unwrap().is_zero_object());
        // bar(2)⊗M = M ⊕ M literally.
        let bar2 = MatrixFactorization::bar(&r, 2);
        let mm = m.clone().forget_weights();
        assert_eq!(bar2.tensor(&m).unwrap(), mm.direct_sum(&mm).unwrap());
    }

    #[test]
    fn tensor_of_koszul_pairs_validates() {
        let r = qring(&["a", "b", "c", "e"]);
        let t = kpair(&r, "a", "b").tensor(&kpair(&r, "c", "e")).unwrap();
        assert_eq!(t.potential(), &p(&r, "a*b + c*e"));
        assert_eq!(t.rank_minus1(), 2);
        t.validate().unwrap();
    }

    #[test]
    fn tensor_symmetry_certificate() {
        let r = qring(&["x", "y", "u", "v"]);
        let m = kpair(&r, "x", "y");
        let n = kpair(&r, "u", "v");
        let iso = tensor_swap_iso(&m, &n).unwrap();
        assert!(iso.is_closed().unwrap());
        // Invertible: compose with the reverse swap gives ±id... verify directly.
        let back = tensor_swap_iso(&n, &m).unwrap();
        let round = back.compose(&iso).unwrap();
        assert_eq!(round, MFMorphism::identity(&m.tensor(&n).unwrap()));
    }

    #[test]
    fn tensor_associator() {
        let r = qring(&["a", "b", "c", "e", "f", "g"]);
        let m1 = kpair(&r, "a", "b");
        let m2 = kpair(&r, "c", "e");
        let m3 = kpair(&r, "f", "g");
        let iso = tensor_assoc_iso(&m1, &m2, &m3).unwrap();
        assert!(iso.is_closed().unwrap());
        assert_eq!(
            iso.source.potential().clone(),
            iso.target.potential().clone()
        );
    }

    #[test]
    fn pullback_functorial() {
        let r = qring(&["t", "y"]);
        let s = qring(&["x", "y"]);
        let u = qring(&["z"]);
        let m = kpair(&r, "t", "y");
        let phi = RingMap::new(r.clone(), s.clone(), vec![p(&s, "x"), p(&s, "y")]).unwrap();
        let psi = RingMap::new(s.clone(), u.clone(), vec![p(&u, "z^2"), p(&u, "z")]).unwrap();
        let via = m.pullback(&phi).unwrap().pullback(&psi).unwrap();
        let direct = m.pullback(&phi.then(&psi).unwrap()).unwrap();
        assert_eq!(via, direct);
        // identity pullback
        assert_eq!(m.pullback(&RingMap::identity(&r)).unwrap(), m);
    }

    #[test]
    fn pullback_monoidal() {
        let r = qring(&["t", "y"]);
        let s = qring(&["x", "y"]);
        let phi = RingMap::new(r.clone(), s.clone(), vec![p(&s, "x^2"), p(&s, "y")]).unwrap();
        let m = kpair(&r, "t", "y");
        let n = kpair(&r, "y", "t");
        let lhs = m.tensor(&n).unwrap().pullback(&phi).unwrap();
        let rhs = m
            .pullback(&phi)
            .unwrap()
            .tensor(&n.pullback(&phi).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn pushforward_square_root() {
        // K(x; x) with w = x² pushed along u ↦ x², basis {1, x}.
        let s = qring(&["x"]);
        let t = qring(&["u"]);
        let m = kpair(&s, "x", "x");
        let phi = RingMap::new(t.clone(), s.clone(), vec![p(&s, "x^2")]).unwrap();
        let basis = vec![Monomial::one(1), Monomial::var(1, 0)];
        let down = m
            .pushforward_finite(&phi, &basis, &p(&t, "u"))
            .unwrap();
        assert_eq!(down.rank_minus1(), 2);
        down.validate().unwrap();
        // Pushforward along a renaming is a renaming.
        let t2 = qring(&["z"]);
        let iso = RingMap::new(t2.clone(), s.clone(), vec![p(&s, "x")]).unwrap();
        let renamed = m
            .pushforward_finite(&iso, &[Monomial::one(1)], &p(&t2, "z^2"))
            .unwrap();
        assert_eq!(renamed, kpair(&t2, "z", "z"));
    }

    #[test]
    fn hom_diff_squares_to_zero_and_examples() {
        let r = qring(&["x", "y"]);
        let m = kpair(&r, "x", "y");
        let n = kpair(&r, "y", "x");
        // Arbitrary morphism.
        let f = MFMorphism::new(
            m.clone(),
            n.clone(),
            Parity::Even,
            PolyMatrix::from_entries(&r, 1, 1, [(0, 0, p(&r, "x^2 - y"))]).unwrap(),
            PolyMatrix::from_entries(&r, 1, 1, [(0, 0, p(&r, "3*x*y"))]).unwrap(),
        )
        .unwrap();
        assert!(f.hom_diff().unwrap().hom_diff().unwrap().is_zero());
        // Identity is closed.
        assert!(MFMorphism::identity(&m).is_closed().unwrap());
        // The odd map (d₋₁, d₀): M → M has hom_diff = 2w·id.
        let dmap = MFMorphism::new(
            m.clone(),
            m.clone(),
            Parity::Odd,
            m.d_minus1().clone(),
            m.d_zero().clone(),
        )
        .unwrap();
        let dd = dmap.hom_diff().unwrap();
        let two_w = p(&r, "2*x*y");
        assert_eq!(dd.f_minus1.get(0, 0), two_w);
        assert_eq!(dd.f_zero.get(0, 0), two_w);
    }

    #[test]
    fn cone_examples() {
        let r = qring(&["x", "y"]);
        let m = kpair(&r, "x", "y");
        // cone(0 → M) has the same ranks as M (plus the empty part).
        let zero = MatrixFactorization::zero_object(&r, p(&r, "x*y"));
        let inc = MFMorphism::zero(&zero, &m, Parity::Even);
        let c = MatrixFactorization::cone(&inc).unwrap();
        c.validate().unwrap();
        assert_eq!(c.rank_minus1(), m.rank_minus1());
        // cone(x·id) is a rank-2 factorization passing the validator.
        let xid = MFMorphism::new(
            m.clone(),
            m.clone(),
            Parity::Even,
            PolyMatrix::scalar(&r, 1, &p(&r, "x")),
            PolyMatrix::scalar(&r, 1, &p(&r, "x")),
        )
        .unwrap();
        assert!(xid.is_closed().unwrap());
        let c2 = MatrixFactorization::cone(&xid).unwrap();
        assert_eq!(c2.rank_minus1(), 2);
        c2.validate().unwrap();
    }

    #[test]
    fn tot_examples() {
        let r = qring(&["x", "y"]);
        let m = kpair(&r, "x", "y");
        // One-object complex.
        let t1 = MatrixFactorization::tot(std::slice::from_ref(&m), &[], 0).unwrap();
        assert_eq!(t1, m);
        // Three-term complex with zero maps = M ⊕ shift(M) ⊕ M-ish blocks.
        let z1 = MFMorphism::zero(&m, &m, Parity::Even);
        let t3 = MatrixFactorization::tot(
            &[m.clone(), m.clone(), m.clone()],
            &[z1.clone(), z1.clone()],
            0,
        )
        .unwrap();
        t3.validate().unwrap();
        assert_eq!(t3.rank_minus1(), 3);
        // Two-term 0 → M → M → 0 with the identity: contractible; here just
        // check the totalization validates (reduction handled elsewhere).
        let idm = MFMorphism::identity(&m);
        let t2 = MatrixFactorization::tot(&[m.clone(), m.clone()], &[idm], 0).unwrap();
        t2.validate().unwrap();
    }

    #[test]
    fn graded_koszul_pair_weights() {
        let r = Ring::graded(vec!["x".into(), "y".into()], vec![1, 1]).unwrap();
        let m = kpair(&r, "x", "y");
        assert!(m.is_graded());
        m.validate().unwrap();
        let t = m.tensor(&m.shift()).unwrap();
        t.validate().unwrap();
        assert!(t.is_graded());
    }

    #[test]
    fn scale_morphism() {
        let r = qring(&["x", "y"]);
        let m = kpair(&r, "x", "y");
        let id2 = MFMorphism::identity(&m).scale(&coeff_int(2));
        assert!(id2.is_closed().unwrap());
    }
}
