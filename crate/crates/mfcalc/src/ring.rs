//! Sparse exact multivariate polynomial arithmetic with optional integer
//! weight gradings and substitution homomorphisms.
//!
//! Coefficients are arbitrary-precision rationals and every value is kept in
//! a canonical form (terms sorted by graded-lexicographic order, no zero
//! coefficients), so equality of polynomials is literal equality of data.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

pub type Coeff = BigRational;

pub fn coeff_int(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

pub fn coeff_ratio(num: i64, den: i64) -> Coeff {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// An ordered list of variable names, optionally carrying an integer weight
/// per variable. Weights may be negative; they back the 𝔾_m-style gradings
/// where potentials are homogeneous of weight 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ring {
    vars: Vec<String>,
    weights: Option<Vec<i64>>,
}

fn valid_var_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl Ring {
    pub fn new(vars: Vec<String>) -> Result<Arc<Ring>, Error> {
        Self::build(vars, None)
    }

    pub fn graded(vars: Vec<String>, weights: Vec<i64>) -> Result<Arc<Ring>, Error> {
        Self::build(vars, Some(weights))
    }

    fn build(vars: Vec<String>, weights: Option<Vec<i64>>) -> Result<Arc<Ring>, Error> {
        for v in &vars {
            if !valid_var_name(v) {
                return Err(Error::BadRing(format!("invalid variable name `{v}`")));
            }
        }
        for i in 0..vars.len() {
            for j in i + 1..vars.len() {
                if vars[i] == vars[j] {
                    return Err(Error::BadRing(format!("duplicate variable `{}`", vars[i])));
                }
            }
        }
        if let Some(w) = &weights {
            if w.len() != vars.len() {
                return Err(Error::BadRing(
                    "weight list length differs from variable count".into(),
                ));
            }
        }
        Ok(Arc::new(Ring { vars, weights }))
    }

    /// Convenience constructor from `name` or `name:weight` tokens.
    pub fn parse_decl(tokens: &[&str]) -> Result<Arc<Ring>, Error> {
        let mut vars = Vec::new();
        let mut weights = Vec::new();
        let mut any_weight = false;
        for t in tokens {
            match t.split_once(':') {
                Some((name, w)) => {
                    any_weight = true;
                    vars.push(name.to_string());
                    weights.push(w.parse::<i64>().map_err(|_| {
                        Error::BadRing(format!("invalid weight in `{t}`"))
                    })?);
                }
                None => {
                    vars.push(t.to_string());
                    weights.push(0);
                }
            }
        }
        if any_weight {
            Self::graded(vars, weights)
        } else {
            Self::new(vars)
        }
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn is_graded(&self) -> bool {
        self.weights.is_some()
    }

    pub fn weights(&self) -> Option<&[i64]> {
        self.weights.as_deref()
    }

    pub fn weight_of(&self, idx: usize) -> Option<i64> {
        self.weights.as_ref().map(|w| w[idx])
    }

    /// The ring with one variable removed, keeping order and weights.
    pub fn without_var(&self, idx: usize) -> Result<Arc<Ring>, Error> {
        let mut vars = self.vars.clone();
        vars.remove(idx);
        match &self.weights {
            Some(w) => {
                let mut w = w.clone();
                w.remove(idx);
                Ring::graded(vars, w)
            }
            None => Ring::new(vars),
        }
    }

    /// Extends the ring by fresh variables (graded when both parts are).
    pub fn with_vars(&self, extra: &[(String, i64)]) -> Result<Arc<Ring>, Error> {
        let mut vars = self.vars.clone();
        for (name, _) in extra {
            vars.push(name.clone());
        }
        match &self.weights {
            Some(w) => {
                let mut w = w.clone();
                w.extend(extra.iter().map(|(_, wt)| *wt));
                Ring::graded(vars, w)
            }
            None => Ring::new(vars),
        }
    }

    pub fn decl_string(&self) -> String {
        let mut parts = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            match &self.weights {
                Some(w) => parts.push(format!("{v}:{}", w[i])),
                None => parts.push(v.clone()),
            }
        }
        parts.join(" ")
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ring {}", self.decl_string())
    }
}

/// Exponent vector, one entry per ring variable. Ordered graded-lex:
/// total degree first, then lexicographic in the ring's variable order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(arity: usize) -> Monomial {
        Monomial(vec![0; arity])
    }

    pub fn var(arity: usize, idx: usize) -> Monomial {
        let mut e = vec![0; arity];
        e[idx] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.divides(self) {
            Some(Monomial(
                self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
            ))
        } else {
            None
        }
    }

    pub fn weight(&self, ring: &Ring) -> i64 {
        let w = ring.weights().expect("weight of monomial in ungraded ring");
        self.0
            .iter()
            .zip(w)
            .map(|(&e, &wt)| e as i64 * wt)
            .sum()
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// Result of a weight-degree computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightDegree {
    /// The zero polynomial is homogeneous of every weight.
    Zero,
    Homogeneous(i64),
    Inhomogeneous,
}

/// Sparse polynomial in canonical form over a shared [`Ring`].
#[derive(Debug, Clone)]
pub struct Poly {
    ring: Arc<Ring>,
    terms: BTreeMap<Monomial, Coeff>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn zero(ring: &Arc<Ring>) -> Poly {
        Poly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Arc<Ring>, c: Coeff) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(ring.arity()), c);
        }
        Poly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn int(ring: &Arc<Ring>, n: i64) -> Poly {
        Poly::constant(ring, coeff_int(n))
    }

    pub fn var(ring: &Arc<Ring>, name: &str) -> Result<Poly, Error> {
        let idx = ring
            .var_index(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(Poly::var_idx(ring, idx))
    }

    pub fn var_idx(ring: &Arc<Ring>, idx: usize) -> Poly {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(ring.arity(), idx), Coeff::one());
        Poly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn from_terms<I>(ring: &Arc<Ring>, iter: I) -> Poly
    where
        I: IntoIterator<Item = (Monomial, Coeff)>,
    {
        let mut p = Poly::zero(ring);
        for (m, c) in iter {
            debug_assert_eq!(m.0.len(), ring.arity());
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The constant term (zero if absent).
    pub fn constant_term(&self) -> Coeff {
        self.terms
            .get(&Monomial::one(self.ring.arity()))
            .cloned()
            .unwrap_or_else(Coeff::zero)
    }

    /// Some(c) iff the polynomial is the constant c (possibly zero).
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                if m.is_one() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Some((c, m)) iff the polynomial is a single term.
    pub fn as_single_term(&self) -> Option<(Coeff, Monomial)> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            Some((c.clone(), m.clone()))
        } else {
            None
        }
    }

    fn check_same_ring(&self, other: &Poly) -> Result<(), Error> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly, Error> {
        self.check_same_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly, Error> {
        self.check_same_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly, Error> {
        self.check_same_ring(other)?;
        let mut out = Poly::zero(&self.ring);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.try_add(other).expect("ring mismatch in add")
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.try_sub(other).expect("ring mismatch in sub")
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.try_mul(other).expect("ring mismatch in mul")
    }

    pub fn neg(&self) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Coeff) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::int(&self.ring, 1);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn contains_var(&self, idx: usize) -> bool {
        self.terms.keys().any(|m| m.0[idx] > 0)
    }

    pub fn degree_in(&self, idx: usize) -> u32 {
        self.terms.keys().map(|m| m.0[idx]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    /// Applies a ring homomorphism.
    pub fn substitute(&self, map: &RingMap) -> Result<Poly, Error> {
        if *self.ring != *map.source {
            return Err(Error::RingMismatch);
        }
        let mut out = Poly::zero(&map.target);
        // Powers of each image reused across terms.
        let mut pow_cache: Vec<Vec<Poly>> = map
            .images
            .iter()
            .map(|img| vec![Poly::int(&map.target, 1), img.clone()])
            .collect();
        for (m, c) in &self.terms {
            let mut acc = Poly::constant(&map.target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut pow_cache[i];
                while cache.len() <= e as usize {
                    let next = cache.last().unwrap().mul(&map.images[i]);
                    cache.push(next);
                }
                acc = acc.mul(&cache[e as usize]);
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    /// Substitutes one variable by a polynomial of the same ring.
    pub fn subst_var(&self, idx: usize, value: &Poly) -> Poly {
        assert_eq!(self.ring, value.ring);
        let mut out = Poly::zero(&self.ring);
        let mut pows: Vec<Poly> = vec![Poly::int(&self.ring, 1), value.clone()];
        for (m, c) in &self.terms {
            let e = m.0[idx] as usize;
            while pows.len() <= e {
                let next = pows.last().unwrap().mul(value);
                pows.push(next);
            }
            let mut base = m.clone();
            base.0[idx] = 0;
            let term = Poly::from_terms(&self.ring, [(base, c.clone())]);
            out = out.add(&term.mul(&pows[e]));
        }
        out
    }

    /// Re-expresses the polynomial in `target`, mapping variables by name.
    /// Fails if a variable actually used is absent from the target.
    pub fn project_to(&self, target: &Arc<Ring>) -> Result<Poly, Error> {
        let mut index_map = Vec::with_capacity(self.ring.arity());
        for v in self.ring.vars() {
            index_map.push(target.var_index(v));
        }
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; target.arity()];
            for (i, &exp) in m.0.iter().enumerate() {
                if exp == 0 {
                    continue;
                }
                match index_map[i] {
                    Some(j) => e[j] = exp,
                    None => {
                        return Err(Error::UnknownVariable(self.ring.vars()[i].clone()))
                    }
                }
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Weight of every term when they agree; see [`WeightDegree`].
    pub fn weight_degree(&self) -> Result<WeightDegree, Error> {
        if !self.ring.is_graded() {
            return Err(Error::UngradedRing);
        }
        let mut it = self.terms.keys();
        let first = match it.next() {
            None => return Ok(WeightDegree::Zero),
            Some(m) => m.weight(&self.ring),
        };
        for m in it {
            if m.weight(&self.ring) != first {
                return Ok(WeightDegree::Inhomogeneous);
            }
        }
        Ok(WeightDegree::Homogeneous(first))
    }

    pub fn is_homogeneous_of(&self, d: i64) -> bool {
        match self.weight_degree() {
            Ok(WeightDegree::Zero) => true,
            Ok(WeightDegree::Homogeneous(w)) => w == d,
            _ => false,
        }
    }

    /// Exact division by the linear polynomial `u - g` (variable index `u`,
    /// `g` free of `u`): returns q with self = (u − g)·q + self|_{u=g}.
    pub fn div_linear(&self, u: usize, g: &Poly) -> Poly {
        assert!(!g.contains_var(u));
        // self = Σ_k p_k u^k; (self − self|_{u=g}) / (u − g)
        //      = Σ_k p_k Σ_{i<k} u^i g^{k−1−i}.
        let deg = self.degree_in(u);
        let mut by_pow: Vec<Poly> = vec![Poly::zero(&self.ring); deg as usize + 1];
        for (m, c) in &self.terms {
            let k = m.0[u] as usize;
            let mut base = m.clone();
            base.0[u] = 0;
            by_pow[k] = by_pow[k].add(&Poly::from_terms(&self.ring, [(base, c.clone())]));
        }
        let u_poly = Poly::var_idx(&self.ring, u);
        let mut out = Poly::zero(&self.ring);
        for (k, p_k) in by_pow.iter().enumerate() {
            if p_k.is_zero() {
                continue;
            }
            let mut inner = Poly::zero(&self.ring);
            for i in 0..k {
                inner = inner.add(&u_poly.pow(i as u32).mul(&g.pow((k - 1 - i) as u32)));
            }
            out = out.add(&p_k.mul(&inner));
        }
        out
    }
}

fn coeff_to_string(c: &Coeff) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    /// Canonical text form: terms in descending graded-lex order,
    /// `c*v1^e1*...*vk^ek` per term.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(coeff_to_string(&abs));
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.ring.vars()[i].clone()),
                    _ => factors.push(format!("{}^{}", self.ring.vars()[i], e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// A substitution homomorphism between polynomial rings: one target
/// polynomial per source variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingMap {
    source: Arc<Ring>,
    target: Arc<Ring>,
    images: Vec<Poly>,
}

impl RingMap {
    pub fn new(source: Arc<Ring>, target: Arc<Ring>, images: Vec<Poly>) -> Result<RingMap, Error> {
        if images.len() != source.arity() {
            return Err(Error::BadRingMap(format!(
                "expected {} images, got {}",
                source.arity(),
                images.len()
            )));
        }
        for img in &images {
            if *img.ring() != target {
                return Err(Error::RingMismatch);
            }
        }
        Ok(RingMap {
            source,
            target,
            images,
        })
    }

    pub fn identity(ring: &Arc<Ring>) -> RingMap {
        let images = (0..ring.arity()).map(|i| Poly::var_idx(ring, i)).collect();
        RingMap {
            source: ring.clone(),
            target: ring.clone(),
            images,
        }
    }

    /// Maps source variables to target variables by name.
    pub fn by_name(source: &Arc<Ring>, target: &Arc<Ring>) -> Result<RingMap, Error> {
        let images = source
            .vars()
            .iter()
            .map(|v| Poly::var(target, v))
            .collect::<Result<Vec<_>, _>>()?;
        RingMap::new(source.clone(), target.clone(), images)
    }

    /// Maps source variables to target variables via an explicit name table,
    /// defaulting to the same name when absent from the table.
    pub fn renaming(
        source: &Arc<Ring>,
        target: &Arc<Ring>,
        table: &[(&str, &str)],
    ) -> Result<RingMap, Error> {
        let images = source
            .vars()
            .iter()
            .map(|v| {
                let name = table
                    .iter()
                    .find(|(from, _)| from == v)
                    .map(|(_, to)| *to)
                    .unwrap_or(v.as_str());
                Poly::var(target, name)
            })
            .collect::<Result<Vec<_>, _>>()?;
        RingMap::new(source.clone(), target.clone(), images)
    }

    pub fn source(&self) -> &Arc<Ring> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Ring> {
        &self.target
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    pub fn apply(&self, p: &Poly) -> Result<Poly, Error> {
        p.substitute(self)
    }

    /// `self.then(next)` = next ∘ self.
    pub fn then(&self, next: &RingMap) -> Result<RingMap, Error> {
        if self.target != next.source {
            return Err(Error::RingMismatch);
        }
        let images = self
            .images
            .iter()
            .map(|img| img.substitute(next))
            .collect::<Result<Vec<_>, _>>()?;
        RingMap::new(self.source.clone(), next.target.clone(), images)
    }

    /// True iff each image is homogeneous of the source variable's weight.
    pub fn is_graded(&self) -> bool {
        match (self.source.weights(), self.target.is_graded()) {
            (Some(w), true) => self
                .images
                .iter()
                .zip(w)
                .all(|(img, &wt)| img.is_homogeneous_of(wt)),
            _ => false,
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Coeff),
    Name(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(input: &str) -> Result<Vec<Tok>, Error> {
    let mut toks = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                toks.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                toks.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                toks.push(Tok::Star);
                i += 1;
            }
            '^' => {
                toks.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                toks.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                toks.push(Tok::RParen);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let numer: BigInt = chars[start..i]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| Error::Parse("bad integer".into()))?;
                // optional /denominator
                if i < chars.len() && chars[i] == '/' {
                    i += 1;
                    let dstart = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    if dstart == i {
                        return Err(Error::Parse("missing denominator".into()));
                    }
                    let denom: BigInt = chars[dstart..i]
                        .iter()
                        .collect::<String>()
                        .parse()
                        .map_err(|_| Error::Parse("bad denominator".into()))?;
                    if denom.is_zero() {
                        return Err(Error::Parse("zero denominator".into()));
                    }
                    toks.push(Tok::Num(BigRational::new(numer, denom)));
                } else {
                    toks.push(Tok::Num(BigRational::from_integer(numer)));
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
                {
                    i += 1;
                }
                toks.push(Tok::Name(chars[start..i].iter().collect()));
            }
            other => return Err(Error::Parse(format!("unexpected character `{other}`"))),
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    ring: &'a Arc<Ring>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Poly, Error> {
        let mut negate = false;
        loop {
            match self.peek() {
                Some(Tok::Minus) => {
                    negate = !negate;
                    self.pos += 1;
                }
                Some(Tok::Plus) => {
                    self.pos += 1;
                }
                _ => break,
            }
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, Error> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.pos += 1;
            let f = self.factor()?;
            acc = acc.mul(&f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, Error> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.pos += 1;
            match self.next() {
                Some(Tok::Num(c)) if c.denom().is_one() && !c.is_negative() => {
                    let e: u32 = c
                        .numer()
                        .to_string()
                        .parse()
                        .map_err(|_| Error::Parse("exponent too large".into()))?;
                    Ok(base.pow(e))
                }
                _ => Err(Error::Parse("expected nonnegative integer exponent".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly, Error> {
        match self.next() {
            Some(Tok::Num(c)) => Ok(Poly::constant(self.ring, c)),
            Some(Tok::Name(n)) => Poly::var(self.ring, &n),
            Some(Tok::Minus) => {
                let inner = self.atom()?;
                Ok(inner.neg())
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(Error::Parse("expected `)`".into())),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

impl Poly {
    pub fn parse(ring: &Arc<Ring>, input: &str) -> Result<Poly, Error> {
        let toks = tokenize(input)?;
        if toks.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut p = Parser {
            toks,
            pos: 0,
            ring,
        };
        let out = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::Parse("trailing input after polynomial".into()));
        }
        Ok(out)
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
    fn arith_examples() {
        let r = qring(&["y", "y'", "t"]);
        // (y − y′)·t distributes
        assert_eq!(p(&r, "(y - y')*t"), p(&r, "t*y - t*y'"));
        // cancellation to the empty term map
        let r2 = qring(&["x"]);
        assert!(p(&r2, "x + 1").add(&p(&r2, "-x - 1")).is_zero());
        // difference of squares
        assert_eq!(p(&r, "(y - y')*(y + y')"), p(&r, "y^2 - y'^2"));
    }

    #[test]
    fn substitute_examples() {
        let r = qring(&["y", "y'"]);
        let diag = RingMap::new(
            r.clone(),
            r.clone(),
            vec![Poly::var(&r, "y").unwrap(), Poly::var(&r, "y").unwrap()],
        )
        .unwrap();
        assert!(p(&r, "(y - y')^2").substitute(&diag).unwrap().is_zero());

        let rt = qring(&["y", "y'", "t"]);
        let rx = qring(&["y", "y'", "x"]);
        let m = RingMap::new(
            rt.clone(),
            rx.clone(),
            vec![
                Poly::var(&rx, "y").unwrap(),
                Poly::var(&rx, "y'").unwrap(),
                Poly::var(&rx, "x").unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(
            p(&rt, "t*(y - y')").substitute(&m).unwrap(),
            p(&rx, "x*y - x*y'")
        );
    }

    #[test]
    fn cocycle_identity() {
        // h∘p12 + h∘p23 = h∘p13 for h = t(y − y′).
        let r2 = qring(&["y", "y'", "t"]);
        let r3 = qring(&["y", "y'", "y''", "t"]);
        let h = p(&r2, "t*(y - y')");
        let pairs = |a: &str, b: &str| {
            RingMap::new(
                r2.clone(),
                r3.clone(),
                vec![
                    Poly::var(&r3, a).unwrap(),
                    Poly::var(&r3, b).unwrap(),
                    Poly::var(&r3, "t").unwrap(),
                ],
            )
            .unwrap()
        };
        let h12 = h.substitute(&pairs("y", "y'")).unwrap();
        let h23 = h.substitute(&pairs("y'", "y''")).unwrap();
        let h13 = h.substitute(&pairs("y", "y''")).unwrap();
        assert_eq!(h12.add(&h23), h13);
    }

    #[test]
    fn weight_degree_examples() {
        let r = Ring::graded(
            vec!["t".into(), "y".into(), "y'".into()],
            vec![2, 0, 0],
        )
        .unwrap();
        assert_eq!(
            p(&r, "t*(y - y')").weight_degree().unwrap(),
            WeightDegree::Homogeneous(2)
        );
        assert_eq!(
            p(&r, "5").weight_degree().unwrap(),
            WeightDegree::Homogeneous(0)
        );
        assert_eq!(
            p(&r, "t + y").weight_degree().unwrap(),
            WeightDegree::Inhomogeneous
        );
        assert_eq!(Poly::zero(&r).weight_degree().unwrap(), WeightDegree::Zero);
    }

    #[test]
    fn graded_lex_order() {
        let r = qring(&["x", "y"]);
        let mono = |a: u32, b: u32| Monomial(vec![a, b]);
        // degree first, then lexicographic in the ring's variable order
        assert!(mono(1, 1) > mono(1, 0));
        assert!(mono(2, 0) > mono(1, 1));
        assert!(mono(1, 1) > mono(0, 2));
        assert_eq!(
            p(&r, "x + y^2 + x*y + x^2").to_string(),
            "x^2 + x*y + y^2 + x"
        );
    }

    #[test]
    fn display_roundtrip_canonical() {
        let r = qring(&["x", "y"]);
        let q = p(&r, "3/2*x^2*y - y + 5 - x*y");
        let printed = q.to_string();
        assert_eq!(Poly::parse(&r, &printed).unwrap(), q);
        assert_eq!(printed, "3/2*x^2*y - x*y - y + 5");
    }

    #[test]
    fn div_linear_exact() {
        let r = qring(&["u", "v"]);
        let g = p(&r, "v^2");
        let q = p(&r, "u^3*v + 2*u - 7*v");
        let quot = q.div_linear(0, &g);
        let diag = RingMap::new(
            r.clone(),
            r.clone(),
            vec![g.clone(), Poly::var(&r, "v").unwrap()],
        )
        .unwrap();
        let rem = q.substitute(&diag).unwrap();
        let recomposed = p(&r, "u - v^2").mul(&quot).add(&rem);
        assert_eq!(recomposed, q);
    }

    #[test]
    fn map_composition_law() {
        let r = qring(&["a", "b"]);
        let s = qring(&["u"]);
        let m1 = RingMap::new(
            r.clone(),
            s.clone(),
            vec![p(&s, "u^2"), p(&s, "u + 1")],
        )
        .unwrap();
        let t = qring(&["z", "w"]);
        let m2 = RingMap::new(s.clone(), t.clone(), vec![p(&t, "z*w")]).unwrap();
        let q = p(&r, "a*b - 3*b^2");
        let lhs = q.substitute(&m1).unwrap().substitute(&m2).unwrap();
        let rhs = q.substitute(&m1.then(&m2).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}
