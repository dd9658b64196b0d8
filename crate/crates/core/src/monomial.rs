//! Squarefree monomials and polynomials of the quotient ring
//! `F2[x_0, ..., x_{m-1}] / (x_i^2 - x_i)`.
//!
//! A [`Monomial`] is a variable bitmask (bit `i` set means `x_i` divides it).
//! A [`Poly`] is its algebraic normal form: a set of distinct monomials whose
//! sum is taken over F2, so inserting a monomial twice removes it.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported number of variables. Symbolic operations accept any
/// `m` up to this; evaluation-backed operations have their own, lower cap.
pub const MAX_VARS: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(u64);

impl Monomial {
    /// The constant monomial `1`.
    pub const ONE: Monomial = Monomial(0);

    pub const fn from_mask(mask: u64) -> Self {
        Monomial(mask)
    }

    pub fn var(i: usize) -> Self {
        assert!(i < MAX_VARS, "variable index {i} out of range");
        Monomial(1 << i)
    }

    /// Builds the monomial `prod_{i in indices} x_i`, checking that every index
    /// is distinct and lies in `[0, m)`.
    pub fn new(indices: &[usize], m: usize) -> Result<Self> {
        check_m(m)?;
        let mut mask = 0u64;
        for &i in indices {
            if i >= m {
                return Err(Error::domain(format!("index {i} out of range for m = {m}")));
            }
            if mask >> i & 1 == 1 {
                return Err(Error::domain(format!("duplicate index {i}")));
            }
            mask |= 1 << i;
        }
        Ok(Monomial(mask))
    }

    pub const fn mask(self) -> u64 {
        self.0
    }

    pub const fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub const fn is_one(self) -> bool {
        self.0 == 0
    }

    /// Sorted variable indices, i.e. `ind(f)`.
    pub fn indices(self) -> Indices {
        Indices(self.0)
    }

    pub fn contains_var(self, i: usize) -> bool {
        i < MAX_VARS && self.0 >> i & 1 == 1
    }

    pub fn max_index(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    /// `self | other`, i.e. every variable of `self` appears in `other`.
    pub const fn divides(self, other: Monomial) -> bool {
        self.0 & !other.0 == 0
    }

    pub const fn is_disjoint(self, other: Monomial) -> bool {
        self.0 & other.0 == 0
    }

    /// Product in the quotient ring; equals the lcm since variables are idempotent.
    pub const fn times(self, other: Monomial) -> Monomial {
        Monomial(self.0 | other.0)
    }

    pub const fn gcd(self, other: Monomial) -> Monomial {
        Monomial(self.0 & other.0)
    }

    /// Removes the variables of `other`; the quotient `self / other` when
    /// `other` divides `self`.
    pub const fn without(self, other: Monomial) -> Monomial {
        Monomial(self.0 & !other.0)
    }

    /// Fits in an `m`-variable ring.
    pub fn fits(self, m: usize) -> bool {
        m >= MAX_VARS || self.0 >> m == 0
    }
}

/// Least common multiple of a nonempty list: the union of index sets.
pub fn lcm(ms: &[Monomial]) -> Result<Monomial> {
    if ms.is_empty() {
        return Err(Error::domain("lcm of an empty list"));
    }
    Ok(Monomial(ms.iter().fold(0, |acc, f| acc | f.0)))
}

pub struct Indices(u64);

impl Iterator for Indices {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Indices {}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        for (n, i) in self.indices().enumerate() {
            if n > 0 {
                f.write_str("*")?;
            }
            write!(f, "x{i}")?;
        }
        Ok(())
    }
}

impl FromStr for Monomial {
    type Err = Error;

    /// Parses `x3*x5*x7` or `1`. Repeated variables are rejected; `x1*1` is
    /// accepted and equals `x1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty monomial".into()));
        }
        let mut mask = 0u64;
        for factor in s.split('*') {
            let factor = factor.trim();
            if factor == "1" {
                continue;
            }
            let idx = factor
                .strip_prefix('x')
                .or_else(|| factor.strip_prefix('X'))
                .ok_or_else(|| Error::Parse(format!("bad factor {factor:?} in {s:?}")))?;
            let i: usize = idx
                .parse()
                .map_err(|_| Error::Parse(format!("bad variable index {idx:?} in {s:?}")))?;
            if i >= MAX_VARS {
                return Err(Error::Parse(format!("variable x{i} exceeds {MAX_VARS} variables")));
            }
            if mask >> i & 1 == 1 {
                return Err(Error::Parse(format!("repeated variable x{i} in {s:?}")));
            }
            mask |= 1 << i;
        }
        Ok(Monomial(mask))
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn check_m(m: usize) -> Result<()> {
    if m > MAX_VARS {
        return Err(Error::domain(format!("m = {m} exceeds {MAX_VARS} variables")));
    }
    Ok(())
}

/// A Boolean function in algebraic normal form over `m` variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    m: usize,
    terms: BTreeSet<Monomial>,
}

impl Poly {
    pub fn zero(m: usize) -> Self {
        assert!(m <= MAX_VARS, "m = {m} exceeds {MAX_VARS}");
        Poly { m, terms: BTreeSet::new() }
    }

    pub fn one(m: usize) -> Self {
        Self::monomial(Monomial::ONE, m)
    }

    pub fn monomial(f: Monomial, m: usize) -> Self {
        let mut p = Self::zero(m);
        p.toggle(f);
        p
    }

    /// Sums the given monomials over F2; pairs of equal terms cancel.
    pub fn from_terms<I: IntoIterator<Item = Monomial>>(m: usize, terms: I) -> Result<Self> {
        check_m(m)?;
        let mut p = Poly { m, terms: BTreeSet::new() };
        for t in terms {
            if !t.fits(m) {
                return Err(Error::domain(format!("monomial {t} does not fit m = {m}")));
            }
            p.toggle(t);
        }
        Ok(p)
    }

    /// Builds from raw bitmasks, as stored in orbit dumps.
    pub fn from_masks<I: IntoIterator<Item = u64>>(m: usize, masks: I) -> Result<Self> {
        Self::from_terms(m, masks.into_iter().map(Monomial::from_mask))
    }

    pub fn parse(s: &str, m: usize) -> Result<Self> {
        check_m(m)?;
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero(m));
        }
        let mut terms = Vec::new();
        for t in s.split('+') {
            terms.push(t.parse::<Monomial>()?);
        }
        Self::from_terms(m, terms)
            .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = Monomial> + DoubleEndedIterator + '_ {
        self.terms.iter().copied()
    }

    pub fn term_set(&self) -> &BTreeSet<Monomial> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, f: Monomial) -> bool {
        self.terms.contains(&f)
    }

    /// Maximum term degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.degree()).max()
    }

    /// Union of the variables of all terms.
    pub fn support(&self) -> Monomial {
        Monomial(self.terms.iter().fold(0, |acc, t| acc | t.0))
    }

    /// Adds a single monomial (XOR).
    pub fn toggle(&mut self, f: Monomial) {
        debug_assert!(f.fits(self.m));
        if !self.terms.remove(&f) {
            self.terms.insert(f);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.m, other.m, "ambient variable counts differ");
        Poly {
            m: self.m,
            terms: self.terms.symmetric_difference(&other.terms).copied().collect(),
        }
    }

    /// `h * p` for a monomial `h`: each term `t` maps to `t ∪ h`, and
    /// colliding products cancel.
    pub fn mul_monomial(&self, h: Monomial) -> Poly {
        assert!(h.fits(self.m), "monomial {h} does not fit m = {}", self.m);
        let mut out = Poly::zero(self.m);
        for t in &self.terms {
            out.toggle(t.times(h));
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.m, other.m, "ambient variable counts differ");
        let mut out = Poly::zero(self.m);
        for a in &self.terms {
            for b in &other.terms {
                out.toggle(a.times(*b));
            }
        }
        out
    }

    /// Value at the point whose bit `j` is `x_j`.
    pub fn eval_at(&self, point: u64) -> bool {
        self.terms.iter().fold(false, |acc, t| acc ^ (point & t.0 == t.0))
    }

    /// Canonical form used for hashing orbits: the sorted term bitmasks.
    pub fn canonical_masks(&self) -> Vec<u64> {
        self.terms.iter().map(|t| t.0).collect()
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[m={}]({})", self.m, self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // Highest degree first reads closer to how the templates are written.
        let mut terms: Vec<Monomial> = self.terms.iter().copied().collect();
        terms.sort_by(|a, b| b.degree().cmp(&a.degree()).then(a.0.cmp(&b.0)));
        for (n, t) in terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_monomial_examples() {
        let one = Monomial::new(&[], 4).unwrap();
        assert!(one.is_one());
        assert_eq!(one.degree(), 0);

        let f = Monomial::new(&[2, 0], 4).unwrap();
        assert_eq!(f.indices().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(f.degree(), 2);

        let full = Monomial::new(&[0, 1, 2, 3, 4], 5).unwrap();
        assert_eq!(full.degree(), 5);
    }

    #[test]
    fn make_monomial_errors() {
        assert!(matches!(Monomial::new(&[4], 4), Err(Error::Domain(_))));
        assert!(matches!(Monomial::new(&[1, 1], 4), Err(Error::Domain(_))));
    }

    #[test]
    fn lcm_examples() {
        let a: Monomial = "x1*x2*x3".parse().unwrap();
        let b: Monomial = "x2*x4*x5".parse().unwrap();
        let l = lcm(&[a, b]).unwrap();
        assert_eq!(l, "x1*x2*x3*x4*x5".parse().unwrap());
        assert_eq!(l.degree(), 5);
        assert_eq!(lcm(&[a]).unwrap(), a);
        assert_eq!(lcm(&[Monomial::ONE, a]).unwrap(), a);
        assert!(lcm(&[]).is_err());
    }

    #[test]
    fn mul_examples() {
        let p = Poly::parse("x1 + x2", 3).unwrap();
        assert_eq!(p.mul_monomial(Monomial::ONE), p);
        assert_eq!(p.mul_monomial(Monomial::var(0)), Poly::parse("x0*x1 + x0*x2", 3).unwrap());
        // x0 * (x0 + 1) = x0 + x0 = 0
        let q = Poly::parse("x0 + 1", 3).unwrap();
        assert!(q.mul_monomial(Monomial::var(0)).is_zero());
    }

    #[test]
    fn text_format() {
        let p = Poly::parse("x3*x5*x7 + 1 + x0", 8).unwrap();
        assert_eq!(p.to_string(), "x3*x5*x7 + x0 + 1");
        assert_eq!(Poly::parse(&p.to_string(), 8).unwrap(), p);
        assert_eq!(Poly::parse("0", 3).unwrap(), Poly::zero(3));
        assert_eq!(Poly::parse("x1 + x1", 3).unwrap(), Poly::zero(3));
        assert!(Poly::parse("x1 + y2", 3).is_err());
        assert!(Poly::parse("x1*x1", 3).is_err());
        assert!(Poly::parse("x3", 3).is_err());
        assert!(Poly::parse("x1 +", 3).is_err());
    }

    #[test]
    fn degree_and_support() {
        let p = Poly::parse("x0*x1 + x2*x3 + x4", 5).unwrap();
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.support().degree(), 5);
        assert_eq!(Poly::zero(3).degree(), None);
    }
}
