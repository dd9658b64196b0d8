//! Decreasing monomial codes.
//!
//! `f ≼ g` when `g` has a divisor `g*` of degree `deg f` whose sorted
//! indices dominate those of `f` componentwise. A set of monomials closed
//! downward under `≼` spans a decreasing monomial code; Reed–Muller and polar
//! codes are of this form.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{BitRow, EVAL_M_CAP};
use crate::monomial::{Monomial, Poly, MAX_VARS};

/// `f ≼ g` in the decreasing order.
pub fn leq_decreasing(f: Monomial, g: Monomial) -> bool {
    if f.degree() > g.degree() {
        return false;
    }
    // Greedy: match each index of f, smallest first, to the smallest unused
    // index of g that dominates it.
    let mut avail = g.mask();
    for i in f.indices() {
        let candidates = avail & !((1u64 << i) - 1);
        if candidates == 0 {
            return false;
        }
        let j = candidates.trailing_zeros();
        // Everything below j is now unusable for larger indices of f.
        avail &= !((1u64 << j) | ((1u64 << j) - 1));
    }
    true
}

/// Monomials directly below `f`: drop one variable, or lower one index by
/// one into a free slot.
fn lower_covers(f: Monomial) -> impl Iterator<Item = Monomial> {
    let mask = f.mask();
    f.indices().flat_map(move |i| {
        let drop = Some(Monomial::from_mask(mask & !(1 << i)));
        let shift = (i > 0 && mask >> (i - 1) & 1 == 0)
            .then(|| Monomial::from_mask(mask & !(1 << i) | 1 << (i - 1)));
        drop.into_iter().chain(shift)
    })
}

/// A downward-closed set of monomials in `m` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecreasingSet {
    m: usize,
    monomials: BTreeSet<Monomial>,
}

/// Whether every element's lower covers are present.
pub fn is_decreasing(set: &BTreeSet<Monomial>) -> bool {
    set.iter().all(|&f| lower_covers(f).all(|g| set.contains(&g)))
}

impl DecreasingSet {
    /// Validates that `monomials` is decreasing.
    pub fn new(m: usize, monomials: BTreeSet<Monomial>) -> Result<Self> {
        check_fit(m, &monomials)?;
        if let Some(&f) = monomials.iter().find(|&&f| lower_covers(f).any(|g| !monomials.contains(&g))) {
            let missing = lower_covers(f).find(|g| !monomials.contains(g)).unwrap();
            return Err(Error::domain(format!("not decreasing: {f} is present but {missing} is not")));
        }
        Ok(DecreasingSet { m, monomials })
    }

    /// Smallest decreasing superset of `gens`.
    pub fn closure<I: IntoIterator<Item = Monomial>>(m: usize, gens: I) -> Result<Self> {
        let gens: BTreeSet<Monomial> = gens.into_iter().collect();
        check_fit(m, &gens)?;
        let mut out = BTreeSet::new();
        let mut queue: VecDeque<Monomial> = gens.into_iter().collect();
        while let Some(f) = queue.pop_front() {
            if out.insert(f) {
                queue.extend(lower_covers(f).filter(|g| !out.contains(g)));
            }
        }
        Ok(DecreasingSet { m, monomials: out })
    }

    /// `RM(r, m)`: all monomials of degree at most `r`.
    pub fn reed_muller(r: usize, m: usize) -> Result<Self> {
        if m > MAX_VARS || m > 30 {
            return Err(Error::domain(format!("m = {m} too large to list RM(r, m)")));
        }
        if r > m {
            return Err(Error::domain(format!("RM({r}, {m}) needs 0 <= r <= m")));
        }
        let monomials = (0..1u64 << m)
            .filter(|mask| mask.count_ones() as usize <= r)
            .map(Monomial::from_mask)
            .collect();
        Ok(DecreasingSet { m, monomials })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn monomials(&self) -> &BTreeSet<Monomial> {
        &self.monomials
    }

    pub fn contains(&self, f: Monomial) -> bool {
        self.monomials.contains(&f)
    }

    pub fn dimension(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// `r^+`, the largest degree present.
    pub fn r_plus(&self) -> Option<u32> {
        self.monomials.iter().map(|f| f.degree()).max()
    }

    /// `log2 d_min = m - r^+`.
    pub fn d_min_log2(&self) -> Option<u32> {
        self.r_plus().map(|r| self.m as u32 - r)
    }

    /// Monomials of exactly degree `r`.
    pub fn of_degree(&self, r: u32) -> Vec<Monomial> {
        self.monomials.iter().copied().filter(|f| f.degree() == r).collect()
    }

    /// Generator-matrix row order: by degree, then by bitmask.
    pub fn sorted_monomials(&self) -> Vec<Monomial> {
        let mut v: Vec<Monomial> = self.monomials.iter().copied().collect();
        v.sort_by_key(|f| (f.degree(), f.mask()));
        v
    }

    /// Membership of a polynomial in the code: every ANF term is in the set.
    pub fn contains_poly(&self, p: &Poly) -> bool {
        p.m() == self.m && p.terms().all(|t| self.monomials.contains(&t))
    }

    /// One row `ev(f)` per monomial in [`sorted_monomials`](Self::sorted_monomials) order.
    pub fn generator_matrix(&self) -> Result<BitMatrix> {
        if self.m > EVAL_M_CAP {
            return Err(Error::CapExceeded {
                what: "m",
                value: self.m as u64,
                cap: EVAL_M_CAP as u64,
                hint: "generator matrices are only built for evaluable lengths",
            });
        }
        let rows = self
            .sorted_monomials()
            .into_iter()
            .map(|f| Ok(Poly::monomial(f, self.m).evaluate()?.into_bits()))
            .collect::<Result<Vec<_>>>()?;
        Ok(BitMatrix { ncols: 1 << self.m, rows })
    }
}

fn check_fit(m: usize, set: &BTreeSet<Monomial>) -> Result<()> {
    if m > MAX_VARS {
        return Err(Error::domain(format!("m = {m} exceeds {MAX_VARS}")));
    }
    if let Some(f) = set.iter().find(|f| !f.fits(m)) {
        return Err(Error::domain(format!("{f} does not fit m = {m}")));
    }
    Ok(())
}

/// Rows of bits over GF(2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    ncols: usize,
    rows: Vec<BitRow>,
}

impl BitMatrix {
    pub fn from_rows(ncols: usize, rows: Vec<BitRow>) -> Result<Self> {
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::domain("row length differs from column count"));
        }
        Ok(BitMatrix { ncols, rows })
    }

    pub fn rows(&self) -> &[BitRow] {
        &self.rows
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        let mut col = 0;
        while rank < rows.len() && col < self.ncols {
            if let Some(p) = (rank..rows.len()).find(|&i| rows[i].get(col)) {
                rows.swap(rank, p);
                let pivot = rows[rank].clone();
                for (i, row) in rows.iter_mut().enumerate() {
                    if i != rank && row.get(col) {
                        row.xor_assign(&pivot);
                    }
                }
                rank += 1;
            }
            col += 1;
        }
        rank
    }

    pub fn to_hex_rows(&self) -> Vec<String> {
        self.rows.iter().map(BitRow::to_hex).collect()
    }
}

/// JSON code description: `{"rm": [r, m]}` or `{"m": m, "monomials": [...]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum CodeSpec {
    ReedMuller { rm: [usize; 2] },
    Explicit { m: usize, monomials: Vec<String> },
}

impl CodeSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Builds the set. Non-decreasing explicit sets are rejected unless
    /// `auto_close` is set, in which case they are closed.
    pub fn build(&self, auto_close: bool) -> Result<DecreasingSet> {
        match self {
            CodeSpec::ReedMuller { rm: [r, m] } => DecreasingSet::reed_muller(*r, *m),
            CodeSpec::Explicit { m, monomials } => {
                let set = monomials
                    .iter()
                    .map(|s| s.parse::<Monomial>())
                    .collect::<Result<BTreeSet<_>>>()?;
                if auto_close {
                    DecreasingSet::closure(*m, set)
                } else {
                    DecreasingSet::new(*m, set)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(s: &str) -> Monomial {
        s.parse().unwrap()
    }

    fn leq_brute(f: Monomial, g: Monomial) -> bool {
        // Try every divisor of g with the degree of f.
        let gi: Vec<usize> = g.indices().collect();
        let k = f.degree() as usize;
        let fi: Vec<usize> = f.indices().collect();
        (0..1u32 << gi.len())
            .filter(|s| s.count_ones() as usize == k)
            .any(|s| {
                let sub: Vec<usize> = (0..gi.len()).filter(|b| s >> b & 1 == 1).map(|b| gi[b]).collect();
                fi.iter().zip(&sub).all(|(a, b)| a <= b)
            })
    }

    #[test]
    fn order_examples() {
        assert!(leq_decreasing(mono("x0*x1"), mono("x1*x2")));
        assert!(leq_decreasing(mono("x0"), mono("x1*x2")));
        assert!(!leq_decreasing(mono("x2"), mono("x0*x1")));
        assert!(leq_decreasing(Monomial::ONE, mono("x3")));
        assert!(!leq_decreasing(mono("x1*x2"), mono("x2")));
    }

    #[test]
    fn greedy_order_matches_divisor_search() {
        for f in 0..64u64 {
            for g in 0..64u64 {
                let (f, g) = (Monomial::from_mask(f), Monomial::from_mask(g));
                assert_eq!(leq_decreasing(f, g), leq_brute(f, g), "{f} vs {g}");
            }
        }
    }

    #[test]
    fn closure_examples() {
        let c = DecreasingSet::closure(3, [mono("x1*x2")]).unwrap();
        let want: BTreeSet<Monomial> = ["1", "x0", "x1", "x2", "x0*x1", "x0*x2", "x1*x2"]
            .iter()
            .map(|s| mono(s))
            .collect();
        assert_eq!(c.monomials(), &want);
        assert!(DecreasingSet::closure(3, []).unwrap().is_empty());
        let again = DecreasingSet::closure(3, c.monomials().iter().copied()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn closure_equals_order_ideal() {
        // The closure must be exactly {g : g ≼ some generator}.
        for gens in [vec!["x2*x3"], vec!["x1*x3", "x4"], vec!["x0*x2*x4"]] {
            let gens: Vec<Monomial> = gens.iter().map(|s| mono(s)).collect();
            let c = DecreasingSet::closure(5, gens.clone()).unwrap();
            let ideal: BTreeSet<Monomial> = (0..32u64)
                .map(Monomial::from_mask)
                .filter(|g| gens.iter().any(|f| leq_decreasing(*g, *f)))
                .collect();
            assert_eq!(c.monomials(), &ideal);
        }
    }

    #[test]
    fn reed_muller_examples() {
        let rm13 = DecreasingSet::reed_muller(1, 3).unwrap();
        assert_eq!(rm13.dimension(), 4);
        assert_eq!(rm13.d_min_log2(), Some(2));
        let full = DecreasingSet::reed_muller(4, 4).unwrap();
        assert_eq!(full.dimension(), 16);
        assert_eq!(full.d_min_log2(), Some(0));
        let rep = DecreasingSet::reed_muller(0, 5).unwrap();
        assert_eq!(rep.monomials().iter().collect::<Vec<_>>(), vec![&Monomial::ONE]);
        assert_eq!(rep.d_min_log2(), Some(5));
        assert!(DecreasingSet::reed_muller(5, 4).is_err());
        for r in 0..=5 {
            assert!(is_decreasing(DecreasingSet::reed_muller(r, 5).unwrap().monomials()));
        }
    }

    #[test]
    fn generator_matrix_examples() {
        let one = DecreasingSet::reed_muller(0, 2).unwrap().generator_matrix().unwrap();
        assert_eq!(one.rows()[0].to_str01(), "1111");
        let g = DecreasingSet::reed_muller(1, 2).unwrap().generator_matrix().unwrap();
        let rows: Vec<String> = g.rows().iter().map(BitRow::to_str01).collect();
        assert_eq!(rows, vec!["1111", "0101", "0011"]);
        let g = DecreasingSet::reed_muller(2, 4).unwrap().generator_matrix().unwrap();
        assert_eq!(g.rank(), 11);
    }

    #[test]
    fn membership() {
        let rm = DecreasingSet::reed_muller(1, 3).unwrap();
        assert!(rm.contains_poly(&Poly::parse("x0 + x2 + 1", 3).unwrap()));
        assert!(!rm.contains_poly(&Poly::parse("x0*x1 + x2", 3).unwrap()));
    }

    #[test]
    fn new_rejects_non_decreasing() {
        let set: BTreeSet<Monomial> = [Monomial::ONE, mono("x1")].into_iter().collect();
        assert!(matches!(DecreasingSet::new(2, set), Err(Error::Domain(_))));
    }

    #[test]
    fn code_spec_json() {
        let s = CodeSpec::from_json(r#"{"rm": [1, 3]}"#).unwrap();
        assert_eq!(s.build(false).unwrap().dimension(), 4);
        let s = CodeSpec::from_json(r#"{"m": 3, "monomials": ["1", "x0", "x1"]}"#).unwrap();
        assert_eq!(s.build(false).unwrap().dimension(), 3);
        let s = CodeSpec::from_json(r#"{"m": 3, "monomials": ["x1"]}"#).unwrap();
        assert!(s.build(false).is_err());
        assert_eq!(s.build(true).unwrap().dimension(), 3);
    }
}
