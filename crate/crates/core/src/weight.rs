//! Codeword weights from support combinatorics.
//!
//! For `P = h * (f_1 + ... + f_q)` with the head `h` disjoint from every
//! residual monomial `f_i`, the weight is `2^{m-r} * Σ(F)` where
//!
//! ```text
//! Σ(F) = sum over nonempty S of (-2)^{|S|-1} * 2^{a_max - u_S}
//! ```
//!
//! and `u_S` is the degree of the lcm of the selected tails. [`pie_weight`]
//! is the same parity-weighted inclusion–exclusion on arbitrary bit rows.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::eval::BitRow;
use crate::monomial::{Monomial, Poly};

/// Largest number of tails whose subsets are enumerated.
pub const MAX_SUBSET_TAILS: usize = 20;

/// Largest number of rows accepted by [`pie_weight`].
pub const MAX_PIE_ROWS: usize = 24;

/// `wt(sum_{j in J} g_j)` by inclusion–exclusion over the row supports:
/// `sum_{S ⊆ J, S ≠ ∅} (-2)^{|S|-1} |∩_{j∈S} supp(g_j)|`.
///
/// `subset` holds zero-based row indices.
pub fn pie_weight(rows: &[BitRow], subset: &[usize]) -> Result<u64> {
    if subset.is_empty() {
        return Err(Error::domain("empty row subset"));
    }
    if subset.len() > MAX_PIE_ROWS {
        return Err(Error::CapExceeded {
            what: "|J|",
            value: subset.len() as u64,
            cap: MAX_PIE_ROWS as u64,
            hint: "XOR the rows directly",
        });
    }
    let mut seen = 0u64;
    for &j in subset {
        if j >= rows.len() {
            return Err(Error::domain(format!("row index {j} out of range")));
        }
        if seen >> j & 1 == 1 {
            return Err(Error::domain(format!("row index {j} repeated")));
        }
        seen |= 1 << j;
    }
    let n = rows[subset[0]].len();
    if subset.iter().any(|&j| rows[j].len() != n) {
        return Err(Error::domain("rows of different lengths"));
    }

    // Depth-first over subsets, carrying the running intersection.
    fn walk(rows: &[&BitRow], start: usize, acc: &BitRow, size: u32, total: &mut i128) {
        for i in start..rows.len() {
            let mut next = acc.clone();
            next.and_assign(rows[i]);
            let c = next.count_ones() as i128;
            let sign = if size % 2 == 0 { 1 } else { -1 };
            *total += sign * (c << size);
            if c > 0 {
                walk(rows, i + 1, &next, size + 1, total);
            }
        }
    }

    let selected: Vec<&BitRow> = subset.iter().map(|&j| &rows[j]).collect();
    let mut full = BitRow::zeros(n);
    for i in 0..n {
        full.set(i, true);
    }
    let mut total = 0i128;
    walk(&selected, 0, &full, 0, &mut total);
    u64::try_from(total).map_err(|_| Error::Invariant(format!("negative PIE weight {total}")))
}

/// A head monomial and its residual tails, `P = h * (f_1 + ... + f_q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualFamily {
    head: Monomial,
    tails: Vec<Monomial>,
}

impl ResidualFamily {
    pub fn new(head: Monomial, tails: Vec<Monomial>) -> Self {
        ResidualFamily { head, tails }
    }

    /// Treats every term of `q` as a tail.
    pub fn from_kernel(head: Monomial, q: &Poly) -> Self {
        ResidualFamily { head, tails: q.terms().collect() }
    }

    pub fn head(&self) -> Monomial {
        self.head
    }

    pub fn tails(&self) -> &[Monomial] {
        &self.tails
    }

    pub fn q(&self) -> usize {
        self.tails.len()
    }

    pub fn a_max(&self) -> u32 {
        self.tails.iter().map(|f| f.degree()).max().unwrap_or(0)
    }

    /// Ambient degree `r = deg(h) + a_max`.
    pub fn r(&self) -> u32 {
        self.head.degree() + self.a_max()
    }

    /// `U`: the largest union degree, attained by the full tail set.
    pub fn max_union_degree(&self) -> u32 {
        self.tails.iter().fold(Monomial::ONE, |acc, f| acc.times(*f)).degree()
    }

    /// `u_S = deg(lcm{f_i : i in S})` for zero-based indices.
    pub fn union_degree(&self, subset: &[usize]) -> Result<u32> {
        if subset.is_empty() {
            return Err(Error::domain("empty tail subset"));
        }
        let mut l = Monomial::ONE;
        for &i in subset {
            let f = self
                .tails
                .get(i)
                .ok_or_else(|| Error::domain(format!("tail index {i} out of range")))?;
            l = l.times(*f);
        }
        Ok(l.degree())
    }

    /// Every nonempty subset as `(|S|, u_S)`, as signed counts grouped by
    /// `e_S = U - u_S + |S| - 1`.
    fn signed_exponent_counts(&self) -> Result<BTreeMap<u32, i64>> {
        let q = self.tails.len();
        if q == 0 {
            return Err(Error::domain("no tails; the zero polynomial has weight 0"));
        }
        if q > MAX_SUBSET_TAILS {
            return Err(Error::CapExceeded {
                what: "q",
                value: q as u64,
                cap: MAX_SUBSET_TAILS as u64,
                hint: "subset enumeration is refused rather than approximated",
            });
        }
        let u_max = self.max_union_degree();
        let mut counts: BTreeMap<u32, i64> = BTreeMap::new();
        fn walk(
            tails: &[Monomial],
            start: usize,
            acc: u64,
            size: u32,
            u_max: u32,
            counts: &mut BTreeMap<u32, i64>,
        ) {
            for i in start..tails.len() {
                let l = acc | tails[i].mask();
                let u = l.count_ones();
                let e = u_max - u + size;
                *counts.entry(e).or_insert(0) += if size % 2 == 0 { 1 } else { -1 };
                walk(tails, i + 1, l, size + 1, u_max, counts);
            }
        }
        walk(&self.tails, 0, 0, 0, u_max, &mut counts);
        Ok(counts)
    }

    /// `N = 2^{U - a_max} Σ(F)` as an integer, summed term by term.
    fn scaled_numerator(&self) -> Result<BigInt> {
        let counts = self.signed_exponent_counts()?;
        let mut n = BigInt::zero();
        for (e, c) in counts {
            n += BigInt::from(c) << e;
        }
        Ok(n)
    }

    /// The normalized weight `Σ(F)` as an exact dyadic rational.
    pub fn sigma(&self) -> Result<Dyadic> {
        let n = self.scaled_numerator()?;
        let k = self.max_union_degree() - self.a_max();
        Ok(Dyadic::new(n, k as u64))
    }

    /// The grouped coefficients `c_l` of `Σ(F) = sum_l c_l / 2^l`, where a
    /// subset contributes `(-1)^{|S|-1}` at `l = u_S - a_max - |S| + 1`.
    /// Zero coefficients are dropped.
    pub fn dyadic_coefficients(&self) -> Result<BTreeMap<i64, i64>> {
        let counts = self.signed_exponent_counts()?;
        let k = (self.max_union_degree() - self.a_max()) as i64;
        Ok(counts
            .into_iter()
            .filter(|&(_, c)| c != 0)
            .map(|(e, c)| (k - e as i64, c))
            .collect())
    }

    /// Coefficients `c_l` that are even. Observed to be empty for small
    /// families but not guaranteed.
    pub fn even_coefficients(&self) -> Result<Vec<(i64, i64)>> {
        Ok(self
            .dyadic_coefficients()?
            .into_iter()
            .filter(|&(_, c)| c % 2 == 0)
            .collect())
    }

    /// `wt(h * F) = 2^{m-r} Σ(F)`. The head must be disjoint from every tail.
    pub fn general_weight(&self, m: usize) -> Result<BigUint> {
        for f in &self.tails {
            if !f.fits(m) || !self.head.fits(m) {
                return Err(Error::domain(format!("monomial outside m = {m}")));
            }
            if !self.head.is_disjoint(*f) {
                return Err(Error::domain(format!("head {} shares a variable with tail {f}", self.head)));
            }
        }
        let r = self.r() as usize;
        if r > m {
            return Err(Error::domain(format!("ambient degree {r} exceeds m = {m}")));
        }
        let w = self.sigma()?.mul_pow2((m - r) as i64);
        w.to_biguint().ok_or_else(|| {
            Error::Invariant(format!("weight {w} of {self} is not a nonnegative integer"))
        })
    }

    /// Builds `h * (f_1 + ... + f_q)` in an `m`-variable ring.
    pub fn polynomial(&self, m: usize) -> Result<Poly> {
        Ok(Poly::from_terms(m, self.tails.iter().copied())?.mul_monomial(self.head))
    }

    /// Dyadic digits of `Σ(F)`, denominator exponent `k = U - a_max`.
    pub fn dyadic_weight(&self) -> Result<DyadicWeight> {
        let sigma = self.sigma()?;
        dyadic_decompose(&sigma, self)
    }
}

impl fmt::Display for ResidualFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * (", self.head)?;
        for (i, t) in self.tails.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

/// `Σ = N / 2^k` with the binary digits of `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicWeight {
    pub n: BigUint,
    pub k: u64,
    /// `(j, b_j)` from `j_min` to `j_max`; empty when `N = 0`.
    pub digits: Vec<(u64, u8)>,
}

impl DyadicWeight {
    pub fn from_parts(n: BigUint, k: u64) -> Self {
        let digits = if n.is_zero() {
            Vec::new()
        } else {
            let lo = n.trailing_zeros().unwrap_or(0);
            let hi = n.bits() - 1;
            (lo..=hi).map(|j| (j, n.bit(j) as u8)).collect()
        };
        DyadicWeight { n, k, digits }
    }

    /// `sum_j b_j 2^{j-k}` recomputed from the digits alone.
    pub fn reconstruct(&self) -> Dyadic {
        self.digits
            .iter()
            .filter(|&&(_, b)| b == 1)
            .fold(Dyadic::zero(), |acc, &(j, _)| acc + Dyadic::pow2(j as i64 - self.k as i64))
    }

    /// The same value with `N` odd (or zero) and `k` minimal.
    pub fn reduced(&self) -> DyadicWeight {
        let tz = self.n.trailing_zeros().unwrap_or(0).min(self.k);
        DyadicWeight::from_parts(&self.n >> tz, self.k - tz)
    }

    /// `N / 2^k`.
    pub fn value(&self) -> Dyadic {
        Dyadic::new(BigInt::from(self.n.clone()), self.k)
    }

    /// The nonzero dyadic terms `2^{j-k}`, largest first.
    pub fn terms(&self) -> Vec<Dyadic> {
        self.digits
            .iter()
            .rev()
            .filter(|&&(_, b)| b == 1)
            .map(|&(j, _)| Dyadic::pow2(j as i64 - self.k as i64))
            .collect()
    }
}

impl fmt::Display for DyadicWeight {
    /// `2 + 1/4 + 1/16` style.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        // Integer part collapses into one number.
        let (int, frac): (Vec<_>, Vec<_>) = terms.into_iter().partition(|t| t.is_integer());
        let mut parts: Vec<String> = Vec::new();
        if !int.is_empty() {
            parts.push(int.iter().fold(Dyadic::zero(), |a, t| a + t.clone()).to_string());
        }
        parts.extend(frac.iter().map(|t| t.to_string()));
        f.write_str(&parts.join(" + "))
    }
}

impl Serialize for DyadicWeight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DyadicWeight", 3)?;
        st.serialize_field("N", &self.n.to_string())?;
        st.serialize_field("k", &self.k)?;
        let digits: Vec<[u64; 2]> = self.digits.iter().map(|&(j, b)| [j, b as u64]).collect();
        st.serialize_field("digits", &digits)?;
        st.end()
    }
}

/// Decomposition with `k = U - a_max`, `N = 2^k Σ`. `N` must be a
/// nonnegative integer; anything else means `sigma` did not come from
/// `family`.
pub fn dyadic_decompose(sigma: &Dyadic, family: &ResidualFamily) -> Result<DyadicWeight> {
    let k = (family.max_union_degree() - family.a_max()) as u64;
    let n = sigma
        .scaled_integer(k)
        .ok_or_else(|| Error::Invariant(format!("2^{k} * {sigma} is not an integer")))?;
    if n.is_negative() {
        return Err(Error::Invariant(format!("negative normalized weight {sigma}")));
    }
    Ok(DyadicWeight::from_parts(n.to_biguint().unwrap(), k))
}

/// Decomposes any nonnegative dyadic value with its own reduced denominator.
pub fn dyadic_of(sigma: &Dyadic) -> Result<DyadicWeight> {
    let n = sigma
        .numer()
        .to_biguint()
        .ok_or_else(|| Error::domain(format!("negative value {sigma}")))?;
    Ok(DyadicWeight::from_parts(n, sigma.shift()))
}

impl From<&DyadicWeight> for Dyadic {
    fn from(w: &DyadicWeight) -> Self {
        w.value()
    }
}
