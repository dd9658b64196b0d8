//! The lower-triangular affine group `LTA(m, 2)` and its action on
//! polynomials.
//!
//! An element `(B, ε)` substitutes `x_i -> x_i + sum_{j<i} b_ij x_j + ε_i`.
//! Orbits, stabilizers, Minkowski sums of orbits and freedom dimensions are
//! computed by explicit enumeration of the group, which is only feasible for
//! small `m` (`|LTA(5,2)| = 2^15`, `|LTA(6,2)| = 2^21`). The enumeration
//! works on 64-bit truth tables, where substitution is a handful of word
//! operations per term.

use std::collections::HashSet;

use num_bigint::BigUint;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::monomial::{Monomial, Poly};

/// Default largest `m` for explicit group enumeration.
pub const ORBIT_M_DEFAULT: usize = 5;
/// Hard limit for explicit group enumeration.
pub const ORBIT_M_MAX: usize = 6;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LtaElement {
    m: usize,
    /// `rows[i]` holds the strictly-lower entries `b_ij`, `j < i`.
    rows: Vec<u64>,
    eps: u64,
}

/// `log2 |LTA(m, 2)| = m(m-1)/2 + m`.
pub fn group_order_log2(m: usize) -> u32 {
    (m * (m - 1) / 2 + m) as u32
}

impl LtaElement {
    pub fn identity(m: usize) -> Self {
        LtaElement { m, rows: vec![0; m], eps: 0 }
    }

    pub fn new(m: usize, rows: Vec<u64>, eps: u64) -> Result<Self> {
        if rows.len() != m || m > 64 {
            return Err(Error::domain(format!("expected {m} rows, got {}", rows.len())));
        }
        for (i, &r) in rows.iter().enumerate() {
            if r >> i != 0 {
                return Err(Error::domain(format!("row {i} has entries on or above the diagonal")));
            }
        }
        if m < 64 && eps >> m != 0 {
            return Err(Error::domain("translation wider than m"));
        }
        Ok(LtaElement { m, rows, eps })
    }

    /// The `idx`-th group element: row `i` consumes `i` bits, then `ε` takes `m`.
    pub fn from_index(m: usize, mut idx: u64) -> Self {
        let mut rows = vec![0u64; m];
        for (i, row) in rows.iter_mut().enumerate().skip(1) {
            *row = idx & ((1 << i) - 1);
            idx >>= i;
        }
        let eps = idx & low_bits(m);
        LtaElement { m, rows, eps }
    }

    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let rows = (0..m).map(|i| rng.gen::<u64>() & low_bits(i)).collect();
        LtaElement { m, rows, eps: rng.gen::<u64>() & low_bits(m) }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn translation(&self) -> u64 {
        self.eps
    }

    fn full_row(&self, i: usize) -> u64 {
        self.rows[i] | 1 << i
    }

    /// `B x + ε` for a point `x` (bit `j` is `x_j`).
    pub fn map_point(&self, x: u64) -> u64 {
        let mut y = self.eps;
        for i in 0..self.m {
            y ^= (((self.full_row(i) & x).count_ones() & 1) as u64) << i;
        }
        y
    }

    /// The element `c` with `c · f = self · (other · f)` for every `f`.
    pub fn compose(&self, other: &LtaElement) -> LtaElement {
        assert_eq!(self.m, other.m);
        // self·(other·f)(x) = f(B2 (B1 x + e1) + e2).
        let mut rows = vec![0u64; self.m];
        for (i, row) in rows.iter_mut().enumerate() {
            let mut acc = 0u64;
            for k in Monomial::from_mask(other.full_row(i)).indices() {
                acc ^= self.full_row(k);
            }
            *row = acc & !(1 << i);
        }
        let eps = other.map_point(self.eps);
        LtaElement { m: self.m, rows, eps }
    }

    pub fn inverse(&self) -> LtaElement {
        // Solve B y = e_i row by row; B is unit lower triangular.
        let mut inv = vec![0u64; self.m];
        for i in 0..self.m {
            let mut acc = 1u64 << i;
            for j in Monomial::from_mask(self.rows[i]).indices() {
                acc ^= inv[j];
            }
            inv[i] = acc;
        }
        let mut eps = 0u64;
        for (i, &r) in inv.iter().enumerate() {
            eps |= (((r & self.eps).count_ones() & 1) as u64) << i;
        }
        let rows = inv.iter().enumerate().map(|(i, &r)| r & !(1 << i)).collect();
        LtaElement { m: self.m, rows, eps }
    }

    /// `y_i = x_i + sum_{j<i} b_ij x_j + ε_i` as a list of monomials.
    fn var_image_terms(&self, i: usize) -> Vec<Monomial> {
        let mut t: Vec<Monomial> = Monomial::from_mask(self.full_row(i))
            .indices()
            .map(Monomial::var)
            .collect();
        if self.eps >> i & 1 == 1 {
            t.push(Monomial::ONE);
        }
        t
    }

    /// Substitutes the affine map into `p` and expands in the quotient ring.
    pub fn apply(&self, p: &Poly) -> Poly {
        assert_eq!(self.m, p.m(), "group and polynomial ambient sizes differ");
        let images: Vec<Vec<Monomial>> = (0..self.m).map(|i| self.var_image_terms(i)).collect();
        let mut out: HashSet<Monomial> = HashSet::new();
        for t in p.terms() {
            let mut cur: HashSet<Monomial> = HashSet::from([Monomial::ONE]);
            for i in t.indices() {
                let mut next: HashSet<Monomial> = HashSet::new();
                for a in &cur {
                    for b in &images[i] {
                        let c = a.times(*b);
                        if !next.remove(&c) {
                            next.insert(c);
                        }
                    }
                }
                cur = next;
            }
            for c in cur {
                if !out.remove(&c) {
                    out.insert(c);
                }
            }
        }
        Poly::from_terms(p.m(), out).expect("image stays in the ring")
    }

    /// Truth tables of `y_0, ..., y_{m-1}` for `m <= 6`.
    #[cfg(test)]
    pub(crate) fn var_tts(&self) -> [u64; 6] {
        let mut y = [0u64; 6];
        for (i, yi) in y.iter_mut().enumerate().take(self.m) {
            *yi = tt::var(i, self.m);
            for j in Monomial::from_mask(self.rows[i]).indices() {
                *yi ^= tt::var(j, self.m);
            }
            if self.eps >> i & 1 == 1 {
                *yi ^= tt::full(self.m);
            }
        }
        y
    }
}

fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        !0
    } else {
        (1u64 << n) - 1
    }
}

/// 64-bit truth tables for `m <= 6`; bit `t` is the value at point `t`.
pub(crate) mod tt {
    use crate::monomial::{Monomial, Poly};

    const VAR_WORDS: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];

    pub fn full(m: usize) -> u64 {
        if m >= 6 {
            !0
        } else {
            (1u64 << (1 << m)) - 1
        }
    }

    pub fn var(i: usize, m: usize) -> u64 {
        VAR_WORDS[i] & full(m)
    }

    pub fn of_poly(p: &Poly) -> u64 {
        let m = p.m();
        let mut out = 0;
        for t in p.terms() {
            out ^= t.indices().fold(full(m), |acc, i| acc & var(i, m));
        }
        out
    }

    /// Evaluates term masks under substituted variable tables `y`.
    #[inline]
    pub fn substitute(terms: &[u64], y: &[u64; 6], m: usize) -> u64 {
        let mut out = 0;
        for &t in terms {
            let mut acc = full(m);
            let mut mask = t;
            while mask != 0 {
                acc &= y[mask.trailing_zeros() as usize];
                mask &= mask - 1;
            }
            out ^= acc;
        }
        out
    }

    /// Möbius transform back to algebraic normal form.
    pub fn to_poly(table: u64, m: usize) -> Poly {
        let mut a = table;
        for (i, w) in VAR_WORDS.iter().enumerate().take(m) {
            a ^= (a << (1 << i)) & w;
        }
        let masks = (0..1u64 << m).filter(|&t| a >> t & 1 == 1);
        Poly::from_terms(m, masks.map(Monomial::from_mask)).expect("fits")
    }
}

/// Truth tables of `y_i` for the `idx`-th element, without allocating.
#[inline]
fn var_tts_of_index(m: usize, mut idx: u64) -> [u64; 6] {
    let mut y = [0u64; 6];
    let mut rows = [0u64; 6];
    for (i, row) in rows.iter_mut().enumerate().take(m).skip(1) {
        *row = idx & ((1 << i) - 1);
        idx >>= i;
    }
    for i in 0..m {
        let mut yi = tt::var(i, m);
        let mut r = rows[i];
        while r != 0 {
            yi ^= tt::var(r.trailing_zeros() as usize, m);
            r &= r - 1;
        }
        if idx >> i & 1 == 1 {
            yi ^= tt::full(m);
        }
        y[i] = yi;
    }
    y
}

fn check_orbit_m(m: usize, max_m: usize) -> Result<()> {
    let cap = max_m.min(ORBIT_M_MAX);
    if m > cap {
        return Err(Error::CapExceeded {
            what: "m",
            value: m as u64,
            cap: cap as u64,
            hint: "explicit LTA enumeration is refused; use the exponent formulas",
        });
    }
    if m == 0 {
        return Err(Error::domain("m must be positive"));
    }
    Ok(())
}

/// `|λ_f| = sum_t (i_t - t)` over the sorted indices of `f`.
pub fn partition_weight(f: Monomial) -> u32 {
    f.indices().enumerate().map(|(t, i)| (i - t) as u32).sum()
}

/// `|λ_f(g)|`: for each `j` in `ind(g)` ascending, `j` minus the number of
/// smaller indices already taken by `ind(f)` or by earlier indices of `g`.
///
/// `g` must be disjoint from `f` or contained in it; the contained case is
/// what makes `|λ_f(f)| = |λ_f|`.
pub fn constrained_partition_weight(f: Monomial, g: Monomial) -> Result<u32> {
    if !f.is_disjoint(g) && !g.divides(f) {
        return Err(Error::domain(format!("{g} partially overlaps {f}")));
    }
    let mut occupied = f.mask();
    let mut total = 0u32;
    for j in g.indices() {
        let below = (occupied & ((1u64 << j) - 1)).count_ones();
        total += j as u32 - below;
        occupied |= 1 << j;
    }
    Ok(total)
}

/// `deg f + |λ_f|`, the log-size of the LTA orbit of a monomial.
pub fn orbit_size_exponent(f: Monomial) -> u32 {
    f.degree() + partition_weight(f)
}

/// An explicitly enumerated orbit.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitSummary {
    pub seed: Poly,
    #[serde(serialize_with = "crate::ser::biguint_str")]
    pub size: BigUint,
    pub head_fix: Option<Monomial>,
    pub elements: Option<Vec<Poly>>,
}

/// The explicit group, or a head stabilizer inside it, for `m <= 6`.
#[derive(Clone, Debug)]
pub struct GroupSlice {
    m: usize,
    /// Group indices of the members.
    members: Vec<u64>,
}

impl GroupSlice {
    pub fn full(m: usize, max_m: usize) -> Result<Self> {
        check_orbit_m(m, max_m)?;
        Ok(GroupSlice { m, members: (0..1u64 << group_order_log2(m)).collect() })
    }

    /// `G_h = {γ : γ·h = h}`, found by filtering the group. The size is
    /// checked against `|LTA| / 2^{deg h + |λ_h|}`.
    pub fn stabilizer(h: Monomial, m: usize, max_m: usize) -> Result<Self> {
        check_orbit_m(m, max_m)?;
        if !h.fits(m) {
            return Err(Error::domain(format!("head {h} does not fit m = {m}")));
        }
        if h.is_one() {
            return Self::full(m, max_m);
        }
        let target = tt::of_poly(&Poly::monomial(h, m));
        let terms = [h.mask()];
        let order = 1u64 << group_order_log2(m);
        let members: Vec<u64> = (0..order)
            .into_par_iter()
            .filter(|&idx| tt::substitute(&terms, &var_tts_of_index(m, idx), m) == target)
            .collect();
        let expected = order >> orbit_size_exponent(h);
        if members.len() as u64 != expected {
            return Err(Error::Invariant(format!(
                "stabilizer of {h} has {} elements, expected {expected}",
                members.len()
            )));
        }
        Ok(GroupSlice { m, members })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn indices(&self) -> impl ParallelIterator<Item = u64> + '_ {
        self.members.par_iter().copied()
    }

    pub fn elements(&self) -> Vec<LtaElement> {
        self.members.iter().map(|&i| LtaElement::from_index(self.m, i)).collect()
    }

    /// Truth tables of `{γ·p}`, optionally multiplied by a fixed `h`.
    pub(crate) fn orbit_tables(&self, p: &Poly, times: Option<Monomial>) -> HashSet<u64> {
        let m = self.m;
        let terms = p.canonical_masks();
        let factor = times.map_or(tt::full(m), |h| tt::of_poly(&Poly::monomial(h, m)));
        self.indices()
            .fold(HashSet::new, |mut set, idx| {
                set.insert(factor & tt::substitute(&terms, &var_tts_of_index(m, idx), m));
                set
            })
            .reduce(HashSet::new, |mut a, b| {
                a.extend(b);
                a
            })
    }

    /// Number of distinct tuples `(γ·p_1, ..., γ·p_n)`, each optionally
    /// multiplied by `h`.
    pub(crate) fn tuple_orbit_size(&self, ps: &[Poly], times: Option<Monomial>) -> u64 {
        let m = self.m;
        let terms: Vec<Vec<u64>> = ps.iter().map(|p| p.canonical_masks()).collect();
        let factor = times.map_or(tt::full(m), |h| tt::of_poly(&Poly::monomial(h, m)));
        let set = self
            .indices()
            .fold(HashSet::new, |mut set: HashSet<Vec<u64>>, idx| {
                let y = var_tts_of_index(m, idx);
                set.insert(terms.iter().map(|t| factor & tt::substitute(t, &y, m)).collect());
                set
            })
            .reduce(HashSet::new, |mut a, b| {
                a.extend(b);
                a
            });
        set.len() as u64
    }
}

/// Explicit orbit of `p` under `LTA(m,2)` or under the stabilizer of `head_fix`.
pub fn orbit(p: &Poly, head_fix: Option<Monomial>, max_m: usize) -> Result<OrbitSummary> {
    let group = match head_fix {
        Some(h) => GroupSlice::stabilizer(h, p.m(), max_m)?,
        None => GroupSlice::full(p.m(), max_m)?,
    };
    let tables = group.orbit_tables(p, None);
    let mut elements: Vec<Poly> = tables.into_iter().map(|t| tt::to_poly(t, p.m())).collect();
    elements.sort();
    Ok(OrbitSummary {
        seed: p.clone(),
        size: BigUint::from(elements.len()),
        head_fix,
        elements: Some(elements),
    })
}

/// Size of the explicit orbit, without materializing polynomials.
pub fn orbit_size(p: &Poly, head_fix: Option<Monomial>, max_m: usize) -> Result<u64> {
    let group = match head_fix {
        Some(h) => GroupSlice::stabilizer(h, p.m(), max_m)?,
        None => GroupSlice::full(p.m(), max_m)?,
    };
    Ok(group.orbit_tables(p, None).len() as u64)
}

/// Raw data of a Minkowski sum of two head-fixed tail orbits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollisionReport {
    pub orbit_sizes: [u64; 2],
    pub sum_size: u64,
    /// `log2(|O_i| |O_j| / |O_i + O_j|)` when that quotient is a power of two.
    pub alpha: Option<u32>,
}

/// Tail orbits `O = {h · γ(u) : γ ∈ G_h}` and their Minkowski sum.
pub fn minkowski_collision(
    u_i: Monomial,
    u_j: Monomial,
    h: Monomial,
    m: usize,
    max_m: usize,
) -> Result<CollisionReport> {
    let g = GroupSlice::stabilizer(h, m, max_m)?;
    minkowski_in(&g, u_i, u_j, h)
}

pub(crate) fn minkowski_in(g: &GroupSlice, u_i: Monomial, u_j: Monomial, h: Monomial) -> Result<CollisionReport> {
    let m = g.m();
    for u in [u_i, u_j] {
        if !u.fits(m) || !u.is_disjoint(h) {
            return Err(Error::domain(format!("tail {u} must fit m = {m} and avoid head {h}")));
        }
    }
    let head = (!h.is_one()).then_some(h);
    let oi = g.orbit_tables(&Poly::monomial(u_i, m), head);
    let oj = g.orbit_tables(&Poly::monomial(u_j, m), head);
    let oj_vec: Vec<u64> = oj.iter().copied().collect();
    let sum: HashSet<u64> = oi
        .par_iter()
        .fold(HashSet::new, |mut s, &a| {
            s.extend(oj_vec.iter().map(|&b| a ^ b));
            s
        })
        .reduce(HashSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    let product = oi.len() as u64 * oj.len() as u64;
    let sum_size = sum.len() as u64;
    let alpha = (product % sum_size == 0 && (product / sum_size).is_power_of_two())
        .then(|| (product / sum_size).trailing_zeros());
    Ok(CollisionReport { orbit_sizes: [oi.len() as u64, oj.len() as u64], sum_size, alpha })
}

/// Pairwise collision exponent `α_{u_i,u_j}`. A quotient that is not a power
/// of two is returned as an invariant violation carrying the sizes.
pub fn collision_exponent(u_i: Monomial, u_j: Monomial, h: Monomial, m: usize, max_m: usize) -> Result<u32> {
    let rep = minkowski_collision(u_i, u_j, h, m, max_m)?;
    rep.alpha.ok_or_else(|| {
        Error::Invariant(format!(
            "|O({u_i})|·|O({u_j})| / |O+O| = {}·{}/{} is not a power of two (head {h})",
            rep.orbit_sizes[0], rep.orbit_sizes[1], rep.sum_size
        ))
    })
}

/// Kernel-side freedom of a template `h·Q` under the head stabilizer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreedomReport {
    /// `log2` of the number of distinct tail tuples `(h·γ(u_1), ..., h·γ(u_ν))`.
    pub beta: u32,
    /// `deg(u_j) + |λ_{u_j}|` per tail.
    pub tail_exponents: Vec<u32>,
    /// `β - Σ_j (deg(u_j) + |λ_{u_j}|)`; may be negative under a head.
    pub beta_mix: i64,
}

/// `β_Q` by explicit enumeration: the head stabilizer acts on the tuple of
/// head-multiplied tails, and `2^β` is the size of that orbit.
pub fn kernel_freedom_dimension(q: &Poly, h: Monomial, max_m: usize) -> Result<FreedomReport> {
    let m = q.m();
    let g = GroupSlice::stabilizer(h, m, max_m)?;
    kernel_freedom_in(&g, q, h)
}

fn kernel_freedom_in(g: &GroupSlice, q: &Poly, h: Monomial) -> Result<FreedomReport> {
    let m = q.m();
    if q.is_zero() {
        return Err(Error::domain("empty kernel"));
    }
    if q.terms().any(|u| !u.is_disjoint(h)) {
        return Err(Error::domain(format!("kernel {q} shares variables with head {h}")));
    }
    let tails: Vec<Poly> = q.terms().map(|u| Poly::monomial(u, m)).collect();
    let head = (!h.is_one()).then_some(h);
    let size = g.tuple_orbit_size(&tails, head);
    if !size.is_power_of_two() {
        return Err(Error::Invariant(format!("tuple orbit of {q} has size {size}")));
    }
    let beta = size.trailing_zeros();
    let tail_exponents: Vec<u32> = q.terms().map(orbit_size_exponent).collect();
    let beta_mix = beta as i64 - tail_exponents.iter().map(|&e| e as i64).sum::<i64>();
    Ok(FreedomReport { beta, tail_exponents, beta_mix })
}

/// Everything the boxed orbit-size formula needs for one `(h, Q)`, with the
/// explicit orbit sizes it is meant to predict.
#[derive(Clone, Debug, Serialize)]
pub struct MasterOrbitReport {
    pub head: Monomial,
    pub kernel: Poly,
    pub head_exponent: u32,
    pub freedom: FreedomReport,
    /// Pairwise collisions over the kernel terms, in `(i, j)` order.
    pub collisions: Vec<CollisionReport>,
    /// `Σ α`, `None` if some quotient was not a power of two.
    pub alpha: Option<u32>,
    /// `deg(h) + |λ_h| + β - α`.
    pub exponent: Option<i64>,
    /// `log2 |G_h · hQ|`.
    pub stabilizer_orbit_log2: f64,
    pub stabilizer_orbit_size: u64,
    /// `|LTA(m,2) · hQ|`.
    pub full_orbit_size: u64,
}

impl MasterOrbitReport {
    pub fn matches_stabilizer_orbit(&self) -> bool {
        self.exponent
            .is_some_and(|e| e >= 0 && self.stabilizer_orbit_size == 1u64 << e)
    }

    pub fn matches_full_orbit(&self) -> bool {
        self.exponent.is_some_and(|e| e >= 0 && self.full_orbit_size == 1u64 << e)
    }
}

/// Evaluates `deg(h) + |λ_h| + β_Q - α_Q` and the orbits it describes.
pub fn master_orbit(h: Monomial, q: &Poly, max_m: usize) -> Result<MasterOrbitReport> {
    let m = q.m();
    let g = GroupSlice::stabilizer(h, m, max_m)?;
    let freedom = kernel_freedom_in(&g, q, h)?;
    let terms: Vec<Monomial> = q.terms().collect();
    let mut collisions = Vec::new();
    for a in 0..terms.len() {
        for b in a + 1..terms.len() {
            collisions.push(minkowski_in(&g, terms[a], terms[b], h)?);
        }
    }
    let alpha = collisions.iter().map(|c| c.alpha).sum::<Option<u32>>();
    let head_exponent = orbit_size_exponent(h);
    let exponent = alpha.map(|a| head_exponent as i64 + freedom.beta as i64 - a as i64);
    let p = q.mul_monomial(h);
    let stab = g.orbit_tables(&p, None).len() as u64;
    let full = GroupSlice::full(m, max_m)?.orbit_tables(&p, None).len() as u64;
    Ok(MasterOrbitReport {
        head: h,
        kernel: q.clone(),
        head_exponent,
        freedom,
        collisions,
        alpha,
        exponent,
        stabilizer_orbit_log2: (stab as f64).log2(),
        stabilizer_orbit_size: stab,
        full_orbit_size: full,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mono(s: &str) -> Monomial {
        s.parse().unwrap()
    }

    #[test]
    fn identity_fixes() {
        let p = Poly::parse("x0*x1 + x2 + 1", 3).unwrap();
        assert_eq!(LtaElement::identity(3).apply(&p), p);
    }

    #[test]
    fn hand_expansion() {
        // x1 -> x1 + x0: x0*x1 -> x0*(x1 + x0) = x0*x1 + x0.
        let g = LtaElement::new(2, vec![0, 0b1], 0).unwrap();
        let p = Poly::parse("x0*x1", 2).unwrap();
        assert_eq!(g.apply(&p), Poly::parse("x0*x1 + x0", 2).unwrap());
    }

    #[test]
    fn new_rejects_upper_entries() {
        assert!(LtaElement::new(2, vec![0b10, 0], 0).is_err());
        assert!(LtaElement::new(2, vec![0, 0b10], 0).is_err());
        assert!(LtaElement::new(2, vec![0, 0], 0b100).is_err());
    }

    #[test]
    fn partition_weights() {
        assert_eq!(partition_weight(mono("x0*x1")), 0);
        assert_eq!(partition_weight(mono("x1*x3")), 3);
        assert_eq!(partition_weight(Monomial::ONE), 0);
    }

    #[test]
    fn constrained_partition_weights() {
        assert_eq!(constrained_partition_weight(mono("x0*x1"), mono("x2")).unwrap(), 0);
        assert_eq!(constrained_partition_weight(mono("x0"), mono("x2*x4")).unwrap(), 3);
        for f in ["x0*x1", "x1*x3", "x0*x2*x5", "x4"] {
            let f = mono(f);
            assert_eq!(constrained_partition_weight(f, f).unwrap(), partition_weight(f));
            assert_eq!(constrained_partition_weight(Monomial::ONE, f).unwrap(), partition_weight(f));
        }
        assert!(constrained_partition_weight(mono("x0*x1"), mono("x1*x2")).is_err());
    }

    #[test]
    fn orbit_examples() {
        let o = orbit(&Poly::parse("x0*x1", 3).unwrap(), None, 5).unwrap();
        assert_eq!(o.size, BigUint::from(4u32));
        let o = orbit(&Poly::parse("x1*x3", 4).unwrap(), None, 5).unwrap();
        assert_eq!(o.size, BigUint::from(32u32));
        let o = orbit(&Poly::one(4), None, 5).unwrap();
        assert_eq!(o.elements.unwrap(), vec![Poly::one(4)]);
        assert_eq!(orbit_size_exponent(mono("x2")), 3);
        assert_eq!(orbit_size(&Poly::parse("x2", 4).unwrap(), None, 5).unwrap(), 8);
    }

    #[test]
    fn orbit_cap() {
        let p = Poly::parse("x0", 6).unwrap();
        assert!(matches!(orbit(&p, None, 5), Err(Error::CapExceeded { .. })));
        let p = Poly::parse("x0", 7).unwrap();
        assert!(matches!(orbit(&p, None, 7), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn truth_table_path_matches_symbolic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let m = rng.gen_range(1..=6);
            let g = LtaElement::random(m, &mut rng);
            let masks: Vec<u64> = (0..rng.gen_range(0..6)).map(|_| rng.gen::<u64>() & low_bits(m)).collect();
            let p = Poly::from_masks(m, masks).unwrap();
            let sym = g.apply(&p);
            let fast = tt::to_poly(tt::substitute(&p.canonical_masks(), &g.var_tts(), m), m);
            assert_eq!(sym, fast, "{g:?} on {p}");
            assert_eq!(tt::to_poly(tt::of_poly(&p), m), p);
        }
    }

    #[test]
    fn index_enumeration_covers_group() {
        let m = 3;
        let n = 1u64 << group_order_log2(m);
        let set: HashSet<LtaElement> = (0..n).map(|i| LtaElement::from_index(m, i)).collect();
        assert_eq!(set.len() as u64, n);
        for i in 0..n {
            let g = LtaElement::from_index(m, i);
            assert_eq!(g.var_tts(), var_tts_of_index(m, i));
        }
    }

    #[test]
    fn stabilizer_size_matches_analytic_count() {
        for h in ["x0", "x2", "x1*x3", "x0*x1*x2", "x2*x4"] {
            let h = mono(h);
            let g = GroupSlice::stabilizer(h, 5, 5).unwrap();
            assert_eq!(g.len(), (1u64 << 15) >> orbit_size_exponent(h));
        }
    }

    #[test]
    fn single_tail_freedom() {
        for u in ["x1*x3", "x0*x2", "x3"] {
            let q = Poly::parse(u, 5).unwrap();
            let f = kernel_freedom_dimension(&q, Monomial::ONE, 5).unwrap();
            assert_eq!(f.beta, orbit_size_exponent(mono(u)));
            assert_eq!(f.beta_mix, 0);
        }
    }
}
