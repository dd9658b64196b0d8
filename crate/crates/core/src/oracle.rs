//! Exhaustive ground truth for small codes.
//!
//! Codewords are walked in Gray-code order over the message space so each
//! step costs one row XOR and one popcount. The message space is cut into
//! contiguous segments that run in parallel.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::code::{BitMatrix, DecreasingSet};
use crate::error::{Error, Result};
use crate::lta::{tt, GroupSlice};
use crate::monomial::{Monomial, Poly};
use crate::templates::{self, Shared3Variant, TemplateInstance, TemplateKind};

/// Default cap on the code dimension (2^24 codewords).
pub const DIM_CAP_DEFAULT: usize = 24;
/// Hard cap regardless of configuration; counts stay within `u64`.
pub const DIM_CAP_MAX: usize = 40;

const SEGMENTS_LOG2: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightDistribution {
    pub m: usize,
    pub dimension: usize,
    pub entries: BTreeMap<u64, u64>,
}

impl WeightDistribution {
    pub fn count(&self, w: u64) -> u64 {
        self.entries.get(&w).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u128 {
        self.entries.values().map(|&c| c as u128).sum()
    }

    pub fn min_nonzero_weight(&self) -> Option<u64> {
        self.entries.keys().copied().find(|&w| w > 0)
    }

    /// `A_w == A_{n-w}` for all `w`.
    pub fn is_complement_symmetric(&self) -> bool {
        let n = 1u64 << self.m;
        self.entries.iter().all(|(&w, &c)| self.count(n - w) == c)
    }

    pub fn to_csv(&self) -> String {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(["weight", "count"]).expect("in-memory write");
        for (w, c) in &self.entries {
            wtr.write_record([w.to_string(), c.to_string()]).expect("in-memory write");
        }
        String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("ascii")
    }
}

impl Serialize for WeightDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            m: usize,
            dimension: usize,
            entries: BTreeMap<String, String>,
        }
        // Keys are padded so lexicographic order is numeric order.
        let width = (self.m as f64 * std::f64::consts::LOG10_2).floor() as usize + 1;
        let entries = self.entries.iter().map(|(w, c)| (format!("{w:0width$}"), c.to_string())).collect();
        Out { m: self.m, dimension: self.dimension, entries }.serialize(s)
    }
}

fn check_dim(dim: usize, cap: usize) -> Result<()> {
    let cap = cap.min(DIM_CAP_MAX);
    if dim > cap {
        return Err(Error::CapExceeded {
            what: "code dimension",
            value: dim as u64,
            cap: cap as u64,
            hint: "exhaustive enumeration visits 2^dimension codewords",
        });
    }
    Ok(())
}

fn gray(i: u64) -> u64 {
    i ^ (i >> 1)
}

/// Visits messages `gray(a) .. gray(b-1)` with their codeword words.
fn walk_segment<F: FnMut(u64, &[u64])>(g: &BitMatrix, a: u64, b: u64, mut visit: F) {
    let nwords = g.ncols().div_ceil(64);
    let mut v = vec![0u64; nwords];
    let start = gray(a);
    for (bit, row) in g.rows().iter().enumerate() {
        if start >> bit & 1 == 1 {
            xor_into(&mut v, row.words());
        }
    }
    visit(start, &v);
    let mut msg = start;
    for i in a + 1..b {
        let bit = i.trailing_zeros() as usize;
        xor_into(&mut v, g.rows()[bit].words());
        msg ^= 1 << bit;
        visit(msg, &v);
    }
}

#[inline]
fn xor_into(v: &mut [u64], row: &[u64]) {
    for (a, b) in v.iter_mut().zip(row) {
        *a ^= b;
    }
}

fn popcount(v: &[u64]) -> u64 {
    v.iter().map(|w| w.count_ones() as u64).sum()
}

fn segments(dim: usize) -> Vec<(u64, u64)> {
    let total = 1u64 << dim;
    let nseg = 1u64 << SEGMENTS_LOG2.min(dim);
    let step = total / nseg;
    (0..nseg).map(|s| (s * step, (s + 1) * step)).collect()
}

/// Exact weight distribution of the code spanned by `code`.
pub fn full_weight_distribution(code: &DecreasingSet, cap_dim: usize) -> Result<WeightDistribution> {
    check_dim(code.dimension(), cap_dim)?;
    let g = code.generator_matrix()?;
    let entries = segments(code.dimension())
        .into_par_iter()
        .map(|(a, b)| {
            let mut tally = BTreeMap::new();
            walk_segment(&g, a, b, |_, v| *tally.entry(popcount(v)).or_insert(0u64) += 1);
            tally
        })
        .reduce(BTreeMap::new, |mut x, y| {
            for (w, c) in y {
                *x.entry(w).or_insert(0) += c;
            }
            x
        });
    Ok(WeightDistribution { m: code.m(), dimension: code.dimension(), entries })
}

/// Codeword of a message, XORing rows directly.
pub fn naive_codeword(g: &BitMatrix, msg: u64) -> Vec<u64> {
    let mut v = vec![0u64; g.ncols().div_ceil(64)];
    for (bit, row) in g.rows().iter().enumerate() {
        if msg >> bit & 1 == 1 {
            xor_into(&mut v, row.words());
        }
    }
    v
}

/// ANF of a message: the monomials whose rows it selects.
pub fn message_poly(code: &DecreasingSet, msg: u64) -> Poly {
    let rows = code.sorted_monomials();
    let terms = rows.iter().enumerate().filter(|(b, _)| msg >> b & 1 == 1).map(|(_, f)| *f);
    Poly::from_terms(code.m(), terms).expect("code monomials fit")
}

fn messages_of_weight(code: &DecreasingSet, w: u64, cap_dim: usize) -> Result<Vec<u64>> {
    check_dim(code.dimension(), cap_dim)?;
    let g = code.generator_matrix()?;
    let mut msgs: Vec<u64> = segments(code.dimension())
        .into_par_iter()
        .flat_map_iter(|(a, b)| {
            let mut hits = Vec::new();
            walk_segment(&g, a, b, |msg, v| {
                if popcount(v) == w {
                    hits.push(msg);
                }
            });
            hits
        })
        .collect();
    msgs.sort_unstable();
    Ok(msgs)
}

/// Every codeword of weight exactly `w`, as sorted ANF.
pub fn codewords_of_weight(code: &DecreasingSet, w: u64, cap_dim: usize) -> Result<Vec<Poly>> {
    let mut out: Vec<Poly> =
        messages_of_weight(code, w, cap_dim)?.into_iter().map(|msg| message_poly(code, msg)).collect();
    out.sort();
    Ok(out)
}

/// Structural match of a single polynomial against the named templates,
/// up to relabelling variables. If the whole polynomial matches nothing,
/// the head is split off and the kernel is matched as a nesting.
pub fn match_template(p: &Poly) -> Option<TemplateInstance> {
    if p.is_zero() {
        return None;
    }
    if let Some(t) = match_kernel(p) {
        return Some(t);
    }
    let (h, q) = templates::factor_head_kernel(p).ok()?;
    let inner = match_kernel(&q)?;
    if h.is_one() {
        Some(inner)
    } else {
        templates::nest_template(h, &inner).ok()
    }
}

fn match_kernel(q: &Poly) -> Option<TemplateInstance> {
    let m = q.m();
    let terms: Vec<Monomial> = q.terms().collect();
    let top = q.degree()?;
    let disjoint = terms.iter().enumerate().all(|(a, f)| terms[a + 1..].iter().all(|g| f.is_disjoint(*g)));
    if disjoint && top >= 1 && terms.iter().all(|f| f.degree() == top) {
        return templates::disjoint_k_sum(&terms, m).ok();
    }
    if disjoint && top >= 2 {
        let (low, high): (Vec<Monomial>, Vec<Monomial>) = terms.iter().partition(|f| f.degree() == top - 1);
        if low.len() == 1 && high.iter().all(|f| f.degree() == top) {
            return templates::rank_ell_degree_drop(&high, low[0], m).ok();
        }
    }
    if terms.len() == 3 {
        if let Some(t) = match_flip(&terms, m) {
            return Some(t);
        }
        if terms.iter().all(|f| f.degree() == 3) {
            return match_shared(&terms, m);
        }
    }
    None
}

fn match_flip(terms: &[Monomial], m: usize) -> Option<TemplateInstance> {
    for (a, &g) in terms.iter().enumerate() {
        for (b, &xg) in terms.iter().enumerate() {
            if a == b || !g.divides(xg) || xg.degree() != g.degree() + 1 {
                continue;
            }
            let j = xg.without(g).indices().next()?;
            let f = terms[3 - a - b];
            if let Ok(t) = templates::complementary_flip(f, j, g, m) {
                return Some(t);
            }
        }
    }
    None
}

fn match_shared(terms: &[Monomial], m: usize) -> Option<TemplateInstance> {
    // B: each pair shares exactly one variable, no variable common to all.
    // C: a chain t0-t1-t2 sharing one variable per link, ends disjoint.
    let meet = |a: usize, b: usize| terms[a].gcd(terms[b]).degree();
    let all = terms[0].gcd(terms[1]).gcd(terms[2]);
    if !all.is_one() {
        return None;
    }
    let pairs = [meet(0, 1), meet(0, 2), meet(1, 2)];
    if pairs == [1, 1, 1] {
        // Recover labels X1..X6 from the incidence structure.
        let (f1, f2, f3) = (terms[0], terms[1], terms[2]);
        let x2 = f1.gcd(f2);
        let x3 = f1.gcd(f3);
        let x4 = f2.gcd(f3);
        let x1 = f1.without(x2.times(x3));
        let x5 = f2.without(x2.times(x4));
        let x6 = f3.without(x3.times(x4));
        let labels: Vec<usize> = [x1, x2, x3, x4, x5, x6].iter().map(|x| x.indices().next().unwrap()).collect();
        return templates::shared_3term_with_labels(Monomial::ONE, Shared3Variant::B, &labels, m).ok();
    }
    for mid in 0..3 {
        let (a, b) = match mid {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let (g1, g2, g3) = (terms[a], terms[mid], terms[b]);
        if g1.gcd(g2).degree() == 1 && g2.gcd(g3).degree() == 1 && g1.is_disjoint(g3) {
            let x3 = g1.gcd(g2);
            let x4 = g2.gcd(g3);
            let rest1: Vec<usize> = g1.without(x3).indices().collect();
            let x5 = g2.without(x3.times(x4));
            let rest3: Vec<usize> = g3.without(x4).indices().collect();
            let idx = |x: Monomial| x.indices().next().unwrap();
            let labels = [rest1[0], rest1[1], idx(x3), idx(x4), idx(x5), rest3[0], rest3[1]];
            return templates::shared_3term_with_labels(Monomial::ONE, Shared3Variant::C, &labels, m).ok();
        }
    }
    None
}

/// One orbit (or one codeword beyond the orbit cap) in a weight class.
#[derive(Clone, Debug, Serialize)]
pub struct ClassifiedGroup {
    pub representative: Poly,
    pub size: u64,
    /// Template kind of the matched member, `None` if nothing matched.
    pub kind: Option<TemplateKind>,
    pub nested: bool,
    /// The member that matched structurally.
    pub matched: Option<Poly>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub m: usize,
    pub weight: u64,
    pub total: u64,
    /// Whether codewords were grouped by explicit LTA orbits.
    pub by_orbit: bool,
    /// Codewords attributed to each kind (nested counted under the kernel's kind).
    pub by_kind: BTreeMap<String, u64>,
    pub nested: u64,
    pub unexplained: u64,
    pub groups: Vec<ClassifiedGroup>,
}

impl ClassificationReport {
    /// Covered fraction as `covered/total`.
    pub fn coverage(&self) -> (u64, u64) {
        (self.total - self.unexplained, self.total)
    }

    pub fn coverage_string(&self) -> String {
        let (c, t) = self.coverage();
        let mut s = format!("{c}/{t}");
        if t > 0 {
            let _ = write!(s, " ({:.4})", c as f64 / t as f64);
        }
        s
    }
}

/// Classifies every codeword of weight `w`. Up to `orbit_cap` variables the
/// class is split into LTA orbits and an orbit counts as covered when any
/// member matches a template; beyond it each codeword is matched alone.
pub fn classify_weight_class(
    code: &DecreasingSet,
    w: u64,
    cap_dim: usize,
    orbit_cap: usize,
) -> Result<ClassificationReport> {
    let m = code.m();
    let words = codewords_of_weight(code, w, cap_dim)?;
    let by_orbit = m <= orbit_cap.min(crate::lta::ORBIT_M_MAX);
    let mut groups = Vec::new();
    if by_orbit {
        let group = GroupSlice::full(m, orbit_cap)?;
        let mut seen: HashSet<u64> = HashSet::new();
        for p in &words {
            let t = tt::of_poly(p);
            if seen.contains(&t) {
                continue;
            }
            let orbit = group.orbit_tables(p, None);
            let mut members: Vec<Poly> = orbit.iter().map(|&t| tt::to_poly(t, m)).collect();
            // Prefer the sparsest member as the witness.
            members.sort_by(|a, b| a.num_terms().cmp(&b.num_terms()).then_with(|| a.cmp(b)));
            let hit = members.iter().find_map(|q| match_template(q).map(|inst| (q.clone(), inst)));
            seen.extend(orbit.iter().copied());
            groups.push(ClassifiedGroup {
                representative: p.clone(),
                size: members.len() as u64,
                kind: hit.as_ref().map(|(_, i)| kernel_kind(i)),
                nested: hit.as_ref().is_some_and(|(_, i)| i.kind == TemplateKind::Nested),
                matched: hit.map(|(q, _)| q),
            });
        }
    } else {
        for p in &words {
            let hit = match_template(p);
            groups.push(ClassifiedGroup {
                representative: p.clone(),
                size: 1,
                kind: hit.as_ref().map(kernel_kind),
                nested: hit.as_ref().is_some_and(|i| i.kind == TemplateKind::Nested),
                matched: hit.map(|_| p.clone()),
            });
        }
    }
    let mut by_kind = BTreeMap::new();
    let (mut nested, mut unexplained) = (0, 0);
    for g in &groups {
        match g.kind {
            Some(k) => *by_kind.entry(k.name().to_string()).or_insert(0) += g.size,
            None => unexplained += g.size,
        }
        if g.nested {
            nested += g.size;
        }
    }
    let total = words.len() as u64;
    debug_assert_eq!(groups.iter().map(|g| g.size).sum::<u64>(), total);
    Ok(ClassificationReport { m, weight: w, total, by_orbit, by_kind, nested, unexplained, groups })
}

/// The kernel's kind for a nested match.
fn kernel_kind(inst: &TemplateInstance) -> TemplateKind {
    if inst.kind != TemplateKind::Nested {
        return inst.kind;
    }
    match_kernel(&inst.kernel).map_or(TemplateKind::Nested, |k| k.kind)
}
