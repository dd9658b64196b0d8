//! Orbit-sum multiplicity formulas.
//!
//! A formula enumerates seeds, assigns each an orbit-size exponent, and sums
//! `2^exponent`. [`verify`] compares the sum against the exhaustive oracle
//! and, at small `m`, each exponent against the explicit LTA orbit.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::code::DecreasingSet;
use crate::error::{Error, Result};
use crate::lta::{self, constrained_partition_weight, minkowski_in, partition_weight, tt, GroupSlice};
use crate::monomial::{Monomial, Poly};
use crate::oracle;
use crate::templates::disjoint_k_sum_weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedKind {
    DisjointTuple,
    NestedDegreeDrop,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeedDescriptor {
    pub kind: SeedKind,
    pub h: Monomial,
    #[serde(rename = "S")]
    pub s: Vec<Monomial>,
    pub j: Option<usize>,
    pub poly: Poly,
    /// `None` when a collision exponent could not be computed.
    pub exponent: Option<i64>,
    /// Pairwise `α_{q_a,q_b}` in `(a, b)` order.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub alphas: Vec<u32>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TupleMode {
    #[default]
    Unordered,
    Ordered,
}

/// Explicit orbit data for a seed list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitCheck {
    pub seeds_checked: usize,
    /// Seeds whose `2^exponent` differs from the explicit orbit, with both sizes.
    pub size_mismatches: Vec<(usize, Option<i64>, u64)>,
    pub disjoint: bool,
    pub union_size: u64,
    /// Every orbit member lies in the code.
    pub closed: bool,
}

impl OrbitCheck {
    pub fn ok(&self) -> bool {
        self.size_mismatches.is_empty() && self.disjoint && self.closed
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verification {
    #[serde(serialize_with = "crate::ser::biguint_str")]
    pub exhaustive_count: BigUint,
    /// `count == exhaustive_count`.
    pub matches: bool,
    /// Whether the template is claimed to exhaust the weight class.
    pub equality_expected: bool,
    /// `count/exhaustive_count`.
    pub coverage: String,
    pub orbits: Option<OrbitCheck>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnumerationReport {
    pub template: &'static str,
    pub m: usize,
    pub r: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<TupleMode>,
    #[serde(serialize_with = "crate::ser::biguint_str")]
    pub weight: BigUint,
    #[serde(serialize_with = "crate::ser::biguint_str")]
    pub count: BigUint,
    pub seeds: Vec<SeedDescriptor>,
    pub verified: Option<Verification>,
    /// Some seed exponent is missing; `count` sums only the others.
    pub incomplete: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reading: Option<&'static str>,
}

impl EnumerationReport {
    fn total(seeds: &[SeedDescriptor]) -> BigUint {
        seeds
            .iter()
            .filter_map(|s| s.exponent)
            .map(|e| BigUint::from(1u8) << e as u64)
            .sum()
    }

    pub fn to_csv(&self) -> String {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(["weight", "count"]).expect("in-memory write");
        wtr.write_record([self.weight.to_string(), self.count.to_string()]).expect("in-memory write");
        String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("ascii")
    }
}

/// `k`-selections of pairwise-disjoint degree-`r` monomials of the code.
pub fn enumerate_disjoint_tuples(code: &DecreasingSet, r: u32, k: usize, mode: TupleMode) -> Vec<Vec<Monomial>> {
    let pool = code.of_degree(r);
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        pool: &[Monomial],
        start: usize,
        k: usize,
        used: Monomial,
        ordered: bool,
        cur: &mut Vec<Monomial>,
        out: &mut Vec<Vec<Monomial>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let from = if ordered { 0 } else { start };
        for i in from..pool.len() {
            let f = pool[i];
            if f.is_disjoint(used) && !cur.contains(&f) {
                cur.push(f);
                rec(pool, i + 1, k, used.times(f), ordered, cur, out);
                cur.pop();
            }
        }
    }
    if k > 0 {
        rec(&pool, 0, k, Monomial::ONE, mode == TupleMode::Ordered, &mut cur, &mut out);
    }
    out
}

/// Sums `2^{kr + Σ|λ_{f_i}|}` over disjoint `k`-tuples.
pub fn count_disjoint_k_sum(code: &DecreasingSet, r: u32, k: usize, mode: TupleMode) -> Result<EnumerationReport> {
    let m = code.m();
    let weight = disjoint_k_sum_weight(m, r, k as u32)?;
    let seeds: Vec<SeedDescriptor> = enumerate_disjoint_tuples(code, r, k, mode)
        .into_iter()
        .map(|fs| {
            let lam: u32 = fs.iter().map(|f| partition_weight(*f)).sum();
            SeedDescriptor {
                kind: SeedKind::DisjointTuple,
                h: Monomial::ONE,
                poly: Poly::from_terms(m, fs.iter().copied()).expect("code monomials fit"),
                s: fs,
                j: None,
                exponent: Some(k as i64 * r as i64 + lam as i64),
                alphas: Vec::new(),
            }
        })
        .collect();
    Ok(EnumerationReport {
        template: "disjoint_k_sum",
        m,
        r,
        k: Some(k),
        mode: Some(mode),
        weight,
        count: EnumerationReport::total(&seeds),
        seeds,
        verified: None,
        incomplete: false,
        reading: None,
    })
}

/// Minimum-weight count: the `k = 1` case at `r = r^+`.
pub fn minimum_weight_count(code: &DecreasingSet) -> Result<EnumerationReport> {
    let r = code.r_plus().ok_or_else(|| Error::domain("empty code"))?;
    count_disjoint_k_sum(code, r, 1, TupleMode::Unordered)
}

pub const NESTED_READING: &str = "linear term |λ_{f_1...f_l}(x_j)| counts indices below j outside \
ind(h) ∪ ind(q_1) ∪ ... ∪ ind(q_l); l = 0 seeds use j > max ind(h)";

fn subsets(pool: &[Monomial], ell: usize, h: Monomial) -> Vec<Vec<Monomial>> {
    // Pairwise gcd h among S is the same as pairwise-disjoint quotients.
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(pool: &[Monomial], start: usize, ell: usize, h: Monomial, used: Monomial, cur: &mut Vec<Monomial>, out: &mut Vec<Vec<Monomial>>) {
        if cur.len() == ell {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            let q = pool[i].without(h);
            if q.is_disjoint(used) {
                cur.push(pool[i]);
                rec(pool, i + 1, ell, h, used.times(q), cur, out);
                cur.pop();
            }
        }
    }
    rec(pool, 0, ell, h, Monomial::ONE, &mut cur, &mut out);
    out
}

/// Seeds `(h; S; x_j)` of nested rank-`ℓ` degree-drop codewords at
/// `r = r^+`, each with exponent `E(h;S;x_j)`.
///
/// Collision exponents come from explicit Minkowski sums under `G_h`, so
/// seeds with `ℓ >= 2` need `m <= orbit_cap`; beyond it they are kept with
/// no exponent and the report is marked incomplete.
pub fn count_nested_degree_drop(code: &DecreasingSet, orbit_cap: usize) -> Result<EnumerationReport> {
    let m = code.m();
    let r = code.r_plus().ok_or_else(|| Error::domain("empty code"))?;
    if r < 2 {
        return Err(Error::domain(format!("nested degree drop needs r^+ >= 2, code has {r}")));
    }
    let heads = code.of_degree(r - 2);
    let top = code.of_degree(r);
    let explicit = m <= orbit_cap.min(lta::ORBIT_M_MAX);
    let per_head: Vec<Result<Vec<SeedDescriptor>>> = heads
        .par_iter()
        .map(|&h| {
            let pool: Vec<Monomial> = top.iter().copied().filter(|f| h.divides(*f)).collect();
            let mut group: Option<GroupSlice> = None;
            let mut alpha_cache: BTreeMap<(Monomial, Monomial), u32> = BTreeMap::new();
            let mut seeds = Vec::new();
            for ell in 0..=pool.len() {
                for s in subsets(&pool, ell, h) {
                    let qs: Vec<Monomial> = s.iter().map(|f| f.without(h)).collect();
                    let occupied = s.iter().fold(h, |acc, f| acc.times(*f));
                    let mut alphas = Vec::new();
                    let mut complete = true;
                    if ell >= 2 {
                        if explicit {
                            if group.is_none() {
                                group = Some(GroupSlice::stabilizer(h, m, orbit_cap)?);
                            }
                            let g = group.as_ref().expect("just set");
                            for a in 0..ell {
                                for b in a + 1..ell {
                                    let key = (qs[a], qs[b]);
                                    let alpha = match alpha_cache.get(&key) {
                                        Some(&v) => v,
                                        None => {
                                            let rep = minkowski_in(g, qs[a], qs[b], h)?;
                                            let v = rep.alpha.ok_or_else(|| {
                                                Error::Invariant(format!(
                                                    "collision quotient for {} and {} under head {h} is not a power of two",
                                                    qs[a], qs[b]
                                                ))
                                            })?;
                                            alpha_cache.insert(key, v);
                                            v
                                        }
                                    };
                                    alphas.push(alpha);
                                }
                            }
                        } else {
                            complete = false;
                        }
                    }
                    let tails: u32 = s
                        .iter()
                        .zip(&qs)
                        .map(|(f, q)| constrained_partition_weight(*f, *q))
                        .sum::<Result<u32>>()?;
                    for j in 0..m {
                        if occupied.contains_var(j) {
                            continue;
                        }
                        if ell == 0 && h.max_index().is_some_and(|top| j < top) {
                            continue;
                        }
                        let g = h.times(Monomial::var(j));
                        if !code.contains(g) {
                            continue;
                        }
                        let lin = constrained_partition_weight(occupied, Monomial::var(j))?;
                        let exponent = complete.then(|| {
                            (r as i64 - 2) + 2 * ell as i64 + partition_weight(h) as i64 + tails as i64
                                - alphas.iter().map(|&a| a as i64).sum::<i64>()
                                + 1
                                + lin as i64
                        });
                        let mut terms = s.clone();
                        terms.push(g);
                        seeds.push(SeedDescriptor {
                            kind: SeedKind::NestedDegreeDrop,
                            h,
                            s: s.clone(),
                            j: Some(j),
                            poly: Poly::from_terms(m, terms)?,
                            exponent,
                            alphas: alphas.clone(),
                        });
                    }
                }
            }
            Ok(seeds)
        })
        .collect();
    let mut seeds = Vec::new();
    for chunk in per_head {
        seeds.extend(chunk?);
    }
    let incomplete = seeds.iter().any(|s| s.exponent.is_none());
    Ok(EnumerationReport {
        template: "nested_degree_drop",
        m,
        r,
        k: None,
        mode: None,
        weight: BigUint::from(1u8) << (m - r as usize + 1),
        count: EnumerationReport::total(&seeds),
        seeds,
        verified: None,
        incomplete,
        reading: Some(NESTED_READING),
    })
}

/// The boxed orbit-size formula with its explicit comparisons.
pub fn master_orbit_size(h: Monomial, q: &Poly, max_m: usize) -> Result<lta::MasterOrbitReport> {
    lta::master_orbit(h, q, max_m)
}

/// Explicit orbits of every seed: sizes, pairwise disjointness and closure
/// in the code.
pub fn check_seed_orbits(code: &DecreasingSet, seeds: &[SeedDescriptor], orbit_cap: usize) -> Result<OrbitCheck> {
    let m = code.m();
    let group = GroupSlice::full(m, orbit_cap)?;
    let allowed: HashSet<Monomial> = code.monomials().iter().copied().collect();
    let orbits: Vec<HashSet<u64>> = seeds.iter().map(|s| group.orbit_tables(&s.poly, None)).collect();
    let mut size_mismatches = Vec::new();
    let mut union: HashSet<u64> = HashSet::new();
    let mut sum = 0u64;
    let mut closed = true;
    for (i, (seed, orbit)) in seeds.iter().zip(&orbits).enumerate() {
        let size = orbit.len() as u64;
        if seed.exponent.is_none_or(|e| !(0..64).contains(&e) || 1u64 << e != size) {
            size_mismatches.push((i, seed.exponent, size));
        }
        sum += size;
        closed &= orbit.iter().all(|&t| tt::to_poly(t, m).terms().all(|f| allowed.contains(&f)));
        union.extend(orbit.iter().copied());
    }
    Ok(OrbitCheck {
        seeds_checked: seeds.len(),
        size_mismatches,
        disjoint: union.len() as u64 == sum,
        union_size: union.len() as u64,
        closed,
    })
}

/// Compares a report with the exhaustive weight distribution and, when `m`
/// is within `orbit_cap`, with explicit seed orbits.
pub fn verify(
    report: &mut EnumerationReport,
    code: &DecreasingSet,
    cap_dim: usize,
    orbit_cap: usize,
) -> Result<()> {
    let dist = oracle::full_weight_distribution(code, cap_dim)?;
    let w: u64 = report.weight.clone().try_into().map_err(|_| Error::domain("weight beyond u64"))?;
    let exhaustive = BigUint::from(dist.count(w));
    let matches = report.count == exhaustive;
    let equality_expected =
        report.template == "disjoint_k_sum" && report.k == Some(1) && Some(report.r) == code.r_plus();
    let orbits = if code.m() <= orbit_cap.min(lta::ORBIT_M_MAX) {
        Some(check_seed_orbits(code, &report.seeds, orbit_cap)?)
    } else {
        None
    };
    let bounded = report.count <= exhaustive;
    let ok = !report.incomplete
        && if equality_expected { matches } else { bounded }
        && orbits.as_ref().is_none_or(OrbitCheck::ok);
    report.verified = Some(Verification {
        coverage: format!("{}/{}", report.count, exhaustive),
        exhaustive_count: exhaustive,
        matches,
        equality_expected,
        orbits,
        ok,
    });
    Ok(())
}
