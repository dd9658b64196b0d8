use mono_spectrum::enumerate::minimum_weight_count;
use mono_spectrum::lta::{self, orbit_size_exponent};
use mono_spectrum::oracle::full_weight_distribution;
use mono_spectrum::templates::{self, classify_sigma_k, TemplateKind};
use mono_spectrum::{dyadic_of, DecreasingSet, Dyadic, Monomial, Poly, ResidualFamily};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::output::{Reply, Status};
use crate::CliError;

#[derive(Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

#[derive(Serialize)]
struct Report {
    seed: u64,
    count: usize,
    passed: bool,
    checks: Vec<Check>,
}

/// Quick randomized versions of the library's identities.
pub fn run(seed: u64, count: usize) -> Result<Reply, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sigmas: Vec<Dyadic> = Vec::new();
    let mut checks = Vec::new();

    let mut bad = 0;
    for _ in 0..count {
        let m = rng.gen_range(1..=10);
        let full = (1u64 << m) - 1;
        let h = rng.gen::<u64>() & rng.gen::<u64>() & full;
        let q = rng.gen_range(1..=6);
        let mut tails: Vec<Monomial> = (0..q).map(|_| Monomial::from_mask(rng.gen::<u64>() & full & !h)).collect();
        tails.sort();
        tails.dedup();
        let fam = ResidualFamily::new(Monomial::from_mask(h), tails);
        let eval = fam.polynomial(m)?.weight()?;
        bad += usize::from(fam.general_weight(m)? != BigUint::from(eval));
        sigmas.push(fam.sigma()?);
    }
    checks.push(Check { name: "general_weight", passed: bad == 0, detail: format!("{bad}/{count} mismatches") });

    for kind in TemplateKind::ALL {
        let (mut n, mut bad) = (0, 0);
        while n < count {
            let Some(t) = templates::random_instance(kind, 10, &mut rng) else { continue };
            bad += usize::from(!t.check()?.is_some_and(|c| c.matches));
            sigmas.push(t.predicted_sigma.clone());
            n += 1;
        }
        checks.push(Check { name: kind.name(), passed: bad == 0, detail: format!("{bad}/{count} mismatches") });
    }

    let rep = classify_sigma_k(8, 8)?;
    sigmas.extend(rep.below_two.iter().chain(&rep.two_to_five_halves).map(|e| e.sigma.clone()));
    checks.push(Check {
        name: "sigma_k_classes",
        passed: rep.matches_expected,
        detail: format!("{} below 2, {} in [2, 5/2)", rep.below_two.len(), rep.two_to_five_halves.len()),
    });

    let mut bad = 0;
    let mut n = 0;
    for m in 1..=4usize {
        for mask in 0..1u64 << m {
            let f = Monomial::from_mask(mask);
            bad += usize::from(lta::orbit_size(&Poly::monomial(f, m), None, 4)? != 1 << orbit_size_exponent(f));
            n += 1;
        }
    }
    checks.push(Check { name: "monomial_orbits", passed: bad == 0, detail: format!("{bad}/{n} mismatches") });

    let rm = DecreasingSet::reed_muller(1, 3)?;
    let dist = full_weight_distribution(&rm, 24)?;
    let min = minimum_weight_count(&rm)?;
    let entries: Vec<(u64, u64)> = dist.entries.iter().map(|(&w, &c)| (w, c)).collect();
    checks.push(Check {
        name: "rm_1_3_spectrum",
        passed: entries == [(0, 1), (4, 14), (8, 1)] && min.count == BigUint::from(14u32),
        detail: format!("{entries:?}, formula {}", min.count),
    });

    let bad = sigmas.iter().filter(|s| dyadic_of(s).map_or(true, |d| d.reconstruct() != **s)).count();
    checks.push(Check {
        name: "dyadic_round_trip",
        passed: bad == 0,
        detail: format!("{bad}/{} failures", sigmas.len()),
    });

    let passed = checks.iter().all(|c| c.passed);
    let rows = checks.iter().map(|c| vec![c.name.to_string(), c.passed.to_string(), c.detail.clone()]).collect();
    let report = Report { seed, count, passed, checks };
    Ok(Reply::new(&report, vec!["check", "passed", "detail"], rows).with_status(Status::from_ok(passed)))
}
