use std::collections::BTreeSet;

use mono_spectrum::oracle::{codewords_of_weight, full_weight_distribution};
use mono_spectrum::templates::{self, TemplateKind};
use mono_spectrum::{pie_weight, BitRow, DecreasingSet, Dyadic, LtaElement, Monomial, Poly, ResidualFamily};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn family() -> impl Strategy<Value = (usize, ResidualFamily)> {
    (1usize..=10).prop_flat_map(|m| {
        let full = (1u64 << m) - 1;
        (Just(m), 0..=full, prop::collection::btree_set(0..=full, 1..=6)).prop_map(move |(m, h, ts)| {
            let tails: BTreeSet<u64> = ts.into_iter().map(|t| t & !h).collect();
            (m, ResidualFamily::new(Monomial::from_mask(h), tails.into_iter().map(Monomial::from_mask).collect()))
        })
    })
}

fn poly(m: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(0..1u64 << m, 0..12).prop_map(move |ms| Poly::from_masks(m, ms).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn general_weight_is_truth_table_weight((m, fam) in family()) {
        let formula = fam.general_weight(m).unwrap();
        let eval = fam.polynomial(m).unwrap().weight().unwrap();
        prop_assert_eq!(formula, eval.into());
        prop_assert!(fam.sigma().unwrap() > Dyadic::zero());
    }

    #[test]
    fn dyadic_digits_rebuild_sigma((_m, fam) in family()) {
        let d = fam.dyadic_weight().unwrap();
        prop_assert_eq!(d.reconstruct(), fam.sigma().unwrap());
    }

    #[test]
    fn pie_matches_xor(m in 1usize..=8, rows in prop::collection::vec(any::<u64>(), 1..8)) {
        let n = 1usize << m;
        let rows: Vec<BitRow> = rows
            .iter()
            .map(|&w| BitRow::from_bits((0..n).map(|i| w.rotate_left(i as u32 * 7) & 1 == 1)))
            .collect();
        let all: Vec<usize> = (0..rows.len()).collect();
        let mut acc = BitRow::zeros(n);
        for r in &rows {
            acc.xor_assign(r);
        }
        prop_assert_eq!(pie_weight(&rows, &all).unwrap(), acc.count_ones());
    }

    #[test]
    fn lta_preserves_weight(m in 1usize..=8, seed in any::<u64>(), p in (1usize..=8).prop_flat_map(poly)) {
        let p = Poly::from_terms(m.max(p.m()), p.terms()).unwrap();
        let g = LtaElement::random(p.m(), &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(g.apply(&p).weight().unwrap(), p.weight().unwrap());
    }

    #[test]
    fn weight_is_support_size(p in (1usize..=10).prop_flat_map(poly)) {
        let support = (0..1u64 << p.m()).filter(|&t| p.eval_at(t)).count() as u64;
        prop_assert_eq!(p.weight().unwrap(), support);
    }

    #[test]
    fn closure_is_decreasing(m in 1usize..=6, gens in prop::collection::vec(any::<u64>(), 1..4)) {
        let gens: Vec<Monomial> = gens.iter().map(|g| Monomial::from_mask(g & ((1 << m) - 1))).collect();
        let code = DecreasingSet::closure(m, gens.iter().copied()).unwrap();
        prop_assert!(mono_spectrum::code::is_decreasing(code.monomials()));
        for g in gens {
            prop_assert!(code.contains(g));
        }
    }
}

#[test]
fn minimum_distance_of_small_decreasing_sets() {
    let mut checked = 0;
    for m in 1..=5usize {
        for mask in 1..1u64 << m {
            for extra in [0u64, 1, 3, 5] {
                let gens = [Monomial::from_mask(mask), Monomial::from_mask(extra & ((1 << m) - 1))];
                let code = DecreasingSet::closure(m, gens).unwrap();
                if code.dimension() > 20 {
                    continue;
                }
                let dist = full_weight_distribution(&code, 20).unwrap();
                assert_eq!(dist.min_nonzero_weight(), Some(1 << code.d_min_log2().unwrap()), "{code:?}");
                checked += 1;
            }
        }
    }
    assert!(checked > 50);
}

#[test]
fn templates_in_a_code_are_listed_at_their_weight() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    // Shared kernels reach x5, so every decreasing code holding one is far
    // beyond exhaustive listing.
    for kind in TemplateKind::ALL
        .into_iter()
        .filter(|k| !matches!(k, TemplateKind::Shared3TermB | TemplateKind::Shared3TermC))
    {
        let mut seen = 0;
        for _ in 0..2000 {
            if seen == 3 {
                break;
            }
            let Some(t) = templates::random_instance(kind, 7, &mut rng) else { continue };
            // Smallest decreasing code containing the template.
            let code = DecreasingSet::closure(t.m, t.poly.terms()).unwrap();
            if code.dimension() > 22 {
                continue;
            }
            let w: u64 = t.predicted_weight.clone().try_into().unwrap();
            let listed = codewords_of_weight(&code, w, 22).unwrap();
            assert!(listed.contains(&t.poly), "{} {} missing at weight {w}", kind.name(), t.poly);
            seen += 1;
        }
        assert!(seen >= 1, "{}", kind.name());
    }
}
