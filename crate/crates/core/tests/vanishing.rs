mod common;

use butson::arith::binomial;
use butson::vanishing::{exists_vanishing, is_orthogonal, prefix_feasible};
use butson::{LogRow, VanishingSet};
use common::vanishes_numeric;
use itertools::Itertools;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Number of sorted zero-led vectors; the brute force below skips cells
/// where this gets large.
fn multisets(n: usize, q: u32) -> u128 {
    binomial((n - 1 + q as usize - 1) as u64, (q - 1) as u64)
}

fn brute(n: usize, q: u32) -> Vec<Vec<u8>> {
    (0..q as u8)
        .combinations_with_replacement(n - 1)
        .map(|tail| std::iter::once(0).chain(tail).collect::<Vec<u8>>())
        .filter(|x| vanishes_numeric(x, q as u8))
        .collect()
}

#[test]
fn generation_matches_floating_point_enumeration() {
    let mut cells = 0;
    for n in 1..=10 {
        for q in 2..30u32 {
            if multisets(n, q) > 400_000 {
                continue;
            }
            let set = VanishingSet::generate(n, q).unwrap();
            let mut expected = brute(n, q);
            expected.sort();
            assert_eq!(set.members(), expected.as_slice(), "O({n},{q})");
            assert_eq!(exists_vanishing(n, q), !expected.is_empty(), "existence at ({n},{q})");
            cells += 1;
        }
    }
    assert!(cells > 150, "only {cells} cells checked");
}

#[test]
fn existence_agrees_with_generation_on_larger_cells() {
    for n in 1..=18 {
        for q in [6u32, 10, 12, 14, 15, 21] {
            if multisets(n, q) > 3_000_000 {
                continue;
            }
            let set = VanishingSet::generate(n, q).unwrap();
            assert_eq!(exists_vanishing(n, q), !set.is_empty(), "({n},{q})");
        }
    }
}

#[test]
fn sixteen_four_has_eight_members() {
    assert_eq!(VanishingSet::generate(16, 4).unwrap().len(), 8);
}

#[test]
fn prefix_feasibility_matches_members() {
    let set = VanishingSet::generate(6, 6).unwrap();
    for len in 1..=6 {
        for p in (0..6u8).combinations_with_replacement(len) {
            if p[0] != 0 {
                continue;
            }
            let expected = set.members().iter().any(|m| m.starts_with(&p));
            assert_eq!(set.has_prefix(&p), expected, "{p:?}");
        }
    }
    let row = LogRow::new(6, vec![0, 0, 3]).unwrap();
    assert_eq!(prefix_feasible(&row, &set), set.has_prefix(&[0, 0, 3]));
}

fn members_strategy() -> impl Strategy<Value = (usize, u32)> {
    prop_oneof![
        Just((4, 4)),
        Just((6, 6)),
        Just((8, 4)),
        Just((9, 3)),
        Just((10, 10)),
        Just((12, 6)),
        Just((7, 7)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn orthogonality_is_membership_of_difference(
        (n, q) in members_strategy(),
        seed in any::<u64>(),
    ) {
        let set = VanishingSet::generate(n, q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<u8> = (0..n).map(|_| rng.gen_range(0..q) as u8).collect();
        let b: Vec<u8> = if rng.gen_bool(0.5) && !set.is_empty() {
            // b = a - (a rearranged member), so the pair is orthogonal
            let mut p = set.members().choose(&mut rng).unwrap().clone();
            p.shuffle(&mut rng);
            a.iter().zip(&p).map(|(&x, &y)| ((x as u32 + q - y as u32) % q) as u8).collect()
        } else {
            (0..n).map(|_| rng.gen_range(0..q) as u8).collect()
        };
        let d: Vec<u8> = a.iter().zip(&b).map(|(&x, &y)| ((x as u32 + q - y as u32) % q) as u8).collect();
        let ra = LogRow::new(q, a.clone()).unwrap();
        let rb = LogRow::new(q, b.clone()).unwrap();
        prop_assert_eq!(is_orthogonal(&ra, &rb, &set).unwrap(), vanishes_numeric(&d, q as u8));
        prop_assert_eq!(set.vanishes(&d), vanishes_numeric(&d, q as u8));
    }

    #[test]
    fn members_are_sorted_zero_led_and_vanish((n, q) in members_strategy()) {
        let set = VanishingSet::generate(n, q).unwrap();
        for m in set.members() {
            prop_assert_eq!(m.len(), n);
            prop_assert_eq!(m[0], 0);
            prop_assert!(m.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(vanishes_numeric(m, q as u8));
            prop_assert!(set.contains(m));
        }
        prop_assert!(set.members().windows(2).all(|w| w[0] < w[1]));
    }
}
