mod common;

use std::collections::BTreeSet;

use butson::canonical::is_canonical;
use butson::extend::{
    build_table, extensions_hashed, extensions_naive, Extender, HashConfig, RowConstraints,
};
use butson::{LogMatrix, VanishingSet};
use common::{canonical_children, orthogonal_numeric, walk};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CELLS: &[(usize, u32)] = &[
    (8, 2),
    (12, 2),
    (6, 3),
    (9, 3),
    (6, 4),
    (8, 4),
    (10, 4),
    (6, 6),
    (7, 6),
    (9, 6),
    (6, 10),
    (9, 10),
];

/// Cells where the rearrangement oracle with a canonicity test per row stays cheap.
const SMALL_CELLS: &[(usize, u32)] = &[(8, 2), (6, 3), (9, 3), (6, 4), (8, 4), (6, 6), (7, 6), (6, 10)];

fn naive(r: &LogMatrix, set: &VanishingSet) -> BTreeSet<Vec<u8>> {
    extensions_naive(r, set)
        .unwrap()
        .map(|x| x.into_entries())
        .collect()
}

/// Non-root nodes of random walks, at least `per_cell` of them per cell.
fn samples(n: usize, q: u32, per_cell: usize, seed: u64) -> (VanishingSet, Vec<LogMatrix>) {
    let set = VanishingSet::generate(n, q).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < per_cell && attempts < 20 * per_cell {
        out.extend(walk(&set, &mut rng).into_iter().skip(1));
        attempts += 1;
    }
    (set, out)
}

/// Suffix length near the balanced split, keeping both halves small.
fn split(n: usize, q: u32, rng: &mut impl Rng) -> usize {
    let half = n / 2;
    let mut m = rng.gen_range(half.saturating_sub(1).max(1)..=(half + 1).min(n - 1));
    while m > 1 && (q as f64).powi(m as i32) > 2e5 {
        m -= 1;
    }
    m
}

#[test]
fn hashed_equals_naive_on_sampled_partials() {
    let mut per_q = std::collections::BTreeMap::<u32, usize>::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (k, &(n, q)) in CELLS.iter().enumerate() {
        let (set, nodes) = samples(n, q, 110, k as u64);
        for r in &nodes {
            let expected = naive(r, &set);
            let m = split(n, q, &mut rng);
            let table = build_table(r, m, &HashConfig::default()).unwrap();
            let got: BTreeSet<Vec<u8>> = extensions_hashed(r, &table, &set)
                .unwrap()
                .into_iter()
                .map(|x| x.into_entries())
                .collect();
            assert_eq!(got, expected, "BH({n},{q}) m={m} at\n{r}");
            for x in &expected {
                assert!(r.rows().all(|row| orthogonal_numeric(row, x, q as u8)));
            }
        }
        *per_q.entry(q).or_default() += nodes.len();
    }
    let total: usize = per_q.values().sum();
    assert!(total >= 1000, "{total} samples");
    for q in [2, 3, 4, 6, 10] {
        assert!(per_q[&q] >= 100, "q={q}: {} samples", per_q[&q]);
    }
}

#[test]
fn pruned_generator_equals_naive() {
    for (k, &(n, q)) in CELLS.iter().enumerate() {
        let (set, nodes) = samples(n, q, 40, 100 + k as u64);
        let ext = Extender::new(&set);
        for r in &nodes {
            let got: BTreeSet<Vec<u8>> =
                ext.extensions(r, &RowConstraints::default()).into_iter().collect();
            assert_eq!(got, naive(r, &set), "BH({n},{q}) at\n{r}");
        }
    }
}

/// The generator's canonicity-derived constraints drop no canonical child.
#[test]
fn search_constraints_keep_every_canonical_child() {
    for (k, &(n, q)) in SMALL_CELLS.iter().enumerate() {
        let (set, nodes) = samples(n, q, 40, 200 + k as u64);
        let ext = Extender::new(&set);
        for r in nodes.iter().filter(|r| r.nrows() < n) {
            let expected: BTreeSet<LogMatrix> = canonical_children(r, &set).into_iter().collect();
            let got: BTreeSet<LogMatrix> = ext
                .extensions(r, &ext.canonical_constraints(r))
                .into_iter()
                .map(|x| {
                    let mut c = r.clone();
                    c.push_row(&x).unwrap();
                    c
                })
                .filter(|c| is_canonical(c).unwrap())
                .collect();
            assert_eq!(got, expected, "BH({n},{q}) at\n{r}");
        }
    }
}
