use butson::clique::{compatibility_graph, has_clique, CompatGraph};
use butson::search::{classify, SearchOptions};
use butson::VanishingSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Clique number by trying every vertex subset.
fn brute_clique_number(v: usize, adj: &[u32]) -> usize {
    let mut best = 0;
    for s in 0u32..(1 << v) {
        let size = s.count_ones() as usize;
        if size <= best {
            continue;
        }
        let clique = (0..v)
            .filter(|&a| s >> a & 1 == 1)
            .all(|a| adj[a] & s == s & !(1 << a));
        if clique {
            best = size;
        }
    }
    best
}

#[test]
fn agrees_with_subset_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC11C);
    for trial in 0..1200 {
        let v = rng.gen_range(0..=16);
        let density: f64 = rng.gen_range(0.05..0.95);
        let mut edges = Vec::new();
        let mut adj = vec![0u32; v];
        for a in 0..v {
            for b in a + 1..v {
                if rng.gen_bool(density) {
                    edges.push((a, b));
                    adj[a] |= 1 << b;
                    adj[b] |= 1 << a;
                }
            }
        }
        let g = CompatGraph::from_edges(v, &edges);
        assert_eq!(g.edge_count(), edges.len());
        let omega = brute_clique_number(v, &adj);
        for k in 0..=v + 1 {
            assert_eq!(has_clique(&g, k), k <= omega, "trial {trial}: v={v} k={k} ω={omega}");
        }
    }
}

/// Every prefix of a complete matrix sees the remaining rows as a clique.
#[test]
fn pruning_is_sound_on_classified_matrices() {
    for (n, q) in [(8, 4), (6, 6), (9, 3), (7, 6), (8, 2)] {
        let set = VanishingSet::generate(n, q).unwrap();
        let reps = classify(&SearchOptions::new(n, q)).unwrap().representatives;
        assert!(!reps.is_empty());
        for h in &reps {
            for r in 1..n {
                let prefix = h.leading_rows(r);
                let g = compatibility_graph(&prefix, &set).unwrap();
                assert!(has_clique(&g, n - r), "BH({n},{q}) prefix of {r} rows");
                for row in r..n {
                    let pos = g.vertices().iter().position(|v| v.entries() == h.row(row));
                    assert!(pos.is_some(), "row {row} missing from Γ");
                }
            }
        }
    }
}

#[test]
fn clique_pruning_keeps_the_classification() {
    for (n, q) in [(8, 4), (6, 6), (8, 2), (6, 4), (7, 6)] {
        let plain = classify(&SearchOptions::new(n, q)).unwrap();
        for depth in [2, 3, 4] {
            let mut o = SearchOptions::new(n, q);
            o.clique_depth = Some(depth);
            let pruned = classify(&o).unwrap();
            assert_eq!(pruned.representatives, plain.representatives, "BH({n},{q}) from {depth}");
        }
    }
}
