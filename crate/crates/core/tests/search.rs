mod common;

use std::fs;

use butson::analysis::verify_butson;
use butson::canonical::is_canonical;
use butson::search::{
    classify, count_tree, matrix_type, pair_type, staging_dir, Schedule, SearchOptions,
};
use butson::{Error, LogRow};
use common::butson_numeric;

const CELLS: &[(usize, u32)] = &[(8, 4), (6, 6), (9, 3), (7, 6), (8, 2), (5, 5), (6, 8)];

#[test]
fn representatives_are_canonical_butson_matrices() {
    for &(n, q) in CELLS {
        let r = classify(&SearchOptions::new(n, q)).unwrap();
        assert_eq!(r.representatives.len(), r.aut_sizes.len());
        assert!(r.representatives.windows(2).all(|w| w[0].as_slice() < w[1].as_slice()));
        for h in &r.representatives {
            assert!(verify_butson(h) && butson_numeric(h));
            assert!(is_canonical(h).unwrap());
        }
        assert_eq!(r.stats.at_depth(n), r.representatives.len() as u64);
        assert_eq!(r.stats.at_depth(1), 1);
    }
}

#[test]
fn parallelism_does_not_change_results() {
    for &(n, q) in CELLS {
        let mut one = SearchOptions::new(n, q);
        one.jobs = 1;
        let mut many = SearchOptions::new(n, q);
        many.jobs = 8;
        let (a, b) = (classify(&one).unwrap(), classify(&many).unwrap());
        assert_eq!(a.representatives, b.representatives);
        assert_eq!(a.aut_sizes, b.aut_sizes);
        assert_eq!(a.stats, b.stats);
    }
}

#[test]
fn schedules_seed_depths_and_generators_agree() {
    for &(n, q) in CELLS {
        let base = classify(&SearchOptions::new(n, q)).unwrap();
        let mut variants = Vec::new();
        let mut bfs = SearchOptions::new(n, q);
        bfs.schedule = Schedule::BreadthFirst;
        variants.push(bfs);
        for d in [1, 2, 3, n] {
            let mut o = SearchOptions::new(n, q);
            o.seed_depth = d;
            variants.push(o);
        }
        let mut hashed = SearchOptions::new(n, q);
        hashed.use_hash_extension = true;
        variants.push(hashed.clone());
        hashed.suffix_len = Some(2);
        variants.push(hashed);
        for o in variants {
            let r = classify(&o).unwrap();
            assert_eq!(r.representatives, base.representatives, "BH({n},{q}) {o:?}");
            assert_eq!(r.stats, base.stats, "BH({n},{q}) {o:?}");
        }
    }
}

#[test]
fn tiny_memory_cap_falls_back_to_shorter_suffixes() {
    let mut o = SearchOptions::new(8, 4);
    o.use_hash_extension = true;
    o.hash.memory_cap = 2_000;
    let r = classify(&o).unwrap();
    assert_eq!(r.representatives.len(), 15);
}

#[test]
fn nonexistence_cells() {
    for (n, q) in [(5, 6), (6, 2), (10, 2), (3, 2), (6, 10)] {
        let r = classify(&SearchOptions::new(n, q)).unwrap();
        assert!(r.representatives.is_empty(), "BH({n},{q})");
    }
    let tree = count_tree(&SearchOptions::new(8, 15)).unwrap();
    assert_eq!(tree.until_exhausted(), &[1, 1, 6, 0]);
}

#[test]
fn max_depth_limits_the_tree() {
    let mut o = SearchOptions::new(9, 6);
    o.max_depth = Some(3);
    let r = classify(&o).unwrap();
    assert!(r.representatives.is_empty());
    assert_eq!(r.stats.counts, vec![1, 4, 68]);
}

#[test]
fn type_filter_partitions_quaternary_classes() {
    for n in [8, 10] {
        let all = classify(&SearchOptions::new(n, 4)).unwrap().representatives;
        let mut union = Vec::new();
        for k in 0..=n / 4 {
            let mut o = SearchOptions::new(n, 4);
            o.type_filter = Some(k);
            let part = classify(&o).unwrap().representatives;
            assert!(part.iter().all(|h| matrix_type(h).unwrap() == k));
            union.extend(part);
        }
        union.sort_by(|a, b| a.as_slice().cmp(b.as_slice()));
        assert_eq!(union, all);
    }
    assert!(classify(&{
        let mut o = SearchOptions::new(6, 6);
        o.type_filter = Some(1);
        o
    })
    .is_err());
}

#[test]
fn pair_types() {
    let r = |v: Vec<u8>| LogRow::new(4, v).unwrap();
    assert_eq!(pair_type(&r(vec![0; 8]), &r(vec![0, 0, 0, 0, 2, 2, 2, 2])).unwrap(), 0);
    assert_eq!(pair_type(&r(vec![0; 8]), &r(vec![0, 0, 0, 1, 1, 2, 3, 3])).unwrap(), 1);
    assert_eq!(pair_type(&r(vec![0; 8]), &r(vec![0, 0, 1, 1, 2, 2, 3, 3])).unwrap(), 2);
}

#[test]
fn interrupted_run_resumes_from_the_journal() {
    let dir = tempfile::tempdir().unwrap();
    let journal = dir.path().join("run.journal");
    let mut o = SearchOptions::new(9, 6);
    o.seed_depth = 3;
    let expected = classify(&o).unwrap();
    o.journal = Some(journal.clone());
    o.stop_after = Some(20);
    match classify(&o) {
        Err(Error::Incomplete { completed, total }) => {
            assert_eq!((completed, total), (20, 68));
        }
        other => panic!("expected an incomplete run, got {other:?}"),
    }
    let lines = fs::read_to_string(&journal).unwrap();
    assert_eq!(lines.lines().count(), 21);
    assert!(lines.starts_with("# n=9 q=6 seed_depth=3 seeds=68"));
    o.stop_after = Some(30);
    assert!(matches!(classify(&o), Err(Error::Incomplete { completed: 50, .. })));
    o.stop_after = None;
    let resumed = classify(&o).unwrap();
    assert_eq!(resumed.representatives, expected.representatives);
    assert_eq!(resumed.stats, expected.stats);
    assert!(staging_dir(&journal).is_dir());

    // a journal from another configuration is refused
    let mut other = SearchOptions::new(9, 6);
    other.seed_depth = 2;
    other.journal = Some(journal);
    assert!(matches!(classify(&other), Err(Error::Precondition(_))));
}

#[test]
fn invalid_options() {
    assert!(classify(&SearchOptions::new(0, 4)).is_err());
    assert!(classify(&SearchOptions::new(4, 1)).is_err());
    assert!(classify(&SearchOptions::new(4, 256)).is_err());
    let one = classify(&SearchOptions::new(1, 5)).unwrap();
    assert_eq!(one.representatives.len(), 1);
}
