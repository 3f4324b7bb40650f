//! Times one classification: `cargo run --release --example classify -- N Q [hash|pruned] [DEPTH]`.

use std::time::Instant;

use butson::search::{classify, SearchOptions};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(8);
    let q: u32 = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(4);
    let mut opts = SearchOptions::new(n, q);
    opts.use_hash_extension = args.get(3).is_some_and(|a| a == "hash");
    opts.compute_aut = false;
    opts.max_depth = args.get(4).and_then(|a| a.parse().ok());
    let start = Instant::now();
    let r = classify(&opts).expect("classification");
    println!(
        "BH({n},{q}): {} classes, tree {:?}, {:.2?}",
        r.representatives.len(),
        r.stats.counts,
        start.elapsed()
    );
}
