//! Runs the property suites on generated programs.
//!
//! `cargo run --release --example check -- [cases] [seed]`

use lazylab::verifier::{run_suite, GenConfig, RunOptions, Suite};

fn main() {
    let mut args = std::env::args().skip(1);
    let cases = args.next().map_or(200, |s| s.parse().expect("cases"));
    let seed = args.next().map_or(42, |s| s.parse().expect("seed"));
    let cfg = GenConfig { cases, seed, ..GenConfig::default() };
    let opts = RunOptions { timings: true, ..RunOptions::default() };
    for suite in [Suite::Counterexamples, Suite::Theorems, Suite::Equivalence, Suite::Lemmas] {
        for report in run_suite(suite, &cfg, opts) {
            println!("{report}");
        }
    }
}
