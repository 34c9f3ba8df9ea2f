//! The environment under which evaluation seems to change the meaning of a
//! heap, and how updating heaps instead of joining them repairs it.

use lazylab::verifier::{check_counterexample, check_failed_fixes, counterexample_summary};

fn main() {
    println!("{}", counterexample_summary().unwrap());
    println!();
    println!("{}", check_counterexample());
    println!("{}", check_failed_fixes());
}
