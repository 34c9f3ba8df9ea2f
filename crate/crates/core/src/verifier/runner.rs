//! Runs a property over seeded cases, in parallel batches, and shrinks
//! failures.

use std::time::Instant;

use rayon::prelude::*;
use serde_json::Value;

use crate::domain::{DomainError, Env};
use crate::syntax::{heap_print, print, Expr, Heap};

use super::source::{case_seed, shrink_candidates, simpler, Source};
use super::{CheckReport, GenConfig, Witness};

/// Result of one case.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Outcome {
    Pass,
    Fail { lhs: String, rhs: String, detail: String },
    Inconclusive(String),
    /// The generated input did not satisfy the property's hypotheses.
    Skip,
}

impl Outcome {
    pub fn fail(lhs: impl ToString, rhs: impl ToString, detail: impl Into<String>) -> Outcome {
        Outcome::Fail { lhs: lhs.to_string(), rhs: rhs.to_string(), detail: detail.into() }
    }

    pub fn from_domain(e: DomainError) -> Outcome {
        Outcome::fail("-", "-", format!("domain error: {e}"))
    }

    fn is_fail(&self) -> bool {
        matches!(self, Outcome::Fail { .. })
    }
}

impl From<DomainError> for Outcome {
    fn from(e: DomainError) -> Outcome {
        Outcome::from_domain(e)
    }
}

/// A case together with the inputs shown if it fails.
#[derive(Debug, Clone)]
pub(crate) struct Trial {
    pub heap: Heap,
    pub expr: Option<Expr>,
    pub env: Env,
    pub outcome: Outcome,
}

impl Trial {
    pub fn new(heap: &Heap, expr: &Expr, env: &Env, outcome: Outcome) -> Trial {
        Trial { heap: heap.clone(), expr: Some(expr.clone()), env: env.clone(), outcome }
    }

    /// A case about a heap alone.
    pub fn heap_only(heap: &Heap, env: &Env, outcome: Outcome) -> Trial {
        Trial { heap: heap.clone(), expr: None, env: env.clone(), outcome }
    }

    /// Rough size used to order witnesses while shrinking.
    fn size(&self) -> usize {
        let heap: usize = self.heap.iter().map(|(_, e)| 1 + e.size()).sum();
        heap + self.expr.as_ref().map_or(0, Expr::size) + self.env.iter().count()
    }
}

pub(crate) type Property = fn(&mut Source, &GenConfig) -> Trial;

/// How a property is run.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; 0 picks the number of CPUs.
    pub jobs: usize,
    /// Record wall-clock durations in reports.
    pub timings: bool,
}

const ATTEMPT_FACTOR: u64 = 10;
const SHRINK_BUDGET: usize = 400;
const MAX_WITNESSES: usize = 5;

fn run_case(prop: Property, cfg: &GenConfig, id: &str, index: u64) -> (Trial, Vec<u32>) {
    let mut src = Source::random(case_seed(cfg.seed, id, index));
    let trial = prop(&mut src, cfg);
    (trial, src.choices().to_vec())
}

fn shrink(prop: Property, cfg: &GenConfig, mut best: Trial, mut choices: Vec<u32>) -> Trial {
    let mut budget = SHRINK_BUDGET;
    'outer: while budget > 0 {
        for cand in shrink_candidates(&choices) {
            if budget == 0 {
                break 'outer;
            }
            budget -= 1;
            let mut src = Source::replay(cand);
            let t = prop(&mut src, cfg);
            let used = src.choices().to_vec();
            if t.outcome.is_fail() && t.size() <= best.size() && simpler(&used, &choices) {
                best = t;
                choices = used;
                continue 'outer;
            }
        }
        break;
    }
    // Replaying the final choices must fail again.
    let again = prop(&mut Source::replay(choices), cfg);
    if again.outcome.is_fail() {
        again
    } else {
        best
    }
}

/// Runs `prop` until `cfg.cases` cases satisfied its hypotheses, or until
/// ten times as many were attempted.
pub(crate) fn run_property(id: &str, prop: Property, cfg: &GenConfig, opts: RunOptions) -> CheckReport {
    let start = Instant::now();
    let target = cfg.cases;
    let max_attempts = target * ATTEMPT_FACTOR;
    let batch = (rayon::current_num_threads() as u64 * 4).max(16);
    let mut report = CheckReport::new(id, target.min(50));
    let mut index = 0;
    while report.cases_run < target && index < max_attempts {
        let end = (index + batch).min(max_attempts);
        let results: Vec<(Trial, Vec<u32>)> =
            (index..end).into_par_iter().map(|i| run_case(prop, cfg, id, i)).collect();
        for (i, (trial, choices)) in (index..end).zip(results) {
            if report.cases_run >= target {
                break;
            }
            match &trial.outcome {
                Outcome::Pass => report.passed += 1,
                Outcome::Inconclusive(_) => report.inconclusive += 1,
                Outcome::Skip => {
                    report.skipped += 1;
                    continue;
                }
                Outcome::Fail { .. } => {
                    report.failed += 1;
                    if report.witnesses.len() < MAX_WITNESSES {
                        let small = shrink(prop, cfg, trial, choices);
                        report.witnesses.push(witness(i, &small));
                    }
                }
            }
            report.cases_run += 1;
        }
        index = end;
    }
    if opts.timings {
        report.duration_ms = Some(start.elapsed().as_millis() as u64);
    }
    report
}

fn witness(index: u64, t: &Trial) -> Witness {
    let Outcome::Fail { lhs, rhs, detail } = &t.outcome else {
        unreachable!("only failures are reported")
    };
    Witness {
        seed_index: index,
        heap: heap_print(&t.heap),
        expr: t.expr.as_ref().map_or_else(|| "-".to_string(), print),
        env: if t.env.iter().count() == 0 { Value::Null } else { t.env.to_json() },
        lhs: lhs.clone(),
        rhs: rhs.clone(),
        detail: detail.clone(),
    }
}

/// Runs `f` on a thread pool with `jobs` workers.
pub(crate) fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .stack_size(16 << 20)
        .build()
        .expect("thread pool");
    pool.install(f)
}
