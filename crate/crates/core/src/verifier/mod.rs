//! Executable checks of the correctness theorems, the published
//! counterexamples and the heap-denotation lemmas, over generated programs.
//!
//! Every property has a stable id. Cases are seeded by `(seed, id, index)`,
//! so a report depends only on the configuration, not on scheduling.

mod fixed;
mod gen;
mod lemmas;
mod runner;
mod source;
mod theorems;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;

pub use fixed::{check_counterexample, check_failed_fixes, counterexample_summary, CounterexampleSummary, SideReport};
pub use gen::well_scoped;
pub use runner::RunOptions;
pub use theorems::Theorem;

use crate::domain::{Env, MAX_RANK};
use crate::syntax::{Expr, Heap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub max_expr_size: usize,
    pub max_heap_bindings: usize,
    pub rank: u8,
    pub fuel: u64,
    /// Cases per property that satisfy its hypotheses.
    pub cases: u64,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig { seed: 42, max_expr_size: 8, max_heap_bindings: 4, rank: 3, fuel: 64, cases: 300 }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.rank == 0 || self.rank > MAX_RANK {
            return Err(format!("rank must be in 1..={MAX_RANK}, got {}", self.rank));
        }
        if self.max_expr_size == 0 || self.max_heap_bindings == 0 || self.fuel == 0 || self.cases == 0 {
            return Err("size bounds, fuel and cases must be at least 1".into());
        }
        Ok(())
    }
}

/// A failing case, shrunk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub seed_index: u64,
    pub heap: String,
    pub expr: String,
    pub env: Value,
    pub lhs: String,
    pub rhs: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub property_id: String,
    /// `passed + failed + inconclusive`.
    pub cases_run: u64,
    pub passed: u64,
    pub failed: u64,
    pub inconclusive: u64,
    /// Generated inputs outside the property's hypotheses; not counted in
    /// `cases_run`.
    pub skipped: u64,
    /// Minimum `cases_run` for the check to count.
    pub quota: u64,
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<u64>,
}

impl CheckReport {
    pub(crate) fn new(id: &str, quota: u64) -> CheckReport {
        CheckReport {
            property_id: id.to_string(),
            cases_run: 0,
            passed: 0,
            failed: 0,
            inconclusive: 0,
            skipped: 0,
            quota,
            witnesses: Vec::new(),
            duration_ms: None,
        }
    }

    pub fn quota_met(&self) -> bool {
        self.cases_run >= self.quota
    }

    /// No failures and enough non-vacuous cases. Inconclusive cases do not
    /// count against a report.
    pub fn ok(&self) -> bool {
        self.failed == 0 && self.quota_met()
    }

    /// Records a single fixed assertion.
    pub(crate) fn assert(&mut self, holds: bool, heap: &Heap, expr: &Expr, env: &Env, lhs: String, rhs: String, detail: &str) {
        self.cases_run += 1;
        if holds {
            self.passed += 1;
        } else {
            self.failed += 1;
            self.witnesses.push(Witness {
                seed_index: self.cases_run - 1,
                heap: crate::syntax::heap_print(heap),
                expr: crate::syntax::print(expr),
                env: env.to_json(),
                lhs,
                rhs,
                detail: detail.to_string(),
            });
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if !self.quota_met() {
            "VACUOUS"
        } else if self.failed > 0 {
            "FAIL"
        } else {
            "ok"
        };
        write!(
            f,
            "{:<24} {status:<7} {} passed, {} failed, {} inconclusive, {} skipped",
            self.property_id, self.passed, self.failed, self.inconclusive, self.skipped
        )?;
        if let Some(ms) = self.duration_ms {
            write!(f, " ({ms} ms)")?;
        }
        for w in &self.witnesses {
            write!(f, "\n    case {}: heap {} expr {}", w.seed_index, w.heap, w.expr)?;
            if !w.env.is_null() {
                write!(f, " env {}", w.env)?;
            }
            write!(f, "\n      lhs {}\n      rhs {}\n      {}", w.lhs, w.rhs, w.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    All,
    Theorems,
    Lemmas,
    Counterexamples,
    Equivalence,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Suite, String> {
        Ok(match s {
            "all" => Suite::All,
            "theorems" => Suite::Theorems,
            "lemmas" => Suite::Lemmas,
            "counterexamples" => Suite::Counterexamples,
            "equivalence" => Suite::Equivalence,
            _ => return Err(format!("unknown suite `{s}`")),
        })
    }
}

enum Check {
    Fixed(fn() -> CheckReport),
    Generated(runner::Property),
}

struct Entry {
    id: &'static str,
    suite: Suite,
    check: Check,
}

fn registry() -> Vec<Entry> {
    use Check::{Fixed, Generated};
    use Suite::*;
    let mut out = vec![
        Entry { id: "counterexample", suite: Counterexamples, check: Fixed(check_counterexample) },
        Entry { id: "failed_fixes", suite: Counterexamples, check: Fixed(check_failed_fixes) },
        Entry { id: "theorem_nat1", suite: Theorems, check: Generated(theorems::nat1) },
        Entry { id: "theorem_update2", suite: Theorems, check: Generated(theorems::update2) },
        Entry { id: "theorem_stacked5", suite: Theorems, check: Generated(theorems::stacked5) },
        Entry { id: "deneq", suite: Theorems, check: Generated(theorems::deneq) },
        Entry { id: "equivalence", suite: Equivalence, check: Generated(theorems::equivalence) },
    ];
    for &(id, prop) in lemmas::LEMMAS {
        out.push(Entry { id, suite: Lemmas, check: Generated(prop) });
    }
    out
}

/// Property ids in a suite, in run order.
pub fn suite_ids(selection: Suite) -> Vec<&'static str> {
    registry()
        .into_iter()
        .filter(|e| selection == Suite::All || e.suite == selection)
        .map(|e| e.id)
        .collect()
}

/// Runs one property by id.
pub fn run_property(id: &str, cfg: &GenConfig, opts: RunOptions) -> Option<CheckReport> {
    let entry = registry().into_iter().find(|e| e.id == id)?;
    Some(run_entry(&entry, cfg, opts))
}

fn run_entry(entry: &Entry, cfg: &GenConfig, opts: RunOptions) -> CheckReport {
    match entry.check {
        Check::Fixed(f) => {
            let start = std::time::Instant::now();
            let mut r = f();
            if opts.timings {
                r.duration_ms = Some(start.elapsed().as_millis() as u64);
            }
            r
        }
        Check::Generated(p) => runner::run_property(entry.id, p, cfg, opts),
    }
}

/// Runs every property of `selection`. Reports come back in registry order
/// and are independent of `opts.jobs`.
pub fn run_suite(selection: Suite, cfg: &GenConfig, opts: RunOptions) -> Vec<CheckReport> {
    runner::with_jobs(opts.jobs, || {
        registry()
            .iter()
            .filter(|e| selection == Suite::All || e.suite == selection)
            .map(|e| run_entry(e, cfg, opts))
            .collect()
    })
}

/// One-off check of a theorem by name.
pub fn check_theorem_correctness(cfg: &GenConfig, which: Theorem, opts: RunOptions) -> CheckReport {
    let id = match which {
        Theorem::Nat1 => "theorem_nat1",
        Theorem::Update2 => "theorem_update2",
        Theorem::Stacked5 => "theorem_stacked5",
    };
    runner::with_jobs(opts.jobs, || run_property(id, cfg, opts).expect("registered"))
}

pub fn check_theorem_equivalence(cfg: &GenConfig, opts: RunOptions) -> CheckReport {
    runner::with_jobs(opts.jobs, || run_property("equivalence", cfg, opts).expect("registered"))
}

/// Checks one lemma by id; `None` for an unknown id.
pub fn check_lemma(id: &str, cfg: &GenConfig, opts: RunOptions) -> Option<CheckReport> {
    if !lemmas::LEMMAS.iter().any(|(l, _)| *l == id) && id != "deneq" {
        return None;
    }
    runner::with_jobs(opts.jobs, || run_property(id, cfg, opts))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The suite must cover exactly these properties.
    const MANIFEST: &[(&str, &[&str])] = &[
        ("counterexamples", &["counterexample", "failed_fixes"]),
        ("theorems", &["theorem_nat1", "theorem_update2", "theorem_stacked5", "deneq"]),
        ("equivalence", &["equivalence"]),
        (
            "lemmas",
            &[
                "esem_this",
                "esem_other",
                "rho_below_esem",
                "esem_below",
                "esem_subst_expr_below",
                "esem_subst_expr",
                "exp_var_subst",
                "redo",
                "see_through_fresh",
                "addvar",
                "esem_merge",
                "let_unfold",
                "esemu_this",
                "esemu_other",
                "iter",
                "subst",
                "esemu_merge",
            ],
        ),
    ];

    #[test]
    fn registry_matches_manifest() {
        let mut all = Vec::new();
        for (suite, ids) in MANIFEST {
            let got = suite_ids(suite.parse().unwrap());
            assert_eq!(&got, ids, "suite {suite}");
            all.extend_from_slice(ids);
        }
        let mut got = suite_ids(Suite::All);
        got.sort_unstable();
        all.sort_unstable();
        assert_eq!(got, all);
        let mut dedup = all.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), all.len(), "ids are unique");
    }

    #[test]
    fn config_validation() {
        assert!(GenConfig::default().validate().is_ok());
        assert!(GenConfig { rank: 5, ..GenConfig::default() }.validate().is_err());
        assert!(GenConfig { cases: 0, ..GenConfig::default() }.validate().is_err());
    }
}
