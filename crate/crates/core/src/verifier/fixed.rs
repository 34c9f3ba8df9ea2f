//! The published counterexamples, checked on their exact inputs.

use std::fmt;

use serde::Serialize;
use serde_json::Value;

use crate::denotational::{den_eq_stable, den_expr, den_heap, preceq, show_table, HeapVariant, Verdict};
use crate::domain::{convert, fn_make, leq, DomElem, DomainError, Env};
use crate::natural::eval_nat;
use crate::syntax::{heap_alpha_eq, heap_print, parse, print, Expr, Heap, Name, NameSet, SynValue};

use super::CheckReport;

use HeapVariant::{Join, Update};

fn id(rank: u8) -> DomElem {
    fn_make(rank, |a| a).expect("identity is monotone")
}

fn konst(rank: u8, v: DomElem) -> DomElem {
    fn_make(rank, |_| v).expect("constant is monotone")
}

fn name(s: &str) -> Name {
    Name::new(s)
}

fn expr(s: &str) -> Expr {
    parse(s).expect("fixed input parses")
}

struct Counterexample {
    heap: Heap,
    expr: Expr,
    value: Expr,
    env: Env,
}

fn counterexample() -> Counterexample {
    Counterexample {
        heap: Heap::of(&[("x", r"\a. let b = b in b")]),
        expr: expr("x"),
        value: expr(r"\a. let b = b in b"),
        env: Env::from_pairs(3, [(name("x"), konst(3, id(2)))]),
    }
}

/// Both sides at rank `k`, with the environment moved there from rank 3.
fn sides(c: &Counterexample, env: &Env, k: u8, v: HeapVariant) -> Result<(DomElem, DomElem), DomainError> {
    let env = env.convert(k)?;
    let lhs = den_expr(&c.expr, &den_heap(&c.heap, &env, k, v)?, k, v)?;
    let rhs = den_expr(&c.value, &den_heap(&c.heap, &env, k, v)?, k, v)?;
    Ok((lhs, rhs))
}

fn stable(c: &Counterexample, env: &Env, v: HeapVariant) -> Result<Verdict, DomainError> {
    den_eq_stable(|k| Ok(sides(c, env, k, v)?.0), |k| Ok(sides(c, env, k, v)?.1), 2, &[3, 4])
}

/// Values of both sides at one rank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SideReport {
    pub rank: u8,
    pub lhs: String,
    pub rhs: String,
}

/// The counterexample computed under both heap semantics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CounterexampleSummary {
    pub heap: String,
    pub expr: String,
    pub value: String,
    pub env: Value,
    pub evaluates: bool,
    pub join_variant: &'static str,
    pub join_witness: Option<String>,
    pub join: Vec<SideReport>,
    pub update_variant: &'static str,
    pub update: Vec<SideReport>,
    pub update_preceq: bool,
    pub bot_env_join_variant: &'static str,
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Equal => "equal",
        Verdict::NotEqual { .. } => "not_equal",
        Verdict::Inconclusive { .. } => "inconclusive",
    }
}

fn side_reports(c: &Counterexample, v: HeapVariant, show: fn(DomElem) -> String) -> Result<Vec<SideReport>, DomainError> {
    [3, 4]
        .into_iter()
        .map(|k| {
            let (l, r) = sides(c, &c.env, k, v)?;
            Ok(SideReport { rank: k, lhs: show(l), rhs: show(r) })
        })
        .collect()
}

/// Short form: rank-3 tables in full, others as `Debug`.
fn show_short(u: DomElem) -> String {
    if u.rank() <= 3 {
        show_table(u)
    } else {
        format!("{u:?}")
    }
}

pub fn counterexample_summary() -> Result<CounterexampleSummary, DomainError> {
    let c = counterexample();
    let evaluates = evaluates_to_value(&c);
    let join = stable(&c, &c.env, Join)?;
    let update = stable(&c, &c.env, Update)?;
    let bot = stable(&c, &Env::bot(3), Join)?;
    Ok(CounterexampleSummary {
        heap: heap_print(&c.heap),
        expr: print(&c.expr),
        value: print(&c.value),
        env: c.env.to_json(),
        evaluates,
        join_variant: verdict_name(&join),
        join_witness: match join {
            Verdict::NotEqual { witness } => Some(witness),
            _ => None,
        },
        join: side_reports(&c, Join, show_short)?,
        update_variant: verdict_name(&update),
        update: side_reports(&c, Update, show_short)?,
        update_preceq: preceq(&c.heap, &c.env, &c.heap, &c.env, 3, Update)?,
        bot_env_join_variant: verdict_name(&bot),
    })
}

impl fmt::Display for CounterexampleSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "heap   {}", self.heap)?;
        writeln!(f, "expr   {}  evaluates to {}: {}", self.expr, self.value, self.evaluates)?;
        writeln!(f, "env    {}", self.env)?;
        writeln!(f, "join:   {}", self.join_variant)?;
        if let Some(w) = &self.join_witness {
            writeln!(f, "        {w}")?;
        }
        for s in &self.join {
            writeln!(f, "        rank {}: lhs {}  rhs {}", s.rank, s.lhs, s.rhs)?;
        }
        writeln!(f, "update: {} (heaps related: {})", self.update_variant, self.update_preceq)?;
        for s in &self.update {
            writeln!(f, "        rank {}: lhs {}  rhs {}", s.rank, s.lhs, s.rhs)?;
        }
        write!(f, "join with the empty environment: {}", self.bot_env_join_variant)
    }
}

fn evaluates_to_value(c: &Counterexample) -> bool {
    let res = eval_nat(&c.heap, &c.expr, &NameSet::new(), 64);
    let v = SynValue::from_expr(&c.value).expect("a lambda");
    let protect: NameSet = c.heap.domain();
    res.success().is_some_and(|(delta, got)| heap_alpha_eq((delta, got), (&c.heap, &v), &protect))
}

fn record(r: &mut CheckReport, c: &Counterexample, env: &Env, holds: bool, lhs: impl fmt::Debug, rhs: impl fmt::Debug, what: &str) {
    r.assert(holds, &c.heap, &c.expr, env, format!("{lhs:?}"), format!("{rhs:?}"), what);
}

fn check_counterexample_inner(r: &mut CheckReport) -> Result<(), DomainError> {
    let c = counterexample();
    record(r, &c, &c.env, evaluates_to_value(&c), "x", print(&c.value), "x evaluates to the lambda");

    let join_lhs = konst(3, id(2));
    let join_rhs = konst(3, DomElem::bot(2));
    let (l3, r3) = sides(&c, &c.env, 3, Join)?;
    record(r, &c, &c.env, l3 == join_lhs, l3, join_lhs, "join lhs at rank 3");
    record(r, &c, &c.env, r3 == join_rhs, r3, join_rhs, "join rhs at rank 3");
    let (l4, r4) = sides(&c, &c.env, 4, Join)?;
    let want = convert(join_lhs, 4)?;
    record(r, &c, &c.env, l4 == want, l4, want, "join lhs at rank 4");
    let want = konst(4, DomElem::bot(3));
    record(r, &c, &c.env, r4 == want, r4, want, "join rhs at rank 4");
    let v = stable(&c, &c.env, Join)?;
    let ok = matches!(v, Verdict::NotEqual { .. });
    record(r, &c, &c.env, ok, &v, "not_equal", "join sides differ");

    for k in [3, 4] {
        let (l, rr) = sides(&c, &c.env, k, Update)?;
        record(r, &c, &c.env, l == rr, l, rr, &format!("update sides agree at rank {k}"));
    }
    let v = stable(&c, &c.env, Update)?;
    record(r, &c, &c.env, v == Verdict::Equal, &v, "equal", "update sides equal");
    let p = preceq(&c.heap, &c.env, &c.heap, &c.env, 3, Update)?;
    record(r, &c, &c.env, p, p, true, "update heaps related");

    let bot = Env::bot(3);
    let (l, rr) = sides(&c, &bot, 3, Join)?;
    record(r, &c, &bot, l == join_rhs && rr == join_rhs, l, rr, "join with empty environment");
    let v = stable(&c, &bot, Join)?;
    record(r, &c, &bot, v == Verdict::Equal, &v, "equal", "join with empty environment is equal");
    Ok(())
}

/// The counterexample to the generalized theorem under the join-based heap
/// semantics, and its repair under the update-based one.
pub fn check_counterexample() -> CheckReport {
    let mut r = CheckReport::new("counterexample", 1);
    if let Err(e) = check_counterexample_inner(&mut r) {
        r.assert(false, &Heap::new(), &expr("x"), &Env::bot(3), "-".into(), "-".into(), &format!("domain error: {e}"));
    }
    r
}

/// `ρ x ⊑ ⟦e⟧ρ` for every binding.
fn pointwise_below(env: &Env, heap: &Heap) -> Result<bool, DomainError> {
    for (x, e) in heap.iter() {
        if !leq(env.get(x), den_expr(e, env, env.rank(), Join)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `ρ x ⊑ ⟦e⟧(⟦Γ⟧ρ)` for every binding.
fn pointwise_below_heap(env: &Env, heap: &Heap) -> Result<bool, DomainError> {
    let fix = den_heap(heap, env, env.rank(), Join)?;
    for (x, e) in heap.iter() {
        if !leq(env.get(x), den_expr(e, &fix, env.rank(), Join)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_failed_fixes_inner(r: &mut CheckReport) -> Result<(), DomainError> {
    let e = expr("x");

    // Invariant relating entries to the environment alone.
    let gamma = Heap::of(&[("x", r"let y = z in \u. y")]);
    let delta = Heap::of(&[("x", r"\u. y"), ("y", "z")]);
    let env = Env::from_pairs(
        3,
        [(name("x"), konst(3, konst(2, DomElem::bot(1)))), (name("z"), konst(3, DomElem::bot(2)))],
    );
    let protect: NameSet = [name("x"), name("z")].into();
    let want_v = SynValue::from_expr(&expr(r"\u. y")).expect("lambda");
    let evaluated = eval_nat(&gamma, &e, &NameSet::new(), 64)
        .success()
        .is_some_and(|(h, v)| heap_alpha_eq((h, v), (&delta, &want_v), &protect));
    r.assert(evaluated, &gamma, &e, &env, "-".into(), heap_print(&delta), "evaluating x yields the published heap");
    let before = pointwise_below(&env, &gamma)?;
    r.assert(before, &gamma, &e, &env, format!("{before}"), "true".into(), "first invariant holds before");
    let after = pointwise_below(&env, &delta)?;
    r.assert(!after, &delta, &e, &env, format!("{after}"), "false".into(), "first invariant fails after");

    // Invariant relating entries to the heap's denotation.
    let gamma = Heap::of(&[("x", r"\z. z"), ("y", "x")]);
    let inner = Heap::of(&[("y", "x")]);
    let env = Env::from_pairs(3, [(name("y"), id(3))]);
    let before = pointwise_below_heap(&env, &gamma)?;
    r.assert(before, &gamma, &e, &env, format!("{before}"), "true".into(), "second invariant holds before");
    let after = pointwise_below_heap(&env, &inner)?;
    r.assert(!after, &inner, &e, &env, format!("{after}"), "false".into(), "second invariant fails on the inner heap");

    // Agreement on non-Bot entries does not give equal lookups.
    let looped = Heap::of(&[("x", "x")]);
    let defined = Heap::of(&[("x", r"\a. a")]);
    for env in [Env::bot(3), Env::from_pairs(3, [(name("q"), id(3))])] {
        let a = den_heap(&looped, &env, 3, Join)?;
        let b = den_heap(&defined, &env, 3, Join)?;
        let (ax, bx) = (a.get(&name("x")), b.get(&name("x")));
        r.assert(ax.is_bot(), &looped, &e, &env, format!("{ax:?}"), "Bot3".into(), "self-loop denotes Bot");
        r.assert(a.le(&b), &looped, &e, &env, format!("{a:?}"), format!("{b:?}"), "agreement where defined holds");
        r.assert(ax != bx, &looped, &e, &env, format!("{ax:?}"), format!("{bx:?}"), "lookups differ");
        let rel = preceq(&looped, &env, &defined, &env, 3, Join)?;
        r.assert(!rel, &looped, &e, &env, format!("{rel}"), "false".into(), "the stricter relation rejects it");
    }
    Ok(())
}

/// The two published invariants that fail to be preserved, and the lookup
/// pitfall of the weaker heap order.
pub fn check_failed_fixes() -> CheckReport {
    let mut r = CheckReport::new("failed_fixes", 1);
    if let Err(e) = check_failed_fixes_inner(&mut r) {
        r.assert(false, &Heap::new(), &expr("x"), &Env::bot(3), "-".into(), "-".into(), &format!("domain error: {e}"));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counterexample_checks_out() {
        let r = check_counterexample();
        assert!(r.ok(), "{r}");
        assert_eq!(r.passed, 12);
    }

    #[test]
    fn failed_fixes_check_out() {
        let r = check_failed_fixes();
        assert!(r.ok(), "{r}");
        assert_eq!(r.passed, 13);
    }

    #[test]
    fn summary_verdicts() {
        let s = counterexample_summary().unwrap();
        assert!(s.evaluates);
        assert_eq!(s.join_variant, "not_equal");
        assert_eq!(s.update_variant, "equal");
        assert_eq!(s.bot_env_join_variant, "equal");
        assert!(s.update_preceq);
        assert_eq!(s.join_witness.as_deref(), Some("apply to Bot: Fn vs Bot"));
        let k = id(2).index().unwrap();
        assert_eq!(s.join[0].lhs, format!("Fn3{{0 ↦ {k}, 1 ↦ {k}, 2 ↦ {k}, 3 ↦ {k}}}"));
    }
}
