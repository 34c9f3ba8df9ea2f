//! Correctness and equivalence theorems on generated configurations.
//!
//! Equalities across a beta step are compared with [`den_eq_stable`], since
//! the embedding-projection pairs round functions at a fixed rank. The
//! one-sided bound `lhs ⊑ rhs` survives that rounding and is checked at the
//! working rank.

use crate::denotational::{den_eq_stable, den_expr, den_heap, HeapVariant, Verdict};
use crate::domain::{leq, DomElem, DomainError, Env, MAX_RANK};
use crate::natural::{eval_nat, OutcomeKind};
use crate::stacked::{run_via_stack, run_via_stack_traced, StackResult};
use crate::syntax::{heap_alpha_eq, Expr, Heap, NameSet};

use super::gen::{closed_config, open_config};
use super::runner::{Outcome, Trial};
use super::source::Source;
use super::GenConfig;

use HeapVariant::{Join, Update};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    /// Evaluation preserves denotation, from the empty environment.
    Nat1,
    /// The generalization to every environment, for update-based heaps.
    Update2,
    /// Stacked evaluation preserves the denotation of heap and stack.
    Stacked5,
}

/// Observation rank and the ranks it is observed at.
fn observation(rank: u8) -> (u8, Vec<u8>) {
    if rank < MAX_RANK {
        (rank - 1, vec![rank, rank + 1])
    } else {
        (rank - 1, vec![rank])
    }
}

fn env_at(env: &Env, k: u8) -> Result<Env, DomainError> {
    if env.rank() == k {
        Ok(env.clone())
    } else {
        env.convert(k)
    }
}

/// `⟦e⟧(⟦Γ⟧ρ)` at rank `k`.
fn in_heap(e: &Expr, heap: &Heap, env: &Env, k: u8, v: HeapVariant) -> Result<DomElem, DomainError> {
    let env = env_at(env, k)?;
    den_expr(e, &den_heap(heap, &env, k, v)?, k, v)
}

/// Compares two rank-indexed sides: stabilized equality plus the rank-exact
/// bound. `Ok(None)` means both hold.
fn compare(
    mut lhs: impl FnMut(u8) -> Result<DomElem, DomainError>,
    mut rhs: impl FnMut(u8) -> Result<DomElem, DomainError>,
    rank: u8,
    what: &str,
) -> Result<Option<Outcome>, DomainError> {
    let (l, r) = (lhs(rank)?, rhs(rank)?);
    if !leq(l, r) {
        return Ok(Some(Outcome::fail(format!("{l:?}"), format!("{r:?}"), format!("{what}: lhs not below rhs"))));
    }
    let (m, ranks) = observation(rank);
    Ok(match den_eq_stable(&mut lhs, &mut rhs, m, &ranks)? {
        Verdict::Equal => None,
        Verdict::NotEqual { witness } => {
            Some(Outcome::fail(format!("{l:?}"), format!("{r:?}"), format!("{what}: {witness}")))
        }
        Verdict::Inconclusive { reason } => Some(Outcome::Inconclusive(format!("{what}: {reason}"))),
    })
}

fn finish(checks: impl IntoIterator<Item = Result<Option<Outcome>, DomainError>>) -> Outcome {
    let mut inconclusive = None;
    for c in checks {
        match c {
            Err(e) => return Outcome::from_domain(e),
            Ok(Some(o @ Outcome::Fail { .. })) => return o,
            Ok(Some(o)) => inconclusive = inconclusive.or(Some(o)),
            Ok(None) => {}
        }
    }
    inconclusive.unwrap_or(Outcome::Pass)
}

pub(crate) fn nat1(src: &mut Source, cfg: &GenConfig) -> Trial {
    let (heap, e) = closed_config(src, cfg);
    let bot = Env::bot(cfg.rank);
    let res = eval_nat(&heap, &e, &NameSet::new(), cfg.fuel);
    let Some((delta, v)) = res.success() else {
        return Trial::new(&heap, &e, &bot, Outcome::Skip);
    };
    let v = v.to_expr();
    let outcome = finish([compare(
        |k| in_heap(&e, &heap, &Env::bot(k), k, Join),
        |k| in_heap(&v, delta, &Env::bot(k), k, Join),
        cfg.rank,
        "expression",
    )]);
    Trial::new(&heap, &e, &bot, outcome)
}

pub(crate) fn update2(src: &mut Source, cfg: &GenConfig) -> Trial {
    let (heap, e, env) = open_config(src, cfg, true);
    let res = eval_nat(&heap, &e, &env.dom(), cfg.fuel);
    let Some((delta, v)) = res.success() else {
        return Trial::new(&heap, &e, &env, Outcome::Skip);
    };
    let v = v.to_expr();
    let mut checks = vec![compare(
        |k| in_heap(&e, &heap, &env, k, Update),
        |k| in_heap(&v, delta, &env, k, Update),
        cfg.rank,
        "expression",
    )];
    if !heap.domain().is_subset(&delta.domain()) {
        checks.push(Ok(Some(Outcome::fail(
            format!("{:?}", heap.domain()),
            format!("{:?}", delta.domain()),
            "heap domain shrank",
        ))));
    }
    checks.extend(heap_agreement(&heap, delta, &env, cfg.rank, Update));
    Trial::new(&heap, &e, &env, finish(checks))
}

/// Per-name comparison of `⟦Γ⟧ρ` and `⟦Δ⟧ρ` on `dom Γ`.
fn heap_agreement(
    gamma: &Heap,
    delta: &Heap,
    env: &Env,
    rank: u8,
    v: HeapVariant,
) -> Vec<Result<Option<Outcome>, DomainError>> {
    let (_, ranks) = observation(rank);
    let mut sides = Vec::new();
    for &k in &ranks {
        let pair = env_at(env, k).and_then(|env| Ok((den_heap(gamma, &env, k, v)?, den_heap(delta, &env, k, v)?)));
        match pair {
            Ok(p) => sides.push((k, p)),
            Err(e) => return vec![Err(e)],
        }
    }
    let at = |k: u8| &sides.iter().find(|(r, _)| *r == k).expect("computed rank").1;
    gamma
        .names()
        .map(|x| {
            compare(|k| Ok(at(k).0.get(x)), |k| Ok(at(k).1.get(x)), rank, &format!("binding {x}"))
        })
        .collect()
}

fn stack_heap(heap: &Heap, stack: &crate::stacked::Stack) -> Result<Heap, String> {
    heap.concat(&stack.to_heap()).map_err(|e| e.to_string())
}

pub(crate) fn stacked5(src: &mut Source, cfg: &GenConfig) -> Trial {
    let (heap, e) = closed_config(src, cfg);
    let bot = Env::bot(cfg.rank);
    let StackResult::Success { trace, .. } = run_via_stack_traced(&heap, &e, &NameSet::new(), cfg.fuel) else {
        return Trial::new(&heap, &e, &bot, Outcome::Skip);
    };
    let mut checks = Vec::new();
    for node in trace.nodes() {
        let (gamma, delta) = match (stack_heap(&node.input.0, &node.input.1), stack_heap(&node.output.0, &node.output.1)) {
            (Ok(g), Ok(d)) => (g, d),
            (Err(m), _) | (_, Err(m)) => {
                checks.push(Ok(Some(Outcome::fail("-", "-", format!("heap and stack overlap: {m}")))));
                break;
            }
        };
        if !gamma.domain().is_subset(&delta.domain()) {
            checks.push(Ok(Some(Outcome::fail(
                format!("{:?}", gamma.domain()),
                format!("{:?}", delta.domain()),
                format!("{:?} rule: domain shrank", node.rule),
            ))));
            break;
        }
        let before = checks.len();
        checks.extend(heap_agreement(&gamma, &delta, &bot, cfg.rank, Join));
        if checks[before..].iter().any(|c| matches!(c, Err(_) | Ok(Some(Outcome::Fail { .. })))) {
            break;
        }
    }
    Trial::new(&heap, &e, &bot, finish(checks))
}

pub(crate) fn deneq(src: &mut Source, cfg: &GenConfig) -> Trial {
    let (heap, e, env) = open_config(src, cfg, false);
    let outcome = match (den_expr(&e, &env, cfg.rank, Join), den_expr(&e, &env, cfg.rank, Update)) {
        (Ok(a), Ok(b)) if a == b => Outcome::Pass,
        (Ok(a), Ok(b)) => Outcome::fail(format!("{a:?}"), format!("{b:?}"), "join and update differ"),
        (Err(err), _) | (_, Err(err)) => Outcome::from_domain(err),
    };
    Trial::new(&heap, &e, &env, outcome)
}

/// Configurations may have free names bound nowhere; both evaluators must
/// then get stuck the same way.
pub(crate) fn equivalence(src: &mut Source, cfg: &GenConfig) -> Trial {
    let (heap, e, _) = open_config(src, cfg, false);
    let nat = eval_nat(&heap, &e, &NameSet::new(), cfg.fuel);
    let stk = run_via_stack(&heap, &e, &NameSet::new(), cfg.fuel);
    let outcome = if nat.kind() != stk.kind() {
        Outcome::fail(format!("{:?}", nat.kind()), format!("{:?}", stk.kind()), "outcome kinds differ")
    } else if nat.kind() == OutcomeKind::Success {
        let (h1, v1) = nat.success().expect("success");
        let (h2, v2) = stk.success().expect("success");
        let mut protect = heap.domain();
        protect.extend(e.free_vars());
        if heap_alpha_eq((h1, v1), (h2, v2), &protect) {
            Outcome::Pass
        } else {
            Outcome::fail(format!("{h1:?} : {v1:?}"), format!("{h2:?} : {v2:?}"), "results are not alpha-equivalent")
        }
    } else {
        Outcome::Pass
    };
    Trial::new(&heap, &e, &Env::bot(cfg.rank), outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, Name};

    fn closed(heap: Heap, src: &str, rank: u8) -> Outcome {
        let e = parse(src).unwrap();
        let (delta, v) = match eval_nat(&heap, &e, &NameSet::new(), 64) {
            r @ crate::natural::NatResult::Success { .. } => {
                let (d, v) = r.success().unwrap();
                (d.clone(), v.to_expr())
            }
            _ => panic!("evaluates"),
        };
        finish([compare(
            |k| in_heap(&e, &heap, &Env::bot(k), k, Join),
            |k| in_heap(&v, &delta, &Env::bot(k), k, Join),
            rank,
            "expression",
        )])
    }

    #[test]
    fn identity_lookup_is_equal() {
        assert_eq!(closed(Heap::of(&[("i", r"\x. x")]), "i", 3), Outcome::Pass);
    }

    #[test]
    fn self_application() {
        assert_eq!(closed(Heap::new(), r"let i = \x. x in i i", 3), Outcome::Pass);
    }

    #[test]
    fn update_repairs_counterexample_instance() {
        let heap = Heap::of(&[("x", r"\a. let b = b in b")]);
        let e = parse("x").unwrap();
        let v = parse(r"\a. let b = b in b").unwrap();
        let konst = crate::domain::fn_make(3, |_| crate::domain::fn_make(2, |a| a).unwrap()).unwrap();
        let env = Env::from_pairs(3, [(Name::new("x"), konst)]);
        let o = finish([compare(
            |k| in_heap(&e, &heap, &env, k, Update),
            |k| in_heap(&v, &heap, &env, k, Update),
            3,
            "expression",
        )]);
        assert_eq!(o, Outcome::Pass);
        let join = finish([compare(
            |k| in_heap(&e, &heap, &env, k, Join),
            |k| in_heap(&v, &heap, &env, k, Join),
            3,
            "expression",
        )]);
        assert!(matches!(join, Outcome::Fail { .. }));
    }

    // Each application of a function value projects and re-embeds it, so a
    // chain of self-applications deeper than the rank collapses to Bot on
    // both compared ranks. The protocol then sees a stable difference.
    #[test]
    fn deep_self_application_rounds_to_bot() {
        let heap = Heap::of(&[("x", "x_1 x_1"), ("x_1", r"\c. c"), ("x_2", "x_3 x"), ("x_3", "x x_1")]);
        let e = parse("x_2 x").unwrap();
        let v = parse(r"\c. c").unwrap();
        let (delta, _) = eval_nat(&heap, &e, &NameSet::new(), 64).success().map(|(d, v)| (d.clone(), v.clone())).unwrap();
        for k in [3, 4] {
            let l = in_heap(&e, &heap, &Env::bot(k), k, Join).unwrap();
            let r = in_heap(&v, &delta, &Env::bot(k), k, Join).unwrap();
            assert!(l.is_bot() && !r.is_bot() && leq(l, r));
        }
        assert!(matches!(closed(heap, "x_2 x", 3), Outcome::Fail { .. }));
    }

    #[test]
    fn small_runs_pass() {
        let cfg = GenConfig { cases: 40, ..GenConfig::default() };
        for (id, p) in [
            ("nat1", nat1 as super::super::runner::Property),
            ("update2", update2),
            ("stacked5", stacked5),
            ("deneq", deneq),
            ("equivalence", equivalence),
        ] {
            let r = super::super::runner::run_property(id, p, &cfg, Default::default());
            assert_eq!(r.failed, 0, "{r}");
        }
    }
}
