//! Invariants of the syntax, the evaluators and the denotations, on
//! randomly shaped terms.

use lazylab::denotational::{den_expr, den_heap, HeapVariant};
use lazylab::domain::{enumerate, leq, project, DomElem, Env};
use lazylab::natural::{eval_nat, NatResult};
use lazylab::stacked::run_via_stack;
use lazylab::syntax::{
    alpha_eq, freshen_binders, heap_alpha_eq, parse, print, subst, Expr, Heap, Name, NameSet,
};
use proptest::prelude::*;

const BINDERS: &[&str] = &["a", "b", "c", "f", "g"];
const FREE: &[&str] = &["p", "q"];

fn name(pool: &'static [&'static str]) -> impl Strategy<Value = Name> {
    prop::sample::select(pool).prop_map(Name::new)
}

fn any_name() -> impl Strategy<Value = Name> {
    prop_oneof![3 => name(BINDERS), 1 => name(FREE)]
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = any_name().prop_map(Expr::Var);
    leaf.prop_recursive(4, 16, 3, |inner| {
        prop_oneof![
            (name(BINDERS), inner.clone()).prop_map(|(x, b)| Expr::lam(x, b)),
            (inner.clone(), any_name()).prop_map(|(f, x)| Expr::app(f, x)),
            (prop::collection::vec((name(BINDERS), inner.clone()), 1..3), inner).prop_map(|(mut bs, body)| {
                let mut seen = NameSet::new();
                bs.retain(|(x, _)| seen.insert(x.clone()));
                Expr::let_in(bs, body)
            }),
        ]
    })
}

/// Terms whose only free names are drawn from `FREE`.
fn open_expr() -> impl Strategy<Value = Expr> {
    expr().prop_map(|e| {
        let mut binders = e.free_vars();
        for p in FREE {
            binders.remove(&Name::new(p));
        }
        binders.into_iter().rev().fold(e, |e, x| Expr::lam(x, e))
    })
}

fn closed_expr() -> impl Strategy<Value = Expr> {
    expr().prop_map(|e| e.free_vars().into_iter().rev().fold(e, |e, x| Expr::lam(x, e)))
}

fn elem3() -> impl Strategy<Value = DomElem> {
    (0usize..36).prop_map(|i| enumerate(3).unwrap()[i])
}

fn free_env() -> impl Strategy<Value = Env> {
    (elem3(), elem3()).prop_map(|(a, b)| Env::from_pairs(3, [(Name::new("p"), a), (Name::new("q"), b)]))
}

const FUEL: u64 = 200;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_then_parse_is_identity(e in expr()) {
        prop_assert_eq!(parse(&print(&e)).unwrap(), e);
    }

    #[test]
    fn freshening_preserves_alpha_class(e in expr()) {
        let mut avoid = e.all_names();
        let f = freshen_binders(&e, &mut avoid);
        prop_assert!(alpha_eq(&e, &f));
        prop_assert_eq!(f.free_vars(), e.free_vars());
        prop_assert!(f.has_distinct_binders());
    }

    #[test]
    fn substitution_moves_free_names(e in expr(), x in any_name(), y in any_name()) {
        // `subst(e, x, y)` puts `x` where `y` was free.
        let s = subst(&e, &x, &y);
        let mut expected = e.free_vars();
        if expected.remove(&y) {
            expected.insert(x.clone());
        }
        prop_assert_eq!(s.free_vars(), expected);
        prop_assert!(alpha_eq(&subst(&e, &x, &x), &e));
    }

    #[test]
    fn evaluators_agree(e in open_expr()) {
        let heap = Heap::new();
        let nat = eval_nat(&heap, &e, &NameSet::new(), FUEL);
        let stk = run_via_stack(&heap, &e, &NameSet::new(), FUEL);
        prop_assert_eq!(nat.kind(), stk.kind());
        if let (Some(a), Some(b)) = (nat.success(), stk.success()) {
            prop_assert!(heap_alpha_eq(a, b, &e.free_vars()));
        }
    }

    #[test]
    fn successful_derivations_are_well_formed(e in open_expr()) {
        if let NatResult::Success { heap, trace, .. } = eval_nat(&Heap::new(), &e, &NameSet::new(), FUEL) {
            prop_assert!(trace.well_shaped());
            prop_assert!(trace.size() as u64 <= FUEL);
            // Evaluation only adds bindings, and never captures a free name.
            for x in heap.names() {
                prop_assert!(!e.free_vars().contains(x));
            }
            // Exactly the used fuel suffices, one less does not.
            let used = trace.size() as u64;
            prop_assert!(eval_nat(&Heap::new(), &e, &NameSet::new(), used).success().is_some());
            prop_assert_eq!(
                eval_nat(&Heap::new(), &e, &NameSet::new(), used - 1).kind(),
                lazylab::natural::OutcomeKind::Diverged
            );
        }
    }

    #[test]
    fn variants_agree_on_expressions(e in open_expr(), env in free_env()) {
        for rank in [2u8, 3] {
            let env = if rank == 3 { env.clone() } else { env.convert(2).unwrap() };
            prop_assert_eq!(
                den_expr(&e, &env, rank, HeapVariant::Join).unwrap(),
                den_expr(&e, &env, rank, HeapVariant::Update).unwrap()
            );
        }
    }

    #[test]
    fn heap_denotation_is_a_fixed_point(e in open_expr(), g in open_expr(), env in free_env()) {
        let heap = Heap::from_bindings(vec![(Name::new("x"), e), (Name::new("y"), g)]).unwrap();
        for variant in [HeapVariant::Join, HeapVariant::Update] {
            let h = den_heap(&heap, &env, 3, variant).unwrap();
            for (x, rhs) in heap.iter() {
                prop_assert_eq!(h.get(x), den_expr(rhs, &h, 3, variant).unwrap());
            }
            for (x, u) in env.iter() {
                prop_assert_eq!(h.get(x), u);
            }
        }
    }

    #[test]
    fn higher_ranks_know_more(e in closed_expr()) {
        for rank in 1u8..4 {
            let low = den_expr(&e, &Env::bot(rank), rank, HeapVariant::Join).unwrap();
            let high = den_expr(&e, &Env::bot(rank + 1), rank + 1, HeapVariant::Join).unwrap();
            prop_assert!(leq(low, project(high).unwrap()));
        }
    }

    #[test]
    fn beta_steps_only_gain(body in expr(), y in name(BINDERS), env in free_env()) {
        let x = Name::new("p");
        let redex = Expr::app(Expr::lam(y.clone(), body.clone()), x.clone());
        let reduct = subst(&body, &x, &y);
        prop_assert!(leq(
            den_expr(&redex, &env, 3, HeapVariant::Join).unwrap(),
            den_expr(&reduct, &env, 3, HeapVariant::Join).unwrap()
        ));
    }
}
