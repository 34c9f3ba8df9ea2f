use super::*;
use crate::syntax::Name;
use proptest::prelude::*;

/// Independent model: explicit trees, built by brute force.
#[derive(Clone, Debug, PartialEq)]
enum V {
    Bot,
    Fn(Vec<V>),
}

fn v_leq(a: &V, b: &V) -> bool {
    match (a, b) {
        (V::Bot, _) => true,
        (_, V::Bot) => false,
        (V::Fn(f), V::Fn(g)) => f.iter().zip(g).all(|(x, y)| v_leq(x, y)),
    }
}

fn model(rank: u8) -> Vec<V> {
    if rank == 0 {
        return vec![V::Bot];
    }
    let below = model(rank - 1);
    let n = below.len();
    let mut out = vec![V::Bot];
    let mut tables: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        tables = tables
            .into_iter()
            .flat_map(|t| (0..n).map(move |i| [t.clone(), vec![i]].concat()))
            .collect();
    }
    for t in tables {
        let mono = (0..n).all(|i| (0..n).all(|j| !v_leq(&below[i], &below[j]) || v_leq(&below[t[i]], &below[t[j]])));
        if mono {
            out.push(V::Fn(t.iter().map(|&i| below[i].clone()).collect()));
        }
    }
    out
}

fn to_model(u: DomElem) -> V {
    match u.entries() {
        None => V::Bot,
        Some(es) => V::Fn(es.into_iter().map(to_model).collect()),
    }
}

fn el(rank: u8, i: usize) -> DomElem {
    DomElem::from_index(rank, i).unwrap()
}

#[test]
fn enumeration_matches_brute_force() {
    for r in 0..=3 {
        let ours: Vec<V> = enumerate(r).unwrap().into_iter().map(to_model).collect();
        assert_eq!(ours, model(r), "rank {r}");
    }
    let sizes: Vec<usize> = (0..=3).map(|r| enumerate(r).unwrap().len()).collect();
    assert_eq!(sizes, vec![1, 2, 4, 36]);
    assert!(matches!(enumerate(4), Err(DomainError::RankTooLarge { .. })));
}

#[test]
fn rank_one_separates_bot_from_constant_bot() {
    let e = enumerate(1).unwrap();
    assert_eq!(e.len(), 2);
    assert!(e[0].is_bot());
    assert_eq!(e[1], fn_make(1, |_| DomElem::bot(0)).unwrap());
}

#[test]
fn order_matches_model_and_is_partial_order() {
    for r in 0..=3 {
        let es = enumerate(r).unwrap();
        for &a in &es {
            assert!(leq(a, a));
            for &b in &es {
                assert_eq!(leq(a, b), v_leq(&to_model(a), &to_model(b)));
                if leq(a, b) && leq(b, a) {
                    assert_eq!(a, b);
                }
                if r <= 2 {
                    for &c in &es {
                        if leq(a, b) && leq(b, c) {
                            assert!(leq(a, c));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn lub_is_least_upper_bound() {
    for r in 0..=3 {
        let es = enumerate(r).unwrap();
        for &a in &es {
            assert_eq!(lub(DomElem::bot(r), a), a);
            for &b in &es {
                let u = lub(a, b);
                assert!(leq(a, u) && leq(b, u));
                assert!(es.contains(&u));
                for &c in &es {
                    if leq(a, c) && leq(b, c) {
                        assert!(leq(u, c));
                    }
                }
            }
        }
    }
}

#[test]
fn rank_two_is_a_chain() {
    let es = enumerate(2).unwrap();
    for w in es.windows(2) {
        assert!(leq(w[0], w[1]));
    }
    assert_eq!(lattice_height(1), 1);
    assert_eq!(lattice_height(2), 3);
}

#[test]
fn heights_match_longest_chains() {
    for r in 0..=3 {
        let m = model(r);
        let mut h = vec![0usize; m.len()];
        // Brute force without relying on enumeration order.
        for _ in 0..m.len() {
            for j in 0..m.len() {
                for i in 0..m.len() {
                    if i != j && v_leq(&m[i], &m[j]) {
                        h[j] = h[j].max(h[i] + 1);
                    }
                }
            }
        }
        assert_eq!(lattice_height(r), *h.iter().max().unwrap(), "rank {r}");
    }
    assert_eq!(lattice_height(4), 1 + 36 * lattice_height(3));
}

#[test]
fn lub_of_constant_functions() {
    let id2 = fn_make(2, |a| a).unwrap();
    let k_id = fn_make(3, |_| id2).unwrap();
    let k_bot = fn_make(3, |_| DomElem::bot(2)).unwrap();
    assert_eq!(lub(k_id, k_bot), k_id);
}

#[test]
fn application() {
    let id2 = fn_make(2, |a| a).unwrap();
    assert_eq!(id2, el(2, 2));
    assert_eq!(fn_project_apply(id2, el(1, 1)), el(1, 1));
    assert_eq!(fn_project_apply(DomElem::bot(2), el(1, 1)), DomElem::bot(1));
    for f in enumerate(2).unwrap() {
        for g in enumerate(2).unwrap() {
            for a in enumerate(1).unwrap() {
                for b in enumerate(1).unwrap() {
                    if leq(f, g) && leq(a, b) {
                        assert!(leq(fn_project_apply(f, a), fn_project_apply(g, b)));
                    }
                }
            }
        }
    }
}

#[test]
fn fn_make_round_trips_and_rejects_non_monotone() {
    for f in enumerate(3).unwrap().into_iter().skip(1) {
        let g = fn_make(3, |a| fn_project_apply(f, a)).unwrap();
        assert_eq!(f, g);
    }
    // Swapping Bot and the top of rank 1 is not monotone.
    let swap = fn_make(2, |a| if a.is_bot() { el(1, 1) } else { el(1, 0) });
    assert_eq!(swap, Err(DomainError::NonMonotone));
    let wide = fn_make(4, |a| if a.is_bot() { el(3, 35) } else { el(3, 0) });
    assert_eq!(wide, Err(DomainError::NonMonotone));
}

#[test]
fn embedding_projection_laws() {
    assert_eq!(embed(DomElem::bot(0)).unwrap(), DomElem::bot(1));
    for r in 0..=3 {
        for u in enumerate(r).unwrap() {
            let up = embed(u).unwrap();
            assert_eq!(up.rank(), r + 1);
            assert_eq!(project(up).unwrap(), u);
            if r >= 1 {
                assert!(leq(embed(project(u).unwrap()).unwrap(), u));
            }
        }
    }
    assert!(project(DomElem::bot(0)).is_err());
    assert!(embed(DomElem::bot(4)).is_err());
}

#[test]
fn embedding_commutes_with_application() {
    // embed(f)(embed(a)) = embed(f(a)) for the e-p construction.
    for r in 1..=3 {
        for f in enumerate(r).unwrap() {
            for a in enumerate(r - 1).unwrap() {
                let lhs = fn_project_apply(embed(f).unwrap(), embed(a).unwrap());
                assert_eq!(lhs, embed(fn_project_apply(f, a)).unwrap());
            }
        }
    }
}

#[test]
fn json_round_trip() {
    for r in 0..=3 {
        for u in enumerate(r).unwrap() {
            assert_eq!(DomElem::from_json(&u.to_json(), r).unwrap(), u);
            let w = embed(u).unwrap();
            assert_eq!(DomElem::from_json(&w.to_json(), r + 1).unwrap(), w);
        }
    }
    assert_eq!(DomElem::bot(2).to_json(), serde_json::json!("bot"));
    assert_eq!(el(1, 1).to_json(), serde_json::json!({"rank": 1, "fn": [0]}));
    let env = Env::from_pairs(2, [(Name::new("x"), el(2, 3))]);
    assert_eq!(Env::from_json(&env.to_json()).unwrap(), env);
}

#[test]
fn env_ops() {
    let (x, y) = (Name::new("x"), Name::new("y"));
    let (v, w) = (el(2, 2), el(2, 1));
    let rho = Env::from_pairs(2, [(x.clone(), v), (y.clone(), w)]);
    let only_x: crate::syntax::NameSet = [x.clone()].into();
    assert_eq!(rho.restrict(&only_x), Env::from_pairs(2, [(x.clone(), v)]));
    assert_eq!(rho.subtract(&only_x), Env::from_pairs(2, [(y.clone(), w)]));
    assert!(Env::bot(2).le(&rho));
    let upd = rho.update(&Env::from_pairs(2, [(x.clone(), el(2, 3))]), &only_x);
    assert_eq!(upd, Env::from_pairs(2, [(x.clone(), el(2, 3)), (y.clone(), w)]));
    assert_eq!(rho.dom(), [x.clone(), y.clone()].into());
    assert!(rho.leq(&upd) && !upd.leq(&rho));
    assert!(!rho.le(&upd));
    // Bot bindings are not stored.
    assert_eq!(Env::from_pairs(2, [(x, DomElem::bot(2))]), Env::bot(2));
}

#[test]
fn lfp_examples() {
    let x = Name::new("x");
    let hint: crate::syntax::NameSet = [x.clone()].into();
    assert_eq!(lfp_env(|r| r.clone(), 3, &hint).unwrap(), Env::bot(3));
    let (env, calls) = lfp_env_counted(
        |r| Env::from_pairs(1, [(x.clone(), lub(r.get(&x), el(1, 1)))]),
        1,
        &hint,
    )
    .unwrap();
    assert_eq!(env, Env::from_pairs(1, [(x.clone(), el(1, 1))]));
    assert_eq!(calls, 2);
    // A step that keeps climbing never settles within the cap.
    let mut k = 0;
    let r = lfp_env(
        |_| {
            k += 1;
            Env::from_pairs(2, [(x.clone(), el(2, k % 4))])
        },
        2,
        &hint,
    );
    assert!(matches!(r, Err(DomainError::NotConverged { .. })));
}

fn wide() -> impl Strategy<Value = DomElem> {
    // Monotone wide tables: the embedding of a rank-3 element joined with
    // a constant.
    (0usize..36, 0usize..36).prop_map(|(f, c)| {
        let f = embed(el(3, f)).unwrap();
        let k = fn_make(4, |_| el(3, c)).unwrap();
        lub(f, k)
    })
}

proptest! {
    #[test]
    fn wide_lub_laws(a in wide(), b in wide(), c in wide()) {
        let u = lub(a, b);
        prop_assert!(leq(a, u) && leq(b, u));
        prop_assert_eq!(lub(a, b), lub(b, a));
        prop_assert_eq!(lub(lub(a, b), c), lub(a, lub(b, c)));
        if leq(a, c) && leq(b, c) {
            prop_assert!(leq(u, c));
        }
    }

    #[test]
    fn wide_projection_below(a in wide()) {
        let p = project(a).unwrap();
        prop_assert!(leq(embed(p).unwrap(), a));
        prop_assert_eq!(project(embed(p).unwrap()).unwrap(), p);
    }

    #[test]
    fn rank3_order_transitive(a in 0usize..36, b in 0usize..36, c in 0usize..36) {
        let (a, b, c) = (el(3, a), el(3, b), el(3, c));
        if leq(a, b) && leq(b, c) {
            prop_assert!(leq(a, c));
        }
    }
}
