//! Lemmas about heap denotations. They are pure fixed-point and lattice
//! algebra, so each is checked as an exact equation at the working rank.

use std::fmt::Debug;

use crate::denotational::{den_expr, den_heap, HeapVariant};
use crate::domain::{fn_make, leq, lfp_env, lub, DomainError, Env};
use crate::syntax::{freshen_binders, subst, Expr, Heap, Name, NameSet};

use super::gen::{plug, replace_subterm, rhs_budget, subterm_count, Gen, Names};
use super::runner::{Outcome, Property, Trial};
use super::source::Source;
use super::GenConfig;

use HeapVariant::{Join, Update};

pub(crate) const LEMMAS: &[(&str, Property)] = &[
    ("esem_this", esem_this),
    ("esem_other", esem_other),
    ("rho_below_esem", rho_below_esem),
    ("esem_below", esem_below),
    ("esem_subst_expr_below", esem_subst_expr_below),
    ("esem_subst_expr", esem_subst_expr),
    ("exp_var_subst", exp_var_subst),
    ("redo", redo),
    ("see_through_fresh", see_through_fresh),
    ("addvar", addvar),
    ("esem_merge", esem_merge),
    ("let_unfold", let_unfold),
    ("esemu_this", esemu_this),
    ("esemu_other", esemu_other),
    ("iter", iter),
    ("subst", subst_lemma),
    ("esemu_merge", esemu_merge),
];

type Check = Result<(), Outcome>;

fn expect_eq<T: PartialEq + Debug>(lhs: T, rhs: T, what: &str) -> Check {
    if lhs == rhs {
        Ok(())
    } else {
        Err(Outcome::fail(format!("{lhs:?}"), format!("{rhs:?}"), what))
    }
}

fn expect_below(lhs: &Env, rhs: &Env, what: &str) -> Check {
    if lhs.leq(rhs) {
        Ok(())
    } else {
        Err(Outcome::fail(format!("{lhs:?}"), format!("{rhs:?}"), what))
    }
}

fn skip<T>() -> Result<T, Outcome> {
    Err(Outcome::Skip)
}

fn trial(heap: &Heap, expr: &Expr, env: &Env, check: Check) -> Trial {
    Trial::new(heap, expr, env, check.err().unwrap_or(Outcome::Pass))
}

fn heap_trial(heap: &Heap, env: &Env, check: Check) -> Trial {
    Trial::heap_only(heap, env, check.err().unwrap_or(Outcome::Pass))
}

/// A heap over some free names, and an environment over those names, an
/// extra unused name, and (optionally) the heap's names.
struct Base {
    free: Vec<Name>,
    heap: Heap,
    scope: Vec<Name>,
    env: Env,
}

fn base(g: &mut Gen, cfg: &GenConfig, min_heap: usize, env_on_heap: bool) -> Base {
    let free = g.free_names(2);
    let n = min_heap + g.src.below(cfg.max_heap_bindings.max(min_heap) - min_heap + 1);
    let heap = g.heap_of(n, rhs_budget(cfg), &free);
    let mut scope = free.clone();
    scope.extend(heap.names().cloned());
    let mut env_names = free.clone();
    if env_on_heap {
        env_names.extend(heap.names().cloned());
    }
    let mut env = g.env(cfg.rank, &env_names);
    let extra = g.names.fresh("p");
    let v = g.elem(cfg.rank);
    env.set(extra, if v.is_bot() { fn_make(cfg.rank, |a| a).expect("identity") } else { v });
    Base { free, heap, scope, env }
}

fn with(heap: &Heap, x: &Name, e: &Expr) -> Heap {
    let mut h = heap.clone();
    h.insert(x.clone(), e.clone());
    h
}

/// `⟪Γ⟫ρ`: each binding's denotation, Bot elsewhere.
fn bindings(heap: &Heap, env: &Env, v: HeapVariant) -> Result<Env, DomainError> {
    let mut out = Env::bot(env.rank());
    for (x, e) in heap.iter() {
        out.set(x.clone(), den_expr(e, env, env.rank(), v)?);
    }
    Ok(out)
}

fn lookup_this(src: &mut Source, cfg: &GenConfig, v: HeapVariant) -> Trial {
    let mut names = Names::default();
    let mut g = Gen { src, names: &mut names };
    let b = base(&mut g, cfg, 1, true);
    let keys: Vec<Name> = b.heap.names().cloned().collect();
    let x = g.src.pick(&keys).clone();
    let e = b.heap.get(&x).expect("bound").clone();
    let r = cfg.rank;
    let check = (|| -> Check {
        let fix = den_heap(&b.heap, &b.env, r, v)?;
        let body = den_expr(&e, &fix, r, v)?;
        match v {
            Join => {
                expect_eq(fix.get(&x), lub(b.env.get(&x), body), "lookup in heap")?;
                let fix = den_heap(&b.heap, &Env::bot(r), r, v)?;
                expect_eq(fix.get(&x), den_expr(&e, &fix, r, v)?, "lookup from empty environment")
            }
            Update => expect_eq(fix.get(&x), body, "lookup in heap"),
        }
    })();
    trial(&b.heap, &Expr::Var(x), &b.env, check)
}

fn esem_this(src: &mut Source, cfg: &GenConfig) -> Trial {
    lookup_this(src, cfg, Join)
}

fn esemu_this(src: &mut Source, cfg: &GenConfig) -> Trial {
    lookup_this(src, cfg, Update)
}

fn lookup_other(src: &mut Source, cfg: &GenConfig, v: HeapVariant) -> Trial {
    let mut names = Names::default();
    let mut g = Gen { src, names: &mut names };
    let b = base(&mut g, cfg, 0, true);
    let dom = b.heap.domain();
    let mut outside: Vec<Name> = b.env.dom().into_iter().filter(|x| !dom.contains(x)).collect();
    outside.extend(b.free.iter().cloned());
    outside.push(g.names.fresh("u"));
    let x = g.src.pick(&outside).clone();
    let r = cfg.rank;
    let check = (|| -> Check {
        let fix = den_heap(&b.heap, &b.env, r, v)?;
        expect_eq(fix.get(&x), b.env.get(&x), "lookup outside heap")?;
        if v == Join {
            let disjoint = b.env.subtract(&dom);
            let fix = den_heap(&b.heap, &disjoint, r, v)?;
            expect_eq(fix.subtract(&dom), disjoint, "restriction to names outside heap")?;
        }
        Ok(())
    })();
    trial(&b.heap, &Expr::Var(x), &b.env, check)
}

fn esem_other(src: &mut Source, cfg: &GenConfig) -> Trial {
    lookup_other(src, cfg, Join)
}

fn esemu_other(src: &mut Source, cfg: &GenConfig) -> Trial {
    lookup_other(src, cfg, Update)
}

fn rho_below_esem(src: &mut Source, cfg: &GenConfig) -> Trial {
    let mut names = Names::default();
    let mut g = Gen { src, names: &mut names };
    let b = base(&mut g, cfg, 0, true);
    let check = (|| -> Check {
        let fix = den_heap(&b.heap, &b.env, cfg.rank, Join)?;
        expect_below(&b.env, &fix, "environment below heap denotation")
    })();
    heap_trial(&b.heap, &b.env, check)
}

fn esem_below(src: &mut Source, cfg: &GenConfig) -> Trial {
    let mut names = Names::default();
    let mut g = Gen { src, names: &mut names };
    let b = base(&mut g, cfg, 0, true);
    let noise_names: Vec<Name> = b.scope.iter().chain(b.env.dom().iter()).cloned().collect();
    let noise = g.env(cfg.rank, &noise_names);
    let constructed = g.src.weighted(&[3, 1]) == 0;
    let r = cfg.rank;
    let check = (|| -> Check {
        let upper = if constructed {
            den_heap(&b.heap, &b.env.lub(&noise), r, Join)?
        } else {
            b.env.lub(&noise)
        };
        if !b.env.leq(&upper) || !bindings(&b.heap, &upper, Join)?.leq(&upper) {
            return skip();
        }
        let fix = den_heap(&b.heap, &b.env, r, Join)?;
        expect_below(&fix, &upper, "least pre-fixed point")
    })();
    heap_trial(&b.heap, &b.env, check)
}

/// A heap `Γ` and a fresh name for an extra binding.
fn replacement_setup(g: &mut Gen, cfg: &GenConfig) -> (Base, Name, Expr) {
    let b = base(g, cfg, 0, true);
    let x = g.names.fresh("x");
    let mut scope = b.scope.clone();
    scope.push(x.clone());
    let e2 = g.expr(rhs_budget(cfg), &scope);
    (b, x, e2)
}

fn esem_subst_expr_below(src: &mut Source, cfg: &GenConfig) -> Trial {
    let mut names = Names::default();
    let mut g = Gen { src, names: &mut names };
    let (b, x, e2) = replacement_setup(&mut g, cfg);
    let e1 = if g.src.weighted(&[4, 1]) == 0 {
        // Cutting out a subterm can only lose information.
        let hole = g.names.fresh("b");
        let bottom = Expr::Let(vec![(hole.clone(), Expr::Var(hole.clone()))], Box::new(Expr::Var(hole)));
        let mut k = g.src.below(subterm_count(&e2));
        replace_subterm(&e2, &mut k, &bottom)
    } else {
        let mut scope = b.scope.clone();
        scope.push(x.clone());
        g.expr(rhs_budget(cfg), &scope)
    };
    let (h1, h2) = (with(&b.heap, &x, &e1), with(&b.heap, &x, &e2));
    let r = cfg.rank;
    let check = (|| -> Check {
        let fix2 = den_heap(&h2, &b.env, r, Join)?;
        if !leq(den_expr(&e1, &fix2, r, Join)?, den_expr(&e2, &fix2, r, Join)?) {
            return skip();
        }
        expect_below(&den_heap(&h1, &b.env, r, Join)?, &fix2, "replaced binding")
    })();
    trial(&h1, &e2, &b.env, check)
}

fn esem_subst_expr(src: &mut Source, cfg: &GenConfig) -> Trial {
    let mut names = Names::default();
    let mut g = Gen { src, names: &mut names };
    let (mut b, x, e2) = replacement_setup(&mut g, cfg);
    let e1 = match g.src.weighted(&[3, 2, 1]) {
        0 => {
            let f = g.names.fresh("f");
            Expr::Let(vec![(f.clone(), freshen_binders(&e2, &mut g.names.avoid))], Box::new(Expr::Var(f)))
        }
        1 => {
            // An indirection to a copy of e2.
            let w = g.names.fresh("w");
            b.heap.insert(w.clone(), freshen_binders(&e2, &mut g.names.avoid));
            Expr::Var(w)
        }
        _ => {
            let mut scope = b.scope.clone();
            scope.push(x.clone());
            g.expr(rhs_budget(cfg), &scope)
        }
    };
    let (h1, h2) = (with(&b.heap, &x, &e1), with(&b.heap, &x, &e2));
    let r = cfg.rank;
    let check = (|| -> Check {
        let fix1 = den_heap(&h1, &b.env, r, Join)?;
        let fix2 = den_heap(&h2, &b.env, r, Join)?;
        let below = |e: &Expr, f: &Expr, env: &Env| -> Result<bool, DomainError> {
            Ok(leq(den_expr(e, env, r, Join)?, den_expr(f, env, r, Join)?))
        };
        if !below(&e1, &e2, &fix2)? || !below(&e2, &e1, &fix1)? {
            return skip();
        }
        expect_eq(fix1, fix2, "replaced binding")
    })();
    trial(&h1, &e2, &b.env, check)
}

fn exp_var_subst(src: &mut Source, cfg: &GenConfig) -> Trial {
    let mut names = Names::default();
    let mut g = Gen { src, names: &mut names };
    let b = base(&mut g, cfg, 0, true);
    let y = g.names.fresh("y");
    let z = g.names.fresh("z");
    let hole = g.names.fresh("hole");
    let mut scope = b.scope.clone();
    scope.extend([y.clone(), z.clone()]);
    let e = g.expr(rhs_budget(cfg), &scope);
    let ctx = g.context(rhs_budget(cfg), &scope, &hole);
    let copy = freshen_binders(&e, &mut g.names.avoid);
    let with_expr = with(&with(&b.heap, &y, &plug(&ctx, &hole, &copy)), &z, &e);
    let with_var = with(&with(&b.heap, &y, &plug(&ctx, &hole, &Expr::Var(z.clone()))), &z, &e);
    let r = cfg.rank;
    let check = (|| -> Check {
        expect_eq(
            den_heap(&with_expr, &b.env, r, Join)?,
            den_heap(&with_var, &b.env, r, Join)?,
            "subexpression replaced by its variable",
        )
    })();
    trial(&with_expr, &Expr::Var(z), &b.env, check)
}

fn redo(src: &mut Source, cfg: &GenConfig) -> Trial {
    let mut names = Names::default();
    let mut g = Gen { src, names: &mut names };
    let free = g.free_names(1);
    let n = 1 + g.src.below(cfg.max_heap_bindings);
    let both = g.heap_of(n, rhs_budget(cfg), &free);
    let mut gamma = Heap::new();
    for (x, e) in both.iter() {
        if g.src.chance(50) {
            gamma.insert(x.clone(), e.clone());
        }
    }
    let r = cfg.rank;
    let bot = Env::bot(r);
    let check = (|| -> Check {
        let full = den_heap(&both, &bot, r, Join)?;
        let again = den_heap(&gamma, &full.subtract(&gamma.domain()), r, Join)?;
        expect_eq(again, full, "re-adding removed bindings")
    })();
    heap_trial(&both, &bot, check)
}

fn see_through_fresh(src: &mut Source, cfg: &GenConfig) -> Trial {
    let mut names = Names::default();
    let mut g = Gen { src, names: &mut names };
    let b = base(&mut g, cfg, 0, true);
    let e = g.expr(cfg.max_expr_size, &b.scope);
    let used = e.all_names();
    let mut s: NameSet = NameSet::new();
    for x in b.env.dom() {
        if !used.contains(&x) && g.src.chance(70) {
            s.insert(x);
        }
    }
    let r = cfg.rank;
    let check = (|| -> Check {
        if s.is_empty() {
            return skip();
        }
        let smaller = b.env.subtract(&s);
        for v in [Join, Update] {
            expect_eq(den_expr(&e, &b.env, r, v)?, den_expr(&e, &smaller, r, v)?, &format!("removing unused names ({v})"))?;
        }
        Ok(())
    })();
    trial(&Heap::new(), &e, &b.env, check)
}

fn addvar(src: &mut Source, cfg: &GenConfig) -> Trial {
    let mut names = Names::default();
    let mut g = Gen { src, names: &mut names };
    let b = base(&mut g, cfg, 0, true);
    let x = g.names.fresh("x");
    let mut scope = b.scope.clone();
    scope.push(x.clone());
    let e = g.expr(rhs_budget(cfg), &scope);
    let bigger = with(&b.heap, &x, &e);
    let r = cfg.rank;
    let check = (|| -> Check {
        let only_x: NameSet = [x.clone()].into();
        expect_eq(
            den_heap(&b.heap, &b.env, r, Join)?,
            den_heap(&bigger, &b.env, r, Join)?.subtract(&only_x),
            "adding a fresh binding",
        )
    })();
    trial(&bigger, &Expr::Var(x), &b.env, check)
}

fn merge(src: &mut Source, cfg: &GenConfig, v: HeapVariant) -> Trial {
    let mut names = Names::default();
    let mut g = Gen { src, names: &mut names };
    let b = base(&mut g, cfg, 0, true);
    let n = 1 + g.src.below(cfg.max_heap_bindings);
    let gamma = g.heap_of(n, rhs_budget(cfg), &b.scope);
    let merged = gamma.concat(&b.heap).expect("fresh names");
    let r = cfg.rank;
    let check = (|| -> Check {
        let inner = den_heap(&b.heap, &b.env, r, v)?;
        expect_eq(den_heap(&gamma, &inner, r, v)?, den_heap(&merged, &b.env, r, v)?, "nested heaps merge")
    })();
    heap_trial(&merged, &b.env, check)
}

fn esem_merge(src: &mut Source, cfg: &GenConfig) -> Trial {
    merge(src, cfg, Join)
}

fn esemu_merge(src: &mut Source, cfg: &GenConfig) -> Trial {
    merge(src, cfg, Update)
}

fn let_unfold(src: &mut Source, cfg: &GenConfig) -> Trial {
    let mut names = Names::default();
    let mut g = Gen { src, names: &mut names };
    let b = base(&mut g, cfg, 0, false);
    let z = g.names.fresh("z");
    let k = 1 + g.src.below(2);
    let binders: Vec<Name> = (0..k).map(|_| g.names.fresh("l")).collect();
    let mut scope = b.scope.clone();
    scope.push(z.clone());
    scope.extend(binders.iter().cloned());
    let budget = rhs_budget(cfg);
    let mut binds = Vec::new();
    for x in &binders {
        let size = 1 + g.src.below(budget);
        binds.push((x.clone(), g.expr(size, &scope)));
    }
    let size = 1 + g.src.below(budget);
    let body = g.expr(size, &scope);
    let packed = with(&b.heap, &z, &Expr::Let(binds.clone(), Box::new(body.clone())));
    let mut unpacked = with(&b.heap, &z, &body);
    for (x, e) in binds {
        unpacked.insert(x, e);
    }
    let r = cfg.rank;
    let bot = Env::bot(r);
    let check = (|| -> Check {
        let before = den_heap(&packed, &bot, r, Join)?;
        let after = den_heap(&unpacked, &bot, r, Join)?;
        expect_eq(before.restrict(&packed.domain()), after.restrict(&packed.domain()), "unpacking a let")
    })();
    trial(&packed, &Expr::Var(z), &bot, check)
}

fn iter(src: &mut Source, cfg: &GenConfig) -> Trial {
    let mut names = Names::default();
    let mut g = Gen { src, names: &mut names };
    let b = base(&mut g, cfg, 0, true);
    let x = g.names.fresh("x");
    let mut scope = b.scope.clone();
    scope.push(x.clone());
    let e = g.expr(rhs_budget(cfg), &scope);
    let bigger = with(&b.heap, &x, &e);
    let r = cfg.rank;
    let check = (|| -> Check {
        let lhs = den_heap(&bigger, &b.env, r, Update)?;
        let dom = b.heap.domain();
        let only_x: NameSet = [x.clone()].into();
        let mut hint = b.env.dom();
        hint.extend(bigger.domain());
        let mut failure = None;
        let rhs = lfp_env(
            |cur| {
                let step = || -> Result<Env, DomainError> {
                    let inner = den_heap(&b.heap, cur, r, Update)?;
                    let vx = den_expr(&e, &inner, r, Update)?;
                    let out = b.env.update(&inner, &dom);
                    Ok(out.update(&Env::from_pairs(r, [(x.clone(), vx)]), &only_x))
                };
                step().unwrap_or_else(|err| {
                    failure = Some(err);
                    cur.clone()
                })
            },
            r,
            &hint,
        )?;
        if let Some(err) = failure {
            return Err(err.into());
        }
        expect_eq(lhs, rhs, "iterated fixed point")
    })();
    trial(&bigger, &Expr::Var(x), &b.env, check)
}

fn subst_lemma(src: &mut Source, cfg: &GenConfig) -> Trial {
    let mut names = Names::default();
    let mut g = Gen { src, names: &mut names };
    let mut free = g.free_names(2);
    if free.is_empty() {
        free.push(g.names.fresh("p"));
    }
    let env = g.env(cfg.rank, &free);
    let y = g.names.fresh("y");
    let x = g.src.pick(&free).clone();
    let mut scope = free.clone();
    scope.push(y.clone());
    let e = g.expr(cfg.max_expr_size, &scope);
    let r = cfg.rank;
    let check = (|| -> Check {
        if !e.is_free(&y) {
            return skip();
        }
        let mut extended = env.clone();
        extended.set(y.clone(), env.get(&x));
        let renamed = subst(&e, &x, &y);
        for v in [Join, Update] {
            expect_eq(
                den_expr(&e, &extended, r, v)?,
                den_expr(&renamed, &env, r, v)?,
                &format!("substitution as environment extension ({v})"),
            )?;
        }
        Ok(())
    })();
    trial(&Heap::new(), &e, &env, check)
}
