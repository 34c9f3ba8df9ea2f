//! Generators of expressions, heaps and environments.
//!
//! Every binder is drawn from one name supply, so binders are globally
//! distinct and never clash with heap or environment names.

use crate::domain::{embed, enumerate, fn_make, lub, DomElem, Env, MAX_ENUM_RANK};
use crate::syntax::{fresh_in, Expr, Heap, Name, NameSet};

use super::source::Source;
use super::GenConfig;

const LAM_BASES: [&str; 3] = ["a", "b", "c"];
const LET_BASES: [&str; 3] = ["f", "g", "l"];
const HEAP_BASES: [&str; 4] = ["x", "y", "z", "u"];
const FREE_BASES: [&str; 2] = ["p", "q"];

/// Supply of names fresh for everything generated so far.
#[derive(Default)]
pub(crate) struct Names {
    pub avoid: NameSet,
}

impl Names {
    pub fn fresh(&mut self, base: &str) -> Name {
        fresh_in(&mut self.avoid, &Name::new(base))
    }

    pub fn fresh_from(&mut self, src: &mut Source, bases: &[&str]) -> Name {
        let base = *src.pick(bases);
        self.fresh(base)
    }
}

pub(crate) struct Gen<'a> {
    pub src: &'a mut Source,
    pub names: &'a mut Names,
}

impl Gen<'_> {
    /// An expression of size at most `budget` (at least 2 if `scope` is
    /// empty) whose free variables are in `scope`.
    pub fn expr(&mut self, budget: usize, scope: &[Name]) -> Expr {
        let budget = budget.max(1);
        // Options, simplest first: variable, lambda, application, let.
        let weights = [
            if scope.is_empty() { 0 } else { 3 },
            if budget >= 2 || scope.is_empty() { 3 } else { 0 },
            if budget >= 3 && !scope.is_empty() { 3 } else { 0 },
            if budget >= 3 { 2 } else { 0 },
        ];
        match self.src.weighted(&weights) {
            0 => Expr::Var(self.src.pick(scope).clone()),
            1 => {
                let x = self.names.fresh_from(self.src, &LAM_BASES);
                let mut inner = scope.to_vec();
                inner.push(x.clone());
                let body = self.expr(budget.saturating_sub(1), &inner);
                Expr::Lam(x, Box::new(body))
            }
            2 => {
                let size = 1 + self.src.below(budget - 2);
                let f = self.expr(size, scope);
                let x = self.src.pick(scope).clone();
                Expr::App(Box::new(f), x)
            }
            _ => {
                let k = 1 + self.src.below((budget - 2).min(2));
                let binders: Vec<Name> = (0..k).map(|_| self.names.fresh_from(self.src, &LET_BASES)).collect();
                let mut inner = scope.to_vec();
                inner.extend(binders.iter().cloned());
                let mut left = budget - 1;
                let mut binds = Vec::new();
                for (i, x) in binders.into_iter().enumerate() {
                    // Leave one unit for every later binding and the body.
                    let reserve = k - i;
                    let b = 1 + self.src.below(left - reserve);
                    left -= b;
                    binds.push((x, self.expr(b, &inner)));
                }
                let body = self.expr(left, &inner);
                Expr::Let(binds, Box::new(body))
            }
        }
    }

    /// Up to `max` bindings with fresh names; right-hand sides may refer to
    /// `scope` and to all of the heap's own names.
    pub fn heap(&mut self, max: usize, rhs_budget: usize, scope: &[Name]) -> Heap {
        let n = self.src.below(max + 1);
        self.heap_of(n, rhs_budget, scope)
    }

    pub fn heap_of(&mut self, n: usize, rhs_budget: usize, scope: &[Name]) -> Heap {
        let names: Vec<Name> = (0..n).map(|_| self.names.fresh_from(self.src, &HEAP_BASES)).collect();
        let mut inner = scope.to_vec();
        inner.extend(names.iter().cloned());
        let mut heap = Heap::new();
        for x in names {
            let b = 1 + self.src.below(rhs_budget);
            let e = self.expr(b, &inner);
            heap.insert(x, e);
        }
        heap
    }

    /// A domain element biased toward Bot, identities and constants.
    pub fn elem(&mut self, rank: u8) -> DomElem {
        if rank == 0 {
            return DomElem::bot(0);
        }
        match self.src.weighted(&[4, 2, 3, 2]) {
            0 => DomElem::bot(rank),
            1 => fn_make(rank, |a| a).expect("identity is monotone"),
            2 => {
                let c = self.small_elem(rank - 1);
                fn_make(rank, |_| c).expect("constant is monotone")
            }
            _ => {
                if rank <= MAX_ENUM_RANK {
                    let all = enumerate(rank).expect("enumerable");
                    *self.src.pick(&all)
                } else {
                    let f = embed(self.small_elem(MAX_ENUM_RANK)).expect("in range");
                    let c = self.small_elem(MAX_ENUM_RANK);
                    lub(f, fn_make(rank, |_| c).expect("constant is monotone"))
                }
            }
        }
    }

    fn small_elem(&mut self, rank: u8) -> DomElem {
        let all = enumerate(rank).expect("enumerable");
        *self.src.pick(&all)
    }

    /// An environment over (a random subset of) `names`.
    pub fn env(&mut self, rank: u8, names: &[Name]) -> Env {
        let mut env = Env::bot(rank);
        for x in names {
            let v = self.elem(rank);
            env.set(x.clone(), v);
        }
        env
    }

    /// Like [`Gen::env`] but with at least one non-Bot binding, if `names`
    /// is non-empty.
    pub fn nonbot_env(&mut self, rank: u8, names: &[Name]) -> Env {
        let mut env = self.env(rank, names);
        if env.dom().is_empty() && !names.is_empty() {
            let x = self.src.pick(names).clone();
            let c = self.small_elem(rank - 1);
            env.set(x, fn_make(rank, |_| c).expect("constant is monotone"));
        }
        env
    }

    /// Fresh names usable as free variables bound only by an environment.
    pub fn free_names(&mut self, max: usize) -> Vec<Name> {
        let n = self.src.below(max + 1);
        (0..n).map(|_| self.names.fresh_from(self.src, &FREE_BASES)).collect()
    }

    /// A one-hole context: an expression containing exactly one occurrence
    /// of the fresh variable `hole`, not under a binder of `hole` itself.
    pub fn context(&mut self, budget: usize, scope: &[Name], hole: &Name) -> Expr {
        let budget = budget.max(1);
        let weights = [
            2,
            if budget >= 2 { 3 } else { 0 },
            if budget >= 3 && !scope.is_empty() { 3 } else { 0 },
            if budget >= 3 { 3 } else { 0 },
        ];
        match self.src.weighted(&weights) {
            0 => Expr::Var(hole.clone()),
            1 => {
                let x = self.names.fresh_from(self.src, &LAM_BASES);
                let mut inner = scope.to_vec();
                inner.push(x.clone());
                Expr::Lam(x, Box::new(self.context(budget - 1, &inner, hole)))
            }
            2 => {
                let f = self.context(budget - 2, scope, hole);
                Expr::App(Box::new(f), self.src.pick(scope).clone())
            }
            _ => {
                let x = self.names.fresh_from(self.src, &LET_BASES);
                let mut inner = scope.to_vec();
                inner.push(x.clone());
                let in_rhs = self.src.chance(50);
                let (rhs, body) = if in_rhs {
                    (self.context(budget - 2, &inner, hole), self.expr(1, &inner))
                } else {
                    let size = 1 + self.src.below(budget - 2);
                    (self.expr(size, &inner), self.context(budget - 2, &inner, hole))
                };
                Expr::Let(vec![(x, rhs)], Box::new(body))
            }
        }
    }
}

/// Replaces the single occurrence of `hole` in `ctx` by `e`.
pub(crate) fn plug(ctx: &Expr, hole: &Name, e: &Expr) -> Expr {
    match ctx {
        Expr::Var(x) if x == hole => e.clone(),
        Expr::Var(_) => ctx.clone(),
        Expr::Lam(x, b) => Expr::Lam(x.clone(), Box::new(plug(b, hole, e))),
        Expr::App(f, x) => Expr::App(Box::new(plug(f, hole, e)), x.clone()),
        Expr::Let(bs, b) => Expr::Let(
            bs.iter().map(|(x, r)| (x.clone(), plug(r, hole, e))).collect(),
            Box::new(plug(b, hole, e)),
        ),
    }
}

/// Replaces the `k`-th subterm (pre-order) of `e` by `by`.
pub(crate) fn replace_subterm(e: &Expr, k: &mut usize, by: &Expr) -> Expr {
    if *k == 0 {
        *k = usize::MAX;
        return by.clone();
    }
    *k = k.wrapping_sub(1);
    match e {
        Expr::Var(_) => e.clone(),
        Expr::Lam(x, b) => Expr::Lam(x.clone(), Box::new(replace_subterm(b, k, by))),
        Expr::App(f, x) => Expr::App(Box::new(replace_subterm(f, k, by)), x.clone()),
        Expr::Let(bs, b) => {
            let bs = bs.iter().map(|(x, r)| (x.clone(), replace_subterm(r, k, by))).collect();
            Expr::Let(bs, Box::new(replace_subterm(b, k, by)))
        }
    }
}

/// Number of subterm positions of `e`, as counted by [`replace_subterm`].
pub(crate) fn subterm_count(e: &Expr) -> usize {
    match e {
        Expr::Var(_) => 1,
        Expr::Lam(_, b) => 1 + subterm_count(b),
        Expr::App(f, _) => 1 + subterm_count(f),
        Expr::Let(bs, b) => 1 + subterm_count(b) + bs.iter().map(|(_, r)| subterm_count(r)).sum::<usize>(),
    }
}

pub(crate) fn rhs_budget(cfg: &GenConfig) -> usize {
    cfg.max_expr_size.div_ceil(2).max(2)
}

/// A closed configuration: free variables of the heap and expression are
/// bound by the heap.
pub(crate) fn closed_config(src: &mut Source, cfg: &GenConfig) -> (Heap, Expr) {
    let mut names = Names::default();
    let mut g = Gen { src, names: &mut names };
    let heap = g.heap(cfg.max_heap_bindings, rhs_budget(cfg), &[]);
    let scope: Vec<Name> = heap.names().cloned().collect();
    let e = g.expr(cfg.max_expr_size, &scope);
    (heap, e)
}

/// A configuration with an environment. The environment binds some heap
/// names and possibly extra free names the expressions may use.
pub(crate) fn open_config(src: &mut Source, cfg: &GenConfig, nonbot: bool) -> (Heap, Expr, Env) {
    let mut names = Names::default();
    let mut g = Gen { src, names: &mut names };
    let free = g.free_names(1);
    let heap = g.heap(cfg.max_heap_bindings, rhs_budget(cfg), &free);
    let mut scope: Vec<Name> = heap.names().cloned().collect();
    scope.extend(free.iter().cloned());
    let e = g.expr(cfg.max_expr_size, &scope);
    let mut env = if nonbot { g.nonbot_env(cfg.rank, &scope) } else { g.env(cfg.rank, &scope) };
    // Names free in the heap are bound by the environment; Bot is not stored.
    for x in &free {
        if env.get(x).is_bot() {
            env.set(x.clone(), fn_make(cfg.rank, |_| DomElem::bot(cfg.rank - 1)).expect("constant is monotone"));
        }
    }
    (heap, e, env)
}

/// Checks the generator's contract for a configuration.
pub fn well_scoped(heap: &Heap, e: &Expr, env: &Env) -> Result<(), String> {
    let mut bound = heap.domain();
    bound.extend(env.dom());
    let mut fv = heap.free_vars();
    fv.extend(e.free_vars());
    if let Some(x) = fv.iter().find(|x| !bound.contains(*x)) {
        return Err(format!("free variable {x} is not bound"));
    }
    let mut seen = NameSet::new();
    let mut binders: Vec<Name> = e.binders();
    for (_, r) in heap.iter() {
        binders.extend(r.binders());
    }
    for b in binders {
        if heap.contains(&b) || env.dom().contains(&b) || !seen.insert(b.clone()) {
            return Err(format!("binder {b} is not globally distinct"));
        }
    }
    Ok(())
}
