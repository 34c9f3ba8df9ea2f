use std::collections::BTreeMap;

use super::name::{fresh_in, Name, NameSet};

/// Lazy lambda calculus with variable-argument application and recursive
/// `let`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(Name),
    Lam(Name, Box<Expr>),
    App(Box<Expr>, Name),
    Let(Vec<(Name, Expr)>, Box<Expr>),
}

impl std::fmt::Debug for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", super::print::print(self))
    }
}

impl Expr {
    pub fn var(n: impl Into<Name>) -> Expr {
        Expr::Var(n.into())
    }

    pub fn lam(x: impl Into<Name>, body: Expr) -> Expr {
        Expr::Lam(x.into(), Box::new(body))
    }

    pub fn app(fun: Expr, arg: impl Into<Name>) -> Expr {
        Expr::App(Box::new(fun), arg.into())
    }

    pub fn let_in(binds: Vec<(Name, Expr)>, body: Expr) -> Expr {
        Expr::Let(binds, Box::new(body))
    }

    pub fn is_lam(&self) -> bool {
        matches!(self, Expr::Lam(..))
    }

    /// Number of syntax nodes; an application counts its argument variable.
    pub fn size(&self) -> usize {
        match self {
            Expr::Var(_) => 1,
            Expr::Lam(_, b) => 1 + b.size(),
            Expr::App(f, _) => 2 + f.size(),
            Expr::Let(bs, b) => 1 + b.size() + bs.iter().map(|(_, e)| e.size()).sum::<usize>(),
        }
    }

    pub fn free_vars(&self) -> NameSet {
        let mut out = NameSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a Name>, out: &mut NameSet) {
        match self {
            Expr::Var(x) => {
                if !bound.contains(&x) {
                    out.insert(x.clone());
                }
            }
            Expr::Lam(x, b) => {
                bound.push(x);
                b.collect_free(bound, out);
                bound.pop();
            }
            Expr::App(f, x) => {
                f.collect_free(bound, out);
                if !bound.contains(&x) {
                    out.insert(x.clone());
                }
            }
            Expr::Let(bs, b) => {
                let mark = bound.len();
                bound.extend(bs.iter().map(|(x, _)| x));
                for (_, e) in bs {
                    e.collect_free(bound, out);
                }
                b.collect_free(bound, out);
                bound.truncate(mark);
            }
        }
    }

    pub fn is_free(&self, x: &Name) -> bool {
        match self {
            Expr::Var(y) => y == x,
            Expr::Lam(y, b) => y != x && b.is_free(x),
            Expr::App(f, y) => y == x || f.is_free(x),
            Expr::Let(bs, b) => {
                !bs.iter().any(|(y, _)| y == x)
                    && (b.is_free(x) || bs.iter().any(|(_, e)| e.is_free(x)))
            }
        }
    }

    /// Every name occurring in a binding position.
    pub fn bound_names(&self) -> NameSet {
        let mut out = NameSet::new();
        self.visit_binders(&mut |x| {
            out.insert(x.clone());
        });
        out
    }

    /// Binders in pre-order, duplicates included.
    pub fn binders(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.visit_binders(&mut |x| out.push(x.clone()));
        out
    }

    fn visit_binders(&self, f: &mut impl FnMut(&Name)) {
        match self {
            Expr::Var(_) => {}
            Expr::Lam(x, b) => {
                f(x);
                b.visit_binders(f);
            }
            Expr::App(e, _) => e.visit_binders(f),
            Expr::Let(bs, b) => {
                for (x, e) in bs {
                    f(x);
                    e.visit_binders(f);
                }
                b.visit_binders(f);
            }
        }
    }

    /// All names occurring anywhere (free, bound or binding).
    pub fn all_names(&self) -> NameSet {
        let mut out = self.bound_names();
        self.visit_occurrences(&mut |x| {
            out.insert(x.clone());
        });
        out
    }

    fn visit_occurrences(&self, f: &mut impl FnMut(&Name)) {
        match self {
            Expr::Var(x) => f(x),
            Expr::Lam(_, b) => b.visit_occurrences(f),
            Expr::App(e, x) => {
                e.visit_occurrences(f);
                f(x);
            }
            Expr::Let(bs, b) => {
                for (_, e) in bs {
                    e.visit_occurrences(f);
                }
                b.visit_occurrences(f);
            }
        }
    }

    /// True when no let binds the same name twice.
    pub fn let_binders_distinct(&self) -> bool {
        match self {
            Expr::Var(_) => true,
            Expr::Lam(_, b) => b.let_binders_distinct(),
            Expr::App(e, _) => e.let_binders_distinct(),
            Expr::Let(bs, b) => {
                let names: NameSet = bs.iter().map(|(x, _)| x.clone()).collect();
                names.len() == bs.len()
                    && bs.iter().all(|(_, e)| e.let_binders_distinct())
                    && b.let_binders_distinct()
            }
        }
    }

    /// True when every binder is distinct from every other binder and from
    /// the free variables.
    pub fn has_distinct_binders(&self) -> bool {
        let binders = self.binders();
        let set: NameSet = binders.iter().cloned().collect();
        set.len() == binders.len() && set.is_disjoint(&self.free_vars())
    }
}

/// Capture-avoiding substitution `e[x/y]`: free occurrences of `y` become `x`.
pub fn subst(e: &Expr, x: &Name, y: &Name) -> Expr {
    let mut avoid = e.all_names();
    avoid.insert(x.clone());
    avoid.insert(y.clone());
    subst_avoiding(e, x, y, &mut avoid)
}

/// As [`subst`], drawing any binder renamings from (and recording them in)
/// `avoid`.
pub fn subst_avoiding(e: &Expr, x: &Name, y: &Name, avoid: &mut NameSet) -> Expr {
    if x == y || !e.is_free(y) {
        return e.clone();
    }
    avoid.insert(x.clone());
    match e {
        Expr::Var(v) => Expr::Var(if v == y { x.clone() } else { v.clone() }),
        Expr::App(f, v) => Expr::App(
            Box::new(subst_avoiding(f, x, y, avoid)),
            if v == y { x.clone() } else { v.clone() },
        ),
        Expr::Lam(b, body) => {
            if b == x {
                let b2 = fresh_in(avoid, b);
                let body = rename_free(body, b, &b2);
                Expr::Lam(b2, Box::new(subst_avoiding(&body, x, y, avoid)))
            } else {
                Expr::Lam(b.clone(), Box::new(subst_avoiding(body, x, y, avoid)))
            }
        }
        Expr::Let(bs, body) => {
            let (bs, body) = if bs.iter().any(|(b, _)| b == x) {
                let b2 = fresh_in(avoid, x);
                let bs: Vec<_> = bs
                    .iter()
                    .map(|(b, e)| {
                        let b = if b == x { b2.clone() } else { b.clone() };
                        (b, rename_free(e, x, &b2))
                    })
                    .collect();
                (bs, rename_free(body, x, &b2))
            } else {
                (bs.clone(), (**body).clone())
            };
            let bs = bs
                .into_iter()
                .map(|(b, e)| (b, subst_avoiding(&e, x, y, avoid)))
                .collect();
            Expr::Let(bs, Box::new(subst_avoiding(&body, x, y, avoid)))
        }
    }
}

/// Renames free `from` to `to`, where `to` is known not to occur in `e`.
fn rename_free(e: &Expr, from: &Name, to: &Name) -> Expr {
    let mut avoid = e.all_names();
    avoid.insert(to.clone());
    subst_avoiding(e, to, from, &mut avoid)
}

/// Builds `fun arg`, introducing `let a = arg in fun a` when `arg` is not a
/// variable.
pub fn desugar_app(fun: Expr, arg: Expr, avoid: &NameSet) -> Expr {
    match arg {
        Expr::Var(x) => Expr::App(Box::new(fun), x),
        arg => {
            let mut avoid = avoid.clone();
            avoid.extend(fun.all_names());
            avoid.extend(arg.all_names());
            let a = fresh_in(&mut avoid, &Name::new("a"));
            Expr::Let(vec![(a.clone(), arg)], Box::new(Expr::App(Box::new(fun), a)))
        }
    }
}

/// Equality up to consistent renaming of bound variables.
pub fn alpha_eq(e1: &Expr, e2: &Expr) -> bool {
    alpha_eq_with(e1, e2, &mut |a, b| a == b)
}

/// Alpha-equivalence where free-variable pairs are judged by `free`.
pub(crate) fn alpha_eq_with(
    e1: &Expr,
    e2: &Expr,
    free: &mut dyn FnMut(&Name, &Name) -> bool,
) -> bool {
    fn lookup(scope: &[(&Name, &Name)], left: bool, n: &Name) -> Option<usize> {
        scope
            .iter()
            .rposition(|(a, b)| if left { *a == n } else { *b == n })
    }
    fn var<'a>(
        scope: &[(&'a Name, &'a Name)],
        a: &Name,
        b: &Name,
        free: &mut dyn FnMut(&Name, &Name) -> bool,
    ) -> bool {
        match (lookup(scope, true, a), lookup(scope, false, b)) {
            (None, None) => free(a, b),
            (i, j) => i == j,
        }
    }
    fn go<'a>(
        e1: &'a Expr,
        e2: &'a Expr,
        scope: &mut Vec<(&'a Name, &'a Name)>,
        free: &mut dyn FnMut(&Name, &Name) -> bool,
    ) -> bool {
        match (e1, e2) {
            (Expr::Var(a), Expr::Var(b)) => var(scope, a, b, free),
            (Expr::Lam(a, b1), Expr::Lam(b, b2)) => {
                scope.push((a, b));
                let ok = go(b1, b2, scope, free);
                scope.pop();
                ok
            }
            (Expr::App(f1, a), Expr::App(f2, b)) => {
                go(f1, f2, scope, free) && var(scope, a, b, free)
            }
            (Expr::Let(bs1, b1), Expr::Let(bs2, b2)) => {
                if bs1.len() != bs2.len() {
                    return false;
                }
                let mark = scope.len();
                scope.extend(bs1.iter().zip(bs2).map(|((a, _), (b, _))| (a, b)));
                let ok = bs1.iter().zip(bs2).all(|((_, r1), (_, r2))| go(r1, r2, scope, free))
                    && go(b1, b2, scope, free);
                scope.truncate(mark);
                ok
            }
            _ => false,
        }
    }
    go(e1, e2, &mut Vec::new(), free)
}

/// Renames binders so that they are pairwise distinct, distinct from the
/// free variables, and outside `avoid`. Binders that already satisfy this
/// keep their names; every binder ends up in `avoid`.
pub fn freshen_binders(e: &Expr, avoid: &mut NameSet) -> Expr {
    fn go(e: &Expr, scope: &mut Vec<(Name, Name)>, avoid: &mut NameSet) -> Expr {
        let look = |scope: &Vec<(Name, Name)>, x: &Name| {
            scope
                .iter()
                .rev()
                .find(|(a, _)| a == x)
                .map(|(_, b)| b.clone())
                .unwrap_or_else(|| x.clone())
        };
        match e {
            Expr::Var(x) => Expr::Var(look(scope, x)),
            Expr::App(f, x) => Expr::App(Box::new(go(f, scope, avoid)), look(scope, x)),
            Expr::Lam(x, b) => {
                let x2 = fresh_in(avoid, x);
                scope.push((x.clone(), x2.clone()));
                let b = go(b, scope, avoid);
                scope.pop();
                Expr::Lam(x2, Box::new(b))
            }
            Expr::Let(bs, b) => {
                let mark = scope.len();
                for (x, _) in bs {
                    let x2 = fresh_in(avoid, x);
                    scope.push((x.clone(), x2));
                }
                let names: Vec<Name> = scope[mark..].iter().map(|(_, b)| b.clone()).collect();
                let bs = bs
                    .iter()
                    .zip(names)
                    .map(|((_, r), x2)| (x2, go(r, scope, avoid)))
                    .collect();
                let b = go(b, scope, avoid);
                scope.truncate(mark);
                Expr::Let(bs, Box::new(b))
            }
        }
    }
    avoid.extend(e.free_vars());
    go(e, &mut Vec::new(), avoid)
}

/// Simultaneous renaming of free variables (used by heap-level renamings).
pub fn rename_free_map(e: &Expr, map: &BTreeMap<Name, Name>) -> Expr {
    if map.is_empty() {
        return e.clone();
    }
    let mut avoid: NameSet = map.keys().chain(map.values()).cloned().collect();
    let mut e = freshen_binders(e, &mut avoid);
    // Binders are now disjoint from every name in the map, so sequential
    // renaming through unique temporaries is capture-free.
    let temps: Vec<(Name, Name, Name)> = map
        .iter()
        .map(|(from, to)| (from.clone(), fresh_in(&mut avoid, &Name::new("t")), to.clone()))
        .collect();
    for (from, tmp, _) in &temps {
        e = subst_avoiding(&e, tmp, from, &mut avoid);
    }
    for (_, tmp, to) in &temps {
        e = subst_avoiding(&e, to, tmp, &mut avoid);
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        Name::new(s)
    }

    #[test]
    fn free_vars_examples() {
        assert!(Expr::lam("x", Expr::var("x")).free_vars().is_empty());
        let e = Expr::let_in(vec![(n("b"), Expr::var("b"))], Expr::var("b"));
        assert!(e.free_vars().is_empty());
        let e = Expr::app(Expr::var("f"), "x");
        assert_eq!(e.free_vars(), [n("f"), n("x")].into_iter().collect());
    }

    #[test]
    fn subst_examples() {
        assert_eq!(subst(&Expr::var("y"), &n("x"), &n("y")), Expr::var("x"));
        let id = Expr::lam("y", Expr::var("y"));
        assert_eq!(subst(&id, &n("x"), &n("y")), id);
        let got = subst(&Expr::lam("x", Expr::var("y")), &n("x"), &n("y"));
        match &got {
            Expr::Lam(b, body) => {
                assert_ne!(b, &n("x"));
                assert_eq!(**body, Expr::var("x"));
            }
            _ => panic!("expected lambda, got {got:?}"),
        }
    }

    #[test]
    fn subst_under_let_renames_clashing_binder() {
        // (let x = y in x y)[x/y] must not capture the substituted x.
        let e = Expr::let_in(vec![(n("x"), Expr::var("y"))], Expr::app(Expr::var("x"), "y"));
        let got = subst(&e, &n("x"), &n("y"));
        assert_eq!(got.free_vars(), [n("x")].into_iter().collect());
        let Expr::Let(bs, _) = &got else { panic!() };
        assert_ne!(bs[0].0, n("x"));
        assert_eq!(bs[0].1, Expr::var("x"));
    }

    #[test]
    fn alpha_examples() {
        let l = |x: &str, b: &str| Expr::lam(x, Expr::var(b));
        assert!(alpha_eq(&l("x", "x"), &l("y", "y")));
        assert!(!alpha_eq(&l("x", "x"), &l("y", "x")));
        let lt = |x: &str| Expr::let_in(vec![(n(x), Expr::var(x))], Expr::var(x));
        assert!(alpha_eq(&lt("a"), &lt("b")));
    }

    #[test]
    fn desugar_examples() {
        let id = Expr::lam("x", Expr::var("x"));
        assert_eq!(
            desugar_app(id.clone(), Expr::var("y"), &NameSet::new()),
            Expr::app(id, "y")
        );
        let avoid: NameSet = [n("a")].into_iter().collect();
        let got = desugar_app(Expr::var("f"), Expr::lam("z", Expr::var("z")), &avoid);
        let Expr::Let(bs, body) = &got else { panic!("{got:?}") };
        assert_eq!(bs.len(), 1);
        assert!(!avoid.contains(&bs[0].0));
        assert_eq!(bs[0].1, Expr::lam("z", Expr::var("z")));
        assert_eq!(**body, Expr::app(Expr::var("f"), bs[0].0.clone()));
        assert_eq!(
            desugar_app(Expr::var("f"), Expr::var("f"), &NameSet::new()),
            Expr::app(Expr::var("f"), "f")
        );
    }

    #[test]
    fn freshen_makes_binders_distinct() {
        let e = Expr::app(
            Expr::lam("x", Expr::lam("x", Expr::var("x"))),
            "x",
        );
        let mut avoid = NameSet::new();
        let f = freshen_binders(&e, &mut avoid);
        assert!(f.has_distinct_binders());
        assert!(alpha_eq(&e, &f));
    }

    #[test]
    fn rename_map_swaps() {
        let e = Expr::app(Expr::var("a"), "b");
        let map: BTreeMap<Name, Name> = [(n("a"), n("b")), (n("b"), n("a"))].into_iter().collect();
        assert_eq!(rename_free_map(&e, &map), Expr::app(Expr::var("b"), "a"));
    }
}
