//! Big-step natural semantics with heaps.
//!
//! `Γ : e ⇓ Δ : v` is computed by a fuel-bounded derivation search. Each rule
//! application consumes one unit of fuel, so a successful result's trace has
//! exactly as many nodes as the fuel it used. A variable under evaluation is
//! removed from the heap (blackholing), which makes self-dependent bindings
//! fail with [`NatResult::Blackhole`] instead of looping.

use serde::Serialize;
use serde_json::{json, Value};

use crate::syntax::{
    fresh_in, print, subst_avoiding, Expr, Heap, Name, NameSet, SynValue,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    Lam,
    App,
    Var,
    Let,
}

impl Rule {
    /// Number of premises the rule has.
    pub fn arity(self) -> usize {
        match self {
            Rule::Lam => 0,
            Rule::App => 2,
            Rule::Var | Rule::Let => 1,
        }
    }
}

/// A derivation tree. `I`/`O` are the left and right sides of a judgment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation<I, O> {
    pub rule: Rule,
    pub input: I,
    pub output: O,
    pub children: Vec<Derivation<I, O>>,
}

impl<I, O> Derivation<I, O> {
    /// Number of rule applications.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Derivation::size).sum::<usize>()
    }

    /// Pre-order walk over all nodes.
    pub fn nodes(&self) -> Vec<&Derivation<I, O>> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.nodes());
        }
        out
    }

    /// True when every node has the number of children its rule requires.
    pub fn well_shaped(&self) -> bool {
        self.children.len() == self.rule.arity() && self.children.iter().all(Derivation::well_shaped)
    }
}

/// Derivation of the natural semantics: `(Γ, e) ⇓ (Δ, v)`.
pub type DerivTrace = Derivation<(Heap, Expr), (Heap, SynValue)>;

impl DerivTrace {
    pub fn to_json(&self) -> Value {
        json!({
            "rule": self.rule,
            "input": {"heap": self.input.0.to_file(), "expr": print(&self.input.1)},
            "output": {"heap": self.output.0.to_file(), "value": print(&self.output.1.to_expr())},
            "children": self.children.iter().map(DerivTrace::to_json).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NatResult {
    Success { heap: Heap, value: SynValue, trace: DerivTrace },
    Diverged,
    Blackhole(Name),
    UnboundVar(Name),
}

/// Outcome class, used to compare evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    Success,
    Diverged,
    Blackhole,
    UnboundVar,
}

impl NatResult {
    pub fn kind(&self) -> OutcomeKind {
        match self {
            NatResult::Success { .. } => OutcomeKind::Success,
            NatResult::Diverged => OutcomeKind::Diverged,
            NatResult::Blackhole(_) => OutcomeKind::Blackhole,
            NatResult::UnboundVar(_) => OutcomeKind::UnboundVar,
        }
    }

    pub fn success(&self) -> Option<(&Heap, &SynValue)> {
        match self {
            NatResult::Success { heap, value, .. } => Some((heap, value)),
            _ => None,
        }
    }
}

/// Why a derivation search stopped without a result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Stuck {
    Diverged,
    Blackhole(Name),
    UnboundVar(Name),
}

/// Names occurring anywhere in a configuration: the smallest valid `avoid`.
pub fn config_names(heap: &Heap, e: &Expr) -> NameSet {
    let mut avoid = heap.all_names();
    avoid.extend(e.all_names());
    avoid
}

/// Mutable state threaded through a derivation: the name supply and fuel.
pub(crate) struct Supply {
    pub avoid: NameSet,
    pub fuel: u64,
}

impl Supply {
    pub fn tick(&mut self) -> Result<(), Stuck> {
        if self.fuel == 0 {
            return Err(Stuck::Diverged);
        }
        self.fuel -= 1;
        Ok(())
    }

    /// Renames the binders of a let to names fresh for the whole derivation
    /// so far, returning the renamed bindings and body.
    pub fn freshen_let(&mut self, binds: &[(Name, Expr)], body: &Expr) -> (Vec<(Name, Expr)>, Expr) {
        let renames: Vec<(Name, Name)> = binds
            .iter()
            .map(|(x, _)| (x.clone(), fresh_in(&mut self.avoid, x)))
            .collect();
        let mut rhs: Vec<Expr> = binds.iter().map(|(_, e)| e.clone()).collect();
        let mut body = body.clone();
        for (from, to) in renames.iter().filter(|(a, b)| a != b) {
            for e in rhs.iter_mut() {
                *e = subst_avoiding(e, to, from, &mut self.avoid);
            }
            body = subst_avoiding(&body, to, from, &mut self.avoid);
        }
        (renames.into_iter().map(|(_, to)| to).zip(rhs).collect(), body)
    }
}

struct Machine {
    supply: Supply,
    under_eval: Vec<Name>,
}

impl Machine {
    fn eval(&mut self, heap: Heap, e: &Expr) -> Result<(Heap, SynValue, DerivTrace), Stuck> {
        self.supply.tick()?;
        let input = (heap.clone(), e.clone());
        let (rule, out_heap, value, children) = match e {
            Expr::Lam(x, b) => (Rule::Lam, heap, SynValue::new(x.clone(), (**b).clone()), vec![]),
            Expr::App(f, x) => {
                let (delta, fun, t1) = self.eval(heap, f)?;
                let body = subst_avoiding(fun.body(), x, fun.binder(), &mut self.supply.avoid);
                let (theta, v, t2) = self.eval(delta, &body)?;
                (Rule::App, theta, v, vec![t1, t2])
            }
            Expr::Var(x) => {
                let mut rest = heap;
                let Some(bound) = rest.remove(x) else {
                    return Err(if self.under_eval.contains(x) {
                        Stuck::Blackhole(x.clone())
                    } else {
                        Stuck::UnboundVar(x.clone())
                    });
                };
                self.under_eval.push(x.clone());
                let (mut delta, v, t) = self.eval(rest, &bound)?;
                self.under_eval.pop();
                delta.insert(x.clone(), v.to_expr());
                (Rule::Var, delta, v, vec![t])
            }
            Expr::Let(binds, body) => {
                let (binds, body) = self.supply.freshen_let(binds, body);
                let mut extended = heap;
                for (x, rhs) in binds {
                    extended.insert(x, rhs);
                }
                let (delta, v, t) = self.eval(extended, &body)?;
                (Rule::Let, delta, v, vec![t])
            }
        };
        let trace = Derivation {
            rule,
            input,
            output: (out_heap.clone(), value.clone()),
            children,
        };
        Ok((out_heap, value, trace))
    }
}

/// Evaluates `Γ : e` with at most `fuel` rule applications.
///
/// `avoid` should contain every name of the configuration (see
/// [`config_names`]); it is extended with all names the derivation
/// introduces.
pub fn eval_nat(heap: &Heap, e: &Expr, avoid: &NameSet, fuel: u64) -> NatResult {
    let mut avoid = avoid.clone();
    avoid.extend(config_names(heap, e));
    let mut m = Machine { supply: Supply { avoid, fuel }, under_eval: Vec::new() };
    match m.eval(heap.clone(), e) {
        Ok((heap, value, trace)) => NatResult::Success { heap, value, trace },
        Err(s) => s.into(),
    }
}

impl From<Stuck> for NatResult {
    fn from(s: Stuck) -> NatResult {
        match s {
            Stuck::Diverged => NatResult::Diverged,
            Stuck::Blackhole(x) => NatResult::Blackhole(x),
            Stuck::UnboundVar(x) => NatResult::UnboundVar(x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{heap_alpha_eq, parse};

    fn run(heap: &Heap, src: &str, fuel: u64) -> NatResult {
        eval_nat(heap, &parse(src).unwrap(), &NameSet::new(), fuel)
    }

    #[test]
    fn lam_axiom() {
        let NatResult::Success { heap, value, trace } = run(&Heap::new(), r"\x. x", 10) else {
            panic!()
        };
        assert!(heap.is_empty());
        assert_eq!(value.to_expr(), parse(r"\x. x").unwrap());
        assert_eq!(trace.rule, Rule::Lam);
        assert_eq!(trace.size(), 1);
    }

    #[test]
    fn var_lookup_of_value() {
        let gamma = Heap::of(&[("x", r"\a. let b = b in b")]);
        let NatResult::Success { heap, value, .. } = run(&gamma, "x", 10) else { panic!() };
        assert!(heap.same_bindings(&gamma));
        assert_eq!(value.to_expr(), parse(r"\a. let b = b in b").unwrap());
    }

    #[test]
    fn let_app_var_lam() {
        let NatResult::Success { heap, value, trace } = run(&Heap::new(), r"let i = \x. x in i i", 20)
        else {
            panic!()
        };
        let expected = Heap::of(&[("i", r"\x. x")]);
        let v = SynValue::from_expr(&parse(r"\x. x").unwrap()).unwrap();
        assert!(heap_alpha_eq((&heap, &value), (&expected, &v), &NameSet::new()));
        let rules: Vec<Rule> = trace.nodes().iter().map(|n| n.rule).collect();
        assert_eq!(rules, vec![Rule::Let, Rule::App, Rule::Var, Rule::Lam, Rule::Var, Rule::Lam]);
        assert!(trace.well_shaped());
    }

    #[test]
    fn self_reference_blackholes() {
        assert_eq!(run(&Heap::of(&[("x", "x")]), "x", 10), NatResult::Blackhole(Name::new("x")));
    }

    #[test]
    fn unbound_and_divergence() {
        assert_eq!(run(&Heap::new(), "y", 10), NatResult::UnboundVar(Name::new("y")));
        let omega = r"let d = \f. f f in d d";
        assert_eq!(run(&Heap::new(), omega, 50), NatResult::Diverged);
        assert_eq!(run(&Heap::new(), r"\x. x", 0), NatResult::Diverged);
    }

    #[test]
    fn trace_size_equals_fuel_used() {
        let src = r"let i = \x. x in i i";
        for fuel in 0..10 {
            match run(&Heap::new(), src, fuel) {
                NatResult::Success { trace, .. } => assert!(trace.size() as u64 <= fuel),
                r => assert_eq!(r, NatResult::Diverged, "fuel {fuel}"),
            }
        }
        assert_eq!(run(&Heap::new(), src, 5), NatResult::Diverged);
        assert!(matches!(run(&Heap::new(), src, 6), NatResult::Success { .. }));
    }

    #[test]
    fn update_overwrites_thunk() {
        let gamma = Heap::of(&[("x", r"(\y. y) z"), ("z", r"\q. q")]);
        let NatResult::Success { heap, .. } = run(&gamma, "x", 20) else { panic!() };
        assert_eq!(heap.get(&Name::new("x")), Some(&parse(r"\q. q").unwrap()));
    }

    #[test]
    fn let_binders_are_renamed_apart_on_reevaluation() {
        // The let inside f's body is evaluated twice; the second copy must
        // get a distinct heap name.
        let src = r"let f = \u. let c = \k. k in c in let a = f f, b = f a in a b";
        let NatResult::Success { heap, .. } = run(&Heap::new(), src, 200) else { panic!() };
        let names: Vec<_> = heap.names().collect();
        let distinct: NameSet = heap.domain();
        assert_eq!(names.len(), distinct.len());
        // Every binder of the source is in `avoid`, so even the first copy
        // is renamed.
        assert_eq!(heap.len(), 5);
        assert!(heap.contains(&Name::new("c_1")) && heap.contains(&Name::new("c_2")));
    }

    #[test]
    fn trace_json_shape() {
        let NatResult::Success { trace, .. } = run(&Heap::new(), r"let i = \x. x in i", 10) else {
            panic!()
        };
        let j = trace.to_json();
        assert_eq!(j["rule"], "Let");
        assert_eq!(j["children"][0]["rule"], "Var");
        assert_eq!(j["output"]["value"], r"\x. x");
    }
}
