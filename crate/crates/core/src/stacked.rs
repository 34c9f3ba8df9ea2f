//! The stacked semantics: evaluation judgments over a heap and an explicit
//! stack of named frames, plus the bridge back to [`crate::natural`].
//!
//! The topmost frame holds the expression under evaluation. Frames below it
//! are update frames (`z ↦ x`) and pending applications (`z ↦ w x`).

use serde_json::{json, Value};

use crate::natural::{config_names, Derivation, NatResult, Rule, Stuck, Supply};
use crate::syntax::{fresh_in, print, subst_avoiding, Expr, Heap, Name, NameSet, SynValue};

/// An ordered list of named frames.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Stack {
    // Bottom first, so pushing and popping the top is cheap.
    rev: Vec<(Name, Expr)>,
}

impl Stack {
    pub fn new() -> Stack {
        Stack::default()
    }

    /// Builds a stack from frames listed topmost first.
    pub fn from_frames(frames: Vec<(Name, Expr)>) -> Stack {
        let mut rev = frames;
        rev.reverse();
        Stack { rev }
    }

    pub fn singleton(z: Name, e: Expr) -> Stack {
        Stack { rev: vec![(z, e)] }
    }

    pub fn len(&self) -> usize {
        self.rev.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rev.is_empty()
    }

    /// Frames, topmost first.
    pub fn frames(&self) -> impl Iterator<Item = &(Name, Expr)> + '_ {
        self.rev.iter().rev()
    }

    pub fn top(&self) -> Option<&(Name, Expr)> {
        self.rev.last()
    }

    pub fn push(&mut self, z: Name, e: Expr) {
        self.rev.push((z, e));
    }

    pub fn pop(&mut self) -> Option<(Name, Expr)> {
        self.rev.pop()
    }

    pub fn contains(&self, x: &Name) -> bool {
        self.rev.iter().any(|(y, _)| y == x)
    }

    fn set_top(&mut self, e: Expr) {
        self.rev.last_mut().expect("non-empty stack").1 = e;
    }

    /// All frames below the top.
    pub fn tail(&self) -> &[(Name, Expr)] {
        &self.rev[..self.rev.len().saturating_sub(1)]
    }

    /// The frames as a heap, in stack order from the top.
    pub fn to_heap(&self) -> Heap {
        Heap::from_bindings(self.frames().cloned().collect()).expect("distinct frame names")
    }

    pub fn to_json(&self) -> Value {
        let bindings: Vec<(String, String)> =
            self.frames().map(|(x, e)| (x.to_string(), print(e))).collect();
        json!({"bindings": bindings, "ordered": true})
    }
}

impl std::fmt::Debug for Stack {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("[")?;
        for (i, (x, e)) in self.frames().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} ↦ {}", print(e))?;
        }
        f.write_str("]")
    }
}

/// Derivation of the stacked semantics.
pub type StackTrace = Derivation<(Heap, Stack), (Heap, Stack)>;

impl StackTrace {
    pub fn to_json(&self) -> Value {
        json!({
            "rule": self.rule,
            "input": {"heap": self.input.0.to_file(), "stack": self.input.1.to_json()},
            "output": {"heap": self.output.0.to_file(), "stack": self.output.1.to_json()},
            "children": self.children.iter().map(StackTrace::to_json).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StackResult {
    Success { heap: Heap, stack: Stack, trace: StackTrace },
    Diverged,
    Blackhole(Name),
    UnboundVar(Name),
}

impl From<Stuck> for StackResult {
    fn from(s: Stuck) -> StackResult {
        match s {
            Stuck::Diverged => StackResult::Diverged,
            Stuck::Blackhole(x) => StackResult::Blackhole(x),
            Stuck::UnboundVar(x) => StackResult::UnboundVar(x),
        }
    }
}

struct Machine {
    supply: Supply,
}

impl Machine {
    fn eval(&mut self, heap: Heap, mut stack: Stack) -> Result<(Heap, Stack, StackTrace), Stuck> {
        self.supply.tick()?;
        let input = (heap.clone(), stack.clone());
        let (z, e) = stack.top().cloned().expect("non-empty stack");
        let (rule, heap, stack, children) = match e {
            Expr::Lam(..) => (Rule::Lam, heap, stack, vec![]),
            Expr::App(f, x) => {
                let w = fresh_in(&mut self.supply.avoid, &Name::new("w"));
                stack.set_top(Expr::App(Box::new(Expr::Var(w.clone())), x.clone()));
                stack.push(w, *f);
                let (delta, mut stack, t1) = self.eval(heap, stack)?;
                let (_, fun) = stack.pop().expect("argument frame");
                let fun = SynValue::from_expr(&fun).expect("value on top");
                let body = subst_avoiding(fun.body(), &x, fun.binder(), &mut self.supply.avoid);
                stack.set_top(body);
                let (theta, stack, t2) = self.eval(delta, stack)?;
                (Rule::App, theta, stack, vec![t1, t2])
            }
            Expr::Var(x) => {
                let mut rest = heap;
                let Some(bound) = rest.remove(&x) else {
                    return Err(if stack.contains(&x) {
                        Stuck::Blackhole(x)
                    } else {
                        Stuck::UnboundVar(x)
                    });
                };
                stack.push(x.clone(), bound);
                let (mut delta, mut stack, t) = self.eval(rest, stack)?;
                let (_, v) = stack.pop().expect("update frame");
                delta.insert(x, v.clone());
                stack.set_top(v);
                (Rule::Var, delta, stack, vec![t])
            }
            Expr::Let(binds, body) => {
                let (binds, body) = self.supply.freshen_let(&binds, &body);
                let mut extended = heap;
                for (x, rhs) in binds {
                    extended.insert(x, rhs);
                }
                stack.set_top(body);
                let (delta, stack, t) = self.eval(extended, stack)?;
                (Rule::Let, delta, stack, vec![t])
            }
        };
        debug_assert_eq!(stack.top().map(|f| &f.0), Some(&z));
        let trace = Derivation { rule, input, output: (heap.clone(), stack.clone()), children };
        Ok((heap, stack, trace))
    }
}

/// Evaluates the topmost frame of `stack` against `heap`.
pub fn eval_stacked(heap: &Heap, stack: &Stack, avoid: &NameSet, fuel: u64) -> StackResult {
    assert!(!stack.is_empty(), "eval_stacked needs a frame to evaluate");
    let mut avoid = avoid.clone();
    avoid.extend(heap.all_names());
    for (x, e) in stack.frames() {
        avoid.insert(x.clone());
        avoid.extend(e.all_names());
    }
    let mut m = Machine { supply: Supply { avoid, fuel } };
    match m.eval(heap.clone(), stack.clone()) {
        Ok((heap, stack, trace)) => StackResult::Success { heap, stack, trace },
        Err(s) => s.into(),
    }
}

/// Evaluates `Γ : e` by running the stacked semantics on a single fresh
/// frame `z ↦ e`.
pub fn run_via_stack_traced(heap: &Heap, e: &Expr, avoid: &NameSet, fuel: u64) -> StackResult {
    let mut avoid = avoid.clone();
    avoid.extend(config_names(heap, e));
    let z = fresh_in(&mut avoid, &Name::new("z"));
    eval_stacked(heap, &Stack::singleton(z, e.clone()), &avoid, fuel)
}

/// Like [`run_via_stack_traced`], reporting the result in the shape of the
/// natural semantics. The returned trace is the natural derivation read off
/// the stacked one.
pub fn run_via_stack(heap: &Heap, e: &Expr, avoid: &NameSet, fuel: u64) -> NatResult {
    match run_via_stack_traced(heap, e, avoid, fuel) {
        StackResult::Success { heap, stack, trace } => {
            let (_, v) = stack.top().expect("result frame");
            let value = SynValue::from_expr(v).expect("value on top");
            NatResult::Success { heap, value, trace: to_natural(&trace) }
        }
        StackResult::Diverged => NatResult::Diverged,
        StackResult::Blackhole(x) => NatResult::Blackhole(x),
        StackResult::UnboundVar(x) => NatResult::UnboundVar(x),
    }
}

/// Projects a stacked derivation onto the natural one: the judgment at each
/// node is the heap with the topmost frame.
pub fn to_natural(t: &StackTrace) -> crate::natural::DerivTrace {
    let top = |s: &Stack| s.top().expect("frame").1.clone();
    Derivation {
        rule: t.rule,
        input: (t.input.0.clone(), top(&t.input.1)),
        output: (
            t.output.0.clone(),
            SynValue::from_expr(&top(&t.output.1)).expect("value on top"),
        ),
        children: t.children.iter().map(to_natural).collect(),
    }
}

/// Checks the structural invariants of one judgment: frame names distinct and
/// disjoint from the heap, non-top frames are variables or applications, and
/// only the top frame's expression changed (to a lambda).
pub fn judgment_well_formed(input: &(Heap, Stack), output: &(Heap, Stack)) -> Result<(), String> {
    for (heap, stack) in [input, output] {
        let mut seen = NameSet::new();
        for (x, _) in stack.frames() {
            if !seen.insert(x.clone()) || heap.contains(x) {
                return Err(format!("frame name {x} not distinct"));
            }
        }
        for (x, e) in stack.tail() {
            if !matches!(e, Expr::Var(_) | Expr::App(..)) {
                return Err(format!("non-top frame {x} ↦ {} is not a variable or application", print(e)));
            }
        }
    }
    let (si, so) = (&input.1, &output.1);
    if si.len() != so.len() || si.tail() != so.tail() {
        return Err(format!("stack below the top changed: {si:?} vs {so:?}"));
    }
    match (si.top(), so.top()) {
        (Some((z1, _)), Some((z2, Expr::Lam(..)))) if z1 == z2 => Ok(()),
        _ => Err(format!("top frame mismatch: {si:?} vs {so:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::natural::eval_nat;
    use crate::syntax::{heap_alpha_eq, parse};

    fn frame(z: &str, e: &str) -> Stack {
        Stack::singleton(Name::new(z), parse(e).unwrap())
    }

    #[test]
    fn lam_axiom() {
        let r = eval_stacked(&Heap::new(), &frame("z", r"\x. x"), &NameSet::new(), 5);
        let StackResult::Success { heap, stack, .. } = r else { panic!("{r:?}") };
        assert!(heap.is_empty());
        assert_eq!(stack, frame("z", r"\x. x"));
    }

    #[test]
    fn var_then_lam() {
        let gamma = Heap::of(&[("x", r"\y. y")]);
        let r = eval_stacked(&gamma, &frame("z", "x"), &NameSet::new(), 10);
        let StackResult::Success { heap, stack, trace } = r else { panic!("{r:?}") };
        assert!(heap.same_bindings(&gamma));
        assert_eq!(stack, frame("z", r"\y. y"));
        assert_eq!(trace.size(), 2);
    }

    #[test]
    fn let_app_var_lam() {
        let r = eval_stacked(&Heap::new(), &frame("z", r"let i = \x. x in i i"), &NameSet::new(), 20);
        let StackResult::Success { heap, stack, trace } = r else { panic!("{r:?}") };
        let (z, v) = stack.top().unwrap();
        assert_eq!(z, &Name::new("z"));
        let v = SynValue::from_expr(v).unwrap();
        let want = (Heap::of(&[("i", r"\x. x")]), SynValue::from_expr(&parse(r"\x. x").unwrap()).unwrap());
        assert!(heap_alpha_eq((&heap, &v), (&want.0, &want.1), &NameSet::new()));
        for n in trace.nodes() {
            judgment_well_formed(&n.input, &n.output).unwrap();
        }
    }

    #[test]
    fn app_pushes_argument_frame() {
        let r = eval_stacked(&Heap::new(), &frame("z", r"(\y. y) z_0"), &NameSet::new(), 20);
        // z_0 is not a valid suffix spelling, so it is a plain name.
        let StackResult::UnboundVar(x) = r else { panic!("{r:?}") };
        assert_eq!(x.to_string(), "z_0");
        let gamma = Heap::of(&[("q", r"\k. k")]);
        let StackResult::Success { trace, .. } =
            eval_stacked(&gamma, &frame("z", r"(\y. y) q"), &NameSet::new(), 20)
        else {
            panic!()
        };
        let first = &trace.children[0].input.1;
        let frames: Vec<_> = first.frames().map(|(x, e)| (x.to_string(), print(e))).collect();
        assert_eq!(frames, vec![("w".into(), r"\y. y".into()), ("z".into(), "w q".into())]);
    }

    #[test]
    fn bridge_examples() {
        let none = NameSet::new();
        let id = parse(r"\x. x").unwrap();
        let r = run_via_stack(&Heap::new(), &id, &none, 10);
        assert_eq!(r.success().unwrap().1.to_expr(), id);

        let gamma = Heap::of(&[("x", r"\a. let b = b in b")]);
        let r = run_via_stack(&gamma, &parse("x").unwrap(), &none, 10);
        let (h, v) = r.success().unwrap();
        assert!(h.same_bindings(&gamma));
        assert_eq!(v.to_expr(), parse(r"\a. let b = b in b").unwrap());

        let r = run_via_stack(&Heap::of(&[("x", "x")]), &parse("x").unwrap(), &none, 10);
        assert_eq!(r, NatResult::Blackhole(Name::new("x")));
    }

    #[test]
    fn agrees_with_natural_on_samples() {
        let cases = [
            (Heap::new(), r"let i = \x. x in i i"),
            (Heap::of(&[("x", r"(\y. y) z"), ("z", r"\q. q")]), "x"),
            (Heap::new(), r"let d = \f. f f in d d"),
            (Heap::new(), r"let f = \u. let c = \k. k in c in let a = f f, b = f a in a b"),
            (Heap::of(&[("x", "y"), ("y", "x")]), "x"),
        ];
        for (gamma, src) in cases {
            let e = parse(src).unwrap();
            for fuel in [0, 3, 7, 40] {
                let n = eval_nat(&gamma, &e, &NameSet::new(), fuel);
                let s = run_via_stack(&gamma, &e, &NameSet::new(), fuel);
                assert_eq!(n.kind(), s.kind(), "{src} at {fuel}");
                if let (Some(a), Some(b)) = (n.success(), s.success()) {
                    assert!(heap_alpha_eq(a, b, &gamma.domain()), "{src}");
                }
            }
        }
    }

    #[test]
    fn stack_json_is_ordered() {
        let s = Stack::from_frames(vec![
            (Name::new("w"), parse(r"\y. y").unwrap()),
            (Name::new("z"), parse("w q").unwrap()),
        ]);
        let j = s.to_json();
        assert_eq!(j["ordered"], true);
        assert_eq!(j["bindings"][0][0], "w");
    }
}
