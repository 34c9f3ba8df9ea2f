//! The stacked semantics, where the evaluation context is a stack of named
//! frames, and its agreement with the natural semantics.

use lazylab::natural::eval_nat;
use lazylab::stacked::{run_via_stack, run_via_stack_traced, StackResult};
use lazylab::syntax::{heap_alpha_eq, heap_print, parse, print, Heap, NameSet};

fn main() {
    let heap = Heap::of(&[("k", r"\a. \b. a"), ("i", r"\x. x")]);
    let e = parse("let y = k i in y k").unwrap();

    if let StackResult::Success { trace, .. } = run_via_stack_traced(&heap, &e, &NameSet::new(), 100) {
        for node in trace.nodes() {
            let frames: Vec<String> = node.input.1.frames().map(|(z, e)| format!("{z} = {}", print(e))).collect();
            println!("{:?}\t{}  [{}]", node.rule, heap_print(&node.input.0), frames.join(", "));
        }
    }

    let nat = eval_nat(&heap, &e, &NameSet::new(), 100);
    let stk = run_via_stack(&heap, &e, &NameSet::new(), 100);
    let (a, b) = (nat.success().unwrap(), stk.success().unwrap());
    println!("natural  {} : {}", heap_print(a.0), print(&a.1.to_expr()));
    println!("stacked  {} : {}", heap_print(b.0), print(&b.1.to_expr()));
    println!("alpha-equivalent: {}", heap_alpha_eq(a, b, &heap.domain()));
}
