//! Big-step evaluation with a heap, blackholing and fuel.

use lazylab::natural::{eval_nat, DerivTrace, NatResult};
use lazylab::syntax::{heap_print, parse, print, Heap, NameSet};

fn show(t: &DerivTrace, depth: usize) {
    println!(
        "{:indent$}{:?}: {} : {}  =>  {}",
        "",
        t.rule,
        heap_print(&t.input.0),
        print(&t.input.1),
        print(&t.output.1.to_expr()),
        indent = 2 * depth
    );
    for c in &t.children {
        show(c, depth + 1);
    }
}

fn main() {
    let e = parse(r"let i = \x. x in i i").unwrap();
    match eval_nat(&Heap::new(), &e, &NameSet::new(), 50) {
        NatResult::Success { heap, value, trace } => {
            println!("{} : {}", heap_print(&heap), print(&value.to_expr()));
            show(&trace, 0);
        }
        other => println!("stuck: {:?}", other.kind()),
    }

    // A thunk that needs its own value is a blackhole, not a loop.
    let heap = Heap::of(&[("x", "x")]);
    println!("{:?}", eval_nat(&heap, &parse("x").unwrap(), &NameSet::new(), 50).kind());

    // Genuine divergence runs out of fuel.
    let omega = parse(r"let o = \x. x x in o o").unwrap();
    println!("{:?}", eval_nat(&Heap::new(), &omega, &NameSet::new(), 500).kind());
}
