//! Denotations of expressions and heaps, under both ways of combining a
//! heap with its environment.

use lazylab::denotational::{den_expr, den_heap, show_table, HeapVariant};
use lazylab::domain::{fn_make, Env};
use lazylab::syntax::{parse, Heap, Name};

fn main() {
    for src in [r"\x. x", r"\x. \y. x", r"let b = b in b", r"let i = \x. x in i i"] {
        let u = den_expr(&parse(src).unwrap(), &Env::bot(3), 3, HeapVariant::Join).unwrap();
        println!("{src:24} {}", show_table(u));
    }

    // The environment already knows something about `x`; joining keeps it,
    // updating replaces it with the heap's own value.
    let heap = Heap::of(&[("x", r"\a. let b = b in b"), ("y", "x")]);
    let env = Env::from_pairs(3, [(Name::new("x"), fn_make(3, |_| fn_make(2, |a| a).unwrap()).unwrap())]);
    for variant in [HeapVariant::Join, HeapVariant::Update] {
        let h = den_heap(&heap, &env, 3, variant).unwrap();
        println!("{variant:?}: x ↦ {}, y ↦ {}", show_table(h.get(&Name::new("x"))), show_table(h.get(&Name::new("y"))));
    }
}
