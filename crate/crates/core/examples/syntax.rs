//! Parsing, printing, substitution and alpha-equivalence.

use lazylab::syntax::{alpha_eq, parse, parse_desugared, print, subst, Name};

fn main() {
    let e = parse(r"\x. let f = \y. x in f x").unwrap();
    println!("parsed     {}", print(&e));
    println!("free       {:?}", parse(r"\x. f x y").unwrap().free_vars());

    // Substituting `x` for `y` renames the binder that would capture it.
    let body = parse(r"\x. y").unwrap();
    println!("subst      {} [x/y] = {}", print(&body), print(&subst(&body, &Name::new("x"), &Name::new("y"))));

    println!("alpha      {}", alpha_eq(&parse(r"\a. a").unwrap(), &parse(r"\b. b").unwrap()));

    // Arguments must be variables; anything else is bound by a fresh let.
    let (d, warnings) = parse_desugared(r"(\x. x) (\y. y)").unwrap();
    println!("desugared  {}", print(&d));
    for w in warnings {
        println!("warning    {w}");
    }
}
