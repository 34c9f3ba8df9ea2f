use std::fmt::Write;

use super::expr::Expr;
use super::heap::Heap;

/// Prints `e` in the concrete syntax accepted by [`super::parse`], with the
/// fewest parentheses that still parse back to the same tree.
pub fn print(e: &Expr) -> String {
    let mut out = String::new();
    go(e, false, &mut out);
    out
}

fn go(e: &Expr, fun_pos: bool, out: &mut String) {
    match e {
        Expr::Var(x) => {
            let _ = write!(out, "{x}");
        }
        Expr::App(f, x) => {
            go(f, true, out);
            let _ = write!(out, " {x}");
        }
        Expr::Lam(..) | Expr::Let(..) if fun_pos => {
            out.push('(');
            go(e, false, out);
            out.push(')');
        }
        Expr::Lam(x, b) => {
            let _ = write!(out, "\\{x}. ");
            go(b, false, out);
        }
        Expr::Let(bs, b) => {
            out.push_str("let ");
            for (i, (x, r)) in bs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{x} = ");
                go(r, false, out);
            }
            out.push_str(" in ");
            go(b, false, out);
        }
    }
}

/// `{x = e, y = e'}` in binding order.
pub fn heap_print(h: &Heap) -> String {
    let parts: Vec<String> = h.iter().map(|(x, e)| format!("{x} = {}", print(e))).collect();
    format!("{{{}}}", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, Name};

    #[test]
    fn print_examples() {
        assert_eq!(print(&Expr::lam("x", Expr::var("x"))), r"\x. x");
        assert_eq!(
            print(&Expr::let_in(vec![(Name::new("b"), Expr::var("b"))], Expr::var("b"))),
            "let b = b in b"
        );
        assert_eq!(print(&Expr::app(Expr::var("f"), "x")), "f x");
    }

    #[test]
    fn parenthesizes_only_function_positions() {
        let e = Expr::app(Expr::lam("x", Expr::var("x")), "y");
        assert_eq!(print(&e), r"(\x. x) y");
        let e = Expr::lam("x", Expr::app(Expr::app(Expr::var("x"), "x_1"), "y"));
        assert_eq!(print(&e), r"\x. x x_1 y");
        assert_eq!(parse(&print(&e)).unwrap(), e);
    }

    #[test]
    fn nested_let_in_binding_round_trips() {
        let e = parse(r"let a = let b = \q. q in b, c = a in c").unwrap();
        assert_eq!(parse(&print(&e)).unwrap(), e);
    }
}
