//! Terms of the lazy lambda calculus: names, expressions, heaps, and the
//! concrete syntax.

mod expr;
mod heap;
mod name;
mod parse;
mod print;

pub use expr::{
    alpha_eq, desugar_app, freshen_binders, rename_free_map, subst, subst_avoiding, Expr,
};
pub use heap::{heap_alpha_eq, Heap, HeapError, HeapFile, SynValue};
pub use name::{fresh, fresh_in, Name, NameError, NameSet};
pub use parse::{parse, parse_desugared, ParseError, ParseErrorKind, Pos};
pub use print::{heap_print, print};
