//! A small laboratory for the semantics of lazy evaluation.
//!
//! The crate provides
//!
//! * [`syntax`]: a lambda calculus with recursive `let` and variable-only
//!   application arguments, with parser, printer and capture-avoiding
//!   substitution;
//! * [`natural`]: the big-step natural semantics with heaps and blackholing;
//! * [`stacked`]: a variant of it that keeps the evaluation context as an
//!   explicit stack of named frames;
//! * [`domain`]: finite rank-indexed approximations of the reflexive domain
//!   `Value = (Value → Value)⊥`;
//! * [`denotational`]: the expression and heap semantics over that domain,
//!   with least-upper-bound and right-sided-update heap combinators;
//! * [`verifier`]: generators and property checks relating all of the above.
//!
//! The `examples/` directory has one runnable program per capability.

pub mod cli;
pub mod denotational;
pub mod domain;
pub mod natural;
pub mod stacked;
pub mod syntax;
pub mod verifier;
