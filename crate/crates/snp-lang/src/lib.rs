//! Front-end for the SNP mini-language.
//!
//! An SNP is a straight-line imperative program over nonnegative integer
//! variables: a declaration block (the *variable context*) followed by a
//! body built from assignments, add/multiply-by-constant, two-operand
//! add/subtract, comparisons, single-expression conditionals, counted `for`
//! loops, and a final `return`. This crate parses the concrete syntax,
//! validates the structural rules, inlines subprogram calls, interprets
//! programs, and sweeps input ranges to find the runtime value bound used
//! by the compiler.

pub mod ast;
pub mod bounds;
pub mod inline;
pub mod interp;
pub mod parse;
pub mod pretty;
pub mod validate;

#[cfg(feature = "fuzz")]
pub mod fuzz;

pub use ast::{ArithOp, CmpOp, Operand, Program, Statement, VarDecl, VarId, VarKind};
pub use bounds::{bound_profile, BoundError, BoundProfile, SweepOptions};
pub use inline::{inline_composite, InlineError};
pub use interp::{interpret, interpret_bounded, run, ExecError, ExecOptions, ExecOutcome, LoopExit};
pub use parse::{parse, parse_module, ParseError};
pub use pretty::{pretty, pretty_module};
pub use validate::{validate, Diagnostic, Severity};
