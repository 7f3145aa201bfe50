//! Target language: syntax, text format, validation and reduction.

pub mod ast;
pub mod check;
pub mod interp;
pub mod parser;
pub mod print;

pub use ast::{Binding, Clause, Ctor, Expr, MethodSubst, Pattern, Program, TlError, Value};
pub use check::{check_program, CheckError};
pub use interp::{run_program, tl_eval, tl_eval_traced, tl_step, Outcome, StuckReason};
pub use parser::{parse_expr, parse_program};
pub use print::{print_expr, print_program};
