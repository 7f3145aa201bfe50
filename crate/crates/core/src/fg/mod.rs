//! Featherweight Go: syntax, declarations, checking and reduction.

pub mod ast;
pub mod decls;
pub mod interp;
pub mod parser;
pub mod print;
pub mod typeck;
pub mod wf;

pub use ast::{Expr, ExprKind, Mode, Program, Value};
pub use decls::{Decls, LookupError, TypeKind};
pub use interp::{fg_eval, fg_eval_traced, fg_step, Outcome, StuckReason};
pub use parser::{parse_expr, parse_program};
pub use print::{print_expr, print_program};
pub use wf::check_wellformed;
