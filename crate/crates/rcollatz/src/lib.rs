//! Command-line front end, parallel range verification, and file formats
//! for [`rcollatz_core`].

pub mod cli;
pub mod expr;
pub mod format;
pub mod sieve;

pub use expr::{eval_int_expr, parse_int_expr, ExprError, IntExpr};
pub use sieve::{verify_range, SieveConfig, SieveError};
