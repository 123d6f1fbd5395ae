//! A small computer-algebra kernel.
//!
//! Expressions are immutable trees over registered symbols with exact rational
//! constants. Arithmetic keeps results in an expanded canonical form, so
//! polynomial and Laurent-monomial identities reduce to a structural zero;
//! anything else falls back to seeded random probing in [`ZeroTester`].

mod diff;
mod eval;
mod expr;
mod normal;
mod parse;
mod symbol;
mod zero;

pub use diff::diff;
pub use eval::{eval, EvalError, Valuation};
pub use expr::{Expr, Func, Node};
pub use parse::{parse, ParseError};
pub use symbol::{Role, Symbol, SymbolError, SymbolTable};
pub use zero::{
    is_zero, PointSampler, ZeroMethod, ZeroTester, ZeroVerdict, DEFAULT_PROBES, DEFAULT_SEED, DEFAULT_TOLERANCE,
    MIN_DENOMINATOR, SAMPLE_HIGH, SAMPLE_LOW,
};

pub use num_rational::BigRational;
