//! Rate expressions and guards.
//!
//! Rates are polynomials over parameters and state variables; guards are
//! comparisons of such polynomials joined by `&` and `|`. Literals are kept as
//! exact rationals so guard decisions never depend on float rounding.

mod ast;
mod eval;
mod parser;

pub use ast::{format_decimal, CmpOp, Expr, GuardExpr};
pub use eval::{Atom, CompiledExpr, CompiledGuard, EvalError, Monomial, Polynomial};
pub use parser::{guard_true, parse_decimal, parse_expression, parse_guard, ParseError};

use std::collections::BTreeSet;

/// Identifiers of either an arithmetic expression or a guard.
pub fn free_identifiers<E: HasIdentifiers + ?Sized>(e: &E) -> BTreeSet<String> {
    e.identifiers()
}

pub trait HasIdentifiers {
    fn identifiers(&self) -> BTreeSet<String>;
}

impl HasIdentifiers for Expr {
    fn identifiers(&self) -> BTreeSet<String> {
        self.free_identifiers()
    }
}

impl HasIdentifiers for GuardExpr {
    fn identifiers(&self) -> BTreeSet<String> {
        self.free_identifiers()
    }
}
