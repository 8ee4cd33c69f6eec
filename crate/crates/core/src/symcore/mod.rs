//! Exact rational-function arithmetic, differentiation, parsing and
//! printing, formal logarithms, and a midpoint quadrature for densities.

mod chart;
pub mod linalg;
mod logsum;
mod parse;
mod poly;
mod quadrature;
mod ratexpr;

pub use chart::Chart;
pub use logsum::{Decision, LogSum, LogTerm};
pub use parse::is_identifier;
pub use quadrature::integrate_density;
pub use ratexpr::RatExpr;

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

/// Parse a rational literal such as `-3/4` or `2`.
pub fn parse_rational(text: &str) -> crate::Result<Rational> {
    RatExpr::parse::<&str>(text, &[])?
        .as_constant()
        .ok_or_else(|| crate::Error::Schema(format!("`{text}` is not a rational constant")))
}

/// Parse an expression over `vars`.
pub fn parse<S: AsRef<str>>(text: &str, vars: &[S]) -> crate::Result<RatExpr> {
    RatExpr::parse(text, vars)
}

/// `a op b` for the four field operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn arith(op: ArithOp, a: &RatExpr, b: &RatExpr) -> crate::Result<RatExpr> {
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.try_div(b)?,
    })
}
