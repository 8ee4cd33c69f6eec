//! Formal sums `r + Σ qᵢ·ln|aᵢ|` with `r`, `aᵢ` rational functions and
//! `qᵢ` rational numbers.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{RatExpr, Rational};
use crate::error::{Error, Result};

/// `coeff · ln|arg|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogTerm {
    pub coeff: Rational,
    pub arg: RatExpr,
}

impl LogTerm {
    pub fn new(coeff: Rational, arg: RatExpr) -> Result<LogTerm> {
        if arg.is_zero() {
            return Err(Error::DivisionByZero(None));
        }
        Ok(LogTerm { coeff, arg })
    }
}

/// Three-valued outcome of comparing formal logarithmic sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Equal,
    NotEqual,
    Unknown,
}

impl Decision {
    pub fn is_equal(self) -> bool {
        self == Decision::Equal
    }
}

/// A rational part plus finitely many logarithmic terms.
#[derive(Clone, Debug, Default)]
pub struct LogSum {
    pub rational: Option<RatExpr>,
    pub logs: Vec<LogTerm>,
}

impl LogSum {
    pub fn zero() -> LogSum {
        LogSum::default()
    }

    pub fn from_rational(r: RatExpr) -> LogSum {
        LogSum {
            rational: Some(r),
            logs: Vec::new(),
        }
    }

    /// `coeff · ln|arg|`.
    pub fn ln_abs(coeff: Rational, arg: RatExpr) -> Result<LogSum> {
        let t = LogTerm::new(coeff, arg)?;
        Ok(LogSum {
            rational: None,
            logs: vec![t],
        }
        .simplified())
    }

    pub fn rational_part(&self) -> RatExpr {
        self.rational.clone().unwrap_or_else(RatExpr::zero)
    }

    pub fn scale(&self, c: &Rational) -> LogSum {
        LogSum {
            rational: self.rational.as_ref().map(|r| r.scale(c)),
            logs: self
                .logs
                .iter()
                .map(|t| LogTerm {
                    coeff: &t.coeff * c,
                    arg: t.arg.clone(),
                })
                .collect(),
        }
        .simplified()
    }

    /// Merge equal arguments (up to sign), drop `ln|±1|`, combine terms
    /// with equal coefficients by multiplying their arguments.
    pub fn simplified(&self) -> LogSum {
        let mut merged: Vec<LogTerm> = Vec::new();
        for t in &self.logs {
            if t.coeff.is_zero() {
                continue;
            }
            let arg = canonical_sign(&t.arg);
            if let Some(m) = merged.iter_mut().find(|m| m.arg == arg) {
                m.coeff += &t.coeff;
            } else {
                merged.push(LogTerm {
                    coeff: t.coeff.clone(),
                    arg,
                });
            }
        }
        merged.retain(|t| !t.coeff.is_zero() && !t.arg.is_one());

        let mut by_coeff: Vec<LogTerm> = Vec::new();
        for t in merged {
            if let Some(m) = by_coeff.iter_mut().find(|m| m.coeff == t.coeff) {
                m.arg = canonical_sign(&(&m.arg * &t.arg));
            } else {
                by_coeff.push(t);
            }
        }
        by_coeff.retain(|t| !t.arg.is_one());
        by_coeff.sort_by_key(|t| (t.arg.to_string(), t.coeff.clone()));
        let rational = self.rational.clone().filter(|r| !r.is_zero());
        LogSum {
            rational,
            logs: by_coeff,
        }
    }

    /// Decide whether this sum vanishes identically.
    ///
    /// With `L` the common denominator of the coefficients and
    /// `P = ∏ aᵢ^{L·qᵢ}`, the log part vanishes iff `P = ±1`. A nonzero
    /// rational part alongside a nonconstant `P` is left undecided.
    pub fn zero_test(&self) -> Decision {
        let s = self.simplified();
        let r = s.rational_part();
        if s.logs.is_empty() {
            return if r.is_zero() { Decision::Equal } else { Decision::NotEqual };
        }
        let product = match s.combined_argument() {
            Ok(p) => p,
            Err(_) => return Decision::Unknown,
        };
        let trivial_log = product.as_constant().is_some_and(|c| c.abs().is_one());
        match (r.is_zero(), trivial_log) {
            (true, true) => Decision::Equal,
            (true, false) => Decision::NotEqual,
            (false, true) => Decision::NotEqual,
            (false, false) => {
                // a nonzero rational plus ln of a positive rational ≠ 1 cannot vanish
                if r.as_constant().is_some() && product.as_constant().is_some() {
                    Decision::NotEqual
                } else {
                    Decision::Unknown
                }
            }
        }
    }

    /// `∏ aᵢ^{kᵢ}` with `kᵢ = L·qᵢ` integers, `L` the lcm of the
    /// coefficient denominators.
    pub fn combined_argument(&self) -> Result<RatExpr> {
        let l = self
            .logs
            .iter()
            .fold(BigInt::one(), |acc, t| acc.lcm(t.coeff.denom()));
        let mut product = RatExpr::one();
        for t in &self.logs {
            let k = (&t.coeff * Rational::from_integer(l.clone())).to_integer();
            let k = k
                .to_i64()
                .ok_or_else(|| Error::MalformedCocycle("logarithm exponent too large".into()))?;
            product = &product * &t.arg.powi(k)?;
        }
        Ok(product)
    }

    pub fn compare(&self, other: &LogSum) -> Decision {
        (self - other).zero_test()
    }

    pub fn partial(&self, var: &str) -> RatExpr {
        let mut acc = self.rational_part().partial(var);
        for t in &self.logs {
            let d = t.arg.partial(var);
            if d.is_zero() {
                continue;
            }
            let q = d.try_div(&t.arg).expect("log argument is nonzero");
            acc = &acc + &q.scale(&t.coeff);
        }
        acc
    }

    pub fn substitute(&self, map: &[(String, RatExpr)]) -> Result<LogSum> {
        let rational = match &self.rational {
            Some(r) => Some(r.substitute(map)?),
            None => None,
        };
        let mut logs = Vec::with_capacity(self.logs.len());
        for t in &self.logs {
            let arg = t.arg.substitute(map)?;
            if arg.is_zero() {
                return Err(Error::Pole(format!("ln|{}| after substitution", t.arg)));
            }
            logs.push(LogTerm {
                coeff: t.coeff.clone(),
                arg,
            });
        }
        Ok(LogSum { rational, logs }.simplified())
    }

    pub fn substitute_values(&self, map: &[(String, Rational)]) -> Result<LogSum> {
        let m: Vec<(String, RatExpr)> = map
            .iter()
            .map(|(k, v)| (k.clone(), RatExpr::constant(v.clone())))
            .collect();
        self.substitute(&m)
    }

    /// Floating-point value, when every part is a constant.
    pub fn to_f64(&self) -> Option<f64> {
        let r = self.rational_part().as_constant()?;
        let mut v = r.to_f64()?;
        for t in &self.logs {
            let a = t.arg.as_constant()?;
            v += t.coeff.to_f64()? * a.abs().to_f64()?.ln();
        }
        Some(v)
    }
}

/// Representative of `±a` with a positive leading numerator coefficient.
fn canonical_sign(a: &RatExpr) -> RatExpr {
    if a.leading_negative() {
        -a
    } else {
        a.clone()
    }
}

impl PartialEq for LogSum {
    /// Structural equality of simplified forms; see [`LogSum::compare`] for
    /// the semantic test.
    fn eq(&self, other: &LogSum) -> bool {
        let a = self.simplified();
        let b = other.simplified();
        a.rational_part() == b.rational_part() && a.logs == b.logs
    }
}

impl From<RatExpr> for LogSum {
    fn from(r: RatExpr) -> Self {
        LogSum::from_rational(r)
    }
}

impl Add for &LogSum {
    type Output = LogSum;
    fn add(self, rhs: &LogSum) -> LogSum {
        let rational = match (&self.rational, &rhs.rational) {
            (None, None) => None,
            (a, b) => Some(
                a.clone().unwrap_or_else(RatExpr::zero) + b.clone().unwrap_or_else(RatExpr::zero),
            ),
        };
        let mut logs = self.logs.clone();
        logs.extend(rhs.logs.iter().cloned());
        LogSum { rational, logs }.simplified()
    }
}

impl Neg for &LogSum {
    type Output = LogSum;
    fn neg(self) -> LogSum {
        self.scale(&-Rational::one())
    }
}

impl Sub for &LogSum {
    type Output = LogSum;
    fn sub(self, rhs: &LogSum) -> LogSum {
        self + &(-rhs)
    }
}

impl Add for LogSum {
    type Output = LogSum;
    fn add(self, rhs: LogSum) -> LogSum {
        &self + &rhs
    }
}

impl Sub for LogSum {
    type Output = LogSum;
    fn sub(self, rhs: LogSum) -> LogSum {
        &self - &rhs
    }
}

impl Neg for LogSum {
    type Output = LogSum;
    fn neg(self) -> LogSum {
        -&self
    }
}

impl fmt::Display for LogSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.simplified();
        let mut wrote = false;
        if let Some(r) = &s.rational {
            write!(f, "{r}")?;
            wrote = true;
        }
        for t in &s.logs {
            let neg = t.coeff.is_negative();
            let abs = t.coeff.abs();
            if wrote {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            } else if neg {
                write!(f, "-")?;
            }
            if !abs.is_one() {
                write!(f, "{abs}*")?;
            }
            write!(f, "ln|{}|", t.arg)?;
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}
