//! Recursive-descent parser for the expression grammar
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' uint)?
//! base   := rational | name | '(' expr ')'
//! ```
//!
//! Rational literals carry an optional sign and an optional `/digits`
//! denominator; the slash belongs to the literal only when a digit follows it
//! directly. As an extension a sign may also precede any other base, so
//! `-x` reads as `-(x)`.

use num_bigint::BigInt;

use super::{RatExpr, Rational};
use crate::error::{Error, Result};

pub(crate) fn parse<S: AsRef<str>>(text: &str, vars: &[S]) -> Result<RatExpr> {
    let names: Vec<String> = vars.iter().map(|s| s.as_ref().to_string()).collect();
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        names: &names,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(e.with_vars(&names))
}

/// Identifier syntax accepted by the parser.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn error(&self, message: String) -> Error {
        Error::Syntax {
            position: self.pos,
            message,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RatExpr> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == b'+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatExpr> {
        let mut acc = self.factor()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            let at = self.pos;
            self.pos += 1;
            let rhs = self.factor()?;
            acc = if op == b'*' {
                acc * rhs
            } else {
                acc.try_div(&rhs).map_err(|_| Error::DivisionByZero(Some(at)))?
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<RatExpr> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let digits = self.digits();
            if digits.is_empty() {
                return Err(self.error("expected a nonnegative integer exponent".into()));
            }
            let e: u32 = digits.parse().map_err(|_| Error::Syntax {
                position: start,
                message: "exponent too large".into(),
            })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn base(&mut self) -> Result<RatExpr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input".into())),
            Some(sign @ (b'-' | b'+')) => {
                self.pos += 1;
                let negative = sign == b'-';
                if self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    let q = self.literal()?;
                    Ok(RatExpr::constant(if negative { -q } else { q }))
                } else {
                    let f = self.factor()?;
                    Ok(if negative { -f } else { f })
                }
            }
            Some(c) if c.is_ascii_digit() => Ok(RatExpr::constant(self.literal()?)),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric()
                        || self.src[self.pos] == b'_'
                        || self.src[self.pos] == b'\'')
                {
                    self.pos += 1;
                }
                let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                if !self.names.contains(&name) {
                    return Err(Error::UnknownVariable(name));
                }
                Ok(RatExpr::var(&name))
            }
            Some(c) => Err(self.error(format!("unexpected `{}`", c as char))),
        }
    }

    fn literal(&mut self) -> Result<Rational> {
        let numer: BigInt = self.digits().parse().expect("digits");
        if self.src.get(self.pos) == Some(&b'/') && self.src.get(self.pos + 1).is_some_and(u8::is_ascii_digit) {
            let at = self.pos;
            self.pos += 1;
            let denom: BigInt = self.digits().parse().expect("digits");
            if denom == BigInt::from(0) {
                return Err(Error::DivisionByZero(Some(at)));
            }
            return Ok(Rational::new(numer, denom));
        }
        Ok(Rational::from_integer(numer))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial() {
        let e = parse("x^2*y", &["x", "y"]).unwrap();
        assert_eq!(e.to_string(), "x^2*y");
    }

    #[test]
    fn cancels_common_factor() {
        let e = parse("(x^2-1)/(x-1)", &["x"]).unwrap();
        assert_eq!(e.to_string(), "x + 1");
    }

    #[test]
    fn zero_denominator() {
        assert!(matches!(parse("x/0", &["x"]), Err(Error::DivisionByZero(Some(1)))));
        assert!(matches!(parse("1/(x-x)", &["x"]), Err(Error::DivisionByZero(Some(1)))));
        assert!(matches!(parse("3/0", &["x"]), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse("x + * y", &["x", "y"]),
            Err(Error::Syntax {
                position: 4,
                message: "unexpected `*`".into()
            })
        );
        assert_eq!(parse("x + z", &["x"]), Err(Error::UnknownVariable("z".into())));
        assert!(matches!(parse("(x", &["x"]), Err(Error::Syntax { position: 2, .. })));
        assert!(matches!(parse("x^y", &["x", "y"]), Err(Error::Syntax { .. })));
    }

    #[test]
    fn literal_slash_binds_tighter_than_division() {
        assert_eq!(parse("2/3^2", &["x"]).unwrap(), RatExpr::ratio(4, 9));
        assert_eq!(parse("2/(3^2)", &["x"]).unwrap(), RatExpr::ratio(2, 9));
        assert_eq!(parse("-1/2*x", &["x"]).unwrap(), parse("-(x/2)", &["x"]).unwrap());
    }

    #[test]
    fn primed_identifiers() {
        assert!(is_identifier("u'"));
        assert!(!is_identifier("'u"));
        let e = parse("u + u' + u*u'", &["u", "u'"]).unwrap();
        assert_eq!(e.to_string(), "u*u' + u + u'");
    }
}
