//! One-dimensional characters of `GL_r` and the scalars they induce.
//!
//! A character is `χ(A) = |det A|^m · sign(det A)^ε`. The line bundles used
//! throughout (densities, orientations, top exterior powers of the dual) are
//! all of this form, so canonical isomorphisms between them reduce to
//! identities in the group `ℤ × ℤ₂`.
//!
//! For an isomorphism with matrix `M` in chosen frames, the induced map on the
//! associated line multiplies frame coordinates by `χ(det M)`; the constants
//! below are chosen so that `DENSITY · ORIENTATION = LAMBDA_TOP_DUAL`.

use std::ops::Mul;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symcore::{Decision, LogSum, RatExpr, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Character {
    pub m: i64,
    pub eps: u8,
}

impl Character {
    pub const TRIVIAL: Character = Character { m: 0, eps: 0 };
    /// `Λ^top V*`.
    pub const LAMBDA_TOP_DUAL: Character = Character { m: -1, eps: 1 };
    /// `D_V`.
    pub const DENSITY: Character = Character { m: -1, eps: 0 };
    /// `o_V`.
    pub const ORIENTATION: Character = Character { m: 0, eps: 1 };

    pub fn new(m: i64, eps: u8) -> Character {
        Character { m, eps: eps % 2 }
    }

    /// `D_V^l`.
    pub fn l_density(l: i64) -> Character {
        Character { m: -l, eps: 0 }
    }

    pub fn inv(self) -> Character {
        Character {
            m: -self.m,
            eps: self.eps,
        }
    }

    /// `|det|^m sign(det)^ε` evaluated at a determinant, as a formal scalar.
    pub fn apply(self, det: &RatExpr) -> Result<FormalScalar> {
        if det.is_zero() {
            return Err(Error::DivisionByZero(None));
        }
        let abs_part = if self.m == 0 {
            LogSum::zero()
        } else {
            LogSum::ln_abs(Rational::from_integer(BigInt::from(self.m)), det.clone())?
        };
        let sign_part = if self.eps == 1 { det.clone() } else { RatExpr::one() };
        Ok(FormalScalar { abs_part, sign_part })
    }
}

impl Mul for Character {
    type Output = Character;
    fn mul(self, rhs: Character) -> Character {
        Character {
            m: self.m + rhs.m,
            eps: (self.eps + rhs.eps) % 2,
        }
    }
}

pub fn char_mul(a: Character, b: Character) -> Character {
    a * b
}

pub fn char_inv(a: Character) -> Character {
    a.inv()
}

pub fn char_apply(chi: Character, det: &RatExpr) -> Result<FormalScalar> {
    chi.apply(det)
}

/// A nonzero real scalar split as `ln|·|` (formal) and a rational function
/// whose pointwise sign is the sign of the scalar.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalScalar {
    pub abs_part: LogSum,
    pub sign_part: RatExpr,
}

impl FormalScalar {
    pub fn one() -> FormalScalar {
        FormalScalar {
            abs_part: LogSum::zero(),
            sign_part: RatExpr::one(),
        }
    }

    /// The scalar `r` itself.
    pub fn from_ratexpr(r: &RatExpr) -> Result<FormalScalar> {
        Character::new(1, 1).apply(r)
    }

    pub fn mul(&self, other: &FormalScalar) -> FormalScalar {
        FormalScalar {
            abs_part: &self.abs_part + &other.abs_part,
            sign_part: self.sign_part.sign_product(&other.sign_part),
        }
    }

    pub fn inv(&self) -> FormalScalar {
        FormalScalar {
            abs_part: -&self.abs_part,
            sign_part: self.sign_part.clone(),
        }
    }

    pub fn substitute(&self, map: &[(String, RatExpr)]) -> Result<FormalScalar> {
        let sign_part = self.sign_part.substitute(map)?;
        if sign_part.is_zero() {
            return Err(Error::SignVanishes(format!("{} after substitution", self.sign_part)));
        }
        Ok(FormalScalar {
            abs_part: self.abs_part.substitute(map)?,
            sign_part,
        })
    }

    /// Whether the scalar is identically one: the absolute part vanishes and
    /// the sign part is a positive constant.
    pub fn is_one(&self) -> Decision {
        let sign_ok = match self.sign_part.as_constant() {
            Some(c) => c > Rational::from_integer(0.into()),
            None => return Decision::Unknown,
        };
        match (self.abs_part.zero_test(), sign_ok) {
            (Decision::Equal, true) => Decision::Equal,
            (_, false) | (Decision::NotEqual, _) => Decision::NotEqual,
            _ => Decision::Unknown,
        }
    }

    /// The scalar as a rational function, when the absolute part is a sum of
    /// integer multiples of logarithms and the sign is pinned down.
    pub fn to_ratexpr(&self) -> Option<RatExpr> {
        let s = self.abs_part.simplified();
        if s.rational.is_some() {
            return None;
        }
        let mut r = RatExpr::one();
        for t in &s.logs {
            if !t.coeff.is_integer() {
                return None;
            }
            let k: i64 = t.coeff.to_integer().try_into().ok()?;
            r = &r * &t.arg.powi(k).ok()?;
        }
        let c = r.sign_product(&self.sign_part).as_constant()?;
        Some(if c > Rational::from_integer(0.into()) { r } else { -r })
    }

    /// Semantic comparison: absolute parts decided by [`LogSum::compare`];
    /// sign parts agree when their reduced sign product is a positive
    /// constant.
    pub fn compare(&self, other: &FormalScalar) -> Decision {
        let ratio = self.sign_part.sign_product(&other.sign_part);
        let abs = self.abs_part.compare(&other.abs_part);
        match ratio.as_constant() {
            Some(c) if c > Rational::from_integer(0.into()) => abs,
            Some(_) => Decision::NotEqual,
            None => match abs {
                Decision::NotEqual => Decision::NotEqual,
                _ => Decision::Unknown,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn density_times_orientation_is_top_dual() {
        assert_eq!(Character::DENSITY * Character::ORIENTATION, Character::LAMBDA_TOP_DUAL);
        assert_eq!(Character::ORIENTATION * Character::ORIENTATION, Character::TRIVIAL);
        assert_eq!(Character::l_density(2) * Character::l_density(-2), Character::TRIVIAL);
    }

    #[test]
    fn inverses() {
        assert_eq!(Character::DENSITY.inv(), Character::new(1, 0));
        assert_eq!(Character::ORIENTATION.inv(), Character::ORIENTATION);
        assert_eq!(Character::TRIVIAL.inv(), Character::TRIVIAL);
    }

    #[test]
    fn canonical_isomorphisms_hold_as_character_identities() {
        let d = Character::DENSITY;
        let v = Character::LAMBDA_TOP_DUAL;
        let o = Character::ORIENTATION;
        assert_eq!(d, v * o);
        assert_eq!(v, d * o);
        assert_eq!(o * o, Character::TRIVIAL);
        assert_eq!(o, o.inv());
    }

    #[test]
    fn apply_examples() {
        let two = RatExpr::int(2);
        let s = Character::DENSITY.apply(&two).unwrap();
        assert_eq!(s.abs_part.logs.len(), 1);
        assert_eq!(s.abs_part.logs[0].coeff, Rational::from_integer((-1).into()));
        assert_eq!(s.abs_part.logs[0].arg, two);
        assert!(s.sign_part.is_one());

        let r = RatExpr::parse("-(1+x^2)", &["x"]).unwrap();
        let s = Character::ORIENTATION.apply(&r).unwrap();
        assert!(s.abs_part.logs.is_empty());
        assert_eq!(s.sign_part, r);

        let s = Character::TRIVIAL.apply(&r).unwrap();
        assert_eq!(s.is_one(), Decision::Equal);
        assert!(Character::DENSITY.apply(&RatExpr::zero()).is_err());
    }

    #[test]
    fn scalar_as_rational_function() {
        let half = Character::DENSITY.apply(&RatExpr::int(2)).unwrap();
        assert_eq!(half.to_ratexpr(), Some(RatExpr::ratio(1, 2)));
        let x = RatExpr::parse("x - 3", &["x"]).unwrap();
        assert_eq!(FormalScalar::from_ratexpr(&x).unwrap().to_ratexpr(), Some(x.clone()));
        let minus = FormalScalar::from_ratexpr(&RatExpr::int(-5)).unwrap();
        assert_eq!(minus.to_ratexpr(), Some(RatExpr::int(-5)));
        let sqrt = Character::new(1, 0).apply(&x).unwrap().mul(&FormalScalar {
            abs_part: Character::DENSITY.apply(&x).unwrap().abs_part.scale(&Rational::new(1.into(), 2.into())),
            sign_part: RatExpr::one(),
        });
        assert_eq!(sqrt.to_ratexpr(), None);
    }

    fn arb_char() -> impl Strategy<Value = Character> {
        (-5i64..5, 0u8..2).prop_map(|(m, e)| Character::new(m, e))
    }

    proptest! {
        #[test]
        fn group_laws(a in arb_char(), b in arb_char(), c in arb_char()) {
            prop_assert_eq!((a * b) * c, a * (b * c));
            prop_assert_eq!(a * b, b * a);
            prop_assert_eq!(a * a.inv(), Character::TRIVIAL);
            prop_assert_eq!(a * Character::TRIVIAL, a);
        }

        #[test]
        fn apply_is_a_homomorphism(a in arb_char(), b in arb_char(), k in 1i64..6, s in prop::bool::ANY) {
            let det = RatExpr::parse(&format!("{}({k} + x^2)", if s { "-" } else { "" }), &["x"]).unwrap();
            let lhs = (a * b).apply(&det).unwrap();
            let rhs = a.apply(&det).unwrap().mul(&b.apply(&det).unwrap());
            prop_assert_eq!(lhs.compare(&rhs), Decision::Equal);
        }
    }
}
