//! Exact rational functions in canonical form.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::poly::{Monomial, Poly};
use super::Rational;
use crate::error::{Error, Result};

/// Ordered variable list shared between expressions.
pub type Vars = Arc<[String]>;

fn vars_from<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().into()
}

/// Merge two variable lists, keeping the order of `a` and appending the
/// variables of `b` that `a` lacks.
fn unify(a: &Vars, b: &Vars) -> Vars {
    if Arc::ptr_eq(a, b) || a[..] == b[..] {
        return a.clone();
    }
    if b.iter().all(|v| a.contains(v)) {
        return a.clone();
    }
    if a.iter().all(|v| b.contains(v)) {
        return b.clone();
    }
    let mut out: Vec<String> = a.to_vec();
    for v in b.iter() {
        if !out.contains(v) {
            out.push(v.clone());
        }
    }
    out.into()
}

/// A quotient of multivariate polynomials over ℚ.
///
/// Invariants: numerator and denominator are coprime; the denominator has
/// coprime integer coefficients and a positive leading coefficient under the
/// graded lexicographic order of `vars`. Zero is `0/1`.
#[derive(Clone)]
pub struct RatExpr {
    vars: Vars,
    num: Poly,
    den: Poly,
}

impl RatExpr {
    fn from_parts(vars: Vars, num: Poly, den: Poly) -> Result<RatExpr> {
        if den.is_zero() {
            return Err(Error::DivisionByZero(None));
        }
        let n = vars.len();
        if num.is_zero() {
            return Ok(RatExpr {
                vars,
                num: Poly::zero(n),
                den: Poly::one(n),
            });
        }
        if let Some(c) = den.as_constant() {
            return Ok(RatExpr {
                vars,
                num: num.scale(&c.recip()),
                den: Poly::one(n),
            });
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides numerator"),
                den.exact_div(&g).expect("gcd divides denominator"),
            )
        };
        let (s, den) = den.integer_primitive();
        let num = num.scale(&s.recip());
        Ok(RatExpr { vars, num, den })
    }

    pub fn zero() -> RatExpr {
        Self::constant(Rational::zero())
    }

    pub fn one() -> RatExpr {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> RatExpr {
        let vars: Vars = Arc::from(Vec::<String>::new());
        RatExpr {
            vars,
            num: Poly::constant(c, 0),
            den: Poly::one(0),
        }
    }

    pub fn int(n: i64) -> RatExpr {
        Self::constant(Rational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(p: i64, q: i64) -> RatExpr {
        Self::constant(Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn var(name: &str) -> RatExpr {
        let vars = vars_from(&[name]);
        RatExpr {
            vars,
            num: Poly::var(0, 1),
            den: Poly::one(1),
        }
    }

    /// Parse an expression over the given variables.
    pub fn parse<S: AsRef<str>>(text: &str, vars: &[S]) -> Result<RatExpr> {
        super::parse::parse(text, vars)
    }

    /// Lift a polynomial given over `vars`.
    pub(crate) fn from_poly(vars: Vars, p: Poly) -> RatExpr {
        let n = vars.len();
        RatExpr {
            vars,
            num: p,
            den: Poly::one(n),
        }
    }

    pub(crate) fn with_vars<S: AsRef<str>>(self, names: &[S]) -> RatExpr {
        let target = vars_from(names);
        let target = unify(&target, &self.vars);
        self.embed(&target)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Variables that actually occur.
    pub fn free_vars(&self) -> Vec<String> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(i, _)| self.num.uses_var(*i) || self.den.uses_var(*i))
            .map(|(_, v)| v.clone())
            .collect()
    }

    pub fn numerator(&self) -> RatExpr {
        RatExpr::from_poly(self.vars.clone(), self.num.clone())
    }

    pub fn denominator(&self) -> RatExpr {
        RatExpr::from_poly(self.vars.clone(), self.den.clone())
    }

    /// Total degrees of numerator and denominator.
    pub fn degrees(&self) -> (u32, u32) {
        (self.num.total_degree(), self.den.total_degree())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.den.is_constant() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// Embed into a superset variable list and restore the sign convention.
    fn embed(&self, target: &Vars) -> RatExpr {
        if Arc::ptr_eq(&self.vars, target) || self.vars[..] == target[..] {
            return RatExpr {
                vars: target.clone(),
                num: self.num.clone(),
                den: self.den.clone(),
            };
        }
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| target.iter().position(|t| t == v).expect("target is a superset"))
            .collect();
        let n = target.len();
        let mut num = self.num.remap(&map, n);
        let mut den = self.den.remap(&map, n);
        if den.leading_coeff().is_negative() {
            num = num.neg();
            den = den.neg();
        }
        RatExpr {
            vars: target.clone(),
            num,
            den,
        }
    }

    fn align(&self, other: &RatExpr) -> (RatExpr, RatExpr) {
        let vars = unify(&self.vars, &other.vars);
        (self.embed(&vars), other.embed(&vars))
    }

    pub fn try_div(&self, other: &RatExpr) -> Result<RatExpr> {
        if other.is_zero() {
            return Err(Error::DivisionByZero(None));
        }
        let (a, b) = self.align(other);
        RatExpr::from_parts(a.vars, a.num.mul(&b.den), a.den.mul(&b.num))
    }

    pub fn recip(&self) -> Result<RatExpr> {
        RatExpr::one().try_div(self)
    }

    pub fn pow(&self, e: u32) -> RatExpr {
        RatExpr {
            vars: self.vars.clone(),
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// Integer power; negative exponents fail on zero.
    pub fn powi(&self, e: i64) -> Result<RatExpr> {
        let p = self.pow(e.unsigned_abs() as u32);
        if e < 0 {
            p.recip()
        } else {
            Ok(p)
        }
    }

    pub fn scale(&self, c: &Rational) -> RatExpr {
        if c.is_zero() {
            return RatExpr::zero();
        }
        RatExpr {
            vars: self.vars.clone(),
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Partial derivative; fails when `var` is not among the declared
    /// variables.
    pub fn diff(&self, var: &str) -> Result<RatExpr> {
        if !self.vars.iter().any(|v| v == var) {
            return Err(Error::UnknownVariable(var.to_string()));
        }
        Ok(self.partial(var))
    }

    /// Partial derivative, zero when `var` does not occur.
    pub fn partial(&self, var: &str) -> RatExpr {
        let Some(i) = self.vars.iter().position(|v| v == var) else {
            return RatExpr::zero();
        };
        let dn = self.num.derivative(i);
        if self.den.is_constant() {
            return RatExpr::from_poly(self.vars.clone(), dn);
        }
        // with g = gcd(d, d'), (n/d)' = (n'·(d/g) - n·(d'/g)) / (d·(d/g)),
        // which is already reduced in every factor of d that involves var
        let dd = self.den.derivative(i);
        let g = self.den.gcd(&dd);
        let rad = self.den.exact_div(&g).expect("gcd divides");
        let dq = dd.exact_div(&g).expect("gcd divides");
        let num = dn.mul(&rad).sub(&self.num.mul(&dq));
        let den = self.den.mul(&rad);
        RatExpr::from_parts(self.vars.clone(), num, den).expect("nonzero denominator")
    }

    /// Exact value at a point given by name.
    pub fn eval_named(&self, assignment: &HashMap<String, Rational>) -> Result<Rational> {
        let mut point = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            match assignment.get(v) {
                Some(q) => point.push(q.clone()),
                None if !self.num.uses_var(i) && !self.den.uses_var(i) => point.push(Rational::zero()),
                None => return Err(Error::UnknownVariable(v.clone())),
            }
        }
        let d = self.den.eval(&point);
        if d.is_zero() {
            let shown: Vec<String> = self
                .vars
                .iter()
                .zip(&point)
                .map(|(v, q)| format!("{v}={q}"))
                .collect();
            return Err(Error::Pole(format!("({})", shown.join(", "))));
        }
        Ok(self.num.eval(&point) / d)
    }

    /// Exact value at `point`, whose entries follow the order of `names`.
    pub fn eval_at<S: AsRef<str>>(&self, names: &[S], point: &[Rational]) -> Result<Rational> {
        if names.len() != point.len() {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, chart has {}",
                point.len(),
                names.len()
            )));
        }
        let map: HashMap<String, Rational> = names
            .iter()
            .map(|n| n.as_ref().to_string())
            .zip(point.iter().cloned())
            .collect();
        self.eval_named(&map)
    }

    /// Simultaneous substitution of variables by rational functions.
    pub fn substitute(&self, map: &[(String, RatExpr)]) -> Result<RatExpr> {
        let subs: HashMap<&str, &RatExpr> = map.iter().map(|(k, v)| (k.as_str(), v)).collect();
        let active: Vec<usize> = (0..self.vars.len())
            .filter(|&i| self.num.uses_var(i) || self.den.uses_var(i))
            .collect();
        if active.iter().all(|&i| !subs.contains_key(self.vars[i].as_str())) {
            return Ok(self.clone());
        }
        // target variable list: untouched variables of self, then those of the values
        let mut target: Vars = Arc::from(Vec::<String>::new());
        let kept: Vec<String> = self
            .vars
            .iter()
            .filter(|v| !subs.contains_key(v.as_str()))
            .cloned()
            .collect();
        target = unify(&target, &vars_from(&kept));
        for &i in &active {
            if let Some(val) = subs.get(self.vars[i].as_str()) {
                target = unify(&target, &val.vars);
            }
        }
        let nt = target.len();
        let values: Vec<(Poly, Poly)> = (0..self.vars.len())
            .map(|i| match subs.get(self.vars[i].as_str()) {
                Some(_) if !active.contains(&i) => (Poly::one(nt), Poly::one(nt)),
                Some(val) => {
                    let e = val.embed(&target);
                    (e.num, e.den)
                }
                None => {
                    let j = target.iter().position(|t| *t == self.vars[i]).unwrap();
                    (Poly::var(j, nt), Poly::one(nt))
                }
            })
            .collect();
        let caps: Vec<u32> = (0..self.vars.len())
            .map(|i| self.num.degree_in(i).max(self.den.degree_in(i)))
            .collect();
        let mut num_pows: Vec<Vec<Poly>> = Vec::new();
        let mut den_pows: Vec<Vec<Poly>> = Vec::new();
        for (i, (p, q)) in values.iter().enumerate() {
            let mut np = vec![Poly::one(nt)];
            let mut dp = vec![Poly::one(nt)];
            for k in 1..=caps[i] as usize {
                np.push(np[k - 1].mul(p));
                dp.push(dp[k - 1].mul(q));
            }
            num_pows.push(np);
            den_pows.push(dp);
        }
        let apply = |poly: &Poly| -> Poly {
            let mut acc = Poly::zero(nt);
            for (m, c) in poly.terms() {
                let mut t = Poly::constant(c.clone(), nt);
                for (i, &e) in m.exponents().iter().enumerate() {
                    if caps[i] == 0 {
                        continue;
                    }
                    t = t.mul(&num_pows[i][e as usize]);
                    t = t.mul(&den_pows[i][(caps[i] - e) as usize]);
                }
                acc = acc.add(&t);
            }
            acc
        };
        let n = apply(&self.num);
        let d = apply(&self.den);
        RatExpr::from_parts(target, n, d)
    }

    /// Substitute rational constants for some variables.
    pub fn substitute_values(&self, map: &[(String, Rational)]) -> Result<RatExpr> {
        let m: Vec<(String, RatExpr)> = map
            .iter()
            .map(|(k, v)| (k.clone(), RatExpr::constant(v.clone())))
            .collect();
        self.substitute(&m)
    }

    /// Rename variables (a substitution by variables).
    pub fn rename(&self, map: &[(String, String)]) -> RatExpr {
        let m: Vec<(String, RatExpr)> = map.iter().map(|(k, v)| (k.clone(), RatExpr::var(v))).collect();
        self.substitute(&m).expect("renaming keeps denominators nonzero")
    }

    /// A polynomial with the pointwise sign of `self · other`, with common
    /// factors cancelled in pairs.
    pub fn sign_product(&self, other: &RatExpr) -> RatExpr {
        let (a, b) = self.align(other);
        let sa = a.num.mul(&a.den);
        let sb = b.num.mul(&b.den);
        let g = sa.gcd(&sb);
        let (pa, pb) = if g.is_zero() {
            (sa, sb)
        } else {
            (sa.exact_div(&g).expect("gcd divides"), sb.exact_div(&g).expect("gcd divides"))
        };
        let (s, p) = pa.mul(&pb).integer_primitive();
        let p = if s.is_negative() { p.neg() } else { p };
        RatExpr::from_poly(a.vars, p)
    }

    /// The leading coefficient of the numerator is negative.
    pub(crate) fn leading_negative(&self) -> bool {
        self.num.leading_coeff().is_negative()
    }

    fn fmt_poly(&self, p: &Poly, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if p.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in p.terms().rev().enumerate() {
            let constant = m.degree() == 0;
            let abs = c.abs();
            if k == 0 {
                if c.is_negative() {
                    if abs.is_one() && !constant {
                        write!(f, "-1*")?;
                    } else {
                        write!(f, "-")?;
                        write_coeff(f, &abs, constant)?;
                    }
                } else {
                    write_coeff(f, &abs, constant)?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
                write_coeff(f, &abs, constant)?;
            }
            write_monomial(f, m, &self.vars)?;
        }
        Ok(())
    }
}

fn write_coeff(f: &mut fmt::Formatter<'_>, abs: &Rational, constant: bool) -> fmt::Result {
    if constant {
        write!(f, "{abs}")
    } else if abs.is_one() {
        Ok(())
    } else {
        write!(f, "{abs}*")
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial, vars: &[String]) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        if e == 1 {
            write!(f, "{}", vars[i])?;
        } else {
            write!(f, "{}^{}", vars[i], e)?;
        }
    }
    Ok(())
}

impl fmt::Display for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            return self.fmt_poly(&self.num, f);
        }
        if self.num.num_terms() > 1 {
            write!(f, "(")?;
            self.fmt_poly(&self.num, f)?;
            write!(f, ")")?;
        } else {
            self.fmt_poly(&self.num, f)?;
        }
        write!(f, "/")?;
        let bare = self.den.num_terms() == 1 && {
            let (m, c) = self.den.leading().unwrap();
            c.is_one() && m.exponents().iter().filter(|&&e| e > 0).count() == 1
        };
        if bare {
            self.fmt_poly(&self.den, f)
        } else {
            write!(f, "(")?;
            self.fmt_poly(&self.den, f)?;
            write!(f, ")")
        }
    }
}

impl fmt::Debug for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatExpr({self})")
    }
}

impl PartialEq for RatExpr {
    fn eq(&self, other: &RatExpr) -> bool {
        if self.vars[..] == other.vars[..] {
            return self.num == other.num && self.den == other.den;
        }
        let (a, b) = self.align(other);
        a.num == b.num && a.den == b.den
    }
}

impl Eq for RatExpr {}

impl From<i64> for RatExpr {
    fn from(n: i64) -> Self {
        RatExpr::int(n)
    }
}

impl From<Rational> for RatExpr {
    fn from(q: Rational) -> Self {
        RatExpr::constant(q)
    }
}

impl Add for &RatExpr {
    type Output = RatExpr;
    fn add(self, rhs: &RatExpr) -> RatExpr {
        let (a, b) = self.align(rhs);
        if a.den.is_one_poly() && b.den.is_one_poly() {
            return RatExpr::from_poly(a.vars, a.num.add(&b.num));
        }
        if a.den == b.den {
            return RatExpr::from_parts(a.vars, a.num.add(&b.num), a.den).expect("nonzero");
        }
        let l = a.den.gcd(&b.den);
        let (da, db) = if l.is_constant() {
            (a.den.clone(), b.den.clone())
        } else {
            (a.den.exact_div(&l).expect("gcd divides"), b.den.exact_div(&l).expect("gcd divides"))
        };
        let num = a.num.mul(&db).add(&b.num.mul(&da));
        RatExpr::from_parts(a.vars, num, a.den.mul(&db)).expect("nonzero")
    }
}

impl Sub for &RatExpr {
    type Output = RatExpr;
    fn sub(self, rhs: &RatExpr) -> RatExpr {
        self + &(-rhs)
    }
}

impl Mul for &RatExpr {
    type Output = RatExpr;
    fn mul(self, rhs: &RatExpr) -> RatExpr {
        let (a, b) = self.align(rhs);
        if a.den.is_one_poly() && b.den.is_one_poly() {
            return RatExpr::from_poly(a.vars, a.num.mul(&b.num));
        }
        // both operands are reduced, so cross-cancelling leaves a reduced result
        let cancel = |n: &Poly, d: &Poly| -> (Poly, Poly) {
            let g = n.gcd(d);
            if g.is_constant() {
                (n.clone(), d.clone())
            } else {
                (n.exact_div(&g).expect("gcd divides"), d.exact_div(&g).expect("gcd divides"))
            }
        };
        let (an, bd) = cancel(&a.num, &b.den);
        let (bn, ad) = cancel(&b.num, &a.den);
        let num = an.mul(&bn);
        let den = ad.mul(&bd);
        if num.is_zero() {
            return RatExpr::zero();
        }
        let (s, den) = den.integer_primitive();
        RatExpr {
            vars: a.vars,
            num: num.scale(&s.recip()),
            den,
        }
    }
}

impl Neg for &RatExpr {
    type Output = RatExpr;
    fn neg(self) -> RatExpr {
        RatExpr {
            vars: self.vars.clone(),
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for RatExpr {
            type Output = RatExpr;
            fn $m(self, rhs: RatExpr) -> RatExpr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RatExpr> for RatExpr {
            type Output = RatExpr;
            fn $m(self, rhs: &RatExpr) -> RatExpr {
                (&self).$m(rhs)
            }
        }
        impl $tr<RatExpr> for &RatExpr {
            type Output = RatExpr;
            fn $m(self, rhs: RatExpr) -> RatExpr {
                self.$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for RatExpr {
    type Output = RatExpr;
    fn neg(self) -> RatExpr {
        -&self
    }
}

impl std::iter::Sum for RatExpr {
    fn sum<I: Iterator<Item = RatExpr>>(iter: I) -> RatExpr {
        iter.fold(RatExpr::zero(), |a, b| a + b)
    }
}

impl Poly {
    fn is_one_poly(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> RatExpr {
        RatExpr::parse(s, &["x", "y"]).unwrap()
    }

    #[test]
    fn commutativity_cancels() {
        let x = RatExpr::var("x");
        let y = RatExpr::var("y");
        assert!((&x * &y - &y * &x).is_zero());
    }

    #[test]
    fn gcd_cancellation_on_division() {
        let r = p("x^2-1").try_div(&p("x-1")).unwrap();
        assert_eq!(r, p("x+1"));
        assert!(r.is_polynomial());
    }

    #[test]
    fn sum_of_reciprocals() {
        let r = &p("1/x") + &p("1/y");
        assert_eq!(r, p("(x+y)/(x*y)"));
        assert_eq!(r.to_string(), "(x + y)/(x*y)");
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(p("x").try_div(&p("y-y")), Err(Error::DivisionByZero(None)));
    }

    #[test]
    fn equality_ignores_variable_order() {
        let a = RatExpr::parse("1/(x-y)", &["x", "y"]).unwrap();
        let b = RatExpr::parse("1/(x-y)", &["y", "x"]).unwrap();
        assert_eq!(a, b);
        let c = RatExpr::parse("x", &["x"]).unwrap();
        let d = RatExpr::parse("x + 0*y", &["x", "y"]).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn denominator_is_normalized() {
        let r = p("1/(2 - 4*x)");
        assert_eq!(r.to_string(), "-1/2/(2*x - 1)");
        assert_eq!(RatExpr::parse(&r.to_string(), &["x", "y"]).unwrap(), r);
    }

    #[test]
    fn derivatives() {
        assert_eq!(p("x^2*y").diff("x").unwrap(), p("2*x*y"));
        assert_eq!(
            RatExpr::parse("1/(1+x^2)", &["x"]).unwrap().diff("x").unwrap(),
            RatExpr::parse("-2*x/(1+x^2)^2", &["x"]).unwrap()
        );
        assert!(p("5").diff("y").unwrap().is_zero());
        assert_eq!(p("x").diff("z"), Err(Error::UnknownVariable("z".into())));
    }

    #[test]
    fn evaluation() {
        let q = |n: i64| Rational::from_integer(n.into());
        assert_eq!(p("x+y").eval_at(&["x", "y"], &[q(1), q(2)]).unwrap(), q(3));
        let inv = RatExpr::parse("1/x", &["x"]).unwrap();
        assert!(matches!(inv.eval_at(&["x"], &[q(0)]), Err(Error::Pole(_))));
        let removable = RatExpr::parse("(x^2-1)/(x-1)", &["x"]).unwrap();
        assert_eq!(removable.eval_at(&["x"], &[q(1)]).unwrap(), q(2));
    }

    #[test]
    fn substitution_composes() {
        let f = p("x^2 + 1/y");
        let g = f
            .substitute(&[("x".into(), p("y + 1")), ("y".into(), p("x/2"))])
            .unwrap();
        assert_eq!(g, p("(y+1)^2 + 2/x"));
    }
}
