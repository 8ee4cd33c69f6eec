//! Sparse multivariate polynomials over the rationals.
//!
//! A [`Poly`] does not know the names of its variables; it is a map from
//! exponent vectors of a fixed length to nonzero coefficients. Terms are kept
//! in graded lexicographic order, so the leading term is the last entry of
//! the map. Variable names and the rational-function layer live in
//! [`super::RatExpr`].

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;

/// Exponent vector ordered graded-lexicographically: total degree first, then
/// lexicographic with the first variable most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub(crate) Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(i: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(Rational::one(), nvars)
    }

    pub fn constant(c: Rational, nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn var(i: usize, nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.terms.insert(Monomial::var(i, nvars), Rational::one());
        p
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().degree() == 0)
    }

    /// The constant value if the polynomial has no variable part.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            Some(Rational::zero())
        } else if self.is_constant() {
            Some(self.terms.values().next().unwrap().clone())
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        if s.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    fn mul_term(&self, m: &Monomial, c: &Rational) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(mm, cc)| (mm.mul(m), cc * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e > 0 {
                let mut m2 = m.clone();
                m2.0[i] -= 1;
                out.add_term(m2, c * Rational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        debug_assert_eq!(point.len(), self.nvars);
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Re-index variables: variable `i` of `self` becomes variable `map[i]`
    /// of a polynomial in `nvars` variables.
    pub fn remap(&self, map: &[usize], nvars: usize) -> Poly {
        let mut out = Poly::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0; nvars];
            for (i, &k) in m.0.iter().enumerate() {
                e[map[i]] += k;
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.0[i] > 0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0)
    }

    /// Coefficient of `x_i^d`, as a polynomial not involving `x_i`.
    pub fn coeff_in(&self, i: usize, d: u32) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.0[i] == d {
                let mut m2 = m.clone();
                m2.0[i] = 0;
                out.add_term(m2, c.clone());
            }
        }
        out
    }

    fn coeffs_in(&self, i: usize) -> Vec<Poly> {
        let mut by_deg: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let d = m.0[i];
            let mut m2 = m.clone();
            m2.0[i] = 0;
            by_deg
                .entry(d)
                .or_insert_with(|| Poly::zero(self.nvars))
                .add_term(m2, c.clone());
        }
        by_deg.into_values().collect()
    }

    fn min_var(&self) -> Option<usize> {
        (0..self.nvars).find(|&i| self.uses_var(i))
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        let (lm_d, lc_d) = d.leading()?;
        if d.is_constant() {
            return Some(self.scale(&lc_d.recip()));
        }
        let (lm_d, lc_d) = (lm_d.clone(), lc_d.clone());
        let mut r = self.clone();
        let mut q = Poly::zero(self.nvars);
        while let Some((lm_r, lc_r)) = r.leading() {
            if !lm_d.divides(lm_r) {
                return None;
            }
            let m = lm_r.div(&lm_d);
            let c = lc_r / &lc_d;
            r = r.sub(&d.mul_term(&m, &c));
            q.add_term(m, c);
        }
        Some(q)
    }

    /// `(s, p)` with `self = s * p`, where `p` has coprime integer
    /// coefficients and a positive leading coefficient.
    pub fn integer_primitive(&self) -> (Rational, Poly) {
        if self.is_zero() {
            return (Rational::one(), self.clone());
        }
        let mut lcm = BigInt::one();
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            lcm = lcm.lcm(c.denom());
            g = g.gcd(c.numer());
        }
        let mut s = Rational::new(g, lcm);
        if self.leading_coeff().is_negative() {
            s = -s;
        }
        let p = self.scale(&s.recip());
        (s, p)
    }

    fn normalized(&self) -> Poly {
        self.integer_primitive().1
    }

    /// Greatest common divisor, normalized to coprime integer coefficients
    /// with positive leading coefficient. `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        gcd_rec(self, other)
    }

    /// Content with respect to variable `i`: the gcd of the coefficients of
    /// `self` viewed as a univariate polynomial in `x_i`.
    fn content_in(&self, i: usize) -> Poly {
        let mut g = Poly::zero(self.nvars);
        for c in self.coeffs_in(i) {
            g = gcd_rec(&g, &c);
            if g.is_constant() && !g.is_zero() {
                break;
            }
        }
        g
    }

    fn primitive_in(&self, i: usize) -> Poly {
        let c = self.content_in(i);
        self.exact_div(&c)
            .expect("content divides polynomial")
            .normalized()
    }
}

/// Pseudo-remainder `lc(q)^(deg p - deg q + 1) · p mod q` in variable `i`.
fn pseudo_rem(p: &Poly, q: &Poly, i: usize) -> Poly {
    let dp = p.degree_in(i);
    let dq = q.degree_in(i);
    let lq = q.coeff_in(i, dq);
    let mut r = p.clone();
    let mut steps = dp + 1 - dq;
    while !r.is_zero() && r.degree_in(i) >= dq {
        let dr = r.degree_in(i);
        let lr = r.coeff_in(i, dr);
        let mut shift = Monomial::one(r.nvars);
        shift.0[i] = dr - dq;
        let shifted = q.mul(&lr).mul_term(&shift, &Rational::one());
        r = r.mul(&lq).sub(&shifted);
        steps -= 1;
    }
    // callers keep dq > 0, so the loop ran at most dp - dq + 1 times
    r.mul(&lq.pow(steps))
}

impl Poly {
    /// Substitute constants for some variables, keeping the variable count.
    fn specialize(&self, values: &[(usize, Rational)]) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            let mut c2 = c.clone();
            for (i, v) in values {
                let e = m2.0[*i];
                if e > 0 {
                    c2 *= num_traits::pow(v.clone(), e as usize);
                    m2.0[*i] = 0;
                }
            }
            out.add_term(m2, c2);
        }
        out
    }
}

/// Degree in `v` of the gcd of `a` and `b` specialized at a point where
/// neither leading coefficient vanishes; an upper bound for the degree in `v`
/// of the true gcd.
fn specialized_degree_bound(a: &Poly, b: &Poly, v: usize) -> Option<u32> {
    let others: Vec<usize> = (0..a.nvars).filter(|&i| i != v && (a.uses_var(i) || b.uses_var(i))).collect();
    let la = a.coeff_in(v, a.degree_in(v));
    let lb = b.coeff_in(v, b.degree_in(v));
    for attempt in 0..8i64 {
        let point: Vec<(usize, Rational)> = others
            .iter()
            .enumerate()
            .map(|(k, &i)| (i, Rational::from_integer(BigInt::from(2 + 3 * k as i64 + 7 * attempt))))
            .collect();
        if la.specialize(&point).is_zero() || lb.specialize(&point).is_zero() {
            continue;
        }
        let g = gcd_rec(&a.specialize(&point), &b.specialize(&point));
        return Some(g.degree_in(v));
    }
    None
}

fn gcd_rec(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.normalized();
    }
    if b.is_zero() {
        return a.normalized();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(a.nvars);
    }
    let v = match (a.min_var(), b.min_var()) {
        (Some(x), Some(y)) => x.min(y),
        _ => unreachable!("nonconstant polynomials use a variable"),
    };
    if !a.uses_var(v) {
        return gcd_rec(a, &b.content_in(v));
    }
    if !b.uses_var(v) {
        return gcd_rec(&a.content_in(v), b);
    }
    let ca = a.content_in(v);
    let cb = b.content_in(v);
    let g = gcd_rec(&ca, &cb);
    let mut p = a.exact_div(&ca).expect("content divides").normalized();
    let mut q = b.exact_div(&cb).expect("content divides").normalized();
    let multivariate = (0..a.nvars).any(|i| i != v && (p.uses_var(i) || q.uses_var(i)));
    if multivariate && specialized_degree_bound(&p, &q, v) == Some(0) {
        // the primitive parts share no factor involving v, and being
        // primitive they share none without it
        return g;
    }
    if p.degree_in(v) < q.degree_in(v) {
        std::mem::swap(&mut p, &mut q);
    }
    // subresultant remainder sequence
    let mut sg = Poly::one(a.nvars);
    let mut sh = Poly::one(a.nvars);
    let h = loop {
        let delta = p.degree_in(v) - q.degree_in(v);
        let r = pseudo_rem(&p, &q, v);
        if r.is_zero() {
            break q.primitive_in(v);
        }
        if !r.uses_var(v) {
            break Poly::one(a.nvars);
        }
        let divisor = sg.mul(&sh.pow(delta));
        p = q;
        q = r.exact_div(&divisor).expect("subresultant division is exact");
        sg = p.coeff_in(v, p.degree_in(v));
        sh = if delta == 0 {
            sh
        } else {
            sg.pow(delta)
                .exact_div(&sh.pow(delta - 1))
                .expect("subresultant division is exact")
        };
    };
    g.mul(&h).normalized()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(BigInt::from(n))
    }

    fn x(nv: usize) -> Poly {
        Poly::var(0, nv)
    }
    fn y(nv: usize) -> Poly {
        Poly::var(1, nv)
    }

    #[test]
    fn grlex_orders_by_degree_then_lex() {
        let a = Monomial(vec![2, 0]);
        let b = Monomial(vec![1, 1]);
        let c = Monomial(vec![0, 3]);
        assert!(a > b);
        assert!(c > a);
    }

    #[test]
    fn gcd_univariate() {
        let nv = 1;
        let p = x(nv).pow(2).sub(&Poly::one(nv));
        let d = x(nv).sub(&Poly::one(nv));
        let g = p.gcd(&d);
        assert_eq!(g, d);
        assert_eq!(p.exact_div(&d).unwrap(), x(nv).add(&Poly::one(nv)));
    }

    #[test]
    fn gcd_bivariate_common_factor() {
        let nv = 2;
        let f = x(nv).add(&y(nv)).add(&Poly::one(nv));
        let a = f.mul(&x(nv).sub(&y(nv)));
        let b = f.mul(&x(nv).mul(&y(nv)).add(&Poly::constant(q(3), nv)));
        assert_eq!(a.gcd(&b), f);
    }

    #[test]
    fn gcd_coprime_is_one() {
        let nv = 2;
        let a = x(nv).pow(2).add(&y(nv));
        let b = y(nv).pow(2).add(&x(nv));
        assert_eq!(a.gcd(&b), Poly::one(nv));
    }

    #[test]
    fn gcd_strips_rational_content() {
        let nv = 2;
        let f = x(nv).mul(&y(nv)).add(&Poly::one(nv));
        let a = f.scale(&Rational::new(BigInt::from(3), BigInt::from(2)));
        let b = f.mul(&x(nv)).scale(&q(-4));
        assert_eq!(a.gcd(&b), f);
    }

    #[test]
    fn exact_div_rejects_non_multiples() {
        let nv = 2;
        assert!(x(nv).exact_div(&y(nv)).is_none());
        assert!(x(nv).add(&Poly::one(nv)).exact_div(&x(nv)).is_none());
    }

    #[test]
    fn derivative_power_rule() {
        let nv = 2;
        let p = x(nv).pow(3).mul(&y(nv));
        assert_eq!(p.derivative(0), x(nv).pow(2).mul(&y(nv)).scale(&q(3)));
        assert_eq!(p.derivative(1), x(nv).pow(3));
    }
}
