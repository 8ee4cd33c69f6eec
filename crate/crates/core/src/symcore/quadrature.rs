//! Midpoint-rule integration of a density over a box.
//!
//! Pole detection is by sampling only: the integrand's denominator is
//! evaluated at every grid node and cell midpoint, and a sign change between
//! neighbouring samples along an axis is also reported as a pole. Poles that
//! the grid never touches and that do not change sign go unnoticed.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{Chart, RatExpr, Rational};
use crate::error::{Error, Result};

/// Midpoint-rule approximation of `∫_box rho`, computed exactly in ℚ.
pub fn integrate_density(
    rho: &RatExpr,
    chart: &Chart,
    bounds: &[(Rational, Rational)],
    resolution: u32,
) -> Result<Rational> {
    let n = chart.dim();
    if bounds.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "box has {} intervals, chart has dimension {n}",
            bounds.len()
        )));
    }
    if resolution == 0 {
        return Err(Error::DimensionMismatch("resolution must be positive".into()));
    }
    for (lo, hi) in bounds {
        if lo > hi {
            return Err(Error::DimensionMismatch(format!("empty interval [{lo}, {hi}]")));
        }
    }
    let names = chart.names();
    let num = rho.numerator();
    let den = rho.denominator();
    let res = resolution as usize;
    // half-steps: index k in 0..=2*res is lo + k*(hi-lo)/(2*res)
    let half = |axis: usize, k: usize| -> Rational {
        let (lo, hi) = &bounds[axis];
        lo + (hi - lo) * Rational::new(BigInt::from(k), BigInt::from(2 * res))
    };

    if !den.is_one() {
        scan_denominator(&den, names, n, res, &half)?;
    }

    let mut total = Rational::zero();
    let mut idx = vec![0usize; n];
    loop {
        let point: Vec<Rational> = idx.iter().enumerate().map(|(a, &i)| half(a, 2 * i + 1)).collect();
        let d = den.eval_at(names, &point)?;
        total += num.eval_at(names, &point)? / d;
        if !advance(&mut idx, res) {
            break;
        }
    }
    let mut volume = Rational::new(BigInt::from(1), BigInt::from(res).pow(n as u32));
    for (lo, hi) in bounds {
        volume *= hi - lo;
    }
    Ok(total * volume)
}

fn advance(idx: &mut [usize], limit: usize) -> bool {
    for i in idx.iter_mut() {
        *i += 1;
        if *i < limit {
            return true;
        }
        *i = 0;
    }
    false
}

fn scan_denominator(
    den: &RatExpr,
    names: &[String],
    n: usize,
    res: usize,
    half: &dyn Fn(usize, usize) -> Rational,
) -> Result<()> {
    let steps = 2 * res + 1;
    let mut idx = vec![0usize; n];
    loop {
        let point: Vec<Rational> = idx.iter().enumerate().map(|(a, &i)| half(a, i)).collect();
        let d = den.eval_at(names, &point)?;
        let shown = || {
            let parts: Vec<String> = names.iter().zip(&point).map(|(v, q)| format!("{v}={q}")).collect();
            format!("({})", parts.join(", "))
        };
        if d.is_zero() {
            return Err(Error::Pole(shown()));
        }
        for axis in 0..n {
            if idx[axis] + 1 < steps {
                let mut next = point.clone();
                next[axis] = half(axis, idx[axis] + 1);
                let d2 = den.eval_at(names, &next)?;
                if d2.is_zero() || d.is_negative() != d2.is_negative() {
                    return Err(Error::Pole(format!("between {} and the next sample along {}", shown(), names[axis])));
                }
            }
        }
        if n == 0 || !advance(&mut idx, steps) {
            break;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn constant_density_measures_volume() {
        let chart = Chart::new(["x"]).unwrap();
        let one = RatExpr::one();
        for res in [1, 3, 17] {
            assert_eq!(integrate_density(&one, &chart, &[(q(0, 1), q(1, 1))], res).unwrap(), q(1, 1));
        }
    }

    #[test]
    fn linear_density_is_exact_under_midpoint() {
        let chart = Chart::new(["x"]).unwrap();
        let x = RatExpr::parse("x", &["x"]).unwrap();
        let v = integrate_density(&x, &chart, &[(q(0, 1), q(1, 1))], 1000).unwrap();
        assert!((v.to_f64().unwrap() - 0.5).abs() < 1e-3);
    }

    #[test]
    fn pole_on_grid_is_reported() {
        let chart = Chart::new(["x"]).unwrap();
        let inv = RatExpr::parse("1/x", &["x"]).unwrap();
        for res in [1, 2, 7, 10] {
            assert!(matches!(
                integrate_density(&inv, &chart, &[(q(-1, 1), q(1, 1))], res),
                Err(Error::Pole(_))
            ));
        }
    }

    #[test]
    fn sign_change_between_samples_is_reported() {
        let chart = Chart::new(["x"]).unwrap();
        let f = RatExpr::parse("1/(3*x - 1)", &["x"]).unwrap();
        assert!(matches!(
            integrate_density(&f, &chart, &[(q(0, 1), q(1, 1))], 1),
            Err(Error::Pole(_))
        ));
    }

    #[test]
    fn two_dimensional_box() {
        let chart = Chart::new(["x", "y"]).unwrap();
        let f = RatExpr::parse("x*y", &["x", "y"]).unwrap();
        let v = integrate_density(&f, &chart, &[(q(0, 1), q(2, 1)), (q(0, 1), q(1, 1))], 4).unwrap();
        assert_eq!(v, q(1, 1));
    }
}
