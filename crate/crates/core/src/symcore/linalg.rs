//! Small dense matrices over rational functions.

use super::RatExpr;

/// Determinant by Gaussian elimination over the field of rational functions.
pub fn det(matrix: &[Vec<RatExpr>]) -> RatExpr {
    let n = matrix.len();
    let mut m: Vec<Vec<RatExpr>> = matrix.to_vec();
    let mut acc = RatExpr::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return RatExpr::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            acc = -acc;
        }
        let p = m[col][col].clone();
        acc = &acc * &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].try_div(&p).expect("pivot is nonzero");
            for c in col..n {
                let v = &m[r][c] - &(&factor * &m[col][c]);
                m[r][c] = v;
            }
        }
    }
    acc
}

/// Jacobian matrix `∂ f_i / ∂ vars_j`.
pub fn jacobian<S: AsRef<str>>(f: &[RatExpr], vars: &[S]) -> Vec<Vec<RatExpr>> {
    f.iter()
        .map(|fi| vars.iter().map(|v| fi.partial(v.as_ref())).collect())
        .collect()
}

/// Matrix product; the inner dimensions must agree.
pub fn matmul(a: &[Vec<RatExpr>], b: &[Vec<RatExpr>]) -> Vec<Vec<RatExpr>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner, "inner dimensions differ");
            (0..cols)
                .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> RatExpr {
        RatExpr::parse(s, &["x", "y"]).unwrap()
    }

    #[test]
    fn determinant_matches_expansion() {
        let m = vec![vec![e("x"), e("y")], vec![e("1"), e("x")]];
        assert_eq!(det(&m), e("x^2 - y"));
        let m3 = vec![
            vec![e("0"), e("1"), e("0")],
            vec![e("1"), e("0"), e("0")],
            vec![e("0"), e("0"), e("y")],
        ];
        assert_eq!(det(&m3), e("-y"));
        assert!(det(&[]).is_one());
    }

    #[test]
    fn jacobian_of_polar_like_map() {
        let j = jacobian(&[e("x*y"), e("x + y")], &["x", "y"]);
        assert_eq!(det(&j), e("y - x"));
    }

    #[test]
    fn product_determinant() {
        let a = vec![vec![e("x"), e("1")], vec![e("y"), e("2")]];
        let b = vec![vec![e("1"), e("y")], vec![e("x"), e("0")]];
        assert_eq!(det(&matmul(&a, &b)), &det(&a) * &det(&b));
    }
}
