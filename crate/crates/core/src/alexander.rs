//! Exact one-variable Alexander polynomial `det(A - tAᵀ)` of an integer
//! Seifert matrix.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::seifert::IntMatrix;

/// Integer polynomial, coefficients in ascending degree, no trailing zeros.
pub type IntPoly = Vec<BigInt>;

/// Determinant of a square integer matrix by fraction-free Bareiss elimination.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// `det(A - tAᵀ)` exactly, by evaluating at `t = 0..=dim` and interpolating.
pub fn alexander_polynomial(a: &IntMatrix) -> IntPoly {
    let n = a.nrows();
    let values: Vec<BigInt> = (0..=n as i64)
        .map(|t| {
            let rows = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            BigInt::from(a[(i, j)]) - BigInt::from(t) * BigInt::from(a[(j, i)])
                        })
                        .collect()
                })
                .collect();
            bareiss_det(rows)
        })
        .collect();
    interpolate(&values)
}

/// Coefficients of the unique polynomial of degree `< values.len()` taking
/// `values[k]` at `t = k`.
fn interpolate(values: &[BigInt]) -> IntPoly {
    let n = values.len();
    // Newton divided differences on nodes 0, 1, ..., n-1
    let mut dd: Vec<BigRational> = values
        .iter()
        .cloned()
        .map(BigRational::from_integer)
        .collect();
    for level in 1..n {
        for k in (level..n).rev() {
            dd[k] = (&dd[k] - &dd[k - 1]) / BigRational::from_integer(BigInt::from(level));
        }
    }
    // Horner in Newton form: p(t) = dd0 + (t-0)(dd1 + (t-1)(dd2 + ...))
    let mut poly: Vec<BigRational> = vec![BigRational::zero(); n.max(1)];
    for k in (0..n).rev() {
        // poly = poly * (t - k) + dd[k]
        let mut next = vec![BigRational::zero(); n.max(1)];
        for (d, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if d + 1 < next.len() {
                next[d + 1] += c;
            }
            next[d] -= c * BigRational::from_integer(BigInt::from(k));
        }
        next[0] += &dd[k];
        poly = next;
    }
    let mut out: IntPoly = poly
        .into_iter()
        .map(|c| {
            assert!(
                c.is_integer(),
                "determinant polynomial has integer coefficients"
            );
            c.to_integer()
        })
        .collect();
    trim(&mut out);
    out
}

fn trim(p: &mut IntPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// Divides out the largest power of `t` and fixes the sign so the constant
/// term is positive; two polynomials agree up to `±t^k` iff their
/// normalizations are equal.
pub fn normalize_unit(p: &[BigInt]) -> IntPoly {
    let mut out: IntPoly = p.iter().skip_while(|c| c.is_zero()).cloned().collect();
    trim(&mut out);
    if out.first().is_some_and(|c| c.is_negative()) {
        out.iter_mut().for_each(|c| *c = -&*c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> IntPoly {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn trefoil_polynomial() {
        // det([[-1+t, 1], [-t, -1+t]]) = t^2 - t + 1
        let a = IntMatrix::from_row_slice(2, 2, &[-1, 1, 0, -1]);
        assert_eq!(alexander_polynomial(&a), ints(&[1, -1, 1]));
    }

    #[test]
    fn hopf_polynomial() {
        let a = IntMatrix::from_row_slice(1, 1, &[-1]);
        assert_eq!(alexander_polynomial(&a), ints(&[-1, 1]));
    }

    #[test]
    fn empty_matrix_is_one() {
        assert_eq!(alexander_polynomial(&IntMatrix::zeros(0, 0)), ints(&[1]));
    }

    #[test]
    fn bareiss_matches_small_dets() {
        let m = vec![ints(&[2, 0, 1]), ints(&[1, 3, 2]), ints(&[1, 1, 2])];
        assert_eq!(bareiss_det(m), BigInt::from(6));
        let m = vec![ints(&[0, 1]), ints(&[1, 0])];
        assert_eq!(bareiss_det(m), BigInt::from(-1));
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_unit(&ints(&[0, 0, -1, 1, -1])), ints(&[1, -1, 1]));
        assert_eq!(normalize_unit(&ints(&[])), ints(&[]));
    }
}
