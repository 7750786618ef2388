//! Resultants and composed products.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{IntPoly, RatMatrix, RatPoly};
use crate::{Error, Result};

/// Sylvester-matrix resultant of `p` and `q` taken with the formal degrees
/// `dp` and `dq` (a formal leading coefficient may be zero).
fn resultant_formal(p: &RatPoly, dp: usize, q: &RatPoly, dq: usize) -> BigRational {
    let n = dp + dq;
    if n == 0 {
        return BigRational::one();
    }
    let mut rows = vec![vec![BigRational::zero(); n]; n];
    for i in 0..dq {
        for k in 0..=dp {
            rows[i][i + k] = p.coeff(dp - k);
        }
    }
    for i in 0..dp {
        for k in 0..=dq {
            rows[dq + i][i + k] = q.coeff(dq - k);
        }
    }
    RatMatrix::new(rows).expect("square").det().expect("square")
}

/// Resultant `Res(p, q)` via the Sylvester matrix.
pub fn resultant(p: &RatPoly, q: &RatPoly) -> BigRational {
    match (p.degree(), q.degree()) {
        (Some(dp), Some(dq)) => resultant_formal(p, dp, q, dq),
        _ => BigRational::zero(),
    }
}

/// Interpolating polynomial through `(i, values[i])`, `i = 0..len`, by
/// Newton divided differences.
fn interpolate(values: &[BigRational]) -> RatPoly {
    let n = values.len();
    let mut dd = values.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / BigRational::from_integer(BigInt::from(level));
        }
    }
    let mut acc = RatPoly::zero();
    for i in (0..n).rev() {
        // acc = acc * (x - i) + dd[i]
        let shift = RatPoly::linear_root(BigRational::from_integer(i.into()));
        acc = &(&acc * &shift) + &RatPoly::constant(dd[i].clone());
    }
    acc
}

/// Composed product of monic rational polynomials:
/// `Res_y(p(y), y^m q(x/y))`, whose roots are all products `αβ` with
/// `p(α) = 0` and `q(β) = 0` (with multiplicity).
pub fn composed_product_rat(p: &RatPoly, q: &RatPoly) -> Result<RatPoly> {
    if !p.is_monic() || !q.is_monic() {
        return Err(Error::Precondition(format!("composed product needs monic inputs, got {p} and {q}")));
    }
    let n = p.degree().unwrap();
    let m = q.degree().unwrap();
    let total = n * m;
    let values: Vec<BigRational> = (0..=total)
        .map(|x0| {
            let x0 = BigRational::from_integer(x0.into());
            // y^m q(x0 / y) = sum_i q_i x0^i y^(m-i)
            let mut h = vec![BigRational::zero(); m + 1];
            let mut pw = BigRational::one();
            for i in 0..=m {
                h[m - i] = q.coeff(i) * &pw;
                pw *= &x0;
            }
            resultant_formal(p, n, &RatPoly::new(h), m)
        })
        .collect();
    Ok(interpolate(&values))
}

/// Composed product of monic integer polynomials; see
/// [`composed_product_rat`].
pub fn composed_product(p: &IntPoly, q: &IntPoly) -> Result<IntPoly> {
    p.require_monic("composed product input")?;
    q.require_monic("composed product input")?;
    composed_product_rat(&p.to_rat(), &q.to_rat())?
        .to_int_poly()
        .ok_or_else(|| Error::Internal("composed product of integer polynomials is not integral".into()))
}
