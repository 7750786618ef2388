//! Exact number backbone: polynomials, factorisation, certified roots and
//! number-field arithmetic.

mod ball;
mod factor;
mod field;
mod matrix;
mod modp;
mod poly;
mod real;
mod resultant;
mod roots;

pub use ball::{CRational, ComplexBall};
pub use factor::{factor_rational, squarefree_decomposition, MAX_FACTOR_DEGREE};
pub use field::{embed, field_arith, FieldElem, FieldMatrix, FieldOp, NumberField, NumberFieldSpec};
pub use matrix::{char_poly, IntMatrix, RatMatrix};
pub use poly::{IntPoly, RatPoly};
pub use real::{compare_real_roots, AlgebraicNumber, RealInterval};
pub use resultant::{composed_product, composed_product_rat, resultant};
pub use roots::{isolate_roots, refine_root, RootBox, MAX_PRECISION_BITS};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Parses `"a"`, `"a/b"` or a plain decimal such as `"-1.25"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Input(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int_part: BigInt = match int.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            digits => digits.parse().map_err(|_| bad())?,
        };
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = BigRational::new(int_part * &scale + frac_part, scale);
        return Ok(if neg { -mag } else { mag });
    }
    s.parse::<BigInt>().map(BigRational::from_integer).map_err(|_| bad())
}

/// Canonical decimal-string form: `"n"` or `"n/d"`.
pub fn rational_to_string(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `2^-bits` as a rational.
pub fn pow2_neg(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << bits)
}

/// Rounds to the nearest multiple of `2^-bits`.
pub fn round_dyadic(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits;
    let scaled = x * BigRational::from_integer(scale.clone());
    BigRational::new(scaled.round().to_integer(), scale)
}

/// Upper bound for `sqrt(q)` (`q >= 0`) with absolute error below `2^-bits`.
pub fn sqrt_upper(q: &BigRational, bits: u32) -> BigRational {
    debug_assert!(!q.is_negative());
    let scale = BigInt::one() << (2 * bits);
    let y = (q * BigRational::from_integer(scale)).floor().to_integer();
    let s = y.sqrt() + BigInt::one();
    BigRational::new(s, BigInt::one() << bits)
}

/// Lower bound for `sqrt(q)` (`q >= 0`).
pub fn sqrt_lower(q: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << (2 * bits);
    let y = (q * BigRational::from_integer(scale)).floor().to_integer();
    BigRational::new(y.sqrt(), BigInt::one() << bits)
}

/// Nearest `f64`; saturates instead of failing on huge values.
pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact rational from a finite `f64`.
pub fn from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Input(format!("non-finite number {x}")))
}

/// Rounds a float to 12 significant digits so that JSON output is stable
/// and readable.
pub fn canonical_f64(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}
