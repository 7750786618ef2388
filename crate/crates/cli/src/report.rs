//! Formatting helpers shared by the subcommands.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use sattile::expansion::Spectrum;
use sattile::numbers::{rational_to_string, AlgebraicNumber, FieldElem};
use sattile::Result;
use serde_json::{json, Value};

/// Exact field element: a decimal string for rationals, otherwise the
/// coefficient list (constant first).
pub fn elem(e: &FieldElem) -> Value {
    match e.as_rational() {
        Some(q) => Value::String(rational_to_string(q)),
        None => Value::Array(e.coeffs().iter().map(|c| Value::String(rational_to_string(c))).collect()),
    }
}

pub fn vector(v: &[FieldElem]) -> Value {
    Value::Array(v.iter().map(elem).collect())
}

pub fn fmt_vector(v: &[FieldElem]) -> String {
    let parts: Vec<String> = v.iter().map(|e| e.to_string()).collect();
    format!("({})", parts.join(", "))
}

pub fn fmt_f64s(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

pub fn fmt_spectrum(s: &Spectrum) -> String {
    let parts: Vec<String> = s
        .items()
        .iter()
        .map(|(a, m)| if *m == 1 { a.to_string() } else { format!("{a} x{m}") })
        .collect();
    format!("{{{}}}", parts.join("; "))
}

/// `q` rounded to `digits` decimals, downwards or upwards.
fn decimal(q: &BigRational, digits: usize, up: bool) -> String {
    let scale = BigInt::from(10).pow(digits as u32);
    let x = q * BigRational::from_integer(scale.clone());
    let n = if up { x.ceil().to_integer() } else { x.floor().to_integer() };
    let neg = n.is_negative();
    let (int, frac) = n.abs().div_rem(&scale);
    let frac = format!("{:0>width$}", frac.to_string(), width = digits);
    let sign = if neg && !(int.is_zero() && frac.chars().all(|c| c == '0')) { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// Certified rectangle around an algebraic number with half-width at most
/// `2^-bits`, printed as decimal bounds.
pub fn enclosure(a: &AlgebraicNumber, bits: u32) -> Result<Value> {
    let b = a.ball(bits)?;
    let digits = (bits as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
    let iv = |c: &BigRational| {
        json!([decimal(&(c - &b.radius), digits, false), decimal(&(c + &b.radius), digits, true)])
    };
    Ok(json!({ "re": iv(&b.center.re), "im": iv(&b.center.im) }))
}
