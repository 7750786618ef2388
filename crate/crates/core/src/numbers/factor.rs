//! Factorisation over Q.
//!
//! Squarefree decomposition is Yun's algorithm. Squarefree integer parts of
//! degree at most 3 are split by the rational root test; degrees 4 to
//! [`MAX_FACTOR_DEGREE`] use a factorisation modulo a prime larger than twice
//! the Mignotte bound followed by exhaustive recombination of the modular
//! factors. That prime is large enough that symmetric lifting recovers true
//! integer factors without Hensel lifting.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::modp::{is_prime_u64, Fp, PolyP};
use super::{IntPoly, RatPoly};
use crate::{Error, Result};

/// Largest degree of a squarefree component accepted by [`factor_rational`].
pub const MAX_FACTOR_DEGREE: usize = 8;

/// Largest absolute value whose divisors the rational root test enumerates.
const DIVISOR_LIMIT: u64 = 1 << 40;

/// Yun's squarefree decomposition: monic `(a_i, i)` with `p = lc * prod a_i^i`.
pub fn squarefree_decomposition(p: &RatPoly) -> Result<Vec<(RatPoly, usize)>> {
    if p.is_zero() {
        return Err(Error::Domain("cannot decompose the zero polynomial".into()));
    }
    let f = p.monic();
    let mut out = Vec::new();
    if f.degree() == Some(0) {
        return Ok(out);
    }
    let df = f.derivative();
    let mut a = f.gcd(&df);
    let mut b = f.exact_div(&a).expect("gcd divides");
    let mut c = df.exact_div(&a).expect("gcd divides");
    let mut i = 1;
    loop {
        let d = &c - &b.derivative();
        if b.degree() == Some(0) {
            break;
        }
        a = b.gcd(&d);
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), i));
        }
        b = b.exact_div(&a).expect("gcd divides");
        c = d.exact_div(&a).expect("gcd divides");
        i += 1;
    }
    Ok(out)
}

/// Factors `p` into monic irreducible polynomials over Q with multiplicities.
///
/// The output is sorted by degree, then coefficients, and the product of
/// `factor^multiplicity` equals `p.monic()` exactly.
pub fn factor_rational(p: &RatPoly) -> Result<Vec<(RatPoly, usize)>> {
    if p.is_zero() {
        return Err(Error::Domain("cannot factor the zero polynomial".into()));
    }
    let mut out = Vec::new();
    for (part, mult) in squarefree_decomposition(p)? {
        let deg = part.degree().unwrap();
        if deg > MAX_FACTOR_DEGREE {
            return Err(Error::Precondition(format!(
                "squarefree component of degree {deg} exceeds the supported degree {MAX_FACTOR_DEGREE}: {part}"
            )));
        }
        for f in factor_squarefree_int(&part.primitive_int())? {
            out.push((f.to_rat().monic(), mult));
        }
    }
    out.sort_by(|(a, _), (b, _)| a.degree().cmp(&b.degree()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// Irreducible factors (primitive, positive leading coefficient) of a
/// squarefree primitive integer polynomial.
pub(crate) fn factor_squarefree_int(f: &IntPoly) -> Result<Vec<IntPoly>> {
    let deg = f.degree().ok_or_else(|| Error::Domain("zero polynomial".into()))?;
    if deg <= 1 {
        return Ok(vec![f.primitive_part()]);
    }
    let mut out = Vec::new();
    let mut rest = f.primitive_part();
    if deg <= 3 && small_ends(&rest) {
        while rest.degree().unwrap() > 1 {
            match rational_root(&rest) {
                Some(r) => {
                    let lin = RatPoly::linear_root(r).primitive_int();
                    let q = rest.to_rat().exact_div(&lin.to_rat()).expect("root gives a factor");
                    out.push(lin);
                    rest = q.primitive_int();
                }
                None => break,
            }
        }
        out.push(rest);
    } else {
        out = zassenhaus(&rest)?;
    }
    out.sort();
    Ok(out)
}

fn small_ends(f: &IntPoly) -> bool {
    let c0 = f.coeffs()[0].abs();
    let lc = f.leading().unwrap().abs();
    c0 <= BigInt::from(DIVISOR_LIMIT) && lc <= BigInt::from(DIVISOR_LIMIT)
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs().to_u64().expect("bounded by DIVISOR_LIMIT");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(BigInt::from(d));
            if d * d != n {
                large.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Rational root test: some root `u/v` with `u | a_0`, `v | a_n`, if any.
fn rational_root(f: &IntPoly) -> Option<BigRational> {
    let c0 = &f.coeffs()[0];
    if c0.is_zero() {
        return Some(BigRational::zero());
    }
    let p = f.to_rat();
    for u in divisors(c0) {
        for v in divisors(f.leading().unwrap()) {
            for cand in [BigRational::new(u.clone(), v.clone()), BigRational::new(-u.clone(), v.clone())] {
                if p.eval(&cand).is_zero() {
                    return Some(cand);
                }
            }
        }
    }
    None
}

fn mod_p(f: &IntPoly, p: u64) -> PolyP {
    let pb = BigInt::from(p);
    let mut v: PolyP = f
        .coeffs()
        .iter()
        .map(|c| c.mod_floor(&pb).to_u64().unwrap())
        .collect();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Zassenhaus factorisation with a single large prime.
fn zassenhaus(f: &IntPoly) -> Result<Vec<IntPoly>> {
    let n = f.degree().unwrap();
    let lc = f.leading().unwrap().clone();
    // Mignotte: every coefficient of a factor of f is at most 2^n ||f||_2;
    // the lifted candidate is scaled by lc as well.
    let norm2: BigInt = f.coeffs().iter().map(|c| c * c).sum();
    let norm = norm2.sqrt() + 1;
    let bound: BigInt = (norm << n) * lc.abs();
    let need = (bound * BigInt::from(2) + BigInt::from(1)).to_u64().filter(|&b| b < (1u64 << 62)).ok_or_else(|| {
        Error::Precondition(format!("coefficients of {f} are too large for the modular factoriser"))
    })?;

    let mut p = need.max(1 << 20) | 1;
    let fp = loop {
        if is_prime_u64(p) {
            let fp = Fp(p);
            let red = mod_p(f, p);
            if red.len() == n + 1 && fp.gcd(&red, &fp.derivative(&red)).len() == 1 {
                break fp;
            }
        }
        p += 2;
    };

    let mut modular = fp.factor_squarefree(&mod_p(f, fp.0));
    let mut rest = f.clone();
    let mut out = Vec::new();
    let mut s = 1;
    while 2 * s <= modular.len() {
        let mut found = false;
        for subset in combinations(modular.len(), s) {
            let rest_lc = rest.leading().unwrap().clone();
            let mut prod: PolyP = vec![mod_p(&IntPoly::new(vec![rest_lc.clone()]), fp.0)[0]];
            for &i in &subset {
                prod = fp.mul_poly(&prod, &modular[i]);
            }
            let cand = symmetric_lift(&prod, fp.0).primitive_part();
            if let Some(q) = rest.to_rat().exact_div(&cand.to_rat()) {
                if let Some(qi) = q.to_int_poly() {
                    out.push(cand);
                    rest = qi.primitive_part();
                    modular = modular
                        .into_iter()
                        .enumerate()
                        .filter(|(i, _)| !subset.contains(i))
                        .map(|(_, g)| g)
                        .collect();
                    found = true;
                    break;
                }
            }
        }
        if !found {
            s += 1;
        }
    }
    if rest.degree().unwrap_or(0) > 0 {
        out.push(rest);
    }
    Ok(out)
}

fn symmetric_lift(a: &PolyP, p: u64) -> IntPoly {
    let half = p / 2;
    IntPoly::new(
        a.iter()
            .map(|&c| {
                if c > half {
                    -BigInt::from(p - c)
                } else {
                    BigInt::from(c)
                }
            })
            .collect(),
    )
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> RatPoly {
        RatPoly::from_i64(c)
    }

    fn reassemble(fs: &[(RatPoly, usize)]) -> RatPoly {
        fs.iter().fold(RatPoly::one(), |acc, (f, m)| &acc * &f.pow(*m as u32))
    }

    #[test]
    fn x2_minus_2_is_irreducible() {
        assert_eq!(factor_rational(&p(&[-2, 0, 1])).unwrap(), vec![(p(&[-2, 0, 1]), 1)]);
    }

    #[test]
    fn golden_square() {
        let g = p(&[-1, -1, 1]);
        assert_eq!(factor_rational(&(&g * &g)).unwrap(), vec![(g, 2)]);
    }

    #[test]
    fn subdivision_char_poly_irreducible() {
        // no rational roots among +-1, +-3, +-9
        let f = p(&[9, -3, -4, 1]);
        assert_eq!(factor_rational(&f).unwrap(), vec![(f, 1)]);
    }

    #[test]
    fn rejects_zero() {
        assert!(matches!(factor_rational(&RatPoly::zero()), Err(Error::Domain(_))));
    }

    #[test]
    fn splits_with_rational_roots_and_leading_coefficient() {
        // (2x - 1)(x + 3)(x^2 + 1)
        let f = &(&p(&[-1, 2]) * &p(&[3, 1])) * &p(&[1, 0, 1]);
        let fs = factor_rational(&f).unwrap();
        assert_eq!(fs.len(), 3);
        assert_eq!(reassemble(&fs), f.monic());
        assert!(fs.iter().any(|(g, _)| *g == RatPoly::new(vec![BigRational::new((-1).into(), 2.into()), BigRational::from_integer(1.into())])));
    }

    #[test]
    fn degree_four_products_of_quadratics() {
        // (x^2 - 2)(x^2 - 3) has no rational roots but is reducible
        let f = &p(&[-2, 0, 1]) * &p(&[-3, 0, 1]);
        let fs = factor_rational(&f).unwrap();
        assert_eq!(fs, vec![(p(&[-3, 0, 1]), 1), (p(&[-2, 0, 1]), 1)]);
        // x^4 + 1 is irreducible over Q but splits modulo every prime
        let g = p(&[1, 0, 0, 0, 1]);
        assert_eq!(factor_rational(&g).unwrap(), vec![(g, 1)]);
    }

    #[test]
    fn degree_eight_mixed() {
        // (x^3 + x + 1)(x^3 - x^2 - 1)(x^2 - x - 1)
        let f = &(&p(&[1, 1, 0, 1]) * &p(&[-1, 0, -1, 1])) * &p(&[-1, -1, 1]);
        let fs = factor_rational(&f).unwrap();
        assert_eq!(fs.len(), 3);
        assert_eq!(reassemble(&fs), f);
    }

    #[test]
    fn degree_above_cap_is_rejected() {
        let f = p(&[1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1]);
        assert!(matches!(factor_rational(&f), Err(Error::Precondition(_))));
    }

    #[test]
    fn yun_multiplicities() {
        // (x-1)^3 (x+2)
        let f = &p(&[-1, 1]).pow(3) * &p(&[2, 1]);
        let d = squarefree_decomposition(&f).unwrap();
        assert_eq!(d, vec![(p(&[2, 1]), 1), (p(&[-1, 1]), 3)]);
    }
}
