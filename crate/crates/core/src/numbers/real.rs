//! Algebraic numbers selected by isolating discs, and exact comparison of
//! real algebraic quantities.
//!
//! Two real quantities that are both roots of a known polynomial `R` are
//! compared by enclosing them in shrinking intervals. They are different as
//! soon as the intervals separate; they are equal when both intervals meet
//! exactly one and the same isolating disc of `squarefree(R)`. No epsilon
//! is ever involved.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{
    canonical_f64, composed_product_rat, factor_rational, isolate_roots, pow2_neg, refine_root, to_f64, CRational,
    ComplexBall, RatPoly, RootBox, MAX_PRECISION_BITS,
};
use crate::{Error, Result};

/// Radius of the canonical isolation that fixes root indices.
const CANONICAL_BITS: u32 = 64;

/// Closed real interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RealInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        RealInterval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        RealInterval { lo: x.clone(), hi: x }
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn excludes_zero(&self) -> bool {
        self.lo.is_positive() || self.hi.is_negative()
    }

    /// Interval of `|x|` for `x` in `self`.
    pub fn abs(&self) -> RealInterval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            RealInterval::new(-&self.hi, -&self.lo)
        } else {
            RealInterval::new(BigRational::zero(), self.hi.clone().max(-&self.lo))
        }
    }

    pub fn mul(&self, o: &RealInterval) -> RealInterval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RealInterval::new(lo, hi)
    }

    pub fn mid_f64(&self) -> f64 {
        to_f64(&((&self.lo + &self.hi) / BigRational::from_integer(2.into())))
    }
}

/// Compares two real numbers that are both roots of `poly`, given
/// enclosure functions that return intervals of width about `2^-bits`.
pub fn compare_real_roots<A, B>(poly: &RatPoly, mut a: A, mut b: B) -> Result<Ordering>
where
    A: FnMut(u32) -> Result<RealInterval>,
    B: FnMut(u32) -> Result<RealInterval>,
{
    let r = poly.squarefree_part();
    let mut bits = 32;
    loop {
        let ia = a(bits)?;
        let ib = b(bits)?;
        if ia.hi < ib.lo {
            return Ok(Ordering::Less);
        }
        if ib.hi < ia.lo {
            return Ok(Ordering::Greater);
        }
        let discs = isolate_roots(&r, &pow2_neg(bits))?;
        let meets = |iv: &RealInterval| -> Vec<usize> {
            discs
                .iter()
                .enumerate()
                .filter(|(_, d)| d.ball().may_meet_real(iv))
                .map(|(i, _)| i)
                .collect()
        };
        let (ma, mb) = (meets(&ia), meets(&ib));
        if ma.len() == 1 && ma == mb {
            return Ok(Ordering::Equal);
        }
        if bits >= MAX_PRECISION_BITS {
            return Err(Error::Precision(format!(
                "could not separate or identify two roots of {poly} within {MAX_PRECISION_BITS} bits"
            )));
        }
        bits *= 2;
    }
}

/// An algebraic number: a monic irreducible minimal polynomial over Q plus
/// the index of one of its roots in the canonical isolation of that
/// polynomial (real roots ascending, then complex by real and imaginary
/// part). Equality and hashing use `(min_poly, index)` only.
#[derive(Clone, Debug)]
pub struct AlgebraicNumber {
    min_poly: RatPoly,
    index: usize,
    conj_index: usize,
    root: RootBox,
}

impl PartialEq for AlgebraicNumber {
    fn eq(&self, o: &Self) -> bool {
        self.index == o.index && self.min_poly == o.min_poly
    }
}

impl Eq for AlgebraicNumber {}

impl Hash for AlgebraicNumber {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.min_poly.hash(h);
        self.index.hash(h);
    }
}

impl PartialOrd for AlgebraicNumber {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for AlgebraicNumber {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.min_poly.degree(), &self.min_poly, self.index).cmp(&(o.min_poly.degree(), &o.min_poly, o.index))
    }
}

fn canonical_roots(p: &RatPoly) -> Result<Vec<RootBox>> {
    isolate_roots(p, &pow2_neg(CANONICAL_BITS))
}

impl AlgebraicNumber {
    /// All roots of a monic irreducible polynomial, in canonical order.
    pub fn all_roots(min_poly: &RatPoly) -> Result<Vec<AlgebraicNumber>> {
        let f = factor_rational(min_poly)?;
        if f.len() != 1 || f[0].1 != 1 || f[0].0 != min_poly.monic() {
            return Err(Error::Domain(format!("{min_poly} is not irreducible over Q")));
        }
        let p = min_poly.monic();
        let roots = canonical_roots(&p)?;
        let conj_of = |i: usize| -> usize {
            let c = roots[i].center.conj();
            roots.iter().position(|r| r.center == c).unwrap_or(i)
        };
        Ok((0..roots.len())
            .map(|i| AlgebraicNumber {
                min_poly: p.clone(),
                index: i,
                conj_index: conj_of(i),
                root: roots[i].clone(),
            })
            .collect())
    }

    /// The root of `min_poly` nearest to `approx`; fails when the choice is
    /// not clear-cut (the runner-up is less than twice as far away).
    pub fn nearest(min_poly: &RatPoly, approx: (f64, f64)) -> Result<AlgebraicNumber> {
        let roots = Self::all_roots(min_poly)?;
        let dist = |a: &AlgebraicNumber| {
            let (re, im) = a.approx();
            (re - approx.0).hypot(im - approx.1)
        };
        let mut order: Vec<(f64, usize)> = roots.iter().map(|r| (dist(r), r.index)).collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        if order.len() > 1 && order[1].0 < 2.0 * order[0].0 {
            return Err(Error::Input(format!(
                "approximation ({}, {}) does not select a unique root of {min_poly}",
                approx.0, approx.1
            )));
        }
        Ok(roots[order[0].1].clone())
    }

    /// The root of `min_poly` inside `ball`, if exactly one canonical disc
    /// meets the ball. `None` means the ball is too coarse.
    pub fn locate(min_poly: &RatPoly, ball: &ComplexBall) -> Result<Option<AlgebraicNumber>> {
        let roots = Self::all_roots(min_poly)?;
        let hits: Vec<&AlgebraicNumber> = roots
            .iter()
            .filter(|r| {
                let s = &r.root.radius + &ball.radius;
                (&r.root.center - &ball.center).norm_sqr() <= &s * &s
            })
            .collect();
        Ok(if hits.len() == 1 { Some(hits[0].clone()) } else { None })
    }

    pub fn rational(q: BigRational) -> AlgebraicNumber {
        AlgebraicNumber {
            min_poly: RatPoly::linear_root(q.clone()),
            index: 0,
            conj_index: 0,
            root: RootBox { center: CRational::real(q), radius: BigRational::zero(), real: true },
        }
    }

    pub fn min_poly(&self) -> &RatPoly {
        &self.min_poly
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn root_box(&self) -> &RootBox {
        &self.root
    }

    pub fn degree(&self) -> usize {
        self.min_poly.degree().unwrap()
    }

    pub fn is_real(&self) -> bool {
        self.root.real
    }

    pub fn approx(&self) -> (f64, f64) {
        self.root.approx()
    }

    /// Minimal polynomial has integer coefficients.
    pub fn is_algebraic_integer(&self) -> bool {
        self.min_poly.to_int_poly().is_some()
    }

    /// Complex conjugate (itself when real).
    pub fn conj(&self) -> AlgebraicNumber {
        if self.conj_index == self.index {
            return self.clone();
        }
        AlgebraicNumber {
            min_poly: self.min_poly.clone(),
            index: self.conj_index,
            conj_index: self.index,
            root: self.root.conj(),
        }
    }

    /// Disc of radius at most `2^-bits` around the root.
    pub fn ball(&self, bits: u32) -> Result<ComplexBall> {
        Ok(refine_root(&self.min_poly, &self.root, &pow2_neg(bits))?.ball())
    }

    /// Enclosure of `|self|^2`.
    pub fn sq_modulus(&self, bits: u32) -> Result<RealInterval> {
        Ok(self.ball(bits + 4)?.norm_sqr())
    }

    /// Polynomial having `|self|^2` among its roots: the composed product of
    /// the minimal polynomial with itself.
    pub fn sq_modulus_poly(&self) -> Result<RatPoly> {
        composed_product_rat(&self.min_poly, &self.min_poly)
    }

    /// Exact comparison of `|self|` and `|other|`.
    pub fn cmp_modulus(&self, other: &AlgebraicNumber) -> Result<Ordering> {
        if self == other || self.conj() == *other {
            return Ok(Ordering::Equal);
        }
        let pa = self.sq_modulus_poly()?;
        let r = if self.min_poly == other.min_poly { pa } else { &pa * &other.sq_modulus_poly()? };
        compare_real_roots(&r, |b| self.sq_modulus(b), |b| other.sq_modulus(b))
    }

    /// Exact comparison of `|self|` with a non-negative rational `q`.
    pub fn cmp_modulus_rational(&self, q: &BigRational) -> Result<Ordering> {
        let q2 = q * q;
        let r = &self.sq_modulus_poly()? * &RatPoly::linear_root(q2.clone());
        compare_real_roots(&r, |b| self.sq_modulus(b), |_| Ok(RealInterval::point(q2.clone())))
    }

    /// `|self| > 1`, decided exactly.
    pub fn is_expanding(&self) -> Result<bool> {
        Ok(self.cmp_modulus_rational(&BigRational::one())? == Ordering::Greater)
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.approx();
        let re = canonical_f64(re);
        if self.is_real() {
            write!(f, "{re} (root of {})", self.min_poly)
        } else {
            let im = canonical_f64(im);
            let sign = if im < 0.0 { '-' } else { '+' };
            write!(f, "{re} {sign} {}i (root of {})", im.abs(), self.min_poly)
        }
    }
}

/// `{"min_poly": [...], "index": i, "approx": [re, im]}`.
impl Serialize for AlgebraicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (re, im) = self.approx();
        let mut st = s.serialize_struct("AlgebraicNumber", 3)?;
        st.serialize_field("min_poly", &self.min_poly)?;
        st.serialize_field("index", &self.index)?;
        st.serialize_field("approx", &[canonical_f64(re), canonical_f64(im)])?;
        st.end()
    }
}
