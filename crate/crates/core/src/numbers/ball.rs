//! Exact complex rationals and complex balls (disc enclosures).

use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{round_dyadic, sqrt_upper, to_f64, RealInterval};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        CRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        CRational { re, im: BigRational::zero() }
    }

    pub fn zero() -> Self {
        Self::real(BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        CRational { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        CRational { re: &self.re * s, im: &self.im * s }
    }

    /// `None` on division by zero.
    pub fn checked_div(&self, d: &CRational) -> Option<CRational> {
        let n = d.norm_sqr();
        if n.is_zero() {
            return None;
        }
        let num = self * &d.conj();
        Some(CRational { re: num.re / &n, im: num.im / n })
    }

    pub fn round(&self, bits: u32) -> Self {
        CRational { re: round_dyadic(&self.re, bits), im: round_dyadic(&self.im, bits) }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.re), to_f64(&self.im))
    }

    /// Upper bound for the modulus.
    pub fn abs_upper(&self, bits: u32) -> BigRational {
        sqrt_upper(&self.norm_sqr(), bits)
    }
}

impl<'a> Add<&'a CRational> for &'a CRational {
    type Output = CRational;
    fn add(self, rhs: &CRational) -> CRational {
        CRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl<'a> Sub<&'a CRational> for &'a CRational {
    type Output = CRational;
    fn sub(self, rhs: &CRational) -> CRational {
        CRational { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl<'a> Mul<&'a CRational> for &'a CRational {
    type Output = CRational;
    fn mul(self, rhs: &CRational) -> CRational {
        CRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &CRational {
    type Output = CRational;
    fn neg(self) -> CRational {
        CRational { re: -&self.re, im: -&self.im }
    }
}

/// Closed disc `{ z : |z - center| <= radius }` known to contain a value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBall {
    pub center: CRational,
    pub radius: BigRational,
}

/// Working precision used for the radius bookkeeping of ball products.
const BALL_BITS: u32 = 96;

impl ComplexBall {
    pub fn exact(center: CRational) -> Self {
        ComplexBall { center, radius: BigRational::zero() }
    }

    pub fn real_exact(x: BigRational) -> Self {
        Self::exact(CRational::real(x))
    }

    pub fn add(&self, o: &ComplexBall) -> ComplexBall {
        ComplexBall { center: &self.center + &o.center, radius: &self.radius + &o.radius }
    }

    pub fn sub(&self, o: &ComplexBall) -> ComplexBall {
        ComplexBall { center: &self.center - &o.center, radius: &self.radius + &o.radius }
    }

    pub fn mul(&self, o: &ComplexBall) -> ComplexBall {
        let a = self.center.abs_upper(BALL_BITS);
        let b = o.center.abs_upper(BALL_BITS);
        let radius = &a * &o.radius + &b * &self.radius + &self.radius * &o.radius;
        ComplexBall { center: &self.center * &o.center, radius }
    }

    pub fn conj(&self) -> ComplexBall {
        ComplexBall { center: self.center.conj(), radius: self.radius.clone() }
    }

    /// Rounds the center to a dyadic grid, widening the radius to keep the
    /// enclosure valid. Keeps rational sizes bounded in long products.
    pub fn rounded(&self, bits: u32) -> ComplexBall {
        let c = self.center.round(bits);
        let err = (&c.re - &self.center.re).abs() + (&c.im - &self.center.im).abs();
        ComplexBall { center: c, radius: &self.radius + err }
    }

    /// Enclosure of the real part.
    pub fn real_part(&self) -> RealInterval {
        RealInterval::new(&self.center.re - &self.radius, &self.center.re + &self.radius)
    }

    /// Enclosure of the squared modulus.
    pub fn norm_sqr(&self) -> RealInterval {
        let a = self.center.abs_upper(BALL_BITS);
        let hi = &a + &self.radius;
        let lo = &a - &self.radius - super::pow2_neg(BALL_BITS);
        let lo = if lo.is_negative() { BigRational::zero() } else { lo };
        RealInterval::new(&lo * &lo, &hi * &hi)
    }

    /// Whether the disc meets the real interval `iv` (conservative: may
    /// report an intersection that is not there, never the reverse).
    pub fn may_meet_real(&self, iv: &RealInterval) -> bool {
        self.center.im.abs() <= self.radius
            && &self.center.re - &self.radius <= iv.hi
            && &self.center.re + &self.radius >= iv.lo
    }

    pub fn to_f64(&self) -> (f64, f64) {
        self.center.to_f64()
    }
}
