//! Certified complex root isolation.
//!
//! Approximations come from an Aberth iteration in `f64`, followed by
//! Weierstrass (Durand-Kerner) steps in exact rational arithmetic with the
//! iterates rounded to a dyadic grid of `bits` bits. Each approximation `z`
//! is then certified with the disc `|w - z| <= deg(p) |p(z) / p'(z)|`, which
//! always contains a root of `p`. When the `deg(p)` discs are pairwise
//! disjoint, each contains exactly one root. Failed certification doubles
//! the working precision up to [`MAX_PRECISION_BITS`].

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{pow2_neg, sqrt_upper, to_f64, CRational, ComplexBall, RatPoly};
use crate::{Error, Result};

/// Working precision cap for isolation and refinement.
pub const MAX_PRECISION_BITS: u32 = 1024;

const START_BITS: u32 = 64;

/// Disc certified to contain exactly one root of the polynomial it was
/// computed for. `real` is set when the root is certified real (the disc is
/// centred on the real axis and the polynomial has real coefficients).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootBox {
    pub center: CRational,
    pub radius: BigRational,
    pub real: bool,
}

impl RootBox {
    pub fn ball(&self) -> ComplexBall {
        ComplexBall { center: self.center.clone(), radius: self.radius.clone() }
    }

    pub fn approx(&self) -> (f64, f64) {
        self.center.to_f64()
    }

    pub fn conj(&self) -> RootBox {
        RootBox { center: self.center.conj(), radius: self.radius.clone(), real: self.real }
    }

    pub fn contains_point(&self, z: &CRational) -> bool {
        (z - &self.center).norm_sqr() <= &self.radius * &self.radius
    }

    /// Whether `self` lies inside `other` as a closed disc.
    pub fn inside(&self, other: &RootBox) -> bool {
        disc_inside(&self.center, &self.radius, &other.center, &other.radius)
    }

    pub fn disjoint(&self, other: &RootBox) -> bool {
        let s = &self.radius + &other.radius;
        (&self.center - &other.center).norm_sqr() > &s * &s
    }
}

fn disc_inside(c: &CRational, r: &BigRational, oc: &CRational, or: &BigRational) -> bool {
    let slack = or - r;
    !slack.is_negative() && (c - oc).norm_sqr() <= &slack * &slack
}

fn eval_c(p: &RatPoly, z: &CRational) -> CRational {
    let mut acc = CRational::zero();
    for c in p.coeffs().iter().rev() {
        acc = &acc * z;
        acc.re += c;
    }
    acc
}

/// Newton-style inclusion radius `deg(p) |p(z)/p'(z)|` (upper bound), or
/// `None` when `p'(z) = 0`.
fn inclusion_radius(p: &RatPoly, dp: &RatPoly, z: &CRational, bits: u32) -> Option<BigRational> {
    let n = BigRational::from_integer(p.degree().unwrap().into());
    let v = eval_c(p, z);
    let d = eval_c(dp, z);
    let dn = d.norm_sqr();
    if dn.is_zero() {
        return None;
    }
    let r2 = &n * &n * v.norm_sqr() / dn;
    if r2.is_zero() {
        return Some(BigRational::zero());
    }
    Some(sqrt_upper(&r2, bits + 8))
}

fn cauchy_bound(p: &[Complex64]) -> f64 {
    let lc = p.last().unwrap().norm();
    1.0 + p[..p.len() - 1].iter().map(|c| c.norm() / lc).fold(0.0, f64::max)
}

fn horner_f64(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for c in p.iter().rev() {
        d = d * z + v;
        v = v * z + c;
    }
    (v, d)
}

/// Aberth-Ehrlich iteration in double precision.
fn aberth_f64(p: &RatPoly) -> Vec<Complex64> {
    let coeffs: Vec<Complex64> = p.coeffs().iter().map(|c| Complex64::new(to_f64(c), 0.0)).collect();
    let n = coeffs.len() - 1;
    let r = cauchy_bound(&coeffs).min(1e150);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(0.5 * r, t)
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (v, d) = horner_f64(&coeffs, z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let s: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let diff = z[i] - z[j];
                    if diff.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        Complex64::new(1.0, 0.0) / diff
                    }
                })
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// One Weierstrass step for every root, exact then rounded.
fn weierstrass_step(p: &RatPoly, z: &[CRational], bits: u32) -> Option<(Vec<CRational>, BigRational)> {
    let n = z.len();
    let mut out = Vec::with_capacity(n);
    let mut max_w = BigRational::zero();
    for i in 0..n {
        let mut denom = CRational::real(BigRational::one());
        for j in 0..n {
            if j != i {
                denom = (&denom * &(&z[i] - &z[j])).round(2 * bits);
            }
        }
        let w = eval_c(p, &z[i]).checked_div(&denom)?;
        let wn = w.norm_sqr();
        if wn > max_w {
            max_w = wn;
        }
        out.push((&z[i] - &w).round(bits));
    }
    Some((out, max_w))
}

/// Perturbs every iterate by a small, index-dependent complex offset.
/// Coinciding iterates make the Weierstrass correction undefined, and a
/// conjugate-symmetric pair can never split into two real roots, so both
/// symmetries are broken before each precision level.
fn separate(z: &mut [CRational], bits: u32) {
    let tol = pow2_neg(bits / 2);
    for (i, zi) in z.iter_mut().enumerate() {
        let k = BigRational::from_integer((i + 1).into());
        let shift = CRational::new(
            &tol * &k * BigRational::new(3.into(), 5.into()),
            &tol * &k * BigRational::new(4.into(), 5.into()),
        );
        *zi = &*zi + &shift;
    }
}

/// Forces exact conjugate symmetry: near-real iterates become real, the
/// rest are paired with their nearest mirror image.
fn symmetrize(z: &mut [CRational], bits: u32) -> bool {
    let tol = pow2_neg(bits / 2);
    let n = z.len();
    let mut done = vec![false; n];
    for i in 0..n {
        if done[i] {
            continue;
        }
        if z[i].im.abs() <= tol {
            z[i].im = BigRational::zero();
            done[i] = true;
            continue;
        }
        let target = z[i].conj();
        let best = (0..n)
            .filter(|&j| j != i && !done[j])
            .min_by(|&a, &b| (&z[a] - &target).norm_sqr().cmp(&(&z[b] - &target).norm_sqr()));
        match best {
            Some(j) => {
                if z[i].im.is_negative() {
                    z[i] = z[j].conj();
                } else {
                    z[j] = target;
                }
                done[i] = true;
                done[j] = true;
            }
            None => return false,
        }
    }
    true
}

/// Canonical order: real roots ascending, then complex roots by real part
/// and imaginary part.
fn canonical_order(a: &RootBox, b: &RootBox) -> std::cmp::Ordering {
    b.real
        .cmp(&a.real)
        .then_with(|| a.center.re.cmp(&b.center.re))
        .then_with(|| a.center.im.cmp(&b.center.im))
}

fn certify(p: &RatPoly, dp: &RatPoly, z: &[CRational], bits: u32) -> Option<Vec<RootBox>> {
    let mut boxes = Vec::with_capacity(z.len());
    for zi in z {
        let r = inclusion_radius(p, dp, zi, bits)?;
        boxes.push(RootBox { center: zi.clone(), radius: r, real: zi.im.is_zero() });
    }
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            if !boxes[i].disjoint(&boxes[j]) {
                return None;
            }
        }
    }
    Some(boxes)
}

fn bits_for(precision: &BigRational) -> u32 {
    let mut bits = START_BITS;
    while bits < MAX_PRECISION_BITS && pow2_neg(bits - 8) > *precision {
        bits *= 2;
    }
    bits
}

/// Isolates every complex root of a squarefree polynomial with real
/// coefficients into pairwise-disjoint discs of radius at most `precision`.
///
/// Real roots are returned first in ascending order, then complex roots;
/// conjugate roots get mirror-image discs.
pub fn isolate_roots(p: &RatPoly, precision: &BigRational) -> Result<Vec<RootBox>> {
    let deg = p.degree().ok_or_else(|| Error::Domain("the zero polynomial has no isolated roots".into()))?;
    if deg == 0 {
        return Ok(Vec::new());
    }
    if !p.is_squarefree() {
        return Err(Error::Precondition(format!("root isolation needs a squarefree polynomial, got {p}")));
    }
    if !precision.is_positive() {
        return Err(Error::Precondition("target radius must be positive".into()));
    }
    let p = p.monic();
    let dp = p.derivative();
    if deg == 1 {
        let r = -p.coeff(0);
        return Ok(vec![RootBox { center: CRational::real(r), radius: BigRational::zero(), real: true }]);
    }

    let mut z: Vec<CRational> = aberth_f64(&p)
        .into_iter()
        .map(|c| {
            CRational::new(
                BigRational::from_float(c.re).unwrap_or_else(BigRational::zero),
                BigRational::from_float(c.im).unwrap_or_else(BigRational::zero),
            )
            .round(START_BITS)
        })
        .collect();

    let mut bits = START_BITS;
    let target_bits = bits_for(precision);
    loop {
        separate(&mut z, bits);
        let stop = pow2_neg(2 * bits);
        for _ in 0..(60 + 4 * deg) {
            let Some((next, max_w)) = weierstrass_step(&p, &z, bits) else {
                break;
            };
            z = next;
            if max_w <= stop {
                break;
            }
        }
        let mut zs = z.clone();
        if symmetrize(&mut zs, bits) {
            if let Some(mut boxes) = certify(&p, &dp, &zs, bits) {
                if boxes.iter().all(|b| b.radius <= *precision) {
                    boxes.sort_by(canonical_order);
                    return Ok(boxes);
                }
            }
        }
        if bits >= MAX_PRECISION_BITS {
            return Err(Error::Precision(format!(
                "could not certify the roots of {p} within {MAX_PRECISION_BITS} bits"
            )));
        }
        bits = (bits * 2).max(if bits < target_bits { target_bits } else { 0 }).min(MAX_PRECISION_BITS);
    }
}

/// Refines an isolating disc of a root of the squarefree polynomial `p`
/// until its radius is at most `precision`. The selected root never
/// changes: a refined disc is only accepted when it lies inside the old one.
pub fn refine_root(p: &RatPoly, rb: &RootBox, precision: &BigRational) -> Result<RootBox> {
    if rb.radius <= *precision {
        return Ok(rb.clone());
    }
    let p = p.monic();
    let dp = p.derivative();
    let mut z = rb.center.clone();
    let mut bits = bits_for(precision).max(START_BITS);
    loop {
        for _ in 0..200 {
            let v = eval_c(&p, &z);
            let d = eval_c(&dp, &z);
            let Some(step) = v.checked_div(&d) else { break };
            let mut next = (&z - &step).round(bits);
            if rb.real {
                next.im = BigRational::zero();
            }
            let settled = step.norm_sqr() <= pow2_neg(2 * bits);
            z = next;
            if settled {
                break;
            }
        }
        if let Some(r) = inclusion_radius(&p, &dp, &z, bits) {
            let cand = RootBox { center: z.clone(), radius: r, real: rb.real };
            if cand.radius <= *precision && cand.inside(rb) {
                return Ok(cand);
            }
        }
        if bits >= MAX_PRECISION_BITS {
            break;
        }
        bits = (bits * 2).min(MAX_PRECISION_BITS);
        z = rb.center.clone();
    }
    // Newton left the disc: fall back to a full isolation and pick the disc
    // nested in the old one.
    for shrink in [1u32, 8, 32] {
        let target = precision.clone().min(&rb.radius * pow2_neg(shrink));
        let target = if target.is_positive() { target } else { precision.clone() };
        for cand in isolate_roots(&p, &target)? {
            if cand.inside(rb) {
                return Ok(cand);
            }
        }
    }
    Err(Error::Precision(format!("could not refine a root of {p} below the requested radius")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::rat;

    fn isolate(c: &[i64]) -> Vec<RootBox> {
        isolate_roots(&RatPoly::from_i64(c), &pow2_neg(40)).unwrap()
    }

    #[test]
    fn real_cubic_roots() {
        let roots = isolate(&[3, -4, -1, 1]);
        assert_eq!(roots.len(), 3);
        assert!(roots.iter().all(|r| r.real));
        let xs: Vec<f64> = roots.iter().map(|r| r.approx().0).collect();
        // x2 ~ -1.91223, x3 ~ 0.71354, x1 ~ 2.19869; root sum = 1
        assert!((xs[0] + 1.91223).abs() < 5e-6);
        assert!((xs[1] - 0.71354).abs() < 5e-6);
        assert!((xs[2] - 2.19869).abs() < 5e-6);
    }

    #[test]
    fn complex_pair_is_mirrored() {
        let roots = isolate(&[1, 1, 0, 1]);
        assert!(roots[0].real);
        assert!((roots[0].approx().0 + 0.68233).abs() < 1e-5);
        assert!(!roots[1].real && !roots[2].real);
        assert_eq!(roots[1].center, roots[2].center.conj());
        let (re, im) = roots[2].approx();
        // |pair|^2 = 1 / |real root|
        assert!(((re * re + im * im).sqrt() - 1.21061).abs() < 1e-5);
    }

    #[test]
    fn linear_is_exact() {
        let roots = isolate(&[-5, 1]);
        assert_eq!(roots, vec![RootBox { center: CRational::real(rat(5)), radius: rat(0), real: true }]);
    }

    #[test]
    fn non_squarefree_is_rejected() {
        let p = RatPoly::from_i64(&[1, -2, 1]);
        assert!(matches!(isolate_roots(&p, &pow2_neg(20)), Err(Error::Precondition(_))));
    }

    #[test]
    fn boxes_are_disjoint_and_small() {
        let prec = pow2_neg(100);
        let p = RatPoly::from_i64(&[-1, 0, 0, 0, 0, 0, 0, 0, 1]);
        let roots = isolate_roots(&p, &prec).unwrap();
        assert_eq!(roots.len(), 8);
        for (i, a) in roots.iter().enumerate() {
            assert!(a.radius <= prec);
            for b in &roots[i + 1..] {
                assert!(a.disjoint(b));
            }
        }
    }

    #[test]
    fn refinement_keeps_the_root() {
        let p = RatPoly::from_i64(&[-2, 0, 1]);
        let roots = isolate_roots(&p, &pow2_neg(10)).unwrap();
        let fine = refine_root(&p, &roots[1], &pow2_neg(300)).unwrap();
        assert!(fine.radius <= pow2_neg(300));
        assert!(fine.inside(&roots[1]));
        let sq = &fine.center.re * &fine.center.re - rat(2);
        assert!(sq.abs() < pow2_neg(290));
    }

    #[test]
    fn close_roots_need_more_bits() {
        // roots 1 and 1 + 2^-70
        let eps = pow2_neg(70);
        let p = &RatPoly::linear_root(rat(1)) * &RatPoly::linear_root(rat(1) + eps);
        let roots = isolate_roots(&p, &pow2_neg(20)).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].disjoint(&roots[1]));
    }
}
