//! Integer-matrix witnesses: a companion-block matrix `M` whose spectrum
//! contains that of `φ`, and the check that the eigenvalues of `φ` span the
//! invariant subspace of strictly largest growth among all invariant
//! subspaces of the same dimension.

use std::cmp::Ordering;

use serde::Serialize;

use super::{is_diagonalizable, matrix_spectrum, Spectrum};
use crate::numbers::{composed_product_rat, AlgebraicNumber, ComplexBall, IntMatrix, RatPoly, RealInterval};
use crate::{Error, Result};

/// Degree cap for the product polynomials used in exact growth comparison.
const MAX_PRODUCT_DEGREE: usize = 512;

/// Direct sum of companion matrices: each distinct minimal polynomial is
/// repeated as often as the largest multiplicity among its roots.
pub fn build_companion_witness(spec: &Spectrum) -> Result<IntMatrix> {
    let mut blocks: Vec<(RatPoly, u32)> = Vec::new();
    for (a, m) in spec.items() {
        match blocks.iter_mut().find(|(p, _)| p == a.min_poly()) {
            Some((_, k)) => *k = (*k).max(*m),
            None => blocks.push((a.min_poly().clone(), *m)),
        }
    }
    let mut mats = Vec::new();
    for (p, k) in blocks {
        let ip = p
            .to_int_poly()
            .ok_or_else(|| Error::Domain(format!("{p} has non-integer coefficients; no integer witness exists")))?;
        let c = IntMatrix::companion(&ip)?;
        for _ in 0..k {
            mats.push(c.clone());
        }
    }
    Ok(IntMatrix::direct_sum(&mats))
}

/// One conjugation-closed sub-multiset of `spec(M)` other than the target.
#[derive(Clone, Debug, Serialize)]
pub struct Competitor {
    pub multiset: Spectrum,
    /// `|product|`, numeric.
    pub growth: f64,
    /// Growth of this multiset compared with the target's.
    #[serde(serialize_with = "ser_ordering")]
    pub versus_target: Ordering,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub m: IntMatrix,
    pub target: Spectrum,
    pub growth: f64,
    pub competitors: Vec<Competitor>,
    /// Competitors whose growth equals the target's.
    pub ties: Vec<Spectrum>,
    pub strict_max: bool,
}

pub(crate) fn ser_ordering<S: serde::Serializer>(o: &Ordering, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(match o {
        Ordering::Less => "smaller",
        Ordering::Equal => "equal",
        Ordering::Greater => "larger",
    })
}

fn growth_f64(s: &[(AlgebraicNumber, u32)]) -> f64 {
    s.iter()
        .map(|(a, m)| {
            let (re, im) = a.approx();
            re.hypot(im).powi(*m as i32)
        })
        .product()
}

/// Elements of `a` not in `b`, with multiplicity, flattened.
fn difference(a: &Spectrum, b: &Spectrum) -> Vec<AlgebraicNumber> {
    let mut out = Vec::new();
    for (x, m) in a.items() {
        for _ in b.multiplicity(x)..*m {
            out.push(x.clone());
        }
    }
    out
}

/// Monic polynomial having the product of `xs` among its roots.
fn product_poly(xs: &[AlgebraicNumber]) -> Result<RatPoly> {
    let mut p = RatPoly::linear_root(num_rational::BigRational::from_integer(1.into()));
    for x in xs {
        let d = p.degree().unwrap() * x.degree();
        if d > MAX_PRODUCT_DEGREE {
            return Err(Error::Precision(format!(
                "growth comparison needs a product polynomial of degree {d} (cap {MAX_PRODUCT_DEGREE})"
            )));
        }
        p = composed_product_rat(&p, x.min_poly())?;
    }
    Ok(p)
}

fn sq_product_enclosure(xs: &[AlgebraicNumber], bits: u32) -> Result<RealInterval> {
    let slack = 8 + 2 * xs.len() as u32;
    let mut acc = ComplexBall::real_exact(num_rational::BigRational::from_integer(1.into()));
    for x in xs {
        acc = acc.mul(&x.ball(bits + slack)?).rounded(bits + 2 * slack);
    }
    Ok(acc.norm_sqr())
}

/// Exact comparison of `|∏ a|` and `|∏ b|` for conjugation-closed `a`, `b`
/// (both products are real, their squares are roots of Graeffe transforms).
fn cmp_growth(a: &[AlgebraicNumber], b: &[AlgebraicNumber]) -> Result<Ordering> {
    if a.is_empty() && b.is_empty() {
        return Ok(Ordering::Equal);
    }
    let pa = product_poly(a)?.graeffe();
    let pb = product_poly(b)?.graeffe();
    let r = if pa == pb { pa } else { &pa * &pb };
    crate::numbers::compare_real_roots(&r, |bits| sq_product_enclosure(a, bits), |bits| sq_product_enclosure(b, bits))
}

/// A real eigenvalue (size 1) or a complex pair (size 2) with the number
/// of copies available in `spec(M)`.
struct Unit {
    members: Vec<AlgebraicNumber>,
    available: u32,
}

fn units(spec: &Spectrum) -> Vec<Unit> {
    spec.items()
        .iter()
        .filter(|(a, _)| a.is_real() || a.approx().1 > 0.0)
        .map(|(a, m)| Unit {
            members: if a.is_real() { vec![a.clone()] } else { vec![a.clone(), a.conj()] },
            available: *m,
        })
        .collect()
}

fn enumerate(units: &[Unit], size: usize, counts: &mut Vec<u32>, out: &mut Vec<Spectrum>) {
    if counts.len() == units.len() {
        if size == 0 {
            out.push(Spectrum::from_items(
                units
                    .iter()
                    .zip(counts.iter())
                    .flat_map(|(u, &c)| u.members.iter().map(move |a| (a.clone(), c))),
            ));
        }
        return;
    }
    let u = &units[counts.len()];
    let w = u.members.len();
    for c in 0..=u.available {
        if c as usize * w > size {
            break;
        }
        counts.push(c);
        enumerate(units, size - c as usize * w, counts, out);
        counts.pop();
    }
}

/// Compares the growth of `target` with every other conjugation-closed
/// sub-multiset of `spec(M)` of the same size.
pub fn check_growth_condition(m: &IntMatrix, target: &Spectrum) -> Result<WitnessReport> {
    let mr = m.to_rat();
    mr.require_square()?;
    if !is_diagonalizable(&mr)? {
        return Err(Error::Precondition("witness matrix is not diagonalizable over C".into()));
    }
    if !target.is_conjugation_closed() {
        return Err(Error::Domain("target eigenvalues are not closed under complex conjugation".into()));
    }
    let spec = matrix_spectrum(&mr)?;
    if !target.is_subset_of(&spec) {
        return Err(Error::Domain("target eigenvalues are not contained in the spectrum of M".into()));
    }
    let mut all = Vec::new();
    enumerate(&units(&spec), target.size(), &mut Vec::new(), &mut all);

    let mut competitors = Vec::new();
    let mut ties = Vec::new();
    for c in all {
        if c == *target {
            continue;
        }
        let versus_target = cmp_growth(&difference(&c, target), &difference(target, &c))?;
        if versus_target == Ordering::Equal {
            ties.push(c.clone());
        }
        competitors.push(Competitor { growth: growth_f64(c.items()), multiset: c, versus_target });
    }
    let strict_max = competitors.iter().all(|c| c.versus_target == Ordering::Less);
    Ok(WitnessReport {
        m: m.clone(),
        target: target.clone(),
        growth: growth_f64(target.items()),
        competitors,
        ties,
        strict_max,
    })
}
