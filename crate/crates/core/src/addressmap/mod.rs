//! The group `J` generated by control points, its free generators `V`, the
//! address map `a` with `V a(ξ) = ξ`, and the integer matrix `M` with
//! `φ V = V M`.
//!
//! Vectors with coordinates in a degree-`d` field on `n` axes are flattened
//! to rational vectors of length `n·d` (coefficients in the power basis),
//! scaled to integers, and put in Hermite normal form.

mod hnf;

use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::expansion::{is_diagonalizable, Spectrum};
use crate::numbers::{char_poly, FieldElem, FieldMatrix, IntMatrix, IntPoly, NumberField};
use crate::substitution::{
    control_points, expand_patch, patch_control_points, sub_vectors, Patch, SubstitutionRule, Vector,
};
use crate::{Error, Result};

pub use hnf::Hnf;

/// Default cap on the subdivision level used for stabilization.
pub const DEFAULT_K_MAX: u32 = 8;

/// Cap on the number of points used by the Lipschitz diagnostic.
const LIPSCHITZ_SAMPLE: usize = 400;

fn flatten(v: &[FieldElem]) -> Vec<BigRational> {
    v.iter().flat_map(|x| x.coeffs().iter().cloned()).collect()
}

fn unflatten(field: &Arc<NumberField>, flat: &[BigRational]) -> Vector {
    flat.chunks(field.degree()).map(|c| FieldElem::from_coeffs(field, c.to_vec())).collect()
}

/// Free generators of the subgroup of `K^n` generated by some vectors.
#[derive(Clone, Debug)]
pub struct ZModuleBasis {
    field: Arc<NumberField>,
    axes: usize,
    /// Common denominator: the lattice is `hnf / denom`.
    denom: BigInt,
    hnf: Hnf,
    generators: Vec<Vector>,
}

impl PartialEq for ZModuleBasis {
    fn eq(&self, o: &Self) -> bool {
        self.generators == o.generators
    }
}

impl ZModuleBasis {
    /// Generators `v_1, …, v_N` (the columns of `V`).
    pub fn generators(&self) -> &[Vector] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn axes(&self) -> usize {
        self.axes
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    /// The normal form as rational rows, one per generator.
    pub fn normal_form(&self) -> Vec<Vec<BigRational>> {
        self.generators.iter().map(|g| flatten(g)).collect()
    }

    /// Integer coordinates of `ξ`, or `None` when `ξ ∉ J`.
    pub fn address(&self, xi: &[FieldElem]) -> Option<Vec<BigInt>> {
        let d = BigRational::from_integer(self.denom.clone());
        let scaled: Option<Vec<BigInt>> =
            flatten(xi).iter().map(|q| q * &d).map(|s| s.is_integer().then(|| s.to_integer())).collect();
        self.hnf.coordinates(&scaled?)
    }

    /// `V a`.
    pub fn combine(&self, a: &[BigInt]) -> Vector {
        let mut acc = vec![FieldElem::zero(&self.field); self.axes];
        for (c, g) in a.iter().zip(&self.generators) {
            if c.is_zero() {
                continue;
            }
            let q = BigRational::from_integer(c.clone());
            acc = acc.iter().zip(g).map(|(x, y)| x + &y.scale(&q)).collect();
        }
        acc
    }
}

/// Hermite basis of the group generated by `vectors`. All vectors must
/// share one field and have `axes` coordinates.
pub fn zmodule_basis(field: &Arc<NumberField>, axes: usize, vectors: &[Vector]) -> Result<ZModuleBasis> {
    if vectors.iter().any(|v| v.len() != axes) {
        return Err(Error::Shape(format!("expected vectors with {axes} coordinates")));
    }
    let flat: Vec<Vec<BigRational>> = vectors.iter().map(|v| flatten(v)).collect();
    let denom = flat.iter().flatten().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let d = BigRational::from_integer(denom.clone());
    let mut hnf = Hnf::default();
    for row in &flat {
        hnf.insert(row.iter().map(|q| (q * &d).to_integer()).collect());
    }
    let generators = hnf
        .rows()
        .iter()
        .map(|r| {
            let q: Vec<BigRational> = r.iter().map(|x| BigRational::new(x.clone(), denom.clone())).collect();
            unflatten(field, &q)
        })
        .collect();
    Ok(ZModuleBasis { field: field.clone(), axes, denom, hnf, generators })
}

/// Canonical sign: the first non-zero flattened coefficient is positive.
fn canonical_sign(v: Vector) -> Vector {
    let neg = flatten(&v).iter().find(|q| !q.is_zero()).is_some_and(|q| q < &BigRational::zero());
    if neg {
        v.iter().map(|x| -x).collect()
    } else {
        v
    }
}

/// All pairwise differences of control points of tiles in the level-`k`
/// patches of every seed type, deduplicated up to sign, in first-seen order.
pub fn collect_differences(rule: &SubstitutionRule, k: u32) -> Result<Vec<Vector>> {
    let cps = control_points(rule)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for s in 0..rule.tiles().len() {
        let p = expand_patch(rule, &Patch::seed(rule, s), k)?;
        let pts = patch_control_points(&p, &cps);
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d = canonical_sign(sub_vectors(&pts[j], &pts[i]));
                if d.iter().all(FieldElem::is_zero) {
                    continue;
                }
                if seen.insert(d.clone()) {
                    out.push(d);
                }
            }
        }
    }
    Ok(out)
}

/// Generators of the group of control points at level `k`: differences to
/// the first tile of each seed patch, plus the control points of the seed
/// tiles. They generate the same group as all pairwise differences plus
/// one control point.
fn level_generators(rule: &SubstitutionRule, cps: &[Vector], k: u32) -> Result<(Vec<Vector>, Vec<Vector>)> {
    let mut gens: Vec<Vector> = cps.to_vec();
    let mut points = Vec::new();
    for s in 0..rule.tiles().len() {
        let p = expand_patch(rule, &Patch::seed(rule, s), k)?;
        let pts = patch_control_points(&p, cps);
        for q in &pts[1..] {
            gens.push(sub_vectors(q, &pts[0]));
        }
        points.extend(pts);
    }
    Ok((gens, points))
}

/// Hermite basis of the group generated by the control points of the
/// level-`k` patches.
pub fn module_at_level(rule: &SubstitutionRule, k: u32) -> Result<ZModuleBasis> {
    let cps = control_points(rule)?;
    let (gens, _) = level_generators(rule, &cps, k)?;
    zmodule_basis(rule.field(), rule.dimension(), &gens)
}

/// Free generators of `J` together with the address map.
#[derive(Clone, Debug)]
pub struct AddressMap {
    pub basis: ZModuleBasis,
    /// Level at which the normal form repeated.
    pub level: u32,
    /// Control points of the level-`level` patches; every one has an
    /// address.
    pub points: Vec<Vector>,
}

impl AddressMap {
    pub fn address(&self, xi: &[FieldElem]) -> Option<Vec<BigInt>> {
        self.basis.address(xi)
    }
}

/// Computes the Hermite basis at levels `2, 3, …` and stops when two
/// consecutive levels agree.
pub fn stabilized_address_map(rule: &SubstitutionRule, k_max: u32) -> Result<AddressMap> {
    if k_max < 2 {
        return Err(Error::Precondition("k_max must be at least 2".into()));
    }
    let cps = control_points(rule)?;
    let field = rule.field().clone();
    let n = rule.dimension();
    let mut prev: Option<ZModuleBasis> = None;
    let mut before: Option<ZModuleBasis> = None;
    for k in 2..=k_max {
        let (gens, points) = level_generators(rule, &cps, k)?;
        let basis = zmodule_basis(&field, n, &gens)?;
        if prev.as_ref() == Some(&basis) {
            return Ok(AddressMap { basis, level: k, points });
        }
        before = prev.replace(basis);
    }
    let last = prev.expect("at least one level");
    let earlier = match before {
        Some(b) => format!("level {}: {}; ", k_max - 1, format_rows(&b.normal_form())),
        None => String::new(),
    };
    Err(Error::NotStabilized(format!(
        "the control-point module did not stabilize by level {k_max}; {earlier}level {k_max} (rank {}): {}",
        last.rank(),
        format_rows(&last.normal_form())
    )))
}

fn format_rows(rows: &[Vec<BigRational>]) -> String {
    let r: Vec<String> = rows
        .iter()
        .map(|r| format!("[{}]", r.iter().map(crate::numbers::rational_to_string).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", r.join(", "))
}

/// `M` with `φ V = V M`.
#[derive(Clone, Debug, Serialize)]
pub struct ExpansionOnJ {
    pub m: IntMatrix,
    /// `φ V = V M` re-checked exactly.
    pub phi_v_equals_v_m: bool,
    /// `a(φξ) = M a(ξ)` on every collected point and difference.
    pub address_equivariant: bool,
    /// Number of points the equivariance was checked on.
    pub checked_points: usize,
}

pub fn expansion_on_j(map: &AddressMap, phi: &FieldMatrix) -> Result<ExpansionOnJ> {
    let gens = map.basis.generators();
    let n = gens.len();
    let mut m = IntMatrix::zeros(n, n);
    for (j, v) in gens.iter().enumerate() {
        let col = map.address(&phi.mul_vec(v)).ok_or_else(|| {
            Error::NotInvariant(format!(
                "φ·v{} is outside the module: not forward-invariant at level {}",
                j + 1,
                map.level
            ))
        })?;
        for (i, c) in col.into_iter().enumerate() {
            m.set(i, j, c);
        }
    }
    let phi_v_equals_v_m = (0..n).all(|j| {
        let col: Vec<BigInt> = (0..n).map(|i| m.get(i, j).clone()).collect();
        phi.mul_vec(&gens[j]) == map.basis.combine(&col)
    });
    let mut checked = 0;
    let mut equivariant = true;
    let mut pts: Vec<Vector> = map.points.clone();
    for i in 1..map.points.len().min(LIPSCHITZ_SAMPLE) {
        pts.push(sub_vectors(&map.points[i], &map.points[0]));
    }
    for xi in &pts {
        let a = map.address(xi).ok_or_else(|| Error::Internal("collected point without an address".into()))?;
        if map.basis.combine(&a) != *xi {
            equivariant = false;
        }
        match map.address(&phi.mul_vec(xi)) {
            Some(b) if b == m.mul_vec(&a) => {}
            _ => equivariant = false,
        }
        checked += 1;
    }
    Ok(ExpansionOnJ { m, phi_v_equals_v_m, address_equivariant: equivariant, checked_points: checked })
}

/// Largest `‖a(ξ) - a(ξ')‖ / ‖ξ - ξ'‖` (max norms) over sampled pairs.
#[derive(Clone, Debug, Serialize)]
pub struct LipschitzDiagnostic {
    pub level: u32,
    pub points: usize,
    pub max_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MReport {
    pub integral: bool,
    pub char_poly: IntPoly,
    pub diagonalizable: bool,
    /// Every minimal polynomial of an eigenvalue of `φ` divides `χ_M`.
    pub divisibility: bool,
    pub lipschitz: Vec<LipschitzDiagnostic>,
}

fn lipschitz_at(rule: &SubstitutionRule, map: &AddressMap, k: u32) -> Result<LipschitzDiagnostic> {
    let cps = control_points(rule)?;
    let mut pts = Vec::new();
    for s in 0..rule.tiles().len() {
        let p = expand_patch(rule, &Patch::seed(rule, s), k)?;
        pts.extend(patch_control_points(&p, &cps));
    }
    let stride = pts.len().div_ceil(LIPSCHITZ_SAMPLE).max(1);
    let sample: Vec<&Vector> = pts.iter().step_by(stride).collect();
    let mut data = Vec::with_capacity(sample.len());
    for p in &sample {
        let a = map
            .address(p)
            .ok_or_else(|| Error::NotInvariant(format!("a level-{k} control point lies outside the module")))?;
        let a: Vec<f64> = a.iter().map(|x| crate::numbers::to_f64(&BigRational::from_integer(x.clone()))).collect();
        data.push((a, rule.embed_vector(p)?));
    }
    let mut max_ratio: f64 = 0.0;
    for i in 0..data.len() {
        for j in i + 1..data.len() {
            let da = data[i].0.iter().zip(&data[j].0).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            let dx = data[i].1.iter().zip(&data[j].1).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            if dx > 0.0 {
                max_ratio = max_ratio.max(da / dx);
            }
        }
    }
    Ok(LipschitzDiagnostic { level: k, points: sample.len(), max_ratio })
}

/// Integrality, divisibility by the minimal polynomials of `φ`'s
/// eigenvalues, diagonalizability, and the Lipschitz diagnostic at the
/// stabilization level and one level deeper.
pub fn verify_m_properties(
    rule: &SubstitutionRule,
    map: &AddressMap,
    e: &ExpansionOnJ,
    phi_spectrum: &Spectrum,
) -> Result<MReport> {
    let mr = e.m.to_rat();
    let cp = char_poly(&mr)?;
    let divisibility = phi_spectrum.items().iter().all(|(a, _)| cp.rem(a.min_poly()).is_zero());
    let lipschitz = vec![lipschitz_at(rule, map, map.level)?, lipschitz_at(rule, map, map.level + 1)?];
    Ok(MReport {
        integral: true,
        char_poly: cp.to_int_poly().ok_or_else(|| Error::Internal("integer matrix with non-integral char poly".into()))?,
        diagonalizable: is_diagonalizable(&mr)?,
        divisibility,
        lipschitz,
    })
}
