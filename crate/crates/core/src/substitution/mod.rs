//! Tile substitution rules with exact offsets.
//!
//! A rule says that `φ T_i` is the union of the translates `T_j + d` listed
//! as the children of type `i`. Offsets and the expansion matrix live in a
//! number field; each coordinate axis carries its own embedding into R or C.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use serde::Serialize;

use crate::expansion::{require_expanding, Spectrum};
use crate::numbers::{
    char_poly, embed, factor_rational, pow2_neg, to_f64, AlgebraicNumber, FieldElem, FieldMatrix, IntMatrix,
    NumberField, NumberFieldSpec,
};
use crate::{Error, Result};

pub type Vector = Vec<FieldElem>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Child {
    pub tile: usize,
    pub offset: Vector,
}

#[derive(Clone, Debug)]
pub struct TileType {
    pub name: String,
    pub children: Vec<Child>,
    /// Index into `children` of the child whose nesting defines the control
    /// point.
    pub control_child: usize,
    /// Numeric outline used only for drawing.
    pub seed_polygon: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug)]
pub struct SubstitutionRule {
    field: NumberFieldSpec,
    expansion: FieldMatrix,
    tiles: Vec<TileType>,
}

impl SubstitutionRule {
    /// Validates shapes, child references, the triangular shape of the
    /// expansion, and that it is expanding.
    pub fn new(field: NumberFieldSpec, expansion: FieldMatrix, tiles: Vec<TileType>) -> Result<Self> {
        let n = field.axes();
        if n == 0 {
            return Err(Error::Input("a rule needs at least one axis".into()));
        }
        if expansion.dim() != n {
            return Err(Error::Shape(format!("expansion is {0}x{0} but there are {n} axes", expansion.dim())));
        }
        if tiles.is_empty() {
            return Err(Error::Input("a rule needs at least one tile type".into()));
        }
        for t in &tiles {
            if t.children.is_empty() {
                return Err(Error::Input(format!("tile type {} has no children", t.name)));
            }
            if t.control_child >= t.children.len() {
                return Err(Error::Input(format!(
                    "tile type {}: control child {} out of range",
                    t.name, t.control_child
                )));
            }
            for c in &t.children {
                if c.tile >= tiles.len() {
                    return Err(Error::Input(format!("tile type {}: unknown child type {}", t.name, c.tile)));
                }
                if c.offset.len() != n {
                    return Err(Error::Shape(format!("tile type {}: offset has wrong length", t.name)));
                }
            }
        }
        if !(expansion.is_upper_triangular() || expansion.is_lower_triangular()) {
            return Err(Error::Input("the expansion matrix must be triangular".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if !expansion.get(i, j).is_zero() && field.embeddings[i] != field.embeddings[j] {
                    return Err(Error::Input(format!(
                        "expansion couples axes {i} and {j}, which use different embeddings"
                    )));
                }
            }
        }
        let rule = SubstitutionRule { field, expansion, tiles };
        require_expanding(&rule.spectrum()?)?;
        rule.expansion.inverse()?;
        Ok(rule)
    }

    pub fn field_spec(&self) -> &NumberFieldSpec {
        &self.field
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field.field
    }

    pub fn expansion(&self) -> &FieldMatrix {
        &self.expansion
    }

    pub fn tiles(&self) -> &[TileType] {
        &self.tiles
    }

    /// Number of axes.
    pub fn dimension(&self) -> usize {
        self.field.axes()
    }

    pub fn tile_index(&self, name: &str) -> Option<usize> {
        self.tiles.iter().position(|t| t.name == name)
    }

    /// Eigenvalues of `φ` as a real linear map: the embedded diagonal
    /// entries, plus their conjugates on complex axes.
    pub fn spectrum(&self) -> Result<Spectrum> {
        let mut items = Vec::new();
        for (i, e) in self.field.embeddings.iter().enumerate() {
            let a = self.expansion.get(i, i);
            let p = a.min_poly()?;
            let mut bits = 60;
            let lambda = loop {
                let ball = embed(a, e, &pow2_neg(bits))?;
                if let Some(l) = AlgebraicNumber::locate(&p, &ball)? {
                    break l;
                }
                if bits > 1000 {
                    return Err(Error::Precision("could not identify an eigenvalue of the expansion".into()));
                }
                bits *= 2;
            };
            if !e.is_real() {
                items.push((lambda.conj(), 1));
            }
            items.push((lambda, 1));
        }
        Ok(Spectrum::from_items(items))
    }

    /// `|det φ|` of the real map, from embedded diagonal entries.
    pub fn abs_det(&self) -> Result<f64> {
        let mut d = 1.0;
        for (i, e) in self.field.embeddings.iter().enumerate() {
            let b = embed(self.expansion.get(i, i), e, &pow2_neg(80))?;
            let (re, im) = b.to_f64();
            let m = re.hypot(im);
            d *= if e.is_real() { m } else { m * m };
        }
        Ok(d)
    }

    /// Real matrix of `φ` in the numeric coordinates (complex axes give
    /// 2x2 rotation-scaling blocks).
    pub fn real_matrix(&self) -> Result<Vec<Vec<f64>>> {
        let emb = &self.field.embeddings;
        let offsets: Vec<usize> = emb
            .iter()
            .scan(0, |acc, e| {
                let o = *acc;
                *acc += if e.is_real() { 1 } else { 2 };
                Some(o)
            })
            .collect();
        let dim = self.field.real_dim();
        let mut m = vec![vec![0.0; dim]; dim];
        for i in 0..emb.len() {
            for j in 0..emb.len() {
                let x = self.expansion.get(i, j);
                if x.is_zero() {
                    continue;
                }
                let (re, im) = embed(x, &emb[i], &pow2_neg(60))?.to_f64();
                let (oi, oj) = (offsets[i], offsets[j]);
                if emb[i].is_real() {
                    m[oi][oj] = re;
                } else {
                    m[oi][oj] = re;
                    m[oi][oj + 1] = -im;
                    m[oi + 1][oj] = im;
                    m[oi + 1][oj + 1] = re;
                }
            }
        }
        Ok(m)
    }

    pub fn embed_vector(&self, v: &[FieldElem]) -> Result<Vec<f64>> {
        self.field.embed_vector(v)
    }

    pub fn zero_vector(&self) -> Vector {
        vec![FieldElem::zero(self.field()); self.dimension()]
    }
}

pub fn add_vectors(a: &[FieldElem], b: &[FieldElem]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vectors(a: &[FieldElem], b: &[FieldElem]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `m[i][j]` = number of type-`j` children of type `i`.
pub fn subdivision_matrix(rule: &SubstitutionRule) -> IntMatrix {
    let k = rule.tiles.len();
    let mut m = IntMatrix::zeros(k, k);
    for (i, t) in rule.tiles.iter().enumerate() {
        for c in &t.children {
            let v = m.get(i, c.tile) + 1;
            m.set(i, c.tile, v);
        }
    }
    m
}

/// Some power (at most `n²`) of the zero pattern is all ones.
pub fn is_primitive(m: &IntMatrix) -> bool {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return false;
    }
    let shadow: Vec<Vec<bool>> = m.rows().iter().map(|r| r.iter().map(|x| *x > 0.into()).collect()).collect();
    let mut p = shadow.clone();
    for _ in 0..n * n {
        if p.iter().flatten().all(|&b| b) {
            return true;
        }
        p = (0..n)
            .map(|i| (0..n).map(|j| (0..n).any(|k| p[i][k] && shadow[k][j])).collect())
            .collect();
    }
    false
}

/// The Perron–Frobenius root of a primitive matrix, with a check that it is
/// simple and strictly dominant in modulus.
#[derive(Clone, Debug, Serialize)]
pub struct PerronFrobenius {
    pub eigenvalue: AlgebraicNumber,
    pub simple: bool,
    pub strictly_dominant: bool,
}

pub fn perron_frobenius(m: &IntMatrix) -> Result<PerronFrobenius> {
    if !is_primitive(m) {
        return Err(Error::Precondition("subdivision matrix is not primitive".into()));
    }
    let cp = char_poly(&m.to_rat())?;
    let mut roots = Vec::new();
    for (f, e) in factor_rational(&cp)? {
        for r in AlgebraicNumber::all_roots(&f)? {
            roots.push((r, e));
        }
    }
    let mut best: Option<(AlgebraicNumber, usize)> = None;
    for (r, e) in &roots {
        if !r.is_real() || r.approx().0 <= 0.0 {
            continue;
        }
        best = match best {
            Some((b, be)) if r.cmp_modulus(&b)? != std::cmp::Ordering::Greater => Some((b, be)),
            _ => Some((r.clone(), *e)),
        };
    }
    let (pf, mult) = best.ok_or_else(|| Error::Internal("primitive matrix without a positive eigenvalue".into()))?;
    let mut dominant = true;
    for (r, _) in &roots {
        if *r != pf && r.cmp_modulus(&pf)? != std::cmp::Ordering::Less {
            dominant = false;
        }
    }
    Ok(PerronFrobenius { eigenvalue: pf, simple: mult == 1, strictly_dominant: dominant })
}

/// Volume expansion of a rule versus `|det φ|`.
#[derive(Clone, Debug, Serialize)]
pub struct VolumeReport {
    pub pf_eigenvalue: f64,
    pub abs_det: f64,
    pub difference: f64,
    pub consistent: bool,
}

pub const VOLUME_TOLERANCE: f64 = 1e-9;

pub fn volume_consistency(rule: &SubstitutionRule) -> Result<VolumeReport> {
    let pf = perron_frobenius(&subdivision_matrix(rule))?;
    let pf_value = to_f64(&pf.eigenvalue.ball(80)?.center.re);
    let abs_det = rule.abs_det()?;
    let difference = (pf_value - abs_det).abs();
    Ok(VolumeReport { pf_eigenvalue: pf_value, abs_det, difference, consistent: difference <= VOLUME_TOLERANCE })
}

/// Placed tiles: `(type, translation)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Patch {
    pub tiles: Vec<(usize, Vector)>,
    pub level: u32,
}

impl Patch {
    /// A single tile of the given type at the origin.
    pub fn seed(rule: &SubstitutionRule, tile: usize) -> Patch {
        Patch { tiles: vec![(tile, rule.zero_vector())], level: 0 }
    }

    /// Number of tiles of each type.
    pub fn counts(&self, types: usize) -> Vec<usize> {
        let mut c = vec![0; types];
        for (t, _) in &self.tiles {
            c[*t] += 1;
        }
        c
    }
}

/// Replaces every tile `(t, v)` by its children `(t_j, φv + d_j)`, `k`
/// times. Tiles keep the order of their parents.
pub fn expand_patch(rule: &SubstitutionRule, patch: &Patch, k: u32) -> Result<Patch> {
    let mut cur = patch.clone();
    for _ in 0..k {
        let mut tiles = Vec::new();
        let mut seen = HashSet::new();
        for (t, v) in &cur.tiles {
            let base = rule.expansion.mul_vec(v);
            for c in &rule.tiles[*t].children {
                let pos = add_vectors(&base, &c.offset);
                if !seen.insert((c.tile, pos.clone())) {
                    return Err(Error::Input(format!(
                        "two tiles of type {} at the same position after subdivision",
                        rule.tiles[c.tile].name
                    )));
                }
                tiles.push((c.tile, pos));
            }
        }
        cur = Patch { tiles, level: cur.level + 1 };
    }
    Ok(cur)
}

/// Exact control point of each tile type: `φ c_i = c_σ(i) + d_i`, where
/// `σ(i)` and `d_i` are the type and offset of the control child.
pub fn control_points(rule: &SubstitutionRule) -> Result<Vec<Vector>> {
    let k = rule.tiles.len();
    let phi = &rule.expansion;
    let phi_inv = phi.inverse()?;
    let sigma = |i: usize| rule.tiles[i].children[rule.tiles[i].control_child].tile;
    let offset = |i: usize| &rule.tiles[i].children[rule.tiles[i].control_child].offset;
    let mut c: Vec<Option<Vector>> = vec![None; k];

    for start in 0..k {
        if c[start].is_some() {
            continue;
        }
        // walk until a type repeats or reaches a solved one
        let mut path = vec![start];
        let mut pos: HashMap<usize, usize> = HashMap::from([(start, 0)]);
        let mut next = sigma(start);
        while c[next].is_none() && !pos.contains_key(&next) {
            pos.insert(next, path.len());
            path.push(next);
            next = sigma(next);
        }
        let tail_end = if c[next].is_none() {
            // cycle path[j..]
            let j = pos[&next];
            let cycle = &path[j..];
            let len = cycle.len() as u32;
            let mut rhs = rule.zero_vector();
            for (idx, &t) in cycle.iter().enumerate() {
                let term = phi.pow(len - 1 - idx as u32).mul_vec(offset(t));
                rhs = add_vectors(&rhs, &term);
            }
            let lhs = phi.pow(len).sub(&FieldMatrix::identity(rule.field(), rule.dimension()));
            let c0 = lhs
                .solve(&rhs)?
                .ok_or_else(|| Error::Internal("φ^k - I is singular for an expanding φ".into()))?;
            let mut cur = c0;
            for &t in cycle {
                c[t] = Some(cur.clone());
                cur = sub_vectors(&phi.mul_vec(&cur), offset(t));
            }
            j
        } else {
            path.len()
        };
        for &t in path[..tail_end].iter().rev() {
            let target = c[sigma(t)].as_ref().expect("solved child").clone();
            c[t] = Some(phi_inv.mul_vec(&add_vectors(&target, offset(t))));
        }
    }
    Ok(c.into_iter().map(|v| v.expect("all types solved")).collect())
}

/// Control points of the tiles of a patch.
pub fn patch_control_points(patch: &Patch, cps: &[Vector]) -> Vec<Vector> {
    patch.tiles.iter().map(|(t, v)| add_vectors(v, &cps[*t])).collect()
}

/// For every tile of the level-`k` patch of every seed type, `φ` of its
/// control point is a control point of the level-`k+1` patch.
pub fn verify_control_invariance(rule: &SubstitutionRule, k: u32) -> Result<bool> {
    let cps = control_points(rule)?;
    for s in 0..rule.tiles.len() {
        let pk = expand_patch(rule, &Patch::seed(rule, s), k)?;
        let pk1 = expand_patch(rule, &pk, 1)?;
        let next: HashSet<Vector> = patch_control_points(&pk1, &cps).into_iter().collect();
        for p in patch_control_points(&pk, &cps) {
            if !next.contains(&rule.expansion.mul_vec(&p)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn invert_f64(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(piv, col);
        let p = a[col][col];
        a[col].iter_mut().for_each(|x| *x /= p);
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                let pivot_row = a[col].clone();
                a[r].iter_mut().zip(&pivot_row).for_each(|(x, y)| *x -= f * y);
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Drawable outlines of a planar patch: each seed polygon translated to its
/// tile and pulled back by `φ^-level`, so the patch has the size of the
/// seed tile.
pub fn patch_polygons(rule: &SubstitutionRule, patch: &Patch) -> Result<Vec<(usize, Vec<[f64; 2]>)>> {
    if rule.field.real_dim() != 2 {
        return Err(Error::Precondition("drawing needs a planar rule".into()));
    }
    let inv = invert_f64(&rule.real_matrix()?).ok_or_else(|| Error::Internal("singular expansion".into()))?;
    let mut scale = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    for _ in 0..patch.level {
        scale = (0..2)
            .map(|i| (0..2).map(|j| (0..2).map(|k| scale[i][k] * inv[k][j]).sum()).collect())
            .collect();
    }
    let apply = |p: [f64; 2]| [scale[0][0] * p[0] + scale[0][1] * p[1], scale[1][0] * p[0] + scale[1][1] * p[1]];
    let mut out = Vec::new();
    for (t, v) in &patch.tiles {
        let Some(poly) = &rule.tiles[*t].seed_polygon else {
            continue;
        };
        let off = rule.embed_vector(v)?;
        out.push((*t, poly.iter().map(|p| apply([p[0] + off[0], p[1] + off[1]])).collect()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::IntPoly;

    /// Fibonacci: a -> a + (b at θ), b -> a, with φ = θ, θ² = θ + 1.
    pub(crate) fn fibonacci() -> SubstitutionRule {
        let k = NumberField::new(IntPoly::from_i64(&[-1, -1, 1])).unwrap();
        let e = AlgebraicNumber::nearest(&k.min_poly().to_rat(), (1.618, 0.0)).unwrap();
        let spec = NumberFieldSpec::new(k.clone(), vec![e]).unwrap();
        let t = FieldElem::theta(&k);
        let z = FieldElem::zero(&k);
        let tiles = vec![
            TileType {
                name: "a".into(),
                children: vec![Child { tile: 0, offset: vec![z.clone()] }, Child { tile: 1, offset: vec![t.clone()] }],
                control_child: 0,
                seed_polygon: None,
            },
            TileType {
                name: "b".into(),
                children: vec![Child { tile: 0, offset: vec![z] }],
                control_child: 0,
                seed_polygon: None,
            },
        ];
        SubstitutionRule::new(spec, FieldMatrix::diagonal(vec![t]), tiles).unwrap()
    }

    fn doubling(offsets: &[i64]) -> SubstitutionRule {
        let k = NumberField::rationals();
        let e = AlgebraicNumber::all_roots(&k.min_poly().to_rat()).unwrap()[0].clone();
        let spec = NumberFieldSpec::new(k.clone(), vec![e]).unwrap();
        let tiles = vec![TileType {
            name: "T".into(),
            children: offsets.iter().map(|&o| Child { tile: 0, offset: vec![FieldElem::from_i64(&k, o)] }).collect(),
            control_child: 0,
            seed_polygon: None,
        }];
        SubstitutionRule::new(spec, FieldMatrix::diagonal(vec![FieldElem::from_i64(&k, 2)]), tiles).unwrap()
    }

    #[test]
    fn fibonacci_expansion() {
        let r = fibonacci();
        let k = r.field().clone();
        let p = expand_patch(&r, &Patch::seed(&r, 0), 2).unwrap();
        let t = FieldElem::theta(&k);
        let one = FieldElem::one(&k);
        assert_eq!(p.level, 2);
        assert_eq!(
            p.tiles,
            vec![(0, vec![FieldElem::zero(&k)]), (1, vec![t.clone()]), (0, vec![&t + &one])]
        );
        assert_eq!(expand_patch(&r, &p, 0).unwrap(), p);
    }

    #[test]
    fn fibonacci_control_points_are_zero() {
        let r = fibonacci();
        let c = control_points(&r).unwrap();
        assert!(c.iter().all(|v| v[0].is_zero()));
        assert!(verify_control_invariance(&r, 3).unwrap());
    }

    #[test]
    fn halving_control_point() {
        // c = (c + 1) / 2  =>  c = 1
        let r = doubling(&[1, 2]);
        let c = control_points(&r).unwrap();
        assert_eq!(c[0][0], FieldElem::one(r.field()));
        assert_eq!(subdivision_matrix(&r), IntMatrix::from_i64(&[&[2]]));
    }

    #[test]
    fn primitivity() {
        assert!(is_primitive(&IntMatrix::from_i64(&[&[0, 1, 1], &[0, 4, 1], &[3, 0, 0]])));
        assert!(!is_primitive(&IntMatrix::from_i64(&[&[1, 0], &[0, 1]])));
        assert!(!is_primitive(&IntMatrix::from_i64(&[&[0, 1], &[1, 0]])));
    }

    #[test]
    fn fibonacci_volume() {
        let v = volume_consistency(&fibonacci()).unwrap();
        assert!(v.consistent);
        assert!((v.pf_eigenvalue - 1.618033988749895).abs() < 1e-12);
    }

    #[test]
    fn duplicate_tiles_rejected() {
        let r = doubling(&[0, 0]);
        assert!(matches!(expand_patch(&r, &Patch::seed(&r, 0), 1), Err(Error::Input(_))));
    }

    #[test]
    fn not_expanding_rejected() {
        let k = NumberField::rationals();
        let e = AlgebraicNumber::all_roots(&k.min_poly().to_rat()).unwrap()[0].clone();
        let spec = NumberFieldSpec::new(k.clone(), vec![e]).unwrap();
        let tiles = vec![TileType {
            name: "T".into(),
            children: vec![Child { tile: 0, offset: vec![FieldElem::zero(&k)] }],
            control_child: 0,
            seed_polygon: None,
        }];
        let r = SubstitutionRule::new(spec, FieldMatrix::diagonal(vec![FieldElem::one(&k)]), tiles);
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}
