//! JSON input formats. Every file carries `"version": 1`. Exact numbers
//! are decimal strings (`"3"`, `"-1/2"`); a field element is either such a
//! string or a coefficient list in the power basis, constant first.
//!
//! Expansion files give a rational `"matrix"` or spectral `"blocks"`. Rule
//! and boundary files share the `"field"`, `"axes"` and `"expansion"` keys.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;

use crate::boundary::{Alphabet, Endomorphism, VectorAssignment, Word};
use crate::expansion::{ExpansionMap, SpectralSpec};
use crate::numbers::{
    parse_rational, AlgebraicNumber, FieldElem, FieldMatrix, IntPoly, NumberField, NumberFieldSpec, RatMatrix,
    RatPoly,
};
use crate::substitution::{Child, SubstitutionRule, TileType, Vector};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Deserialize)]
#[serde(untagged)]
enum ElemJson {
    Scalar(String),
    Coeffs(Vec<String>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RootJson {
    approx: [f64; 2],
    #[serde(default = "one")]
    multiplicity: u32,
}

fn one() -> u32 {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockJson {
    min_poly: Vec<String>,
    roots: Vec<RootJson>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpansionFile {
    version: u32,
    #[serde(default)]
    description: Option<String>,
    matrix: Option<Vec<Vec<String>>>,
    blocks: Option<Vec<BlockJson>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldJson {
    min_poly: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AxisJson {
    approx: [f64; 2],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChildJson {
    tile: String,
    offset: Vec<ElemJson>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TileJson {
    name: String,
    children: Vec<ChildJson>,
    #[serde(default)]
    control_child: usize,
    #[serde(default)]
    seed_polygon: Option<Vec<[f64; 2]>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleFile {
    version: u32,
    #[serde(default)]
    description: Option<String>,
    field: FieldJson,
    axes: Vec<AxisJson>,
    expansion: Vec<Vec<ElemJson>>,
    tiles: Vec<TileJson>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundaryFile {
    version: u32,
    #[serde(default)]
    description: Option<String>,
    field: FieldJson,
    axes: Vec<AxisJson>,
    expansion: Vec<Vec<ElemJson>>,
    letters: BTreeMap<String, Vec<ElemJson>>,
    endomorphism: BTreeMap<String, String>,
    #[serde(default)]
    words: Vec<String>,
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text)
        .map_err(|e| Error::Input(format!("line {}, column {}: {e}", e.line(), e.column())))
}

fn check_version(v: u32) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::Input(format!("unsupported schema version {v} (expected {SCHEMA_VERSION})")));
    }
    Ok(())
}

fn rat_poly(coeffs: &[String], what: &str) -> Result<RatPoly> {
    let c = coeffs
        .iter()
        .map(|s| parse_rational(s))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Input(format!("{what}: {e}")))?;
    let p = RatPoly::new(c);
    if p.degree().unwrap_or(0) == 0 {
        return Err(Error::Input(format!("{what}: polynomial must have positive degree")));
    }
    Ok(p)
}

fn elem(field: &Arc<NumberField>, e: &ElemJson, what: &str) -> Result<FieldElem> {
    let parse = |s: &String| parse_rational(s).map_err(|err| Error::Input(format!("{what}: {err}")));
    Ok(match e {
        ElemJson::Scalar(s) => FieldElem::from_rational(field, parse(s)?),
        ElemJson::Coeffs(c) => {
            if c.len() > field.degree() {
                return Err(Error::Input(format!(
                    "{what}: {} coefficients given for a field of degree {}",
                    c.len(),
                    field.degree()
                )));
            }
            FieldElem::from_coeffs(field, c.iter().map(parse).collect::<Result<_>>()?)
        }
    })
}

fn vector(field: &Arc<NumberField>, v: &[ElemJson], n: usize, what: &str) -> Result<Vector> {
    if v.len() != n {
        return Err(Error::Input(format!("{what}: expected {n} coordinates, got {}", v.len())));
    }
    v.iter().enumerate().map(|(i, e)| elem(field, e, &format!("{what}[{i}]"))).collect()
}

fn field_spec(f: &FieldJson, axes: &[AxisJson]) -> Result<NumberFieldSpec> {
    let p = rat_poly(&f.min_poly, "field.min_poly")?;
    let ip = p
        .to_int_poly()
        .filter(IntPoly::is_monic)
        .ok_or_else(|| Error::Input("field.min_poly must be a monic integer polynomial".into()))?;
    let field = NumberField::new(ip).map_err(|e| Error::Input(format!("field.min_poly: {e}")))?;
    if axes.is_empty() {
        return Err(Error::Input("axes: at least one axis is required".into()));
    }
    let embeddings = axes
        .iter()
        .enumerate()
        .map(|(i, a)| {
            AlgebraicNumber::nearest(&field.min_poly().to_rat(), (a.approx[0], a.approx[1]))
                .map_err(|e| Error::Input(format!("axes[{i}]: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    NumberFieldSpec::new(field, embeddings)
}

fn field_matrix(field: &Arc<NumberField>, rows: &[Vec<ElemJson>], n: usize) -> Result<FieldMatrix> {
    if rows.len() != n {
        return Err(Error::Input(format!("expansion: expected {n} rows, got {}", rows.len())));
    }
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, r)| vector(field, r, n, &format!("expansion[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    FieldMatrix::new(rows)
}

/// Parses an expansion file.
pub fn parse_expansion(text: &str) -> Result<ExpansionMap> {
    let f: ExpansionFile = parse_json(text)?;
    check_version(f.version)?;
    let _ = f.description;
    match (f.matrix, f.blocks) {
        (Some(m), None) => {
            let rows = m
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    r.iter()
                        .map(|s| parse_rational(s).map_err(|e| Error::Input(format!("matrix[{i}]: {e}"))))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let m = RatMatrix::new(rows).map_err(|e| Error::Input(format!("matrix: {e}")))?;
            m.require_square().map_err(|e| Error::Input(format!("matrix: {e}")))?;
            Ok(ExpansionMap::Rational(m))
        }
        (None, Some(blocks)) => {
            let mut sel = Vec::new();
            for (i, b) in blocks.iter().enumerate() {
                let p = rat_poly(&b.min_poly, &format!("blocks[{i}].min_poly"))?;
                sel.push((p, b.roots.iter().map(|r| ((r.approx[0], r.approx[1]), r.multiplicity)).collect()));
            }
            let spec = SpectralSpec::from_selectors(&sel).map_err(|e| match e {
                Error::Domain(m) => Error::Input(m),
                other => other,
            })?;
            Ok(ExpansionMap::BlockSpectral(spec))
        }
        _ => Err(Error::Input("give exactly one of \"matrix\" or \"blocks\"".into())),
    }
}

/// Parses a substitution-rule file.
pub fn parse_rule(text: &str) -> Result<SubstitutionRule> {
    let f: RuleFile = parse_json(text)?;
    check_version(f.version)?;
    let _ = f.description;
    let spec = field_spec(&f.field, &f.axes)?;
    let field = spec.field.clone();
    let n = spec.axes();
    let phi = field_matrix(&field, &f.expansion, n)?;
    let names: Vec<&str> = f.tiles.iter().map(|t| t.name.as_str()).collect();
    let mut tiles = Vec::new();
    for (ti, t) in f.tiles.iter().enumerate() {
        if names[..ti].contains(&t.name.as_str()) {
            return Err(Error::Input(format!("tile name {:?} used twice", t.name)));
        }
        let children = t
            .children
            .iter()
            .enumerate()
            .map(|(ci, c)| {
                let tile = names
                    .iter()
                    .position(|n| *n == c.tile)
                    .ok_or_else(|| Error::Input(format!("tiles[{ti}].children[{ci}]: unknown tile {:?}", c.tile)))?;
                let offset = vector(&field, &c.offset, n, &format!("tiles[{ti}].children[{ci}].offset"))?;
                Ok(Child { tile, offset })
            })
            .collect::<Result<Vec<_>>>()?;
        tiles.push(TileType {
            name: t.name.clone(),
            children,
            control_child: t.control_child,
            seed_polygon: t.seed_polygon.clone(),
        });
    }
    SubstitutionRule::new(spec, phi, tiles)
}

/// A parsed boundary file.
#[derive(Clone, Debug)]
pub struct BoundarySpec {
    pub alphabet: Alphabet,
    pub assignment: VectorAssignment,
    pub endomorphism: Endomorphism,
    /// Words listed in the file, as written and parsed.
    pub words: Vec<(String, Word)>,
}

/// Parses a boundary file.
pub fn parse_boundary(text: &str) -> Result<BoundarySpec> {
    let f: BoundaryFile = parse_json(text)?;
    check_version(f.version)?;
    let _ = f.description;
    let spec = field_spec(&f.field, &f.axes)?;
    let field = spec.field.clone();
    let n = spec.axes();
    let phi = field_matrix(&field, &f.expansion, n)?;

    let mut names = Vec::new();
    for k in f.letters.keys() {
        let mut cs = k.chars();
        match (cs.next(), cs.next()) {
            (Some(c), None) => names.push(c),
            _ => return Err(Error::Input(format!("letters: {k:?} is not a single letter"))),
        }
    }
    let alphabet = Alphabet::new(names)?;
    let vectors = f
        .letters
        .iter()
        .map(|(k, v)| vector(&field, v, n, &format!("letters.{k}")))
        .collect::<Result<Vec<_>>>()?;
    let mut images = Vec::new();
    for &c in alphabet.names() {
        let img = f
            .endomorphism
            .get(&c.to_string())
            .ok_or_else(|| Error::Input(format!("endomorphism: no image for letter {c:?}")))?;
        images.push(alphabet.parse(img).map_err(|e| Error::Input(format!("endomorphism.{c}: {e}")))?);
    }
    if let Some(k) = f.endomorphism.keys().find(|k| !f.letters.contains_key(*k)) {
        return Err(Error::Input(format!("endomorphism: unknown letter {k:?}")));
    }
    let words = f
        .words
        .iter()
        .map(|w| Ok((w.clone(), alphabet.parse(w)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundarySpec {
        assignment: VectorAssignment::new(spec, phi, vectors)?,
        endomorphism: Endomorphism::new(images)?,
        alphabet,
        words,
    })
}
