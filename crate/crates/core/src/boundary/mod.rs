//! Reduced words in a free group, endomorphisms, and boundary polylines.
//!
//! Letters are lowercase ASCII; an uppercase letter is the inverse. The
//! commutator `[x,y]` is `x y x⁻¹ y⁻¹`. A word traces a path by adding the
//! vector of each letter (subtracting it for an inverse). If `ψ` is
//! compatible with `φ` (the letter vectors of `ψ(x)` sum to `φ·vec(x)`),
//! the paths of `φ^-n ψ^n(w)` converge to a boundary curve.

use crate::numbers::{FieldElem, FieldMatrix, NumberFieldSpec};
use crate::substitution::{add_vectors, Vector};
use crate::{Error, Result};

/// Default cap on the length of iterated words.
pub const LETTER_BUDGET: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub id: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn inv(self) -> Letter {
        Letter { id: self.id, inverse: !self.inverse }
    }
}

/// Ordered generator names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<char>,
}

impl Alphabet {
    pub fn new(names: Vec<char>) -> Result<Alphabet> {
        for (i, c) in names.iter().enumerate() {
            if !c.is_ascii_lowercase() {
                return Err(Error::Input(format!("letter {c:?} must be a lowercase ASCII letter")));
            }
            if names[..i].contains(c) {
                return Err(Error::Input(format!("letter {c:?} declared twice")));
            }
        }
        Ok(Alphabet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[char] {
        &self.names
    }

    pub fn letter(&self, c: char) -> Result<Letter> {
        let lower = c.to_ascii_lowercase();
        self.names
            .iter()
            .position(|&n| n == lower)
            .map(|id| Letter { id, inverse: c.is_ascii_uppercase() })
            .ok_or_else(|| Error::Input(format!("unknown letter {c:?}")))
    }

    /// Parses letters and commutators `[u,v]` (with `u`, `v` words) into a
    /// reduced word.
    pub fn parse(&self, s: &str) -> Result<Word> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let w = self.parse_seq(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(Error::Input(format!("unexpected {:?} at position {pos} in word {s:?}", chars[pos])));
        }
        Ok(w)
    }

    fn parse_seq(&self, s: &[char], pos: &mut usize) -> Result<Word> {
        let mut out: Vec<Letter> = Vec::new();
        while *pos < s.len() {
            match s[*pos] {
                '[' => {
                    *pos += 1;
                    let u = self.parse_seq(s, pos)?;
                    if s.get(*pos) != Some(&',') {
                        return Err(Error::Input(format!("expected ',' at position {pos} in commutator")));
                    }
                    *pos += 1;
                    let v = self.parse_seq(s, pos)?;
                    if s.get(*pos) != Some(&']') {
                        return Err(Error::Input(format!("expected ']' at position {pos} in commutator")));
                    }
                    *pos += 1;
                    out.extend_from_slice(&u.commutator(&v).0);
                }
                ',' | ']' => break,
                c => {
                    out.push(self.letter(c)?);
                    *pos += 1;
                }
            }
        }
        Ok(reduce(&out))
    }

    pub fn format(&self, w: &Word) -> String {
        w.0.iter()
            .map(|l| {
                let c = self.names[l.id];
                if l.inverse {
                    c.to_ascii_uppercase()
                } else {
                    c
                }
            })
            .collect()
    }
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    /// Reduced product `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        reduce(&v)
    }

    /// `[self, other] = self · other · self⁻¹ · other⁻¹`.
    pub fn commutator(&self, other: &Word) -> Word {
        self.concat(other).concat(&self.inverse()).concat(&other.inverse())
    }
}

/// Free reduction with a stack.
pub fn reduce(letters: &[Letter]) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

/// A free-group endomorphism given by the images of the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endomorphism {
    images: Vec<Word>,
}

impl Endomorphism {
    pub fn new(images: Vec<Word>) -> Result<Endomorphism> {
        let k = images.len();
        if images.iter().flat_map(|w| w.letters()).any(|l| l.id >= k) {
            return Err(Error::Input("endomorphism image uses an undeclared letter".into()));
        }
        Ok(Endomorphism { images })
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    /// `A[x][y]` = signed count of letter `x` in `ψ(y)`, so that
    /// `Ab(ψ(w)) = A · Ab(w)`.
    pub fn letter_count_matrix(&self) -> Vec<Vec<i64>> {
        let k = self.rank();
        let mut a = vec![vec![0; k]; k];
        for (y, img) in self.images.iter().enumerate() {
            for (x, c) in abelianize(img, k).into_iter().enumerate() {
                a[x][y] = c;
            }
        }
        a
    }
}

/// `ψ(w)`, reduced.
pub fn apply_endo(psi: &Endomorphism, w: &Word) -> Word {
    apply_endo_bounded(psi, w, usize::MAX).expect("unbounded")
}

/// `ψ(w)` with a cap on the unreduced length.
pub fn apply_endo_bounded(psi: &Endomorphism, w: &Word, budget: usize) -> Result<Word> {
    let total: usize = w.letters().iter().map(|l| psi.images[l.id].len()).sum();
    if total > budget {
        return Err(Error::Precision(format!("word would exceed the letter budget of {budget}")));
    }
    let mut out = Vec::with_capacity(total);
    for l in w.letters() {
        let img = &psi.images[l.id];
        if l.inverse {
            out.extend(img.letters().iter().rev().map(|x| x.inv()));
        } else {
            out.extend_from_slice(img.letters());
        }
    }
    Ok(reduce(&out))
}

/// Signed letter counts.
pub fn abelianize(w: &Word, rank: usize) -> Vec<i64> {
    let mut v = vec![0; rank];
    for l in w.letters() {
        v[l.id] += if l.inverse { -1 } else { 1 };
    }
    v
}

/// Letter vectors in a number field, together with the expansion `φ`.
#[derive(Clone, Debug)]
pub struct VectorAssignment {
    pub field: NumberFieldSpec,
    pub expansion: FieldMatrix,
    pub vectors: Vec<Vector>,
}

impl VectorAssignment {
    pub fn new(field: NumberFieldSpec, expansion: FieldMatrix, vectors: Vec<Vector>) -> Result<Self> {
        let n = field.axes();
        if expansion.dim() != n || vectors.iter().any(|v| v.len() != n) {
            return Err(Error::Shape(format!("letter vectors and expansion must have {n} coordinates")));
        }
        Ok(VectorAssignment { field, expansion, vectors })
    }

    /// Exact `Σ count_x · vec(x)`.
    pub fn sum_counts(&self, counts: &[i64]) -> Vector {
        let k = &self.field.field;
        let mut acc = vec![FieldElem::zero(k); self.field.axes()];
        for (c, v) in counts.iter().zip(&self.vectors) {
            if *c != 0 {
                let scaled: Vector = v.iter().map(|x| x.scale(&num_rational::BigRational::from_integer((*c).into()))).collect();
                acc = add_vectors(&acc, &scaled);
            }
        }
        acc
    }

    /// Exact endpoint of the path of `w` starting at the origin.
    pub fn endpoint(&self, w: &Word) -> Vector {
        self.sum_counts(&abelianize(w, self.vectors.len()))
    }
}

/// Letters `x` for which `Σ vec(ψ(x)) ≠ φ · vec(x)`.
pub fn compatibility_failures(assign: &VectorAssignment, psi: &Endomorphism) -> Vec<usize> {
    (0..psi.rank())
        .filter(|&x| assign.endpoint(&psi.images[x]) != assign.expansion.mul_vec(&assign.vectors[x]))
        .collect()
}

pub fn check_compatibility(assign: &VectorAssignment, psi: &Endomorphism) -> bool {
    assign.vectors.len() == psi.rank() && compatibility_failures(assign, psi).is_empty()
}

/// The `n`-th approximant of a boundary curve.
#[derive(Clone, Debug)]
pub struct Curve {
    /// Vertices in real coordinates; the first is the origin.
    pub points: Vec<Vec<f64>>,
    /// Length of `ψ^n(w)`.
    pub letters: usize,
    /// Exact endpoint check in field arithmetic.
    pub closed: bool,
}

/// Path of `φ^-n ψ^n(w)`. The word must be closed (its path returns to the
/// start exactly) and `ψ` compatible with `φ`.
pub fn boundary_curve(assign: &VectorAssignment, psi: &Endomorphism, w: &Word, iters: u32) -> Result<Curve> {
    boundary_curve_with_budget(assign, psi, w, iters, LETTER_BUDGET)
}

pub fn boundary_curve_with_budget(
    assign: &VectorAssignment,
    psi: &Endomorphism,
    w: &Word,
    iters: u32,
    budget: usize,
) -> Result<Curve> {
    if assign.vectors.len() != psi.rank() {
        return Err(Error::Shape("letter vectors and endomorphism have different alphabets".into()));
    }
    if !check_compatibility(assign, psi) {
        return Err(Error::Domain("the endomorphism is not compatible with the expansion".into()));
    }
    if assign.endpoint(w).iter().any(|x| !x.is_zero()) {
        return Err(Error::Domain("the word is not closed: its path does not return to the start".into()));
    }
    let mut cur = w.clone();
    for _ in 0..iters {
        cur = apply_endo_bounded(psi, &cur, budget)?;
    }
    let closed = assign.endpoint(&cur).iter().all(FieldElem::is_zero);

    // exact φ^-n applied to each letter vector, then embedded once
    let inv = assign.expansion.inverse()?.pow(iters);
    let steps: Vec<Vec<f64>> = assign
        .vectors
        .iter()
        .map(|v| assign.field.embed_vector(&inv.mul_vec(v)))
        .collect::<Result<_>>()?;
    let dim = assign.field.real_dim();
    let mut p = vec![0.0; dim];
    let mut points = Vec::with_capacity(cur.len() + 1);
    points.push(p.clone());
    for l in cur.letters() {
        let s = &steps[l.id];
        for (pi, si) in p.iter_mut().zip(s) {
            if l.inverse {
                *pi -= si;
            } else {
                *pi += si;
            }
        }
        points.push(p.clone());
    }
    if closed {
        // the exact endpoint is the origin; drop accumulated rounding
        *points.last_mut().unwrap() = vec![0.0; dim];
    }
    Ok(Curve { points, letters: cur.len(), closed })
}
