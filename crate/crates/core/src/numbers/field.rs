//! Arithmetic in `Q(θ) = Q[x]/(p)` and per-axis numeric embeddings.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use super::{pow2_neg, rational_to_string, AlgebraicNumber, ComplexBall, IntPoly, RatPoly};
use crate::{Error, Result};

/// A number field given by a monic irreducible integer polynomial.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct NumberField {
    min_poly: IntPoly,
    min_poly_rat: RatPoly,
}

impl NumberField {
    /// Checks monicity and irreducibility.
    pub fn new(min_poly: IntPoly) -> Result<Arc<NumberField>> {
        min_poly.require_monic("field polynomial")?;
        if min_poly.degree().unwrap_or(0) == 0 {
            return Err(Error::Domain("field polynomial must have positive degree".into()));
        }
        let rat = min_poly.to_rat();
        let f = super::factor_rational(&rat)?;
        if f.len() != 1 || f[0].1 != 1 {
            return Err(Error::Domain(format!("field polynomial {min_poly} is not irreducible")));
        }
        Ok(Arc::new(NumberField { min_poly, min_poly_rat: rat }))
    }

    /// The field Q itself, presented as `Q[x]/(x)`.
    pub fn rationals() -> Arc<NumberField> {
        Self::new(IntPoly::from_i64(&[0, 1])).expect("x is irreducible")
    }

    pub fn min_poly(&self) -> &IntPoly {
        &self.min_poly
    }

    pub fn degree(&self) -> usize {
        self.min_poly.degree().unwrap()
    }
}

/// Element of a [`NumberField`], stored as its reduced coefficient vector
/// (constant first, always of length `degree`).
#[derive(Clone, Debug)]
pub struct FieldElem {
    field: Arc<NumberField>,
    coeffs: Vec<BigRational>,
}

impl PartialEq for FieldElem {
    fn eq(&self, o: &Self) -> bool {
        self.coeffs == o.coeffs && (Arc::ptr_eq(&self.field, &o.field) || self.field == o.field)
    }
}

impl Eq for FieldElem {}

impl Hash for FieldElem {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.coeffs.hash(h);
    }
}

impl FieldElem {
    /// Reduces an arbitrary polynomial in θ.
    pub fn from_poly(field: &Arc<NumberField>, p: &RatPoly) -> FieldElem {
        let r = p.rem(&field.min_poly_rat);
        let d = field.degree();
        FieldElem { field: field.clone(), coeffs: (0..d).map(|i| r.coeff(i)).collect() }
    }

    /// From a coefficient vector of any length (constant first).
    pub fn from_coeffs(field: &Arc<NumberField>, coeffs: Vec<BigRational>) -> FieldElem {
        Self::from_poly(field, &RatPoly::new(coeffs))
    }

    pub fn from_rational(field: &Arc<NumberField>, q: BigRational) -> FieldElem {
        Self::from_poly(field, &RatPoly::constant(q))
    }

    pub fn from_i64(field: &Arc<NumberField>, n: i64) -> FieldElem {
        Self::from_rational(field, BigRational::from_integer(n.into()))
    }

    pub fn zero(field: &Arc<NumberField>) -> FieldElem {
        Self::from_i64(field, 0)
    }

    pub fn one(field: &Arc<NumberField>) -> FieldElem {
        Self::from_i64(field, 1)
    }

    /// The generator θ.
    pub fn theta(field: &Arc<NumberField>) -> FieldElem {
        Self::from_poly(field, &RatPoly::x())
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn to_poly(&self) -> RatPoly {
        RatPoly::new(self.coeffs.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// `Some(q)` when the element is the rational constant `q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.coeffs[1..].iter().all(Zero::is_zero).then(|| &self.coeffs[0])
    }

    fn check_same(&self, o: &FieldElem) {
        assert!(
            Arc::ptr_eq(&self.field, &o.field) || self.field == o.field,
            "field elements from different fields"
        );
    }

    /// Multiplicative inverse via extended Euclid in Q[x].
    pub fn inv(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(Error::Domain("inverse of zero in a number field".into()));
        }
        let (g, s, _) = self.to_poly().ext_gcd(&self.field.min_poly_rat);
        debug_assert!(g.is_one_poly());
        Ok(Self::from_poly(&self.field, &s))
    }

    pub fn pow(&self, e: u32) -> FieldElem {
        let mut acc = Self::one(&self.field);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale(&self, q: &BigRational) -> FieldElem {
        FieldElem { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    /// Characteristic polynomial of multiplication by `self` on `Q(θ)`;
    /// a power of the minimal polynomial of the element.
    pub fn char_poly(&self) -> RatPoly {
        let d = self.field.degree();
        let basis: Vec<FieldElem> = (0..d)
            .map(|i| FieldElem::from_poly(&self.field, &RatPoly::x().pow(i as u32)))
            .collect();
        let rows: Vec<Vec<BigRational>> = (0..d)
            .map(|i| (0..d).map(|j| (self * &basis[j]).coeffs[i].clone()).collect())
            .collect();
        super::char_poly(&super::RatMatrix::new(rows).expect("square")).expect("square")
    }

    /// Monic minimal polynomial over Q.
    pub fn min_poly(&self) -> Result<RatPoly> {
        let cp = self.char_poly();
        let f = super::factor_rational(&cp)?;
        match f.as_slice() {
            [(p, _)] => Ok(p.clone()),
            _ => Err(Error::Internal(format!("characteristic polynomial {cp} of a field element is not a prime power"))),
        }
    }
}

trait IsOnePoly {
    fn is_one_poly(&self) -> bool;
}

impl IsOnePoly for RatPoly {
    fn is_one_poly(&self) -> bool {
        *self == RatPoly::one()
    }
}

impl<'a> Add<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn add(self, o: &FieldElem) -> FieldElem {
        self.check_same(o);
        FieldElem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn sub(self, o: &FieldElem) -> FieldElem {
        self.check_same(o);
        FieldElem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn mul(self, o: &FieldElem) -> FieldElem {
        self.check_same(o);
        FieldElem::from_poly(&self.field, &(&self.to_poly() * &o.to_poly()))
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(rational_to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Inv,
}

/// Applies `op`; `Inv` ignores `b`.
pub fn field_arith(a: &FieldElem, b: &FieldElem, op: FieldOp) -> Result<FieldElem> {
    if !(Arc::ptr_eq(&a.field, &b.field) || a.field == b.field) {
        return Err(Error::Domain("operands live in different number fields".into()));
    }
    Ok(match op {
        FieldOp::Add => a + b,
        FieldOp::Sub => a - b,
        FieldOp::Mul => a * b,
        FieldOp::Inv => a.inv()?,
    })
}

/// Evaluates `a` at the embedded root with certified error at most
/// `precision` (the root disc is refined as needed).
pub fn embed(a: &FieldElem, embedding: &AlgebraicNumber, precision: &BigRational) -> Result<ComplexBall> {
    if embedding.min_poly() != &a.field.min_poly_rat {
        return Err(Error::Domain("embedding does not select a root of the field polynomial".into()));
    }
    if let Some(q) = a.as_rational() {
        return Ok(ComplexBall::real_exact(q.clone()));
    }
    let mut bits = 64;
    loop {
        let root = embedding.ball(bits)?;
        let mut acc = ComplexBall::real_exact(BigRational::zero());
        for c in a.coeffs.iter().rev() {
            acc = acc.mul(&root).add(&ComplexBall::real_exact(c.clone())).rounded(bits + 16);
        }
        if acc.radius <= *precision {
            return Ok(acc);
        }
        if bits >= super::MAX_PRECISION_BITS {
            return Err(Error::Precision("embedding precision exhausted".into()));
        }
        bits *= 2;
    }
}

/// A number field together with one embedding per coordinate axis.
#[derive(Clone, Debug)]
pub struct NumberFieldSpec {
    pub field: Arc<NumberField>,
    pub embeddings: Vec<AlgebraicNumber>,
}

impl NumberFieldSpec {
    pub fn new(field: Arc<NumberField>, embeddings: Vec<AlgebraicNumber>) -> Result<Self> {
        for e in &embeddings {
            if e.min_poly() != &field.min_poly_rat {
                return Err(Error::Domain(format!(
                    "embedding root is not a root of the field polynomial {}",
                    field.min_poly
                )));
            }
        }
        Ok(NumberFieldSpec { field, embeddings })
    }

    /// Number of coordinate axes.
    pub fn axes(&self) -> usize {
        self.embeddings.len()
    }

    /// Real dimension: one per real axis, two per complex axis.
    pub fn real_dim(&self) -> usize {
        self.embeddings.iter().map(|e| if e.is_real() { 1 } else { 2 }).sum()
    }

    /// Numeric real coordinates of an exact vector (complex axes expand to
    /// two coordinates).
    pub fn embed_vector(&self, v: &[FieldElem]) -> Result<Vec<f64>> {
        let prec = pow2_neg(60);
        let mut out = Vec::with_capacity(self.real_dim());
        for (x, e) in v.iter().zip(&self.embeddings) {
            let b = embed(x, e, &prec)?;
            let (re, im) = b.to_f64();
            out.push(re);
            if !e.is_real() {
                out.push(im);
            }
        }
        Ok(out)
    }
}

/// Square matrix over a number field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldMatrix {
    rows: Vec<Vec<FieldElem>>,
}

impl FieldMatrix {
    pub fn new(rows: Vec<Vec<FieldElem>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("expected a non-empty square matrix".into()));
        }
        Ok(FieldMatrix { rows })
    }

    pub fn identity(field: &Arc<NumberField>, n: usize) -> Self {
        FieldMatrix {
            rows: (0..n)
                .map(|i| (0..n).map(|j| FieldElem::from_i64(field, (i == j) as i64)).collect())
                .collect(),
        }
    }

    /// `diag(d)`.
    pub fn diagonal(d: Vec<FieldElem>) -> Self {
        let field = d[0].field.clone();
        let n = d.len();
        let mut m = Self::identity(&field, n);
        for (i, x) in d.into_iter().enumerate() {
            m.rows[i][i] = x;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElem {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<FieldElem>] {
        &self.rows
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.rows[0][0].field
    }

    pub fn mul_vec(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .zip(v)
                    .fold(FieldElem::zero(self.field()), |acc, (a, b)| &acc + &(a * b))
            })
            .collect()
    }

    pub fn mul(&self, o: &FieldMatrix) -> FieldMatrix {
        let n = self.dim();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(FieldElem::zero(self.field()), |acc, k| &acc + &(&self.rows[i][k] * &o.rows[k][j]))
                    })
                    .collect()
            })
            .collect();
        FieldMatrix { rows }
    }

    pub fn sub(&self, o: &FieldMatrix) -> FieldMatrix {
        FieldMatrix {
            rows: self
                .rows
                .iter()
                .zip(&o.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> FieldMatrix {
        let mut acc = Self::identity(self.field(), self.dim());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(FieldElem::is_zero)
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.dim()).all(|i| (0..i).all(|j| self.rows[i][j].is_zero()))
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.dim()).all(|i| (i + 1..self.dim()).all(|j| self.rows[i][j].is_zero()))
    }

    /// Solves `self * x = b` exactly; `None` when singular.
    pub fn solve(&self, b: &[FieldElem]) -> Result<Option<Vec<FieldElem>>> {
        let n = self.dim();
        let mut a: Vec<Vec<FieldElem>> = self
            .rows
            .iter()
            .zip(b)
            .map(|(r, bi)| {
                let mut row = r.clone();
                row.push(bi.clone());
                row
            })
            .collect();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Ok(None);
            };
            a.swap(piv, col);
            let inv = a[col][col].inv()?;
            for c in col..=n {
                a[col][c] = &a[col][c] * &inv;
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for c in col..=n {
                        let t = &f * &a[col][c];
                        a[r][c] = &a[r][c] - &t;
                    }
                }
            }
        }
        Ok(Some(a.into_iter().map(|mut r| r.pop().unwrap()).collect()))
    }

    /// Inverse, or a domain error when singular.
    pub fn inverse(&self) -> Result<FieldMatrix> {
        let n = self.dim();
        let field = self.field().clone();
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let e: Vec<FieldElem> = (0..n).map(|i| FieldElem::from_i64(&field, (i == j) as i64)).collect();
            cols.push(self.solve(&e)?.ok_or_else(|| Error::Domain("singular matrix".into()))?);
        }
        Ok(FieldMatrix {
            rows: (0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect(),
        })
    }

    pub fn det(&self) -> Result<FieldElem> {
        let n = self.dim();
        let mut a = self.rows.clone();
        let mut det = FieldElem::one(self.field());
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Ok(FieldElem::zero(self.field()));
            };
            if piv != col {
                a.swap(piv, col);
                det = -&det;
            }
            det = &det * &a[col][col];
            let inv = a[col][col].inv()?;
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = &a[r][col] * &inv;
                for c in col..n {
                    let t = &f * &a[col][c];
                    a[r][c] = &a[r][c] - &t;
                }
            }
        }
        Ok(det)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{rat, to_f64};

    fn field(c: &[i64]) -> Arc<NumberField> {
        NumberField::new(IntPoly::from_i64(c)).unwrap()
    }

    #[test]
    fn golden_relation() {
        let k = field(&[-1, -1, 1]);
        let t = FieldElem::theta(&k);
        assert_eq!(&t * &t, &t + &FieldElem::one(&k));
    }

    #[test]
    fn cubic_relation() {
        let k = field(&[1, 1, 0, 1]);
        let t = FieldElem::theta(&k);
        let t2 = &t * &t;
        assert_eq!(&t * &t2, -&(&t + &FieldElem::one(&k)));
    }

    #[test]
    fn inverse_of_sqrt_two() {
        let k = field(&[-2, 0, 1]);
        let t = FieldElem::theta(&k);
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(t.inv().unwrap(), t.scale(&half));
        assert!(matches!(FieldElem::zero(&k).inv(), Err(Error::Domain(_))));
        let via_op = field_arith(&t, &t, FieldOp::Inv).unwrap();
        assert_eq!(via_op, t.scale(&half));
    }

    #[test]
    fn reducible_field_rejected() {
        assert!(NumberField::new(IntPoly::from_i64(&[-1, 0, 1])).is_err());
        assert!(NumberField::new(IntPoly::from_i64(&[1, 2])).is_err());
    }

    #[test]
    fn embeddings_of_real_cubic_field() {
        let k = field(&[3, -4, -1, 1]);
        let roots = AlgebraicNumber::all_roots(&k.min_poly().to_rat()).unwrap();
        let x1 = &roots[2];
        let x2 = &roots[0];
        let prec = pow2_neg(50);
        let t = FieldElem::theta(&k);
        let v = embed(&t, x1, &prec).unwrap();
        assert!((to_f64(&v.center.re) - 2.19869).abs() < 1e-5);
        let seven = FieldElem::from_i64(&k, 7);
        assert_eq!(embed(&seven, x1, &prec).unwrap(), ComplexBall::real_exact(rat(7)));
        // (-1.91223)^2 + 1.91223 = 5.56885
        let w = embed(&(&(&t * &t) - &t), x2, &prec).unwrap();
        assert!((to_f64(&w.center.re) - 5.56885).abs() < 1e-4);
        assert!(w.radius <= prec);
    }

    #[test]
    fn element_min_poly() {
        // (θ - 1) in Q(sqrt 2) has minimal polynomial x^2 + 2x - 1
        let k = field(&[-2, 0, 1]);
        let a = &FieldElem::theta(&k) - &FieldElem::one(&k);
        assert_eq!(a.min_poly().unwrap(), RatPoly::from_i64(&[-1, 2, 1]));
        assert_eq!(FieldElem::from_i64(&k, 3).min_poly().unwrap(), RatPoly::from_i64(&[-3, 1]));
    }

    #[test]
    fn matrix_solve_and_inverse() {
        let k = field(&[-1, -1, 1]);
        let t = FieldElem::theta(&k);
        let one = FieldElem::one(&k);
        let m = FieldMatrix::new(vec![vec![t.clone(), one.clone()], vec![one.clone(), FieldElem::zero(&k)]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), FieldMatrix::identity(&k, 2));
        assert_eq!(m.det().unwrap(), -&one);
    }
}
