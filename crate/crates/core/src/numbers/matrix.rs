//! Small dense matrices over Q and Z.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::{IntPoly, RatPoly};
use crate::{Error, Result};

/// Row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: Vec<Vec<BigRational>>,
    ncols: usize,
}

/// Row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: Vec<Vec<BigInt>>,
    ncols: usize,
}

impl RatMatrix {
    pub fn new(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        Ok(RatMatrix { rows, ncols })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
                .collect(),
        )
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        RatMatrix { rows: vec![vec![BigRational::zero(); m]; n], ncols: m }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i][i] = BigRational::one();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.nrows())
        } else {
            Err(Error::Shape(format!(
                "expected a square matrix, got {}x{}",
                self.nrows(),
                self.ncols
            )))
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(Zero::is_zero)
    }

    pub fn trace(&self) -> BigRational {
        (0..self.nrows().min(self.ncols)).map(|i| self.rows[i][i].clone()).sum()
    }

    pub fn mul(&self, o: &RatMatrix) -> Result<RatMatrix> {
        if self.ncols != o.nrows() {
            return Err(Error::Shape("matrix product dimension mismatch".into()));
        }
        let mut out = Self::zeros(self.nrows(), o.ncols);
        for i in 0..self.nrows() {
            for k in 0..self.ncols {
                let a = &self.rows[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.ncols {
                    out.rows[i][j] += a * &o.rows[k][j];
                }
            }
        }
        Ok(out)
    }

    pub fn add_scaled_identity(&self, s: &BigRational) -> RatMatrix {
        let mut out = self.clone();
        for i in 0..self.nrows().min(self.ncols) {
            out.rows[i][i] += s;
        }
        out
    }

    /// Evaluates `p(A)` by Horner's rule.
    pub fn eval_poly(&self, p: &RatPoly) -> Result<RatMatrix> {
        let n = self.require_square()?;
        let mut acc = RatMatrix::zeros(n, n);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self)?.add_scaled_identity(c);
        }
        Ok(acc)
    }

    /// Determinant by fraction-based Gaussian elimination.
    pub fn det(&self) -> Result<BigRational> {
        let n = self.require_square()?;
        let mut a = self.rows.clone();
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Ok(BigRational::zero());
            };
            if piv != col {
                a.swap(piv, col);
                det = -det;
            }
            let p = a[col][col].clone();
            det *= &p;
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = &a[r][col] / &p;
                for c in col..n {
                    let t = &f * &a[col][c];
                    a[r][c] -= t;
                }
            }
        }
        Ok(det)
    }

    /// Companion matrix of a monic polynomial: ones on the subdiagonal and
    /// the negated low coefficients in the last column.
    pub fn companion(p: &RatPoly) -> Result<RatMatrix> {
        if !p.is_monic() {
            return Err(Error::Precondition(format!("companion matrix needs a monic polynomial, got {p}")));
        }
        let d = p.degree().unwrap();
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            if i + 1 < d {
                m.rows[i + 1][i] = BigRational::one();
            }
            m.rows[i][d - 1] = -p.coeff(i);
        }
        Ok(m)
    }

    /// Kronecker product, used as an independent route to composed products.
    pub fn kronecker(&self, o: &RatMatrix) -> RatMatrix {
        let (n1, m1, n2, m2) = (self.nrows(), self.ncols, o.nrows(), o.ncols);
        let mut out = Self::zeros(n1 * n2, m1 * m2);
        for i in 0..n1 {
            for j in 0..m1 {
                for k in 0..n2 {
                    for l in 0..m2 {
                        out.rows[i * n2 + k][j * m2 + l] = &self.rows[i][j] * &o.rows[k][l];
                    }
                }
            }
        }
        out
    }

    /// Integer matrix when all entries are integral.
    pub fn to_int(&self) -> Option<IntMatrix> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        Some(IntMatrix { rows, ncols: self.ncols })
    }
}

/// Characteristic polynomial `det(xI - A)` by the Faddeev-LeVerrier
/// recurrence; every division is by an integer `k`, so the computation stays
/// exact over Q.
pub fn char_poly(a: &RatMatrix) -> Result<RatPoly> {
    let n = a.require_square()?;
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut m = RatMatrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        m = a.mul(&m)?.add_scaled_identity(&coeffs[n - k + 1]);
        let am = a.mul(&m)?;
        coeffs[n - k] = -am.trace() / BigRational::from_integer(k.into());
    }
    Ok(RatPoly::new(coeffs))
}

impl IntMatrix {
    pub fn new(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        Ok(IntMatrix { rows, ncols })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::new(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
            .expect("rectangular literal")
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        IntMatrix { rows: vec![vec![BigInt::zero(); m]; n], ncols: m }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.rows[i][j] = v;
    }

    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
                .collect(),
            ncols: self.ncols,
        }
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.rows.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Companion matrix of a monic integer polynomial.
    pub fn companion(p: &IntPoly) -> Result<IntMatrix> {
        Ok(RatMatrix::companion(&p.to_rat())?.to_int().expect("integer companion"))
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(blocks: &[IntMatrix]) -> IntMatrix {
        let n: usize = blocks.iter().map(IntMatrix::nrows).sum();
        let mut out = IntMatrix::zeros(n, n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    out.rows[off + i][off + j] = b.rows[i][j].clone();
                }
            }
            off += b.nrows();
        }
        out
    }

    pub fn det(&self) -> Result<BigInt> {
        Ok(self.to_rat().det()?.to_integer())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// Entries as decimal strings, row by row.
impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(BigInt::to_string).collect()).collect();
        rows.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_poly_fibonacci() {
        let a = RatMatrix::from_i64(&[&[0, 1], &[1, 1]]).unwrap();
        assert_eq!(char_poly(&a).unwrap(), RatPoly::from_i64(&[-1, -1, 1]));
    }

    #[test]
    fn char_poly_subdivision_matrix() {
        // cofactor expansion of det(xI - A) gives x^3 - 4x^2 - 3x + 9
        let a = RatMatrix::from_i64(&[&[0, 1, 1], &[0, 4, 1], &[3, 0, 0]]).unwrap();
        assert_eq!(char_poly(&a).unwrap(), RatPoly::from_i64(&[9, -3, -4, 1]));
    }

    #[test]
    fn char_poly_identity() {
        let p = char_poly(&RatMatrix::identity(3)).unwrap();
        assert_eq!(p, RatPoly::from_i64(&[-1, 1]).pow(3));
    }

    #[test]
    fn char_poly_rejects_non_square() {
        let a = RatMatrix::from_i64(&[&[1, 2, 3], &[4, 5, 6]]).unwrap();
        assert!(matches!(char_poly(&a), Err(Error::Shape(_))));
    }

    #[test]
    fn cayley_hamilton_and_det() {
        let a = RatMatrix::from_i64(&[&[2, 1, 0], &[-1, 3, 4], &[5, 0, 1]]).unwrap();
        let p = char_poly(&a).unwrap();
        assert!(a.eval_poly(&p).unwrap().is_zero());
        // constant term of det(xI - A) is (-1)^n det A
        assert_eq!(p.coeff(0), -a.det().unwrap());
    }

    #[test]
    fn companion_has_its_polynomial_as_char_poly() {
        let p = RatPoly::from_i64(&[3, -4, -1, 1]);
        let c = RatMatrix::companion(&p).unwrap();
        assert_eq!(char_poly(&c).unwrap(), p);
        let fib = IntMatrix::companion(&IntPoly::from_i64(&[-1, -1, 1])).unwrap();
        assert_eq!(fib, IntMatrix::from_i64(&[&[0, 1], &[1, 1]]));
    }
}
