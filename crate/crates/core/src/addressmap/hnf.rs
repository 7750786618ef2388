//! Row Hermite normal form of integer lattices, built incrementally.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Rows in echelon form: strictly increasing pivot columns, positive
/// pivots, and entries above each pivot reduced into `[0, pivot)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Hnf {
    rows: Vec<Vec<BigInt>>,
}

fn pivot(row: &[BigInt]) -> Option<usize> {
    row.iter().position(|x| !x.is_zero())
}

/// `(g, s, t)` with `g = s a + t b = gcd(a, b) >= 0`.
fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

fn axpy(a: &BigInt, x: &[BigInt], b: &BigInt, y: &[BigInt]) -> Vec<BigInt> {
    x.iter().zip(y).map(|(u, v)| a * u + b * v).collect()
}

impl Hnf {
    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds a vector to the generating set.
    pub fn insert(&mut self, mut x: Vec<BigInt>) {
        let mut i = 0;
        while let Some(c) = pivot(&x) {
            while i < self.rows.len() && pivot(&self.rows[i]).unwrap() < c {
                i += 1;
            }
            if i < self.rows.len() && pivot(&self.rows[i]).unwrap() == c {
                let h = &self.rows[i];
                let (g, s, t) = ext_gcd(&h[c], &x[c]);
                let new_h = axpy(&s, h, &t, &x);
                let new_x = axpy(&(&x[c] / &g), h, &-(&h[c] / &g), &x);
                // new_x has a zero in column c
                self.rows[i] = new_h;
                x = new_x;
                i += 1;
            } else {
                if x[c].is_negative() {
                    x.iter_mut().for_each(|v| *v = -&*v);
                }
                self.rows.insert(i, x);
                break;
            }
        }
        self.normalize();
    }

    fn normalize(&mut self) {
        for j in 0..self.rows.len() {
            let p = pivot(&self.rows[j]).unwrap();
            if self.rows[j][p].is_negative() {
                self.rows[j].iter_mut().for_each(|v| *v = -&*v);
            }
            let pv = self.rows[j][p].clone();
            for i in 0..j {
                let q = self.rows[i][p].div_floor(&pv);
                if !q.is_zero() {
                    let rj = self.rows[j].clone();
                    self.rows[i].iter_mut().zip(&rj).for_each(|(a, b)| *a -= &q * b);
                }
            }
        }
    }

    /// Integer coefficients `a` with `x = Σ a_j rows[j]`, if `x` is in the
    /// lattice.
    pub fn coordinates(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut x = x.to_vec();
        let mut out = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            let p = pivot(r).unwrap();
            let (q, rem) = x[p].div_rem(&r[p]);
            if !rem.is_zero() {
                return None;
            }
            x.iter_mut().zip(r).for_each(|(a, b)| *a -= &q * b);
            out.push(q);
        }
        x.iter().all(Zero::is_zero).then_some(out)
    }
}
