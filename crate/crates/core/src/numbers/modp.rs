//! Polynomials over a prime field F_p (p < 2^63) and Cantor-Zassenhaus
//! factorisation. Only used as a stepping stone for factoring over Z.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Fp(pub u64);

/// Constant-first coefficient vector, no trailing zeros.
pub(crate) type PolyP = Vec<u64>;

impl Fp {
    fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.0 as u128) as u64
    }

    fn add(self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.0 as u128) as u64
    }

    fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.0 - (b - a)
        }
    }

    fn pow(self, mut b: u64, mut e: u64) -> u64 {
        let mut acc = 1u64 % self.0;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    fn inv(self, a: u64) -> u64 {
        self.pow(a, self.0 - 2)
    }

    fn trim(v: &mut PolyP) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn monic(self, a: &PolyP) -> PolyP {
        match a.last() {
            None => Vec::new(),
            Some(&lc) => {
                let inv = self.inv(lc);
                a.iter().map(|&c| self.mul(c, inv)).collect()
            }
        }
    }

    pub fn mul_poly(self, a: &PolyP, b: &PolyP) -> PolyP {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.add(out[i + j], self.mul(x, y));
            }
        }
        Self::trim(&mut out);
        out
    }

    fn sub_poly(self, a: &PolyP, b: &PolyP) -> PolyP {
        let n = a.len().max(b.len());
        let mut out: PolyP = (0..n)
            .map(|i| self.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
            .collect();
        Self::trim(&mut out);
        out
    }

    pub fn div_rem(self, a: &PolyP, d: &PolyP) -> (PolyP, PolyP) {
        let dd = d.len() - 1;
        if a.len() <= dd {
            return (Vec::new(), a.clone());
        }
        let inv = self.inv(d[dd]);
        let mut rem = a.clone();
        let mut quot = vec![0u64; a.len() - dd];
        for i in (0..quot.len()).rev() {
            let q = self.mul(rem[i + dd], inv);
            if q != 0 {
                for (j, &dc) in d.iter().enumerate() {
                    rem[i + j] = self.sub(rem[i + j], self.mul(q, dc));
                }
            }
            quot[i] = q;
        }
        rem.truncate(dd);
        Self::trim(&mut rem);
        Self::trim(&mut quot);
        (quot, rem)
    }

    fn rem(self, a: &PolyP, d: &PolyP) -> PolyP {
        self.div_rem(a, d).1
    }

    pub fn gcd(self, a: &PolyP, b: &PolyP) -> PolyP {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_empty() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    pub fn derivative(self, a: &PolyP) -> PolyP {
        let mut out: PolyP = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| self.mul(c, (i as u64) % self.0))
            .collect();
        Self::trim(&mut out);
        out
    }

    fn powmod(self, base: &PolyP, e: &BigUint, m: &PolyP) -> PolyP {
        let mut acc: PolyP = vec![1];
        let base = self.rem(base, m);
        for i in (0..e.bits()).rev() {
            acc = self.rem(&self.mul_poly(&acc, &acc), m);
            if e.bit(i) {
                acc = self.rem(&self.mul_poly(&acc, &base), m);
            }
        }
        acc
    }

    /// Distinct-degree factorisation of a monic squarefree polynomial.
    fn distinct_degree(self, f: &PolyP) -> Vec<(PolyP, usize)> {
        let mut out = Vec::new();
        let mut rest = f.clone();
        let x: PolyP = vec![0, 1];
        let p = BigUint::from(self.0);
        let mut h = x.clone();
        let mut d = 0;
        while rest.len() > 1 && 2 * (d + 1) <= rest.len() - 1 {
            d += 1;
            h = self.powmod(&h, &p, &rest);
            let g = self.gcd(&rest, &self.sub_poly(&h, &x));
            if g.len() > 1 {
                rest = self.div_rem(&rest, &g).0;
                h = self.rem(&h, &rest);
                out.push((g, d));
            }
        }
        if rest.len() > 1 {
            let deg = rest.len() - 1;
            out.push((self.monic(&rest), deg));
        }
        out
    }

    /// Equal-degree splitting into monic irreducible factors of degree `d`.
    fn equal_degree(self, f: &PolyP, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<PolyP>) {
        let n = f.len() - 1;
        if n == d {
            out.push(f.clone());
            return;
        }
        let e = (BigUint::from(self.0).pow(d as u32) - 1u32) / 2u32;
        loop {
            let mut a: PolyP = (0..n).map(|_| rng.gen_range(0..self.0)).collect();
            Self::trim(&mut a);
            if a.len() < 2 {
                continue;
            }
            let b = self.sub_poly(&self.powmod(&a, &e, f), &vec![1]);
            let g = self.gcd(f, &b);
            if g.len() > 1 && g.len() < f.len() {
                let other = self.monic(&self.div_rem(f, &g).0);
                self.equal_degree(&g, d, rng, out);
                self.equal_degree(&other, d, rng, out);
                return;
            }
        }
    }

    /// Monic irreducible factors of a squarefree polynomial (any leading
    /// coefficient), in a deterministic order.
    pub fn factor_squarefree(self, f: &PolyP) -> Vec<PolyP> {
        let f = self.monic(f);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
        let mut out = Vec::new();
        for (g, d) in self.distinct_degree(&f) {
            self.equal_degree(&g, d, &mut rng, &mut out);
        }
        out.sort();
        out
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &BASES {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1_000_000_007 * 3));
        assert!(is_prime_u64((1u64 << 61) - 1));
    }

    #[test]
    fn factor_x4_minus_1_mod_13() {
        // x^4 - 1 = (x-1)(x+1)(x-5)(x+5) mod 13 since 5^2 = -1
        let f = Fp(13);
        let p: PolyP = vec![12, 0, 0, 0, 1];
        let fs = f.factor_squarefree(&p);
        assert_eq!(fs.len(), 4);
        let prod = fs.iter().fold(vec![1u64], |acc, g| f.mul_poly(&acc, g));
        assert_eq!(prod, p);
    }

    #[test]
    fn irreducible_stays_whole() {
        // x^2 + 1 is irreducible mod 7
        let fs = Fp(7).factor_squarefree(&vec![1, 0, 1]);
        assert_eq!(fs, vec![vec![1, 0, 1]]);
    }
}
