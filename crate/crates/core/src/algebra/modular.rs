//! Polynomials over a prime field `Z/pZ` with `p < 2^31`, and their factorization.

use num_bigint::BigUint;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type ModPoly = Vec<u64>;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_u64(a % p, p - 2, p)
}

pub fn pow_u64(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

#[derive(Clone, Copy, Debug)]
pub struct Zp {
    pub p: u64,
}

impl Zp {
    pub fn new(p: u64) -> Self {
        debug_assert!(p < (1 << 31) && is_prime(p));
        Zp { p }
    }

    pub fn trim(&self, a: &mut ModPoly) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> ModPoly {
        let n = a.len().max(b.len());
        let mut out: ModPoly = (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % self.p)
            .collect();
        self.trim(&mut out);
        out
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> ModPoly {
        let n = a.len().max(b.len());
        let mut out: ModPoly = (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + self.p - b.get(i).copied().unwrap_or(0)) % self.p)
            .collect();
        self.trim(&mut out);
        out
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> ModPoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % self.p;
            }
        }
        self.trim(&mut out);
        out
    }

    pub fn scale(&self, a: &[u64], s: u64) -> ModPoly {
        let mut out: ModPoly = a.iter().map(|&c| c * s % self.p).collect();
        self.trim(&mut out);
        out
    }

    pub fn divrem(&self, a: &[u64], b: &[u64]) -> (ModPoly, ModPoly) {
        assert!(!b.is_empty(), "division by zero polynomial");
        let db = b.len() - 1;
        let inv = inv_mod(b[db], self.p);
        let mut r = a.to_vec();
        self.trim(&mut r);
        if r.len() <= db {
            return (Vec::new(), r);
        }
        let mut q = vec![0u64; r.len() - db];
        while r.len() > db {
            let k = r.len() - 1 - db;
            let c = r[r.len() - 1] * inv % self.p;
            if c != 0 {
                for (i, &bc) in b.iter().enumerate() {
                    r[k + i] = (r[k + i] + self.p - c * bc % self.p) % self.p;
                }
            }
            q[k] = c;
            r.pop();
            self.trim(&mut r);
            if r.len() <= db {
                break;
            }
        }
        self.trim(&mut q);
        (q, r)
    }

    pub fn rem(&self, a: &[u64], b: &[u64]) -> ModPoly {
        self.divrem(a, b).1
    }

    pub fn monic(&self, a: &[u64]) -> ModPoly {
        match a.last() {
            None => Vec::new(),
            Some(&lc) => self.scale(a, inv_mod(lc, self.p)),
        }
    }

    pub fn gcd(&self, a: &[u64], b: &[u64]) -> ModPoly {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        self.trim(&mut x);
        self.trim(&mut y);
        while !y.is_empty() {
            let r = self.rem(&x, &y);
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    /// `(g, s, t)` with `s a + t b = g` monic.
    pub fn xgcd(&self, a: &[u64], b: &[u64]) -> (ModPoly, ModPoly, ModPoly) {
        let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
        self.trim(&mut r0);
        self.trim(&mut r1);
        let (mut s0, mut s1) = (vec![1u64], Vec::new());
        let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
        while !r1.is_empty() {
            let (q, r) = self.divrem(&r0, &r1);
            r0 = std::mem::replace(&mut r1, r);
            let s2 = self.sub(&s0, &self.mul(&q, &s1));
            s0 = std::mem::replace(&mut s1, s2);
            let t2 = self.sub(&t0, &self.mul(&q, &t1));
            t0 = std::mem::replace(&mut t1, t2);
        }
        let inv = inv_mod(*r0.last().expect("xgcd of zero polynomials"), self.p);
        (self.scale(&r0, inv), self.scale(&s0, inv), self.scale(&t0, inv))
    }

    pub fn derivative(&self, a: &[u64]) -> ModPoly {
        let mut out: ModPoly = a.iter().enumerate().skip(1).map(|(i, &c)| (i as u64 % self.p) * c % self.p).collect();
        self.trim(&mut out);
        out
    }

    pub fn pow_mod(&self, base: &[u64], e: &BigUint, m: &[u64]) -> ModPoly {
        let mut result = vec![1u64];
        let b = self.rem(base, m);
        for i in (0..e.bits()).rev() {
            result = self.rem(&self.mul(&result, &result), m);
            if e.bit(i) {
                result = self.rem(&self.mul(&result, &b), m);
            }
        }
        self.rem(&result, m)
    }

    pub fn is_squarefree(&self, a: &[u64]) -> bool {
        let g = self.gcd(a, &self.derivative(a));
        g.len() == 1
    }

    /// Distinct-degree factorization of a monic square-free polynomial:
    /// returns `(g, d)` where `g` is the product of all irreducible factors of degree `d`.
    pub fn distinct_degree(&self, f: &[u64]) -> Vec<(ModPoly, usize)> {
        let mut out = Vec::new();
        let mut f = self.monic(f);
        let x: ModPoly = vec![0, 1];
        let mut h = x.clone();
        let pbig = BigUint::from(self.p);
        let mut d = 0;
        while f.len() > 1 {
            d += 1;
            if 2 * d > f.len() - 1 {
                let deg = f.len() - 1;
                out.push((f.clone(), deg));
                break;
            }
            h = self.pow_mod(&h, &pbig, &f);
            let g = self.gcd(&self.sub(&h, &x), &f);
            if g.len() > 1 {
                out.push((g.clone(), d));
                f = self.divrem(&f, &g).0;
                h = self.rem(&h, &f);
            }
        }
        out
    }

    /// Split a monic product of irreducibles all of degree `d` (odd `p`).
    pub fn equal_degree(&self, f: &[u64], d: usize, rng: &mut ChaCha8Rng) -> Vec<ModPoly> {
        let n = f.len() - 1;
        if n == d {
            return vec![f.to_vec()];
        }
        let e = (BigUint::from(self.p).pow(d as u32) - 1u32) / 2u32;
        loop {
            let mut a: ModPoly = (0..n).map(|_| rng.gen_range(0..self.p)).collect();
            self.trim(&mut a);
            if a.len() < 2 {
                continue;
            }
            let b = self.sub(&self.pow_mod(&a, &e, f), &[1]);
            let g = self.gcd(&b, f);
            if g.len() > 1 && g.len() < f.len() {
                let h = self.divrem(f, &g).0;
                let mut out = self.equal_degree(&g, d, rng);
                out.extend(self.equal_degree(&self.monic(&h), d, rng));
                return out;
            }
        }
    }

    /// Monic irreducible factors of a monic square-free polynomial.
    pub fn factor_squarefree(&self, f: &[u64], rng: &mut ChaCha8Rng) -> Vec<ModPoly> {
        let mut out = Vec::new();
        for (g, d) in self.distinct_degree(f) {
            out.extend(self.equal_degree(&g, d, rng));
        }
        out
    }
}
