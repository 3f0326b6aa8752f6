//! A minimal field abstraction so polynomial and matrix routines can be shared
//! between rationals, number-field elements and algebraic numbers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt::Debug;

/// Exact field arithmetic. Elements may carry context (e.g. the number field
/// they live in), so constants are produced relative to an existing element.
pub trait Field: Clone + Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn from_rational_like(&self, q: &BigRational) -> Self;

    fn is_one(&self) -> bool {
        self.sub(&self.one_like()).is_zero_elem()
    }
}

impl Field for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn is_zero_elem(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_rational_like(&self, q: &BigRational) -> Self {
        q.clone()
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Polynomials over a [`Field`], coefficients lowest degree first, trimmed.
pub mod fpoly {
    use super::Field;

    pub fn trim<F: Field>(p: &mut Vec<F>) {
        while p.last().is_some_and(|c| c.is_zero_elem()) {
            p.pop();
        }
    }

    pub fn degree<F: Field>(p: &[F]) -> Option<usize> {
        if p.is_empty() {
            None
        } else {
            Some(p.len() - 1)
        }
    }

    pub fn add<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
        let n = a.len().max(b.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            match (a.get(i), b.get(i)) {
                (Some(x), Some(y)) => out.push(x.add(y)),
                (Some(x), None) => out.push(x.clone()),
                (None, Some(y)) => out.push(y.clone()),
                _ => unreachable!(),
            }
        }
        trim(&mut out);
        out
    }

    pub fn neg<F: Field>(a: &[F]) -> Vec<F> {
        a.iter().map(|c| c.neg()).collect()
    }

    pub fn sub<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
        add(a, &neg(b))
    }

    pub fn mul<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let z = a[0].zero_like();
        let mut out = vec![z; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero_elem() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
        trim(&mut out);
        out
    }

    pub fn scale<F: Field>(a: &[F], s: &F) -> Vec<F> {
        let mut out: Vec<F> = a.iter().map(|c| c.mul(s)).collect();
        trim(&mut out);
        out
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn divrem<F: Field>(a: &[F], b: &[F]) -> (Vec<F>, Vec<F>) {
        let db = degree(b).expect("polynomial division by zero");
        let lc_inv = b[db].inv().expect("trimmed polynomial has nonzero leading coefficient");
        let mut r: Vec<F> = a.to_vec();
        trim(&mut r);
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let z = b[0].zero_like();
        let mut q = vec![z; r.len() - db];
        while r.len() > db && !r.is_empty() {
            let k = r.len() - 1 - db;
            let c = r[r.len() - 1].mul(&lc_inv);
            for (i, bc) in b.iter().enumerate() {
                r[k + i] = r[k + i].sub(&c.mul(bc));
            }
            q[k] = c;
            r.pop();
            trim(&mut r);
        }
        trim(&mut q);
        (q, r)
    }

    pub fn rem<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
        divrem(a, b).1
    }

    pub fn monic<F: Field>(a: &[F]) -> Vec<F> {
        match a.last() {
            None => Vec::new(),
            Some(lc) => scale(a, &lc.inv().unwrap()),
        }
    }

    pub fn gcd<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
        let mut x: Vec<F> = a.to_vec();
        let mut y: Vec<F> = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y);
            x = y;
            y = r;
        }
        monic(&x)
    }

    /// Extended gcd: returns `(g, s, t)` with `s a + t b = g`, `g` monic.
    pub fn xgcd<F: Field>(a: &[F], b: &[F], one: &F) -> (Vec<F>, Vec<F>, Vec<F>) {
        let mut r0: Vec<F> = a.to_vec();
        let mut r1: Vec<F> = b.to_vec();
        trim(&mut r0);
        trim(&mut r1);
        let mut s0 = vec![one.clone()];
        let mut s1: Vec<F> = Vec::new();
        let mut t0: Vec<F> = Vec::new();
        let mut t1 = vec![one.clone()];
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1);
            r0 = std::mem::replace(&mut r1, r);
            let s2 = sub(&s0, &mul(&q, &s1));
            s0 = std::mem::replace(&mut s1, s2);
            let t2 = sub(&t0, &mul(&q, &t1));
            t0 = std::mem::replace(&mut t1, t2);
        }
        match r0.last() {
            None => (r0, s0, t0),
            Some(lc) => {
                let inv = lc.inv().unwrap();
                (scale(&r0, &inv), scale(&s0, &inv), scale(&t0, &inv))
            }
        }
    }

    pub fn eval<F: Field>(p: &[F], x: &F) -> F {
        let mut acc = x.zero_like();
        for c in p.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn derivative<F: Field>(p: &[F]) -> Vec<F> {
        let mut out = Vec::new();
        for (i, c) in p.iter().enumerate().skip(1) {
            let mut s = c.zero_like();
            for _ in 0..i {
                s = s.add(c);
            }
            out.push(s);
        }
        trim(&mut out);
        out
    }

    pub fn pow_mod<F: Field>(base: &[F], mut e: u64, modulus: &[F], one: &F) -> Vec<F> {
        let mut result = vec![one.clone()];
        let mut b = rem(base, modulus);
        while e > 0 {
            if e & 1 == 1 {
                result = rem(&mul(&result, &b), modulus);
            }
            e >>= 1;
            if e > 0 {
                b = rem(&mul(&b, &b), modulus);
            }
        }
        result
    }
}
