//! Univariate polynomials with arbitrary-precision integer coefficients.

use super::dyadic::Ball;
use super::field::fpoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Integer polynomial, coefficients lowest degree first. The zero polynomial
/// has no coefficients; otherwise the leading coefficient is nonzero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        IntPoly::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly::new(vec![c])
    }

    /// `x`
    pub fn x() -> Self {
        IntPoly::from_i64(&[0, 1])
    }

    /// `x^n - 1`
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut c = vec![BigInt::zero(); n + 1];
        c[0] = BigInt::from(-1);
        c[n] = BigInt::one();
        IntPoly::new(c)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lc(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Max absolute coefficient.
    pub fn height(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
    }

    /// Divide out the content and make the leading coefficient positive.
    pub fn primitive(&self) -> IntPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.lc().is_negative() {
            g = -g;
        }
        IntPoly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn is_monic(&self) -> bool {
        self.lc().is_one()
    }

    pub fn add(&self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, o: &IntPoly) -> IntPoly {
        if self.is_zero() || o.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn scale(&self, k: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn pow(&self, n: u32) -> IntPoly {
        let mut acc = IntPoly::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// `p(-x)`
    pub fn negate_var(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// `x^deg p(1/x)`
    pub fn reverse(&self) -> IntPoly {
        let mut c = self.coeffs.clone();
        c.reverse();
        IntPoly::new(c)
    }

    /// `p(x^2)`
    pub fn compose_square(&self) -> IntPoly {
        let mut c = vec![BigInt::zero(); 2 * self.coeffs.len()];
        for (i, a) in self.coeffs.iter().enumerate() {
            c[2 * i] = a.clone();
        }
        IntPoly::new(c)
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }

    pub fn eval_ball(&self, x: &Ball, prec: u64) -> Ball {
        let mut acc = Ball::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x, prec).add(&Ball::from_int(c), prec);
        }
        acc
    }

    pub fn to_rational(&self) -> Vec<BigRational> {
        self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect()
    }

    /// Clear denominators of a rational polynomial and take the primitive part.
    pub fn from_rational(p: &[BigRational]) -> IntPoly {
        let l = p.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        IntPoly::new(p.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect())
            .primitive()
    }

    /// Exact quotient over the integers if `d` divides `self`.
    pub fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        if self.degree() < d.degree() {
            return None;
        }
        let mut r = self.coeffs.clone();
        let db = d.degree();
        let lc = d.lc();
        let mut q = vec![BigInt::zero(); r.len() - db];
        for k in (0..q.len()).rev() {
            let top = &r[k + db];
            if top.is_zero() {
                continue;
            }
            let (c, rem) = top.div_rem(&lc);
            if !rem.is_zero() {
                return None;
            }
            for (i, b) in d.coeffs.iter().enumerate() {
                r[k + i] -= &c * b;
            }
            q[k] = c;
        }
        if r.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(IntPoly::new(q))
    }

    /// Remainder over the rationals.
    pub fn rem_rational(&self, d: &IntPoly) -> Vec<BigRational> {
        fpoly::rem(&self.to_rational(), &d.to_rational())
    }

    pub fn divides(&self, other: &IntPoly) -> bool {
        other.rem_rational(self).is_empty()
    }

    /// Primitive gcd over the integers (content ignored), leading coefficient positive.
    pub fn gcd(&self, o: &IntPoly) -> IntPoly {
        if self.is_zero() {
            return o.primitive();
        }
        if o.is_zero() {
            return self.primitive();
        }
        let mut a = self.primitive();
        let mut b = o.primitive();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = if r.is_zero() { r } else { r.primitive() };
        }
        a.primitive()
    }

    /// Pseudo-remainder `lc(d)^(deg a - deg d + 1) * a mod d`.
    pub fn pseudo_rem(&self, d: &IntPoly) -> IntPoly {
        if self.degree() < d.degree() || self.is_zero() {
            return self.clone();
        }
        let mut r = self.coeffs.clone();
        let db = d.degree();
        let lc = d.lc();
        let mut k = r.len() - 1;
        loop {
            if k < db {
                break;
            }
            let top = r[k].clone();
            if !top.is_zero() {
                for c in r.iter_mut() {
                    *c *= &lc;
                }
                for (i, b) in d.coeffs.iter().enumerate() {
                    r[k - db + i] -= &top * b;
                }
            }
            r.pop();
            if k == 0 {
                break;
            }
            k -= 1;
        }
        IntPoly::new(r)
    }

    /// Square-free decomposition: `p = c * prod f_i^i` with each `f_i` square-free
    /// and pairwise coprime. Returns `(f_i, i)` for nonconstant factors.
    pub fn squarefree_decomposition(&self) -> Vec<(IntPoly, usize)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        // Yun's algorithm over Q, lifted to primitive integer polynomials.
        let f = self.primitive();
        let fp = f.derivative();
        let a = f.gcd(&fp);
        let mut b = f.div_rational(&a);
        let c = fp.div_rational(&a);
        let mut d = fpoly::sub(&c, &fpoly::derivative(&b));
        let mut i = 1;
        loop {
            let bi = IntPoly::from_rational(&b);
            if bi.degree() == 0 {
                break;
            }
            let g = bi.gcd(&IntPoly::from_rational(&d));
            if g.degree() > 0 {
                out.push((g.clone(), i));
            }
            let gr = g.to_rational();
            b = fpoly::divrem(&b, &gr).0;
            let c = fpoly::divrem(&d, &gr).0;
            d = fpoly::sub(&c, &fpoly::derivative(&b));
            i += 1;
        }
        out
    }

    fn div_rational(&self, d: &IntPoly) -> Vec<BigRational> {
        fpoly::divrem(&self.to_rational(), &d.to_rational()).0
    }

    /// The square-free part (product of distinct irreducible factors).
    pub fn squarefree_part(&self) -> IntPoly {
        if self.degree() == 0 {
            return IntPoly::one();
        }
        let g = self.gcd(&self.derivative());
        IntPoly::from_rational(&self.div_rational(&g))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{a}*x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{a}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

impl Serialize for IntPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        let c = v
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntPoly::new(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_and_division() {
        let a = IntPoly::from_i64(&[-1, 0, 1]); // x^2 - 1
        let b = IntPoly::from_i64(&[1, 1]); // x + 1
        assert_eq!(a.gcd(&b), b);
        assert_eq!(a.div_exact(&b).unwrap(), IntPoly::from_i64(&[-1, 1]));
        assert!(IntPoly::from_i64(&[1, 2]).div_exact(&IntPoly::from_i64(&[0, 1])).is_none());
    }

    #[test]
    fn squarefree() {
        // (x-1)^2 (x+2)^3
        let f = IntPoly::from_i64(&[-1, 1]).pow(2).mul(&IntPoly::from_i64(&[2, 1]).pow(3));
        let mut sf = f.squarefree_decomposition();
        sf.sort_by_key(|(_, m)| *m);
        assert_eq!(sf, vec![(IntPoly::from_i64(&[-1, 1]), 2), (IntPoly::from_i64(&[2, 1]), 3)]);
        assert_eq!(f.squarefree_part(), IntPoly::from_i64(&[-2, 1, 1]));
    }

    #[test]
    fn display() {
        assert_eq!(IntPoly::from_i64(&[-8, 10, -5, 1]).to_string(), "x^3 - 5*x^2 + 10*x - 8");
    }
}
