//! Exact algebraic numbers.
//!
//! A number is stored as its minimal polynomial over Z (primitive, positive
//! leading coefficient) together with an isolating disc. The disc is always
//! kept below a quarter of the root separation bound of the minimal
//! polynomial, so two numbers with the same minimal polynomial are equal
//! exactly when their discs meet, and a disc touching the real axis belongs to
//! a real root only if it was certified real during isolation.

use super::dyadic::{Ball, Dyadic};
use super::factor::{cyclotomic_order, factor};
use super::field::{fpoly, rat};
use super::poly::IntPoly;
use super::roots::{isolate, refine, separation_exp, RootDisc};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, Mutex};

struct Inner {
    poly: IntPoly,
    rational: Option<BigRational>,
    sep: i64,
    real: bool,
    disc: Mutex<RootDisc>,
}

#[derive(Clone)]
pub struct AlgebraicNumber(Arc<Inner>);

impl AlgebraicNumber {
    pub fn from_rational(q: BigRational) -> Self {
        let poly = IntPoly::new(vec![-q.numer().clone(), q.denom().clone()]).primitive();
        let ball = Ball::from_rational(&q, 128);
        AlgebraicNumber(Arc::new(Inner {
            poly,
            rational: Some(q),
            sep: 0,
            real: true,
            disc: Mutex::new(RootDisc { ball, real: true }),
        }))
    }

    pub fn from_int(n: i64) -> Self {
        AlgebraicNumber::from_rational(rat(n))
    }

    pub fn zero() -> Self {
        AlgebraicNumber::from_int(0)
    }

    pub fn one() -> Self {
        AlgebraicNumber::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        let p = IntPoly::from_i64(&[1, 0, 1]);
        let disc = isolate(&p, None).into_iter().find(|d| d.ball.im.signum() > 0).unwrap();
        AlgebraicNumber::from_irreducible(p, disc)
    }

    /// Build from an irreducible polynomial and a disc isolating one of its roots.
    pub fn from_irreducible(poly: IntPoly, disc: RootDisc) -> Self {
        let poly = poly.primitive();
        if poly.degree() == 1 {
            return AlgebraicNumber::from_rational(BigRational::new(-poly.coeff(0), poly.coeff(1)));
        }
        let sep = separation_exp(&poly);
        let disc = refine(&poly, &disc, sep + 2);
        AlgebraicNumber(Arc::new(Inner { real: disc.real, poly, rational: None, sep, disc: Mutex::new(disc) }))
    }

    /// All distinct complex roots of a nonzero polynomial, ordered by real part then imaginary part.
    pub fn roots_of(p: &IntPoly) -> Vec<AlgebraicNumber> {
        let mut out = Vec::new();
        for (f, _) in factor(p) {
            for d in isolate(&f, None) {
                out.push(AlgebraicNumber::from_irreducible(f.clone(), d));
            }
        }
        out.sort_by(|a, b| {
            let (ar, ai) = a.to_f64();
            let (br, bi) = b.to_f64();
            ar.partial_cmp(&br).unwrap().then(ai.partial_cmp(&bi).unwrap())
        });
        out
    }

    pub fn min_poly(&self) -> &IntPoly {
        &self.0.poly
    }

    pub fn degree(&self) -> usize {
        self.0.poly.degree()
    }

    pub fn is_rational(&self) -> bool {
        self.0.rational.is_some()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.0.rational.as_ref()
    }

    pub fn is_real(&self) -> bool {
        self.0.real
    }

    pub fn is_zero(&self) -> bool {
        self.0.rational.as_ref().is_some_and(|q| q.is_zero())
    }

    /// Is the minimal polynomial monic (an algebraic integer)?
    pub fn is_integer(&self) -> bool {
        self.0.poly.is_monic()
    }

    /// Enclosure of radius at most `2^-bits`.
    pub fn approx(&self, bits: i64) -> Ball {
        if let Some(q) = &self.0.rational {
            let b = Ball::from_rational(q, (bits.max(8) + 8) as u64 + q.numer().bits());
            if b.rad <= Dyadic::pow2(-bits) {
                return b;
            }
            let prec = (bits + 16 + q.numer().bits() as i64 + q.denom().bits() as i64) as u64;
            return Ball::from_rational(q, prec);
        }
        let mut g = self.0.disc.lock().unwrap();
        if g.ball.rad > Dyadic::pow2(-bits) {
            *g = refine(&self.0.poly, &g, bits);
        }
        g.ball.clone()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        self.approx(60).to_f64()
    }

    pub fn conj(&self) -> Self {
        if self.0.real {
            return self.clone();
        }
        let d = self.0.disc.lock().unwrap().clone();
        let disc = RootDisc { ball: d.ball.conj(), real: false };
        AlgebraicNumber(Arc::new(Inner {
            poly: self.0.poly.clone(),
            rational: None,
            sep: self.0.sep,
            real: false,
            disc: Mutex::new(disc),
        }))
    }

    pub fn neg(&self) -> Self {
        if let Some(q) = &self.0.rational {
            return AlgebraicNumber::from_rational(-q);
        }
        let d = self.0.disc.lock().unwrap().clone();
        AlgebraicNumber(Arc::new(Inner {
            poly: self.0.poly.negate_var().primitive(),
            rational: None,
            sep: self.0.sep,
            real: self.0.real,
            disc: Mutex::new(RootDisc { ball: d.ball.neg(), real: d.real }),
        }))
    }

    pub fn inv(&self) -> Option<Self> {
        if let Some(q) = &self.0.rational {
            return if q.is_zero() { None } else { Some(AlgebraicNumber::from_rational(q.recip())) };
        }
        let poly = self.0.poly.reverse().primitive();
        let me = self.clone();
        Some(identify(vec![poly], move |bits| loop_inv(&me, bits)))
    }

    pub fn add(&self, o: &Self) -> Self {
        match (&self.0.rational, &o.0.rational) {
            (Some(a), Some(b)) => AlgebraicNumber::from_rational(a + b),
            (Some(a), None) => o.affine(&BigRational::one(), a),
            (None, Some(b)) => self.affine(&BigRational::one(), b),
            (None, None) => {
                let cp = composed(self, o, |k, sa, sb| {
                    (0..=k).map(|i| BigRational::from_integer(binomial(k, i)) * &sa[i] * &sb[k - i]).sum()
                });
                let (a, b) = (self.clone(), o.clone());
                identify_from_poly(&cp, move |bits| {
                    let x = a.approx(bits + 2);
                    let y = b.approx(bits + 2);
                    x.add(&y, (bits + 64) as u64)
                })
            }
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        match (&self.0.rational, &o.0.rational) {
            (Some(a), Some(b)) => AlgebraicNumber::from_rational(a * b),
            (Some(a), None) => o.affine(a, &BigRational::zero()),
            (None, Some(b)) => self.affine(b, &BigRational::zero()),
            (None, None) => {
                if self == o {
                    return self.pow(2);
                }
                let cp = composed(self, o, |k, sa, sb| &sa[k] * &sb[k]);
                let (a, b) = (self.clone(), o.clone());
                identify_from_poly(&cp, move |bits| mul_enclosure(&a, &b, bits))
            }
        }
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| self.mul(&i))
    }

    /// `a * self + b` for rationals `a`, `b`.
    pub fn affine(&self, a: &BigRational, b: &BigRational) -> Self {
        if a.is_zero() {
            return AlgebraicNumber::from_rational(b.clone());
        }
        if let Some(q) = &self.0.rational {
            return AlgebraicNumber::from_rational(a * q + b);
        }
        // y = a x + b  =>  x = (y - b) / a, new poly p((y - b)/a)
        let p = self.0.poly.to_rational();
        let lin = vec![-b / a, a.recip()];
        let mut acc: Vec<BigRational> = Vec::new();
        for c in p.iter().rev() {
            acc = fpoly::add(&fpoly::mul(&acc, &lin), &[c.clone()]);
        }
        // an affine image of an irreducible polynomial stays irreducible, and a
        // ball below the separation bound of the new polynomial isolates its root
        let poly = IntPoly::from_rational(&acc).primitive();
        let sep = separation_exp(&poly);
        let bits = sep + 2;
        let prec = (bits + 64) as u64;
        let extra = a.numer().bits() as i64 - a.denom().bits() as i64 + 2;
        let mut ball = self
            .approx(bits + extra.max(0) + 2)
            .mul(&Ball::from_rational(a, prec), prec)
            .add(&Ball::from_rational(b, prec), prec);
        if self.0.real {
            ball.im = Dyadic::zero();
        }
        AlgebraicNumber::from_irreducible(poly, RootDisc { ball, real: self.0.real })
    }

    pub fn pow(&self, e: u64) -> Self {
        if e == 0 {
            return AlgebraicNumber::one();
        }
        if e == 1 {
            return self.clone();
        }
        if let Some(q) = &self.0.rational {
            return AlgebraicNumber::from_rational(num_traits::pow(q.clone(), e as usize));
        }
        // power sums of the e-th powers are every e-th power sum
        let d = self.degree();
        let sums = power_sums(&self.0.poly, d * e as usize);
        let se: Vec<BigRational> = (0..=d).map(|k| sums[k * e as usize].clone()).collect();
        let cp = from_power_sums(&se, d);
        let me = self.clone();
        identify_from_poly(&cp, move |bits| {
            let ub = me.approx(8).abs_upper().to_f64().max(1.0);
            let extra = ((e as f64) * ub.log2()).ceil() as i64 + 64 - e.leading_zeros() as i64 + 4;
            me.approx(bits + extra.max(0)).pow(e, (bits + extra.max(0) + 64) as u64)
        })
    }

    /// Square root of a nonnegative real number.
    pub fn sqrt_nonneg(&self) -> Option<Self> {
        if self.sign() < 0 || !self.is_real() {
            return None;
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        let p = self.0.poly.compose_square();
        let me = self.clone();
        let cands: Vec<IntPoly> = factor(&p).into_iter().map(|(f, _)| f).collect();
        Some(identify(cands, move |bits| {
            let mut b = bits + 4;
            loop {
                let x = me.approx(2 * b + 8);
                if let Some(s) = x.sqrt_real((2 * b + 64) as u64) {
                    if s.rad <= Dyadic::pow2(-bits) {
                        return s;
                    }
                }
                b += 16;
            }
        }))
    }

    pub fn abs_squared(&self) -> Self {
        if self.is_real() {
            return self.mul(self);
        }
        self.mul(&self.conj())
    }

    /// Absolute value (a nonnegative real algebraic number).
    pub fn abs(&self) -> Self {
        if self.is_real() {
            return if self.sign() < 0 { self.neg() } else { self.clone() };
        }
        self.abs_squared().sqrt_nonneg().unwrap()
    }

    pub fn re(&self) -> Self {
        if self.is_real() {
            return self.clone();
        }
        self.add(&self.conj()).affine(&BigRational::new(1.into(), 2.into()), &BigRational::zero())
    }

    pub fn im(&self) -> Self {
        if self.is_real() {
            return AlgebraicNumber::zero();
        }
        let d = self.sub(&self.conj());
        // (z - conj z) / (2i) = -(i/2)(z - conj z)
        d.mul(&AlgebraicNumber::i()).affine(&BigRational::new((-1).into(), 2.into()), &BigRational::zero())
    }

    /// Sign of a real number; panics on non-real input.
    pub fn sign(&self) -> i32 {
        assert!(self.is_real(), "sign of a non-real algebraic number");
        if let Some(q) = &self.0.rational {
            return if q.is_zero() { 0 } else if q.is_positive() { 1 } else { -1 };
        }
        let mut bits = 32;
        loop {
            if let Some(s) = self.approx(bits).re_sign() {
                return s;
            }
            bits *= 2;
        }
    }

    /// Compare two real numbers.
    pub fn cmp_real(&self, o: &Self) -> Ordering {
        if let (Some(a), Some(b)) = (&self.0.rational, &o.0.rational) {
            return a.cmp(b);
        }
        // cheap separation first
        let mut bits = 32;
        while bits <= 256 {
            let a = self.approx(bits);
            let b = o.approx(bits);
            if let Some(s) = a.sub(&b, (bits + 64) as u64).re_sign() {
                return s.cmp(&0);
            }
            bits *= 2;
        }
        self.sub(o).sign().cmp(&0)
    }

    /// Compare `|self|` with `|o|`.
    pub fn cmp_abs(&self, o: &Self) -> Ordering {
        let mut bits = 32;
        while bits <= 256 {
            let a = self.approx(bits);
            let b = o.approx(bits);
            let (al, au) = (a.abs_lower(), a.abs_upper());
            let (bl, bu) = (b.abs_lower(), b.abs_upper());
            if au < bl {
                return Ordering::Less;
            }
            if bu < al {
                return Ordering::Greater;
            }
            bits *= 2;
        }
        self.abs_squared().cmp_real(&o.abs_squared())
    }

    /// Order `r` when the number is a primitive `r`-th root of unity.
    pub fn root_of_unity_order(&self) -> Option<u64> {
        cyclotomic_order(&self.0.poly)
    }

    pub fn is_root_of_unity(&self) -> bool {
        self.root_of_unity_order().is_some()
    }

    /// Human-readable approximation.
    pub fn approx_string(&self) -> String {
        let (re, im) = self.to_f64();
        if self.is_real() {
            format!("{re:.6}")
        } else if im >= 0.0 {
            format!("{re:.6}+{im:.6}i")
        } else {
            format!("{re:.6}-{:.6}i", -im)
        }
    }
}

fn loop_inv(me: &AlgebraicNumber, bits: i64) -> Ball {
    let mut b = bits + 8;
    loop {
        let x = me.approx(b);
        if let Some(i) = x.inv((b + 64) as u64) {
            if i.rad <= Dyadic::pow2(-bits) {
                return i;
            }
        }
        b += 32;
    }
}

fn mul_enclosure(a: &AlgebraicNumber, b: &AlgebraicNumber, bits: i64) -> Ball {
    let ua = a.approx(8).abs_upper().to_f64().max(1.0).log2().ceil() as i64;
    let ub = b.approx(8).abs_upper().to_f64().max(1.0).log2().ceil() as i64;
    let x = a.approx(bits + ub + 3);
    let y = b.approx(bits + ua + 3);
    x.mul(&y, (bits + 64) as u64)
}

/// Newton power sums `s_0..=s_n` of the roots of `p`.
fn power_sums(p: &IntPoly, n: usize) -> Vec<BigRational> {
    let d = p.degree();
    let lc = BigRational::from_integer(p.lc());
    // elementary symmetric functions of the roots
    let e: Vec<BigRational> = (0..=d)
        .map(|k| {
            let c = BigRational::from_integer(p.coeff(d - k)) / &lc;
            if k % 2 == 0 { c } else { -c }
        })
        .collect();
    let mut s = vec![BigRational::from_integer(BigInt::from(d))];
    for k in 1..=n {
        let mut acc = BigRational::zero();
        for i in 1..=k.min(d) {
            let term = if i == k { &e[i] * BigRational::from_integer(BigInt::from(k)) } else { &e[i] * &s[k - i] };
            if i % 2 == 1 { acc += term } else { acc -= term }
        }
        s.push(acc);
    }
    s
}

/// Monic polynomial of degree `n` with the given power sums `s_0..=s_n`.
fn from_power_sums(s: &[BigRational], n: usize) -> IntPoly {
    let mut e = vec![BigRational::one()];
    for k in 1..=n {
        let mut acc = BigRational::zero();
        for i in 1..=k {
            let term = &e[k - i] * &s[i];
            if i % 2 == 1 { acc += term } else { acc -= term }
        }
        e.push(acc / BigRational::from_integer(BigInt::from(k)));
    }
    let coeffs: Vec<BigRational> = (0..=n).map(|j| if (n - j) % 2 == 0 { e[n - j].clone() } else { -e[n - j].clone() }).collect();
    IntPoly::from_rational(&coeffs)
}

fn binomial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Polynomial whose roots are `f(a_i, b_j)` over all root pairs, given the
/// rule combining power sums.
fn composed(a: &AlgebraicNumber, b: &AlgebraicNumber, rule: impl Fn(usize, &[BigRational], &[BigRational]) -> BigRational) -> IntPoly {
    let n = a.degree() * b.degree();
    let sa = power_sums(&a.0.poly, n);
    let sb = power_sums(&b.0.poly, n);
    let s: Vec<BigRational> = (0..=n).map(|k| rule(k, &sa, &sb)).collect();
    from_power_sums(&s, n)
}

fn identify_from_poly(cp: &IntPoly, enclosure: impl Fn(i64) -> Ball) -> AlgebraicNumber {
    let cands: Vec<IntPoly> = factor(cp).into_iter().map(|(f, _)| f).collect();
    identify(cands, enclosure)
}

/// Pick the unique root among the irreducible candidates that is consistent
/// with the enclosures produced by `enclosure(bits)` (radius about `2^-bits`).
fn identify(cands: Vec<IntPoly>, enclosure: impl Fn(i64) -> Ball) -> AlgebraicNumber {
    // drop factors that cannot vanish on the enclosure before isolating roots
    let mut cands: Vec<IntPoly> = cands.into_iter().filter(|f| f.degree() > 0).collect();
    let mut bits = 32;
    while cands.len() > 1 && bits <= 512 {
        let e = enclosure(bits);
        cands.retain(|f| f.eval_ball(&e, (bits + 64) as u64).contains_zero());
        bits *= 2;
    }
    let mut pool: Vec<(IntPoly, RootDisc)> = Vec::new();
    for f in cands {
        for d in isolate(&f, None) {
            pool.push((f.clone(), d));
        }
    }
    let mut bits = 24;
    loop {
        let e = enclosure(bits);
        let mut next = Vec::new();
        for (f, d) in pool.into_iter() {
            let d = if d.ball.rad > Dyadic::pow2(-bits) { refine(&f, &d, bits) } else { d };
            if d.ball.overlaps(&e) {
                next.push((f, d));
            }
        }
        pool = next;
        assert!(!pool.is_empty(), "no candidate root matches the enclosure");
        if pool.len() == 1 {
            let (f, d) = pool.pop().unwrap();
            if f.degree() == 1 {
                return AlgebraicNumber::from_rational(BigRational::new(-f.coeff(0), f.coeff(1)));
            }
            return AlgebraicNumber::from_irreducible(f, d);
        }
        bits *= 2;
    }
}

impl PartialEq for AlgebraicNumber {
    fn eq(&self, o: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &o.0) {
            return true;
        }
        if let (Some(a), Some(b)) = (&self.0.rational, &o.0.rational) {
            return a == b;
        }
        if self.0.poly != o.0.poly || self.0.real != o.0.real {
            return false;
        }
        let a = self.0.disc.lock().unwrap().ball.clone();
        let b = o.0.disc.lock().unwrap().ball.clone();
        a.overlaps(&b)
    }
}

impl Eq for AlgebraicNumber {}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = &self.0.rational {
            return write!(f, "{q}");
        }
        write!(f, "root of {} near {}", self.0.poly, self.approx_string())
    }
}

impl Serialize for AlgebraicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let (re, im) = self.to_f64();
        let b = self.approx(53);
        let mut st = s.serialize_struct("AlgebraicNumber", 5)?;
        st.serialize_field("min_poly", &self.0.poly)?;
        st.serialize_field("re", &re)?;
        st.serialize_field("im", &im)?;
        st.serialize_field("radius", &b.rad.to_f64())?;
        st.serialize_field("exact", &self.0.rational.as_ref().map(|q| q.to_string()))?;
        st.end()
    }
}

impl super::field::Field for AlgebraicNumber {
    fn zero_like(&self) -> Self {
        AlgebraicNumber::zero()
    }
    fn one_like(&self) -> Self {
        AlgebraicNumber::one()
    }
    fn is_zero_elem(&self) -> bool {
        AlgebraicNumber::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        AlgebraicNumber::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        AlgebraicNumber::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        AlgebraicNumber::mul(self, o)
    }
    fn neg(&self) -> Self {
        AlgebraicNumber::neg(self)
    }
    fn inv(&self) -> Option<Self> {
        AlgebraicNumber::inv(self)
    }
    fn from_rational_like(&self, q: &BigRational) -> Self {
        AlgebraicNumber::from_rational(q.clone())
    }
}

/// Integer lower bound helper used by callers that need `ceil(log2 |x|)`.
pub fn log2_upper(x: &AlgebraicNumber) -> i64 {
    let u = x.approx(16).abs_upper();
    if u.is_zero() {
        return i64::MIN / 4;
    }
    u.magnitude() + 1
}
