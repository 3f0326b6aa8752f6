//! Dyadic rationals `m * 2^e` and complex balls built on them.
//!
//! Balls are the only approximate objects in the crate. Every ball operation
//! rounds its center to a requested number of significant bits and folds the
//! rounding error into the radius, so a ball always encloses the exact value.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Rounding direction for [`Dyadic::round`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Floor,
    Ceil,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mant: BigInt::one(), exp: 0 }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic::new(n.into(), 0)
    }

    /// Exact conversion of a finite float.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite float");
        if x == 0.0 {
            return Dyadic::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exponent = ((bits >> 52) & 0x7ff) as i64;
        let fraction = bits & 0x000f_ffff_ffff_ffff;
        let (m, e) = if exponent == 0 {
            (fraction as i64, -1074)
        } else {
            ((fraction | (1 << 52)) as i64, exponent - 1075)
        };
        Dyadic::new(BigInt::from(sign * m), e)
    }

    /// `2^e`
    pub fn pow2(e: i64) -> Self {
        Dyadic { mant: BigInt::one(), exp: e }
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz as usize;
            self.exp += tz as i64;
        }
    }

    pub fn mant(&self) -> &BigInt {
        &self.mant
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> Self {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    pub fn neg(&self) -> Self {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    /// Binary exponent of the leading bit, `floor(log2 |x|)`. Zero maps to `i64::MIN`.
    pub fn magnitude(&self) -> i64 {
        if self.mant.is_zero() {
            return i64::MIN;
        }
        self.mant.bits() as i64 - 1 + self.exp
    }

    pub fn add(&self, o: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(o.exp);
        let a = &self.mant << ((self.exp - e) as usize);
        let b = &o.mant << ((o.exp - e) as usize);
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, o: &Dyadic) -> Dyadic {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mant * &o.mant, self.exp + o.exp)
    }

    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    /// Keep `prec` significant bits, rounding in the given direction.
    pub fn round(&self, prec: u64, dir: Round) -> Dyadic {
        let bits = self.mant.bits();
        if bits <= prec {
            return self.clone();
        }
        let shift = bits - prec;
        let (q, r) = self.mant.div_mod_floor(&(BigInt::one() << shift as usize));
        let q = if dir == Round::Ceil && !r.is_zero() { q + 1 } else { q };
        Dyadic::new(q, self.exp + shift as i64)
    }

    /// Round to nearest-ish with `prec` significant bits, returning the value and a
    /// nonnegative bound on the error.
    pub fn round_err(&self, prec: u64) -> (Dyadic, Dyadic) {
        let bits = self.mant.bits();
        if bits <= prec {
            return (self.clone(), Dyadic::zero());
        }
        let shift = bits - prec;
        let r = self.round(prec, Round::Floor);
        (r, Dyadic::pow2(self.exp + shift as i64))
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << (self.exp as usize))
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << ((-self.exp) as usize))
        }
    }

    /// `q` rounded to a dyadic with absolute precision `2^-bits`.
    pub fn from_rational(q: &BigRational, bits: i64, dir: Round) -> Dyadic {
        let (n, d) = (q.numer(), q.denom());
        let (num, den) = if bits >= 0 {
            (n << (bits as usize), d.clone())
        } else {
            (n.clone(), d << ((-bits) as usize))
        };
        let (fl, r) = num.div_mod_floor(&den);
        let m = if dir == Round::Ceil && !r.is_zero() { fl + 1 } else { fl };
        Dyadic::new(m, -bits)
    }

    /// Quotient rounded to `prec` significant bits.
    pub fn div(&self, o: &Dyadic, prec: u64, dir: Round) -> Dyadic {
        assert!(!o.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let shift = (prec as i64 + 2 + o.mant.bits() as i64 - self.mant.bits() as i64).max(0);
        let num = &self.mant << (shift as usize);
        let (q, r) = num.div_mod_floor(&o.mant);
        let q = if dir == Round::Ceil && !r.is_zero() { q + 1 } else { q };
        Dyadic::new(q, self.exp - shift - o.exp).round(prec, dir)
    }

    /// Square root of a nonnegative value, rounded in the given direction to
    /// about `prec` significant bits.
    pub fn sqrt(&self, prec: u64, dir: Round) -> Dyadic {
        assert!(!self.is_negative(), "sqrt of negative dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        // want mant * 2^exp with even exponent and about 2*prec bits
        let mut m = self.mant.clone();
        let mut e = self.exp;
        let want = 2 * prec as i64 + 4;
        let have = m.bits() as i64;
        if have < want {
            let s = want - have;
            m <<= s as usize;
            e -= s;
        }
        if e.rem_euclid(2) != 0 {
            m <<= 1usize;
            e -= 1;
        }
        let s = m.sqrt();
        let exact = &s * &s == m;
        let s = if dir == Round::Ceil && !exact { s + 1 } else { s };
        Dyadic::new(s, e / 2).round(prec, dir)
    }

    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let (m, e) = if bits > 60 {
            (&self.mant >> ((bits - 60) as usize), self.exp + bits - 60)
        } else {
            (self.mant.clone(), self.exp)
        };
        let mf = m.to_f64().unwrap_or(0.0);
        if e > 2000 {
            return mf.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        let mut r = mf;
        let mut e = e;
        while e > 1000 {
            r *= 2f64.powi(1000);
            e -= 1000;
        }
        while e < -1000 {
            r *= 2f64.powi(-1000);
            e += 1000;
        }
        r * 2f64.powi(e as i32)
    }

    pub fn max_of(&self, o: &Dyadic) -> Dyadic {
        if self >= o {
            self.clone()
        } else {
            o.clone()
        }
    }

    pub fn min_of(&self, o: &Dyadic) -> Dyadic {
        if self <= o {
            self.clone()
        } else {
            o.clone()
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let sa = self.signum();
        let sb = other.signum();
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // compare magnitudes first
        let ma = self.magnitude();
        let mb = other.magnitude();
        if ma != mb {
            let ord = ma.cmp(&mb);
            return if sa > 0 { ord } else { ord.reverse() };
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << ((self.exp - e) as usize);
        let b = &other.mant << ((other.exp - e) as usize);
        a.cmp(&b)
    }
}

/// A closed disc in the complex plane: `{ z : |z - center| <= rad }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    pub re: Dyadic,
    pub im: Dyadic,
    pub rad: Dyadic,
}

const RAD_BITS: u64 = 64;

impl Ball {
    pub fn exact(re: Dyadic, im: Dyadic) -> Ball {
        Ball { re, im, rad: Dyadic::zero() }
    }

    pub fn real(x: Dyadic) -> Ball {
        Ball::exact(x, Dyadic::zero())
    }

    pub fn zero() -> Ball {
        Ball::real(Dyadic::zero())
    }

    pub fn one() -> Ball {
        Ball::real(Dyadic::one())
    }

    pub fn from_int(n: &BigInt) -> Ball {
        Ball::real(Dyadic::from_int(n.clone()))
    }

    pub fn from_rational(q: &BigRational, prec: u64) -> Ball {
        if q.denom().is_one() {
            return Ball::from_int(q.numer());
        }
        let mag = q.numer().bits() as i64 - q.denom().bits() as i64;
        let bits = prec as i64 - mag + 2;
        let lo = Dyadic::from_rational(q, bits, Round::Floor);
        let hi = Dyadic::from_rational(q, bits, Round::Ceil);
        let rad = hi.sub(&lo);
        Ball { re: lo, im: Dyadic::zero(), rad }
    }

    pub fn with_rad(mut self, rad: Dyadic) -> Ball {
        self.rad = rad;
        self
    }

    pub fn is_exact_real(&self) -> bool {
        self.im.is_zero() && self.rad.is_zero()
    }

    /// Upper bound on `|center|`.
    pub fn center_abs_upper(&self) -> Dyadic {
        if self.im.is_zero() {
            return self.re.abs();
        }
        if self.re.is_zero() {
            return self.im.abs();
        }
        let sq = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        sq.sqrt(RAD_BITS, Round::Ceil)
    }

    /// Lower bound on `|center|`.
    pub fn center_abs_lower(&self) -> Dyadic {
        if self.im.is_zero() {
            return self.re.abs();
        }
        if self.re.is_zero() {
            return self.im.abs();
        }
        let sq = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        sq.sqrt(RAD_BITS, Round::Floor)
    }

    /// Upper bound on `|z|` for every `z` in the ball.
    pub fn abs_upper(&self) -> Dyadic {
        self.center_abs_upper().add(&self.rad).round(RAD_BITS, Round::Ceil)
    }

    /// Lower bound on `|z|` over the ball, clamped at zero.
    pub fn abs_lower(&self) -> Dyadic {
        let l = self.center_abs_lower().sub(&self.rad);
        if l.is_negative() {
            Dyadic::zero()
        } else {
            l.round(RAD_BITS, Round::Floor)
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.abs_lower().is_zero()
    }

    fn round_center(re: Dyadic, im: Dyadic, rad: Dyadic, prec: u64) -> Ball {
        let (re, e1) = re.round_err(prec);
        let (im, e2) = im.round_err(prec);
        let rad = rad.add(&e1).add(&e2).round(RAD_BITS, Round::Ceil);
        Ball { re, im, rad }
    }

    pub fn add(&self, o: &Ball, prec: u64) -> Ball {
        Ball::round_center(
            self.re.add(&o.re),
            self.im.add(&o.im),
            self.rad.add(&o.rad),
            prec,
        )
    }

    pub fn sub(&self, o: &Ball, prec: u64) -> Ball {
        self.add(&o.neg(), prec)
    }

    pub fn neg(&self) -> Ball {
        Ball { re: self.re.neg(), im: self.im.neg(), rad: self.rad.clone() }
    }

    pub fn conj(&self) -> Ball {
        Ball { re: self.re.clone(), im: self.im.neg(), rad: self.rad.clone() }
    }

    pub fn mul(&self, o: &Ball, prec: u64) -> Ball {
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        let rad = if self.rad.is_zero() && o.rad.is_zero() {
            Dyadic::zero()
        } else {
            let a = self.center_abs_upper();
            let b = o.center_abs_upper();
            a.mul(&o.rad).add(&b.mul(&self.rad)).add(&self.rad.mul(&o.rad))
        };
        Ball::round_center(re, im, rad, prec)
    }

    pub fn scale_int(&self, k: &BigInt, prec: u64) -> Ball {
        let kd = Dyadic::from_int(k.clone());
        let rad = self.rad.mul(&kd.abs());
        Ball::round_center(self.re.mul(&kd), self.im.mul(&kd), rad, prec)
    }

    pub fn mul_pow2(&self, k: i64) -> Ball {
        Ball { re: self.re.mul_pow2(k), im: self.im.mul_pow2(k), rad: self.rad.mul_pow2(k) }
    }

    /// `1/z`, or `None` when the ball touches zero.
    pub fn inv(&self, prec: u64) -> Option<Ball> {
        let lower = self.abs_lower();
        if lower.is_zero() {
            return None;
        }
        let n2 = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        let re = self.re.div(&n2, prec + 4, Round::Floor);
        let im = self.im.neg().div(&n2, prec + 4, Round::Floor);
        // rounding of the two quotients: each off by at most 2^(mag - prec - 3)
        let ulp = Dyadic::pow2(re.magnitude().max(im.magnitude()).max(-100_000) - prec as i64 - 2);
        let c_low = self.center_abs_lower();
        // |1/z - 1/c| <= r / (|c| (|c| - r))
        let denom = c_low.mul(&lower);
        let err = if self.rad.is_zero() {
            Dyadic::zero()
        } else {
            self.rad.div(&denom, RAD_BITS, Round::Ceil)
        };
        let rad = err.add(&ulp).add(&ulp);
        Some(Ball::round_center(re, im, rad, prec))
    }

    pub fn div(&self, o: &Ball, prec: u64) -> Option<Ball> {
        o.inv(prec + 4).map(|i| self.mul(&i, prec))
    }

    pub fn pow(&self, mut n: u64, prec: u64) -> Ball {
        let mut base = self.clone();
        let mut acc = Ball::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base, prec);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base, prec);
            }
        }
        acc
    }

    /// Square root of a real nonnegative ball; `None` if the ball is not real or dips below zero.
    pub fn sqrt_real(&self, prec: u64) -> Option<Ball> {
        if !self.im.is_zero() {
            return None;
        }
        let lo = self.re.sub(&self.rad);
        if lo.is_negative() {
            return None;
        }
        let hi = self.re.add(&self.rad);
        let slo = lo.sqrt(prec, Round::Floor);
        let shi = hi.sqrt(prec, Round::Ceil);
        let center = slo.add(&shi).mul_pow2(-1);
        let rad = shi.sub(&center).max_of(&center.sub(&slo));
        Some(Ball { re: center, im: Dyadic::zero(), rad: rad.round(RAD_BITS, Round::Ceil) })
    }

    /// Sign of the real part if the ball lies strictly on one side of the imaginary axis.
    pub fn re_sign(&self) -> Option<i32> {
        if self.re.sub(&self.rad).signum() > 0 {
            Some(1)
        } else if self.re.add(&self.rad).signum() < 0 {
            Some(-1)
        } else {
            None
        }
    }

    pub fn im_sign(&self) -> Option<i32> {
        if self.im.sub(&self.rad).signum() > 0 {
            Some(1)
        } else if self.im.add(&self.rad).signum() < 0 {
            Some(-1)
        } else {
            None
        }
    }

    /// Do the two discs intersect?
    pub fn overlaps(&self, o: &Ball) -> bool {
        let dr = self.re.sub(&o.re);
        let di = self.im.sub(&o.im);
        let d2 = dr.mul(&dr).add(&di.mul(&di));
        let r = self.rad.add(&o.rad);
        d2 <= r.mul(&r)
    }

    /// Is `o` contained in `self`?
    pub fn contains_ball(&self, o: &Ball) -> bool {
        if o.rad > self.rad {
            return false;
        }
        let dr = self.re.sub(&o.re);
        let di = self.im.sub(&o.im);
        let d2 = dr.mul(&dr).add(&di.mul(&di));
        let r = self.rad.sub(&o.rad);
        d2 <= r.mul(&r)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn re_rational(&self) -> BigRational {
        self.re.to_rational()
    }
}

/// Ceiling of `log2(x)` for a positive rational, as an integer.
pub fn ceil_log2_rational(x: &BigRational) -> i64 {
    assert!(x.is_positive());
    let n = x.numer().bits() as i64;
    let d = x.denom().bits() as i64;
    // 2^(n-1) <= num < 2^n, 2^(d-1) <= den < 2^d
    n - d + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_round_trip() {
        for x in [0.0, 1.0, -3.5, 1e-300, 123456.789] {
            assert_eq!(Dyadic::from_f64(x).to_f64(), x);
        }
    }

    #[test]
    fn ordering_and_rounding() {
        let a = Dyadic::from_f64(1.75);
        let b = Dyadic::from_f64(-2.5);
        assert!(b < a);
        assert_eq!(a.round(1, Round::Floor).to_f64(), 1.0);
        assert_eq!(a.round(1, Round::Ceil).to_f64(), 2.0);
        assert_eq!(Dyadic::from_int(16).sqrt(10, Round::Floor).to_f64(), 4.0);
    }

    #[test]
    fn ball_inverse_encloses() {
        let third = Ball::from_rational(&BigRational::new(1.into(), 3.into()), 80);
        let inv = third.inv(80).unwrap();
        let three = Ball::from_int(&BigInt::from(3));
        assert!(inv.overlaps(&three));
        assert!(inv.rad.to_f64() < 1e-20);
    }

    #[test]
    fn ball_power_stays_tight() {
        let z = Ball::exact(Dyadic::from_f64(0.6), Dyadic::from_f64(0.8));
        let p = z.pow(10_000, 200);
        let m = p.abs_upper().to_f64();
        assert!((m - 1.0).abs() < 1e-6, "{m}");
        assert!(p.rad.to_f64() < 1e-30);
    }
}
