//! Simple number fields `Q[t]/(q)` and their elements.
//!
//! Each eigenvalue class of a loop matrix gets its own field generated by the
//! eigenvalue; all conjugate eigenvalues share the symbolic element and differ
//! only in the embedding chosen when a complex value is needed.

use super::algebraic::AlgebraicNumber;
use super::dyadic::{Ball, Dyadic};
use super::factor::factor;
use super::field::{fpoly, rat, Field};
use super::matrix::RatMatrix;
use super::poly::IntPoly;
use super::roots::isolate;
use num_rational::BigRational;
use num_traits::Zero;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, PartialEq, Eq)]
pub struct NumberField {
    poly: IntPoly,
    modulus: Vec<BigRational>,
}

impl NumberField {
    /// Field generated by a root of the irreducible polynomial `q`.
    pub fn new(q: &IntPoly) -> Arc<Self> {
        let poly = q.primitive();
        let modulus = fpoly::monic(&poly.to_rational());
        Arc::new(NumberField { poly, modulus })
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    /// The generator `t`.
    pub fn gen(self: &Arc<Self>) -> NfElem {
        NfElem::from_poly(self, vec![rat(0), rat(1)])
    }

    pub fn from_rational(self: &Arc<Self>, q: &BigRational) -> NfElem {
        NfElem::from_poly(self, vec![q.clone()])
    }

    pub fn zero(self: &Arc<Self>) -> NfElem {
        NfElem::from_poly(self, Vec::new())
    }

    pub fn one(self: &Arc<Self>) -> NfElem {
        NfElem::from_poly(self, vec![rat(1)])
    }

    /// The distinct complex embeddings, as the roots of the defining polynomial.
    pub fn embeddings(&self) -> Vec<AlgebraicNumber> {
        isolate(&self.poly, None)
            .into_iter()
            .map(|d| AlgebraicNumber::from_irreducible(self.poly.clone(), d))
            .collect()
    }
}

#[derive(Clone)]
pub struct NfElem {
    field: Arc<NumberField>,
    coeffs: Vec<BigRational>,
}

impl NfElem {
    pub fn from_poly(field: &Arc<NumberField>, p: Vec<BigRational>) -> NfElem {
        let mut p = p;
        fpoly::trim(&mut p);
        let coeffs = if p.len() >= field.modulus.len() { fpoly::rem(&p, &field.modulus) } else { p };
        NfElem { field: field.clone(), coeffs }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    /// Coordinates in the power basis `1, t, t^2, ...`, padded to the field degree.
    pub fn coords(&self) -> Vec<BigRational> {
        let mut c = self.coeffs.clone();
        c.resize(self.field.degree(), BigRational::zero());
        c
    }

    pub fn poly(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self.coeffs.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    /// Matrix of multiplication by this element in the power basis (acting on columns).
    pub fn mult_matrix(&self) -> RatMatrix {
        let n = self.field.degree();
        let mut m = RatMatrix::filled(n, n, &BigRational::zero());
        let mut basis = vec![rat(1)];
        for j in 0..n {
            let prod = NfElem::from_poly(&self.field, fpoly::mul(&self.coeffs, &basis)).coords();
            for (i, c) in prod.into_iter().enumerate() {
                m.set(i, j, c);
            }
            basis.insert(0, BigRational::zero());
        }
        m
    }

    /// Trace down to Q (sum over all embeddings).
    pub fn trace(&self) -> BigRational {
        let m = self.mult_matrix();
        (0..m.rows()).fold(BigRational::zero(), |acc, i| acc + m.get(i, i))
    }

    /// Ball enclosure of the image under the embedding sending `t` to `root`.
    pub fn approx_at(&self, root: &AlgebraicNumber, bits: i64) -> Ball {
        let mut extra = 8i64;
        loop {
            let r = root.approx(bits + extra);
            let prec = (bits + extra + 64) as u64;
            let mut acc = Ball::zero();
            for c in self.coeffs.iter().rev() {
                acc = acc.mul(&r, prec).add(&Ball::from_rational(c, prec), prec);
            }
            if acc.rad <= Dyadic::pow2(-bits) {
                return acc;
            }
            extra += 32 + extra / 2;
        }
    }

    /// Exact image under the embedding sending `t` to `root` (a root of the field polynomial).
    pub fn embed(&self, root: &AlgebraicNumber) -> AlgebraicNumber {
        if let Some(q) = self.as_rational() {
            return AlgebraicNumber::from_rational(q);
        }
        if self.coeffs.len() == 2 && self.coeffs[0].is_zero() && self.coeffs[1] == rat(1) {
            return root.clone();
        }
        let cp = IntPoly::from_rational(&self.mult_matrix().charpoly());
        let cands: Vec<IntPoly> = factor(&cp).into_iter().map(|(f, _)| f).collect();
        let me = self.clone();
        let root = root.clone();
        identify_embedded(cands, move |bits| me.approx_at(&root, bits))
    }
}

fn identify_embedded(cands: Vec<IntPoly>, enclosure: impl Fn(i64) -> Ball) -> AlgebraicNumber {
    let mut cands = cands;
    let mut bits = 32;
    while cands.len() > 1 && bits <= 512 {
        let e = enclosure(bits);
        cands.retain(|f| f.eval_ball(&e, (bits + 64) as u64).contains_zero());
        bits *= 2;
    }
    let mut pool = Vec::new();
    for f in cands {
        for d in isolate(&f, None) {
            pool.push((f.clone(), d));
        }
    }
    let mut bits = 24;
    loop {
        let e = enclosure(bits);
        pool.retain_mut(|(f, d)| {
            if d.ball.rad > Dyadic::pow2(-bits) {
                *d = super::roots::refine(f, d, bits);
            }
            d.ball.overlaps(&e)
        });
        assert!(!pool.is_empty(), "embedding matches no candidate root");
        if pool.len() == 1 {
            let (f, d) = pool.pop().unwrap();
            return AlgebraicNumber::from_irreducible(f, d);
        }
        bits *= 2;
    }
}

impl fmt::Debug for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{i}")?,
            }
        }
        Ok(())
    }
}

impl PartialEq for NfElem {
    fn eq(&self, o: &Self) -> bool {
        self.coeffs == o.coeffs && (Arc::ptr_eq(&self.field, &o.field) || self.field == o.field)
    }
}

impl Field for NfElem {
    fn zero_like(&self) -> Self {
        self.field.zero()
    }
    fn one_like(&self) -> Self {
        self.field.one()
    }
    fn is_zero_elem(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        NfElem { field: self.field.clone(), coeffs: fpoly::add(&self.coeffs, &o.coeffs) }
    }
    fn sub(&self, o: &Self) -> Self {
        NfElem { field: self.field.clone(), coeffs: fpoly::sub(&self.coeffs, &o.coeffs) }
    }
    fn mul(&self, o: &Self) -> Self {
        NfElem::from_poly(&self.field, fpoly::mul(&self.coeffs, &o.coeffs))
    }
    fn neg(&self) -> Self {
        NfElem { field: self.field.clone(), coeffs: fpoly::neg(&self.coeffs) }
    }
    fn inv(&self) -> Option<Self> {
        if self.coeffs.is_empty() {
            return None;
        }
        let (g, s, _) = fpoly::xgcd(&self.coeffs, &self.field.modulus, &rat(1));
        debug_assert_eq!(g.len(), 1, "defining polynomial is not irreducible");
        Some(NfElem::from_poly(&self.field, s))
    }
    fn from_rational_like(&self, q: &BigRational) -> Self {
        self.field.from_rational(q)
    }
}
