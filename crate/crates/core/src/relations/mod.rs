//! Multiplicative relations `lambda^v = 1` among unit-modulus algebraic
//! numbers, the subtorus they cut out, and a density oracle.

use crate::algebra::algebraic::AlgebraicNumber;
use crate::algebra::factor::cyclotomic_order;
use crate::algebra::lattice::{hnf, smith, IntMatrix};
use crate::algebra::poly::IntPoly;
use crate::algebra::roots::isolate;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::f64::consts::TAU;

/// Search budget: number of exponent vectors tested numerically per radius.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 400_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationLattice {
    pub s: usize,
    /// Hermite normal form basis.
    pub basis: Vec<Vec<BigInt>>,
    /// Radius from the explicit Masser-type formula.
    pub search_bound: u64,
    /// Radius actually enumerated (at most `search_bound`).
    pub searched: u64,
    /// True when the enumeration was exhaustive up to `search_bound`, or the
    /// lattice was determined exactly without enumeration.
    pub complete: bool,
    /// The lattice did not change when the radius was doubled once.
    pub stable: bool,
}

impl RelationLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "s": self.s,
            "basis": self.basis.iter().map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "search_bound": self.search_bound,
            "searched": self.searched,
            "complete": self.complete,
            "stable": self.stable,
        })
    }
}

/// `max(8, ceil((D log H)^(c s^2)))`, saturating.
pub fn masser_bound(tuple: &[AlgebraicNumber], c: f64) -> u64 {
    let s = tuple.len();
    if s == 0 {
        return 8;
    }
    let d = tuple.iter().map(|x| x.degree()).max().unwrap_or(1) as f64;
    let h = tuple.iter().map(|x| x.min_poly().height()).max().unwrap().to_f64().unwrap_or(f64::MAX);
    let base = d * h.max(1.0).ln();
    if base <= 1.0 {
        return 8;
    }
    let m = base.powf(c * (s * s) as f64).ceil();
    if m >= u64::MAX as f64 {
        u64::MAX
    } else {
        (m as u64).max(8)
    }
}

/// `lambda^v` exactly.
pub fn power_product(tuple: &[AlgebraicNumber], v: &[BigInt]) -> AlgebraicNumber {
    let mut acc = AlgebraicNumber::one();
    for (x, e) in tuple.iter().zip(v) {
        if e.is_zero() {
            continue;
        }
        let p = x.pow(e.abs().to_u64().expect("exponent too large"));
        let p = if e.is_negative() { p.inv().expect("zero base") } else { p };
        acc = acc.mul(&p);
    }
    acc
}

/// Normalised arguments `arg(x) / 2pi` in `[0, 1)`.
fn angles(tuple: &[AlgebraicNumber]) -> Vec<f64> {
    tuple
        .iter()
        .map(|x| {
            let (re, im) = x.approx(80).to_f64();
            (im.atan2(re) / TAU).rem_euclid(1.0)
        })
        .collect()
}

fn in_lattice(basis: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    if basis.is_empty() {
        return v.iter().all(Zero::is_zero);
    }
    let mut rows = basis.to_vec();
    rows.push(v.to_vec());
    hnf(&rows) == basis
}

/// Candidates `v` with `||v||_inf <= m`, first nonzero coordinate positive,
/// passing the numeric test `sum v_i theta_i ~ 0 mod 1`.
fn numeric_candidates(theta: &[f64], m: i64) -> Vec<Vec<i64>> {
    let s = theta.len();
    let tol = 1e-9;
    (-m..=m)
        .into_par_iter()
        .flat_map_iter(|lead| {
            let mut out = Vec::new();
            let mut v = vec![0i64; s];
            v[0] = lead;
            enumerate_tail(theta, m, 1, &mut v, lead as f64 * theta[0], tol, &mut out);
            out
        })
        .filter(|v: &Vec<i64>| v.iter().find(|x| **x != 0).is_some_and(|x| *x > 0))
        .collect()
}

fn enumerate_tail(theta: &[f64], m: i64, pos: usize, v: &mut Vec<i64>, acc: f64, tol: f64, out: &mut Vec<Vec<i64>>) {
    if pos == theta.len() {
        let frac = acc - acc.round();
        let scale = 1.0 + v.iter().map(|x| x.unsigned_abs() as f64).sum::<f64>();
        if frac.abs() <= tol * scale {
            out.push(v.clone());
        }
        return;
    }
    for x in -m..=m {
        v[pos] = x;
        enumerate_tail(theta, m, pos + 1, v, acc + x as f64 * theta[pos], tol, out);
    }
    v[pos] = 0;
}

fn search(tuple: &[AlgebraicNumber], theta: &[f64], m: i64) -> Vec<Vec<BigInt>> {
    let mut cands = numeric_candidates(theta, m);
    cands.sort_by_key(|v| (v.iter().map(|x| x.abs()).max().unwrap_or(0), v.clone()));
    let mut basis: Vec<Vec<BigInt>> = Vec::new();
    for c in cands {
        let v: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
        if in_lattice(&basis, &v) {
            continue;
        }
        if power_product(tuple, &v).is_one_exact() {
            basis.push(v);
            basis = hnf(&basis);
        }
    }
    basis
}

trait IsOne {
    fn is_one_exact(&self) -> bool;
}

impl IsOne for AlgebraicNumber {
    fn is_one_exact(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_one())
    }
}

/// Relation lattice of a tuple of unit-modulus algebraic numbers.
pub fn relation_lattice(tuple: &[AlgebraicNumber], bound: u64) -> RelationLattice {
    relation_lattice_with_budget(tuple, bound, DEFAULT_ENUMERATION_BUDGET)
}

pub fn relation_lattice_with_budget(tuple: &[AlgebraicNumber], bound: u64, budget: u64) -> RelationLattice {
    let s = tuple.len();
    if s == 0 {
        return RelationLattice { s, basis: Vec::new(), search_bound: bound, searched: 0, complete: true, stable: true };
    }
    if s == 1 {
        // exact: the lattice is (r) for a primitive r-th root of unity, else {0}
        let basis = match cyclotomic_order(tuple[0].min_poly()) {
            Some(r) => vec![vec![BigInt::from(r)]],
            None => Vec::new(),
        };
        return RelationLattice { s, basis, search_bound: bound, searched: bound, complete: true, stable: true };
    }
    let theta = angles(tuple);
    // radius with (2m+1)^s <= budget
    let per_axis = (budget as f64).powf(1.0 / s as f64);
    let cap = (((per_axis - 1.0) / 2.0).floor() as i64).max(1);
    let m = (bound.min(i64::MAX as u64) as i64).min(cap);
    let basis = search(tuple, &theta, m);
    let doubled = search(tuple, &theta, 2 * m);
    let stable = doubled == basis;
    RelationLattice {
        s,
        basis: if stable { basis } else { doubled },
        search_bound: bound,
        searched: if stable { m as u64 } else { 2 * m as u64 },
        complete: (m as u64) >= bound,
        stable,
    }
}

/// `{z in T^s : z^v = 1 for every basis vector v}` as a finite union of
/// translates of a connected subtorus.
#[derive(Clone, Debug)]
pub struct TorusGroup {
    pub s: usize,
    pub relations: Vec<Vec<BigInt>>,
    /// Elementary divisors of the relation matrix.
    pub invariants: Vec<BigInt>,
    /// Unimodular column transform: `theta = V phi`.
    pub v: IntMatrix,
    pub free_rank: usize,
}

/// A torus point given by rational angles (finite part) and free angles.
pub struct TorusPoint {
    pub angles: Vec<f64>,
}

impl TorusGroup {
    pub fn full(s: usize) -> TorusGroup {
        torus_group(&RelationLattice {
            s,
            basis: Vec::new(),
            search_bound: 0,
            searched: 0,
            complete: true,
            stable: true,
        })
    }

    /// Number of connected components.
    pub fn components(&self) -> BigInt {
        self.invariants.iter().fold(BigInt::one(), |a, d| a * d)
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_full(&self) -> bool {
        self.relations.is_empty()
    }

    /// Coset representatives: each is a list of `k_i` with `0 <= k_i < d_i`.
    pub fn cosets(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![Vec::new()];
        for d in &self.invariants {
            let d = d.to_u64().expect("too many components");
            let mut next = Vec::new();
            for p in &out {
                for k in 0..d {
                    let mut q: Vec<BigInt> = p.clone();
                    q.push(BigInt::from(k));
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }

    /// Rational angle `(num, den)` of coordinate `j` of the finite part for coset `k`.
    pub fn coset_angle(&self, k: &[BigInt], j: usize) -> (BigInt, BigInt) {
        let mut den = BigInt::one();
        for d in &self.invariants {
            den = den.lcm(d);
        }
        let mut num = BigInt::zero();
        for (i, (ki, di)) in k.iter().zip(&self.invariants).enumerate() {
            num += &self.v[j][i] * ki * (&den / di);
        }
        (num.mod_floor(&den), den)
    }

    /// Monomial exponents `g_j` of the free part: `z_j = zeta_j * prod_i w_i^{g_j[i]}`.
    pub fn free_exponents(&self, j: usize) -> Vec<BigInt> {
        let r = self.invariants.len();
        (r..self.s).map(|i| self.v[j][i].clone()).collect()
    }

    /// Angles `theta_j` of the point with coset `k` and free angles `phi`.
    pub fn point(&self, k: &[BigInt], phi: &[f64]) -> Vec<f64> {
        (0..self.s)
            .map(|j| {
                let (n, d) = self.coset_angle(k, j);
                let base = n.to_f64().unwrap() / d.to_f64().unwrap();
                let free: f64 =
                    self.free_exponents(j).iter().zip(phi).map(|(g, p)| g.to_f64().unwrap() * p).sum();
                (base + free).rem_euclid(1.0)
            })
            .collect()
    }

    /// Largest violation `|frac(v . theta)|` of a defining relation.
    pub fn residual(&self, theta: &[f64]) -> f64 {
        self.relations
            .iter()
            .map(|v| {
                let x: f64 = v.iter().zip(theta).map(|(a, t)| a.to_f64().unwrap() * t).sum();
                (x - x.round()).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "s": self.s,
            "relations": self.relations.iter().map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "components": self.components().to_string(),
            "free_rank": self.free_rank,
            "parameterization": (0..self.s).map(|j| json!({
                "free_exponents": self.free_exponents(j).iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

pub fn torus_group(lat: &RelationLattice) -> TorusGroup {
    let s = lat.s;
    if lat.basis.is_empty() {
        return TorusGroup {
            s,
            relations: Vec::new(),
            invariants: Vec::new(),
            v: crate::algebra::lattice::identity(s),
            free_rank: s,
        };
    }
    let sm = smith(&lat.basis);
    let invariants = sm.invariants();
    let free_rank = s - invariants.len();
    TorusGroup { s, relations: lat.basis.clone(), invariants, v: sm.v, free_rank }
}

/// Cyclotomic polynomial `Phi_n`.
pub fn cyclotomic(n: u64) -> IntPoly {
    let mut p = IntPoly::x_pow_minus_one(n as usize);
    for d in 1..n {
        if n % d == 0 {
            p = p.div_exact(&cyclotomic(d)).expect("cyclotomic division");
        }
    }
    p
}

/// `exp(2 pi i num/den)` exactly.
pub fn root_of_unity(num: &BigInt, den: &BigInt) -> AlgebraicNumber {
    let g = num.gcd(den);
    let (n, d) = ((num / &g).mod_floor(&(den / &g)), den / &g);
    let d64 = d.to_u64().expect("order too large");
    if d64 == 1 {
        return AlgebraicNumber::one();
    }
    let phi = cyclotomic(d64);
    let ang = TAU * n.to_f64().unwrap() / d64 as f64;
    let (c, s) = (ang.cos(), ang.sin());
    let disc = isolate(&phi, None)
        .into_iter()
        .min_by(|a, b| {
            let (ar, ai) = a.ball.to_f64();
            let (br, bi) = b.ball.to_f64();
            let da = (ar - c).hypot(ai - s);
            let db = (br - c).hypot(bi - s);
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    AlgebraicNumber::from_irreducible(phi, disc)
}

/// Least `n <= n_max` with `max_j |lambda_j^n - z_j| <= eps`, where the target
/// is given by angles. Test oracle only.
pub fn orbit_approach(tuple: &[AlgebraicNumber], target: &[f64], eps: f64, n_max: u64) -> Option<u64> {
    let theta = angles(tuple);
    // chord length |e^{2 pi i a} - e^{2 pi i b}| = 2 sin(pi |a - b|)
    (0..=n_max).find(|&n| {
        theta.iter().zip(target).all(|(t, z)| {
            let x = (n as f64 * t - z).rem_euclid(1.0);
            let dist = x.min(1.0 - x);
            2.0 * (std::f64::consts::PI * dist).sin() <= eps
        })
    })
}

/// Normalised angles of a tuple, exposed for reports and tests.
pub fn tuple_angles(tuple: &[AlgebraicNumber]) -> Vec<f64> {
    angles(tuple)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn mu() -> AlgebraicNumber {
        // (3 + 4i) / 5
        let p = IntPoly::from_i64(&[5, -6, 5]);
        let d = isolate(&p, None).into_iter().find(|d| d.ball.im.signum() > 0).unwrap();
        AlgebraicNumber::from_irreducible(p, d)
    }

    #[test]
    fn bound_floor() {
        assert_eq!(masser_bound(&[], 2.0), 8);
        assert!(masser_bound(&[mu()], 2.0) >= 8);
        assert!(masser_bound(&[mu(), mu().pow(2)], 2.0) > masser_bound(&[mu()], 2.0));
    }

    #[test]
    fn single_entries() {
        assert!(relation_lattice(&[mu()], 8).basis.is_empty());
        let l = relation_lattice(&[AlgebraicNumber::i()], 8);
        assert_eq!(l.basis, vec![vec![BigInt::from(4)]]);
        let t = torus_group(&l);
        assert!(t.is_finite());
        assert_eq!(t.components(), BigInt::from(4));
    }

    #[test]
    fn planted_square() {
        let m = mu();
        let l = relation_lattice(&[m.clone(), m.pow(2)], 8);
        assert_eq!(l.basis, vec![vec![BigInt::from(2), BigInt::from(-1)]]);
        assert!(l.stable);
        let t = torus_group(&l);
        assert_eq!(t.free_rank, 1);
        let g: Vec<i64> = (0..2).map(|j| t.free_exponents(j)[0].to_i64().unwrap()).collect();
        assert!(g == vec![1, 2] || g == vec![-1, -2]);
    }

    #[test]
    fn roots_of_unity_exact() {
        assert_eq!(cyclotomic(6), IntPoly::from_i64(&[1, -1, 1]));
        let z = root_of_unity(&BigInt::from(1), &BigInt::from(4));
        assert_eq!(z, AlgebraicNumber::i());
        let w = root_of_unity(&BigInt::from(1), &BigInt::from(2));
        assert_eq!(w.as_rational(), Some(&BigRational::from_integer(BigInt::from(-1))));
    }

    #[test]
    fn orbit_oracle() {
        assert_eq!(orbit_approach(&[AlgebraicNumber::one()], &[0.0], 0.01, 10), Some(0));
        assert_eq!(orbit_approach(&[AlgebraicNumber::i()], &[0.75], 1e-9, 10), Some(3));
        assert!(orbit_approach(&[mu()], &[0.5], 0.05, 100_000).is_some());
    }
}
