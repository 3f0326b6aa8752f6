//! Integer search over the witness region: branch enumeration, exact
//! equality parameterization, Fourier-Motzkin relaxation and lattice
//! enumeration.

use super::certify::{certify_point, CertifyConfig, CertifyOutcome, PointCertificate};
use crate::algebra::algebraic::AlgebraicNumber;
use crate::algebra::field::Field;
use crate::algebra::lattice::solve_integer;
use crate::algebra::matrix::RatMatrix;
use crate::algebra::numfield::NfElem;
use crate::loop_ir::vec_json;
use crate::witness::{AffineForm, Branch, Constraint, Membership, WitnessSet};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value as Json};
use std::sync::atomic::{AtomicBool, Ordering};

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub radius_schedule: Vec<u64>,
    /// Largest integer box enumerated for a bounded leaf.
    pub bounded_cap: u64,
    /// Largest number of lattice points scanned per leaf and radius.
    pub search_cap: u64,
    pub max_leaves: usize,
    /// Fourier-Motzkin gives up beyond this many inequalities.
    pub fm_cap: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { radius_schedule: vec![2, 8, 32, 128], bounded_cap: 100_000, search_cap: 200_000, max_leaves: 4096, fm_cap: 60 }
    }
}

/// `u = origin + sum_j z_j basis[j]` with `z` integral.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    pub origin: Vec<BigInt>,
    pub basis: Vec<Vec<BigInt>>,
}

impl Lattice {
    pub fn point(&self, z: &[i64]) -> Vec<BigInt> {
        let mut u = self.origin.clone();
        for (zj, b) in z.iter().zip(&self.basis) {
            if *zj != 0 {
                for (x, y) in u.iter_mut().zip(b) {
                    *x += y * BigInt::from(*zj);
                }
            }
        }
        u
    }

    pub fn to_json(&self) -> Json {
        json!({"origin": vec_json(&self.origin), "basis": self.basis.iter().map(|b| vec_json(b)).collect::<Vec<_>>()})
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EmptyReason {
    /// Some guard row has no branch that can hold.
    NoLiveBranch,
    /// Equalities inconsistent over Q.
    InconsistentEqualities,
    /// Equalities have no integer solution.
    NoIntegerSolution,
    /// A strict sign condition is constant and fails.
    ConstantSign,
    /// Every alternative of a nonvanishing condition vanishes identically.
    VanishingClass,
    /// Linear relaxation infeasible over the reals.
    RealInfeasible,
}

#[derive(Clone, Debug)]
pub enum LeafStatus {
    Empty(EmptyReason),
    /// Bounded relaxation whose integer points were all checked.
    Exhausted { points: u64 },
    Open,
}

#[derive(Clone, Debug)]
pub struct Leaf {
    pub labels: Vec<String>,
    pub status: LeafStatus,
    pub lattice: Option<Lattice>,
}

impl Leaf {
    pub fn to_json(&self) -> Json {
        let status = match &self.status {
            LeafStatus::Empty(r) => json!({"kind": "empty", "reason": r}),
            LeafStatus::Exhausted { points } => json!({"kind": "exhausted", "points": points}),
            LeafStatus::Open => json!({"kind": "open"}),
        };
        json!({"branches": self.labels, "status": status, "lattice": self.lattice.as_ref().map(|l| l.to_json())})
    }
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found { point: Vec<BigInt>, certificate: PointCertificate },
    /// Every leaf is empty or exhausted.
    Empty,
    /// Nothing found; `inconclusive` is set when a candidate could not be decided.
    Exhausted { radius: u64, inconclusive: bool },
    TooManyLeaves,
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub outcome: SearchOutcome,
    pub leaves: Vec<Leaf>,
    pub radius: u64,
    pub points_checked: u64,
}

fn lift_affine(form: &AffineForm) -> Vec<Vec<BigRational>> {
    form.rational_rows()
}

fn consistent(rows: &[Vec<BigRational>]) -> bool {
    if rows.is_empty() {
        return true;
    }
    let n = rows[0].len() - 1;
    let a = RatMatrix::from_rows(rows.iter().map(|r| r[..n].to_vec()).collect());
    let ab = RatMatrix::from_rows(rows.to_vec());
    a.rank() == ab.rank()
}

/// Cheap necessary conditions of one branch, ignoring the others.
fn locally_dead(b: &Branch) -> bool {
    b.constraints.iter().any(|c| match c {
        Constraint::Zero(f) => f.is_constant() && !f.constant().is_zero_elem(),
        Constraint::Positive { form, at } => {
            form.is_constant() && crate::spectral::CoefficientData::real_sign(form.constant(), at) <= 0
        }
        Constraint::NonZero(fs) => fs.iter().all(|f| f.is_constant() && f.constant().is_zero_elem()),
        Constraint::Torus { .. } => false,
    })
}

/// Enumerate choices of one branch per `(row, phase)` with pruning on the
/// rational equality system.
type RawLeaf = (Vec<String>, Vec<Constraint>, Vec<Vec<BigRational>>, Option<EmptyReason>);

fn leaves(w: &WitnessSet, max: usize) -> Option<Vec<RawLeaf>> {
    let mut slots: Vec<Vec<Branch>> = Vec::new();
    for i in 0..w.phases.len() {
        for r in 0..w.rows.len() {
            let bs: Vec<Branch> = w
                .branches(r, i)
                .into_iter()
                .filter(|b| !locally_dead(b))
                .map(|mut b| {
                    b.label = format!("row {r} phase {i}: {}", b.label);
                    b
                })
                .collect();
            if bs.is_empty() {
                return Some(vec![(vec![format!("row {r} phase {i}: no live branch")], vec![], vec![], Some(EmptyReason::NoLiveBranch))]);
            }
            slots.push(bs);
        }
    }
    let mut out = Vec::new();
    let mut stack: Vec<(usize, Vec<String>, Vec<Constraint>, Vec<Vec<BigRational>>)> = vec![(0, vec![], vec![], vec![])];
    while let Some((depth, labels, cons, eqs)) = stack.pop() {
        if depth == slots.len() {
            out.push((labels, cons, eqs, None));
            if out.len() > max {
                return None;
            }
            continue;
        }
        for b in slots[depth].iter().rev() {
            let mut e2 = eqs.clone();
            for c in &b.constraints {
                if let Constraint::Zero(f) = c {
                    e2.extend(lift_affine(f));
                }
            }
            let ok = e2.len() == eqs.len() || consistent(&e2);
            let mut l2 = labels.clone();
            l2.push(b.label.clone());
            let mut c2 = cons.clone();
            c2.extend(b.constraints.iter().cloned());
            if ok {
                stack.push((depth + 1, l2, c2, e2));
            } else {
                out.push((l2, vec![], vec![], Some(EmptyReason::InconsistentEqualities)));
                if out.len() > max {
                    return None;
                }
            }
        }
    }
    Some(out)
}

fn integerize(row: &[BigRational]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect()
}

/// Form in the lattice coordinates `z` (last entry constant).
fn substitute(form: &AffineForm, lat: &Lattice) -> Vec<NfElem> {
    let k = form.coeffs[0].field().clone();
    let d = lat.origin.len();
    let lift = |x: &BigInt| k.from_rational(&BigRational::from_integer(x.clone()));
    let mut out = Vec::with_capacity(lat.basis.len() + 1);
    for b in &lat.basis {
        out.push((0..d).fold(k.zero(), |acc, l| if b[l].is_zero() { acc } else { acc.add(&form.coeffs[l].mul(&lift(&b[l]))) }));
    }
    out.push((0..d).fold(form.coeffs[d].clone(), |acc, l| {
        if lat.origin[l].is_zero() {
            acc
        } else {
            acc.add(&form.coeffs[l].mul(&lift(&lat.origin[l])))
        }
    }));
    out
}

fn parameterize(eqs: &[Vec<BigRational>], d: usize) -> Result<Lattice, EmptyReason> {
    if eqs.is_empty() {
        return Ok(Lattice { origin: vec![BigInt::zero(); d], basis: crate::algebra::lattice::identity(d) });
    }
    if !consistent(eqs) {
        return Err(EmptyReason::InconsistentEqualities);
    }
    let a: Vec<Vec<BigInt>> = eqs.iter().map(|r| integerize(r)).collect();
    let mat: Vec<Vec<BigInt>> = a.iter().map(|r| r[..d].to_vec()).collect();
    let rhs: Vec<BigInt> = a.iter().map(|r| -r[d].clone()).collect();
    solve_integer(&mat, &rhs).map(|(origin, basis)| Lattice { origin, basis }).ok_or(EmptyReason::NoIntegerSolution)
}

/// Lattice of the leaf's equalities, closed under one implied rule: on the
/// full torus, a vanishing mean forces every oscillating coefficient to vanish.
fn refine(cons: &[Constraint], mut eqs: Vec<Vec<BigRational>>, d: usize) -> Result<Lattice, EmptyReason> {
    loop {
        let lat = parameterize(&eqs, d)?;
        let mut added = false;
        for c in cons {
            if let Constraint::Torus { alpha0, betas, torus, .. } = c {
                if !torus.is_full() || !substitute(alpha0, &lat).iter().all(|x| x.is_zero_elem()) {
                    continue;
                }
                for (b, _) in betas {
                    if !substitute(b, &lat).iter().all(|x| x.is_zero_elem()) {
                        eqs.extend(b.rational_rows());
                        added = true;
                    }
                }
            }
        }
        if !added {
            return Ok(lat);
        }
    }
}

/// `sum a_j z_j + a_k (> or >=) 0` over real algebraic coefficients.
#[derive(Clone, Debug)]
struct Ineq {
    a: Vec<AlgebraicNumber>,
    strict: bool,
}

impl Ineq {
    fn vars(&self) -> usize {
        self.a.len() - 1
    }
    fn is_trivial(&self) -> bool {
        self.a[..self.vars()].iter().all(|x| x.is_zero())
    }
    fn violated_constant(&self) -> bool {
        let s = self.a[self.vars()].sign();
        s < 0 || (s == 0 && self.strict)
    }
    fn f64s(&self) -> Vec<f64> {
        self.a.iter().map(|x| x.to_f64().0).collect()
    }
}

fn embed_all(f: &[NfElem], at: &AlgebraicNumber) -> Vec<AlgebraicNumber> {
    f.iter().map(|c| c.embed(at)).collect()
}

/// Relaxation of a leaf by real linear inequalities in `z`.
fn relax(cons: &[Constraint], lat: &Lattice) -> Result<Vec<Ineq>, EmptyReason> {
    let mut out = Vec::new();
    for c in cons {
        match c {
            Constraint::Zero(_) => {}
            Constraint::Positive { form, at } => {
                let a = embed_all(&substitute(form, lat), at);
                out.push(Ineq { a, strict: true });
            }
            Constraint::NonZero(fs) => {
                let all_zero = fs.iter().all(|f| substitute(f, lat).iter().all(|c| c.is_zero_elem()));
                if all_zero {
                    return Err(EmptyReason::VanishingClass);
                }
            }
            Constraint::Torus { alpha0, rho, betas, torus } => {
                // the mean of f over the torus is alpha0
                let a0 = embed_all(&substitute(alpha0, lat), rho);
                out.push(Ineq { a: a0.clone(), strict: false });
                if torus.is_full() {
                    // f(z) >= 0 at z_j in {1, i, -1, -i}, averaging the other coordinates
                    for (b, at) in betas {
                        let bv = embed_all(&substitute(b, lat), at);
                        let re: Vec<AlgebraicNumber> = bv.iter().map(|x| x.re().affine(&BigRational::from_integer(2.into()), &BigRational::zero())).collect();
                        let im: Vec<AlgebraicNumber> = bv.iter().map(|x| x.im().affine(&BigRational::from_integer(2.into()), &BigRational::zero())).collect();
                        for part in [&re, &im] {
                            if part.iter().all(|x| x.is_zero()) {
                                continue;
                            }
                            out.push(Ineq { a: a0.iter().zip(part).map(|(x, y)| x.add(y)).collect(), strict: false });
                            out.push(Ineq { a: a0.iter().zip(part).map(|(x, y)| x.sub(y)).collect(), strict: false });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

enum Fm {
    Infeasible,
    /// Per-variable closed bounds, `None` when unbounded in that direction.
    Bounds(Vec<(Option<f64>, Option<f64>)>),
    GaveUp,
}

fn eliminate(sys: &[Ineq], var: usize, cap: usize) -> Option<Vec<Ineq>> {
    let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
    for q in sys {
        match q.a[var].sign() {
            1 => pos.push(q),
            -1 => neg.push(q),
            _ => rest.push(q.clone()),
        }
    }
    if rest.len() + pos.len() * neg.len() > cap {
        return None;
    }
    for p in &pos {
        for n in &neg {
            let cp = n.a[var].neg();
            let cn = p.a[var].clone();
            let a: Vec<AlgebraicNumber> = p.a.iter().zip(&n.a).enumerate().map(|(j, (x, y))| if j == var { AlgebraicNumber::zero() } else { x.mul(&cp).add(&y.mul(&cn)) }).collect();
            rest.push(Ineq { a, strict: p.strict || n.strict });
        }
    }
    Some(rest)
}

fn infeasible(sys: &[Ineq]) -> bool {
    sys.iter().any(|q| q.is_trivial() && q.violated_constant())
}

fn fourier_motzkin(sys: &[Ineq], k: usize, cap: usize) -> Fm {
    if sys.len() > cap {
        return Fm::GaveUp;
    }
    // feasibility: eliminate everything
    let mut cur = sys.to_vec();
    for v in 0..k {
        match eliminate(&cur, v, cap) {
            Some(n) => cur = n,
            None => return Fm::GaveUp,
        }
        if infeasible(&cur) {
            return Fm::Infeasible;
        }
    }
    if infeasible(&cur) {
        return Fm::Infeasible;
    }
    let mut bounds = Vec::with_capacity(k);
    for keep in 0..k {
        let mut cur = sys.to_vec();
        for v in (0..k).filter(|&v| v != keep) {
            match eliminate(&cur, v, cap) {
                Some(n) => cur = n,
                None => return Fm::GaveUp,
            }
        }
        let (mut lo, mut hi): (Option<f64>, Option<f64>) = (None, None);
        for q in &cur {
            let s = q.a[keep].sign();
            if s == 0 {
                continue;
            }
            let x = q.a[k].div(&q.a[keep]).unwrap().neg().to_f64().0;
            if s > 0 {
                lo = Some(lo.map_or(x, |l: f64| l.max(x)));
            } else {
                hi = Some(hi.map_or(x, |h: f64| h.min(x)));
            }
        }
        bounds.push((lo, hi));
    }
    Fm::Bounds(bounds)
}

fn prefilter_ok(ineqs: &[Vec<f64>], z: &[i64]) -> bool {
    ineqs.iter().all(|a| {
        let k = a.len() - 1;
        let mut s = a[k];
        let mut scale = a[k].abs();
        for j in 0..k {
            s += a[j] * z[j] as f64;
            scale += (a[j] * z[j] as f64).abs();
        }
        s >= -1e-9 * (1.0 + scale)
    })
}

fn decode(mut idx: u64, ranges: &[(i64, i64)]) -> Vec<i64> {
    let mut z = Vec::with_capacity(ranges.len());
    for &(lo, hi) in ranges {
        let w = (hi - lo + 1) as u64;
        z.push(lo + (idx % w) as i64);
        idx /= w;
    }
    z
}

fn box_size(ranges: &[(i64, i64)]) -> Option<u64> {
    ranges.iter().try_fold(1u64, |acc, &(lo, hi)| acc.checked_mul((hi - lo + 1).max(0) as u64))
}

enum Scan {
    Found(Vec<BigInt>, PointCertificate),
    None { checked: u64 },
}

/// Exact membership (then certification) over a box of lattice coordinates,
/// skipping the inner box `skip` if given.
fn scan(
    w: &WitnessSet,
    lat: &Lattice,
    ranges: &[(i64, i64)],
    skip: Option<i64>,
    pre: &[Vec<Vec<f64>>],
    ccfg: &CertifyConfig,
    inconclusive: &AtomicBool,
) -> Scan {
    let total = box_size(ranges).unwrap_or(0);
    let hit = (0..total).into_par_iter().find_map_first(|idx| {
        let z = decode(idx, ranges);
        if let Some(r) = skip {
            if z.iter().all(|x| x.abs() <= r) {
                return None;
            }
        }
        if !pre.iter().any(|p| prefilter_ok(p, &z)) {
            return None;
        }
        let u = lat.point(&z);
        match w.membership_int(&u) {
            Membership::In => match certify_point(w, &u, ccfg) {
                CertifyOutcome::Certified(c) => Some((u, c)),
                _ => {
                    inconclusive.store(true, Ordering::Relaxed);
                    None
                }
            },
            Membership::Inconclusive => {
                inconclusive.store(true, Ordering::Relaxed);
                None
            }
            Membership::Out => None,
        }
    });
    match hit {
        Some((u, c)) => Scan::Found(u, c),
        None => Scan::None { checked: total },
    }
}

/// Search the witness region of `w` for an integer point.
pub fn find_integer_point(w: &WitnessSet, cfg: &SearchConfig, ccfg: &CertifyConfig) -> SearchReport {
    let d = w.dim();
    let inconclusive = AtomicBool::new(false);
    let mut points = 0u64;
    // origin first
    let zero = vec![BigInt::zero(); d];
    match w.membership_int(&zero) {
        Membership::In => match certify_point(w, &zero, ccfg) {
            CertifyOutcome::Certified(c) => {
                return SearchReport { outcome: SearchOutcome::Found { point: zero, certificate: c }, leaves: vec![], radius: 0, points_checked: 1 };
            }
            _ => inconclusive.store(true, Ordering::Relaxed),
        },
        Membership::Inconclusive => inconclusive.store(true, Ordering::Relaxed),
        Membership::Out => {}
    }
    points += 1;
    let Some(raw) = leaves(w, cfg.max_leaves) else {
        return SearchReport { outcome: SearchOutcome::TooManyLeaves, leaves: vec![], radius: 0, points_checked: points };
    };
    let mut done = Vec::new();
    let mut open: Vec<(Lattice, Vec<Vec<f64>>)> = Vec::new();
    for (labels, cons, eqs, dead) in raw {
        let mut leaf = Leaf { labels, status: LeafStatus::Open, lattice: None };
        if let Some(r) = dead {
            leaf.status = LeafStatus::Empty(r);
            done.push(leaf);
            continue;
        }
        let lat = match refine(&cons, eqs, d) {
            Ok(l) => l,
            Err(r) => {
                leaf.status = LeafStatus::Empty(r);
                done.push(leaf);
                continue;
            }
        };
        leaf.lattice = Some(lat.clone());
        let k = lat.basis.len();
        let ineqs = match relax(&cons, &lat) {
            Ok(q) => q,
            Err(r) => {
                leaf.status = LeafStatus::Empty(r);
                done.push(leaf);
                continue;
            }
        };
        if ineqs.iter().any(|q| q.is_trivial() && q.violated_constant()) {
            leaf.status = LeafStatus::Empty(EmptyReason::ConstantSign);
            done.push(leaf);
            continue;
        }
        let pre: Vec<Vec<f64>> = ineqs.iter().map(|q| q.f64s()).collect();
        let fm = fourier_motzkin(&ineqs, k, cfg.fm_cap);
        match fm {
            Fm::Infeasible => {
                leaf.status = LeafStatus::Empty(EmptyReason::RealInfeasible);
                done.push(leaf);
                continue;
            }
            Fm::Bounds(b) if b.iter().all(|(l, h)| l.is_some() && h.is_some()) => {
                let ranges: Vec<(i64, i64)> = b
                    .iter()
                    .map(|(l, h)| {
                        let (l, h) = (l.unwrap(), h.unwrap());
                        let lo = (l - 1e-9 * (1.0 + l.abs())).floor() - 1.0;
                        let hi = (h + 1e-9 * (1.0 + h.abs())).ceil() + 1.0;
                        (lo.max(i64::MIN as f64 / 4.0) as i64, hi.min(i64::MAX as f64 / 4.0) as i64)
                    })
                    .collect();
                match box_size(&ranges) {
                    Some(n) if n <= cfg.bounded_cap => {
                        match scan(w, &lat, &ranges, None, std::slice::from_ref(&pre), ccfg, &inconclusive) {
                            Scan::Found(u, c) => {
                                done.push(leaf);
                                return SearchReport { outcome: SearchOutcome::Found { point: u, certificate: c }, leaves: done, radius: 0, points_checked: points + n };
                            }
                            Scan::None { checked } => {
                                points += checked;
                                leaf.status = LeafStatus::Exhausted { points: checked };
                                done.push(leaf);
                                continue;
                            }
                        }
                    }
                    _ => {}
                }
            }
            _ => {}
        }
        done.push(leaf);
        open.push((lat, pre));
    }
    if open.is_empty() {
        // a bounded leaf with an undecided point is not a proof
        let outcome = if inconclusive.load(Ordering::Relaxed) {
            SearchOutcome::Exhausted { radius: 0, inconclusive: true }
        } else {
            SearchOutcome::Empty
        };
        return SearchReport { outcome, leaves: done, radius: 0, points_checked: points };
    }
    // identical lattices are searched once
    let mut uniq: Vec<(Lattice, Vec<Vec<Vec<f64>>>)> = Vec::new();
    for (lat, pre) in open {
        match uniq.iter_mut().find(|(l, _)| *l == lat) {
            Some((_, pres)) => pres.push(pre),
            None => uniq.push((lat, vec![pre])),
        }
    }
    let mut radius = 0;
    let mut prev: Vec<Option<i64>> = vec![None; uniq.len()];
    for &r in &cfg.radius_schedule {
        let mut any = false;
        for (li, (lat, pres)) in uniq.iter().enumerate() {
            let k = lat.basis.len();
            let ranges = vec![(-(r as i64), r as i64); k];
            match box_size(&ranges) {
                Some(n) if n <= cfg.search_cap => {}
                _ => continue,
            }
            any = true;
            match scan(w, lat, &ranges, prev[li], pres, ccfg, &inconclusive) {
                Scan::Found(u, c) => {
                    return SearchReport { outcome: SearchOutcome::Found { point: u, certificate: c }, leaves: done, radius: r, points_checked: points };
                }
                Scan::None { checked } => points += checked,
            }
            prev[li] = Some(r as i64);
        }
        if !any {
            break;
        }
        radius = r;
    }
    SearchReport {
        outcome: SearchOutcome::Exhausted { radius, inconclusive: inconclusive.load(Ordering::Relaxed) },
        leaves: done,
        radius,
        points_checked: points,
    }
}
