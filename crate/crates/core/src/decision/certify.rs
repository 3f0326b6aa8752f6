//! Per-point certificates: dominant term, explicit crossover and simulated prefix.

use crate::algebra::dyadic::{Ball, Dyadic, Round};
use crate::algebra::field::Field;
use crate::loop_ir::vec_json;
use crate::spectral::CoefficientData;
use crate::relations::TorusGroup;
use crate::witness::{dominant_component, torus_min, CaseShape, TorusPath, TorusSign, Value, WitnessSet};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value as Json};

const PREC: u64 = 96;

#[derive(Clone, Debug)]
pub struct CertifyConfig {
    /// Restart horizon for refutations (default `2 * dim * (L + 1)` on the homogenized dimension).
    pub m_max: Option<u64>,
    /// Largest number of original steps simulated.
    pub horizon: u64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig { m_max: None, horizon: 20_000 }
    }
}

/// How the sign of one guard sequence is settled from some index on.
#[derive(Clone, Debug, PartialEq)]
pub enum Dominance {
    /// Sequence is identically zero from the expansion threshold on.
    Zero,
    /// Leading term `a n^j rho^n` with `a > 0`.
    Ladder { class: usize, j: usize },
    /// `rho^n f(mu^n)` with `f >= min > 0` on the torus (or `min >= 0` and no tail).
    Torus { class: usize, path: TorusPath },
}

#[derive(Clone, Debug)]
pub struct SequenceBound {
    pub row: usize,
    pub phase: usize,
    pub dominance: Dominance,
    /// Lower bound on the leading coefficient (or torus minimum).
    pub lead_lower: f64,
    /// Upper bounds on the same-modulus and smaller-modulus tail constants.
    pub c_same: f64,
    pub c_lower: f64,
    /// Upper bound on `rho' / rho`.
    pub ratio: f64,
    /// Crossover, in steps of the depowered loop.
    pub n0: u64,
}

#[derive(Clone, Debug)]
pub struct PointCertificate {
    pub point: Vec<BigInt>,
    /// Guards hold at every step from `m` on.
    pub m: u64,
    pub nt_point: Vec<BigInt>,
    /// Number of original steps simulated exactly.
    pub simulated: u64,
    pub bounds: Vec<SequenceBound>,
}

#[derive(Clone, Debug)]
pub struct Refutation {
    pub point: Vec<BigInt>,
    pub row: usize,
    /// A step `n >= m_max` at which guard `row` fails.
    pub n: u64,
    pub m_max: u64,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub enum CertifyOutcome {
    Certified(PointCertificate),
    Refuted(Refutation),
    Inconclusive(String),
}

impl CertifyOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, CertifyOutcome::Certified(_))
    }
    pub fn is_refuted(&self) -> bool {
        matches!(self, CertifyOutcome::Refuted(_))
    }
}

impl PointCertificate {
    pub fn to_json(&self) -> Json {
        json!({
            "point": vec_json(&self.point),
            "m": self.m,
            "nt_point": vec_json(&self.nt_point),
            "simulated_steps": self.simulated,
            "sequences": self.bounds.iter().map(|b| json!({
                "row": b.row,
                "phase": b.phase,
                "dominance": match &b.dominance {
                    Dominance::Zero => json!({"kind": "zero"}),
                    Dominance::Ladder { class, j } => json!({"kind": "ladder", "class": class, "j": j}),
                    Dominance::Torus { class, path } => json!({"kind": "torus", "class": class, "path": path}),
                },
                "lead_lower": b.lead_lower,
                "c_same": b.c_same,
                "c_lower": b.c_lower,
                "ratio": b.ratio,
                "n0": b.n0,
            })).collect::<Vec<_>>(),
        })
    }
}

impl Refutation {
    pub fn to_json(&self) -> Json {
        json!({"point": vec_json(&self.point), "row": self.row, "n": self.n, "m_max": self.m_max, "reason": self.reason})
    }
}

fn hi(b: &Ball) -> Dyadic {
    b.abs_upper()
}

enum SeqResult {
    Bound(SequenceBound),
    Refuted(String),
    Unknown(String),
}

fn nonzero_lower(v: &Value) -> Dyadic {
    let mut bits = 32;
    loop {
        let l = v.ball(bits).abs_lower();
        if l.signum() > 0 || bits > 4096 {
            return l;
        }
        bits *= 2;
    }
}

/// Least `n >= start` with `lead * n > c_same + c_lower * n^e * q^n` (ladder,
/// `j >= 1`) or `lead > c_lower * n^e * q^n` (torus), given the right side is
/// eventually decreasing.
fn crossover(lead: &Dyadic, c_same: &Dyadic, c_lower: &Dyadic, e: u32, q: &Dyadic, ladder: bool, start: u64, limit: u64) -> Option<u64> {
    let holds = |n: u64| -> bool {
        let nn = Dyadic::from_int(n);
        let tail = if c_lower.is_zero() {
            Dyadic::zero()
        } else {
            let qn = Ball::real(q.clone()).pow(n, PREC);
            let qn_hi = qn.re.add(&qn.rad).round(PREC, Round::Ceil);
            let ne = Dyadic::from_int(BigInt::from(n).pow(e));
            c_lower.mul(&ne).round(PREC, Round::Ceil).mul(&qn_hi).round(PREC, Round::Ceil)
        };
        let left = if ladder { lead.mul(&nn) } else { lead.clone() };
        let right = if ladder { c_same.add(&tail) } else { tail };
        left > right
    };
    // the right side decreases once n > e / ln(1/q)
    let mut lo = start.max(1);
    if !c_lower.is_zero() && e > 0 {
        let lq = -q.to_f64().ln();
        if lq > 0.0 {
            lo = lo.max((e as f64 / lq).ceil() as u64 + 1);
        } else {
            return None;
        }
    }
    if holds(lo) {
        return Some(lo);
    }
    let mut hi_n = lo;
    loop {
        hi_n = hi_n.checked_mul(2)?;
        if hi_n > limit {
            return None;
        }
        if holds(hi_n) {
            break;
        }
    }
    let mut a = hi_n / 2; // fails
    let mut b = hi_n; // holds
    while b - a > 1 {
        let mid = a + (b - a) / 2;
        if holds(mid) {
            b = mid;
        } else {
            a = mid;
        }
    }
    Some(b)
}

fn analyze_sequence(w: &WitnessSet, r: usize, i: usize, v: &[BigRational], limit: u64) -> SeqResult {
    let row = &w.rows[r];
    let spec = &w.spec;
    let d = spec.dim as u64;
    let Some(ci) = dominant_component(spec, &row.coeffs, v) else {
        return SeqResult::Bound(SequenceBound {
            row: r,
            phase: i,
            dominance: Dominance::Zero,
            lead_lower: 0.0,
            c_same: 0.0,
            c_lower: 0.0,
            ratio: 0.0,
            n0: d,
        });
    };
    let val = |eig: usize, k: usize| {
        let e = &spec.eigenvalues[eig];
        Value::Emb(row.coeffs.form_value(e.factor, k, v), e.value.clone())
    };
    // tail from smaller classes
    let mut c_lower = Dyadic::zero();
    let mut k_lower = 0u32;
    let mut lower_class = None;
    for cj in ci + 1..spec.classes.len() {
        for &e in &spec.classes[cj].members {
            for k in 0..spec.eigenvalues[e].index {
                let x = val(e, k);
                if !x.is_zero() {
                    c_lower = c_lower.add(&hi(&x.ball(PREC as i64)));
                    k_lower = k_lower.max(k as u32);
                    lower_class.get_or_insert(cj);
                }
            }
        }
    }
    let ratio = match lower_class {
        None => Dyadic::zero(),
        Some(cj) => {
            let mut bits = 64;
            loop {
                let top = spec.classes[ci].modulus_squared.approx(bits);
                let low = spec.classes[cj].modulus_squared.approx(bits);
                let q2 = low.re.add(&low.rad).div(&top.re.sub(&top.rad), PREC, Round::Ceil);
                let q = q2.sqrt(PREC, Round::Ceil);
                if q < Dyadic::one() {
                    break q;
                }
                bits *= 2;
                if bits > 4096 {
                    return SeqResult::Unknown("cannot separate class moduli".into());
                }
            }
        }
    };
    let finish = |dominance: Dominance, lead: Dyadic, c_same: Dyadic, e: u32, ladder: bool| -> SeqResult {
        match crossover(&lead, &c_same, &c_lower, e, &ratio, ladder, d, limit) {
            Some(n0) => SeqResult::Bound(SequenceBound {
                row: r,
                phase: i,
                dominance,
                lead_lower: lead.to_f64(),
                c_same: c_same.to_f64(),
                c_lower: c_lower.to_f64(),
                ratio: ratio.to_f64(),
                n0,
            }),
            None => SeqResult::Unknown("crossover beyond the simulation horizon".into()),
        }
    };
    match &w.pieces[ci].shape {
        CaseShape::CaseII => SeqResult::Refuted(format!("class {ci} has no positive real eigenvalue: the sign changes infinitely often")),
        CaseShape::Unsupported(why) => SeqResult::Unknown(why.clone()),
        CaseShape::CaseIII { rho, t, complex, torus, .. } => {
            let re = &spec.eigenvalues[*rho];
            for j in (1..*t).rev() {
                let a = row.coeffs.form_value(re.factor, j, v);
                let s = CoefficientData::real_sign(&a, &re.value);
                if s < 0 {
                    return SeqResult::Refuted(format!("leading term of class {ci} is negative (n^{j})"));
                }
                if s > 0 {
                    let lead = nonzero_lower(&val(*rho, j));
                    let mut c_same = Dyadic::zero();
                    for k in 0..j {
                        c_same = c_same.add(&hi(&val(*rho, k).ball(PREC as i64)));
                    }
                    for &c in complex {
                        c_same = c_same.add(&hi(&val(c, 0).ball(PREC as i64)).mul_pow2(1));
                    }
                    let e = (k_lower + 1).saturating_sub(j as u32);
                    return finish(Dominance::Ladder { class: ci, j }, lead, c_same, e, true);
                }
            }
            let a0 = val(*rho, 0);
            let betas: Vec<Value> = complex.iter().map(|&c| val(c, 0)).collect();
            torus_case(ci, &a0, &betas, torus, &c_lower, k_lower, finish, d, r, i)
        }
        CaseShape::CaseI { rho, lambda } => {
            let f = spec.eigenvalues[*lambda].factor;
            if !row.coeffs.form_value(f, 1, v).is_zero_elem() {
                return SeqResult::Refuted(format!("class {ci} has an oscillating n*lambda^n term"));
            }
            torus_case(ci, &val(*rho, 0), &[val(*lambda, 0)], &TorusGroup::full(1), &c_lower, k_lower, finish, d, r, i)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn torus_case(
    ci: usize,
    a0: &Value,
    betas: &[Value],
    torus: &TorusGroup,
    c_lower: &Dyadic,
    k_lower: u32,
    finish: impl Fn(Dominance, Dyadic, Dyadic, u32, bool) -> SeqResult,
    d: u64,
    r: usize,
    i: usize,
) -> SeqResult {
    let tm = torus_min(a0, betas, torus);
    match tm.sign {
        TorusSign::Neg => return SeqResult::Refuted(format!("class {ci}: f(z) < 0 somewhere on the torus")),
        TorusSign::Inconclusive => return SeqResult::Unknown(format!("class {ci}: torus minimum undecided")),
        TorusSign::Nonneg => {}
    }
    let lower = match tm.path {
        TorusPath::Constant | TorusPath::ClosedForm => {
            let mut bits = 32i64;
            loop {
                let a = a0.ball(bits);
                let mut lo = a.re.sub(&a.rad);
                for b in betas {
                    lo = lo.sub(&b.ball(bits).abs_upper().mul_pow2(1));
                }
                if lo.signum() > 0 || bits > 1024 {
                    break lo;
                }
                bits *= 2;
            }
        }
        _ => Dyadic::zero(),
    };
    let dominance = Dominance::Torus { class: ci, path: tm.path };
    if lower.signum() > 0 {
        return finish(dominance, lower, Dyadic::zero(), k_lower, false);
    }
    if c_lower.is_zero() {
        // f(mu^n) >= 0 exactly and nothing else contributes
        return SeqResult::Bound(SequenceBound {
            row: r,
            phase: i,
            dominance,
            lead_lower: 0.0,
            c_same: 0.0,
            c_lower: 0.0,
            ratio: 0.0,
            n0: d,
        });
    }
    SeqResult::Unknown(format!("class {ci}: torus minimum is zero with a nonzero tail"))
}

fn guard_values(w: &WitnessSet, x: &[BigInt]) -> Vec<BigInt> {
    let p = &w.original;
    p.guard
        .iter()
        .zip(&p.rhs)
        .map(|(row, c)| row.iter().zip(x).map(|(a, b)| a * b).sum::<BigInt>() - c)
        .collect()
}

pub fn default_m_max(w: &WitnessSet) -> u64 {
    2 * (w.homogenized.dim as u64) * (w.l + 1)
}

/// Certify that `u` is eventually non-terminating, refute it, or give up.
pub fn certify_point(w: &WitnessSet, u: &[BigInt], cfg: &CertifyConfig) -> CertifyOutcome {
    if !w.is_supported() {
        return CertifyOutcome::Inconclusive("unsupported fragment".into());
    }
    let m_max = cfg.m_max.unwrap_or_else(|| default_m_max(w));
    let uq: Vec<BigRational> = u.iter().map(|x| BigRational::from_integer(x.clone())).collect();
    let l = w.l;
    let reduced_limit = cfg.horizon / l.max(1);
    let mut bounds = Vec::new();
    let mut refuted: Option<(usize, String)> = None;
    let mut unknown: Option<String> = None;
    'outer: for i in 0..w.phases.len() {
        let v = w.reduced_point(i, &uq);
        for r in 0..w.rows.len() {
            match analyze_sequence(w, r, i, &v, reduced_limit) {
                SeqResult::Bound(b) => bounds.push(b),
                SeqResult::Refuted(why) => {
                    refuted = Some((r, why));
                    break 'outer;
                }
                SeqResult::Unknown(why) => {
                    unknown.get_or_insert(why);
                }
            }
        }
    }
    if let Some((row, reason)) = refuted {
        // concrete failing step at or after m_max
        let mut x = u.to_vec();
        for n in 0..=cfg.horizon.max(m_max) {
            if n >= m_max && guard_values(w, &x)[row] < BigInt::zero() {
                return CertifyOutcome::Refuted(Refutation { point: u.to_vec(), row, n, m_max, reason });
            }
            x = w.original.step(&x);
        }
        return CertifyOutcome::Inconclusive(format!("{reason}; no failure observed within the horizon"));
    }
    if let Some(why) = unknown {
        return CertifyOutcome::Inconclusive(why);
    }
    let n0 = bounds.iter().map(|b| b.n0).max().unwrap_or(0);
    let total = l * n0 + l;
    if total > cfg.horizon {
        return CertifyOutcome::Inconclusive("crossover beyond the simulation horizon".into());
    }
    let mut x = u.to_vec();
    let mut states = Vec::new();
    let mut last_fail: Option<u64> = None;
    for n in 0..total {
        if guard_values(w, &x).iter().any(|g| g < &BigInt::zero()) {
            last_fail = Some(n);
        }
        states.push(x.clone());
        x = w.original.step(&x);
    }
    let m = last_fail.map_or(0, |f| f + 1);
    let nt_point = if (m as usize) < states.len() { states[m as usize].clone() } else { x };
    CertifyOutcome::Certified(PointCertificate { point: u.to_vec(), m, nt_point, simulated: total, bounds })
}
