//! Sign of `min_{z in T} f(z)` with `f(z) = a0 + sum_j 2 Re(beta_j z_j)`.

use crate::algebra::algebraic::AlgebraicNumber;
use crate::algebra::dyadic::Ball;
use crate::algebra::numfield::NfElem;
use crate::algebra::field::Field;
use crate::relations::{root_of_unity, TorusGroup};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use std::f64::consts::TAU;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TorusSign {
    Nonneg,
    Neg,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TorusPath {
    Constant,
    ClosedForm,
    Finite,
    Search,
}

#[derive(Clone, Debug)]
pub struct TorusMin {
    pub sign: TorusSign,
    pub path: TorusPath,
    /// Approximate minimum (for reports).
    pub approx: f64,
}

/// A value known exactly, either directly or as a field element under an embedding.
#[derive(Clone, Debug)]
pub enum Value {
    Alg(AlgebraicNumber),
    Emb(NfElem, AlgebraicNumber),
}

impl Value {
    pub fn is_zero(&self) -> bool {
        match self {
            Value::Alg(a) => a.is_zero(),
            Value::Emb(e, _) => e.is_zero_elem(),
        }
    }

    pub fn ball(&self, bits: i64) -> Ball {
        match self {
            Value::Alg(a) => a.approx(bits),
            Value::Emb(e, r) => e.approx_at(r, bits),
        }
    }

    pub fn exact(&self) -> AlgebraicNumber {
        match self {
            Value::Alg(a) => a.clone(),
            Value::Emb(e, r) => e.embed(r),
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        self.ball(60).to_f64()
    }
}

const PREC_STEPS: [i64; 4] = [32, 64, 128, 256];

/// Sign of a real quantity given enclosures, or `None` if all overlap zero.
fn ball_sign(f: impl Fn(i64) -> Ball) -> Option<i32> {
    for bits in PREC_STEPS {
        let b = f(bits);
        if let Some(s) = b.re_sign() {
            if s != 0 {
                return Some(s);
            }
        }
    }
    None
}

pub fn torus_min(alpha0: &Value, betas: &[Value], t: &TorusGroup) -> TorusMin {
    let nz: Vec<(usize, &Value)> = betas.iter().enumerate().filter(|(_, b)| !b.is_zero()).collect();
    let a0f = alpha0.to_f64().0;
    if nz.is_empty() {
        let sign = if alpha0.is_zero() {
            TorusSign::Nonneg
        } else {
            match ball_sign(|b| alpha0.ball(b)).unwrap_or_else(|| alpha0.exact().sign()) {
                s if s > 0 => TorusSign::Nonneg,
                _ => TorusSign::Neg,
            }
        };
        return TorusMin { sign, path: TorusPath::Constant, approx: a0f };
    }
    // a torus without relations on the nonzero coordinates gives the closed form
    let free_on_support = t.is_full()
        || t.relations.iter().all(|v| nz.iter().all(|(j, _)| v[*j] == BigInt::from(0)));
    if free_on_support {
        return closed_form(alpha0, &nz.iter().map(|(_, b)| *b).collect::<Vec<_>>());
    }
    if t.is_finite() {
        return finite(alpha0, betas, t);
    }
    search(alpha0, betas, t)
}

fn closed_form(alpha0: &Value, betas: &[&Value]) -> TorusMin {
    let approx = alpha0.to_f64().0
        - 2.0 * betas.iter().map(|b| { let (x, y) = b.to_f64(); x.hypot(y) }).sum::<f64>();
    let s = ball_sign(|bits| {
        let prec = (bits + 64) as u64;
        let mut acc = alpha0.ball(bits + 8);
        for b in betas {
            let bb = b.ball(bits + 8);
            let lo = bb.abs_lower();
            let hi = bb.abs_upper();
            let mid = lo.add(&hi).mul_pow2(-1);
            let rad = hi.sub(&lo).mul_pow2(-1);
            let m = Ball::real(mid.mul_pow2(1)).with_rad(rad.mul_pow2(1));
            acc = acc.sub(&m, prec);
        }
        acc
    });
    let sign = match s {
        Some(s) => s,
        None => {
            let a0 = alpha0.exact();
            if betas.len() == 1 {
                let b = betas[0].exact();
                if a0.sign() < 0 {
                    -1
                } else {
                    // a0^2 - 4 |b|^2
                    let lhs = a0.mul(&a0);
                    let rhs = b.abs_squared().affine(&num_rational::BigRational::from_integer(4.into()), &Default::default());
                    lhs.sub(&rhs).sign()
                }
            } else {
                let mut acc = a0;
                for b in betas {
                    let m = b.exact().abs();
                    acc = acc.sub(&m.add(&m));
                }
                acc.sign()
            }
        }
    };
    TorusMin { sign: if sign >= 0 { TorusSign::Nonneg } else { TorusSign::Neg }, path: TorusPath::ClosedForm, approx }
}

fn finite(alpha0: &Value, betas: &[Value], t: &TorusGroup) -> TorusMin {
    let mut best = f64::INFINITY;
    let mut any_neg = false;
    for k in t.cosets() {
        let zetas: Vec<AlgebraicNumber> = (0..t.s)
            .map(|j| {
                let (n, d) = t.coset_angle(&k, j);
                root_of_unity(&n, &d)
            })
            .collect();
        let val = |bits: i64| {
            let prec = (bits + 64) as u64;
            let mut acc = alpha0.ball(bits + 8);
            for (b, z) in betas.iter().zip(&zetas) {
                if b.is_zero() {
                    continue;
                }
                let p = b.ball(bits + 8).mul(&z.approx(bits + 8), prec);
                let re = Ball::real(p.re.clone()).with_rad(p.rad.clone());
                acc = acc.add(&re.mul_pow2(1), prec);
            }
            acc
        };
        best = best.min(val(53).to_f64().0);
        let s = ball_sign(val).unwrap_or_else(|| {
            let mut acc = alpha0.exact();
            for (b, z) in betas.iter().zip(&zetas) {
                if b.is_zero() {
                    continue;
                }
                let re = b.exact().mul(z).re();
                acc = acc.add(&re).add(&re);
            }
            acc.sign()
        });
        if s < 0 {
            any_neg = true;
            break;
        }
    }
    TorusMin { sign: if any_neg { TorusSign::Neg } else { TorusSign::Nonneg }, path: TorusPath::Finite, approx: best }
}

/// Branch and bound over the free angles of each coset, in double precision
/// with a Lipschitz bound and a relative safety margin.
fn search(alpha0: &Value, betas: &[Value], t: &TorusGroup) -> TorusMin {
    let a0 = alpha0.to_f64().0;
    let bs: Vec<(f64, f64)> = betas.iter().map(|b| b.to_f64()).collect();
    let scale = a0.abs() + 2.0 * bs.iter().map(|(x, y)| x.hypot(*y)).sum::<f64>();
    let tol = 1e-9 * scale.max(1e-300);
    let r = t.free_rank;
    let g: Vec<Vec<f64>> = (0..t.s).map(|j| t.free_exponents(j).iter().map(|x| x.to_f64().unwrap()).collect()).collect();
    let lip: Vec<f64> = (0..r)
        .map(|i| (0..t.s).map(|j| 2.0 * bs[j].0.hypot(bs[j].1) * TAU * g[j][i].abs()).sum())
        .collect();
    let mut best = f64::INFINITY;
    let mut undecided = false;
    for k in t.cosets() {
        let f = |phi: &[f64]| -> f64 {
            let th = t.point(&k, phi);
            a0 + th.iter().zip(&bs).map(|(a, (x, y))| 2.0 * (x * (TAU * a).cos() - y * (TAU * a).sin())).sum::<f64>()
        };
        let mut stack = vec![(vec![0.5; r], 0.5f64)];
        let mut evals = 0usize;
        while let Some((c, h)) = stack.pop() {
            let v = f(&c);
            evals += 1;
            best = best.min(v);
            if v < -tol {
                return TorusMin { sign: TorusSign::Neg, path: TorusPath::Search, approx: v };
            }
            let lower = v - h * lip.iter().sum::<f64>();
            if lower > tol {
                continue;
            }
            if h < 1e-7 || evals > 200_000 {
                undecided = true;
                continue;
            }
            let nh = h / 2.0;
            for mask in 0..(1u32 << r) {
                let nc: Vec<f64> = c.iter().enumerate().map(|(i, x)| if mask >> i & 1 == 1 { x + nh } else { x - nh }).collect();
                stack.push((nc, nh));
            }
        }
    }
    let sign = if undecided { TorusSign::Inconclusive } else { TorusSign::Nonneg };
    TorusMin { sign, path: TorusPath::Search, approx: best }
}
