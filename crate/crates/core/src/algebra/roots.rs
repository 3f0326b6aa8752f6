//! Certified isolation of the complex roots of a square-free integer polynomial.
//!
//! Approximations come from Aberth iteration at increasing working precision.
//! A root approximation `z` is certified by the Newton inclusion disc
//! `D(z, n |p(z)/p'(z)|)`, which always contains a root; `n` pairwise disjoint
//! such discs therefore contain exactly one root each.

use super::dyadic::{Ball, Dyadic, Round};
use super::poly::IntPoly;
use num_bigint::BigInt;
use num_traits::Signed;

/// A disc containing exactly one root. Real roots have a disc centred on the real axis.
#[derive(Clone, Debug)]
pub struct RootDisc {
    pub ball: Ball,
    pub real: bool,
}

/// Lower bound `2^-k` on the minimal distance between distinct roots of a
/// square-free integer polynomial; returns `k`.
pub fn separation_exp(p: &IntPoly) -> i64 {
    let d = p.degree() as i64;
    if d <= 1 {
        return 0;
    }
    let norm2: BigInt = p.coeffs().iter().map(|c| c * c).sum();
    let log_norm = (norm2.bits() as i64 + 1) / 2;
    let log_d = 64 - (d as u64).leading_zeros() as i64;
    ((d + 2) * log_d + 1) / 2 + (d - 1) * log_norm + 1
}

fn strip(b: Ball) -> Ball {
    b.with_rad(Dyadic::zero())
}

fn cauchy_radius(p: &IntPoly) -> f64 {
    let lc = p.lc().abs();
    let lcf = num_traits::ToPrimitive::to_f64(&lc).unwrap_or(f64::MAX);
    let m = p.coeffs()[..p.degree()]
        .iter()
        .map(|c| num_traits::ToPrimitive::to_f64(&c.abs()).unwrap_or(f64::MAX) / lcf)
        .fold(0.0, f64::max);
    (1.0 + m).min(1e300)
}

fn aberth(p: &IntPoly, dp: &IntPoly, zs: &mut [Ball], prec: u64, max_iter: usize) {
    let n = zs.len();
    let tol = Dyadic::pow2(-(prec as i64) + 8);
    for _ in 0..max_iter {
        let mut max_step = Dyadic::zero();
        for k in 0..n {
            let z = zs[k].clone();
            let pz = strip(p.eval_ball(&z, prec));
            if pz.re.is_zero() && pz.im.is_zero() {
                continue;
            }
            let dz = strip(dp.eval_ball(&z, prec));
            let Some(w) = pz.div(&dz, prec).map(strip) else {
                // derivative vanishes numerically; nudge
                zs[k] = strip(z.add(&Ball::exact(Dyadic::pow2(-20), Dyadic::pow2(-21)), prec));
                max_step = Dyadic::one();
                continue;
            };
            let mut s = Ball::zero();
            for (j, zj) in zs.iter().enumerate() {
                if j == k {
                    continue;
                }
                if let Some(q) = strip(z.sub(zj, prec)).inv(prec) {
                    s = strip(s.add(&strip(q), prec));
                }
            }
            let denom = strip(Ball::one().sub(&strip(w.mul(&s, prec)), prec));
            let step = match w.div(&denom, prec) {
                Some(st) => strip(st),
                None => w.clone(),
            };
            let mag = step.center_abs_upper();
            let zmag = z.center_abs_upper().max_of(&Dyadic::one());
            let rel = mag.div(&zmag, 32, Round::Ceil);
            if rel > max_step {
                max_step = rel;
            }
            zs[k] = strip(z.sub(&step, prec));
        }
        if max_step < tol {
            break;
        }
    }
}

fn newton_disc(p: &IntPoly, dp: &IntPoly, z: &Ball, prec: u64) -> Option<Ball> {
    let n = BigInt::from(p.degree());
    let pz = p.eval_ball(z, prec);
    let dz = dp.eval_ball(z, prec);
    if dz.contains_zero() {
        return None;
    }
    let r = pz
        .abs_upper()
        .mul(&Dyadic::from_int(n))
        .div(&dz.abs_lower(), 64, Round::Ceil)
        .add(&z.rad)
        .round(64, Round::Ceil);
    Some(z.clone().with_rad(r))
}

fn certify(p: &IntPoly, dp: &IntPoly, zs: &[Ball], prec: u64) -> Option<Vec<RootDisc>> {
    let mut discs = Vec::with_capacity(zs.len());
    for z in zs {
        let b = newton_disc(p, dp, z, prec)?;
        if b.im.abs() <= b.rad {
            let rad = b.rad.add(&b.im.abs()).round(64, Round::Ceil);
            discs.push(RootDisc { ball: Ball { re: b.re, im: Dyadic::zero(), rad }, real: true });
        } else {
            discs.push(RootDisc { ball: b, real: false });
        }
    }
    for i in 0..discs.len() {
        for j in i + 1..discs.len() {
            if discs[i].ball.overlaps(&discs[j].ball) {
                return None;
            }
        }
    }
    Some(discs)
}

/// Isolating discs for every root of a square-free polynomial of degree >= 1,
/// each of radius at most `2^-target` when `target` is given.
pub fn isolate(p: &IntPoly, target: Option<i64>) -> Vec<RootDisc> {
    let n = p.degree();
    assert!(n >= 1, "isolating roots of a constant");
    if n == 1 {
        let q = num_rational::BigRational::new(-p.coeff(0), p.coeff(1));
        let bits = target.unwrap_or(64).max(64) as u64 + 8;
        return vec![RootDisc { ball: Ball::from_rational(&q, bits), real: true }];
    }
    let dp = p.derivative();
    let r0 = cauchy_radius(p);
    let mut zs: Vec<Ball> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Ball::exact(Dyadic::from_f64(r0 * th.cos()), Dyadic::from_f64(r0 * th.sin()))
        })
        .collect();
    let sep = separation_exp(p);
    let mut prec: u64 = 64;
    let mut iters = 200 + 20 * n;
    loop {
        aberth(p, &dp, &mut zs, prec, iters);
        if let Some(discs) = certify(p, &dp, &zs, prec) {
            let ok = match target {
                Some(t) => discs.iter().all(|d| d.ball.rad <= Dyadic::pow2(-t)),
                None => true,
            };
            if ok {
                let mut discs = discs;
                discs.sort_by(|a, b| {
                    let (ar, ai) = a.ball.to_f64();
                    let (br, bi) = b.ball.to_f64();
                    ar.partial_cmp(&br).unwrap().then(ai.partial_cmp(&bi).unwrap())
                });
                return discs;
            }
        }
        if prec as i64 > 8 * (sep + target.unwrap_or(0).max(0)) + 4096 {
            panic!("root isolation failed to converge for {p}");
        }
        prec *= 2;
        iters = 60 + 10 * n;
    }
}

/// Shrink an isolating disc of a root of `p` (square-free) to radius at most `2^-target`.
pub fn refine(p: &IntPoly, disc: &RootDisc, target: i64) -> RootDisc {
    let goal = Dyadic::pow2(-target);
    if disc.ball.rad <= goal {
        return disc.clone();
    }
    let dp = p.derivative();
    let hb = p.height().bits() as i64;
    let mut prec = (target + 2 * hb + 8 * p.degree() as i64 + 64).max(64) as u64;
    let mut cur = disc.clone();
    let mut failures = 0;
    while cur.ball.rad > goal {
        let z = strip(cur.ball.clone());
        let pz = strip(p.eval_ball(&z, prec));
        let dz = strip(dp.eval_ball(&z, prec));
        let next = pz.div(&dz, prec).map(|w| strip(z.sub(&strip(w), prec)));
        let candidate = next
            .and_then(|mut nz| {
                if cur.real {
                    nz.im = Dyadic::zero();
                }
                newton_disc(p, &dp, &nz, prec)
            })
            .filter(|b| cur.ball.contains_ball(b) && b.rad < cur.ball.rad);
        match candidate {
            Some(b) => cur = RootDisc { ball: b, real: cur.real },
            None => {
                failures += 1;
                prec = prec * 3 / 2;
                if failures > 6 {
                    return refine_by_isolation(p, &cur, target);
                }
            }
        }
    }
    cur
}

fn refine_by_isolation(p: &IntPoly, disc: &RootDisc, target: i64) -> RootDisc {
    let mut t = target;
    loop {
        for d in isolate(p, Some(t)) {
            if disc.ball.contains_ball(&d.ball) {
                return d;
            }
        }
        t += 16;
    }
}
