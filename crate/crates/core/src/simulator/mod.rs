//! Exact big-integer execution of loops.

use crate::loop_ir::{vec_json, LoopProgram};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::collections::HashSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// The guard failed before the body ran for the `step`-th time.
    Exited { step: u64, row: usize },
    Survived { budget: u64 },
    /// A state repeated: the orbit is periodic and never exits.
    Cycle { start: u64, period: u64 },
}

impl Outcome {
    pub fn exited(&self) -> bool {
        matches!(self, Outcome::Exited { .. })
    }

    pub fn to_json(&self) -> Value {
        match self {
            Outcome::Exited { step, row } => json!({"kind": "exited", "step": step, "row": row}),
            Outcome::Survived { budget } => json!({"kind": "survived", "budget": budget}),
            Outcome::Cycle { start, period } => json!({"kind": "cycle", "start": start, "period": period}),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub initial: Vec<BigInt>,
    pub steps: u64,
    pub outcome: Outcome,
    pub final_state: Vec<BigInt>,
    pub states: Option<Vec<Vec<BigInt>>>,
}

impl Trace {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "initial": vec_json(&self.initial),
            "steps": self.steps,
            "outcome": self.outcome.to_json(),
            "final_state": vec_json(&self.final_state),
        });
        if let Some(s) = &self.states {
            v["states"] = Value::Array(s.iter().map(|x| vec_json(x)).collect());
        }
        v
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub record: bool,
    pub detect_cycles: bool,
}

/// Run `x <- A x + a` from `u` while the guard holds, for at most `budget` body executions.
pub fn run(p: &LoopProgram, u: &[BigInt], budget: u64) -> Trace {
    run_with(p, u, budget, RunOptions::default())
}

pub fn run_with(p: &LoopProgram, u: &[BigInt], budget: u64, opts: RunOptions) -> Trace {
    let mut x = u.to_vec();
    let mut states = opts.record.then(|| vec![x.clone()]);
    let mut seen: Vec<Vec<BigInt>> = Vec::new();
    let mut seen_set: HashSet<Vec<BigInt>> = HashSet::new();
    let mut n = 0u64;
    let outcome = loop {
        if let Some(row) = p.violated_row(&x) {
            break Outcome::Exited { step: n, row };
        }
        if n == budget {
            break Outcome::Survived { budget };
        }
        if opts.detect_cycles {
            if seen_set.contains(&x) {
                let start = seen.iter().position(|s| *s == x).unwrap() as u64;
                break Outcome::Cycle { start, period: n - start };
            }
            seen_set.insert(x.clone());
            seen.push(x.clone());
        }
        x = p.step(&x);
        n += 1;
        if let Some(s) = states.as_mut() {
            s.push(x.clone());
        }
    };
    Trace { initial: u.to_vec(), steps: n, outcome, final_state: x, states }
}

/// All integer points of a box given as inclusive per-coordinate ranges.
pub fn box_points(bounds: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in bounds {
        let mut next = Vec::with_capacity(out.len() * (hi - lo + 1).max(0) as usize);
        for p in &out {
            for v in lo..=hi {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Run every point of the box in parallel.
pub fn classify_box(p: &LoopProgram, bounds: &[(i64, i64)], budget: u64) -> Vec<(Vec<i64>, Outcome)> {
    box_points(bounds)
        .into_par_iter()
        .map(|pt| {
            let u: Vec<BigInt> = pt.iter().map(|&x| BigInt::from(x)).collect();
            let t = run(p, &u, budget);
            (pt, t.outcome)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loop_ir::parse_loop;

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn decrement_exits() {
        let p = parse_loop("vars x; while x >= 0 do x := x - 1").unwrap();
        let t = run(&p, &b(&[3]), 100);
        assert_eq!(t.outcome, Outcome::Exited { step: 4, row: 0 });
        assert_eq!(t.final_state, b(&[-1]));
    }

    #[test]
    fn increment_survives_and_guard_first() {
        let p = parse_loop("vars x; while x >= 0 do x := x + 1").unwrap();
        assert_eq!(run(&p, &b(&[0]), 1000).outcome, Outcome::Survived { budget: 1000 });
        assert_eq!(run(&p, &b(&[-5]), 1000).outcome, Outcome::Exited { step: 0, row: 0 });
    }

    #[test]
    fn doubling_box() {
        let p = parse_loop("vars x; while x >= 1 do x := 2*x").unwrap();
        let r = classify_box(&p, &[(1, 20)], 100);
        assert_eq!(r.len(), 20);
        assert!(r.iter().all(|(_, o)| !o.exited()));
    }

    #[test]
    fn rotation_cycles() {
        let p = parse_loop("vars x y; while x + 1 >= 0 do x := -y, y := x").unwrap();
        let t = run_with(&p, &b(&[1, 0]), 100, RunOptions { record: true, detect_cycles: true });
        assert_eq!(t.outcome, Outcome::Cycle { start: 0, period: 4 });
    }
}
