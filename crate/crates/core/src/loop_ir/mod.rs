//! Linear loop programs `while B x >= c do x := A x + a` and the reductions
//! to homogeneous, single-guard, non-degenerate form.

mod parse;
mod reduce;

pub use parse::{parse_json, parse_loop, parse_program};
pub use reduce::{compute_l, depower, homogenize, split_rows, Recovery, ReductionCertificate, ReductionKind};

use crate::algebra::lattice::IntMatrix;
use crate::algebra::matrix::RatMatrix;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopProgram {
    pub dim: usize,
    pub guard: IntMatrix,
    pub rhs: Vec<BigInt>,
    pub update: IntMatrix,
    pub offset: Vec<BigInt>,
    pub vars: Vec<String>,
    pub provenance: Vec<ReductionKind>,
}

fn to_big(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

impl LoopProgram {
    pub fn new(guard: IntMatrix, rhs: Vec<BigInt>, update: IntMatrix, offset: Vec<BigInt>) -> Result<Self> {
        let dim = update.len();
        if dim == 0 {
            return Err(Error::Dimension("loop needs at least one variable".into()));
        }
        if update.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension(format!("update matrix must be {dim}x{dim}")));
        }
        if offset.len() != dim {
            return Err(Error::Dimension(format!("offset has length {}, expected {dim}", offset.len())));
        }
        if guard.len() != rhs.len() {
            return Err(Error::Dimension(format!("{} guard rows but {} right-hand sides", guard.len(), rhs.len())));
        }
        if guard.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension(format!("guard rows must have length {dim}")));
        }
        let vars = default_vars(dim);
        Ok(LoopProgram { dim, guard, rhs, update, offset, vars, provenance: Vec::new() })
    }

    /// Convenience constructor from small integer data.
    pub fn from_i64(guard: &[Vec<i64>], rhs: &[i64], update: &[Vec<i64>], offset: &[i64]) -> Result<Self> {
        LoopProgram::new(
            to_big(guard),
            rhs.iter().map(|&x| BigInt::from(x)).collect(),
            to_big(update),
            offset.iter().map(|&x| BigInt::from(x)).collect(),
        )
    }

    pub fn with_vars(mut self, vars: Vec<String>) -> Self {
        if vars.len() == self.dim {
            self.vars = vars;
        }
        self
    }

    pub fn guard_rows(&self) -> usize {
        self.guard.len()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.offset.iter().all(Zero::is_zero) && self.rhs.iter().all(Zero::is_zero)
    }

    pub fn is_single_guard(&self) -> bool {
        self.guard.len() == 1
    }

    /// `f(x) = A x + a`.
    pub fn step(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.update
            .iter()
            .zip(&self.offset)
            .map(|(row, a)| row.iter().zip(x).map(|(p, q)| p * q).sum::<BigInt>() + a)
            .collect()
    }

    /// Index of the first violated guard row at `x`, if any.
    pub fn violated_row(&self, x: &[BigInt]) -> Option<usize> {
        self.guard
            .iter()
            .zip(&self.rhs)
            .position(|(row, c)| row.iter().zip(x).map(|(p, q)| p * q).sum::<BigInt>() < *c)
    }

    pub fn update_rational(&self) -> RatMatrix {
        int_to_rat(&self.update)
    }

    pub fn to_json(&self) -> Value {
        let m = |m: &IntMatrix| Value::Array(m.iter().map(|r| vec_json(r)).collect());
        json!({
            "dim": self.dim,
            "vars": self.vars,
            "B": m(&self.guard),
            "c": vec_json(&self.rhs),
            "A": m(&self.update),
            "a": vec_json(&self.offset),
        })
    }
}

pub(crate) fn default_vars(dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("x{i}")).collect()
}

pub fn int_json(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

pub fn vec_json(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int_json).collect())
}

pub fn int_to_rat(m: &IntMatrix) -> RatMatrix {
    RatMatrix::from_rows(m.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect())
}

impl std::fmt::Display for LoopProgram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let lin = |row: &[BigInt], k: &BigInt| -> String {
            let mut s = String::new();
            for (c, v) in row.iter().zip(&self.vars) {
                if c.is_zero() {
                    continue;
                }
                let neg = c < &BigInt::zero();
                let mag = if neg { -c } else { c.clone() };
                if s.is_empty() {
                    if neg {
                        s.push('-');
                    }
                } else {
                    s.push_str(if neg { " - " } else { " + " });
                }
                if mag != BigInt::from(1) {
                    s.push_str(&format!("{mag}*"));
                }
                s.push_str(v);
            }
            if !k.is_zero() || s.is_empty() {
                if s.is_empty() {
                    s = k.to_string();
                } else if k < &BigInt::zero() {
                    s.push_str(&format!(" - {}", -k));
                } else {
                    s.push_str(&format!(" + {k}"));
                }
            }
            s
        };
        writeln!(f, "vars {};", self.vars.join(" "))?;
        let zero = BigInt::zero();
        let guards: Vec<String> =
            self.guard.iter().zip(&self.rhs).map(|(r, c)| format!("{} >= {c}", lin(r, &zero))).collect();
        let guards = if guards.is_empty() { "0 >= 0".to_string() } else { guards.join(" and ") };
        let assigns: Vec<String> = self
            .update
            .iter()
            .zip(&self.offset)
            .zip(&self.vars)
            .map(|((r, a), v)| format!("{v} := {}", lin(r, a)))
            .collect();
        write!(f, "while {guards} do {}", assigns.join(", "))
    }
}
