use super::{int_to_rat, LoopProgram};
use crate::algebra::algebraic::AlgebraicNumber;
use crate::algebra::factor::factor;
use crate::algebra::lattice::{mat_vec, IntMatrix};
use crate::algebra::poly::IntPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReductionKind {
    Homogenize,
    SplitRow { index: usize },
    Depower { l: u64 },
}

/// How a witness set of the reduced program maps back to the input program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recovery {
    /// `W = {u : (u, 1) in W'}`.
    SliceAtOne,
    /// `W` is the intersection of the witness sets of the row programs.
    RowIntersection { rows: usize },
    /// `W = {u : A^i u in W' for all i < l}`.
    PhasePreimages { update: IntMatrix, l: u64 },
}

impl Recovery {
    /// Points of the reduced space that must all lie in the reduced witness set
    /// for `u` to lie in the recovered one (for row intersections, `u` itself
    /// once per row program).
    pub fn pull(&self, u: &[BigInt]) -> Vec<Vec<BigInt>> {
        match self {
            Recovery::SliceAtOne => {
                let mut v = u.to_vec();
                v.push(BigInt::one());
                vec![v]
            }
            Recovery::RowIntersection { rows } => vec![u.to_vec(); *rows],
            Recovery::PhasePreimages { update, l } => {
                let mut out = Vec::with_capacity(*l as usize);
                let mut x = u.to_vec();
                for _ in 0..*l {
                    let next = mat_vec(update, &x);
                    out.push(std::mem::replace(&mut x, next));
                }
                out
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Recovery::SliceAtOne => "W = {u : (u,1) in W'}".into(),
            Recovery::RowIntersection { rows } => format!("W = intersection of {rows} row witness sets"),
            Recovery::PhasePreimages { l, .. } => format!("W = {{u : A^i u in W' for i < {l}}}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionCertificate {
    pub kind: ReductionKind,
    pub recovery: Recovery,
}

/// Append a constant-1 coordinate so that guard and update become linear.
pub fn homogenize(p: &LoopProgram) -> (LoopProgram, ReductionCertificate) {
    let d = p.dim;
    let mut update: IntMatrix = p
        .update
        .iter()
        .zip(&p.offset)
        .map(|(row, a)| {
            let mut r = row.clone();
            r.push(a.clone());
            r
        })
        .collect();
    let mut last = vec![BigInt::zero(); d + 1];
    last[d] = BigInt::one();
    update.push(last);
    let guard = p
        .guard
        .iter()
        .zip(&p.rhs)
        .map(|(row, c)| {
            let mut r = row.clone();
            r.push(-c);
            r
        })
        .collect();
    let mut vars = p.vars.clone();
    vars.push("_one".into());
    let mut provenance = p.provenance.clone();
    provenance.push(ReductionKind::Homogenize);
    let q = LoopProgram {
        dim: d + 1,
        guard,
        rhs: vec![BigInt::zero(); p.guard.len()],
        update,
        offset: vec![BigInt::zero(); d + 1],
        vars,
        provenance,
    };
    (q, ReductionCertificate { kind: ReductionKind::Homogenize, recovery: Recovery::SliceAtOne })
}

/// One single-guard program per guard row. A loop without guard rows gets a
/// single vacuous row `0 >= 0`.
pub fn split_rows(p: &LoopProgram) -> Vec<(LoopProgram, ReductionCertificate)> {
    let rows: Vec<(Vec<BigInt>, BigInt)> = if p.guard.is_empty() {
        vec![(vec![BigInt::zero(); p.dim], BigInt::zero())]
    } else {
        p.guard.iter().cloned().zip(p.rhs.iter().cloned()).collect()
    };
    let k = rows.len();
    rows.into_iter()
        .enumerate()
        .map(|(i, (row, c))| {
            let mut q = p.clone();
            q.guard = vec![row];
            q.rhs = vec![c];
            q.provenance.push(ReductionKind::SplitRow { index: i });
            let cert = ReductionCertificate {
                kind: ReductionKind::SplitRow { index: i },
                recovery: Recovery::RowIntersection { rows: k },
            };
            (q, cert)
        })
        .collect()
}

/// Distinct nonzero eigenvalues of an integer matrix.
pub(crate) fn nonzero_eigenvalues(a: &IntMatrix) -> Vec<AlgebraicNumber> {
    let cp = IntPoly::from_rational(&int_to_rat(a).charpoly());
    let mut out = Vec::new();
    for (f, _) in factor(&cp) {
        if f.degree() == 1 && f.coeff(0).is_zero() {
            continue;
        }
        out.extend(AlgebraicNumber::roots_of(&f));
    }
    out
}

/// Least common multiple of the orders of all eigenvalue quotients that are
/// roots of unity.
pub fn compute_l(a: &IntMatrix) -> u64 {
    let eig = nonzero_eigenvalues(a);
    let mut l = 1u64;
    for i in 0..eig.len() {
        for j in i + 1..eig.len() {
            if eig[i].cmp_abs(&eig[j]) != std::cmp::Ordering::Equal {
                continue;
            }
            let q = eig[i].div(&eig[j]).expect("nonzero eigenvalue");
            if let Some(r) = q.root_of_unity_order() {
                l = l.lcm(&r);
            }
        }
    }
    l
}

pub(crate) fn int_mat_pow(a: &IntMatrix, mut e: u64) -> IntMatrix {
    let n = a.len();
    let mut acc = crate::algebra::lattice::identity(n);
    let mut base = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = crate::algebra::lattice::mat_mul(&acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = crate::algebra::lattice::mat_mul(&base, &base);
        }
    }
    acc
}

/// Replace the update by its `l`-th power (with matching offset so the
/// result is the `l`-fold composition).
pub fn depower(p: &LoopProgram, l: u64) -> (LoopProgram, ReductionCertificate) {
    let mut q = p.clone();
    q.update = int_mat_pow(&p.update, l);
    if p.offset.iter().any(|x| !x.is_zero()) {
        // offset of f^l: sum_{i<l} A^i a
        let mut acc = vec![BigInt::zero(); p.dim];
        for _ in 0..l {
            acc = mat_vec(&p.update, &acc).into_iter().zip(&p.offset).map(|(x, a)| x + a).collect();
        }
        q.offset = acc;
    }
    q.provenance.push(ReductionKind::Depower { l });
    let cert = ReductionCertificate {
        kind: ReductionKind::Depower { l },
        recovery: Recovery::PhasePreimages { update: p.update.clone(), l },
    };
    (q, cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loop_ir::parse_loop;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn homogenize_decrement() {
        let p = parse_loop("vars x; while x >= 0 do x := x - 1").unwrap();
        let (h, cert) = homogenize(&p);
        assert_eq!(h.update, m(&[&[1, -1], &[0, 1]]));
        assert_eq!(h.guard, m(&[&[1, 0]]));
        assert!(h.is_homogeneous());
        assert_eq!(cert.recovery, Recovery::SliceAtOne);
    }

    #[test]
    fn l_values() {
        assert_eq!(compute_l(&m(&[&[0, -1], &[1, 0]])), 2);
        assert_eq!(compute_l(&m(&[&[1, -1], &[1, 1]])), 4);
        assert_eq!(compute_l(&m(&[&[2, 0], &[0, 3]])), 1);
        assert_eq!(compute_l(&m(&[&[2, 0], &[0, -2]])), 2);
        assert_eq!(compute_l(&m(&[&[0, 0], &[0, 0]])), 1);
    }

    #[test]
    fn depower_examples() {
        let p = LoopProgram::from_i64(&[vec![1, 0]], &[0], &[vec![1, -1], vec![1, 1]], &[0, 0]).unwrap();
        let (q, _) = depower(&p, 4);
        assert_eq!(q.update, m(&[&[-4, 0], &[0, -4]]));
        assert_eq!(compute_l(&q.update), 1);
        let r = LoopProgram::from_i64(&[vec![1, 0]], &[0], &[vec![0, -1], vec![1, 0]], &[0, 0]).unwrap();
        assert_eq!(depower(&r, 2).0.update, m(&[&[-1, 0], &[0, -1]]));
    }

    #[test]
    fn split_with_zero_row() {
        let p = LoopProgram::from_i64(&[vec![1, 0], vec![0, 0], vec![0, 1]], &[0, 0, 0], &[vec![1, 0], vec![0, 1]], &[0, 0])
            .unwrap();
        let rows = split_rows(&p);
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[1].0.guard, m(&[&[0, 0]]));
        assert!(rows.iter().all(|(q, _)| q.update == p.update));
    }
}
