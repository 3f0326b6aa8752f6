//! Integer lattices: Hermite and Smith normal forms, and integer solutions of
//! linear systems.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| row.iter().zip(b.iter()).map(|(x, brow)| x * &brow[j]).sum())
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &IntMatrix, v: &[BigInt]) -> Vec<BigInt> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Row-style Hermite normal form of the lattice spanned by the rows of `m`.
/// Zero rows are dropped; pivots are positive and entries above a pivot are
/// reduced into `[0, pivot)`.
pub fn hnf(m: &IntMatrix) -> IntMatrix {
    let mut a: IntMatrix = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // gcd-combine column c over rows r.. into row r
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let (x, y) = (a[r][c].clone(), a[i][c].clone());
            let e = x.extended_gcd(&y);
            let (g, s, t) = (e.gcd, e.x, e.y);
            let (xg, yg) = (&x / &g, &y / &g);
            let new_r: Vec<BigInt> = (0..cols).map(|j| &s * &a[r][j] + &t * &a[i][j]).collect();
            let new_i: Vec<BigInt> = (0..cols).map(|j| &xg * &a[i][j] - &yg * &a[r][j]).collect();
            a[r] = new_r;
            a[i] = new_i;
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for v in a[r].iter_mut() {
                *v = -v.clone();
            }
        }
        let p = a[r][c].clone();
        for i in 0..r {
            let q = a[i][c].div_floor(&p);
            if !q.is_zero() {
                for j in 0..cols {
                    let d = &q * &a[r][j];
                    a[i][j] -= d;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a.retain(|row| row.iter().any(|x| !x.is_zero()));
    a
}

/// Smith normal form `U M V = D` with `U`, `V` unimodular.
pub struct Smith {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        let k = self.d.len().min(self.d.first().map_or(0, |r| r.len()));
        (0..k).filter(|&i| !self.d[i][i].is_zero()).count()
    }

    pub fn invariants(&self) -> Vec<BigInt> {
        (0..self.rank()).map(|i| self.d[i][i].clone()).collect()
    }
}

pub fn smith(m: &IntMatrix) -> Smith {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut a = m.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return Smith { u, d: a, v };
            };
            a.swap(t, bi);
            u.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            for row in v.iter_mut() {
                row.swap(t, bj);
            }
            let p = a[t][t].clone();
            let mut dirty = false;
            for i in t + 1..rows {
                let q = a[i][t].div_floor(&p);
                if !q.is_zero() {
                    for j in 0..cols {
                        let d = &q * &a[t][j];
                        a[i][j] -= d;
                    }
                    for j in 0..rows {
                        let d = &q * &u[t][j];
                        u[i][j] -= d;
                    }
                }
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                let q = a[t][j].div_floor(&p);
                if !q.is_zero() {
                    for i in 0..rows {
                        let d = &q * &a[i][t];
                        a[i][j] -= d;
                    }
                    for i in 0..cols {
                        let d = &q * &v[i][t];
                        v[i][j] -= d;
                    }
                }
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility condition
            let mut fix = None;
            'outer: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&a[i][j] % &p).is_zero() {
                        fix = Some(i);
                        break 'outer;
                    }
                }
            }
            match fix {
                Some(i) => {
                    for j in 0..cols {
                        let x = a[i][j].clone();
                        a[t][j] += x;
                    }
                    for j in 0..rows {
                        let x = u[i][j].clone();
                        u[t][j] += x;
                    }
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for j in 0..cols {
                a[t][j] = -a[t][j].clone();
            }
            for j in 0..rows {
                u[t][j] = -u[t][j].clone();
            }
        }
    }
    Smith { u, d: a, v }
}

/// Integer solutions of `A x = b`: a particular solution and a basis of the
/// integer kernel, or `None` when there is no integer solution.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Option<(Vec<BigInt>, Vec<Vec<BigInt>>)> {
    let cols = a.first().map_or(0, |r| r.len());
    if a.is_empty() {
        return Some((vec![BigInt::zero(); cols], identity(cols)));
    }
    let s = smith(a);
    let ub = mat_vec(&s.u, b);
    let r = s.rank();
    let mut y = vec![BigInt::zero(); cols];
    for (i, ubi) in ub.iter().enumerate() {
        if i < r {
            let (q, rem) = ubi.div_rem(&s.d[i][i]);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ubi.is_zero() {
            return None;
        }
    }
    let x = mat_vec(&s.v, &y);
    let kernel = (r..cols).map(|j| (0..cols).map(|i| s.v[i][j].clone()).collect()).collect();
    Some((x, kernel))
}

/// Basis of the integer kernel `{x in Z^n : A x = 0}`.
pub fn integer_kernel(a: &IntMatrix, cols: usize) -> Vec<Vec<BigInt>> {
    if a.is_empty() {
        return identity(cols);
    }
    solve_integer(a, &vec![BigInt::zero(); a.len()]).map(|(_, k)| k).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn smith_decomposition() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith(&a);
        assert_eq!(mat_mul(&mat_mul(&s.u, &a), &s.v), s.d);
        assert_eq!(s.invariants(), vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
    }

    #[test]
    fn hermite() {
        let h = hnf(&m(&[&[2, 0], &[0, 3], &[4, 6]]));
        assert_eq!(h, m(&[&[2, 0], &[0, 3]]));
    }

    #[test]
    fn integer_solve() {
        let a = m(&[&[2, 4]]);
        assert!(solve_integer(&a, &[BigInt::from(3)]).is_none());
        let (x, k) = solve_integer(&a, &[BigInt::from(6)]).unwrap();
        assert_eq!(mat_vec(&a, &x), vec![BigInt::from(6)]);
        assert_eq!(k.len(), 1);
        assert_eq!(mat_vec(&a, &k[0]), vec![BigInt::zero()]);
    }
}
