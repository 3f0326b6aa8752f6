//! Dense matrices over an exact [`Field`].

use super::field::{fpoly, Field};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

pub type RatMatrix = Matrix<BigRational>;

impl<F: Field> Matrix<F> {
    pub fn new(rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data: Vec<F> = rows.into_iter().flatten().collect();
        Matrix::new(r, c, data)
    }

    pub fn filled(rows: usize, cols: usize, v: &F) -> Self {
        Matrix { rows, cols, data: vec![v.clone(); rows * cols] }
    }

    /// Identity sized `n`, with constants taken from `like`.
    pub fn identity(n: usize, like: &F) -> Self {
        let mut m = Matrix::filled(n, n, &like.zero_like());
        for i in 0..n {
            m.data[i * n + i] = like.one_like();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<F> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, s: &F) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.mul(s)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matrix dimension mismatch");
        let z = self.zero_elem(o);
        let mut data = vec![z; self.rows * o.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero_elem() {
                    continue;
                }
                for j in 0..o.cols {
                    let idx = i * o.cols + j;
                    data[idx] = data[idx].add(&a.mul(o.get(k, j)));
                }
            }
        }
        Matrix { rows: self.rows, cols: o.cols, data }
    }

    fn zero_elem(&self, o: &Self) -> F {
        self.data.first().or(o.data.first()).expect("empty matrix product").zero_like()
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = v[0].zero_like();
                for (j, x) in v.iter().enumerate() {
                    acc = acc.add(&self.get(i, j).mul(x));
                }
                acc
            })
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.rows, v.len());
        (0..self.cols)
            .map(|j| {
                let mut acc = v[0].zero_like();
                for (i, x) in v.iter().enumerate() {
                    acc = acc.add(&x.mul(self.get(i, j)));
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, mut e: u64) -> Self {
        assert_eq!(self.rows, self.cols);
        let like = self.data.first().expect("empty matrix").clone();
        let mut acc = Matrix::identity(self.rows, &like);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `p(A)` for a polynomial given lowest degree first.
    pub fn eval_poly(&self, p: &[F]) -> Self {
        let like = self.data.first().expect("empty matrix").clone();
        let mut acc = Matrix::filled(self.rows, self.cols, &like.zero_like());
        let id = Matrix::identity(self.rows, &like);
        for c in p.iter().rev() {
            acc = acc.mul(self).add(&id.scale(c));
        }
        acc
    }

    pub fn kronecker(&self, o: &Self) -> Self {
        let rows = self.rows * o.rows;
        let cols = self.cols * o.cols;
        let mut data = Vec::with_capacity(rows * cols);
        for i1 in 0..self.rows {
            for i2 in 0..o.rows {
                for j1 in 0..self.cols {
                    for j2 in 0..o.cols {
                        data.push(self.get(i1, j1).mul(o.get(i2, j2)));
                    }
                }
            }
        }
        Matrix { rows, cols, data }
    }

    /// Characteristic polynomial `det(xI - A)`, lowest degree first (Berkowitz).
    pub fn charpoly(&self) -> Vec<F> {
        assert_eq!(self.rows, self.cols, "charpoly of non-square matrix");
        let n = self.rows;
        let like = self.data.first().expect("empty matrix").clone();
        let one = like.one_like();
        let zero = like.zero_like();
        // Coefficients highest degree first during the recursion.
        let mut v = vec![one.clone(), self.get(0, 0).neg()];
        for r in 1..n {
            let a = self.get(r, r).clone();
            let row: Vec<F> = (0..r).map(|j| self.get(r, j).clone()).collect();
            let mut col: Vec<F> = (0..r).map(|i| self.get(i, r).clone()).collect();
            let mut t = vec![one.clone(), a.neg()];
            for _ in 0..r {
                let mut dot = zero.clone();
                for (x, y) in row.iter().zip(&col) {
                    dot = dot.add(&x.mul(y));
                }
                t.push(dot.neg());
                let next: Vec<F> = (0..r)
                    .map(|i| {
                        let mut acc = zero.clone();
                        for (j, c) in col.iter().enumerate() {
                            acc = acc.add(&self.get(i, j).mul(c));
                        }
                        acc
                    })
                    .collect();
                col = next;
            }
            // v has length r+1, t has length r+2; new v = T v with T lower-triangular Toeplitz.
            let mut nv = Vec::with_capacity(r + 2);
            for i in 0..r + 2 {
                let mut acc = zero.clone();
                for (j, vj) in v.iter().enumerate() {
                    if i >= j {
                        acc = acc.add(&t[i - j].mul(vj));
                    }
                }
                nv.push(acc);
            }
            v = nv;
        }
        v.reverse();
        v
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero_elem()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).inv().unwrap();
            for j in 0..m.cols {
                let v = m.get(r, j).mul(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero_elem() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j).sub(&f.mul(m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        if self.data.is_empty() {
            return 0;
        }
        self.rref().1.len()
    }

    /// Basis of the right kernel `{x : A x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let like = match self.data.first() {
            Some(x) => x.clone(),
            None => return Vec::new(),
        };
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![like.zero_like(); self.cols];
            v[free] = like.one_like();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = r.get(i, free).neg();
            }
            basis.push(v);
        }
        basis
    }

    /// Some solution of `A x = b`, if one exists.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(b.len(), self.rows);
        let like = b.first().or(self.data.first())?.clone();
        let mut aug = Vec::with_capacity(self.rows * (self.cols + 1));
        for i in 0..self.rows {
            aug.extend(self.row(i));
            aug.push(b[i].clone());
        }
        let m = Matrix::new(self.rows, self.cols + 1, aug);
        let (r, pivots) = m.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![like.zero_like(); self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(i, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let like = self.data.first()?.clone();
        let mut aug = Vec::with_capacity(n * 2 * n);
        for i in 0..n {
            aug.extend(self.row(i));
            for j in 0..n {
                aug.push(if i == j { like.one_like() } else { like.zero_like() });
            }
        }
        let (r, pivots) = Matrix::new(n, 2 * n, aug).rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(r.get(i, n + j).clone());
            }
        }
        Some(Matrix::new(n, n, data))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero_elem())
    }

    pub fn data(&self) -> &[F] {
        &self.data
    }
}

impl RatMatrix {
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect(),
        )
    }

    /// Companion matrix of a polynomial (made monic), lowest degree first.
    pub fn companion(p: &[BigRational]) -> Self {
        let p = fpoly::monic(p);
        let n = p.len() - 1;
        let mut m = Matrix::filled(n, n, &BigRational::zero());
        for i in 1..n {
            m.set(i, i - 1, super::field::rat(1));
        }
        for i in 0..n {
            m.set(i, n - 1, -p[i].clone());
        }
        m
    }
}

/// Serialized form of a rational matrix: rows of decimal or `p/q` strings.
#[derive(Serialize, Deserialize)]
pub struct RatMatrixRepr(pub Vec<Vec<String>>);

impl From<&RatMatrix> for RatMatrixRepr {
    fn from(m: &RatMatrix) -> Self {
        RatMatrixRepr((0..m.rows()).map(|i| m.row(i).iter().map(|x| x.to_string()).collect()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::rat;

    #[test]
    fn charpoly_small() {
        let a = RatMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        assert_eq!(a.charpoly(), vec![rat(1), rat(-3), rat(1)]);
        let c = RatMatrix::companion(&[rat(-8), rat(10), rat(-5), rat(1)]);
        assert_eq!(c.charpoly(), vec![rat(-8), rat(10), rat(-5), rat(1)]);
    }

    #[test]
    fn inverse_and_nullspace() {
        let a = RatMatrix::from_i64(&[&[1, 2], &[3, 4]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2, &rat(0)));
        let s = RatMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = s.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(s.mul_vec(&v).iter().all(|x| Zero::is_zero(x)));
        }
    }
}
