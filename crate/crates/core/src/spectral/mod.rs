//! Exact eigenstructure of an integer update matrix and the
//! exponential-polynomial expansion `b^T A^n u = sum_j sum_k (alpha_{j,k}^T u) n^k lambda_j^n`.

use crate::algebra::algebraic::AlgebraicNumber;
use crate::algebra::factor::factor;
use crate::algebra::field::{fpoly, rat, Field};
use crate::algebra::lattice::IntMatrix;
use crate::algebra::matrix::{Matrix, RatMatrix};
use crate::algebra::numfield::{NfElem, NumberField};
use crate::algebra::poly::IntPoly;
use crate::loop_ir::int_to_rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::sync::Arc;

/// An irreducible factor of the characteristic polynomial.
#[derive(Clone, Debug)]
pub struct EigenFactor {
    pub poly: IntPoly,
    /// Multiplicity in the minimal polynomial.
    pub index: usize,
    /// Multiplicity in the characteristic polynomial.
    pub algebraic_multiplicity: usize,
    pub field: Arc<NumberField>,
    /// Indices into `SpectralData::eigenvalues`.
    pub roots: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Eigenvalue {
    pub value: AlgebraicNumber,
    pub index: usize,
    pub factor: usize,
}

#[derive(Clone, Debug)]
pub struct ModulusClass {
    /// Indices into `SpectralData::eigenvalues`, all of the same modulus.
    pub members: Vec<usize>,
    /// `rho^2` as a real algebraic number.
    pub modulus_squared: AlgebraicNumber,
}

#[derive(Clone, Debug)]
pub struct SpectralData {
    pub dim: usize,
    pub matrix: RatMatrix,
    pub factors: Vec<EigenFactor>,
    /// Every distinct eigenvalue including 0 when present.
    pub eigenvalues: Vec<Eigenvalue>,
    /// Classes of nonzero eigenvalues in strictly decreasing modulus.
    pub classes: Vec<ModulusClass>,
    pub min_poly_degree: usize,
}

impl SpectralData {
    pub fn zero_eigenvalue(&self) -> Option<usize> {
        self.eigenvalues.iter().position(|e| e.value.is_zero())
    }

    pub fn class_of(&self, eig: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.members.contains(&eig))
    }

    /// Minimal polynomial as a product of factor powers, rational coefficients low to high.
    pub fn min_poly(&self) -> Vec<BigRational> {
        let mut m = vec![rat(1)];
        for f in &self.factors {
            m = fpoly::mul(&m, &f.poly.pow(f.index as u32).to_rational());
        }
        m
    }

    /// Whether the matrix is diagonalisable over C.
    pub fn is_diagonalisable(&self) -> bool {
        self.factors.iter().all(|f| f.index == 1)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dim": self.dim,
            "diagonalisable": self.is_diagonalisable(),
            "min_poly_degree": self.min_poly_degree,
            "factors": self.factors.iter().map(|f| serde_json::json!({
                "poly": f.poly,
                "index": f.index,
                "algebraic_multiplicity": f.algebraic_multiplicity,
                "roots": f.roots,
            })).collect::<Vec<_>>(),
            "eigenvalues": self.eigenvalues.iter().enumerate().map(|(i, e)| serde_json::json!({
                "value": e.value,
                "index": e.index,
                "factor": e.factor,
                "class": self.class_of(i),
            })).collect::<Vec<_>>(),
            "classes": self.classes.iter().map(|c| serde_json::json!({
                "members": c.members,
                "modulus_squared": c.modulus_squared,
                "modulus": c.modulus_squared.to_f64().0.sqrt(),
            })).collect::<Vec<_>>(),
        })
    }
}

pub fn eigendecompose_int(a: &IntMatrix) -> SpectralData {
    eigendecompose(&int_to_rat(a))
}

pub fn eigendecompose(a: &RatMatrix) -> SpectralData {
    let d = a.rows();
    let cp = IntPoly::from_rational(&a.charpoly());
    let mut factors = Vec::new();
    let mut eigenvalues = Vec::new();
    for (q, mult) in factor(&cp) {
        let qm = a.eval_poly(&q.to_rational());
        let mut power = qm.clone();
        let mut rank = power.rank();
        let mut index = 1;
        while index < mult {
            let next = power.mul(&qm);
            let r = next.rank();
            if r == rank {
                break;
            }
            power = next;
            rank = r;
            index += 1;
        }
        let fi = factors.len();
        let mut roots = Vec::new();
        for v in AlgebraicNumber::roots_of(&q) {
            roots.push(eigenvalues.len());
            eigenvalues.push(Eigenvalue { value: v, index, factor: fi });
        }
        factors.push(EigenFactor { field: NumberField::new(&q), poly: q, index, algebraic_multiplicity: mult, roots });
    }
    let min_poly_degree = factors.iter().map(|f| f.index * f.poly.degree()).sum();

    let mut order: Vec<usize> = (0..eigenvalues.len()).filter(|&i| !eigenvalues[i].value.is_zero()).collect();
    order.sort_by(|&i, &j| eigenvalues[j].value.cmp_abs(&eigenvalues[i].value));
    let mut classes: Vec<ModulusClass> = Vec::new();
    for i in order {
        if let Some(c) = classes.last_mut() {
            if eigenvalues[c.members[0]].value.cmp_abs(&eigenvalues[i].value) == Ordering::Equal {
                c.members.push(i);
                continue;
            }
        }
        classes.push(ModulusClass { members: vec![i], modulus_squared: eigenvalues[i].value.abs_squared() });
    }
    SpectralData { dim: d, matrix: a.clone(), factors, eigenvalues, classes, min_poly_degree }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Support {
    Supported,
    Unsupported(String),
}

/// Supported iff every non-real eigenvalue is simple or the dimension is at most 5.
pub fn check_supported(spec: &SpectralData) -> Support {
    if spec.dim <= 5 {
        return Support::Supported;
    }
    for e in &spec.eigenvalues {
        if !e.value.is_real() && e.index > 1 {
            return Support::Unsupported(format!(
                "complex eigenvalue {} has index {} in dimension {}",
                e.value.approx_string(),
                e.index,
                spec.dim
            ));
        }
    }
    Support::Supported
}

fn nf_scale_rows(row: &[NfElem], m: &RatMatrix) -> Vec<NfElem> {
    // row vector times rational matrix
    let k = row[0].field().clone();
    (0..m.cols())
        .map(|j| {
            let mut acc = k.zero();
            for (i, r) in row.iter().enumerate() {
                let c = m.get(i, j);
                if !c.is_zero() && !r.is_zero_elem() {
                    acc = acc.add(&r.mul(&k.from_rational(c)));
                }
            }
            acc
        })
        .collect()
}

/// Polynomial `g` over the field of `f` with `g(A)` the projector onto the
/// generalised eigenspace of the generator.
fn projector_poly(spec: &SpectralData, f: &EigenFactor) -> Vec<NfElem> {
    let k = &f.field;
    let m: Vec<NfElem> = spec.min_poly().iter().map(|c| k.from_rational(c)).collect();
    let lin = vec![k.gen().neg(), k.one()];
    let mut pw = vec![k.one()];
    for _ in 0..f.index {
        pw = fpoly::mul(&pw, &lin);
    }
    let (h, r) = fpoly::divrem(&m, &pw);
    debug_assert!(r.is_empty());
    let (_, s, _) = fpoly::xgcd(&h, &pw, &k.one());
    let g = fpoly::mul(&s, &h);
    fpoly::rem(&g, &m)
}

/// Projector onto the generalised eigenspace of the generator of factor `fi`,
/// as a matrix over that factor's number field.
pub fn eigen_projector(spec: &SpectralData, fi: usize) -> Matrix<NfElem> {
    let f = &spec.factors[fi];
    let k = &f.field;
    let g = projector_poly(spec, f);
    let mk = spec.matrix.map(|x| k.from_rational(x));
    mk.eval_poly(&g)
}

/// Projector onto `V_i` (sum of generalised eigenspaces of class `ci`).
pub fn class_projector(spec: &SpectralData, ci: usize) -> Matrix<AlgebraicNumber> {
    let d = spec.dim;
    let mut acc = Matrix::filled(d, d, &AlgebraicNumber::zero());
    let mut by_factor: Vec<(usize, Vec<usize>)> = Vec::new();
    for &e in &spec.classes[ci].members {
        let fi = spec.eigenvalues[e].factor;
        match by_factor.iter_mut().find(|(f, _)| *f == fi) {
            Some((_, v)) => v.push(e),
            None => by_factor.push((fi, vec![e])),
        }
    }
    for (fi, members) in by_factor {
        let p = eigen_projector(spec, fi);
        let whole = members.len() == spec.factors[fi].roots.len();
        for i in 0..d {
            for j in 0..d {
                let entry = p.get(i, j);
                let v = if whole {
                    AlgebraicNumber::from_rational(entry.trace())
                } else {
                    members.iter().fold(AlgebraicNumber::zero(), |s, &e| {
                        s.add(&entry.embed(&spec.eigenvalues[e].value))
                    })
                };
                let cur = acc.get(i, j).add(&v);
                acc.set(i, j, cur);
            }
        }
    }
    acc
}

/// `u_i = P_i u` for every class, plus the component in the zero eigenspace last.
pub fn project_components(spec: &SpectralData, u: &[BigRational]) -> Vec<Vec<AlgebraicNumber>> {
    let au: Vec<AlgebraicNumber> = u.iter().map(|x| AlgebraicNumber::from_rational(x.clone())).collect();
    let mut out: Vec<Vec<AlgebraicNumber>> =
        (0..spec.classes.len()).map(|ci| class_projector(spec, ci).mul_vec(&au)).collect();
    if spec.zero_eigenvalue().is_some() {
        let mut rest = au.clone();
        for c in &out {
            rest = rest.iter().zip(c).map(|(x, y)| x.sub(y)).collect();
        }
        out.push(rest);
    }
    out
}

/// Signed Stirling numbers of the first kind `s(n, k)` for `n < size`.
fn stirling(size: usize) -> Vec<Vec<BigInt>> {
    let mut s = vec![vec![BigInt::zero(); size + 1]; size + 1];
    s[0][0] = BigInt::one();
    for n in 0..size {
        for k in 1..=n + 1 {
            s[n + 1][k] = &s[n][k - 1] - BigInt::from(n) * &s[n][k];
        }
    }
    s
}

/// Symbolic coefficient vectors. For factor `f` and `k < index`, `forms[f][k]`
/// is `alpha_{lambda,k}` with `lambda` the field generator; conjugate
/// eigenvalues share it through their embeddings.
#[derive(Clone, Debug)]
pub struct CoefficientData {
    pub guard: Vec<BigInt>,
    pub forms: Vec<Vec<Vec<NfElem>>>,
    /// Positive integer by which every form was multiplied so that all
    /// entries are algebraic integers.
    pub scale: BigInt,
    /// Expansion valid for `n >= threshold`.
    pub threshold: usize,
}

pub fn coefficient_vectors(spec: &SpectralData, b: &[BigInt]) -> CoefficientData {
    let d = spec.dim;
    let b_rat: Vec<BigRational> = b.iter().map(|x| BigRational::from_integer(x.clone())).collect();
    let mut forms = Vec::with_capacity(spec.factors.len());
    for f in &spec.factors {
        let k = &f.field;
        if f.poly.degree() == 1 && f.poly.coeff(0).is_zero() {
            forms.push(Vec::new());
            continue;
        }
        let g = projector_poly(spec, f);
        // r0 = b^T g(A) by Horner on the row vector
        let bk: Vec<NfElem> = b_rat.iter().map(|x| k.from_rational(x)).collect();
        let mut r: Vec<NfElem> = vec![k.zero(); d];
        for c in g.iter().rev() {
            r = nf_scale_rows(&r, &spec.matrix).iter().zip(&bk).map(|(x, y)| x.add(&y.mul(c))).collect();
        }
        // w_j = r0 (A - t)^j
        let t = k.gen();
        let mut w = vec![r];
        for _ in 1..f.index {
            let last = w.last().unwrap();
            let next: Vec<NfElem> =
                nf_scale_rows(last, &spec.matrix).iter().zip(last).map(|(x, y)| x.sub(&y.mul(&t))).collect();
            w.push(next);
        }
        let st = stirling(f.index);
        let tinv = t.inv().expect("nonzero eigenvalue");
        let mut fact = BigInt::one();
        let mut coeff_of: Vec<Vec<NfElem>> = vec![vec![k.zero(); d]; f.index];
        let mut tpow = k.one();
        for (j, wj) in w.iter().enumerate() {
            if j > 0 {
                fact *= j;
                tpow = tpow.mul(&tinv);
            }
            for (kk, slot) in coeff_of.iter_mut().enumerate().take(j + 1) {
                let s = &st[j][kk];
                if s.is_zero() {
                    continue;
                }
                let c = tpow.mul(&k.from_rational(&BigRational::new(s.clone(), fact.clone())));
                for (x, y) in slot.iter_mut().zip(wj) {
                    *x = x.add(&y.mul(&c));
                }
            }
        }
        forms.push(coeff_of);
    }
    let mut scale = BigInt::one();
    for e in forms.iter().flatten().flatten() {
        for c in e.poly() {
            scale = scale.lcm(c.denom());
        }
    }
    if !scale.is_one() {
        let s = BigRational::from_integer(scale.clone());
        for e in forms.iter_mut().flatten().flatten() {
            *e = e.mul(&e.from_rational_like(&s));
        }
    }
    CoefficientData { guard: b.to_vec(), forms, scale, threshold: d }
}

impl CoefficientData {
    /// `alpha_{f,k}^T u` as an element of the factor's field.
    pub fn form_value(&self, f: usize, k: usize, u: &[BigRational]) -> NfElem {
        let form = &self.forms[f][k];
        let field = form[0].field().clone();
        form.iter().zip(u).fold(field.zero(), |acc, (a, x)| {
            if x.is_zero() {
                acc
            } else {
                acc.add(&a.mul(&field.from_rational(x)))
            }
        })
    }

    /// Embedded coefficient vector `alpha_{j,k}` for eigenvalue `j`.
    pub fn alpha(&self, spec: &SpectralData, eig: usize, k: usize) -> Vec<AlgebraicNumber> {
        let e = &spec.eigenvalues[eig];
        self.forms[e.factor][k].iter().map(|x| x.embed(&e.value)).collect()
    }

    /// `scale * b^T A^n u` from the expansion, exact, for `n >= threshold`.
    pub fn evaluate_scaled(&self, spec: &SpectralData, u: &[BigRational], n: u64) -> BigRational {
        let mut total = BigRational::zero();
        for (fi, f) in spec.factors.iter().enumerate() {
            if self.forms[fi].is_empty() {
                continue;
            }
            let t = f.field.gen();
            let mut tn = f.field.one();
            let mut base = t;
            let mut e = n;
            while e > 0 {
                if e & 1 == 1 {
                    tn = tn.mul(&base);
                }
                base = base.mul(&base);
                e >>= 1;
            }
            let mut nk = BigRational::one();
            let nr = BigRational::from_integer(BigInt::from(n));
            for k in 0..self.forms[fi].len() {
                let v = self.form_value(fi, k, u).mul(&tn);
                total += v.trace() * &nk;
                nk *= &nr;
            }
        }
        total
    }

    /// Sign of an element's image at a real eigenvalue.
    pub fn real_sign(elem: &NfElem, at: &AlgebraicNumber) -> i32 {
        if elem.is_zero_elem() {
            return 0;
        }
        if let Some(q) = elem.as_rational() {
            return if q.is_positive() { 1 } else { -1 };
        }
        let mut bits = 32;
        loop {
            if let Some(s) = elem.approx_at(at, bits).re_sign() {
                if s != 0 {
                    return s;
                }
            }
            if bits > 4096 {
                return elem.embed(at).sign();
            }
            bits *= 2;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn q(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn jordan_block_index() {
        let s = eigendecompose_int(&m(&[&[1, -1], &[0, 1]]));
        assert_eq!(s.eigenvalues.len(), 1);
        assert_eq!(s.eigenvalues[0].index, 2);
        assert_eq!(s.min_poly_degree, 2);
        let id = eigendecompose_int(&m(&[&[1, 0], &[0, 1]]));
        assert_eq!(id.eigenvalues[0].index, 1);
        assert_eq!(id.classes.len(), 1);
    }

    #[test]
    fn companion_single_class() {
        // x^3 - 5x^2 + 10x - 8
        let s = eigendecompose_int(&m(&[&[0, 0, 8], &[1, 0, -10], &[0, 1, 5]]));
        assert_eq!(s.eigenvalues.len(), 3);
        assert_eq!(s.classes.len(), 1);
        assert_eq!(s.classes[0].modulus_squared, AlgebraicNumber::from_int(4));
    }

    #[test]
    fn jordan_coefficients() {
        let a = m(&[&[1, -1], &[0, 1]]);
        let s = eigendecompose_int(&a);
        let c = coefficient_vectors(&s, &[BigInt::from(1), BigInt::from(0)]);
        assert_eq!(c.scale, BigInt::one());
        assert_eq!(c.form_value(0, 0, &q(&[1, 0])).as_rational(), Some(rat(1)));
        assert_eq!(c.form_value(0, 0, &q(&[0, 1])).as_rational(), Some(rat(0)));
        assert_eq!(c.form_value(0, 1, &q(&[0, 1])).as_rational(), Some(rat(-1)));
        assert_eq!(c.form_value(0, 1, &q(&[1, 0])).as_rational(), Some(rat(0)));
    }

    #[test]
    fn expansion_matches_powers() {
        let a = m(&[&[0, 0, 8, 1], &[1, 0, -10, 0], &[0, 1, 5, 2], &[0, 0, 0, -1]]);
        let s = eigendecompose_int(&a);
        let b = vec![BigInt::from(2), BigInt::from(-1), BigInt::from(3), BigInt::from(1)];
        let c = coefficient_vectors(&s, &b);
        let u = q(&[3, -2, 5, 7]);
        let ar = int_to_rat(&a);
        let mut x = u.clone();
        for n in 0..12u64 {
            if n as usize >= s.dim {
                let direct: BigRational = b.iter().zip(&x).map(|(p, y)| BigRational::from_integer(p.clone()) * y).sum();
                assert_eq!(c.evaluate_scaled(&s, &u, n), direct * BigRational::from_integer(c.scale.clone()));
            }
            x = ar.mul_vec(&x);
        }
    }

    #[test]
    fn projectors_resolve_identity() {
        let a = m(&[&[2, 1, 0], &[0, 2, 0], &[0, 0, -1]]);
        let s = eigendecompose_int(&a);
        assert_eq!(s.classes.len(), 2);
        let p0 = class_projector(&s, 0);
        let p1 = class_projector(&s, 1);
        let sum = p0.add(&p1);
        let am = s.matrix.map(|x| AlgebraicNumber::from_rational(x.clone()));
        for i in 0..3 {
            for j in 0..3 {
                let want = AlgebraicNumber::from_int((i == j) as i64);
                assert_eq!(sum.get(i, j), &want);
            }
        }
        assert_eq!(p0.mul(&p0).data(), p0.data());
        assert_eq!(am.mul(&p1).data(), p1.mul(&am).data());
        let comps = project_components(&s, &q(&[1, 1, 1]));
        assert_eq!(comps[1], vec![AlgebraicNumber::zero(), AlgebraicNumber::zero(), AlgebraicNumber::one()]);
    }

    #[test]
    fn support_check() {
        let s = eigendecompose_int(&m(&[&[1, 0], &[0, 1]]));
        assert_eq!(check_supported(&s), Support::Supported);
        // (x^2+1)^2 block diagonal with a 2x2 identity: dimension 6, complex index 2
        let a = m(&[
            &[0, -1, 1, 0, 0, 0],
            &[1, 0, 0, 1, 0, 0],
            &[0, 0, 0, -1, 0, 0],
            &[0, 0, 1, 0, 0, 0],
            &[0, 0, 0, 0, 1, 0],
            &[0, 0, 0, 0, 0, 1],
        ]);
        assert!(matches!(check_supported(&eigendecompose_int(&a)), Support::Unsupported(_)));
    }
}
