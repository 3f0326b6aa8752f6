//! Factorization of integer polynomials into irreducibles over Q.
//!
//! Square-free decomposition, then for each square-free part: reduction to a
//! monic polynomial, factorization modulo a good prime, Hensel lifting and
//! subset recombination.

use super::modular::{is_prime, Zp};
use super::poly::IntPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Irreducible factors of `p` with multiplicities. Factors are primitive with
/// positive leading coefficient; the constant content is dropped.
pub fn factor(p: &IntPoly) -> Vec<(IntPoly, usize)> {
    let mut out = Vec::new();
    if p.degree() == 0 {
        return out;
    }
    let mut p = p.primitive();
    // Pull out powers of x first so the remaining polynomial has nonzero constant term.
    let mut k = 0;
    while p.coeff(0).is_zero() {
        k += 1;
        p = IntPoly::new(p.coeffs()[1..].to_vec());
    }
    if k > 0 {
        out.push((IntPoly::x(), k));
    }
    for (sf, m) in p.squarefree_decomposition() {
        for g in factor_squarefree(&sf) {
            out.push((g, m));
        }
    }
    out.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| a.0.coeffs().cmp(b.0.coeffs())));
    out
}

/// Distinct irreducible factors of a square-free primitive polynomial.
pub fn factor_squarefree(f: &IntPoly) -> Vec<IntPoly> {
    let f = f.primitive();
    let n = f.degree();
    if n <= 1 {
        return if n == 1 { vec![f] } else { Vec::new() };
    }
    // Monic transform: F(y) = a^(n-1) f(y / a), with a = lc(f).
    let a = f.lc();
    let mono = if a.is_one() {
        f.clone()
    } else {
        let mut c = Vec::with_capacity(n + 1);
        let mut apow = BigInt::one();
        for i in (0..=n).rev() {
            c.push(f.coeff(i) * &apow);
            apow *= &a;
        }
        c.reverse();
        // c[i] = f_i * a^(n-i); dividing by a gives f_i a^(n-1-i), with c[n] = a^0 * f_n / a = 1.
        let mut c2: Vec<BigInt> = c.iter().map(|v| v / &a).collect();
        c2[n] = BigInt::one();
        IntPoly::new(c2)
    };
    let monic_factors = factor_monic_squarefree(&mono);
    if a.is_one() {
        return monic_factors;
    }
    monic_factors
        .into_iter()
        .map(|g| {
            // g(a x), primitive part.
            let mut apow = BigInt::one();
            let mut c = Vec::new();
            for co in g.coeffs() {
                c.push(co * &apow);
                apow *= &a;
            }
            IntPoly::new(c).primitive()
        })
        .collect()
}

fn l2_norm_ceil(f: &IntPoly) -> BigInt {
    let s: BigInt = f.coeffs().iter().map(|c| c * c).sum();
    let r = s.sqrt();
    if &r * &r == s {
        r
    } else {
        r + 1
    }
}

fn choose_prime(f: &IntPoly) -> (Zp, Vec<Vec<u64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut best: Option<(Zp, Vec<Vec<u64>>)> = None;
    let mut tried = 0;
    let mut cand: u64 = 10_007;
    while tried < 4 {
        cand += 2;
        if !is_prime(cand) {
            continue;
        }
        let zp = Zp::new(cand);
        let fm = reduce(f, cand);
        if fm.len() != f.degree() + 1 || !zp.is_squarefree(&fm) {
            continue;
        }
        tried += 1;
        let fs = zp.factor_squarefree(&fm, &mut rng);
        if best.as_ref().is_none_or(|(_, b)| fs.len() < b.len()) {
            best = Some((zp, fs));
        }
        if best.as_ref().unwrap().1.len() == 1 {
            break;
        }
    }
    best.unwrap()
}

fn reduce(f: &IntPoly, p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    let mut v: Vec<u64> = f.coeffs().iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn to_int(a: &[u64]) -> Vec<BigInt> {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

fn mod_vec(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    a.iter().map(|c| c.mod_floor(m)).collect()
}

fn int_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Hensel lift `f = g h (mod p)` with `g`, `h` monic coprime mod p, `f` monic
/// modulo `p^k`, to `f = G H (mod p^k)`.
fn hensel_pair(zp: &Zp, f: &[BigInt], g: &[u64], h: &[u64], k: u32) -> (Vec<BigInt>, Vec<BigInt>) {
    let p = BigInt::from(zp.p);
    let (_, s, t) = zp.xgcd(g, h);
    let mut gg = to_int(g);
    let mut hh = to_int(h);
    let mut pj = p.clone();
    for _ in 1..k {
        let pj1 = &pj * &p;
        let prod = int_mul(&gg, &hh);
        let n = f.len().max(prod.len());
        // e = (f - G H) / p^j mod p
        let mut e: Vec<u64> = (0..n)
            .map(|i| {
                let d = f.get(i).cloned().unwrap_or_default() - prod.get(i).cloned().unwrap_or_default();
                let d = d.mod_floor(&pj1);
                debug_assert!((&d % &pj).is_zero());
                (d / &pj).to_u64().unwrap()
            })
            .collect();
        zp.trim(&mut e);
        let (q, sigma) = zp.divrem(&zp.mul(&s, &e), h);
        let tau = zp.add(&zp.mul(&t, &e), &zp.mul(&q, g));
        for (i, c) in tau.iter().enumerate() {
            gg[i] = (&gg[i] + &pj * BigInt::from(*c)).mod_floor(&pj1);
        }
        for (i, c) in sigma.iter().enumerate() {
            hh[i] = (&hh[i] + &pj * BigInt::from(*c)).mod_floor(&pj1);
        }
        pj = pj1;
    }
    (gg, hh)
}

fn hensel_lift(zp: &Zp, f: &[BigInt], facs: &[Vec<u64>], k: u32, m: &BigInt) -> Vec<Vec<BigInt>> {
    if facs.len() == 1 {
        return vec![mod_vec(f, m)];
    }
    let g = &facs[0];
    let h = facs[1..].iter().fold(vec![1u64], |acc, x| zp.mul(&acc, x));
    let (gl, hl) = hensel_pair(zp, f, g, &h, k);
    let mut out = vec![gl];
    out.extend(hensel_lift(zp, &hl, &facs[1..], k, m));
    out
}

fn symmetric(a: &[BigInt], m: &BigInt) -> IntPoly {
    let half = m / 2;
    IntPoly::new(
        a.iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

fn factor_monic_squarefree(f: &IntPoly) -> Vec<IntPoly> {
    let n = f.degree();
    if n <= 1 {
        return vec![f.clone()];
    }
    let (zp, modf) = choose_prime(f);
    if modf.len() == 1 {
        return vec![f.clone()];
    }
    // Any monic factor has coefficients bounded by 2^n ||f||_2.
    let bound = (BigInt::one() << n) * l2_norm_ceil(f);
    let p = BigInt::from(zp.p);
    let mut k = 1u32;
    let mut m = p.clone();
    while m <= &bound * 2 {
        m *= &p;
        k += 1;
    }
    let lifted = hensel_lift(&zp, f.coeffs(), &modf, k, &m);
    recombine(f, lifted, &m)
}

fn recombine(f: &IntPoly, mut lifted: Vec<Vec<BigInt>>, m: &BigInt) -> Vec<IntPoly> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let r = lifted.len();
        let mut found = false;
        for subset in Subsets::new(r, size) {
            let prod = subset.iter().fold(vec![BigInt::one()], |acc, &i| mod_vec(&int_mul(&acc, &lifted[i]), m));
            let cand = symmetric(&prod, m);
            if let Some(q) = rest.div_exact(&cand) {
                out.push(cand);
                rest = q;
                let keep: Vec<Vec<BigInt>> = lifted
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !subset.contains(i))
                    .map(|(_, v)| v.clone())
                    .collect();
                lifted = keep;
                found = true;
                break;
            }
        }
        if !found {
            size += 1;
        }
    }
    if rest.degree() > 0 {
        out.push(rest);
    }
    out
}

struct Subsets {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Subsets {
    fn new(n: usize, k: usize) -> Self {
        Subsets { n, idx: (0..k).collect(), done: k > n }
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let cur = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(cur)
    }
}

/// Whether `p` (primitive, degree >= 1) is irreducible over Q.
pub fn is_irreducible(p: &IntPoly) -> bool {
    let f = factor(p);
    f.len() == 1 && f[0].1 == 1
}

/// Smallest `r` such that `p` divides `x^r - 1`, if `p` is a cyclotomic
/// polynomial (irreducible factor of some `x^r - 1`). Searches `r <= 2 deg^2 + 2`.
pub fn cyclotomic_order(p: &IntPoly) -> Option<u64> {
    let p = p.primitive();
    if !p.is_monic() || !p.coeff(0).abs().is_one() {
        return None;
    }
    let d = p.degree() as u64;
    let pr = p.to_rational();
    let limit = 2 * d * d + 2;
    // x^r mod p iteratively.
    let x = IntPoly::x().to_rational();
    let mut cur = super::field::fpoly::rem(&x, &pr);
    let one = super::field::rat(1);
    for r in 1..=limit {
        if cur.len() == 1 && cur[0] == one {
            return Some(r);
        }
        cur = super::field::fpoly::rem(&super::field::fpoly::mul(&cur, &x), &pr);
    }
    None
}


#[cfg(test)]
mod tests {
    use super::*;

    fn prod(fs: &[(IntPoly, usize)]) -> IntPoly {
        fs.iter().fold(IntPoly::one(), |acc, (g, m)| acc.mul(&g.pow(*m as u32)))
    }

    #[test]
    fn factors_swinnerton_dyer_like() {
        // x^4 - 10x^2 + 1 is irreducible but splits modulo every prime.
        let f = IntPoly::from_i64(&[1, 0, -10, 0, 1]);
        assert!(is_irreducible(&f));
    }

    #[test]
    fn factors_product() {
        let a = IntPoly::from_i64(&[-2, 0, 1]);
        let b = IntPoly::from_i64(&[1, 1, 1]);
        let c = IntPoly::from_i64(&[3, -1, 0, 2]);
        let f = a.mul(&b).mul(&b).mul(&c);
        let fs = factor(&f);
        assert_eq!(fs.len(), 3);
        assert_eq!(prod(&fs), f.primitive());
    }

    #[test]
    fn non_monic() {
        let f = IntPoly::from_i64(&[1, 2]).mul(&IntPoly::from_i64(&[-3, 0, 5]));
        let fs = factor(&f);
        assert_eq!(fs.len(), 2);
        assert_eq!(prod(&fs), f);
    }

    #[test]
    fn cyclotomic() {
        assert_eq!(cyclotomic_order(&IntPoly::from_i64(&[1, 1, 1])), Some(3));
        assert_eq!(cyclotomic_order(&IntPoly::from_i64(&[1, 0, 1])), Some(4));
        assert_eq!(cyclotomic_order(&IntPoly::from_i64(&[1, -3, 1])), None);
        assert_eq!(cyclotomic_order(&IntPoly::from_i64(&[-1, 1])), Some(1));
        assert_eq!(cyclotomic_order(&IntPoly::from_i64(&[1, -1, 1])), Some(6));
        assert_eq!(cyclotomic_order(&IntPoly::from_i64(&[1, -1, 1, -1, 1])), Some(10));
        assert_eq!(cyclotomic_order(&IntPoly::from_i64(&[1, -1, 1, 0, 1])), None);
    }
}
