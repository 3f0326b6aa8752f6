//! The witness set `W`: a convex, exactly evaluable region that agrees with
//! the eventually non-terminating points on integer (indeed algebraic) inputs.

mod torus;

pub use torus::{torus_min, TorusMin, TorusPath, TorusSign, Value};

use crate::algebra::algebraic::AlgebraicNumber;
use crate::algebra::field::Field;
use crate::algebra::lattice::{mat_mul, IntMatrix};
use crate::algebra::numfield::NfElem;
use crate::loop_ir::{compute_l, depower, homogenize, split_rows, LoopProgram, ReductionCertificate};
use crate::relations::{masser_bound, relation_lattice_with_budget, torus_group, RelationLattice, TorusGroup};
use crate::spectral::{check_supported, coefficient_vectors, eigendecompose_int, CoefficientData, SpectralData, Support};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value as Json};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct WitnessConfig {
    /// Exponent constant in the relation search bound.
    pub lattice_c: f64,
    /// Numeric candidates per radius in the relation search.
    pub enumeration_budget: u64,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig { lattice_c: 2.0, enumeration_budget: crate::relations::DEFAULT_ENUMERATION_BUDGET }
    }
}

#[derive(Clone, Debug)]
pub enum CaseShape {
    /// No positive real eigenvalue: `ENT_i = ZERO_i`.
    CaseII,
    /// Positive real `rho` of index `t` plus simple complex eigenvalues
    /// (one representative per conjugate pair, positive imaginary part).
    CaseIII { rho: usize, t: usize, complex: Vec<usize>, lattice: RelationLattice, torus: TorusGroup },
    /// Simple `rho` and one conjugate pair of index 2 (dimension at most 5).
    CaseI { rho: usize, lambda: usize },
    Unsupported(String),
}

impl CaseShape {
    pub fn tag(&self) -> &'static str {
        match self {
            CaseShape::CaseII => "II",
            CaseShape::CaseIII { .. } => "III",
            CaseShape::CaseI { .. } => "I",
            CaseShape::Unsupported(_) => "unsupported",
        }
    }
}

#[derive(Clone, Debug)]
pub struct EntPiece {
    pub class: usize,
    pub shape: CaseShape,
}

fn im_sign(x: &AlgebraicNumber) -> i32 {
    let mut bits = 16;
    loop {
        if let Some(s) = x.approx(bits).im_sign() {
            if s != 0 {
                return s;
            }
        }
        bits *= 2;
    }
}

/// Decide which case of the per-class analysis applies.
pub fn classify_class(spec: &SpectralData, ci: usize, cfg: &WitnessConfig) -> EntPiece {
    let members = &spec.classes[ci].members;
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut complex = Vec::new();
    for &e in members {
        let v = &spec.eigenvalues[e].value;
        if v.is_real() {
            if v.sign() > 0 {
                pos.push(e);
            } else {
                neg.push(e);
            }
        } else if im_sign(v) > 0 {
            complex.push(e);
        }
    }
    let shape = if pos.is_empty() {
        CaseShape::CaseII
    } else if !neg.is_empty() || pos.len() > 1 {
        CaseShape::Unsupported("class contains two real eigenvalues (degenerate matrix)".into())
    } else {
        let rho = pos[0];
        let t = spec.eigenvalues[rho].index;
        if complex.iter().all(|&e| spec.eigenvalues[e].index == 1) {
            let r = &spec.eigenvalues[rho].value;
            let mu: Vec<AlgebraicNumber> =
                complex.iter().map(|&e| spec.eigenvalues[e].value.div(r).expect("nonzero")).collect();
            let bound = masser_bound(&mu, cfg.lattice_c);
            let lattice = relation_lattice_with_budget(&mu, bound, cfg.enumeration_budget);
            let torus = torus_group(&lattice);
            CaseShape::CaseIII { rho, t, complex, lattice, torus }
        } else if spec.dim <= 5 && t == 1 && complex.len() == 1 && spec.eigenvalues[complex[0]].index == 2 {
            CaseShape::CaseI { rho, lambda: complex[0] }
        } else {
            CaseShape::Unsupported("class with a repeated complex eigenvalue outside the supported shapes".into())
        }
    };
    EntPiece { class: ci, shape }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    In,
    Out,
    Inconclusive,
}

impl Membership {
    fn and(self, o: Membership) -> Membership {
        match (self, o) {
            (Membership::Out, _) | (_, Membership::Out) => Membership::Out,
            (Membership::Inconclusive, _) | (_, Membership::Inconclusive) => Membership::Inconclusive,
            _ => Membership::In,
        }
    }
}

/// Which part of `W` decided a membership query.
#[derive(Clone, Debug, PartialEq)]
pub enum Explanation {
    Zero,
    CaseII { class: usize },
    Ladder { class: usize, j: usize, sign: i32 },
    Torus { class: usize, sign: TorusSign, path: TorusPath, approx: f64 },
    CaseIOscillating { class: usize },
    Unsupported { class: usize },
}

/// `(factor, k)` pairs of all forms attached to a class.
pub fn class_forms(spec: &SpectralData, ci: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for &e in &spec.classes[ci].members {
        let f = spec.eigenvalues[e].factor;
        for k in 0..spec.eigenvalues[e].index {
            if !out.contains(&(f, k)) {
                out.push((f, k));
            }
        }
    }
    out
}

/// `ZERO`: all coefficient forms vanish.
#[derive(Clone, Debug)]
pub struct ZeroSet {
    pub forms: Vec<(usize, usize)>,
}

pub fn zero_set(spec: &SpectralData) -> ZeroSet {
    let mut forms = Vec::new();
    for ci in 0..spec.classes.len() {
        for fk in class_forms(spec, ci) {
            if !forms.contains(&fk) {
                forms.push(fk);
            }
        }
    }
    ZeroSet { forms }
}

impl ZeroSet {
    pub fn contains(&self, coeffs: &CoefficientData, v: &[BigRational]) -> bool {
        self.forms.iter().all(|&(f, k)| coeffs.form_value(f, k, v).is_zero_elem())
    }
}

/// Least class whose component is not in `ZERO_i`.
pub fn dominant_component(spec: &SpectralData, coeffs: &CoefficientData, v: &[BigRational]) -> Option<usize> {
    (0..spec.classes.len())
        .find(|&ci| class_forms(spec, ci).iter().any(|&(f, k)| !coeffs.form_value(f, k, v).is_zero_elem()))
}

/// Witness set of one non-degenerate single-guard homogeneous program.
#[derive(Clone, Debug)]
pub struct RowWitness {
    pub spec: Arc<SpectralData>,
    pub coeffs: CoefficientData,
    pub pieces: Arc<Vec<EntPiece>>,
}

impl RowWitness {
    pub fn new(spec: Arc<SpectralData>, b: &[BigInt], pieces: Arc<Vec<EntPiece>>) -> Self {
        let coeffs = coefficient_vectors(&spec, b);
        RowWitness { spec, coeffs, pieces }
    }

    pub fn membership(&self, v: &[BigRational]) -> (Membership, Explanation) {
        let Some(ci) = dominant_component(&self.spec, &self.coeffs, v) else {
            return (Membership::In, Explanation::Zero);
        };
        self.ent(ci, v)
    }

    fn val(&self, eig: usize, k: usize, v: &[BigRational]) -> Value {
        let e = &self.spec.eigenvalues[eig];
        Value::Emb(self.coeffs.form_value(e.factor, k, v), e.value.clone())
    }

    /// Whether the class-`ci` component of `v` lies in `ENT_i`.
    pub fn ent(&self, ci: usize, v: &[BigRational]) -> (Membership, Explanation) {
        let spec = &self.spec;
        match &self.pieces[ci].shape {
            CaseShape::CaseII => (Membership::Out, Explanation::CaseII { class: ci }),
            CaseShape::Unsupported(_) => (Membership::Inconclusive, Explanation::Unsupported { class: ci }),
            CaseShape::CaseIII { rho, t, complex, torus, .. } => {
                let r = &spec.eigenvalues[*rho];
                for j in (1..*t).rev() {
                    let s = CoefficientData::real_sign(&self.coeffs.form_value(r.factor, j, v), &r.value);
                    if s != 0 {
                        let m = if s > 0 { Membership::In } else { Membership::Out };
                        return (m, Explanation::Ladder { class: ci, j, sign: s });
                    }
                }
                let a0 = self.val(*rho, 0, v);
                let betas: Vec<Value> = complex.iter().map(|&e| self.val(e, 0, v)).collect();
                let tm = torus_min(&a0, &betas, torus);
                let m = match tm.sign {
                    TorusSign::Nonneg => Membership::In,
                    TorusSign::Neg => Membership::Out,
                    TorusSign::Inconclusive => Membership::Inconclusive,
                };
                (m, Explanation::Torus { class: ci, sign: tm.sign, path: tm.path, approx: tm.approx })
            }
            CaseShape::CaseI { rho, lambda } => {
                let f = spec.eigenvalues[*lambda].factor;
                if !self.coeffs.form_value(f, 1, v).is_zero_elem() {
                    return (Membership::Out, Explanation::CaseIOscillating { class: ci });
                }
                let tm = torus_min(&self.val(*rho, 0, v), &[self.val(*lambda, 0, v)], &TorusGroup::full(1));
                let m = if tm.sign == TorusSign::Nonneg { Membership::In } else { Membership::Out };
                (m, Explanation::Torus { class: ci, sign: tm.sign, path: tm.path, approx: tm.approx })
            }
        }
    }
}

/// Affine form `u -> c . u + c_0` over a number field (last entry is `c_0`).
#[derive(Clone, Debug)]
pub struct AffineForm {
    pub coeffs: Vec<NfElem>,
}

impl AffineForm {
    pub fn is_constant(&self) -> bool {
        self.coeffs[..self.coeffs.len() - 1].iter().all(|c| c.is_zero_elem())
    }

    pub fn constant(&self) -> &NfElem {
        self.coeffs.last().unwrap()
    }

    pub fn eval(&self, u: &[BigRational]) -> NfElem {
        let k = self.coeffs[0].field().clone();
        let mut acc = self.constant().clone();
        for (c, x) in self.coeffs.iter().zip(u) {
            if !x.is_zero() && !c.is_zero_elem() {
                acc = acc.add(&c.mul(&k.from_rational(x)));
            }
        }
        acc
    }

    /// Rational equations (one per power-basis coordinate) equivalent to `form = 0`.
    /// Each row has the `u` coefficients followed by the constant.
    pub fn rational_rows(&self) -> Vec<Vec<BigRational>> {
        let deg = self.coeffs[0].field().degree();
        let coords: Vec<Vec<BigRational>> = self.coeffs.iter().map(|c| c.coords()).collect();
        (0..deg).map(|t| coords.iter().map(|c| c[t].clone()).collect()).filter(|r: &Vec<BigRational>| r.iter().any(|x| !x.is_zero())).collect()
    }
}

#[derive(Clone, Debug)]
pub enum Constraint {
    /// `form = 0` in its field.
    Zero(AffineForm),
    /// `form > 0` under the real embedding `at`.
    Positive { form: AffineForm, at: AlgebraicNumber },
    /// At least one form is nonzero.
    NonZero(Vec<AffineForm>),
    /// `alpha0 + sum 2 Re(beta_j z_j) >= 0` for all `z` in the torus.
    Torus { alpha0: AffineForm, rho: AlgebraicNumber, betas: Vec<(AffineForm, AlgebraicNumber)>, torus: TorusGroup },
}

#[derive(Clone, Debug)]
pub struct Branch {
    pub label: String,
    pub constraints: Vec<Constraint>,
}

/// Witness set of an arbitrary loop, on its own state space, obtained by
/// homogenizing, splitting guard rows and removing degeneracy.
#[derive(Clone, Debug)]
pub struct WitnessSet {
    pub original: LoopProgram,
    pub homogenized: LoopProgram,
    pub l: u64,
    /// `A'^i` for `i < l` on the homogenized space.
    pub phases: Vec<IntMatrix>,
    pub reduced_update: IntMatrix,
    pub spec: Arc<SpectralData>,
    pub support: Support,
    pub pieces: Arc<Vec<EntPiece>>,
    pub rows: Vec<RowWitness>,
    pub certificates: Vec<ReductionCertificate>,
}

pub fn build_witness(p: &LoopProgram, cfg: &WitnessConfig) -> WitnessSet {
    let (h, hc) = homogenize(p);
    let l = compute_l(&h.update);
    let (reduced, dc) = depower(&h, l);
    let spec = Arc::new(eigendecompose_int(&reduced.update));
    let mut support = check_supported(&spec);
    let pieces: Vec<EntPiece> = (0..spec.classes.len()).map(|ci| classify_class(&spec, ci, cfg)).collect();
    if support == Support::Supported {
        if let Some(EntPiece { shape: CaseShape::Unsupported(why), .. }) =
            pieces.iter().find(|pc| matches!(pc.shape, CaseShape::Unsupported(_)))
        {
            support = Support::Unsupported(why.clone());
        }
    }
    let pieces = Arc::new(pieces);
    let mut certificates = vec![hc];
    let split = split_rows(&h);
    if let Some((_, c)) = split.first() {
        certificates.push(c.clone());
    }
    certificates.push(dc);
    let rows = split.iter().map(|(q, _)| RowWitness::new(spec.clone(), &q.guard[0], pieces.clone())).collect();
    let mut phases = Vec::with_capacity(l as usize);
    let mut pw = crate::algebra::lattice::identity(h.dim);
    for _ in 0..l {
        let next = mat_mul(&h.update, &pw);
        phases.push(std::mem::replace(&mut pw, next));
    }
    WitnessSet {
        original: p.clone(),
        homogenized: h,
        l,
        phases,
        reduced_update: reduced.update,
        spec,
        support,
        pieces,
        rows,
        certificates,
    }
}

fn lift(u: &[BigRational]) -> Vec<BigRational> {
    let mut v = u.to_vec();
    v.push(BigRational::one());
    v
}

fn apply(m: &IntMatrix, v: &[BigRational]) -> Vec<BigRational> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(BigRational::zero(), |acc, (a, x)| acc + BigRational::from_integer(a.clone()) * x))
        .collect()
}

impl WitnessSet {
    pub fn dim(&self) -> usize {
        self.original.dim
    }

    pub fn is_supported(&self) -> bool {
        self.support == Support::Supported
    }

    /// Point of the reduced space examined for guard row `r` and phase `i`.
    pub fn reduced_point(&self, i: usize, u: &[BigRational]) -> Vec<BigRational> {
        apply(&self.phases[i], &lift(u))
    }

    /// Exact membership of a rational point of the original state space.
    pub fn membership(&self, u: &[BigRational]) -> Membership {
        self.membership_detail(u).0
    }

    /// Membership plus the explanation for each `(row, phase)`.
    pub fn membership_detail(&self, u: &[BigRational]) -> (Membership, Vec<(usize, usize, Explanation)>) {
        let mut m = Membership::In;
        let mut why = Vec::new();
        for i in 0..self.phases.len() {
            let v = self.reduced_point(i, u);
            for (r, row) in self.rows.iter().enumerate() {
                let (mr, e) = row.membership(&v);
                why.push((r, i, e));
                m = m.and(mr);
                if m == Membership::Out {
                    return (m, why);
                }
            }
        }
        (m, why)
    }

    pub fn membership_int(&self, u: &[BigInt]) -> Membership {
        let q: Vec<BigRational> = u.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        self.membership(&q)
    }

    fn form(&self, r: usize, i: usize, f: usize, k: usize) -> AffineForm {
        let alpha = &self.rows[r].coeffs.forms[f][k];
        let p = &self.phases[i];
        let field = alpha[0].field().clone();
        let coeffs = (0..p.len())
            .map(|l| {
                alpha.iter().enumerate().fold(field.zero(), |acc, (m, a)| {
                    let x = &p[m][l];
                    if x.is_zero() {
                        acc
                    } else {
                        acc.add(&a.mul(&field.from_rational(&BigRational::from_integer(x.clone()))))
                    }
                })
            })
            .collect();
        AffineForm { coeffs }
    }

    fn class_zero(&self, r: usize, i: usize, ci: usize) -> Vec<Constraint> {
        class_forms(&self.spec, ci).into_iter().map(|(f, k)| Constraint::Zero(self.form(r, i, f, k))).collect()
    }

    /// Disjunctive pieces of the witness set for guard row `r` at phase `i`,
    /// as constraints on the original state `u`.
    pub fn branches(&self, r: usize, i: usize) -> Vec<Branch> {
        let spec = &self.spec;
        let mut out = Vec::new();
        let mut prefix: Vec<Constraint> = Vec::new();
        for ci in 0..spec.classes.len() {
            let nonzero = Constraint::NonZero(
                class_forms(spec, ci).into_iter().map(|(f, k)| self.form(r, i, f, k)).collect(),
            );
            match &self.pieces[ci].shape {
                CaseShape::CaseII | CaseShape::Unsupported(_) => {}
                CaseShape::CaseIII { rho, t, complex, torus, .. } => {
                    let e = &spec.eigenvalues[*rho];
                    for j in (1..*t).rev() {
                        let mut cs = prefix.clone();
                        cs.push(Constraint::Positive { form: self.form(r, i, e.factor, j), at: e.value.clone() });
                        for k in j + 1..*t {
                            cs.push(Constraint::Zero(self.form(r, i, e.factor, k)));
                        }
                        out.push(Branch { label: format!("class {ci} ladder j={j}"), constraints: cs });
                    }
                    let mut cs = prefix.clone();
                    for k in 1..*t {
                        cs.push(Constraint::Zero(self.form(r, i, e.factor, k)));
                    }
                    cs.push(nonzero.clone());
                    let betas = complex
                        .iter()
                        .map(|&c| (self.form(r, i, spec.eigenvalues[c].factor, 0), spec.eigenvalues[c].value.clone()))
                        .collect();
                    cs.push(Constraint::Torus {
                        alpha0: self.form(r, i, e.factor, 0),
                        rho: e.value.clone(),
                        betas,
                        torus: torus.clone(),
                    });
                    out.push(Branch { label: format!("class {ci} torus"), constraints: cs });
                }
                CaseShape::CaseI { rho, lambda } => {
                    let e = &spec.eigenvalues[*rho];
                    let l = &spec.eigenvalues[*lambda];
                    let mut cs = prefix.clone();
                    cs.push(Constraint::Zero(self.form(r, i, l.factor, 1)));
                    cs.push(nonzero.clone());
                    cs.push(Constraint::Torus {
                        alpha0: self.form(r, i, e.factor, 0),
                        rho: e.value.clone(),
                        betas: vec![(self.form(r, i, l.factor, 0), l.value.clone())],
                        torus: TorusGroup::full(1),
                    });
                    out.push(Branch { label: format!("class {ci} case I"), constraints: cs });
                }
            }
            prefix.extend(self.class_zero(r, i, ci));
        }
        out.push(Branch { label: "zero".into(), constraints: prefix });
        out
    }

    pub fn to_json(&self) -> Json {
        let spec = &self.spec;
        let rows: Vec<Json> = self
            .rows
            .iter()
            .enumerate()
            .map(|(r, row)| {
                let coeffs: Vec<Json> = spec
                    .eigenvalues
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| !e.value.is_zero())
                    .map(|(ei, e)| {
                        json!({
                            "eigenvalue": e.value,
                            "alpha": (0..e.index).map(|k| row.coeffs.alpha(spec, ei, k)).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                json!({ "row": r, "guard": crate::loop_ir::vec_json(&row.coeffs.guard), "scale": row.coeffs.scale.to_string(), "coefficients": coeffs })
            })
            .collect();
        let pieces: Vec<Json> = self
            .pieces
            .iter()
            .map(|pc| {
                let mut v = json!({ "class": pc.class, "case": pc.shape.tag() });
                match &pc.shape {
                    CaseShape::CaseIII { rho, t, complex, lattice, torus } => {
                        v["rho"] = json!(spec.eigenvalues[*rho].value);
                        v["rho_index"] = json!(t);
                        v["complex"] = json!(complex.iter().map(|&e| &spec.eigenvalues[e].value).collect::<Vec<_>>());
                        v["lattice"] = lattice.to_json();
                        v["torus"] = torus.to_json();
                    }
                    CaseShape::CaseI { rho, lambda } => {
                        v["rho"] = json!(spec.eigenvalues[*rho].value);
                        v["lambda"] = json!(spec.eigenvalues[*lambda].value);
                    }
                    CaseShape::Unsupported(why) => v["reason"] = json!(why),
                    CaseShape::CaseII => {}
                }
                v
            })
            .collect();
        json!({
            "dim": self.dim(),
            "l": self.l,
            "supported": self.is_supported(),
            "support_reason": match &self.support { Support::Unsupported(w) => json!(w), Support::Supported => Json::Null },
            "recovery": self.certificates.iter().map(|c| json!({"kind": c.kind, "recovery": c.recovery.describe()})).collect::<Vec<_>>(),
            "pieces": pieces,
            "rows": rows,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loop_ir::parse_loop;

    fn q(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()
    }

    #[test]
    fn decrement_is_empty_increment_is_everything() {
        let dec = build_witness(&parse_loop("vars x; while x >= 0 do x := x - 1").unwrap(), &Default::default());
        for u in [-3, 0, 100] {
            assert_eq!(dec.membership(&q(&[u])), Membership::Out);
        }
        let inc = build_witness(&parse_loop("vars x; while x >= 0 do x := x + 1").unwrap(), &Default::default());
        for u in [-5, 0, 7] {
            assert_eq!(inc.membership(&q(&[u])), Membership::In);
        }
    }

    #[test]
    fn homogeneous_origin() {
        let w = build_witness(&parse_loop("vars x y; while x >= 0 do x := x - y, y := x + y").unwrap(), &Default::default());
        assert_eq!(w.l, 4);
        assert_eq!(w.membership(&q(&[0, 0])), Membership::In);
        assert_eq!(w.membership(&q(&[1, 0])), Membership::Out);
    }

    #[test]
    fn companion_case_three() {
        // eigenvalues 2 and (3 +- i sqrt7)/2, all of modulus 2
        let w = build_witness(
            &parse_loop("vars x y z; while x >= 0 do x := 8*z, y := x - 10*z, z := y + 5*z").unwrap(),
            &Default::default(),
        );
        assert!(w.is_supported());
        let tags: Vec<&str> = w.pieces.iter().map(|p| p.shape.tag()).collect();
        assert!(tags.contains(&"III"));
    }

    #[test]
    fn zero_set_of_jordan_block() {
        let spec = eigendecompose_int(&vec![vec![BigInt::from(1), BigInt::from(-1)], vec![BigInt::from(0), BigInt::from(1)]]);
        let c = coefficient_vectors(&spec, &[BigInt::from(1), BigInt::from(0)]);
        let z = zero_set(&spec);
        assert!(z.contains(&c, &q(&[0, 0])));
        assert!(!z.contains(&c, &q(&[1, 0])));
        assert!(!z.contains(&c, &q(&[0, 1])));
        let zb = coefficient_vectors(&spec, &[BigInt::from(0), BigInt::from(0)]);
        assert!(z.contains(&zb, &q(&[4, 9])));
    }
}
