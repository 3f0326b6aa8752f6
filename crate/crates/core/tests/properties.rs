mod common;

use common::*;
use llterm_core::algebra::algebraic::AlgebraicNumber;
use llterm_core::algebra::poly::IntPoly;
use llterm_core::decision::{analyze, certify_point, AnalyzeConfig, CertifyConfig, CertifyOutcome, Verdict};
use llterm_core::loop_ir::{parse_loop, parse_program};
use llterm_core::simulator::{run, run_with, Outcome, RunOptions};
use llterm_core::spectral::{coefficient_vectors, eigendecompose_int};
use llterm_core::witness::{build_witness, WitnessConfig};
use llterm_core::LoopProgram;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

/// `k0*v0 + k1*v1 + ... + k` written with explicit signs.
fn linear(coeffs: &[i64], vars: &[String], k: Option<i64>) -> String {
    let mut s = String::new();
    let terms = coeffs.iter().zip(vars).map(|(c, v)| (*c, format!("*{v}"))).chain(k.map(|k| (k, String::new())));
    for (i, (c, v)) in terms.enumerate() {
        match (i, c < 0) {
            (0, _) => s += &format!("{c}{v}"),
            (_, true) => s += &format!(" - {}{v}", -c),
            (_, false) => s += &format!(" + {c}{v}"),
        }
    }
    s
}

fn program_text(dim: usize, guard: &[Vec<i64>], rhs: &[i64], a: &[Vec<i64>], off: &[i64]) -> String {
    let vars: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
    let guards: Vec<String> = guard.iter().zip(rhs).map(|(row, c)| format!("{} >= {c}", linear(row, &vars, None))).collect();
    let body: Vec<String> = a.iter().zip(off).zip(&vars).map(|((row, o), v)| format!("{v} := {}", linear(row, &vars, Some(*o)))).collect();
    format!("vars {};\nwhile {} do {}", vars.join(" "), guards.join(" and "), body.join(", "))
}

prop_compose! {
    fn small_program(max_dim: usize)(dim in 1..=max_dim)(
        guard in prop::collection::vec(prop::collection::vec(-3i64..=3, dim), 1..=2),
        rhs in prop::collection::vec(-5i64..=5, 2),
        a in prop::collection::vec(prop::collection::vec(-3i64..=3, dim), dim),
        off in prop::collection::vec(-4i64..=4, dim),
        dim in Just(dim),
    ) -> LoopProgram {
        let rhs = &rhs[..guard.len()];
        parse_loop(&program_text(dim, &guard, rhs, &a, &off)).unwrap()
    }
}

fn q(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

fn quadratic() -> impl Strategy<Value = AlgebraicNumber> {
    (-4i64..=4, -4i64..=4, 0usize..2).prop_map(|(b, c, k)| {
        let roots = AlgebraicNumber::roots_of(&IntPoly::from_i64(&[c, b, 1]));
        roots[k.min(roots.len() - 1)].clone()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn display_round_trip(p in small_program(3)) {
        let back = parse_program(&p.to_string()).unwrap();
        prop_assert_eq!(back.update, p.update);
        prop_assert_eq!(back.guard, p.guard);
        prop_assert_eq!(back.rhs, p.rhs);
        prop_assert_eq!(back.offset, p.offset);
    }

    #[test]
    fn trace_matches_closed_form(p in small_program(3), u in prop::collection::vec(-6i64..=6, 3)) {
        let u = ints(&u[..p.dim]);
        let t = run_with(&p, &u, 20, RunOptions { record: true, detect_cycles: false });
        prop_assert_eq!(&run_with(&p, &u, 20, RunOptions { record: true, detect_cycles: false }), &t);
        let states = t.states.unwrap();
        for (n, s) in states.iter().enumerate() {
            // A^n u + sum_{k<n} A^k a
            let an = mat_pow_naive(&p.update, n as u64);
            let mut x: Vec<BigInt> = (0..p.dim).map(|i| (0..p.dim).map(|j| &an[i][j] * &u[j]).sum()).collect();
            for k in 0..n {
                let ak = mat_pow_naive(&p.update, k as u64);
                for i in 0..p.dim {
                    x[i] += (0..p.dim).map(|j| &ak[i][j] * &p.offset[j]).sum::<BigInt>();
                }
            }
            prop_assert_eq!(s, &x);
        }
        match t.outcome {
            Outcome::Exited { step, .. } => {
                prop_assert_eq!(step as usize + 1, states.len());
                prop_assert!(!guard_holds(&p, states.last().unwrap()));
            }
            _ => prop_assert!(states.iter().all(|s| guard_holds(&p, s))),
        }
    }

    #[test]
    fn expansion_is_exact(a in prop::collection::vec(prop::collection::vec(-3i64..=3, 2), 2),
                          b in prop::collection::vec(-3i64..=3, 2),
                          u in prop::collection::vec(-9i64..=9, 2)) {
        let a: Vec<Vec<BigInt>> = a.iter().map(|r| ints(r)).collect();
        let (b, u) = (ints(&b), ints(&u));
        let spec = eigendecompose_int(&a);
        let cd = coefficient_vectors(&spec, &b);
        for n in 2..12u64 {
            let an = mat_pow_naive(&a, n);
            let direct: BigInt = (0..2).map(|j| &b[j] * (0..2).map(|k| &an[j][k] * &u[k]).sum::<BigInt>()).sum();
            prop_assert_eq!(cd.evaluate_scaled(&spec, &q(&u), n), BigRational::from_integer(direct * &cd.scale));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn quadratic_field_axioms(a in quadratic(), b in quadratic(), c in quadratic()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        if let Some(i) = a.inv() {
            prop_assert_eq!(a.mul(&i), AlgebraicNumber::one());
        }
        let (re, im) = a.add(&b).to_f64();
        let ((ar, ai), (br, bi)) = (a.to_f64(), b.to_f64());
        prop_assert!((re - ar - br).abs() < 1e-9 && (im - ai - bi).abs() < 1e-9);
    }

    /// One-variable affine loops: certificates agree with simulation and
    /// verdicts agree with certificates.
    #[test]
    fn affine_line_loops(g in prop::sample::select(vec![-2i64, -1, 1, 2]), c in -4i64..=4,
                         a in -3i64..=3, off in -3i64..=3, u in -12i64..=12) {
        let p = parse_loop(&program_text(1, &[vec![g]], &[c], &[vec![a]], &[off])).unwrap();
        let w = build_witness(&p, &WitnessConfig::default());
        let cfg = CertifyConfig::default();
        let u = ints(&[u]);
        match certify_point(&w, &u, &cfg) {
            CertifyOutcome::Certified(cert) => {
                let x = (0..cert.m).fold(u.clone(), |x, _| step_naive(&p, &x));
                prop_assert_eq!(&x, &cert.nt_point);
                prop_assert!(!run(&p, &cert.nt_point, 3000).outcome.exited());
            }
            CertifyOutcome::Refuted(r) => {
                prop_assert!(run(&p, &u, r.n + 1).outcome.exited());
            }
            CertifyOutcome::Inconclusive(why) => prop_assert!(false, "inconclusive on a line loop: {}", why),
        }
        let verdict = analyze(&p, &AnalyzeConfig::default()).verdict;
        match verdict {
            Verdict::NonTerminating { witness, certificate } => {
                // the witness is eventually non-terminating; the state at step m never exits
                let x = (0..certificate.m).fold(witness, |x, _| step_naive(&p, &x));
                prop_assert_eq!(&x, &certificate.nt_point);
                prop_assert!(!run(&p, &certificate.nt_point, 3000).outcome.exited());
            }
            Verdict::Terminates { .. } => {
                for x in -12i64..=12 {
                    prop_assert!(!certify_point(&w, &ints(&[x]), &cfg).is_certified());
                }
            }
            Verdict::Unknown { reason, detail } => prop_assert!(false, "{:?}: {}", reason, detail),
        }
    }
}
