//! Worked examples across modules, each checked against an oracle written here.

mod common;

use common::*;
use llterm_core::algebra::algebraic::AlgebraicNumber;
use llterm_core::algebra::poly::IntPoly;
use llterm_core::decision::{analyze, AnalyzeConfig, Verdict};
use llterm_core::loop_ir::{compute_l, depower, homogenize, parse_loop};
use llterm_core::relations::{orbit_approach, relation_lattice, torus_group, tuple_angles};
use llterm_core::simulator::run;
use llterm_core::spectral::{coefficient_vectors, eigendecompose_int};
use llterm_core::witness::{build_witness, Membership, WitnessConfig};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

fn m(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| ints(r)).collect()
}

fn root(coeffs: &[i64], pick: impl Fn(f64, f64) -> bool) -> AlgebraicNumber {
    AlgebraicNumber::roots_of(&IntPoly::from_i64(coeffs)).into_iter().find(|z| {
        let (re, im) = z.to_f64();
        pick(re, im)
    })
    .unwrap()
}

#[test]
fn companion_roots_share_modulus_two() {
    let roots = AlgebraicNumber::roots_of(&IntPoly::from_i64(&[-8, 10, -5, 1]));
    assert_eq!(roots.len(), 3);
    for z in &roots {
        // p(z) = z^3 - 5 z^2 + 10 z - 8
        let p = z.pow(3).sub(&z.pow(2).mul(&AlgebraicNumber::from_int(5))).add(&z.mul(&AlgebraicNumber::from_int(10)));
        assert_eq!(p, AlgebraicNumber::from_int(8));
    }
    let spec = eigendecompose_int(&m(&[&[0, 1, 0], &[0, 0, 1], &[8, -10, 5]]));
    assert_eq!(spec.classes.len(), 1);
    assert_eq!(spec.classes[0].modulus_squared, AlgebraicNumber::from_int(4));
}

#[test]
fn small_algebraic_identities() {
    let r2 = root(&[-2, 0, 1], |re, _| re > 0.0);
    let s = r2.add(&r2);
    assert_eq!(s.min_poly(), &IntPoly::from_i64(&[-8, 0, 1]));
    assert!(s.sign() > 0);
    let i = AlgebraicNumber::i();
    let one = AlgebraicNumber::one();
    assert_eq!(one.add(&i).mul(&one.sub(&i)), AlgebraicNumber::from_int(2));
    let approx = AlgebraicNumber::from_rational(BigRational::new(141421356.into(), 100000000.into()));
    assert_ne!(r2, approx);
    let golden = root(&[-1, -1, 1], |re, _| re > 0.0);
    assert_eq!(golden.root_of_unity_order(), None);
}

#[test]
fn depower_orders() {
    for (a, l, al) in [
        (m(&[&[0, -1], &[1, 0]]), 2, m(&[&[-1, 0], &[0, -1]])),
        (m(&[&[1, -1], &[1, 1]]), 4, m(&[&[-4, 0], &[0, -4]])),
    ] {
        assert_eq!(compute_l(&a), l);
        assert_eq!(mat_pow_naive(&a, l), al);
        let p = llterm_core::LoopProgram::new(m(&[&[1, 0]]), ints(&[0]), a.clone(), ints(&[0, 0])).unwrap();
        let (d, _) = depower(&p, l);
        assert_eq!(d.update, al);
    }
}

#[test]
fn homogenized_decrement_block_form() {
    let p = parse_loop("vars x; while x >= 0 do x := x - 1").unwrap();
    let (h, _) = homogenize(&p);
    assert_eq!(h.update, m(&[&[1, -1], &[0, 1]]));
    assert_eq!(h.guard, m(&[&[1, 0]]));
}

#[test]
fn jordan_expansion_is_u_minus_n_w() {
    let a = m(&[&[1, -1], &[0, 1]]);
    let spec = eigendecompose_int(&a);
    assert_eq!(spec.eigenvalues.len(), 1);
    assert_eq!(spec.eigenvalues[0].index, 2);
    let cd = coefficient_vectors(&spec, &ints(&[1, 0]));
    for (u, w) in [(3i64, 1i64), (-7, 4), (0, -2)] {
        let uq = vec![BigRational::from_integer(u.into()), BigRational::from_integer(w.into())];
        for n in 2..=10u64 {
            let expect = BigRational::from_integer(BigInt::from(u - n as i64 * w) * &cd.scale);
            assert_eq!(cd.evaluate_scaled(&spec, &uq, n), expect);
        }
    }
}

#[test]
fn planted_relations() {
    let mu = root(&[5, -6, 5], |_, im| im > 0.0);
    let lat = relation_lattice(&[mu.clone(), mu.pow(2)], 8);
    assert_eq!(lat.rank(), 1);
    let v = &lat.basis[0];
    // the only relations are multiples of (2, -1)
    assert_eq!(&v[0] * BigInt::from(-1), &v[1] * BigInt::from(2));
    assert!(!v[0].is_zero());
    let i = AlgebraicNumber::i();
    let t = torus_group(&relation_lattice(&[i], 8));
    assert_eq!(t.components(), BigInt::from(4));
    assert_eq!(t.free_rank, 0);
}

#[test]
fn orbit_reaches_minus_one() {
    let mu = root(&[5, -6, 5], |_, im| im > 0.0);
    let n = orbit_approach(&[mu.clone()], &[0.5], 0.05, 1_000_000).expect("dense orbit");
    // oracle: complex power in floating point
    let (re, im) = mu.to_f64();
    let z = num_complex_pow(re, im, n);
    assert!(((z.0 + 1.0).powi(2) + z.1.powi(2)).sqrt() <= 0.05 + 1e-9);
    assert!((tuple_angles(&[mu])[0] - (4f64).atan2(3.0) / std::f64::consts::TAU).abs() < 1e-12);
}

fn num_complex_pow(re: f64, im: f64, n: u64) -> (f64, f64) {
    let r = (re * re + im * im).sqrt().powi(n as i32);
    let t = im.atan2(re) * n as f64;
    (r * t.cos(), r * t.sin())
}

#[test]
fn witness_memberships() {
    let inc = build_witness(&parse_loop("vars x; while x >= 0 do x := x + 1").unwrap(), &WitnessConfig::default());
    assert_eq!(inc.membership_int(&ints(&[-5])), Membership::In);
    let dec = build_witness(&parse_loop("vars x; while x >= 0 do x := x - 1").unwrap(), &WitnessConfig::default());
    assert_eq!(dec.membership_int(&ints(&[100])), Membership::Out);
    assert!(run(&dec.original, &ints(&[100]), 1000).outcome.exited());
}

#[test]
fn half_point_region_has_no_integer() {
    let p = parse_loop("vars x; while 2*x >= 1 and -2*x >= -1 do x := x").unwrap();
    let a = analyze(&p, &AnalyzeConfig::default());
    assert!(matches!(a.verdict, Verdict::Terminates { .. }), "{}", a.to_text());
    for u in -50..=50 {
        assert!(run(&p, &ints(&[u]), 10).outcome.exited());
    }
}

#[test]
fn decrement_terminates_on_range() {
    let p = load("decrement");
    assert!(matches!(analyze(&p, &AnalyzeConfig::default()).verdict, Verdict::Terminates { .. }));
    for u in -50..=50 {
        assert!(run(&p, &ints(&[u]), 200).outcome.exited());
    }
}

#[test]
fn companion_loop_condition() {
    // one class of modulus 2 on the full torus: u is a member iff alpha0.u >= 2 |beta.u|
    let p = load("companion");
    let w = build_witness(&p, &WitnessConfig::default());
    assert!(w.is_supported());
    let spec = eigendecompose_int(&p.update);
    let cd = coefficient_vectors(&spec, &p.guard[0]);
    let real = spec.eigenvalues.iter().position(|e| e.value.is_real()).unwrap();
    let cplx = spec.eigenvalues.iter().position(|e| e.value.to_f64().1 > 0.0).unwrap();
    let alpha: Vec<f64> = cd.alpha(&spec, real, 0).iter().map(|x| x.to_f64().0).collect();
    let beta: Vec<(f64, f64)> = cd.alpha(&spec, cplx, 0).iter().map(|x| x.to_f64()).collect();
    let mut checked = 0;
    for pt in llterm_core::simulator::box_points(&[(-4, 4), (-4, 4), (-4, 4)]) {
        if pt.iter().all(|&x| x == 0) {
            continue;
        }
        let a0: f64 = alpha.iter().zip(&pt).map(|(a, &x)| a * x as f64).sum();
        let (br, bi) = beta.iter().zip(&pt).fold((0.0, 0.0), |(r, i), (b, &x)| (r + b.0 * x as f64, i + b.1 * x as f64));
        let gap = a0 - 2.0 * (br * br + bi * bi).sqrt();
        if gap.abs() < 1e-6 {
            continue;
        }
        let expect = if gap > 0.0 { Membership::In } else { Membership::Out };
        assert_eq!(w.membership_int(&ints(&pt)), expect, "{pt:?}");
        checked += 1;
    }
    assert!(checked > 600);
}
