#![allow(dead_code)]

use llterm_core::loop_ir::parse_program;
use llterm_core::LoopProgram;
use num_bigint::BigInt;
use std::path::PathBuf;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus() -> Vec<(String, LoopProgram)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "loop"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let prog = parse_program(&std::fs::read_to_string(&p).unwrap()).unwrap();
            (name, prog)
        })
        .collect()
}

pub fn load(name: &str) -> LoopProgram {
    parse_program(&std::fs::read_to_string(corpus_dir().join(format!("{name}.loop"))).unwrap()).unwrap()
}

pub fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Direct `A^n` by repeated multiplication.
pub fn mat_pow_naive(a: &[Vec<BigInt>], n: u64) -> Vec<Vec<BigInt>> {
    let d = a.len();
    let mut r: Vec<Vec<BigInt>> = (0..d).map(|i| (0..d).map(|j| BigInt::from((i == j) as i64)).collect()).collect();
    for _ in 0..n {
        r = (0..d).map(|i| (0..d).map(|j| (0..d).map(|k| &r[i][k] * &a[k][j]).sum()).collect()).collect();
    }
    r
}

/// One step of `x -> A x + a` written out by hand.
pub fn step_naive(p: &LoopProgram, x: &[BigInt]) -> Vec<BigInt> {
    (0..p.dim).map(|i| (0..p.dim).map(|j| &p.update[i][j] * &x[j]).sum::<BigInt>() + &p.offset[i]).collect()
}

pub fn guard_holds(p: &LoopProgram, x: &[BigInt]) -> bool {
    p.guard.iter().zip(&p.rhs).all(|(row, c)| row.iter().zip(x).map(|(a, b)| a * b).sum::<BigInt>() >= *c)
}
