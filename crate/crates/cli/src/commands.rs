use crate::config::{Config, Format};
use crate::{AnalyzeArgs, CorpusArgs, OptMatrixInput, RelationsArgs, SimFormat, SimulateArgs};
use llterm_core::algebra::algebraic::AlgebraicNumber;
use llterm_core::algebra::lattice::IntMatrix;
use llterm_core::algebra::poly::IntPoly;
use llterm_core::decision::{analyze_witness, certify_point, CertifyConfig, CertifyOutcome, Verdict};
use llterm_core::loop_ir::{parse_program, vec_json};
use llterm_core::relations::{masser_bound, relation_lattice_with_budget, torus_group};
use llterm_core::simulator::{box_points, run, run_with, Outcome, RunOptions, Trace};
use llterm_core::spectral::eigendecompose_int;
use llterm_core::witness::{build_witness, classify_class, CaseShape};
use llterm_core::LoopProgram;
use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::io::Write;
use std::path::Path;
use std::time::Instant;

type CmdResult = Result<u8, String>;

// a closed pipe (e.g. `| head`) is not an error worth a panic
macro_rules! out {
    ($($t:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

fn parse_ints(s: &str) -> Result<Vec<BigInt>, String> {
    s.split(',').map(|t| t.trim().parse::<BigInt>().map_err(|_| format!("not an integer: {t:?}"))).collect()
}

fn parse_box(s: &str) -> Result<Vec<(i64, i64)>, String> {
    s.split(',')
        .map(|r| {
            let (lo, hi) = r.split_once(':').ok_or_else(|| format!("range must be lo:hi, got {r:?}"))?;
            let lo: i64 = lo.trim().parse().map_err(|_| format!("bad bound {lo:?}"))?;
            let hi: i64 = hi.trim().parse().map_err(|_| format!("bad bound {hi:?}"))?;
            if lo > hi {
                return Err(format!("empty range {r:?}"));
            }
            Ok((lo, hi))
        })
        .collect()
}

fn parse_matrix(s: &str) -> Result<IntMatrix, String> {
    let m: IntMatrix = s.split(';').map(parse_ints).collect::<Result<_, _>>()?;
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(format!("matrix must be square, got {n} rows of lengths {:?}", m.iter().map(|r| r.len()).collect::<Vec<_>>()));
    }
    Ok(m)
}

fn load(path: &Path) -> Result<LoopProgram, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_program(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn matrix_input(input: &OptMatrixInput) -> Result<IntMatrix, String> {
    match (&input.file, &input.matrix) {
        (Some(f), None) => Ok(load(f)?.update),
        (None, Some(m)) => parse_matrix(m),
        _ => Err("give either a loop file or --matrix".into()),
    }
}

fn print_json(v: &Value) {
    out!("{}", serde_json::to_string_pretty(v).unwrap());
}

pub fn analyze(cfg: &Config, args: AnalyzeArgs) -> CmdResult {
    let mut cfg = cfg.clone();
    if let Some(r) = args.radius_schedule {
        cfg.radius_schedule = r;
    }
    if args.m_max.is_some() {
        cfg.m_max = args.m_max;
    }
    if let Some(f) = args.format {
        cfg.format = f;
    }
    cfg.validate()?;
    let p = load(&args.file)?;
    let acfg = cfg.analyze_config();
    let t = Instant::now();
    let w = build_witness(&p, &acfg.witness);
    let a = analyze_witness(&w, &acfg, t.elapsed().as_secs_f64() * 1e3);
    match cfg.format {
        Format::Json => print_json(&a.to_json()),
        Format::Text => out!("{}", a.to_text().trim_end()),
    }
    Ok(if a.verdict.is_decided() { 0 } else { 2 })
}

fn outcome_fields(o: &Outcome) -> (&'static str, String, String) {
    match o {
        Outcome::Exited { step, row } => ("exited", step.to_string(), row.to_string()),
        Outcome::Survived { budget } => ("survived", budget.to_string(), String::new()),
        Outcome::Cycle { start, period } => ("cycle", start.to_string(), period.to_string()),
    }
}

fn outcome_text(t: &Trace) -> String {
    let state: Vec<String> = t.final_state.iter().map(|x| x.to_string()).collect();
    match t.outcome {
        Outcome::Exited { step, row } => format!("exited at {step} (guard row {row}, state ({}))", state.join(", ")),
        Outcome::Survived { budget } => format!("survived {budget} steps (state ({}))", state.join(", ")),
        Outcome::Cycle { start, period } => format!("cycle from step {start} with period {period}"),
    }
}

pub fn simulate(args: SimulateArgs) -> CmdResult {
    let p = load(&args.file)?;
    let opts = RunOptions { record: args.trace, detect_cycles: args.detect_cycles };
    let points: Vec<Vec<BigInt>> = match (&args.init, &args.region) {
        (Some(s), None) => vec![parse_ints(s)?],
        (None, Some(b)) => {
            let b = parse_box(b)?;
            if args.trace {
                return Err("--trace needs a single --init state".into());
            }
            box_points(&b).into_iter().map(|v| v.into_iter().map(BigInt::from).collect()).collect()
        }
        _ => return Err("give either --init or --box".into()),
    };
    if let Some(bad) = points.iter().find(|u| u.len() != p.dim) {
        return Err(format!("initial state has {} entries, loop has {} variables", bad.len(), p.dim));
    }
    let traces: Vec<Trace> = points.par_iter().map(|u| run_with(&p, u, args.max_steps, opts)).collect();
    match args.format {
        SimFormat::Json => {
            let v: Vec<Value> = traces.iter().map(|t| t.to_json()).collect();
            if traces.len() == 1 {
                print_json(&v[0]);
            } else {
                print_json(&Value::Array(v));
            }
        }
        SimFormat::Csv => {
            out!("{},outcome,step,detail", p.vars.join(","));
            for t in &traces {
                let init: Vec<String> = t.initial.iter().map(|x| x.to_string()).collect();
                let (kind, a, b) = outcome_fields(&t.outcome);
                out!("{},{kind},{a},{b}", init.join(","));
            }
        }
        SimFormat::Text => {
            if traces.len() == 1 {
                out!("{}", outcome_text(&traces[0]));
                if let Some(states) = &traces[0].states {
                    for (n, s) in states.iter().enumerate() {
                        let s: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                        out!("{n}: ({})", s.join(", "));
                    }
                }
            } else {
                let exited = traces.iter().filter(|t| t.outcome.exited()).count();
                let cycles = traces.iter().filter(|t| matches!(t.outcome, Outcome::Cycle { .. })).count();
                out!("{} points: {exited} exited, {} survived, {cycles} cycles", traces.len(), traces.len() - exited - cycles);
            }
        }
    }
    Ok(0)
}

pub fn spectrum(input: OptMatrixInput) -> CmdResult {
    let a = matrix_input(&input)?;
    print_json(&eigendecompose_int(&a).to_json());
    Ok(0)
}

fn parse_tuple(s: &str) -> Result<Vec<AlgebraicNumber>, String> {
    s.split(';')
        .map(|e| {
            let (coeffs, k) = e.split_once('@').unwrap_or((e, "0"));
            let c = parse_ints(coeffs)?;
            let p = IntPoly::new(c);
            if p.degree() == 0 {
                return Err(format!("polynomial {coeffs:?} has no roots"));
            }
            let k: usize = k.trim().parse().map_err(|_| format!("bad root index {k:?}"))?;
            let roots = AlgebraicNumber::roots_of(&p);
            roots.get(k).cloned().ok_or_else(|| format!("{coeffs:?} has {} distinct roots, index {k} out of range", roots.len()))
        })
        .collect()
}

pub fn relations(cfg: &Config, args: RelationsArgs) -> CmdResult {
    if let Some(t) = &args.tuple {
        let tuple = parse_tuple(t)?;
        let bound = args.bound.unwrap_or_else(|| masser_bound(&tuple, cfg.lattice_c));
        let lat = relation_lattice_with_budget(&tuple, bound, cfg.enumeration_budget);
        let torus = torus_group(&lat);
        print_json(&json!({ "tuple": tuple, "lattice": lat.to_json(), "torus": torus.to_json() }));
        return Ok(0);
    }
    let a = matrix_input(&args.input)?;
    let spec = eigendecompose_int(&a);
    let wcfg = llterm_core::witness::WitnessConfig { lattice_c: cfg.lattice_c, enumeration_budget: cfg.enumeration_budget };
    let classes: Vec<Value> = (0..spec.classes.len())
        .map(|ci| {
            let piece = classify_class(&spec, ci, &wcfg);
            let mut v = json!({ "class": ci, "case": piece.shape.tag() });
            if let CaseShape::CaseIII { rho, complex, lattice, torus, .. } = &piece.shape {
                let r = &spec.eigenvalues[*rho].value;
                let mu: Vec<AlgebraicNumber> = complex.iter().map(|&e| spec.eigenvalues[e].value.div(r).unwrap()).collect();
                v["tuple"] = json!(mu);
                if let Some(b) = args.bound {
                    let lat = relation_lattice_with_budget(&mu, b, cfg.enumeration_budget);
                    v["lattice"] = lat.to_json();
                    v["torus"] = torus_group(&lat).to_json();
                } else {
                    v["lattice"] = lattice.to_json();
                    v["torus"] = torus.to_json();
                }
            }
            v
        })
        .collect();
    print_json(&json!({ "classes": classes }));
    Ok(0)
}

pub fn witness(cfg: &Config, file: &Path) -> CmdResult {
    let p = load(file)?;
    let w = build_witness(&p, &cfg.analyze_config().witness);
    print_json(&w.to_json());
    Ok(0)
}

/// Per-coordinate half-width so that the box has at most `max_points` points.
fn fit_radius(radius: i64, dim: usize, max_points: u64) -> i64 {
    let mut r = radius;
    while r > 0 && ((2 * r + 1) as f64).powi(dim as i32) > max_points as f64 {
        r -= 1;
    }
    r
}

pub fn corpus(cfg: &Config, args: CorpusArgs) -> CmdResult {
    let format = args.format.unwrap_or(cfg.format);
    let mut files: Vec<_> = std::fs::read_dir(&args.dir)
        .map_err(|e| format!("{}: {e}", args.dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "loop"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(format!("{}: no .loop files", args.dir.display()));
    }
    let programs: Vec<(String, LoopProgram)> =
        files.iter().map(|f| Ok((f.file_stem().unwrap().to_string_lossy().into_owned(), load(f)?))).collect::<Result<_, String>>()?;
    let acfg = cfg.analyze_config();
    let ccfg = CertifyConfig { m_max: cfg.m_max, ..CertifyConfig::default() };
    let t0 = Instant::now();
    let mut rows = Vec::new();
    let (mut decided, mut contradictions) = (0usize, 0usize);
    for (name, p) in &programs {
        let t = Instant::now();
        let w = build_witness(p, &acfg.witness);
        let a = analyze_witness(&w, &acfg, 0.0);
        let r = fit_radius(args.radius, p.dim, args.max_points);
        let outcomes: Vec<(Vec<BigInt>, Outcome)> = box_points(&vec![(-r, r); p.dim])
            .into_par_iter()
            .map(|pt| {
                let u: Vec<BigInt> = pt.into_iter().map(BigInt::from).collect();
                let o = run(p, &u, args.budget).outcome;
                (u, o)
            })
            .collect();
        let survivors: Vec<&Vec<BigInt>> = outcomes.iter().filter(|(_, o)| !o.exited()).map(|(u, _)| u).collect();
        let mut problems: Vec<String> = Vec::new();
        let mut unconfirmed = 0usize;
        match &a.verdict {
            Verdict::NonTerminating { witness, .. } => {
                if !certify_point(&w, witness, &ccfg).is_certified() {
                    problems.push("witness does not re-certify".into());
                }
                if run(p, witness, args.budget).outcome.exited() {
                    problems.push("witness exits under simulation".into());
                }
            }
            Verdict::Terminates { .. } => {
                for u in &survivors {
                    match certify_point(&w, u, &ccfg) {
                        CertifyOutcome::Certified(_) => {
                            problems.push(format!("point ({}) never exits", u.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")));
                        }
                        _ => unconfirmed += 1,
                    }
                }
            }
            Verdict::Unknown { .. } => {}
        }
        if a.verdict.is_decided() {
            decided += 1;
        }
        contradictions += problems.len();
        let mut row = json!({
            "name": name,
            "outcome": a.verdict.tag(),
            "box_radius": r,
            "points": outcomes.len(),
            "survivors": survivors.len(),
            "unconfirmed": unconfirmed,
            "contradictions": problems,
            "seconds": t.elapsed().as_secs_f64(),
        });
        if let Verdict::NonTerminating { witness, .. } = &a.verdict {
            row["witness"] = vec_json(witness);
        }
        rows.push(row);
    }
    let report = json!({
        "loops": programs.len(),
        "decided": decided,
        "contradictions": contradictions,
        "budget": args.budget,
        "seconds": t0.elapsed().as_secs_f64(),
        "results": rows,
    });
    match format {
        Format::Json => print_json(&report),
        Format::Text => {
            for r in &rows {
                out!(
                    "{:<24} {:<15} box {:>2} points {:>6} survivors {:>6} contradictions {}",
                    r["name"].as_str().unwrap(),
                    r["outcome"].as_str().unwrap(),
                    r["box_radius"],
                    r["points"],
                    r["survivors"],
                    r["contradictions"].as_array().unwrap().len()
                );
            }
            out!("{} loops, {decided} decided, {contradictions} contradictions", programs.len());
        }
    }
    Ok(if contradictions == 0 { 0 } else { 3 })
}
