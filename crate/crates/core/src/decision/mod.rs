//! Top-level pipeline: reductions, witness set, integer search and verdict.

mod certify;
mod search;

pub use certify::{certify_point, default_m_max, CertifyConfig, CertifyOutcome, Dominance, PointCertificate, Refutation, SequenceBound};
pub use search::{find_integer_point, EmptyReason, Lattice, Leaf, LeafStatus, SearchConfig, SearchOutcome, SearchReport};

use crate::loop_ir::{vec_json, LoopProgram};
use crate::spectral::Support;
use crate::witness::{build_witness, CaseShape, WitnessConfig, WitnessSet};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value as Json};
use std::collections::BTreeMap;
use std::time::Instant;

#[derive(Clone, Debug, Default)]
pub struct AnalyzeConfig {
    pub witness: WitnessConfig,
    pub search: SearchConfig,
    pub certify: CertifyConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnknownReason {
    TorusInconclusive,
    RadiusExhausted,
    UnsupportedFragment,
}

#[derive(Clone, Debug)]
pub enum Evidence {
    /// No branch combination contains an integer point.
    RegionEmpty { leaves: Vec<Leaf> },
}

#[derive(Clone, Debug)]
pub enum Verdict {
    NonTerminating { witness: Vec<BigInt>, certificate: PointCertificate },
    Terminates { evidence: Evidence },
    Unknown { reason: UnknownReason, detail: String },
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::NonTerminating { .. } => "NONTERMINATING",
            Verdict::Terminates { .. } => "TERMINATES",
            Verdict::Unknown { .. } => "UNKNOWN",
        }
    }

    pub fn is_decided(&self) -> bool {
        !matches!(self, Verdict::Unknown { .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeAudit {
    pub class: usize,
    pub rank: usize,
    pub complete: bool,
    pub stable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Audit {
    pub dim: usize,
    pub l: u64,
    pub support: String,
    pub classes: Vec<&'static str>,
    pub lattices: Vec<LatticeAudit>,
    pub radius: u64,
    pub leaves: usize,
    pub leaf_status: BTreeMap<String, usize>,
    pub points_checked: u64,
    pub timings_ms: BTreeMap<&'static str, f64>,
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub verdict: Verdict,
    pub audit: Audit,
}

impl Analysis {
    pub fn to_json(&self) -> Json {
        let mut out = json!({
            "outcome": self.verdict.tag(),
            "audit": serde_json::to_value(&self.audit).unwrap(),
        });
        let o = out.as_object_mut().unwrap();
        match &self.verdict {
            Verdict::NonTerminating { witness, certificate } => {
                o.insert("witness".into(), vec_json(witness));
                o.insert("certificate".into(), certificate.to_json());
            }
            Verdict::Terminates { evidence: Evidence::RegionEmpty { leaves } } => {
                o.insert("evidence".into(), json!({"kind": "region_empty", "leaves": leaves.iter().map(|l| l.to_json()).collect::<Vec<_>>()}));
            }
            Verdict::Unknown { reason, detail } => {
                o.insert("reason".into(), serde_json::to_value(reason).unwrap());
                o.insert("detail".into(), json!(detail));
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("verdict: {}\n", self.verdict.tag());
        match &self.verdict {
            Verdict::NonTerminating { witness, certificate } => {
                let w: Vec<String> = witness.iter().map(|x| x.to_string()).collect();
                let nt: Vec<String> = certificate.nt_point.iter().map(|x| x.to_string()).collect();
                s += &format!("witness: ({})\nguards hold from step {} on (state ({}))\n", w.join(", "), certificate.m, nt.join(", "));
            }
            Verdict::Terminates { evidence: Evidence::RegionEmpty { leaves } } => {
                s += &format!("witness region has no integer point ({} branch combinations)\n", leaves.len());
            }
            Verdict::Unknown { reason, detail } => {
                s += &format!("reason: {}\ndetail: {detail}\n", serde_json::to_value(reason).unwrap().as_str().unwrap());
            }
        }
        let a = &self.audit;
        s += &format!("dim {} L {} support {} radius {} points {}\n", a.dim, a.l, a.support, a.radius, a.points_checked);
        s
    }
}

fn audit_base(w: &WitnessSet) -> Audit {
    let lattices = w
        .pieces
        .iter()
        .filter_map(|p| match &p.shape {
            CaseShape::CaseIII { lattice, .. } if lattice.s > 0 => {
                Some(LatticeAudit { class: p.class, rank: lattice.rank(), complete: lattice.complete, stable: lattice.stable })
            }
            _ => None,
        })
        .collect();
    Audit {
        dim: w.dim(),
        l: w.l,
        support: match &w.support {
            Support::Supported => "supported".into(),
            Support::Unsupported(why) => format!("unsupported: {why}"),
        },
        classes: w.pieces.iter().map(|p| p.shape.tag()).collect(),
        lattices,
        radius: 0,
        leaves: 0,
        leaf_status: BTreeMap::new(),
        points_checked: 0,
        timings_ms: BTreeMap::new(),
    }
}

/// Decide termination of `p` over all integer initial states.
pub fn analyze(p: &LoopProgram, cfg: &AnalyzeConfig) -> Analysis {
    let t0 = Instant::now();
    let w = build_witness(p, &cfg.witness);
    let t1 = Instant::now();
    analyze_witness(&w, cfg, t1.duration_since(t0).as_secs_f64() * 1e3)
}

pub fn analyze_witness(w: &WitnessSet, cfg: &AnalyzeConfig, build_ms: f64) -> Analysis {
    let mut audit = audit_base(w);
    audit.timings_ms.insert("witness", build_ms);
    if let Support::Unsupported(why) = &w.support {
        return Analysis { verdict: Verdict::Unknown { reason: UnknownReason::UnsupportedFragment, detail: why.clone() }, audit };
    }
    let t = Instant::now();
    let rep = find_integer_point(w, &cfg.search, &cfg.certify);
    audit.timings_ms.insert("search", t.elapsed().as_secs_f64() * 1e3);
    audit.radius = rep.radius;
    audit.leaves = rep.leaves.len();
    audit.points_checked = rep.points_checked;
    for l in &rep.leaves {
        let key = match &l.status {
            LeafStatus::Empty(r) => format!("empty:{}", serde_json::to_value(r).unwrap().as_str().unwrap()),
            LeafStatus::Exhausted { .. } => "exhausted".into(),
            LeafStatus::Open => "open".into(),
        };
        *audit.leaf_status.entry(key).or_default() += 1;
    }
    let verdict = match rep.outcome {
        SearchOutcome::Found { point, certificate } => Verdict::NonTerminating { witness: point, certificate },
        SearchOutcome::Empty => Verdict::Terminates { evidence: Evidence::RegionEmpty { leaves: rep.leaves } },
        SearchOutcome::Exhausted { radius, inconclusive: true } => Verdict::Unknown {
            reason: UnknownReason::TorusInconclusive,
            detail: format!("candidate points could not be decided (searched to radius {radius})"),
        },
        SearchOutcome::Exhausted { radius, inconclusive: false } => Verdict::Unknown {
            reason: UnknownReason::RadiusExhausted,
            detail: format!("no integer point up to radius {radius} in the unbounded branches"),
        },
        SearchOutcome::TooManyLeaves => Verdict::Unknown {
            reason: UnknownReason::RadiusExhausted,
            detail: format!("more than {} branch combinations", cfg.search.max_leaves),
        },
    };
    Analysis { verdict, audit }
}
