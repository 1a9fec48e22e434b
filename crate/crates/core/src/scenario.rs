//! Scenario-file ingestion and report emission. A scenario is a JSON
//! document declaring named derivations, endomorphisms, and gradings plus
//! an ordered task list; each task dispatches one library operation and
//! may carry an expected verdict, turning it into a pass/fail check.

use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;
use thiserror::Error;

use crate::certify;
use crate::derivation::{self, Derivation, EquivalenceStatus, FinitenessStatus,
    NilpotencyStatus};
use crate::endo::{self, PolyEndo, ProbeStatus, COMPOSE_CONVENTION};
use crate::grading::Grading;
use crate::jordan;
use crate::parse::parse_poly;
use crate::poly::{MultiPoly, Scalar, TruncContext};

pub const REPORT_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario: {0}")]
    Io(#[from] std::io::Error),
    #[error("scenario schema violation: {0}")]
    Schema(String),
}

fn schema(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Schema(msg.into())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub nvars: usize,
    pub trunc_cap: usize,
    #[serde(default)]
    pub derivations: BTreeMap<String, String>,
    #[serde(default)]
    pub endos: BTreeMap<String, EndoSpec>,
    #[serde(default)]
    pub gradings: BTreeMap<String, Vec<Vec<i64>>>,
    pub tasks: Vec<TaskSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum EndoSpec {
    /// Exponential of a named or inline derivation; carries its inverse.
    Exp {
        exp: String,
        #[serde(default)]
        t: Option<String>,
        #[serde(default)]
        cap: Option<usize>,
    },
    /// Raw pullback images.
    Images {
        images: Vec<String>,
        #[serde(default)]
        cap: Option<usize>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub op: String,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub args: Value,
    #[serde(default)]
    pub expect: Option<String>,
}

#[derive(Debug, Serialize, Clone)]
pub struct TaskRecord {
    pub name: String,
    pub op: String,
    pub inputs: Value,
    pub verdict: String,
    pub witness: Value,
    pub expect: Option<String>,
    pub expectation_met: Option<bool>,
    pub micros: u64,
}

#[derive(Debug, Serialize, Clone)]
pub struct Report {
    pub version: String,
    pub convention: String,
    pub scenario_digest: String,
    pub tasks: Vec<TaskRecord>,
    pub status: String,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario report v{}", self.version);
        let _ = writeln!(out, "convention: {}", self.convention);
        let _ = writeln!(out, "digest: {}", self.scenario_digest);
        for t in &self.tasks {
            let mark = match t.expectation_met {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "INFO",
            };
            let _ = writeln!(out, "[{mark}] {} ({}) -> {}", t.name, t.op, t.verdict);
        }
        let _ = writeln!(out, "status: {}", self.status);
        out
    }

    pub fn has_failures(&self) -> bool {
        self.status == "FAILURES"
    }
}

struct Env {
    nvars: usize,
    trunc_cap: usize,
    derivations: BTreeMap<String, Derivation>,
    endos: BTreeMap<String, PolyEndo>,
    gradings: BTreeMap<String, Grading>,
}

impl Env {
    fn derivation(&self, spec: &str) -> Result<Derivation, ScenarioError> {
        if spec.trim_start().starts_with('[') {
            derivation::parse_derivation(spec, self.nvars)
                .map_err(|e| schema(format!("derivation {spec:?}: {e}")))
        } else {
            self.derivations
                .get(spec)
                .cloned()
                .ok_or_else(|| schema(format!("unknown derivation {spec:?}")))
        }
    }

    fn poly(&self, spec: &str) -> Result<MultiPoly, ScenarioError> {
        parse_poly(spec, self.nvars).map_err(|e| schema(format!("polynomial {spec:?}: {e}")))
    }

    fn endo(&self, spec: &str) -> Result<PolyEndo, ScenarioError> {
        self.endos
            .get(spec)
            .cloned()
            .ok_or_else(|| schema(format!("unknown endomorphism {spec:?}")))
    }

    fn grading(&self, spec: &str) -> Result<Grading, ScenarioError> {
        self.gradings
            .get(spec)
            .cloned()
            .ok_or_else(|| schema(format!("unknown grading {spec:?}")))
    }
}

fn parse_scalar(text: &str) -> Result<Scalar, ScenarioError> {
    let parts: Vec<&str> = text.split('/').collect();
    let parse_int = |s: &str| {
        s.trim()
            .parse::<num_bigint::BigInt>()
            .map_err(|_| schema(format!("bad rational {text:?}")))
    };
    match parts.as_slice() {
        [a] => Ok(Scalar::from_integer(parse_int(a)?)),
        [a, b] => Ok(Scalar::new(parse_int(a)?, parse_int(b)?)),
        _ => Err(schema(format!("bad rational {text:?}"))),
    }
}

fn str_arg(args: &Value, key: &str) -> Result<String, ScenarioError> {
    args.get(key)
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| schema(format!("missing string argument {key:?}")))
}

fn usize_arg(args: &Value, key: &str, default: Option<usize>) -> Result<usize, ScenarioError> {
    match args.get(key) {
        Some(v) => v
            .as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| schema(format!("argument {key:?} must be a non-negative integer"))),
        None => default.ok_or_else(|| schema(format!("missing argument {key:?}"))),
    }
}

fn build_env(file: &ScenarioFile) -> Result<Env, ScenarioError> {
    if file.trunc_cap < 2 {
        return Err(schema("trunc_cap must be >= 2"));
    }
    if file.tasks.is_empty() {
        return Err(schema("task list must be nonempty"));
    }
    let mut env = Env {
        nvars: file.nvars,
        trunc_cap: file.trunc_cap,
        derivations: BTreeMap::new(),
        endos: BTreeMap::new(),
        gradings: BTreeMap::new(),
    };
    for (name, spec) in &file.derivations {
        let d = derivation::parse_derivation(spec, file.nvars)
            .map_err(|e| schema(format!("derivation {name:?}: {e}")))?;
        env.derivations.insert(name.clone(), d);
    }
    for (name, spec) in &file.gradings {
        let g = Grading::new(spec.clone(), file.nvars)
            .map_err(|e| schema(format!("grading {name:?}: {e}")))?;
        env.gradings.insert(name.clone(), g);
    }
    for (name, spec) in &file.endos {
        let e = match spec {
            EndoSpec::Exp { exp, t, cap } => {
                let d = env.derivation(exp)?;
                let t = match t {
                    Some(s) => parse_scalar(s)?,
                    None => Scalar::one(),
                };
                endo::exp_derivation(&d, &t, cap.map(TruncContext::new))
                    .map_err(|e| schema(format!("endo {name:?}: {e}")))?
            }
            EndoSpec::Images { images, cap } => {
                let imgs = images
                    .iter()
                    .map(|s| env.poly(s))
                    .collect::<Result<Vec<_>, _>>()?;
                if imgs.len() != file.nvars {
                    return Err(schema(format!(
                        "endo {name:?} must have {} images",
                        file.nvars
                    )));
                }
                PolyEndo::from_images(imgs, *cap)
            }
        };
        env.endos.insert(name.clone(), e);
    }
    Ok(env)
}

fn nilpotency_verdict(status: &NilpotencyStatus) -> &'static str {
    match status {
        NilpotencyStatus::ProvedLnd => "PROVED_LND",
        NilpotencyStatus::Refuted => "REFUTED",
        NilpotencyStatus::Inconclusive => "INCONCLUSIVE",
    }
}

fn finiteness_verdict(status: &FinitenessStatus) -> &'static str {
    match status {
        FinitenessStatus::LocallyFiniteOnSeed => "LOCALLY_FINITE_ON_SEED",
        FinitenessStatus::NotLocallyFinite => "NOT_LOCALLY_FINITE",
        FinitenessStatus::Inconclusive => "INCONCLUSIVE",
    }
}

fn run_task(env: &Env, task: &TaskSpec) -> Result<(String, Value), ScenarioError> {
    let args = &task.args;
    let op_err = |e: &dyn std::fmt::Display| schema(format!("op {:?}: {e}", task.op));
    match task.op.as_str() {
        "parse_check" => {
            let p = env.poly(&str_arg(args, "poly")?)?;
            Ok(("OK".into(), json!({ "canonical": p.to_string() })))
        }
        "ord" => {
            let p = env.poly(&str_arg(args, "poly")?)?;
            let v = p
                .ord()
                .map(|o| o.to_string())
                .unwrap_or_else(|| "BOTTOM".into());
            Ok((v, Value::Null))
        }
        "lhc" => {
            let p = env.poly(&str_arg(args, "poly")?)?;
            let l = p.lhc().map_err(|e| op_err(&e))?;
            Ok((l.to_string(), Value::Null))
        }
        "apply" => {
            let d = env.derivation(&str_arg(args, "derivation")?)?;
            let p = env.poly(&str_arg(args, "poly")?)?;
            let out = d.apply(&p, None).map_err(|e| op_err(&e))?;
            Ok((out.to_string(), Value::Null))
        }
        "lie_bracket" => {
            let a = env.derivation(&str_arg(args, "d1")?)?;
            let b = env.derivation(&str_arg(args, "d2")?)?;
            let out = a.lie_bracket(&b).map_err(|e| op_err(&e))?;
            Ok((out.to_string(), Value::Null))
        }
        "is_lnd" => {
            let d = env.derivation(&str_arg(args, "derivation")?)?;
            let bound = usize_arg(args, "bound", Some(16))?;
            let v = derivation::is_lnd(&d, bound);
            Ok((
                nilpotency_verdict(&v.status).into(),
                json!({ "orders": v.orders, "bound": v.bound,
                        "refutation": v.refutation.map(|w| format!("{w:?}")) }),
            ))
        }
        "krylov" => {
            let d = env.derivation(&str_arg(args, "derivation")?)?;
            let seed = env.poly(&str_arg(args, "seed")?)?;
            let bound = usize_arg(args, "bound", Some(12))?;
            let r = derivation::krylov(&d, &seed, bound, None).map_err(|e| op_err(&e))?;
            Ok((
                finiteness_verdict(&r.status).into(),
                json!({ "dims": r.dims, "orders": r.orders }),
            ))
        }
        "equivalent" => {
            let a = env.derivation(&str_arg(args, "d1")?)?;
            let b = env.derivation(&str_arg(args, "d2")?)?;
            let bound = usize_arg(args, "bound", Some(16))?;
            let v = derivation::equivalent(&a, &b, bound).map_err(|e| op_err(&e))?;
            let verdict = match v.status {
                EquivalenceStatus::Equivalent => "EQUIVALENT",
                EquivalenceStatus::NotEquivalent => "NOT_EQUIVALENT",
                EquivalenceStatus::Inconclusive => "INCONCLUSIVE",
            };
            Ok((verdict.into(), json!({ "witness": format!("{:?}", v.witness) })))
        }
        "weight_polytope" => {
            let g = env.grading(&str_arg(args, "grading")?)?;
            let z = env.derivation(&str_arg(args, "derivation")?)?;
            let p = crate::grading::weight_polytope(&g, &z).map_err(|e| op_err(&e))?;
            Ok((
                "OK".into(),
                json!({ "points": p.points, "vertices": p.vertices }),
            ))
        }
        "check_vertex_lnd" => {
            let g = env.grading(&str_arg(args, "grading")?)?;
            let z = env.derivation(&str_arg(args, "derivation")?)?;
            let bound = usize_arg(args, "bound", Some(12))?;
            let r = crate::grading::check_vertex_lnd(&g, &z, bound).map_err(|e| op_err(&e))?;
            let verdict = if r.all_proved { "ALL_PROVED" } else { "FAILURES" };
            let verdicts: Vec<Value> = r
                .verdicts
                .iter()
                .map(|(w, v)| json!({ "vertex": w, "status": nilpotency_verdict(&v.status) }))
                .collect();
            Ok((verdict.into(), json!({ "vertices": verdicts })))
        }
        "jordan_decompose" => {
            let d = env.derivation(&str_arg(args, "derivation")?)?;
            let bound = usize_arg(args, "bound", Some(16))?;
            let pair = jordan::jordan_decompose(&d, bound).map_err(|e| op_err(&e))?;
            Ok((
                "OK".into(),
                json!({ "semisimple": pair.semisimple.to_string(),
                        "nilpotent": pair.nilpotent.to_string(),
                        "dim": pair.subspace.basis.len() }),
            ))
        }
        "semisimple_shift_check" => {
            let delta = env.derivation(&str_arg(args, "delta")?)?;
            let partial = env.derivation(&str_arg(args, "partial")?)?;
            let g = env.grading(&str_arg(args, "grading")?)?;
            let bound = usize_arg(args, "bound", Some(12))?;
            let r = jordan::semisimple_shift_check(&delta, &partial, &g, bound)
                .map_err(|e| op_err(&e))?;
            let verdict = if r.all_stabilized {
                "LOCALLY_FINITE_ON_SEED"
            } else {
                "INCONCLUSIVE"
            };
            let dims: Vec<&Vec<usize>> = r.per_generator.iter().map(|x| &x.dims).collect();
            Ok((verdict.into(), json!({ "dims": dims })))
        }
        "group_commutator" => {
            let a = env.endo(&str_arg(args, "a")?)?;
            let b = env.endo(&str_arg(args, "b")?)?;
            let c = endo::group_commutator(&a, &b).map_err(|e| op_err(&e))?;
            let verdict = if c.is_identity() { "IDENTITY" } else { "NONIDENTITY" };
            Ok((verdict.into(), json!({ "pullback": c.to_string() })))
        }
        "h_operator" => {
            let g = env.endo(&str_arg(args, "endo")?)?;
            let p = env.poly(&str_arg(args, "poly")?)?;
            let out = endo::h_operator(&g, &p).map_err(|e| op_err(&e))?;
            Ok((out.to_string(), Value::Null))
        }
        "algebraicity_probe" => {
            let g = env.endo(&str_arg(args, "endo")?)?;
            let seed = env.poly(&str_arg(args, "seed")?)?;
            let budget = usize_arg(args, "budget", Some(5))?;
            let cap = usize_arg(args, "cap", Some(env.trunc_cap))?;
            let r = endo::algebraicity_probe(&g, &seed, budget, TruncContext::new(cap))
                .map_err(|e| op_err(&e))?;
            let verdict = match r.status {
                ProbeStatus::AlgebraicBehavior => "ALGEBRAIC_BEHAVIOR",
                ProbeStatus::NonAlgebraic => "NON_ALGEBRAIC",
                ProbeStatus::Inconclusive => "INCONCLUSIVE",
            };
            Ok((
                verdict.into(),
                json!({ "lhc_degrees": r.lhc_degrees, "dims": r.dims }),
            ))
        }
        "build_model_pair" => {
            let d = usize_arg(args, "d", None)?;
            let m = certify::build_model_pair(d).map_err(|e| op_err(&e))?;
            Ok((
                "OK".into(),
                json!({ "del": m.del.to_string(), "f1": m.f1.to_string(),
                        "f2": m.f2.to_string() }),
            ))
        }
        "kernel_lift" => {
            let d = env.derivation(&str_arg(args, "derivation")?)?;
            let g0 = env.poly(&str_arg(args, "g0")?)?;
            let cap = usize_arg(args, "cap", Some(env.trunc_cap))?;
            let lift = certify::kernel_lift(&d, &g0, cap).map_err(|e| op_err(&e))?;
            let residue = d
                .apply(&lift, Some(TruncContext::new(cap)))
                .map_err(|e| op_err(&e))?;
            let verdict = if residue.is_zero() { "VERIFIED" } else { "FAILED" };
            Ok((verdict.into(), json!({ "lift": lift.to_string() })))
        }
        "certify_not_locally_finite" => {
            let d = env.derivation(&str_arg(args, "derivation")?)?;
            let seed = env.poly(&str_arg(args, "seed")?)?;
            let budget = usize_arg(args, "budget", Some(6))?;
            let r = certify::certify_not_locally_finite(&d, &seed, budget)
                .map_err(|e| op_err(&e))?;
            let verdict = if r.verified { "VERIFIED" } else { "FAILED" };
            let ords: Vec<Value> = r
                .rungs
                .iter()
                .map(|rung| json!({ "k": rung.k, "ord": rung.ord, "lhc_ok": rung.lhc_ok }))
                .collect();
            Ok((verdict.into(), json!({ "rungs": ords, "step": r.step })))
        }
        "certify_non_algebraic" => {
            let d = usize_arg(args, "d", None)?;
            let budget = usize_arg(args, "budget", Some(5))?;
            let cap = usize_arg(args, "cap", Some(env.trunc_cap))?;
            let r = certify::certify_non_algebraic(d, budget, cap).map_err(|e| op_err(&e))?;
            let verdict = if r.verified { "VERIFIED" } else { "FAILED" };
            Ok((
                verdict.into(),
                json!({ "lhc_degrees": r.probe.lhc_degrees, "dims": r.probe.dims }),
            ))
        }
        other => Err(schema(format!("unknown op {other:?}"))),
    }
}

/// Execute a parsed scenario. Task records are emitted in declared order;
/// `with_timings` substitutes measured task durations for the default
/// deterministic zero.
pub fn run_scenario_str(content: &str, with_timings: bool) -> Result<Report, ScenarioError> {
    let file: ScenarioFile =
        serde_json::from_str(content).map_err(|e| schema(e.to_string()))?;
    let env = build_env(&file)?;
    let digest = {
        let mut h = Sha256::new();
        h.update(content.as_bytes());
        format!("{:x}", h.finalize())
    };
    let mut tasks = Vec::new();
    let mut any_failure = false;
    let mut all_checked = true;
    for (idx, t) in file.tasks.iter().enumerate() {
        let started = Instant::now();
        let outcome = run_task(&env, t);
        let micros = if with_timings {
            started.elapsed().as_micros() as u64
        } else {
            0
        };
        let (verdict, witness) = match outcome {
            Ok(v) => v,
            Err(e) => (format!("ERROR: {e}"), Value::Null),
        };
        let expectation_met = t.expect.as_ref().map(|e| *e == verdict);
        match expectation_met {
            Some(false) => any_failure = true,
            Some(true) => {}
            None => all_checked = false,
        }
        if verdict.starts_with("ERROR:") && t.expect.is_none() {
            any_failure = true;
        }
        tasks.push(TaskRecord {
            name: t
                .name
                .clone()
                .unwrap_or_else(|| format!("task{}:{}", idx + 1, t.op)),
            op: t.op.clone(),
            inputs: t.args.clone(),
            verdict,
            witness,
            expect: t.expect.clone(),
            expectation_met,
            micros,
        });
    }
    let status = if any_failure {
        "FAILURES"
    } else if all_checked {
        "ALL_VERIFIED"
    } else {
        "PARTIAL"
    };
    Ok(Report {
        version: REPORT_VERSION.into(),
        convention: COMPOSE_CONVENTION.into(),
        scenario_digest: digest,
        tasks,
        status: status.into(),
    })
}

/// Load and execute a scenario file.
pub fn run_scenario(path: &std::path::Path, with_timings: bool) -> Result<Report, ScenarioError> {
    let content = std::fs::read_to_string(path)?;
    run_scenario_str(&content, with_timings)
}
