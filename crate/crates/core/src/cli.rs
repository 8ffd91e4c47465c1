//! Configuration loading, command dispatch and JSON reports.

use crate::appendix::appendix_test_vector_search;
use crate::cuspidal::build_datum;
use crate::error::{Error, Result};
use crate::orbital::{orbital_xi, orbital_zero, OrbitalSetup};
use crate::padic::Ctx;
use crate::phase::{MultChar, Phase};
use crate::quad::{Kind, QuadAlgebra};
use crate::quaternion::Side;
use crate::registry::{polarizations, Named, Registry};
use crate::suite::{criteria, torus_char, CriterionOutcome};
use crate::waldspurger::{align_torus, conductor_rs, torus_sum, existence, geometric_existence, period_routes, tunnell_epsilon, PeriodProblem};
use num_rational::Rational64;
use serde::Deserialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextSpec {
    pub p: Option<i64>,
    pub precision: Option<u32>,
}

/// A quadratic algebra: `kind` with `D = unit·p` when ramified.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub kind: String,
    #[serde(default = "one")]
    pub unit: i64,
}

/// A character by conductor, leading coefficient and value at the uniformizer.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharSpec {
    pub conductor: i32,
    #[serde(default = "one")]
    pub alpha: i64,
    #[serde(default)]
    pub tame: i64,
    #[serde(default)]
    pub unif: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub command: Option<String>,
    pub side: Option<String>,
    pub polarization: Option<String>,
    pub route: Option<String>,
    pub depth: Option<u32>,
    pub sweep: Option<String>,
}

fn one() -> i64 {
    1
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub context: ContextSpec,
    #[serde(rename = "L")]
    pub l: Option<AlgebraSpec>,
    pub theta: Option<CharSpec>,
    #[serde(rename = "E")]
    pub e: Option<AlgebraSpec>,
    pub chi: Option<CharSpec>,
    #[serde(default)]
    pub run: RunSpec,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    pub fn ctx(&self) -> Result<Ctx> {
        Ctx::new(self.context.p.unwrap_or(5), self.context.precision.unwrap_or(16))
    }

    pub fn side(&self) -> Result<Side> {
        match self.run.side.as_deref().unwrap_or("matrix") {
            "matrix" => Ok(Side::Matrix),
            "division" => Ok(Side::Division),
            s => Err(Error::Config(format!("[run] side: expected matrix or division, got {s:?}"))),
        }
    }

    pub fn problem(&self) -> Result<PeriodProblem> {
        let ctx = self.ctx()?;
        let l = algebra(&ctx, self.l.as_ref().ok_or_else(|| missing("L"))?, "L")?;
        if !l.is_field() {
            return Err(Error::Config("[L] kind: L must be a field".into()));
        }
        let th = self.theta.as_ref().ok_or_else(|| missing("theta"))?;
        let theta = theta_char(&l, th)?;
        let pol = polarizations();
        let pol = pol.get(self.run.polarization.as_deref().unwrap_or("default"))?;
        let datum = build_datum(&theta, self.side()?, pol)?;
        let e = algebra(&ctx, self.e.as_ref().ok_or_else(|| missing("E"))?, "E")?;
        let ch = self.chi.as_ref().ok_or_else(|| missing("chi"))?;
        let unif = phase(ch.unif.as_deref(), "chi")?;
        let chi = torus_char(&e, ch.conductor, ch.alpha, unif)?;
        PeriodProblem::new(datum, chi)
    }
}

fn missing(section: &str) -> Error {
    Error::Config(format!("missing section [{section}]"))
}

fn algebra(ctx: &Ctx, s: &AlgebraSpec, section: &str) -> Result<QuadAlgebra> {
    match s.kind.as_str() {
        "inert" => Ok(QuadAlgebra::inert(ctx)),
        "ramified" if s.unit % ctx.p() != 0 => Ok(QuadAlgebra::ramified(ctx, s.unit)),
        "ramified" => Err(Error::Config(format!("[{section}] unit must be prime to p"))),
        "split" => Ok(QuadAlgebra::split(ctx)),
        k => Err(Error::Config(format!("[{section}] kind: expected inert, ramified or split, got {k:?}"))),
    }
}

fn phase(s: Option<&str>, section: &str) -> Result<Phase> {
    match s {
        None => Ok(Phase::zero()),
        Some(s) => s
            .parse::<Rational64>()
            .map(Phase::new)
            .map_err(|_| Error::Config(format!("[{section}] unif: {s:?} is not a rational"))),
    }
}

fn theta_char(l: &QuadAlgebra, s: &CharSpec) -> Result<MultChar> {
    let ctx = l.ctx();
    if s.conductor < 2 {
        return Err(Error::ConductorTooSmall);
    }
    if l.kind() == Kind::Ramified && s.conductor % 2 == 1 {
        return Err(Error::Config(format!("[theta] conductor {} is odd over a ramified L", s.conductor)));
    }
    let v = if l.kind() == Kind::Inert { -s.conductor } else { -(s.conductor / 2) - 1 };
    let alpha = l.elem(ctx.zero(), ctx.pi_pow(v) * ctx.int(s.alpha));
    MultChar::new(*l, Some(alpha), s.tame, phase(s.unif.as_deref(), "theta")?)
}

/// Inclusive integer range `a..b` or a single integer.
pub fn parse_sweep(s: &str) -> Result<(i32, i32)> {
    let bad = || Error::Config(format!("sweep: expected N or A..B, got {s:?}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if a > b {
                return Err(bad());
            }
            Ok((a, b))
        }
        None => s.trim().parse().map(|a| (a, a)).map_err(|_| bad()),
    }
}

/// A report and whether its verification certificates hold.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Value,
    pub verified: bool,
}

fn value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).unwrap_or(Value::Null)
}

pub trait Command: Named + Send + Sync {
    fn run(&self, cfg: &RunConfig, args: &[String]) -> Result<Outcome>;
}

struct ConductorCmd;
struct EpsilonCmd;
struct ExistenceCmd;
struct IntegrateCmd;
struct FindTestVectorCmd;
struct OrbitalCmd;
struct VerifySuiteCmd;

impl Named for ConductorCmd {
    fn name(&self) -> &'static str {
        "conductor"
    }
}

impl Command for ConductorCmd {
    fn run(&self, cfg: &RunConfig, _: &[String]) -> Result<Outcome> {
        let pb = cfg.problem()?;
        let rs = conductor_rs(&pb)?;
        Ok(Outcome {
            report: json!({
                "c_pi": pb.datum().c_pi(),
                "c_pi_chi": pb.chi().conductor_pi(),
                "norm_route": rs.norm_route,
                "case_route": rs.case_route,
                "l": rs.l,
            }),
            verified: rs.norm_route == rs.case_route,
        })
    }
}

impl Named for EpsilonCmd {
    fn name(&self) -> &'static str {
        "epsilon"
    }
}

impl Command for EpsilonCmd {
    fn run(&self, cfg: &RunConfig, _: &[String]) -> Result<Outcome> {
        let pb = cfg.problem()?;
        Ok(Outcome { report: value(&tunnell_epsilon(&pb)?), verified: true })
    }
}

impl Named for ExistenceCmd {
    fn name(&self) -> &'static str {
        "existence"
    }
}

impl Command for ExistenceCmd {
    fn run(&self, cfg: &RunConfig, _: &[String]) -> Result<Outcome> {
        let pb = cfg.problem()?;
        let ex = existence(&pb)?;
        let eps = tunnell_epsilon(&pb).ok().map(|e| e.epsilon);
        let consistent = ex.matrix != ex.division && eps.map_or(true, |e| (e == 1) == ex.matrix);
        Ok(Outcome {
            report: json!({
                "matrix": geometric_existence(&pb, Side::Matrix)?,
                "division": geometric_existence(&pb, Side::Division)?,
                "symbol_side": value(&ex.symbol_side),
                "epsilon": eps,
                "dichotomy": consistent,
            }),
            verified: consistent,
        })
    }
}

impl Named for IntegrateCmd {
    fn name(&self) -> &'static str {
        "integrate"
    }
}

impl Command for IntegrateCmd {
    fn run(&self, cfg: &RunConfig, _: &[String]) -> Result<Outcome> {
        let pb = cfg.problem()?;
        let routes = period_routes();
        let r = routes.get(cfg.run.route.as_deref().unwrap_or("lpair-align"))?.integral(&pb)?;
        let mut verified = r.matches && (!r.is_nonzero() || r.all_phases_zero);
        let mut report = value(&r);
        if let Some(depth) = cfg.run.depth {
            let a = align_torus(&pb)?;
            let d = pb.datum();
            let s = torus_sum(&pb.e(), pb.chi(), depth, |t| d.matrix_coefficient(&a.emb.image(t)))?;
            let agrees = (s.value - r.brute).norm() <= r.tolerance;
            verified &= agrees;
            report["at_depth"] = json!({ "depth": depth, "value": [s.value.re, s.value.im], "cells": s.cells, "agrees": agrees });
        }
        Ok(Outcome { report, verified })
    }
}

impl Named for FindTestVectorCmd {
    fn name(&self) -> &'static str {
        "find-test-vector"
    }
}

impl Command for FindTestVectorCmd {
    fn run(&self, cfg: &RunConfig, _: &[String]) -> Result<Outcome> {
        let pb = cfg.problem()?;
        let s = appendix_test_vector_search(&pb)?;
        let verified = s.all_verified;
        Ok(Outcome { report: value(&s), verified })
    }
}

impl Named for OrbitalCmd {
    fn name(&self) -> &'static str {
        "orbital"
    }
}

impl Command for OrbitalCmd {
    fn run(&self, cfg: &RunConfig, _: &[String]) -> Result<Outcome> {
        let pb = cfg.problem()?;
        let s = OrbitalSetup::new(pb)?;
        let zero = orbital_zero(&s)?;
        let mut rows = Vec::new();
        if let Some(sw) = cfg.run.sweep.as_deref() {
            let (a, b) = parse_sweep(sw)?;
            let ctx = cfg.ctx()?;
            for d in a..=b {
                let xi = ctx.one() + ctx.pi_pow(d);
                match s.point_for(&xi) {
                    Ok(x) => rows.push(value(&orbital_xi(&s, &x)?)),
                    Err(Error::NoSolution) => rows.push(json!({ "d": d, "xi": format!("{xi}"), "skipped": "ξ/j² is not a norm from E" })),
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(Outcome {
            report: json!({ "m": s.m, "volume": crate::report::rational_string(&s.tf.volume()), "zero": value(&zero), "sweep": rows }),
            verified: true,
        })
    }
}

impl Named for VerifySuiteCmd {
    fn name(&self) -> &'static str {
        "verify-suite"
    }
}

impl Command for VerifySuiteCmd {
    fn run(&self, cfg: &RunConfig, args: &[String]) -> Result<Outcome> {
        let which = args.first().map(String::as_str).or(cfg.run.sweep.as_deref()).unwrap_or("acceptance");
        let ids: Vec<u8> = if which == "acceptance" {
            criteria().iter().map(|c| c.id()).collect()
        } else {
            which
                .split(',')
                .map(|t| t.trim().parse::<u8>().map_err(|_| Error::Config(format!("verify-suite: unknown suite {t:?}"))))
                .collect::<Result<_>>()?
        };
        let reg = criteria();
        let mut outcomes: Vec<CriterionOutcome> = Vec::new();
        for id in ids {
            let c = reg.iter().find(|c| c.id() == id).ok_or_else(|| Error::Config(format!("no criterion {id}")))?;
            let o = c.run();
            eprintln!("{}", o.line());
            outcomes.push(o);
        }
        let verified = outcomes.iter().all(|o| o.pass);
        let rows: Vec<Value> = outcomes
            .iter()
            .map(|o| json!({ "id": o.id, "name": o.name, "pass": o.pass, "checked": o.checked, "failures": o.failures, "notes": o.notes }))
            .collect();
        Ok(Outcome { report: json!({ "suite": which, "criteria": rows, "all_pass": verified }), verified })
    }
}

pub fn commands() -> Registry<dyn Command> {
    let mut r: Registry<dyn Command> = Registry::new();
    r.register(Box::new(ConductorCmd))
        .register(Box::new(EpsilonCmd))
        .register(Box::new(ExistenceCmd))
        .register(Box::new(IntegrateCmd))
        .register(Box::new(FindTestVectorCmd))
        .register(Box::new(OrbitalCmd))
        .register(Box::new(VerifySuiteCmd));
    r
}

/// Runs `command` and wraps its report with an echo of the inputs.
pub fn run_command(command: &str, cfg: &RunConfig, args: &[String]) -> Result<Outcome> {
    let reg = commands();
    let cmd = reg.get(command)?;
    let out = cmd.run(cfg, args)?;
    let mut echo = BTreeMap::new();
    echo.insert("command", json!(command));
    if command != "verify-suite" {
        echo.insert("p", json!(cfg.ctx()?.p()));
        echo.insert("precision", json!(cfg.ctx()?.precision()));
        echo.insert("side", json!(cfg.run.side.as_deref().unwrap_or("matrix")));
        echo.insert("polarization", json!(cfg.run.polarization.as_deref().unwrap_or("default")));
    }
    Ok(Outcome { report: json!({ "input": echo, "verified": out.verified, "report": out.report }), verified: out.verified })
}

/// Exit status for an error: 3 when a computation failed to certify, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::DepthUnstable | Error::DepthInsufficient | Error::PrecisionExhausted(_) => 3,
        _ => 2,
    }
}

/// Two-column text rendering of a JSON report.
pub fn pretty(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let w = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<w$}  {v}\n")).collect()
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        _ => out.push((prefix.to_string(), v.to_string())),
    }
}
