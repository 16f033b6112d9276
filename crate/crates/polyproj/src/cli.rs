//! Command-line front end.
//!
//! Five subcommands share one report envelope: `project` solves a single
//! projection, `cq` runs the constraint-qualification diagnostics at the
//! anchor, `certify` runs the representation-stability and continuity
//! pipeline, `examples` lists the built-in scenarios, and `report` chains
//! project, cq, and certify into one document.
//!
//! Exit codes: 0 success, 2 invalid input, 3 infeasible set, 4 numerical
//! failure, 5 negative certification.

use crate::numerics::{add_scaled, norm, sub};
use crate::projection::{self, ProjectionResult, ProjectionStatus};
use crate::report::{float, float_vec, index_vec, object, Report};
use crate::representations;
use crate::scenario::{self, Polyhedron, Scenario};
use crate::stability::{self, Alpha, StabilityReport};
use crate::{cq, Error, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::Value;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;
pub const EXIT_NEGATIVE: i32 = 5;

#[derive(Parser, Debug)]
#[command(
    name = "polyproj",
    version,
    about = "Projections onto parametric polyhedra: solve, diagnose, certify"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Project a point onto the scenario's set at one parameter.
    Project(RunConfig),
    /// Diagnose LICQ, MFCQ, and constant-rank behavior at the anchor.
    Cq(RunConfig),
    /// Certify representation stability and continuity moduli.
    Certify(RunConfig),
    /// List the built-in scenarios.
    Examples,
    /// Run project, cq, and certify in one document.
    Report(RunConfig),
}

/// Flags shared by every analysis subcommand. Omitted counts fall back to
/// per-analysis defaults: 7 shells and 64 pairs for moduli fits, 12 shells
/// and 32 samples for distance-decay checks, 16 samples per rank subset.
#[derive(Args, Clone, Debug)]
pub struct RunConfig {
    /// Built-in scenario name or path to a scenario JSON file.
    #[arg(long)]
    pub scenario: String,
    /// Parameter vector, comma-separated; defaults to the scenario anchor.
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// Point to project, comma-separated; defaults to the scenario anchor.
    #[arg(long, allow_hyphen_values = true)]
    pub v: Option<String>,
    /// Outermost sampling radius around the anchor parameter.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Samples (or pairs) per shell.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Number of geometric shells.
    #[arg(long)]
    pub shells: Option<usize>,
    /// Seed for all sampling streams.
    #[arg(long, default_value_t = stability::DEFAULT_SEED)]
    pub seed: u64,
    /// Feasibility tolerance for the projection solver.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses the process arguments, runs the command, and returns the exit
/// code. The binary is a one-liner around this.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

/// Same as [`run`] but with explicit arguments, for tests.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let failed = err.use_stderr();
            let _ = err.print();
            return if failed { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(&cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

/// Maps library errors to process exit codes.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Schema(_) | Error::Expr(_) | Error::InvalidInput(_) | Error::MissingAnchors => {
            EXIT_INPUT
        }
        Error::Infeasible | Error::AnchorInfeasible => EXIT_INFEASIBLE,
        _ => EXIT_NUMERIC,
    }
}

fn dispatch(cmd: &Command) -> Result<i32> {
    match cmd {
        Command::Project(cfg) => {
            let ctx = Ctx::resolve(cfg)?;
            let (results, verdicts, code) = project_section(&ctx)?;
            emit(&cfg.out, &Report::new("project", ctx.config(cfg), results, verdicts))?;
            Ok(code)
        }
        Command::Cq(cfg) => {
            let ctx = Ctx::resolve(cfg)?;
            let (results, verdicts, code) = cq_section(&ctx)?;
            emit(&cfg.out, &Report::new("cq", ctx.config(cfg), results, verdicts))?;
            Ok(code)
        }
        Command::Certify(cfg) => {
            let ctx = Ctx::resolve(cfg)?;
            let (results, verdicts, code) = certify_section(&ctx)?;
            emit(&cfg.out, &Report::new("certify", ctx.config(cfg), results, verdicts))?;
            Ok(code)
        }
        Command::Examples => {
            let (results, verdicts) = examples_section();
            emit(
                &None,
                &Report::new("examples", object(Vec::new()), results, verdicts),
            )?;
            Ok(EXIT_OK)
        }
        Command::Report(cfg) => {
            let ctx = Ctx::resolve(cfg)?;
            let (p_res, p_ver, p_code) = project_section(&ctx)?;
            let (results, verdicts, code) = if p_code == EXIT_OK {
                let (c_res, c_ver, _) = cq_section(&ctx)?;
                let (s_res, s_ver, s_code) = certify_section(&ctx)?;
                (
                    object(vec![("project", p_res), ("cq", c_res), ("certify", s_res)]),
                    object(vec![("project", p_ver), ("cq", c_ver), ("certify", s_ver)]),
                    s_code,
                )
            } else {
                (
                    object(vec![("project", p_res)]),
                    object(vec![("project", p_ver)]),
                    p_code,
                )
            };
            emit(&cfg.out, &Report::new("report", ctx.config(cfg), results, verdicts))?;
            Ok(code)
        }
    }
}

/// Loads a built-in scenario by name, or parses the file at the given path.
pub fn load_scenario(spec: &str) -> Result<Scenario> {
    if let Some(s) = scenario::builtin(spec) {
        return Ok(s);
    }
    let path = Path::new(spec);
    if !path.is_file() {
        return Err(Error::InvalidInput(format!(
            "unknown scenario '{}': not one of {} and not a file",
            spec,
            scenario::builtin_names().join(", ")
        )));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read '{}': {e}", path.display())))?;
    scenario::parse_scenario(&text)
}

fn parse_vector(text: &str, flag: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = text
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("{flag}: '{tok}' is not a number")))
        })
        .collect::<Result<_>>()?;
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "{flag}: entries must be finite"
        )));
    }
    Ok(values)
}

/// Resolved inputs plus the effective per-analysis sampling settings.
struct Ctx {
    scenario: Scenario,
    p: Vec<f64>,
    v: Vec<f64>,
    radius: f64,
    fit_shells: usize,
    fit_pairs: usize,
    liminf_shells: usize,
    liminf_samples: usize,
    cq_samples: usize,
    seed: u64,
    tol: Option<f64>,
}

impl Ctx {
    fn resolve(cfg: &RunConfig) -> Result<Ctx> {
        let scenario = load_scenario(&cfg.scenario)?;
        let p = match &cfg.p {
            Some(text) => parse_vector(text, "--p")?,
            None => match scenario.anchors() {
                Some(a) => a.p.clone(),
                None => return Err(Error::MissingAnchors),
            },
        };
        let v = match &cfg.v {
            Some(text) => parse_vector(text, "--v")?,
            None => match scenario.anchors() {
                Some(a) => a.v.clone(),
                None => return Err(Error::MissingAnchors),
            },
        };
        if let Some(t) = cfg.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidInput("--tol must be positive".into()));
            }
        }
        if let Some(r) = cfg.radius {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::InvalidInput("--radius must be positive".into()));
            }
        }
        Ok(Ctx {
            scenario,
            p,
            v,
            radius: cfg.radius.unwrap_or(stability::DEFAULT_RADIUS),
            fit_shells: cfg.shells.unwrap_or(stability::DEFAULT_SHELLS),
            fit_pairs: cfg.samples.unwrap_or(stability::DEFAULT_PAIRS),
            liminf_shells: cfg.shells.unwrap_or(12),
            liminf_samples: cfg.samples.unwrap_or(32),
            cq_samples: cfg.samples.unwrap_or(16),
            seed: cfg.seed,
            tol: cfg.tol,
        })
    }

    /// Echo of the effective configuration for the report envelope.
    fn config(&self, cfg: &RunConfig) -> Value {
        object(vec![
            ("scenario", Value::String(cfg.scenario.clone())),
            ("p", float_vec(&self.p)),
            ("v", float_vec(&self.v)),
            ("radius", float(self.radius)),
            (
                "samples",
                cfg.samples.map(|s| Value::from(s as u64)).unwrap_or(Value::Null),
            ),
            (
                "shells",
                cfg.shells.map(|s| Value::from(s as u64)).unwrap_or(Value::Null),
            ),
            ("seed", Value::from(self.seed)),
            ("tol", self.tol.map(float).unwrap_or(Value::Null)),
        ])
    }

    fn project_at(&self, poly: &Polyhedron, v: &[f64]) -> Result<ProjectionResult> {
        match self.tol {
            Some(t) => projection::project_with_tol(poly, v, t),
            None => projection::project(poly, v),
        }
    }

    /// Anchor projection shared by the cq and certify sections.
    fn anchor_projection(&self) -> Result<Vec<f64>> {
        let poly = self.scenario.instantiate(&self.p)?;
        let res = self.project_at(&poly, &self.v)?;
        if res.status != ProjectionStatus::Optimal {
            return Err(Error::AnchorInfeasible);
        }
        Ok(res.x)
    }
}

fn emit(out: &Option<PathBuf>, report: &Report) -> Result<()> {
    let text = report.render();
    match out {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| Error::InvalidInput(format!("cannot write '{}': {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Largest stationarity defect `|v - x - sum_i lambda_i g_i|`.
fn stationarity_residual(poly: &Polyhedron, v: &[f64], res: &ProjectionResult) -> f64 {
    let mut r = sub(v, &res.x);
    for i in 0..poly.m() {
        if res.lambda[i] != 0.0 {
            r = add_scaled(&r, -res.lambda[i], poly.row(i));
        }
    }
    norm(&r)
}

/// Largest `|lambda_i * residual_i(x)|` over inequality rows.
fn complementarity_residual(poly: &Polyhedron, res: &ProjectionResult) -> f64 {
    (poly.q()..poly.m())
        .map(|i| (res.lambda[i] * poly.residual(i, &res.x)).abs())
        .fold(0.0, f64::max)
}

fn project_section(ctx: &Ctx) -> Result<(Value, Value, i32)> {
    let poly = ctx.scenario.instantiate(&ctx.p)?;
    let res = ctx.project_at(&poly, &ctx.v)?;
    if res.status == ProjectionStatus::Infeasible {
        let results = object(vec![
            ("status", Value::String("infeasible".into())),
            ("iterations", Value::from(res.iterations as u64)),
        ]);
        let verdicts = object(vec![("projection", Value::String("infeasible".into()))]);
        return Ok((results, verdicts, EXIT_INFEASIBLE));
    }
    let kkt = object(vec![
        (
            "stationarity",
            float(stationarity_residual(&poly, &ctx.v, &res)),
        ),
        ("feasibility", float(poly.max_scaled_violation(&res.x))),
        ("complementarity", float(complementarity_residual(&poly, &res))),
    ]);
    let results = object(vec![
        ("status", Value::String("optimal".into())),
        ("x", float_vec(&res.x)),
        ("lambda", float_vec(&res.lambda)),
        ("active", index_vec(&res.active)),
        ("iterations", Value::from(res.iterations as u64)),
        ("kkt", kkt),
    ]);
    let verdicts = object(vec![("projection", Value::String("optimal".into()))]);
    Ok((results, verdicts, EXIT_OK))
}

fn verdict_word(holds: bool) -> Value {
    Value::String(if holds { "holds" } else { "fails" }.into())
}

fn cq_section(ctx: &Ctx) -> Result<(Value, Value, i32)> {
    let xbar = ctx.anchor_projection()?;
    let rep = cq::full_report(
        &ctx.scenario,
        &ctx.p,
        &xbar,
        ctx.radius,
        ctx.cq_samples,
        cq::DEFAULT_SUBSET_CAP,
        ctx.seed,
    )?;
    let subsets: Vec<Value> = rep
        .rcrcq
        .iter()
        .map(|s| {
            object(vec![
                ("subset", index_vec(&s.subset)),
                ("rank_at_anchor", Value::from(s.rank_at_anchor as u64)),
                ("min_rank_sampled", Value::from(s.min_rank_sampled as u64)),
                ("max_rank_sampled", Value::from(s.max_rank_sampled as u64)),
                ("holds", Value::Bool(s.holds)),
            ])
        })
        .collect();
    let mfcq = object(vec![
        ("holds", Value::Bool(rep.mfcq.holds)),
        ("margin", float(rep.mfcq.margin)),
        (
            "certificate_h",
            rep.mfcq
                .certificate_h
                .as_deref()
                .map(float_vec)
                .unwrap_or(Value::Null),
        ),
    ]);
    let results = object(vec![
        ("x", float_vec(&xbar)),
        ("licq", Value::Bool(rep.licq)),
        ("mfcq", mfcq),
        (
            "rcrcq",
            object(vec![
                ("overall", Value::Bool(rep.overall_rcrcq)),
                ("subsets", Value::Array(subsets)),
            ]),
        ),
    ]);
    let verdicts = object(vec![
        ("licq", verdict_word(rep.licq)),
        ("mfcq", verdict_word(rep.mfcq.holds)),
        ("rcrcq", verdict_word(rep.overall_rcrcq)),
    ]);
    Ok((results, verdicts, EXIT_OK))
}

fn fit_value(rep: &StabilityReport) -> Value {
    let shells: Vec<Value> = rep
        .shells
        .iter()
        .map(|s| {
            object(vec![
                ("radius", float(s.radius)),
                ("fitted_l0", float(s.fitted_l0)),
                ("pairs", Value::from(s.pairs as u64)),
            ])
        })
        .collect();
    object(vec![
        ("alpha", float(rep.alpha)),
        ("kappa0", float(rep.kappa0)),
        ("fitted_l0", float(rep.fitted_l0)),
        ("verdict", Value::String(rep.verdict.clone())),
        ("shells", Value::Array(shells)),
    ])
}

fn certify_section(ctx: &Ctx) -> Result<(Value, Value, i32)> {
    let xbar = ctx.anchor_projection()?;
    let liminf_radii = cq::geometric_radii(ctx.radius, ctx.liminf_shells);

    let choices = match representations::enumerate_kbar(&ctx.scenario, &ctx.p, &ctx.v) {
        Ok(choices) => choices,
        Err(Error::NoRepresentation) => {
            let results = object(vec![
                ("x", float_vec(&xbar)),
                ("representations", Value::Array(Vec::new())),
            ]);
            let verdicts = object(vec![
                ("stable_representation", Value::Bool(false)),
                ("certified", Value::Bool(false)),
                (
                    "reason",
                    Value::String("no multiplier representation at the anchor".into()),
                ),
            ]);
            return Ok((results, verdicts, EXIT_NEGATIVE));
        }
        Err(e) => return Err(e),
    };

    let mut rep_entries = Vec::new();
    let mut stable: Vec<Vec<usize>> = Vec::new();
    for choice in &choices {
        let check = representations::stable_representation_check(
            &ctx.scenario,
            &ctx.p,
            &ctx.v,
            &choice.kbar,
            &liminf_radii,
            ctx.liminf_samples,
            ctx.seed,
        )?;
        if check.stable {
            stable.push(choice.kbar.clone());
        }
        let per_l: Vec<Value> = check
            .per_l
            .iter()
            .map(|pl| {
                object(vec![
                    ("l", index_vec(&pl.l)),
                    ("holds", Value::Bool(pl.check.holds)),
                    ("shell_max_dist", float_vec(&pl.check.shell_max_dist)),
                    (
                        "fitted_rate",
                        pl.check.fitted_rate.map(float).unwrap_or(Value::Null),
                    ),
                ])
            })
            .collect();
        rep_entries.push(object(vec![
            ("kbar", index_vec(&choice.kbar)),
            ("lambda_bar", float_vec(&choice.lambda_bar)),
            ("stable", Value::Bool(check.stable)),
            ("per_l", Value::Array(per_l)),
        ]));
    }

    // The moduli fits do not depend on a representation choice, so they run
    // even when every candidate is unstable.
    let fit_lip = stability::fit_estimate(
        &ctx.scenario,
        &ctx.p,
        &ctx.v,
        Alpha::One,
        ctx.radius,
        0.0,
        ctx.fit_shells,
        ctx.fit_pairs,
        ctx.seed,
    )?;
    let fit_hold = stability::fit_estimate(
        &ctx.scenario,
        &ctx.p,
        &ctx.v,
        Alpha::Half,
        ctx.radius,
        0.0,
        ctx.fit_shells,
        ctx.fit_pairs,
        ctx.seed,
    )?;

    // The transplant argument assumes a stable representation, so it only
    // runs on the candidates that passed the check above.
    let mut transplant_entries = Vec::new();
    let mut transplant_all_pass = true;
    for kbar in &stable {
        let t = stability::gr_transplant_check(
            &ctx.scenario,
            &ctx.p,
            &ctx.v,
            kbar,
            ctx.radius,
            ctx.fit_pairs,
            ctx.seed,
            true,
        )?;
        if t.pass_rate < 1.0 {
            transplant_all_pass = false;
        }
        let failures = t.witnesses.iter().filter(|w| !w.pass).count();
        transplant_entries.push(object(vec![
            ("kbar", index_vec(kbar)),
            ("pass_rate", float(t.pass_rate)),
            ("fitted_l", float(t.fitted_l)),
            ("samples", Value::from(t.witnesses.len() as u64)),
            ("failures", Value::from(failures as u64)),
        ]));
    }
    let transplant_verdict = if stable.is_empty() {
        "skipped: no stable representation".to_string()
    } else if transplant_all_pass {
        "pass".to_string()
    } else {
        "fail".to_string()
    };

    let holder_ok = fit_hold.verdict == "holder-certified";
    let lipschitz_ok = fit_lip.verdict == "lipschitz-certified";
    let certified =
        !stable.is_empty() && transplant_all_pass && (holder_ok || lipschitz_ok);

    let results = object(vec![
        ("x", float_vec(&xbar)),
        ("representations", Value::Array(rep_entries)),
        (
            "stable_kbar",
            Value::Array(stable.iter().map(|k| index_vec(k)).collect()),
        ),
        (
            "fit",
            object(vec![
                ("lipschitz", fit_value(&fit_lip)),
                ("holder", fit_value(&fit_hold)),
            ]),
        ),
        ("transplant", Value::Array(transplant_entries)),
    ]);
    let verdicts = object(vec![
        ("stable_representation", Value::Bool(!stable.is_empty())),
        ("lipschitz", Value::String(fit_lip.verdict.clone())),
        ("holder", Value::String(fit_hold.verdict.clone())),
        ("transplant", Value::String(transplant_verdict)),
        ("certified", Value::Bool(certified)),
    ]);
    let code = if certified { EXIT_OK } else { EXIT_NEGATIVE };
    Ok((results, verdicts, code))
}

fn examples_section() -> (Value, Value) {
    let names = scenario::builtin_names();
    let entries: Vec<Value> = names
        .iter()
        .map(|&name| {
            let s = scenario::builtin(name).expect("listed builtin exists");
            let anchors = s
                .anchors()
                .map(|a| object(vec![("p", float_vec(&a.p)), ("v", float_vec(&a.v))]))
                .unwrap_or(Value::Null);
            object(vec![
                ("name", Value::String(name.into())),
                (
                    "summary",
                    Value::String(scenario::builtin_summary(name).unwrap_or_default().into()),
                ),
                ("n", Value::from(s.n() as u64)),
                ("d", Value::from(s.d() as u64)),
                ("equalities", Value::from(s.q() as u64)),
                ("inequalities", Value::from((s.m() - s.q()) as u64)),
                ("anchors", anchors),
            ])
        })
        .collect();
    let results = object(vec![
        ("count", Value::from(names.len() as u64)),
        ("scenarios", Value::Array(entries)),
    ]);
    (results, object(Vec::new()))
}
