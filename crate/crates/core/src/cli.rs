//! Command-line front end.
//!
//! [`run`] parses arguments and writes the whole report to a writer, so the
//! binary and the tests share one code path. Output depends only on the
//! arguments: the same flags and seed give byte-identical output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::constructions::materialize::{audit_many, BatchAudit};
use crate::constructions::{
    g1_stage_specs, g2_plan, materialize_flow_path, min_host_size, vertex_ratio_audit, Construction,
    ConstructionError, ConstructionPlan, Objective, VertexRatioAudit,
};
use crate::graph::{parse_pattern, PatternGraph};
use crate::lemmas::{
    enumerated_edge_probability, uniform_edge_probability, EdgeProbability, LemmaError, Params, ProbabilityMode,
};
use crate::optimizer::{
    balance_plan, compare_with_walk, fmt_ratio, numeric_optimize, theorem3_exponent, CompareRow, Grid,
    OptimizerError, TSV_HEADER,
};
use crate::scalar::parse_rational;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    /// 2 input error, 3 infeasible parameters, 4 verification failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl From<OptimizerError> for CliError {
    fn from(e: OptimizerError) -> Self {
        match e {
            OptimizerError::InvalidPattern(m) => CliError::Input(m),
            OptimizerError::Construction(c) => c.into(),
            other => CliError::Infeasible(other.to_string()),
        }
    }
}

impl From<ConstructionError> for CliError {
    fn from(e: ConstructionError) -> Self {
        match e {
            ConstructionError::NoEdges { .. } | ConstructionError::BadPrefix { .. } => CliError::Input(e.to_string()),
            _ => CliError::Infeasible(e.to_string()),
        }
    }
}

impl From<LemmaError> for CliError {
    fn from(e: LemmaError) -> Self {
        CliError::Infeasible(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    G1,
    G2,
    Both,
}

impl Which {
    fn includes(self, c: Construction) -> bool {
        matches!(
            (self, c),
            (Which::Both, _) | (Which::G1, Construction::G1) | (Which::G2, Construction::G2)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Max,
    Sum,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Max => Objective::Max,
            ObjectiveArg::Sum => Objective::Sum,
        }
    }
}

const AFTER_HELP: &str = "\
Pattern files are JSON: {\"k\": 3, \"edges\": [[1,2],[1,3],[2,3]]} with 1-based vertices.

TSV columns of `compare`:
  pattern k m d method x t S U C exponent decimal achieved
  method is walk (r = n^(1-1/k)), walk-balanced (U = C), g1, g2 or best;
  x and t give r = n^x and s = n^(-t); S, U, C are the walk exponents;
  achieved is log_n of the numerically optimized cost when --n is given.
TSV columns of `optimize`:
  pattern construction objective n r rs s lambda cost log_n predicted

Exit codes: 0 success, 2 input error, 3 infeasible parameters, 4 verification failure.";

#[derive(Debug, Parser)]
#[command(name = "subgraph-lg", version, about = "Learning-graph exponents, audits and parameter search for subgraph finding", after_help = AFTER_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "tsv")]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exponents of both constructions and the better of the two.
    Exponent {
        pattern: PathBuf,
    },
    /// Materialize and audit flow paths, then run the Monte Carlo checks.
    Verify {
        pattern: PathBuf,
        /// Host size; defaults to the smallest size with a nonempty flow.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 4)]
        r: usize,
        /// Density, as a fraction or decimal; r·s must be an integer.
        #[arg(long, default_value = "1/2")]
        s: String,
        /// Collision parameter; defaults to ⌊r^(d/(d+1))⌋.
        #[arg(long)]
        lambda: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Paths per construction and samples per Monte Carlo estimate.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, value_enum, default_value = "both")]
        construction: Which,
    },
    /// Compare with the quantum-walk exponent; accepts a directory of patterns.
    Compare {
        pattern: PathBuf,
        /// Also run the numeric optimizer at this n (e.g. 1e6).
        #[arg(long)]
        n: Option<String>,
    },
    /// Numeric parameter search at a concrete n.
    Optimize {
        pattern: PathBuf,
        #[arg(long, default_value = "1e6")]
        n: String,
        #[arg(long, value_enum, default_value = "both")]
        construction: Which,
        #[arg(long, value_enum, default_value = "max")]
        objective: ObjectiveArg,
        /// Grid refinement levels.
        #[arg(long, default_value_t = 4)]
        levels: usize,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Input(e.to_string()))?;
    execute(&cli)
}

pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Exponent { pattern } => cmd_exponent(&load_pattern(pattern)?, cli.format),
        Command::Verify {
            pattern,
            n,
            r,
            s,
            lambda,
            seed,
            samples,
            construction,
        } => {
            let h = load_pattern(pattern)?;
            let cfg = VerifyConfig {
                n: *n,
                r: *r,
                s: s.clone(),
                lambda: *lambda,
                seed: *seed,
                samples: *samples,
                construction: *construction,
            };
            cmd_verify(&h, &cfg, cli.format)
        }
        Command::Compare { pattern, n } => {
            let n = n.as_deref().map(parse_n).transpose()?;
            cmd_compare(pattern, n, cli.format)
        }
        Command::Optimize {
            pattern,
            n,
            construction,
            objective,
            levels,
        } => {
            let h = load_pattern(pattern)?;
            let grid = Grid {
                levels: *levels,
                ..Grid::default()
            };
            cmd_optimize(&h, &stem(pattern), parse_n(n)?, *construction, (*objective).into(), grid, cli.format)
        }
    }
}

fn stem(p: &Path) -> String {
    p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

pub fn load_pattern(path: &Path) -> Result<PatternGraph, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_pattern(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Accepts integers and scientific notation such as `1e6`.
pub fn parse_n(text: &str) -> Result<f64, CliError> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| CliError::Input(format!("cannot parse n = {text:?}")))?;
    if !v.is_finite() || v < 4.0 {
        return Err(CliError::Input(format!("n must be a finite number >= 4 (got {text})")));
    }
    Ok(v)
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct ExponentReport {
    k: usize,
    m: usize,
    d: usize,
    rows: Vec<ExponentRow>,
    t1: String,
    t2: String,
    t: String,
    total: String,
    decimal: f64,
    winner: Construction,
}

#[derive(Serialize)]
struct ExponentRow {
    construction: Construction,
    x: String,
    t: String,
    total: String,
    decimal: f64,
}

pub fn cmd_exponent(h: &PatternGraph, format: Format) -> Result<String, CliError> {
    let th = theorem3_exponent(h)?;
    let mut rows = Vec::new();
    for plan in [g1_stage_specs(h, h.k())?, g2_plan(h)?] {
        let b = balance_plan(&plan)?;
        rows.push(ExponentRow {
            construction: plan.construction,
            x: fmt_ratio(b.solution.x),
            t: fmt_ratio(b.solution.t),
            total: fmt_ratio(b.solution.total),
            decimal: to_f64(b.solution.total),
        });
    }
    let report = ExponentReport {
        k: th.k,
        m: th.m,
        d: th.d,
        rows,
        t1: fmt_ratio(th.t1),
        t2: fmt_ratio(th.t2),
        t: fmt_ratio(th.t),
        total: fmt_ratio(th.total),
        decimal: to_f64(th.total),
        winner: th.winner,
    };
    if format == Format::Json {
        return Ok(json(&report));
    }
    let mut out = String::new();
    let _ = writeln!(out, "t={} total={}≈{:.6}", report.t, report.total, report.decimal);
    let _ = writeln!(out, "k={} m={} d={} t1={} t2={} winner={}", report.k, report.m, report.d, report.t1, report.t2, name(report.winner));
    let _ = writeln!(out, "construction\tx\tt\ttotal\tdecimal");
    for r in &report.rows {
        let _ = writeln!(out, "{}\t{}\t{}\t{}\t{:.6}", name(r.construction), r.x, r.t, r.total, r.decimal);
    }
    Ok(out)
}

fn name(c: Construction) -> &'static str {
    match c {
        Construction::G1 => "g1",
        Construction::G2 => "g2",
    }
}

fn to_f64(r: num_rational::Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub n: Option<usize>,
    pub r: usize,
    pub s: String,
    pub lambda: Option<usize>,
    pub seed: u64,
    pub samples: u64,
    pub construction: Which,
}

#[derive(Serialize)]
struct PlanVerification {
    construction: Construction,
    n: usize,
    lambda: Option<usize>,
    audit: BatchAudit,
    vertex_ratios: Vec<VertexRatioAudit>,
}

#[derive(Serialize)]
struct VerifyReport {
    r: usize,
    rs: usize,
    s: String,
    seed: u64,
    samples: u64,
    witness: Vec<usize>,
    plans: Vec<PlanVerification>,
    plain_probability: EdgeProbability,
    hidden_probability: EdgeProbability,
    failures: Vec<String>,
}

pub fn cmd_verify(h: &PatternGraph, cfg: &VerifyConfig, format: Format) -> Result<String, CliError> {
    theorem3_exponent(h)?;
    if cfg.seed == 0 || cfg.samples == 0 {
        return Err(CliError::Input("seed and samples must be positive".into()));
    }
    let density = parse_rational(&cfg.s).ok_or_else(|| CliError::Input(format!("cannot parse s = {:?}", cfg.s)))?;
    let p = Params::from_density(cfg.r, &density)?;
    let witness: Vec<usize> = (0..h.k()).collect();
    let mut plans: Vec<ConstructionPlan> = Vec::new();
    if cfg.construction.includes(Construction::G1) {
        plans.push(g1_stage_specs(h, h.k())?);
    }
    if cfg.construction.includes(Construction::G2) {
        plans.push(g2_plan(h)?);
    }
    let mut failures = Vec::new();
    let mut verified = Vec::new();
    for (idx, plan) in plans.iter().enumerate() {
        let need = min_host_size(plan, p);
        let n = cfg.n.unwrap_or(need);
        if n < need {
            return Err(CliError::Infeasible(format!(
                "n must be >= u(r-1) + k = {need} for the {} construction (got n = {n})",
                name(plan.construction)
            )));
        }
        let seed = cfg.seed.wrapping_add(idx as u64 * 1_000_003);
        let audit = audit_many(plan, h, n, p, &witness, cfg.lambda, seed, cfg.samples);
        if audit.failed_paths > 0 {
            failures.push(format!(
                "{}: {} of {} paths failed ({})",
                name(plan.construction),
                audit.failed_paths,
                audit.paths,
                audit.first_failures.join("; ")
            ));
        }
        let mut rng = crate::rng::stream(seed, u64::MAX);
        let path = materialize_flow_path(plan, n, p, &witness, cfg.lambda, &mut rng)?;
        let vertex_ratios = if plan.construction == Construction::G1 {
            vertex_ratio_audit(plan, &path, cfg.samples, seed)
        } else {
            Vec::new()
        };
        for v in vertex_ratios.iter().filter(|v| !v.holds) {
            failures.push(format!(
                "vertex ratio at stage {}: estimate {:.6} ± {:.6} vs leading order {:.6} (z = {:.2})",
                v.stage, v.estimate.mean, v.estimate.std_error, v.leading, v.z_leading
            ));
        }
        verified.push(PlanVerification {
            construction: plan.construction,
            n,
            lambda: path.lambda,
            audit,
            vertex_ratios,
        });
    }
    let mut plain = uniform_edge_probability(p, ProbabilityMode::Plain, cfg.samples, cfg.seed);
    if p.r <= 4 {
        let exact = enumerated_edge_probability(p, ProbabilityMode::Plain);
        plain.holds = exact == p.s();
        plain.exact = Some(exact.to_string());
    }
    if !plain.holds {
        failures.push(format!("plain edge probability {:?} differs from s = {}", plain.exact, p.s()));
    }
    let hidden = uniform_edge_probability(p, ProbabilityMode::Hidden, cfg.samples, cfg.seed);
    if !hidden.holds {
        failures.push(format!("hidden edge probability below s/4 = {}", hidden.bound));
    }
    let report = VerifyReport {
        r: p.r,
        rs: p.rs,
        s: p.s().to_string(),
        seed: cfg.seed,
        samples: cfg.samples,
        witness: witness.iter().map(|v| v + 1).collect(),
        plans: verified,
        plain_probability: plain,
        hidden_probability: hidden,
        failures: failures.clone(),
    };
    let text = if format == Format::Json {
        json(&report)
    } else {
        verify_text(&report)
    };
    if failures.is_empty() {
        Ok(text)
    } else {
        Err(CliError::Verification(format!("{text}{}", failures.join("\n"))))
    }
}

fn verify_text(rep: &VerifyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "check\tconstruction\tdetail\tresult");
    for pv in &rep.plans {
        let c = name(pv.construction);
        let a = &pv.audit;
        let _ = writeln!(
            out,
            "paths\t{c}\tn={} r={} rs={} lambda={} paths={} degree_checks={} length_checks={}\t{}",
            pv.n,
            rep.r,
            rep.rs,
            pv.lambda.map_or_else(|| "-".into(), |l| l.to_string()),
            a.paths,
            a.degree_checks,
            a.length_checks,
            pass(a.failed_paths == 0)
        );
        for v in &pv.vertex_ratios {
            let _ = writeln!(
                out,
                "vertex_ratio\t{c}\tstage={} estimate={:.6} se={:.6} leading={:.6} exact={:.6} z={:.2}\t{}",
                v.stage, v.estimate.mean, v.estimate.std_error, v.leading, v.exact, v.z_leading, pass(v.holds)
            );
        }
    }
    let pl = &rep.plain_probability;
    let _ = writeln!(
        out,
        "plain_probability\t-\texact={} s={}\t{}",
        pl.exact.as_deref().unwrap_or("-"),
        rep.s,
        pass(pl.holds)
    );
    let hd = &rep.hidden_probability;
    if let Some(est) = &hd.estimate {
        let _ = writeln!(
            out,
            "hidden_probability\t-\testimate={:.6} se={:.6} bound=s/4={:.6}\t{}",
            est.mean,
            est.std_error,
            hd.bound,
            pass(hd.holds)
        );
    }
    out
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

/// Pattern files to compare: the file itself, or every `.json` file of a
/// directory in name order.
fn pattern_files(path: &Path) -> Result<Vec<PathBuf>, CliError> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Input(format!("{}: no .json pattern files", path.display())));
    }
    Ok(files)
}

pub fn cmd_compare(path: &Path, n: Option<f64>, format: Format) -> Result<String, CliError> {
    let batch = path.is_dir();
    let mut rows: Vec<CompareRow> = Vec::new();
    let mut skipped = Vec::new();
    for file in pattern_files(path)? {
        let loaded = load_pattern(&file).and_then(|h| {
            compare_with_walk(&h, &stem(&file), n, Grid::default()).map_err(CliError::from)
        });
        match loaded {
            Ok(r) => rows.extend(r),
            // a directory may hold patterns outside the supported range
            Err(e @ CliError::Input(_)) if batch => skipped.push(e.to_string()),
            Err(e) => return Err(e),
        }
    }
    if format == Format::Json {
        #[derive(Serialize)]
        struct Out<'a> {
            rows: &'a [CompareRow],
            skipped: &'a [String],
        }
        return Ok(json(&Out {
            rows: &rows,
            skipped: &skipped,
        }));
    }
    let mut out = String::new();
    let _ = writeln!(out, "{TSV_HEADER}");
    for r in &rows {
        let _ = writeln!(out, "{}", r.to_tsv());
    }
    for s in &skipped {
        let _ = writeln!(out, "# skipped: {s}");
    }
    Ok(out)
}

#[derive(Serialize)]
struct OptimizeRow {
    pattern: String,
    construction: Construction,
    objective: Objective,
    n: f64,
    r: usize,
    rs: usize,
    s: f64,
    lambda: Option<f64>,
    cost: f64,
    log_n: f64,
    predicted: String,
    predicted_decimal: f64,
}

pub fn cmd_optimize(
    h: &PatternGraph,
    pattern: &str,
    n: f64,
    which: Which,
    objective: Objective,
    grid: Grid,
    format: Format,
) -> Result<String, CliError> {
    theorem3_exponent(h)?;
    let mut rows = Vec::new();
    for plan in [g1_stage_specs(h, h.k())?, g2_plan(h)?] {
        if !which.includes(plan.construction) {
            continue;
        }
        let predicted = balance_plan(&plan)?.solution.total;
        let opt = numeric_optimize(&plan, n, objective, grid)?;
        rows.push(OptimizeRow {
            pattern: pattern.to_string(),
            construction: plan.construction,
            objective,
            n,
            r: opt.r,
            rs: opt.rs,
            s: opt.s,
            lambda: opt.lambda,
            cost: opt.cost,
            log_n: opt.log_n,
            predicted: fmt_ratio(predicted),
            predicted_decimal: to_f64(predicted),
        });
    }
    if format == Format::Json {
        return Ok(json(&rows));
    }
    let mut out = String::from("pattern\tconstruction\tobjective\tn\tr\trs\ts\tlambda\tcost\tlog_n\tpredicted\n");
    for r in &rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{}\t{:.6e}\t{:.6}\t{}≈{:.6}",
            r.pattern,
            name(r.construction),
            match r.objective {
                Objective::Max => "max",
                Objective::Sum => "sum",
            },
            r.n,
            r.r,
            r.rs,
            r.s,
            r.lambda.map_or_else(|| "-".into(), |l| format!("{l}")),
            r.cost,
            r.log_n,
            r.predicted,
            r.predicted_decimal
        );
    }
    Ok(out)
}
