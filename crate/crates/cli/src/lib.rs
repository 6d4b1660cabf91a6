//! Command-line front end for catswarm: single runs, full suites,
//! statistical comparison and report rendering.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use catswarm::compare::{self, Comparison};
use catswarm::cso::{CsoParams, VelocityCap};
use catswarm::harness::{self, Optimizer, Protocol, ResultSet, TracePoint, TrialResult};
use catswarm::stats::{self, WilcoxonResult};
use catswarm::suite;
use catswarm::variants::{AicsoParams, PcsoParams};
use catswarm::Objective;

/// Environment variable holding the default worker count for `suite`.
pub const WORKERS_ENV: &str = "CATSWARM_WORKERS";

#[derive(Debug, Error, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<catswarm::Error> for CliError {
    fn from(e: catswarm::Error) -> Self {
        use catswarm::Error as E;
        match e {
            E::Usage(_) | E::Config(_) | E::UnknownFunction(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "catswarm", version, about = "Cat swarm optimization experiments")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one optimizer once on one function.
    Run(RunArgs),
    /// Run every algorithm on every function for several seeded runs.
    Suite(SuiteArgs),
    /// Mean/std, rank and Wilcoxon tables from a results or means file.
    Compare(CompareArgs),
    /// Gap-to-optimum and convergence summary of a results file.
    Report(ReportArgs),
    /// Print the benchmark registry as CSV.
    Registry,
}

/// Algorithm parameter overrides shared by `run` and `suite`.
#[derive(Debug, Clone, Default, Args)]
pub struct AlgoFlags {
    /// AICSO initial inertia weight.
    #[arg(long)]
    pub w_start: Option<f64>,
    /// AICSO final inertia weight.
    #[arg(long)]
    pub w_end: Option<f64>,
    /// PCSO group count.
    #[arg(long)]
    pub groups: Option<usize>,
    /// PCSO exchange interval in iterations.
    #[arg(long)]
    pub ech: Option<usize>,
    /// Seeking memory pool size.
    #[arg(long)]
    pub smp: Option<usize>,
    /// Seeking range of the selected dimensions.
    #[arg(long)]
    pub srd: Option<f64>,
    /// Fraction of dimensions changed per seeking candidate.
    #[arg(long)]
    pub cdc: Option<f64>,
    /// Whether the current position is a seeking candidate.
    #[arg(long, value_name = "BOOL")]
    pub spc: Option<bool>,
    /// Mixture ratio: fraction of cats in tracing mode.
    #[arg(long)]
    pub mr: Option<f64>,
    /// Tracing acceleration constant.
    #[arg(long)]
    pub c1: Option<f64>,
    /// Velocity cap: an absolute value or `<fraction>*range`.
    #[arg(long, value_name = "CAP")]
    pub vmax: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_name = "ALGO")]
    pub algo: Option<String>,
    #[arg(long, value_name = "ID")]
    pub function: Option<String>,
    /// Dimensionality for the scalable functions F1-F13.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub cats: Option<usize>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the trial as a results file (plus trace sibling).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `key = value` defaults; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub algo_flags: AlgoFlags,
}

#[derive(Debug, Clone, Args)]
pub struct SuiteArgs {
    /// Comma-separated algorithm ids.
    #[arg(long, value_name = "LIST")]
    pub algos: Option<String>,
    /// `all`, a range such as `F1-F7`, or a comma-separated list.
    #[arg(long, value_name = "SELECTION")]
    pub functions: Option<String>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub cats: Option<usize>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to $CATSWARM_WORKERS or the CPU count.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub algo_flags: AlgoFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Md,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Results file, or a means table with header `function,f_min,algorithm,mean,std`.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    /// Algorithm the others are tested against (default: the first one).
    #[arg(long)]
    pub baseline: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Md)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
}

/// What a command printed, and the process exit code.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (program name first) and runs the command. `env` looks up
/// environment variables.
pub fn execute<I, T>(args: I, env: &dyn Fn(&str) -> Option<String>) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match parse_with_config(&args) {
        Ok(cli) => cli,
        Err(Parsed::Clap(e)) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Output { code, stdout: text, stderr: String::new() }
            } else {
                Output { code, stdout: String::new(), stderr: text }
            };
        }
        Err(Parsed::Cli(e)) => return failure(e),
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::Suite(a) => cmd_suite(&a, env),
        Command::Compare(a) => cmd_compare(&a),
        Command::Report(a) => cmd_report(&a),
        Command::Registry => Ok((suite::registry_csv(), String::new())),
    };
    match result {
        Ok((stdout, stderr)) => Output { code: 0, stdout, stderr },
        Err(e) => failure(e),
    }
}

fn failure(e: CliError) -> Output {
    let hint = match &e {
        CliError::Usage(_) => "\nFor more information, try '--help'.\n",
        CliError::Runtime(_) => "\n",
    };
    Output {
        code: e.exit_code(),
        stdout: String::new(),
        stderr: format!("error: {e}{hint}"),
    }
}

enum Parsed {
    Clap(clap::Error),
    Cli(CliError),
}

/// Parses once to find `--config`, then again with the file's settings
/// injected ahead of the user's flags so that the flags win.
fn parse_with_config(args: &[OsString]) -> std::result::Result<Cli, Parsed> {
    let first = Cli::try_parse_from(args).map_err(Parsed::Clap)?;
    let config = match &first.command {
        Command::Run(a) => a.config.clone(),
        Command::Suite(a) => a.config.clone(),
        _ => None,
    };
    let Some(path) = config else {
        return Ok(first);
    };
    let injected = read_config(&path).map_err(Parsed::Cli)?;
    let sub = args
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|i| i + 1)
        .expect("a subcommand was parsed");
    let mut merged: Vec<OsString> = args[..=sub].to_vec();
    merged.extend(injected.into_iter().map(OsString::from));
    merged.extend_from_slice(&args[sub + 1..]);
    Cli::try_parse_from(&merged).map_err(|e| {
        Parsed::Cli(CliError::Usage(format!(
            "in config file {}: {}",
            path.display(),
            e.render().to_string().lines().next().unwrap_or_default().trim_start_matches("error: ")
        )))
    })
}

/// Reads `key = value` lines (blank lines and `#` comments ignored) into
/// flag/value argument pairs.
pub fn read_config(path: &Path) -> CliResult<Vec<String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text, &path.display().to_string())
}

pub fn parse_config(text: &str, origin: &str) -> CliResult<Vec<String>> {
    let mut args = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "{origin}:{}: expected `key = value`, found `{line}`",
                i + 1
            )));
        };
        let key = key.trim().replace('_', "-");
        if key == "config" || key.is_empty() {
            return Err(CliError::Usage(format!("{origin}:{}: key `{key}` not allowed here", i + 1)));
        }
        args.push(format!("--{key}"));
        args.push(value.trim().to_string());
    }
    Ok(args)
}

/// Formats like `3.50000E-14`: six significant digits, signed two-digit
/// exponent.
pub fn sci(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NA".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.5E}");
    let (mantissa, exp) = s.split_once('E').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    let sign = if e < 0 { '-' } else { '+' };
    format!("{mantissa}E{sign}{:02}", e.abs())
}

fn rank_str(r: f64) -> String {
    if r.fract() == 0.0 {
        format!("{r:.0}")
    } else {
        format!("{r}")
    }
}

fn parse_vmax(s: &str) -> CliResult<VelocityCap> {
    let s = s.trim();
    let bad = || CliError::Usage(format!("invalid --vmax `{s}`: expected a number or `<fraction>*range`"));
    if let Some(frac) = s.strip_suffix("*range") {
        frac.trim().parse().map(VelocityCap::RangeFraction).map_err(|_| bad())
    } else {
        s.parse().map(VelocityCap::Absolute).map_err(|_| bad())
    }
}

impl AlgoFlags {
    fn core_set(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.smp.is_some() {
            v.push("--smp");
        }
        if self.srd.is_some() {
            v.push("--srd");
        }
        if self.cdc.is_some() {
            v.push("--cdc");
        }
        if self.spc.is_some() {
            v.push("--spc");
        }
        if self.mr.is_some() {
            v.push("--mr");
        }
        if self.c1.is_some() {
            v.push("--c1");
        }
        if self.vmax.is_some() {
            v.push("--vmax");
        }
        v
    }

    fn aicso_set(&self) -> Vec<&'static str> {
        [("--w-start", self.w_start.is_some()), ("--w-end", self.w_end.is_some())]
            .into_iter()
            .filter_map(|(n, s)| s.then_some(n))
            .collect()
    }

    fn pcso_set(&self) -> Vec<&'static str> {
        [("--groups", self.groups.is_some()), ("--ech", self.ech.is_some())]
            .into_iter()
            .filter_map(|(n, s)| s.then_some(n))
            .collect()
    }

    /// Rejects flags that none of `algos` accepts.
    fn check_applicable(&self, algos: &[String]) -> CliResult<()> {
        let has = |a: &str| algos.iter().any(|x| x == a);
        let reject = |flags: Vec<&str>, needs: &str| -> CliResult<()> {
            match flags.first() {
                Some(f) => Err(CliError::Usage(format!(
                    "{f} only applies to {needs} (algorithms: {})",
                    algos.join(",")
                ))),
                None => Ok(()),
            }
        };
        if !has("aicso") {
            reject(self.aicso_set(), "--algo aicso")?;
        }
        if !has("pcso") {
            reject(self.pcso_set(), "--algo pcso")?;
        }
        if !(has("cso") || has("aicso") || has("pcso")) {
            reject(self.core_set(), "cso, aicso or pcso")?;
        }
        Ok(())
    }

    fn cso_params(&self) -> CsoParams {
        let d = CsoParams::default();
        CsoParams {
            smp: self.smp.unwrap_or(d.smp),
            srd: self.srd.unwrap_or(d.srd),
            cdc: self.cdc.unwrap_or(d.cdc),
            spc: self.spc.unwrap_or(d.spc),
            mr: self.mr.unwrap_or(d.mr),
            c1: self.c1.unwrap_or(d.c1),
            ..d
        }
    }

    /// The configured optimizer for `id`, validated against `n_agents`
    /// cats and `max_iters` iterations.
    pub fn optimizer(&self, id: &str, n_agents: usize, max_iters: usize) -> CliResult<Box<dyn Optimizer>> {
        let mut base = self.cso_params();
        if let Some(v) = &self.vmax {
            base.v_max = parse_vmax(v)?;
        }
        let sized = CsoParams {
            n_cats: n_agents,
            max_iters,
            ..base.clone()
        };
        let opt: Box<dyn Optimizer> = match id {
            "cso" => {
                sized.validate()?;
                Box::new(harness::CsoOptimizer { params: base })
            }
            "aicso" => {
                let d = AicsoParams::default();
                let params = AicsoParams {
                    base,
                    w_start: self.w_start.unwrap_or(d.w_start),
                    w_end: self.w_end.unwrap_or(d.w_end),
                };
                AicsoParams { base: sized, ..params.clone() }.validate()?;
                Box::new(harness::AicsoOptimizer { params })
            }
            "pcso" => {
                let d = PcsoParams::default();
                let params = PcsoParams {
                    base,
                    n_groups: self.groups.unwrap_or(d.n_groups),
                    ech: self.ech.unwrap_or(d.ech),
                };
                PcsoParams { base: sized, ..params.clone() }.validate()?;
                Box::new(harness::PcsoOptimizer { params })
            }
            other => harness::builtin(other)?,
        };
        Ok(opt)
    }
}

fn metadata_block(meta: &[(String, String)]) -> String {
    let mut s = String::new();
    for (k, v) in meta {
        let _ = writeln!(s, "# {k} = {v}");
    }
    s
}

fn cmd_run(a: &RunArgs) -> CliResult<(String, String)> {
    let algo = a
        .algo
        .clone()
        .ok_or_else(|| CliError::Usage("--algo is required".into()))?;
    let function = a
        .function
        .clone()
        .ok_or_else(|| CliError::Usage("--function is required".into()))?;
    let entry = suite::lookup(&function)?;
    let objective = match a.dim {
        Some(d) => entry.with_dim(d)?,
        None => entry,
    };
    let n_agents = a.cats.unwrap_or(30);
    let max_iters = a.iters.unwrap_or(500);
    let seed = a.seed.unwrap_or(0);
    a.algo_flags.check_applicable(std::slice::from_ref(&algo))?;
    let optimizer = a.algo_flags.optimizer(&algo, n_agents, max_iters)?;
    let budget = harness::Budget { n_agents, max_iters };
    let outcome = optimizer.optimize(&budget, &objective, seed)?;

    let mut meta = vec![
        ("algorithm".to_string(), algo.clone()),
        ("function".into(), objective.id().to_string()),
        ("dim".into(), objective.dim().to_string()),
        ("n_agents".into(), n_agents.to_string()),
        ("max_iters".into(), max_iters.to_string()),
        ("seed".into(), seed.to_string()),
        ("suite_version".into(), suite::SUITE_VERSION.into()),
        ("format_version".into(), harness::FORMAT_VERSION.into()),
    ];
    for (k, v) in optimizer.describe() {
        meta.push((format!("param.{algo}.{k}"), v));
    }

    let mut out = metadata_block(&meta);
    let _ = writeln!(out, "best_fitness = {}", sci(outcome.best_fitness));
    let _ = writeln!(out, "gap = {}", sci(outcome.best_fitness - objective.f_min()));
    let _ = writeln!(out, "evaluations_used = {}", outcome.evaluations_used);
    let position: Vec<String> = outcome.best_position.iter().map(|&x| sci(x)).collect();
    let _ = writeln!(out, "best_position = {}", position.join(";"));

    if let Some(path) = &a.out {
        let trial = TrialResult {
            algorithm: algo,
            function: objective.id().to_string(),
            run_index: 0,
            seed,
            best_fitness: outcome.best_fitness,
            best_position: outcome.best_position.clone(),
            evaluations_used: outcome.evaluations_used,
            trace: outcome
                .trace
                .iter()
                .enumerate()
                .map(|(i, &v)| TracePoint {
                    iteration: outcome.first_iteration + i as u64,
                    best_fitness: v,
                })
                .collect(),
            failure: None,
        };
        let set = ResultSet {
            metadata: meta,
            trials: vec![trial],
            warnings: Vec::new(),
        };
        harness::write_results(&set, path)?;
        let _ = writeln!(out, "wrote {} and {}", path.display(), harness::trace_path(path).display());
    }
    Ok((out, String::new()))
}

fn default_workers(env: &dyn Fn(&str) -> Option<String>) -> CliResult<usize> {
    match env(WORKERS_ENV) {
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::Usage(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))),
        },
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Builds the protocol and optimizers described by `suite` flags.
pub fn suite_plan(a: &SuiteArgs) -> CliResult<(Protocol, Vec<Box<dyn Optimizer>>)> {
    let algorithms: Vec<String> = a
        .algos
        .as_deref()
        .unwrap_or("cso")
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if algorithms.is_empty() {
        return Err(CliError::Usage("--algos lists no algorithms".into()));
    }
    let functions = suite::parse_selection(a.functions.as_deref().unwrap_or("all"))?
        .into_iter()
        .map(String::from)
        .collect();
    let protocol = Protocol {
        n_runs: a.runs.unwrap_or(30),
        n_agents: a.cats.unwrap_or(30),
        max_iters: a.iters.unwrap_or(500),
        functions,
        algorithms: algorithms.clone(),
        master_seed: a.seed.unwrap_or(0),
        dim: a.dim,
    };
    protocol.validate()?;
    a.algo_flags.check_applicable(&algorithms)?;
    let optimizers = algorithms
        .iter()
        .map(|id| a.algo_flags.optimizer(id, protocol.n_agents, protocol.max_iters))
        .collect::<CliResult<Vec<_>>>()?;
    Ok((protocol, optimizers))
}

fn cmd_suite(a: &SuiteArgs, env: &dyn Fn(&str) -> Option<String>) -> CliResult<(String, String)> {
    let out_path = a
        .out
        .clone()
        .ok_or_else(|| CliError::Usage("--out is required".into()))?;
    let (protocol, optimizers) = suite_plan(a)?;
    let workers = match a.workers {
        Some(0) => return Err(CliError::Usage("--workers must be at least 1".into())),
        Some(n) => n,
        None => default_workers(env)?,
    };
    let set = harness::run_suite(&protocol, &optimizers, workers)?;
    harness::write_results(&set, &out_path)?;
    let failed = set.trials.iter().filter(|t| t.is_failed()).count();
    let mut out = metadata_block(&set.metadata);
    let _ = writeln!(
        out,
        "wrote {} trials ({failed} failed) to {}",
        set.trials.len(),
        out_path.display()
    );
    Ok((out, String::new()))
}

/// Loads `path` as either a means table or a results file.
pub fn load_comparison(path: &Path, baseline: Option<&str>) -> CliResult<Comparison> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    if compare::looks_like_means(&text) {
        let table = compare::parse_means(&text, &path.display().to_string())
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        return Ok(Comparison::from_means(&table)?);
    }
    let set = load_results_file(path)?;
    Ok(Comparison::from_results(&set, baseline)?)
}

fn load_results_file(path: &Path) -> CliResult<ResultSet> {
    let set = harness::load_results(path).map_err(|e| CliError::Runtime(e.to_string()))?;
    if set.trials.is_empty() {
        return Err(CliError::Runtime(format!("{}: no trials", path.display())));
    }
    Ok(set)
}

fn cmd_compare(a: &CompareArgs) -> CliResult<(String, String)> {
    let cmp = load_comparison(&a.input, a.baseline.as_deref())?;
    Ok(render_comparison(&cmp, a.format))
}

/// Renders a comparison; returns (stdout, stderr). Warnings go to the
/// markdown body or, for CSV, to stderr.
pub fn render_comparison(cmp: &Comparison, format: Format) -> (String, String) {
    match format {
        Format::Md => (render_md(cmp), String::new()),
        Format::Csv => {
            let mut err = String::new();
            for w in &cmp.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            (render_csv(cmp), err)
        }
    }
}

fn p_str(r: &Option<WilcoxonResult>) -> String {
    match r {
        Some(t) => sci(t.p_value),
        None => "NA".into(),
    }
}

fn md_row(cells: impl IntoIterator<Item = String>) -> String {
    let cells: Vec<String> = cells.into_iter().collect();
    format!("| {} |\n", cells.join(" | "))
}

fn md_rule(n: usize) -> String {
    format!("|{}\n", "---|".repeat(n))
}

fn opt_sci(x: Option<f64>) -> String {
    x.map_or("NA".into(), sci)
}

fn render_md(cmp: &Comparison) -> String {
    let mut s = String::from("## Mean and standard deviation\n\n");
    let mut head = vec!["Function".to_string()];
    for a in &cmp.algorithms {
        head.push(format!("{a} AV"));
        head.push(format!("{a} STD"));
    }
    head.push("f_min".into());
    s += &md_row(head.clone());
    s += &md_rule(head.len());
    for row in &cmp.rows {
        let mut cells = vec![row.function.clone()];
        for c in &row.cells {
            cells.push(opt_sci(c.mean));
            cells.push(opt_sci(c.std));
        }
        cells.push(opt_sci(row.f_min));
        s += &md_row(cells);
    }

    s += "\n## Ranks\n\n";
    let head: Vec<String> = std::iter::once("Function".to_string())
        .chain(cmp.algorithms.iter().cloned())
        .collect();
    s += &md_row(head.clone());
    s += &md_rule(head.len());
    for (f, ranks) in &cmp.ranks.rows {
        s += &md_row(std::iter::once(f.clone()).chain(ranks.iter().map(|&r| rank_str(r))));
    }
    s += &md_row(std::iter::once("TOTAL".to_string()).chain(cmp.summary.totals.iter().map(|&r| rank_str(r))));
    s += &md_row(
        std::iter::once("OVERALL RANKING".to_string()).chain(cmp.summary.averages.iter().map(|r| format!("{r:.6}"))),
    );
    for g in &cmp.summary.groups {
        s += &md_row(std::iter::once(format!("{} SUBTOTAL", g.name)).chain(g.totals.iter().map(|&r| rank_str(r))));
        s += &md_row(std::iter::once(format!("{} RANKING", g.name)).chain(g.averages.iter().map(|r| format!("{r:.6}"))));
    }

    let _ = write!(
        s,
        "\nFriedman chi-square = {:.6} (N = {}, k = {}, df = {}, p = {})\n",
        cmp.friedman,
        cmp.summary.n_functions,
        cmp.algorithms.len(),
        cmp.algorithms.len() - 1,
        sci(cmp.friedman_p)
    );

    if let Some(base) = &cmp.baseline {
        s += "\n## Wilcoxon signed-rank p-values\n\n";
        let head: Vec<String> = std::iter::once("Function".to_string())
            .chain(cmp.opponents.iter().map(|o| format!("{base} vs. {o}")))
            .collect();
        s += &md_row(head.clone());
        s += &md_rule(head.len());
        for row in &cmp.wilcoxon {
            s += &md_row(std::iter::once(row.function.clone()).chain(row.tests.iter().map(p_str)));
        }
    }

    if !cmp.warnings.is_empty() {
        s += "\n## Warnings\n\n";
        for w in &cmp.warnings {
            let _ = writeln!(s, "- {w}");
        }
    }
    s
}

fn render_csv(cmp: &Comparison) -> String {
    let mut s = String::from("table,row,algorithm,statistic,value\n");
    let mut put = |table: &str, row: &str, alg: &str, stat: &str, value: String| {
        let _ = writeln!(s, "{table},{row},{alg},{stat},{value}");
    };
    for row in &cmp.rows {
        for (a, c) in cmp.algorithms.iter().zip(&row.cells) {
            put("means", &row.function, a, "mean", opt_sci(c.mean));
            put("means", &row.function, a, "std", opt_sci(c.std));
        }
        put("means", &row.function, "", "f_min", opt_sci(row.f_min));
    }
    for (f, ranks) in &cmp.ranks.rows {
        for (a, &r) in cmp.algorithms.iter().zip(ranks) {
            put("ranks", f, a, "rank", rank_str(r));
        }
    }
    for (i, a) in cmp.algorithms.iter().enumerate() {
        put("ranks", "TOTAL", a, "total", rank_str(cmp.summary.totals[i]));
        put("ranks", "TOTAL", a, "average", format!("{:.6}", cmp.summary.averages[i]));
    }
    for g in &cmp.summary.groups {
        for (i, a) in cmp.algorithms.iter().enumerate() {
            put("ranks", &g.name, a, "total", rank_str(g.totals[i]));
            put("ranks", &g.name, a, "average", format!("{:.6}", g.averages[i]));
        }
    }
    put("friedman", "ALL", "", "statistic", format!("{:.6}", cmp.friedman));
    put("friedman", "ALL", "", "p_value", sci(cmp.friedman_p));
    if let Some(base) = &cmp.baseline {
        for row in &cmp.wilcoxon {
            for (o, t) in cmp.opponents.iter().zip(&row.tests) {
                let label = format!("{base} vs. {o}");
                put("wilcoxon", &row.function, &label, "p_value", p_str(t));
                if let Some(t) = t {
                    put("wilcoxon", &row.function, &label, "method", t.method.as_str().into());
                }
            }
        }
    }
    s
}

fn cmd_report(a: &ReportArgs) -> CliResult<(String, String)> {
    let set = load_results_file(&a.input)?;
    Ok((render_report(&set), String::new()))
}

/// Per (function, algorithm): gap of the best fitness to f_min and the mean
/// best-so-far at 0%, 25%, 50%, 75% and 100% of the recorded trace.
pub fn render_report(set: &ResultSet) -> String {
    let mut s = String::new();
    for w in &set.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    let mut keys: Vec<(String, String)> = Vec::new();
    for t in &set.trials {
        let k = (t.function.clone(), t.algorithm.clone());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    // Group by function in first-seen order, then algorithm.
    let functions: Vec<String> = {
        let mut v: Vec<String> = Vec::new();
        for (f, _) in &keys {
            if !v.contains(f) {
                v.push(f.clone());
            }
        }
        v
    };

    s += "## Gap to f_min (best_fitness - f_min)\n\n";
    let head = ["Function", "Algorithm", "f_min", "runs", "failed", "mean best", "mean gap", "min gap", "max gap", "mean evaluations"];
    s += &md_row(head.iter().map(|h| h.to_string()));
    s += &md_rule(head.len());
    let mut conv = String::from("\n## Convergence (mean best-so-far)\n\n");
    let chead = ["Function", "Algorithm", "0%", "25%", "50%", "75%", "100%"];
    conv += &md_row(chead.iter().map(|h| h.to_string()));
    conv += &md_rule(chead.len());

    for f in &functions {
        let f_min = compare::results_f_min(set, f);
        for (_, alg) in keys.iter().filter(|(kf, _)| kf == f) {
            let trials: Vec<&TrialResult> = set
                .trials
                .iter()
                .filter(|t| &t.function == f && &t.algorithm == alg)
                .collect();
            let ok: Vec<&TrialResult> = trials.iter().copied().filter(|t| !t.is_failed()).collect();
            let failed = trials.len() - ok.len();
            let mean = |v: &[f64]| if v.is_empty() { None } else { Some(v.iter().sum::<f64>() / v.len() as f64) };
            let best: Vec<f64> = ok.iter().map(|t| t.best_fitness).collect();
            let gaps: Vec<f64> = match f_min {
                Some(m) => best.iter().map(|b| b - m).collect(),
                None => Vec::new(),
            };
            let evals: Vec<f64> = ok.iter().map(|t| t.evaluations_used as f64).collect();
            let min_gap = gaps.iter().copied().reduce(f64::min);
            let max_gap = gaps.iter().copied().reduce(f64::max);
            s += &md_row([
                f.clone(),
                alg.clone(),
                opt_sci(f_min),
                trials.len().to_string(),
                failed.to_string(),
                opt_sci(mean(&best)),
                opt_sci(mean(&gaps)),
                opt_sci(min_gap),
                opt_sci(max_gap),
                mean(&evals).map_or("NA".into(), |e| format!("{e:.1}")),
            ]);

            let with_trace: Vec<&&TrialResult> = ok.iter().filter(|t| !t.trace.is_empty()).collect();
            let mut row = vec![f.clone(), alg.clone()];
            for q in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let at: Vec<f64> = with_trace
                    .iter()
                    .map(|t| {
                        let idx = ((t.trace.len() - 1) as f64 * q).round() as usize;
                        t.trace[idx].best_fitness
                    })
                    .collect();
                row.push(opt_sci(mean(&at)));
            }
            conv += &md_row(row);
        }
    }
    s + &conv
}

/// Summary used by `report`; exposed for tests.
pub fn gap_summary(set: &ResultSet, function: &str, algorithm: &str) -> Option<stats::Summary> {
    let f_min = compare::results_f_min(set, function)?;
    let gaps: Vec<f64> = set
        .trials
        .iter()
        .filter(|t| t.function == function && t.algorithm == algorithm && !t.is_failed())
        .map(|t| t.best_fitness - f_min)
        .collect();
    stats::summarize(&gaps).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_matches_table_style() {
        assert_eq!(sci(3.5e-14), "3.50000E-14");
        assert_eq!(sci(15.24806), "1.52481E+01");
        assert_eq!(sci(0.0), "0.00000E+00");
        assert_eq!(sci(-10502.1), "-1.05021E+04");
        assert_eq!(sci(f64::NAN), "NA");
    }

    #[test]
    fn ranks_print_without_trailing_zeros() {
        assert_eq!(rank_str(2.0), "2");
        assert_eq!(rank_str(2.5), "2.5");
    }

    #[test]
    fn config_lines_become_flags() {
        let args = parse_config("# comment\nalgo = pcso\nw_start=0.8 # trailing\n\n", "c").unwrap();
        assert_eq!(args, ["--algo", "pcso", "--w-start", "0.8"]);
        assert!(parse_config("nonsense\n", "c").is_err());
        assert!(parse_config("config = x\n", "c").is_err());
    }

    #[test]
    fn vmax_forms() {
        assert_eq!(parse_vmax("0.2*range").unwrap(), VelocityCap::RangeFraction(0.2));
        assert_eq!(parse_vmax("3").unwrap(), VelocityCap::Absolute(3.0));
        assert!(parse_vmax("fast").is_err());
    }

    #[test]
    fn flag_applicability() {
        let flags = AlgoFlags { ech: Some(3), ..Default::default() };
        assert!(flags.check_applicable(&["cso".into()]).is_err());
        assert!(flags.check_applicable(&["cso".into(), "pcso".into()]).is_ok());
        let flags = AlgoFlags { mr: Some(0.1), ..Default::default() };
        assert!(flags.check_applicable(&["random".into()]).is_err());
    }
}
