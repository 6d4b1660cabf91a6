//! Experiment orchestration: the run protocol, optimizer plug-ins, seed
//! derivation, the suite runner and results persistence.

use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::cso::{self, CsoParams, RunOutcome, SwarmRng};
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::stats::STD_KIND;
use crate::suite::{self, SUITE_VERSION};
use crate::variants::{self, AicsoParams, PcsoParams};

/// Identifies the seed derivation scheme in results files.
pub const SEED_SCHEME: &str = "sha256/v1";

/// Results file format revision.
pub const FORMAT_VERSION: &str = "1";

/// Column names of the results file.
pub const RESULTS_HEADER: [&str; 7] = [
    "algorithm",
    "function",
    "run_index",
    "seed",
    "best_fitness",
    "evaluations_used",
    "best_position",
];

/// Column names of the trace file.
pub const TRACE_HEADER: [&str; 5] = ["algorithm", "function", "run_index", "iteration", "best_fitness"];

/// The evaluation protocol: every algorithm runs `n_runs` times on every
/// function with `n_agents` search agents for `max_iters` iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct Protocol {
    pub n_runs: usize,
    pub n_agents: usize,
    pub max_iters: usize,
    pub functions: Vec<String>,
    pub algorithms: Vec<String>,
    pub master_seed: u64,
    /// Dimensionality override for the scalable functions F1..F13.
    pub dim: Option<usize>,
}

impl Default for Protocol {
    fn default() -> Self {
        Protocol {
            n_runs: 30,
            n_agents: 30,
            max_iters: 500,
            functions: suite::IDS.iter().map(|s| s.to_string()).collect(),
            algorithms: vec!["cso".into()],
            master_seed: 0,
            dim: None,
        }
    }
}

impl Protocol {
    pub fn budget(&self) -> Budget {
        Budget {
            n_agents: self.n_agents,
            max_iters: self.max_iters,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_runs == 0 || self.n_agents == 0 || self.max_iters == 0 {
            return Err(Error::Config(
                "n_runs, n_agents and max_iters must all be at least 1".into(),
            ));
        }
        if self.functions.is_empty() || self.algorithms.is_empty() {
            return Err(Error::Config("protocol needs at least one function and one algorithm".into()));
        }
        for f in &self.functions {
            self.objective(f)?;
        }
        Ok(())
    }

    /// The suite entry for `function` at this protocol's dimensionality.
    pub fn objective(&self, function: &str) -> Result<suite::SuiteEntry> {
        let entry = suite::lookup(function)?;
        match self.dim {
            Some(d) if entry.is_scalable() => entry.with_dim(d),
            _ => Ok(entry),
        }
    }
}

/// The per-trial slice of the protocol handed to an optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub n_agents: usize,
    pub max_iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Capability {
    ContinuousBoxMinimization,
}

/// What an optimizer reports for one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub best_fitness: f64,
    pub best_position: Vec<f64>,
    pub evaluations_used: u64,
    /// Best-so-far fitness per iteration, starting at `first_iteration`.
    pub trace: Vec<f64>,
    pub first_iteration: u64,
}

impl From<RunOutcome> for Outcome {
    fn from(run: RunOutcome) -> Self {
        Outcome {
            evaluations_used: run.trace.total_evaluations(),
            trace: run.trace.best_fitness,
            best_fitness: run.best.fitness,
            best_position: run.best.position,
            first_iteration: 0,
        }
    }
}

/// An optimizer that can take part in a suite.
///
/// Implementations are invoked concurrently for distinct trials and must be
/// deterministic for a fixed seed.
pub trait Optimizer: Send + Sync {
    fn id(&self) -> &str;

    fn capability(&self) -> Capability {
        Capability::ContinuousBoxMinimization
    }

    /// Effective parameters, echoed into results metadata.
    fn describe(&self) -> Vec<(String, String)>;

    fn optimize(&self, budget: &Budget, objective: &dyn Objective, seed: u64) -> Result<Outcome>;
}

fn describe_cso(params: &CsoParams) -> Vec<(String, String)> {
    params
        .describe()
        .into_iter()
        .filter(|(k, _)| !matches!(*k, "n_cats" | "max_iters"))
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

fn sized(params: &CsoParams, budget: &Budget, seed: u64) -> CsoParams {
    CsoParams {
        n_cats: budget.n_agents,
        max_iters: budget.max_iters,
        rng_seed: seed,
        ..params.clone()
    }
}

#[derive(Debug, Clone, Default)]
pub struct CsoOptimizer {
    pub params: CsoParams,
}

impl Optimizer for CsoOptimizer {
    fn id(&self) -> &str {
        "cso"
    }

    fn describe(&self) -> Vec<(String, String)> {
        describe_cso(&self.params)
    }

    fn optimize(&self, budget: &Budget, objective: &dyn Objective, seed: u64) -> Result<Outcome> {
        cso::run(&sized(&self.params, budget, seed), objective).map(Outcome::from)
    }
}

#[derive(Debug, Clone, Default)]
pub struct AicsoOptimizer {
    pub params: AicsoParams,
}

impl Optimizer for AicsoOptimizer {
    fn id(&self) -> &str {
        "aicso"
    }

    fn describe(&self) -> Vec<(String, String)> {
        let mut d = describe_cso(&self.params.base);
        d.push(("w_start".into(), self.params.w_start.to_string()));
        d.push(("w_end".into(), self.params.w_end.to_string()));
        d
    }

    fn optimize(&self, budget: &Budget, objective: &dyn Objective, seed: u64) -> Result<Outcome> {
        let params = AicsoParams {
            base: sized(&self.params.base, budget, seed),
            ..self.params.clone()
        };
        variants::aicso_run(&params, objective).map(Outcome::from)
    }
}

#[derive(Debug, Clone, Default)]
pub struct PcsoOptimizer {
    pub params: PcsoParams,
}

impl Optimizer for PcsoOptimizer {
    fn id(&self) -> &str {
        "pcso"
    }

    fn describe(&self) -> Vec<(String, String)> {
        let mut d = describe_cso(&self.params.base);
        d.push(("groups".into(), self.params.n_groups.to_string()));
        d.push(("ech".into(), self.params.ech.to_string()));
        d
    }

    fn optimize(&self, budget: &Budget, objective: &dyn Objective, seed: u64) -> Result<Outcome> {
        let params = PcsoParams {
            base: sized(&self.params.base, budget, seed),
            ..self.params.clone()
        };
        variants::pcso_run(&params, objective).map(|o| Outcome::from(o.run))
    }
}

/// Uniform random sampling baseline: `n_agents` samples per iteration.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomSearch;

impl Optimizer for RandomSearch {
    fn id(&self) -> &str {
        "random"
    }

    fn describe(&self) -> Vec<(String, String)> {
        vec![("samples_per_iteration".into(), "n_agents".into())]
    }

    fn optimize(&self, budget: &Budget, objective: &dyn Objective, seed: u64) -> Result<Outcome> {
        baseline_random_search(budget, objective, seed)
    }
}

/// Draws `n_agents * max_iters` uniform points in the box and keeps the best.
/// Trace entry `i` is the best after iteration `i + 1`.
pub fn baseline_random_search(budget: &Budget, objective: &dyn Objective, seed: u64) -> Result<Outcome> {
    let bounds = objective.bounds();
    bounds.validate()?;
    let mut rng = SwarmRng::seed_from_u64(seed);
    let mut eval = cso::Evaluator::new(objective);
    let mut best_fitness = f64::INFINITY;
    let mut best_position = Vec::new();
    let mut trace = Vec::with_capacity(budget.max_iters);
    let mut x = vec![0.0; bounds.dim()];
    for _ in 0..budget.max_iters {
        for _ in 0..budget.n_agents {
            for (d, xd) in x.iter_mut().enumerate() {
                *xd = bounds.lower[d] + bounds.width(d) * rng.random::<f64>();
            }
            let f = eval.evaluate(&x, &mut rng)?;
            if f < best_fitness {
                best_fitness = f;
                best_position.clone_from(&x);
            }
        }
        trace.push(best_fitness);
    }
    if trace.is_empty() {
        return Err(Error::Config("random search needs a budget of at least one sample".into()));
    }
    Ok(Outcome {
        best_fitness,
        best_position,
        evaluations_used: eval.count(),
        trace,
        first_iteration: 1,
    })
}

/// The built-in optimizer for `id` with default parameters.
pub fn builtin(id: &str) -> Result<Box<dyn Optimizer>> {
    match id {
        "cso" => Ok(Box::new(CsoOptimizer::default())),
        "aicso" => Ok(Box::new(AicsoOptimizer::default())),
        "pcso" => Ok(Box::new(PcsoOptimizer::default())),
        "random" => Ok(Box::new(RandomSearch)),
        other => Err(Error::Usage(format!(
            "unknown algorithm `{other}` (expected cso, aicso, pcso or random)"
        ))),
    }
}

/// Stable per-trial seed: the first eight bytes (little endian) of
/// SHA-256 over the scheme tag, the master seed and the trial coordinates.
pub fn derive_seed(master: u64, algorithm: &str, function: &str, run_index: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(SEED_SCHEME.as_bytes());
    h.update(master.to_le_bytes());
    for part in [algorithm, function] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part.as_bytes());
    }
    h.update((run_index as u64).to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iteration: u64,
    pub best_fitness: f64,
}

/// One (algorithm, function, run) outcome.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub algorithm: String,
    pub function: String,
    pub run_index: usize,
    pub seed: u64,
    /// NaN for failed cells.
    pub best_fitness: f64,
    pub best_position: Vec<f64>,
    pub evaluations_used: u64,
    pub trace: Vec<TracePoint>,
    pub failure: Option<String>,
}

impl TrialResult {
    pub fn is_failed(&self) -> bool {
        self.failure.is_some()
    }

    fn failed(algorithm: &str, function: &str, run_index: usize, seed: u64, message: String) -> Self {
        TrialResult {
            algorithm: algorithm.to_string(),
            function: function.to_string(),
            run_index,
            seed,
            best_fitness: f64::NAN,
            best_position: Vec::new(),
            evaluations_used: 0,
            trace: Vec::new(),
            failure: Some(message),
        }
    }
}

impl PartialEq for TrialResult {
    fn eq(&self, other: &Self) -> bool {
        let same = |a: f64, b: f64| a == b || (a.is_nan() && b.is_nan());
        self.algorithm == other.algorithm
            && self.function == other.function
            && self.run_index == other.run_index
            && self.seed == other.seed
            && same(self.best_fitness, other.best_fitness)
            && self.best_position == other.best_position
            && self.evaluations_used == other.evaluations_used
            && self.trace == other.trace
            && self.failure == other.failure
    }
}

/// Trials plus the metadata needed to reproduce them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultSet {
    pub metadata: Vec<(String, String)>,
    pub trials: Vec<TrialResult>,
    /// Problems noticed while loading; never written back.
    pub warnings: Vec<String>,
}

impl ResultSet {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// Runs every (algorithm, function, run) trial of `protocol` on up to
/// `workers` threads. Output order is (algorithm, function, run_index) in
/// protocol order, whatever the execution order. Optimizer errors and
/// panics become failed cells.
pub fn run_suite(
    protocol: &Protocol,
    optimizers: &[Box<dyn Optimizer>],
    workers: usize,
) -> Result<ResultSet> {
    protocol.validate()?;
    let mut chosen = Vec::with_capacity(protocol.algorithms.len());
    for id in &protocol.algorithms {
        let opt = optimizers
            .iter()
            .find(|o| o.id() == id)
            .ok_or_else(|| Error::Usage(format!("no optimizer registered for `{id}`")))?;
        chosen.push(opt.as_ref());
    }
    let objectives = protocol
        .functions
        .iter()
        .map(|f| protocol.objective(f))
        .collect::<Result<Vec<_>>>()?;

    let mut tasks = Vec::new();
    for (a, _) in chosen.iter().enumerate() {
        for (f, _) in objectives.iter().enumerate() {
            for run in 0..protocol.n_runs {
                tasks.push((a, f, run));
            }
        }
    }

    let budget = protocol.budget();
    let run_trial = |&(a, f, run): &(usize, usize, usize)| {
        let opt = chosen[a];
        let objective = &objectives[f];
        let algorithm = &protocol.algorithms[a];
        let function = objective.id();
        let seed = derive_seed(protocol.master_seed, algorithm, function, run);
        let attempt = catch_unwind(AssertUnwindSafe(|| opt.optimize(&budget, objective, seed)));
        match attempt {
            Ok(Ok(outcome)) => TrialResult {
                algorithm: algorithm.clone(),
                function: function.to_string(),
                run_index: run,
                seed,
                best_fitness: outcome.best_fitness,
                best_position: outcome.best_position,
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
            },
            Ok(Err(e)) => TrialResult::failed(algorithm, function, run, seed, e.to_string()),
            Err(panic) => {
                let message = panic
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "optimizer panicked".into());
                TrialResult::failed(algorithm, function, run, seed, format!("panic: {message}"))
            }
        }
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Io(format!("cannot start worker pool: {e}")))?;
    let trials: Vec<TrialResult> = pool.install(|| tasks.par_iter().map(run_trial).collect());

    Ok(ResultSet {
        metadata: suite_metadata(protocol, &chosen),
        trials,
        warnings: Vec::new(),
    })
}

fn suite_metadata(protocol: &Protocol, optimizers: &[&dyn Optimizer]) -> Vec<(String, String)> {
    let mut m: Vec<(String, String)> = vec![
        ("format_version".into(), FORMAT_VERSION.into()),
        ("suite_version".into(), SUITE_VERSION.into()),
        ("seed_scheme".into(), SEED_SCHEME.into()),
        ("master_seed".into(), protocol.master_seed.to_string()),
        ("n_runs".into(), protocol.n_runs.to_string()),
        ("n_agents".into(), protocol.n_agents.to_string()),
        ("max_iters".into(), protocol.max_iters.to_string()),
        (
            "dim".into(),
            protocol.dim.map_or("default".into(), |d| d.to_string()),
        ),
        ("functions".into(), protocol.functions.join(",")),
        ("algorithms".into(), protocol.algorithms.join(",")),
        ("std".into(), STD_KIND.into()),
        (
            "iteration_zero".into(),
            "initial population, outside the iteration budget".into(),
        ),
    ];
    for opt in optimizers {
        for (k, v) in opt.describe() {
            m.push((format!("param.{}.{k}", opt.id()), v));
        }
    }
    m
}

/// `results.csv` -> `results.trace.csv`.
pub fn trace_path(path: &Path) -> PathBuf {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let stem = name.strip_suffix(".csv").unwrap_or(&name);
    path.with_file_name(format!("{stem}.trace.csv"))
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "NA".into()
    } else {
        format!("{x:e}")
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    if s == "NA" {
        return Ok(f64::NAN);
    }
    s.parse::<f64>().map_err(|_| format!("`{s}` is not a number"))
}

/// Renders the results file and its trace sibling as strings.
pub fn render_results(results: &ResultSet) -> (String, String) {
    let mut main = String::from("# catswarm results\n");
    for (k, v) in &results.metadata {
        let _ = writeln!(main, "# {k} = {v}");
    }
    for t in results.trials.iter().filter(|t| t.is_failed()) {
        let msg = t.failure.as_deref().unwrap_or_default().replace('\n', " ");
        let _ = writeln!(main, "# failure = {},{},{}: {msg}", t.algorithm, t.function, t.run_index);
    }
    main.push_str(&RESULTS_HEADER.join(","));
    main.push('\n');
    let mut trace = TRACE_HEADER.join(",");
    trace.push('\n');
    for t in &results.trials {
        let position = t
            .best_position
            .iter()
            .map(|&x| format_f64(x))
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(
            main,
            "{},{},{},{},{},{},{}",
            t.algorithm,
            t.function,
            t.run_index,
            t.seed,
            format_f64(t.best_fitness),
            t.evaluations_used,
            position
        );
        for p in &t.trace {
            let _ = writeln!(
                trace,
                "{},{},{},{},{}",
                t.algorithm,
                t.function,
                t.run_index,
                p.iteration,
                format_f64(p.best_fitness)
            );
        }
    }
    (main, trace)
}

/// Writes `path` and its sibling trace file (see [`trace_path`]).
pub fn write_results(results: &ResultSet, path: &Path) -> Result<()> {
    let (main, trace) = render_results(results);
    std::fs::write(path, main).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let tpath = trace_path(path);
    std::fs::write(&tpath, trace).map_err(|e| Error::Io(format!("{}: {e}", tpath.display())))?;
    Ok(())
}

/// Loads a results file and, when present, its trace sibling.
pub fn load_results(path: &Path) -> Result<ResultSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut set = parse_results(&text, &path.display().to_string())?;
    let tpath = trace_path(path);
    if tpath.exists() {
        let ttext = std::fs::read_to_string(&tpath)
            .map_err(|e| Error::Io(format!("{}: {e}", tpath.display())))?;
        attach_traces(&mut set, &ttext, &tpath.display().to_string())?;
    } else {
        set.warnings
            .push(format!("trace file {} not found; traces are empty", tpath.display()));
    }
    Ok(set)
}

fn parse_error(path: &str, record: u64, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        record,
        line,
        message: message.into(),
    }
}

/// Parses the main results file text.
pub fn parse_results(text: &str, origin: &str) -> Result<ResultSet> {
    let mut metadata = Vec::new();
    let mut failures = Vec::new();
    let mut body_start = 0usize;
    let mut header_line = 1u64;
    for (i, line) in text.lines().enumerate() {
        let Some(comment) = line.strip_prefix('#') else {
            header_line = i as u64 + 1;
            break;
        };
        body_start += line.len() + 1;
        header_line = i as u64 + 2;
        if let Some((k, v)) = comment.split_once('=') {
            let (k, v) = (k.trim(), v.trim());
            if k == "failure" {
                failures.push(v.to_string());
            } else {
                metadata.push((k.to_string(), v.to_string()));
            }
        }
    }
    let body = text.get(body_start..).unwrap_or("");

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(body.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| parse_error(origin, 0, header_line, format!("unreadable header: {e}")))?
        .clone();
    if header.iter().ne(RESULTS_HEADER.iter().copied()) {
        return Err(parse_error(
            origin,
            0,
            header_line,
            format!("expected header `{}`", RESULTS_HEADER.join(",")),
        ));
    }

    let mut trials = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let index = index as u64;
        let line_of = |pos: Option<&csv::Position>| header_line + pos.map_or(index + 1, |p| p.line() - 1);
        let record = record.map_err(|e| parse_error(origin, index, line_of(e.position()), e.to_string()))?;
        let line = line_of(record.position());
        if record.len() != RESULTS_HEADER.len() {
            return Err(parse_error(
                origin,
                index,
                line,
                format!("expected {} fields, found {}", RESULTS_HEADER.len(), record.len()),
            ));
        }
        let field = |i: usize| record.get(i).unwrap_or("");
        let bad = |i: usize, msg: String| parse_error(origin, index, line, format!("field `{}`: {msg}", RESULTS_HEADER[i]));
        let run_index = field(2).parse::<usize>().map_err(|e| bad(2, e.to_string()))?;
        let seed = field(3).parse::<u64>().map_err(|e| bad(3, e.to_string()))?;
        let best_fitness = parse_f64(field(4)).map_err(|m| bad(4, m))?;
        let evaluations_used = field(5).parse::<u64>().map_err(|e| bad(5, e.to_string()))?;
        let best_position = if field(6).is_empty() {
            Vec::new()
        } else {
            field(6)
                .split(';')
                .map(parse_f64)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|m| bad(6, m))?
        };
        trials.push(TrialResult {
            algorithm: field(0).to_string(),
            function: field(1).to_string(),
            run_index,
            seed,
            best_fitness,
            best_position,
            evaluations_used,
            trace: Vec::new(),
            failure: None,
        });
    }

    if !body.is_empty() && !body.ends_with('\n') && !trials.is_empty() {
        let last = trials.len() as u64 - 1;
        return Err(parse_error(
            origin,
            last,
            header_line + trials.len() as u64,
            "record is not newline-terminated; the file looks truncated",
        ));
    }
    let mut dims: Vec<(&str, usize)> = Vec::new();
    for (index, t) in trials.iter().enumerate() {
        if t.best_position.is_empty() {
            continue;
        }
        match dims.iter().find(|(f, _)| *f == t.function) {
            Some(&(_, d)) if d != t.best_position.len() => {
                return Err(parse_error(
                    origin,
                    index as u64,
                    header_line + index as u64 + 1,
                    format!(
                        "field `best_position` has {} coordinates, earlier {} rows have {d}",
                        t.best_position.len(),
                        t.function
                    ),
                ));
            }
            Some(_) => {}
            None => dims.push((t.function.as_str(), t.best_position.len())),
        }
    }

    for f in failures {
        let (key, message) = f.split_once(": ").unwrap_or((f.as_str(), ""));
        let parts: Vec<&str> = key.split(',').collect();
        if let [alg, func, run] = parts.as_slice() {
            if let Some(t) = trials.iter_mut().find(|t| {
                t.algorithm == *alg && t.function == *func && t.run_index.to_string() == *run
            }) {
                t.failure = Some(message.to_string());
            }
        }
    }

    let mut warnings = Vec::new();
    match metadata.iter().find(|(k, _)| k == "suite_version") {
        Some((_, v)) if v != SUITE_VERSION => warnings.push(format!(
            "results were produced with suite version {v}; this build uses {SUITE_VERSION}"
        )),
        None => warnings.push("results carry no suite_version stamp".into()),
        _ => {}
    }

    Ok(ResultSet {
        metadata,
        trials,
        warnings,
    })
}

/// Parses trace rows and attaches them to the matching trials.
pub fn attach_traces(set: &mut ResultSet, text: &str, origin: &str) -> Result<()> {
    use std::collections::HashMap;
    let mut index: HashMap<(String, String, usize), usize> = HashMap::new();
    for (i, t) in set.trials.iter().enumerate() {
        index.insert((t.algorithm.clone(), t.function.clone(), t.run_index), i);
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| parse_error(origin, 0, 1, format!("unreadable header: {e}")))?
        .clone();
    if header.iter().ne(TRACE_HEADER.iter().copied()) {
        return Err(parse_error(origin, 0, 1, format!("expected header `{}`", TRACE_HEADER.join(","))));
    }
    let mut record = csv::StringRecord::new();
    let mut n = 0u64;
    loop {
        let more = reader
            .read_record(&mut record)
            .map_err(|e| parse_error(origin, n, e.position().map_or(n + 2, |p| p.line()), e.to_string()))?;
        if !more {
            break;
        }
        let line = record.position().map_or(n + 2, |p| p.line());
        if record.len() != TRACE_HEADER.len() {
            return Err(parse_error(
                origin,
                n,
                line,
                format!("expected {} fields, found {}", TRACE_HEADER.len(), record.len()),
            ));
        }
        let run = record[2]
            .parse::<usize>()
            .map_err(|e| parse_error(origin, n, line, format!("field `run_index`: {e}")))?;
        let iteration = record[3]
            .parse::<u64>()
            .map_err(|e| parse_error(origin, n, line, format!("field `iteration`: {e}")))?;
        let best_fitness = parse_f64(&record[4])
            .map_err(|m| parse_error(origin, n, line, format!("field `best_fitness`: {m}")))?;
        let key = (record[0].to_string(), record[1].to_string(), run);
        let Some(&i) = index.get(&key) else {
            return Err(parse_error(
                origin,
                n,
                line,
                format!("trace row for unknown trial {},{},{}", key.0, key.1, key.2),
            ));
        };
        set.trials[i].trace.push(TracePoint {
            iteration,
            best_fitness,
        });
        n += 1;
    }
    Ok(())
}
