//! Cross-algorithm comparison: per-cell mean/std, per-function ranks with
//! block subtotals, the Friedman statistic and Wilcoxon tests against a
//! baseline algorithm.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::ResultSet;
use crate::objective::Objective;
use crate::stats::{self, RankSummary, RankTable, WilcoxonResult};
use crate::suite;

/// Column names of a means table (one row per function and algorithm).
pub const MEANS_HEADER: [&str; 5] = ["function", "f_min", "algorithm", "mean", "std"];

/// Mean and standard deviation of one (function, algorithm) cell; `None`
/// marks a missing cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub n: usize,
}

impl Cell {
    const MISSING: Cell = Cell {
        mean: None,
        std: None,
        n: 0,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionRow {
    pub function: String,
    pub f_min: Option<f64>,
    /// One cell per algorithm, in [`Comparison::algorithms`] order.
    pub cells: Vec<Cell>,
}

/// Baseline-versus-others tests for one function. `None` where fewer than
/// one pair of successful runs exists.
#[derive(Debug, Clone, PartialEq)]
pub struct WilcoxonRow {
    pub function: String,
    pub tests: Vec<Option<WilcoxonResult>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub algorithms: Vec<String>,
    pub rows: Vec<FunctionRow>,
    pub ranks: RankTable,
    pub summary: RankSummary,
    pub friedman: f64,
    pub friedman_p: f64,
    pub baseline: Option<String>,
    /// Algorithms tested against the baseline, in column order.
    pub opponents: Vec<String>,
    pub wilcoxon: Vec<WilcoxonRow>,
    pub warnings: Vec<String>,
}

fn first_seen<'a>(items: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for s in items {
        if !out.iter().any(|o| o == s) {
            out.push(s.to_string());
        }
    }
    out
}

impl Comparison {
    /// Ranks every function row by the gap between mean and `f_min`
    /// (falling back to the raw mean when `f_min` is unknown) and
    /// aggregates.
    fn assemble(algorithms: Vec<String>, rows: Vec<FunctionRow>, mut warnings: Vec<String>) -> Result<Self> {
        if algorithms.len() < 2 {
            warnings.push("only one algorithm; ranks are trivial".into());
        }
        if rows.is_empty() {
            return Err(Error::Usage("comparison needs at least one function".into()));
        }
        let mut ranks = RankTable::new(algorithms.clone());
        for row in &rows {
            let means: Vec<Option<f64>> = row.cells.iter().map(|c| c.mean).collect();
            for (alg, c) in algorithms.iter().zip(&row.cells) {
                if c.mean.is_none() {
                    warnings.push(format!("{}: no result for {alg}, ranked last", row.function));
                }
            }
            let r = match row.f_min {
                Some(f) => stats::rank_row_by_gap(&means, f),
                None => {
                    warnings.push(format!("{}: f_min unknown, ranked by raw mean", row.function));
                    stats::rank_row(&means, true)
                }
            };
            ranks.push(row.function.clone(), r);
        }
        let summary = ranks.aggregate();
        let friedman = stats::friedman_statistic(&summary.totals, summary.n_functions, algorithms.len());
        let friedman_p = stats::friedman_p_value(friedman, algorithms.len());
        Ok(Comparison {
            algorithms,
            rows,
            ranks,
            summary,
            friedman,
            friedman_p,
            baseline: None,
            opponents: Vec::new(),
            wilcoxon: Vec::new(),
            warnings,
        })
    }

    /// Builds the comparison from per-run results. `baseline` defaults to
    /// the first algorithm; failed trials count as missing.
    pub fn from_results(set: &ResultSet, baseline: Option<&str>) -> Result<Self> {
        if set.trials.is_empty() {
            return Err(Error::Usage("no trials".into()));
        }
        let algorithms = first_seen(set.trials.iter().map(|t| t.algorithm.as_str()));
        let functions = first_seen(set.trials.iter().map(|t| t.function.as_str()));
        let baseline = match baseline {
            Some(b) if algorithms.iter().any(|a| a == b) => b.to_string(),
            Some(b) => {
                return Err(Error::Usage(format!(
                    "baseline `{b}` not among algorithms {}",
                    algorithms.join(",")
                )))
            }
            None => algorithms[0].clone(),
        };

        // (algorithm, function) -> run_index -> best fitness
        let mut runs: HashMap<(&str, &str), BTreeMap<usize, f64>> = HashMap::new();
        for t in set.trials.iter().filter(|t| !t.is_failed()) {
            runs.entry((t.algorithm.as_str(), t.function.as_str()))
                .or_default()
                .insert(t.run_index, t.best_fitness);
        }
        let failed = set.trials.iter().filter(|t| t.is_failed()).count();
        let mut warnings = set.warnings.clone();
        if failed > 0 {
            warnings.push(format!("{failed} failed trial(s) excluded"));
        }

        let mut rows = Vec::with_capacity(functions.len());
        for f in &functions {
            let cells = algorithms
                .iter()
                .map(|a| match runs.get(&(a.as_str(), f.as_str())) {
                    Some(r) if !r.is_empty() => {
                        let values: Vec<f64> = r.values().copied().collect();
                        let s = stats::summarize(&values).expect("non-empty");
                        Cell {
                            mean: Some(s.mean),
                            std: Some(s.std),
                            n: s.n,
                        }
                    }
                    _ => Cell::MISSING,
                })
                .collect();
            rows.push(FunctionRow {
                function: f.clone(),
                f_min: results_f_min(set, f),
                cells,
            });
        }

        let mut cmp = Self::assemble(algorithms, rows, warnings)?;
        let opponents: Vec<String> = cmp.algorithms.iter().filter(|a| **a != baseline).cloned().collect();
        for f in &functions {
            let base = runs.get(&(baseline.as_str(), f.as_str()));
            let tests = opponents
                .iter()
                .map(|o| {
                    let (base, other) = (base?, runs.get(&(o.as_str(), f.as_str()))?);
                    let (a, b): (Vec<f64>, Vec<f64>) = base
                        .iter()
                        .filter_map(|(run, &x)| other.get(run).map(|&y| (x, y)))
                        .unzip();
                    stats::wilcoxon_signed_rank(&a, &b).ok()
                })
                .collect();
            cmp.wilcoxon.push(WilcoxonRow {
                function: f.clone(),
                tests,
            });
        }
        cmp.baseline = Some(baseline);
        cmp.opponents = opponents;
        Ok(cmp)
    }

    /// Builds the comparison from a table of published means. No per-run
    /// data exists, so no Wilcoxon rows are produced.
    pub fn from_means(table: &MeansTable) -> Result<Self> {
        let algorithms = first_seen(table.records.iter().map(|r| r.algorithm.as_str()));
        let functions = first_seen(table.records.iter().map(|r| r.function.as_str()));
        let mut rows = Vec::with_capacity(functions.len());
        for f in &functions {
            let mut f_min = None;
            let mut cells = vec![Cell::MISSING; algorithms.len()];
            for r in table.records.iter().filter(|r| &r.function == f) {
                f_min = f_min.or(r.f_min);
                let slot = algorithms.iter().position(|a| *a == r.algorithm).expect("seen");
                cells[slot] = Cell {
                    mean: r.mean,
                    std: r.std,
                    n: 0,
                };
            }
            rows.push(FunctionRow {
                function: f.clone(),
                f_min,
                cells,
            });
        }
        let mut warnings = table.warnings.clone();
        warnings.push("means table has no per-run data; Wilcoxon tests skipped".into());
        Self::assemble(algorithms, rows, warnings)
    }
}

/// Table f_min for a suite function at the dimensionality the trials used.
pub fn results_f_min(set: &ResultSet, function: &str) -> Option<f64> {
    let entry = suite::lookup(function).ok()?;
    if !entry.is_scalable() {
        return Some(entry.f_min());
    }
    let dim = set
        .trials
        .iter()
        .find(|t| t.function == function && !t.best_position.is_empty())
        .map(|t| t.best_position.len())
        .or_else(|| set.meta("dim").and_then(|d| d.parse().ok()))
        .unwrap_or(entry.default_dim());
    entry.with_dim(dim).ok().map(|e| e.f_min())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeansRecord {
    pub function: String,
    pub f_min: Option<f64>,
    pub algorithm: String,
    pub mean: Option<f64>,
    pub std: Option<f64>,
}

/// Published per-cell means, e.g. transcribed from a results table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MeansTable {
    pub records: Vec<MeansRecord>,
    pub warnings: Vec<String>,
}

/// True when `text` starts (after `#` comments) with the means header.
pub fn looks_like_means(text: &str) -> bool {
    text.lines()
        .find(|l| !l.starts_with('#') && !l.trim().is_empty())
        .is_some_and(|l| l.trim() == MEANS_HEADER.join(","))
}

/// Parses a means table; `NA` marks missing values.
pub fn parse_means(text: &str, origin: &str) -> Result<MeansTable> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let err = |record: u64, line: u64, message: String| Error::Parse {
        path: origin.to_string(),
        record,
        line,
        message,
    };
    let header = reader
        .headers()
        .map_err(|e| err(0, 1, e.to_string()))?
        .clone();
    if header.iter().ne(MEANS_HEADER.iter().copied()) {
        return Err(err(0, 1, format!("expected header `{}`", MEANS_HEADER.join(","))));
    }
    let mut records = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let i = i as u64;
        let rec = rec.map_err(|e| err(i, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != MEANS_HEADER.len() {
            return Err(err(i, line, format!("expected 5 fields, found {}", rec.len())));
        }
        let num = |col: usize| -> Result<Option<f64>> {
            match rec[col].trim() {
                "NA" | "" => Ok(None),
                s => s
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|_| err(i, line, format!("field `{}`: `{s}` is not a number", MEANS_HEADER[col]))),
            }
        };
        records.push(MeansRecord {
            function: rec[0].trim().to_string(),
            f_min: num(1)?,
            algorithm: rec[2].trim().to_string(),
            mean: num(3)?,
            std: num(4)?,
        });
    }
    if records.is_empty() {
        return Err(Error::Usage(format!("{origin}: means table has no rows")));
    }
    Ok(MeansTable {
        records,
        warnings: Vec::new(),
    })
}

pub fn load_means(path: &Path) -> Result<MeansTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_means(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{TrialResult, TracePoint};

    fn trial(alg: &str, f: &str, run: usize, best: f64) -> TrialResult {
        TrialResult {
            algorithm: alg.into(),
            function: f.into(),
            run_index: run,
            seed: run as u64,
            best_fitness: best,
            best_position: vec![0.0; 2],
            evaluations_used: 1,
            trace: vec![TracePoint { iteration: 0, best_fitness: best }],
            failure: None,
        }
    }

    #[test]
    fn identical_sets_give_degenerate_tests() {
        let mut trials = Vec::new();
        for alg in ["a", "b"] {
            for run in 0..5 {
                trials.push(trial(alg, "F1", run, run as f64));
            }
        }
        let set = ResultSet { trials, ..Default::default() };
        let cmp = Comparison::from_results(&set, None).unwrap();
        assert_eq!(cmp.ranks.rows[0].1, vec![1.5, 1.5]);
        let t = cmp.wilcoxon[0].tests[0].unwrap();
        assert_eq!(t.method, stats::WilcoxonMethod::Degenerate);
        assert_eq!(t.p_value, 1.0);
    }

    #[test]
    fn failed_cells_rank_last() {
        let mut failed = trial("b", "F1", 0, f64::NAN);
        failed.failure = Some("boom".into());
        let set = ResultSet {
            trials: vec![trial("a", "F1", 0, 5.0), failed, trial("c", "F1", 0, 1.0)],
            ..Default::default()
        };
        let cmp = Comparison::from_results(&set, Some("a")).unwrap();
        assert_eq!(cmp.ranks.rows[0].1, vec![2.0, 3.0, 1.0]);
        assert!(cmp.warnings.iter().any(|w| w.contains("no result for b")));
        assert_eq!(cmp.wilcoxon[0].tests[0], None);
    }

    #[test]
    fn single_algorithm_gives_trivial_ranks() {
        let set = ResultSet { trials: vec![trial("a", "F1", 0, 1.0)], ..Default::default() };
        let cmp = Comparison::from_results(&set, None).unwrap();
        assert_eq!(cmp.summary.totals, vec![1.0]);
        assert_eq!(cmp.friedman, 0.0);
        assert!(cmp.opponents.is_empty());
        assert!(Comparison::from_results(&ResultSet::default(), None).is_err());
    }

    #[test]
    fn means_table_parses_na() {
        let text = "function,f_min,algorithm,mean,std\nF8,-12569.487,A,-2855.11,359.1697\nF8,-12569.487,B,NA,NA\n";
        assert!(looks_like_means(text));
        let t = parse_means(text, "m.csv").unwrap();
        assert_eq!(t.records[1].mean, None);
        let cmp = Comparison::from_means(&t).unwrap();
        assert_eq!(cmp.ranks.rows[0].1, vec![1.0, 2.0]);
        assert!(parse_means("function,f_min,algorithm,mean,std\nF1,0,A,x,1\n", "m").is_err());
    }
}
