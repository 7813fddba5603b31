//! Benchmark orchestration: per-dataset split, per-method cross-validation,
//! retraining at the chosen parameter, and report assembly.
//!
//! Reports are reproducible byte-for-byte for a fixed config: the canonical
//! JSON and text outputs carry no wall-clock values (cell runtimes stay in
//! memory and go to logs only).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::data::{
    load_csv, load_keel, load_keel_with_positive, mix_seed, stratified_split, Dataset, LabelColumn,
    MinMaxScaler, SplitSpec,
};
use crate::metrics::{active_count, auc, ACTIVE_WEIGHT_THRESHOLD};
use crate::model::Method;
use crate::scalar::Real;

use super::cv::cross_validate_with_deadline;
use super::{default_grid, fit_method, run_jobs, HarnessError};

fn default_seed() -> u64 {
    7
}

fn default_fraction() -> f64 {
    0.25
}

fn default_k() -> usize {
    5
}

fn default_budget() -> u64 {
    600
}

/// One dataset reference in a benchmark config.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub path: String,
    #[serde(default)]
    pub name: Option<String>,
    /// "csv" or "keel"; inferred from the extension when absent.
    #[serde(default)]
    pub format: Option<String>,
    /// CSV label column name; default: the last column.
    #[serde(default)]
    pub label_column: Option<String>,
    /// Label value mapped to +1; default "positive".
    #[serde(default)]
    pub positive_label: Option<String>,
}

/// Benchmark run description (JSON document).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub datasets: Vec<DatasetEntry>,
    pub methods: Vec<Method>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_fraction")]
    pub test_fraction: f64,
    #[serde(default = "default_k")]
    pub k_folds: usize,
    #[serde(default)]
    pub threads: Option<usize>,
    /// Per-cell wall-clock budget; cells over budget are reported timed-out.
    #[serde(default = "default_budget")]
    pub budget_seconds: u64,
    /// Min-max scale features to [0, 1], fitted on the train side.
    #[serde(default)]
    pub scale_features: bool,
}

impl BenchmarkConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// One dataset-method cell of the report.
#[derive(Debug, Clone, Serialize)]
pub struct CellReport {
    pub dataset: String,
    pub method: Method,
    pub outcome: CellOutcome,
    /// Wall time of the cell; not part of the serialized report so reruns
    /// are byte-identical.
    #[serde(skip)]
    pub runtime_secs: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellOutcome {
    Ok {
        test_auc: f64,
        chosen_param: f64,
        active_features: usize,
        available_features: usize,
        prototypes: Option<usize>,
        cg_iterations: Option<usize>,
    },
    Error {
        message: String,
    },
    TimedOut,
}

/// Assembled benchmark results. Wins count every method tied for the best
/// test AUC of a dataset; the feature aggregate is the mean over datasets of
/// `active / available`.
#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkReport {
    pub cells: Vec<CellReport>,
    pub wins: BTreeMap<Method, usize>,
    pub pct_features_used: BTreeMap<Method, f64>,
    /// Caveats attached to specific methods (fixed strings, so reports stay
    /// byte-reproducible).
    pub notes: Vec<String>,
}

impl BenchmarkReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Aligned text tables: test AUC and active-feature counts per cell,
    /// then the win counts and feature usage aggregates.
    pub fn to_table(&self, config: &BenchmarkConfig) -> String {
        let methods = &config.methods;
        let mut datasets: Vec<&str> = Vec::new();
        for cell in &self.cells {
            if !datasets.contains(&cell.dataset.as_str()) {
                datasets.push(&cell.dataset);
            }
        }
        let cell = |ds: &str, m: Method| -> Option<&CellReport> {
            self.cells
                .iter()
                .find(|c| c.dataset == ds && c.method == m)
        };
        let name_width = datasets
            .iter()
            .map(|d| d.len())
            .chain(["dataset".len()])
            .max()
            .unwrap_or(8)
            .max(8);
        let col_width = methods
            .iter()
            .map(|m| m.name().len())
            .max()
            .unwrap_or(6)
            .max(9);

        let mut out = String::new();
        let _ = writeln!(out, "Test AUC");
        let _ = write!(out, "{:<name_width$}", "dataset");
        for m in methods {
            let _ = write!(out, "  {:>col_width$}", m.name());
        }
        let _ = writeln!(out);
        for ds in &datasets {
            let _ = write!(out, "{ds:<name_width$}");
            for &m in methods {
                let text = match cell(ds, m).map(|c| &c.outcome) {
                    Some(CellOutcome::Ok { test_auc, .. }) => format!("{test_auc:.3}"),
                    Some(CellOutcome::TimedOut) => "timeout".to_string(),
                    Some(CellOutcome::Error { .. }) => "error".to_string(),
                    None => "-".to_string(),
                };
                let _ = write!(out, "  {text:>col_width$}");
            }
            let _ = writeln!(out);
        }

        let _ = writeln!(out);
        let _ = writeln!(out, "Active features (|w| >= {ACTIVE_WEIGHT_THRESHOLD})");
        let _ = write!(out, "{:<name_width$}", "dataset");
        for m in methods {
            let _ = write!(out, "  {:>col_width$}", m.name());
        }
        let _ = writeln!(out);
        for ds in &datasets {
            let _ = write!(out, "{ds:<name_width$}");
            for &m in methods {
                let text = match cell(ds, m).map(|c| &c.outcome) {
                    Some(CellOutcome::Ok {
                        active_features, ..
                    }) => active_features.to_string(),
                    _ => "-".to_string(),
                };
                let _ = write!(out, "  {text:>col_width$}");
            }
            let _ = writeln!(out);
        }

        let _ = writeln!(out);
        let _ = write!(out, "{:<name_width$}", "wins");
        for m in methods {
            let _ = write!(out, "  {:>col_width$}", self.wins.get(m).copied().unwrap_or(0));
        }
        let _ = writeln!(out);
        let _ = write!(out, "{:<name_width$}", "% features");
        for m in methods {
            let text = match self.pct_features_used.get(m) {
                Some(p) => format!("{:.1}%", 100.0 * p),
                None => "-".to_string(),
            };
            let _ = write!(out, "  {text:>col_width$}");
        }
        let _ = writeln!(out);
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        out
    }
}

fn load_entry<T: Real>(entry: &DatasetEntry) -> Result<Dataset<T>, HarnessError> {
    let format = entry
        .format
        .clone()
        .unwrap_or_else(|| match entry.path.rsplit('.').next() {
            Some("dat") | Some("keel") | Some("arff") => "keel".to_string(),
            _ => "csv".to_string(),
        });
    let ds = match format.as_str() {
        "keel" => match &entry.positive_label {
            Some(p) => load_keel_with_positive(&entry.path, Some(p))?,
            None => load_keel(&entry.path)?,
        },
        "csv" => {
            let positive = entry.positive_label.as_deref().unwrap_or("positive");
            match &entry.label_column {
                Some(name) => load_csv(&entry.path, &LabelColumn::Name(name.clone()), positive)?,
                None => {
                    // default: the last column holds the label
                    let header = std::fs::read_to_string(&entry.path)?
                        .lines()
                        .next()
                        .map(|l| l.split(',').count())
                        .unwrap_or(0);
                    if header == 0 {
                        return Err(HarnessError::Config(format!(
                            "cannot read header of {}",
                            entry.path
                        )));
                    }
                    load_csv(&entry.path, &LabelColumn::Index(header - 1), positive)?
                }
            }
        }
        other => {
            return Err(HarnessError::Config(format!(
                "unknown dataset format {other:?}"
            )))
        }
    };
    Ok(ds)
}

struct PreparedDataset<T> {
    name: String,
    train: Dataset<T>,
    test: Dataset<T>,
}

fn run_cell<T: Real>(
    prepared: &PreparedDataset<T>,
    method: Method,
    seed: u64,
    k_folds: usize,
    budget: Duration,
) -> CellReport {
    let started = Instant::now();
    let deadline = started + budget;
    let grid = default_grid(method);
    let outcome = (|| -> Result<CellOutcome, HarnessError> {
        let cv = cross_validate_with_deadline(
            &prepared.train,
            method,
            &grid,
            k_folds,
            seed,
            Some(deadline),
        )?;
        if Instant::now() > deadline {
            return Err(HarnessError::TimedOut);
        }
        let model = fit_method(&prepared.train, method, cv.best, seed)?;
        let test_auc = auc(&model.score_pair(&prepared.test)?).to_f64_lossy();
        let weights = model.weights();
        let active = active_count(weights, T::real(ACTIVE_WEIGHT_THRESHOLD));
        let prototypes = match &model {
            crate::model::TrainedModel::Prototype(p) => Some(p.n_prototypes()),
            crate::model::TrainedModel::Linear(_) => None,
        };
        Ok(CellOutcome::Ok {
            test_auc,
            chosen_param: cv.best,
            active_features: active,
            available_features: prepared.train.len(),
            cg_iterations: prototypes,
            prototypes,
        })
    })();
    let outcome = match outcome {
        Ok(o) => o,
        Err(HarnessError::TimedOut) => CellOutcome::TimedOut,
        Err(e) => CellOutcome::Error {
            message: e.to_string(),
        },
    };
    CellReport {
        dataset: prepared.name.clone(),
        method,
        outcome,
        runtime_secs: started.elapsed().as_secs_f64(),
    }
}

/// Runs the whole benchmark described by `config`. Dataset-method cells are
/// independent jobs on a bounded worker pool; any cell failure is recorded
/// in the report rather than aborting the run.
pub fn run_benchmark<T: Real>(config: &BenchmarkConfig) -> Result<BenchmarkReport, HarnessError> {
    if config.methods.is_empty() {
        return Err(HarnessError::Config("no methods listed".to_string()));
    }
    let split = SplitSpec::new(config.test_fraction, config.k_folds, config.seed)?;

    // load and split each dataset once; a failing dataset fails all its cells
    let mut prepared: Vec<Result<PreparedDataset<T>, String>> = Vec::new();
    for (i, entry) in config.datasets.iter().enumerate() {
        let name = entry
            .name
            .clone()
            .unwrap_or_else(|| entry.path.rsplit('/').next().unwrap_or(&entry.path).to_string());
        let result = (|| -> Result<PreparedDataset<T>, HarnessError> {
            let ds = load_entry::<T>(entry)?;
            let mut spec = split;
            spec.seed = mix_seed(config.seed, i as u64);
            let (train, test) = stratified_split(&ds, &spec)?;
            let (train, test) = if config.scale_features {
                let scaler = MinMaxScaler::fit(&train);
                (scaler.transform(&train), scaler.transform(&test))
            } else {
                (train, test)
            };
            Ok(PreparedDataset { name: name.clone(), train, test })
        })();
        prepared.push(result.map_err(|e| format!("{name}: {e}")));
    }

    let budget = Duration::from_secs(config.budget_seconds);
    let mut jobs: Vec<(usize, Method)> = Vec::new();
    for di in 0..prepared.len() {
        for &m in &config.methods {
            jobs.push((di, m));
        }
    }
    let threads = config
        .threads
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|p| p.get())
                .unwrap_or(1)
        })
        .max(1);

    let cells = run_jobs(jobs, threads, |(di, method)| match &prepared[di] {
        Ok(p) => {
            let cell_seed = mix_seed(config.seed, (di as u64) << 8 | method as u64);
            run_cell(p, method, cell_seed, config.k_folds, budget)
        }
        Err(msg) => CellReport {
            dataset: config.datasets[di]
                .name
                .clone()
                .unwrap_or_else(|| config.datasets[di].path.clone()),
            method,
            outcome: CellOutcome::Error {
                message: msg.clone(),
            },
            runtime_secs: 0.0,
        },
    });

    // win counting: every method tied at a dataset's best AUC gets the win
    let mut wins: BTreeMap<Method, usize> = config.methods.iter().map(|&m| (m, 0)).collect();
    let mut dataset_names: Vec<&str> = Vec::new();
    for c in &cells {
        if !dataset_names.contains(&c.dataset.as_str()) {
            dataset_names.push(&c.dataset);
        }
    }
    for ds in &dataset_names {
        let scored: Vec<(&CellReport, f64)> = cells
            .iter()
            .filter(|c| c.dataset == *ds)
            .filter_map(|c| match &c.outcome {
                CellOutcome::Ok { test_auc, .. } => Some((c, *test_auc)),
                _ => None,
            })
            .collect();
        let Some(best) = scored
            .iter()
            .map(|(_, a)| *a)
            .max_by(|a, b| a.partial_cmp(b).expect("finite AUC"))
        else {
            continue;
        };
        for (c, a) in scored {
            if a == best {
                *wins.entry(c.method).or_insert(0) += 1;
            }
        }
    }

    // mean over datasets of active/available per method
    let mut pct: BTreeMap<Method, f64> = BTreeMap::new();
    for &m in &config.methods {
        let mut values = Vec::new();
        for c in cells.iter().filter(|c| c.method == m) {
            if let CellOutcome::Ok {
                active_features,
                available_features,
                ..
            } = &c.outcome
            {
                values.push(*active_features as f64 / *available_features as f64);
            }
        }
        if !values.is_empty() {
            pct.insert(m, values.iter().sum::<f64>() / values.len() as f64);
        }
    }

    let mut notes = Vec::new();
    if config.methods.contains(&Method::L2Ranking) {
        notes.push(
            "l2 is an approximate baseline (deterministic averaged subgradient, 2000 steps)"
                .to_string(),
        );
    }

    Ok(BenchmarkReport {
        cells,
        wins,
        pct_features_used: pct,
        notes,
    })
}
