//! `rankcg`: train, apply and benchmark distance-based ranking classifiers.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use rankcg::data::{load_csv, load_keel, load_keel_with_positive, LabelColumn};
use rankcg::harness::{
    cross_validate, default_grid, run_benchmark, xor_demo, BenchmarkConfig, XorDemoConfig,
};
use rankcg::lp::SolverOptions;
use rankcg::metrics::{active_count, auc, ACTIVE_WEIGHT_THRESHOLD};
use rankcg::model::{load_model, save_model, Method, TrainedModel};
use rankcg::train::{train_linear_baseline, train_prototype_cg, BaselineReg, CgConfig};
use rankcg::Dataset64;

#[derive(Parser)]
#[command(name = "rankcg", version, about = "AUC-maximizing ranking classifiers via column-generation prototype learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Dataset path (.csv with a header row, or a KEEL .dat file)
    #[arg(long)]
    data: PathBuf,
    /// Force the input format instead of inferring it from the extension
    #[arg(long, value_parser = ["csv", "keel"])]
    format: Option<String>,
    /// CSV label column name (default: the last column)
    #[arg(long)]
    label_column: Option<String>,
    /// Label value mapped to +1 (default "positive"; KEEL files fall back
    /// to their positive/negative convention)
    #[arg(long)]
    positive_label: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Train one method on a full dataset and write the model file
    Train {
        #[command(flatten)]
        data: DataArgs,
        /// smooth | bounded_cg | unbounded_cg | l1 | linf | l2
        #[arg(long)]
        method: Method,
        /// Complexity parameter (C, or alpha for the bounded/unbounded CG)
        #[arg(long)]
        param: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Model output path
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a dataset with a saved model (CSV of row,score)
    Predict {
        /// Model file written by `train`
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        /// Scores output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-validate one method over its default parameter grid
    Cv {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        method: Method,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// JSON output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark config and write the JSON + text reports
    Benchmark {
        /// JSON config path
        #[arg(long)]
        config: PathBuf,
        /// Report output path (JSON); the text table goes next to it
        #[arg(long, default_value = "report.json")]
        out: PathBuf,
        /// Worker threads (default: available parallelism)
        #[arg(long)]
        threads: Option<usize>,
        /// Override the config seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train the three CG variants on one noisy-XOR split and write the
    /// per-iteration trace CSV
    XorDemo {
        #[arg(long, default_value_t = 50)]
        n_per_cluster: usize,
        #[arg(long, default_value_t = 0.1)]
        noise_sd: f64,
        /// Generator seed
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Trainer seed (first prototype choice)
        #[arg(long, default_value_t = 40)]
        trainer_seed: u64,
        #[arg(long, default_value_t = 0.01)]
        smooth_c: f64,
        #[arg(long, default_value_t = 1e-3)]
        alpha: f64,
        /// Trace output path
        #[arg(long, default_value = "xor_trace.csv")]
        out: PathBuf,
    },
}

fn load_dataset(args: &DataArgs) -> Result<Dataset64> {
    let format = args.format.clone().unwrap_or_else(|| {
        match args.data.extension().and_then(|e| e.to_str()) {
            Some("dat") | Some("keel") | Some("arff") => "keel".to_string(),
            _ => "csv".to_string(),
        }
    });
    let ds = match format.as_str() {
        "keel" => match &args.positive_label {
            Some(p) => load_keel_with_positive(&args.data, Some(p))?,
            None => load_keel(&args.data)?,
        },
        _ => {
            let positive = args.positive_label.as_deref().unwrap_or("positive");
            match &args.label_column {
                Some(name) => load_csv(&args.data, &LabelColumn::Name(name.clone()), positive)?,
                None => {
                    let first_line = fs::read_to_string(&args.data)
                        .with_context(|| format!("reading {}", args.data.display()))?
                        .lines()
                        .next()
                        .map(|l| l.split(',').count())
                        .unwrap_or(0);
                    if first_line == 0 {
                        bail!("{} looks empty", args.data.display());
                    }
                    load_csv(&args.data, &LabelColumn::Index(first_line - 1), positive)?
                }
            }
        }
    };
    Ok(ds)
}

fn write_or_print(path: &Option<PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{content}"),
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Train {
            data,
            method,
            param,
            seed,
            out,
        } => {
            let ds = load_dataset(&data)?;
            let solver = SolverOptions::default();
            let model = match method {
                Method::Smooth => TrainedModel::Prototype(
                    train_prototype_cg(&ds, &CgConfig::smooth(param, seed), None)?.0,
                ),
                Method::BoundedCg => TrainedModel::Prototype(
                    train_prototype_cg(&ds, &CgConfig::bounded(param, seed), None)?.0,
                ),
                Method::UnboundedCg => TrainedModel::Prototype(
                    train_prototype_cg(&ds, &CgConfig::unbounded(param, seed), None)?.0,
                ),
                Method::L1Ranking => TrainedModel::Linear(
                    train_linear_baseline(&ds, BaselineReg::L1, param, &solver)?.model,
                ),
                Method::LinfRanking => TrainedModel::Linear(
                    train_linear_baseline(&ds, BaselineReg::Linf, param, &solver)?.model,
                ),
                Method::L2Ranking => TrainedModel::Linear(
                    train_linear_baseline(&ds, BaselineReg::L2, param, &solver)?.model,
                ),
            };
            let train_auc = auc(&model.score_pair(&ds)?);
            save_model(&model, &out)?;
            eprintln!(
                "trained {method} on {} ({} rows): train AUC {train_auc:.4}, {} active weights, model -> {}",
                ds.name(),
                ds.len(),
                active_count(model.weights(), ACTIVE_WEIGHT_THRESHOLD),
                out.display()
            );
        }
        Command::Predict { model, data, out } => {
            let model = load_model::<f64>(&model)?;
            let ds = load_dataset(&data)?;
            let scores = model.score_rows(ds.features())?;
            let mut content = String::from("row,score\n");
            for (i, s) in scores.iter().enumerate() {
                content.push_str(&format!("{i},{s}\n"));
            }
            write_or_print(&out, &content)?;
        }
        Command::Cv {
            data,
            method,
            k,
            seed,
            out,
        } => {
            let ds = load_dataset(&data)?;
            let grid = default_grid(method);
            let outcome = cross_validate(&ds, method, &grid, k, seed)?;
            let json = serde_json::json!({
                "method": method,
                "param_name": grid.param_name,
                "best": outcome.best,
                "mean_validation_auc": outcome.table
                    .iter()
                    .map(|(v, a)| serde_json::json!({"value": v, "auc": a}))
                    .collect::<Vec<_>>(),
            });
            write_or_print(&out, &(serde_json::to_string_pretty(&json)? + "\n"))?;
        }
        Command::Benchmark {
            config,
            out,
            threads,
            seed,
        } => {
            let text =
                fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let mut config = BenchmarkConfig::from_json(&text)?;
            if let Some(t) = threads {
                config.threads = Some(t);
            }
            if let Some(s) = seed {
                config.seed = s;
            }
            let report = run_benchmark::<f64>(&config)?;
            for cell in &report.cells {
                eprintln!(
                    "{} / {}: {:.1}s",
                    cell.dataset, cell.method, cell.runtime_secs
                );
            }
            fs::write(&out, report.to_json())?;
            let table_path = out.with_extension("txt");
            fs::write(&table_path, report.to_table(&config))?;
            eprintln!("report -> {}, {}", out.display(), table_path.display());
        }
        Command::XorDemo {
            n_per_cluster,
            noise_sd,
            seed,
            trainer_seed,
            smooth_c,
            alpha,
            out,
        } => {
            let cfg = XorDemoConfig {
                n_per_cluster,
                noise_sd,
                data_seed: seed,
                trainer_seed,
                smooth_c,
                alpha_tol: alpha,
                ..XorDemoConfig::default()
            };
            let trace = xor_demo::<f64>(&cfg)?;
            let mut file = fs::File::create(&out)?;
            file.write_all(trace.to_csv_string().as_bytes())?;
            for method in [Method::Smooth, Method::BoundedCg, Method::UnboundedCg] {
                eprintln!(
                    "{method}: {} iterations, final test AUC {:.4}, max drop {:.4}",
                    trace.rows_of(method).count(),
                    trace.final_test_auc(method).unwrap_or(f64::NAN),
                    trace.max_test_drop(method, 2),
                );
            }
            eprintln!("trace -> {}", out.display());
        }
    }
    Ok(())
}
