//! Noisy-XOR stability demo: the three column-generation variants trained on
//! one seeded split, traced per iteration for external plotting.

use std::io::Write;

use crate::data::{make_xor, stratified_split, SplitSpec};
use crate::model::Method;
use crate::scalar::Real;
use crate::train::{train_prototype_cg, CgConfig, TrainHistory};

use super::HarnessError;

#[derive(Debug, Clone)]
pub struct XorDemoConfig {
    pub n_per_cluster: usize,
    pub noise_sd: f64,
    pub data_seed: u64,
    pub split_seed: u64,
    pub trainer_seed: u64,
    pub test_fraction: f64,
    /// Smoothing parameter of the smooth variant.
    pub smooth_c: f64,
    /// Pricing threshold of the bounded/unbounded variants.
    pub alpha_tol: f64,
    pub max_iters: Option<usize>,
}

impl Default for XorDemoConfig {
    fn default() -> Self {
        Self {
            n_per_cluster: 50,
            noise_sd: 0.1,
            data_seed: 1,
            split_seed: 7,
            trainer_seed: 40,
            test_fraction: 0.25,
            smooth_c: 0.01,
            alpha_tol: 1e-3,
            max_iters: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct XorTraceRow {
    pub iteration: usize,
    pub method: Method,
    pub train_auc: f64,
    pub test_auc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct XorTrace {
    pub rows: Vec<XorTraceRow>,
}

impl XorTrace {
    pub fn rows_of(&self, method: Method) -> impl Iterator<Item = &XorTraceRow> {
        self.rows.iter().filter(move |r| r.method == method)
    }

    pub fn final_test_auc(&self, method: Method) -> Option<f64> {
        self.rows_of(method).last().map(|r| r.test_auc)
    }

    /// Largest drop between consecutive test-AUC entries of one method,
    /// considering iterations `>= from_t` as the later point.
    pub fn max_test_drop(&self, method: Method, from_t: usize) -> f64 {
        let series: Vec<(usize, f64)> = self.rows_of(method).map(|r| (r.iteration, r.test_auc)).collect();
        let mut max_drop = 0.0f64;
        for w in series.windows(2) {
            if w[1].0 >= from_t {
                max_drop = max_drop.max(w[0].1 - w[1].1);
            }
        }
        max_drop
    }

    /// CSV with columns `iteration,method,train_auc,test_auc`; byte-stable
    /// across reruns of the same config.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<(), HarnessError> {
        writeln!(out, "iteration,method,train_auc,test_auc")?;
        for r in &self.rows {
            writeln!(out, "{},{},{},{}", r.iteration, r.method, r.train_auc, r.test_auc)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to vec");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

fn push_history<T: Real>(rows: &mut Vec<XorTraceRow>, method: Method, history: &TrainHistory<T>) {
    for rec in &history.records {
        rows.push(XorTraceRow {
            iteration: rec.t,
            method,
            train_auc: rec.train_auc.to_f64_lossy(),
            test_auc: rec
                .test_auc
                .expect("demo always scores the test side")
                .to_f64_lossy(),
        });
    }
}

/// Runs the smooth, bounded and unbounded trainers on the same seeded XOR
/// split and returns each full training history.
pub fn xor_histories<T: Real>(
    cfg: &XorDemoConfig,
) -> Result<Vec<(Method, TrainHistory<T>)>, HarnessError> {
    let ds = make_xor::<T>(cfg.n_per_cluster, cfg.noise_sd, cfg.data_seed);
    let spec = SplitSpec::new(cfg.test_fraction, 2, cfg.split_seed)?;
    let (train, test) = stratified_split(&ds, &spec)?;

    let configs = [
        (Method::Smooth, CgConfig::<T>::smooth(T::real(cfg.smooth_c), cfg.trainer_seed)),
        (
            Method::BoundedCg,
            CgConfig::bounded(T::real(cfg.alpha_tol), cfg.trainer_seed),
        ),
        (
            Method::UnboundedCg,
            CgConfig::unbounded(T::real(cfg.alpha_tol), cfg.trainer_seed),
        ),
    ];
    let mut out = Vec::new();
    for (method, mut train_cfg) in configs {
        train_cfg.max_iters = cfg.max_iters;
        let (_, history) = train_prototype_cg(&train, &train_cfg, Some(&test))?;
        out.push((method, history));
    }
    Ok(out)
}

/// Runs the demo and returns the combined per-iteration trace.
pub fn xor_demo<T: Real>(cfg: &XorDemoConfig) -> Result<XorTrace, HarnessError> {
    let mut rows = Vec::new();
    for (method, history) in xor_histories::<T>(cfg)? {
        push_history(&mut rows, method, &history);
    }
    Ok(XorTrace { rows })
}
