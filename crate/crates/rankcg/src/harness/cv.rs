//! Stratified k-fold cross-validation over a parameter grid.

use std::time::Instant;

use crate::data::{kfold, mix_seed, Dataset, SplitSpec};
use crate::lp::SolverOptions;
use crate::metrics::auc;
use crate::model::{Method, TrainedModel};
use crate::scalar::Real;
use crate::train::{train_linear_baseline, train_prototype_cg, BaselineReg, CgConfig};

use super::{GridSpec, HarnessError};

/// Trains one method at one parameter value on the given training set.
pub fn fit_method<T: Real>(
    train: &Dataset<T>,
    method: Method,
    param: f64,
    seed: u64,
) -> Result<TrainedModel<T>, HarnessError> {
    let solver = SolverOptions::default();
    let model = match method {
        Method::Smooth => {
            let cfg = CgConfig::smooth(T::real(param), seed);
            TrainedModel::Prototype(train_prototype_cg(train, &cfg, None)?.0)
        }
        Method::BoundedCg => {
            let cfg = CgConfig::bounded(T::real(param), seed);
            TrainedModel::Prototype(train_prototype_cg(train, &cfg, None)?.0)
        }
        Method::UnboundedCg => {
            let cfg = CgConfig::unbounded(T::real(param), seed);
            TrainedModel::Prototype(train_prototype_cg(train, &cfg, None)?.0)
        }
        Method::L1Ranking => TrainedModel::Linear(
            train_linear_baseline(train, BaselineReg::L1, T::real(param), &solver)?.model,
        ),
        Method::LinfRanking => TrainedModel::Linear(
            train_linear_baseline(train, BaselineReg::Linf, T::real(param), &solver)?.model,
        ),
        Method::L2Ranking => TrainedModel::Linear(
            train_linear_baseline(train, BaselineReg::L2, T::real(param), &solver)?.model,
        ),
    };
    Ok(model)
}

/// Grid search result: the winning value and the mean validation AUC per
/// grid value.
#[derive(Debug, Clone)]
pub struct CvOutcome {
    pub best: f64,
    /// `(value, mean validation AUC)`, in grid order.
    pub table: Vec<(f64, f64)>,
}

/// Mean validation AUC of every grid value over stratified k folds; the best
/// value is the argmax, with ties resolved to the smallest value.
/// Deterministic in `(train, grid, k, seed)`.
pub fn cross_validate<T: Real>(
    train: &Dataset<T>,
    method: Method,
    grid: &GridSpec,
    k: usize,
    seed: u64,
) -> Result<CvOutcome, HarnessError> {
    cross_validate_with_deadline(train, method, grid, k, seed, None)
}

pub(super) fn cross_validate_with_deadline<T: Real>(
    train: &Dataset<T>,
    method: Method,
    grid: &GridSpec,
    k: usize,
    seed: u64,
    deadline: Option<Instant>,
) -> Result<CvOutcome, HarnessError> {
    if grid.values.is_empty() {
        return Err(HarnessError::BadGrid("empty grid".to_string()));
    }
    let spec = SplitSpec::new(0.5, k, seed)?;
    let folds = kfold(train, &spec)?;
    let mut sums = vec![0.0f64; grid.values.len()];
    for (fold_no, (train_idx, val_idx)) in folds.iter().enumerate() {
        let fold_train = train.subset(train_idx, format!("{}-cv{fold_no}", train.name()));
        let fold_val = train.subset(val_idx, format!("{}-val{fold_no}", train.name()));
        let fold_seed = mix_seed(seed, fold_no as u64 + 1);
        for (vi, &value) in grid.values.iter().enumerate() {
            if let Some(d) = deadline {
                if Instant::now() > d {
                    return Err(HarnessError::TimedOut);
                }
            }
            let model = fit_method(&fold_train, method, value, fold_seed)?;
            let val_auc = auc(&model.score_pair(&fold_val)?);
            sums[vi] += val_auc.to_f64_lossy();
        }
    }
    let table: Vec<(f64, f64)> = grid
        .values
        .iter()
        .zip(&sums)
        .map(|(&v, &s)| (v, s / k as f64))
        .collect();
    // argmax; ties go to the smallest parameter value (grid is increasing)
    let mut best = table[0];
    for &(v, mean) in &table[1..] {
        if mean > best.1 {
            best = (v, mean);
        }
    }
    Ok(CvOutcome {
        best: best.0,
        table,
    })
}
