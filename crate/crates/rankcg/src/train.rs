//! Training drivers: the column-generation prototype trainers (smoothed,
//! bounded, unbounded) and the three linear ranking baselines on distance
//! features.

use std::time::Instant;

use thiserror::Error;

use crate::data::{random_row_index, Dataset, DataError};
use crate::linalg::{dot, euclidean, Matrix};
use crate::lp::{CertificateReport, SolverOptions};
use crate::master::{solve_master, DistanceColumns, MasterError, MasterKind};
use crate::metrics::{auc, MetricsError, ScorePair};
use crate::model::{LinearDistanceModel, Method, ModelError, ModelMeta, PrototypeModel, TrainedModel};
use crate::pricing::{solve_pricing, AdamConfig, PricingError, PricingProblem};
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("training set must contain both classes")]
    SingleClass,
    #[error(transparent)]
    Master(#[from] MasterError),
    #[error(transparent)]
    Pricing(#[from] PricingError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("non-finite loss during subgradient descent")]
    NonFiniteLoss,
}

/// A new prototype closer than this to an existing one is treated as a
/// duplicate column and its pricing value forced to zero.
const DUPLICATE_RADIUS: f64 = 1e-9;

/// Pricing values at or below this cannot improve the master.
const ZERO_PRICING_TOL: f64 = 1e-9;

/// Column-generation flavor.
#[derive(Debug, Clone)]
pub enum CgMode<T> {
    /// Free weights, L1 penalty `c` on per-iteration weight changes; stops
    /// on the relative change of the training AUC.
    Smooth { c: T },
    /// Weights boxed to [-1, 1]; stops when the pricing value drops below
    /// `alpha_tol`.
    BoundedCg { alpha_tol: T },
    /// The bounded variant with the weight box removed; same stopping rule.
    UnboundedCg { alpha_tol: T },
}

impl<T: Real> CgMode<T> {
    pub fn method(&self) -> Method {
        match self {
            CgMode::Smooth { .. } => Method::Smooth,
            CgMode::BoundedCg { .. } => Method::BoundedCg,
            CgMode::UnboundedCg { .. } => Method::UnboundedCg,
        }
    }

    pub fn param(&self) -> T {
        match self {
            CgMode::Smooth { c } => *c,
            CgMode::BoundedCg { alpha_tol } | CgMode::UnboundedCg { alpha_tol } => *alpha_tol,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CgConfig<T> {
    pub mode: CgMode<T>,
    /// Relative training-AUC change below which the smooth mode stops.
    pub convergence_tol: f64,
    /// Iteration cap; `None` means `min(200, n_train)`.
    pub max_iters: Option<usize>,
    pub seed: u64,
    pub solver: SolverOptions,
    pub adam: AdamConfig,
    /// Memory guard: deterministic subsample of the pair rows. Off by
    /// default and for every acceptance run.
    pub pair_cap: Option<usize>,
}

impl<T: Real> CgConfig<T> {
    pub fn new(mode: CgMode<T>, seed: u64) -> Self {
        Self {
            mode,
            convergence_tol: 0.01,
            max_iters: None,
            seed,
            solver: SolverOptions::default(),
            adam: AdamConfig::default(),
            pair_cap: None,
        }
    }

    pub fn smooth(c: T, seed: u64) -> Self {
        Self::new(CgMode::Smooth { c }, seed)
    }

    pub fn bounded(alpha_tol: T, seed: u64) -> Self {
        Self::new(CgMode::BoundedCg { alpha_tol }, seed)
    }

    pub fn unbounded(alpha_tol: T, seed: u64) -> Self {
        Self::new(CgMode::UnboundedCg { alpha_tol }, seed)
    }
}

/// Why a training run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Relative training-AUC change below tolerance (smooth mode).
    Converged,
    /// Pricing value below the mode's threshold.
    PricingBelowTol,
    /// Pricing produced a duplicate or numerically zero column.
    PricingExhausted,
    IterationCap,
}

/// One row per column-generation iteration, plus solver diagnostics used by
/// the verification suite.
#[derive(Debug, Clone)]
pub struct TrainRecord<T> {
    pub t: usize,
    pub train_auc: T,
    pub test_auc: Option<T>,
    pub master_objective: T,
    pub pricing_value: T,
    pub n_prototypes: usize,
    pub weights: Vec<T>,
    pub wall_secs: f64,
    /// Pricing objective evaluated at the newest prototype after the master
    /// solve; dual feasibility keeps it at zero.
    pub newest_column_residual: T,
    pub pi_min: T,
    pub pi_max: T,
    pub duality_gap: T,
    pub cs_residual: T,
}

#[derive(Debug, Clone)]
pub struct TrainHistory<T> {
    pub records: Vec<TrainRecord<T>>,
    pub stop: StopReason,
}

impl<T: Real> TrainHistory<T> {
    /// Largest drop between consecutive test-AUC entries from iteration
    /// `from_t` on; zero when the trace never drops.
    pub fn max_test_auc_drop(&self, from_t: usize) -> Option<T> {
        let series: Vec<T> = self.records.iter().filter_map(|r| r.test_auc).collect();
        if series.len() != self.records.len() || series.is_empty() {
            return None;
        }
        let mut max_drop = T::zero();
        for (prev, t) in (1..series.len()).map(|i| (i - 1, i)) {
            if self.records[t].t < from_t {
                continue;
            }
            max_drop = max_drop.max(series[prev] - series[t]);
        }
        Some(max_drop)
    }
}

fn train_score_pair<T: Real>(
    train: &Dataset<T>,
    prototypes: &Matrix<T>,
    weights: &[T],
) -> Result<ScorePair<T>, TrainError> {
    let mut scores = vec![T::zero(); train.len()];
    for (row, &w) in prototypes.iter_rows().zip(weights) {
        if w == T::zero() {
            continue;
        }
        for (i, s) in scores.iter_mut().enumerate() {
            *s += w * euclidean(train.row(i), row);
        }
    }
    let pos = train.pos_idx().iter().map(|&i| scores[i]).collect();
    let neg = train.neg_idx().iter().map(|&i| scores[i]).collect();
    Ok(ScorePair::new(pos, neg)?)
}

/// Column-generation training loop. Starts from a seeded random training
/// point, alternates master solves with pricing searches, and appends
/// exactly one prototype per iteration. Returns the final-iteration model
/// with the full per-iteration history. Deterministic in `(train, cfg)`.
pub fn train_prototype_cg<T: Real>(
    train: &Dataset<T>,
    cfg: &CgConfig<T>,
    test: Option<&Dataset<T>>,
) -> Result<(PrototypeModel<T>, TrainHistory<T>), TrainError> {
    if train.pos_idx().is_empty() || train.neg_idx().is_empty() {
        return Err(TrainError::SingleClass);
    }
    let max_iters = cfg.max_iters.unwrap_or_else(|| train.len().min(200)).max(1);
    let started = Instant::now();

    let first = random_row_index(train, cfg.seed);
    let mut next_point = train.row(first).to_vec();

    let mut cols = DistanceColumns::for_dataset(train)?;
    if let Some(cap) = cfg.pair_cap {
        cols.cap_pairs(cap, cfg.seed);
    }
    let mut prototypes: Matrix<T> = Matrix::zeros(0, train.dim());
    let mut w_old: Vec<T> = Vec::new();
    let mut records = Vec::new();
    let mut z_prev = T::real(1e-6);

    let (stop, weights) = loop {
        let t = prototypes.rows() + 1;
        prototypes.push_row(&next_point);
        cols.push_prototype(train, &next_point);

        let kind = match &cfg.mode {
            CgMode::Smooth { c } => MasterKind::Smooth {
                w_old: w_old.clone(),
                c: *c,
            },
            CgMode::BoundedCg { .. } => MasterKind::Bounded,
            CgMode::UnboundedCg { .. } => MasterKind::Unbounded,
        };
        let master = solve_master(&cols, &kind, &cfg.solver)?;
        let weights = master.w.clone();

        let z_t = auc(&train_score_pair(train, &prototypes, &weights)?);
        let test_auc = match test {
            Some(ts) => {
                let model = PrototypeModel::new(
                    prototypes.clone(),
                    weights.clone(),
                    meta_for(cfg, train),
                );
                Some(auc(&TrainedModel::Prototype(model).score_pair(ts)?))
            }
            None => None,
        };

        let pp = PricingProblem::from_duals(train, &cols, &master.pi)?;
        let newest_residual = pp.objective(&next_point)?;
        let run = solve_pricing(&pp, train.features(), &cfg.adam)?;
        let duplicate = prototypes
            .iter_rows()
            .any(|q| euclidean(q, &run.point) <= T::real(DUPLICATE_RADIUS));
        let pricing_value = if duplicate { T::zero() } else { run.value };
        let pi_min = master.pi.iter().fold(T::zero(), |acc, &p| acc.min(p));
        let pi_max = master.pi.iter().fold(T::zero(), |acc, &p| acc.max(p));

        records.push(TrainRecord {
            t,
            train_auc: z_t,
            test_auc,
            master_objective: master.objective,
            pricing_value,
            n_prototypes: prototypes.rows(),
            weights: weights.clone(),
            wall_secs: started.elapsed().as_secs_f64(),
            newest_column_residual: newest_residual,
            pi_min,
            pi_max,
            duality_gap: master.lp_report.duality_gap,
            cs_residual: master.lp_report.complementary_slackness,
        });

        // stopping rules, in the order the modes define them
        match &cfg.mode {
            CgMode::Smooth { .. } => {
                let ratio = (z_prev - z_t).abs() / z_prev;
                if ratio < T::real(cfg.convergence_tol) {
                    break (StopReason::Converged, weights);
                }
                if pricing_value <= T::real(ZERO_PRICING_TOL) {
                    break (StopReason::PricingExhausted, weights);
                }
            }
            CgMode::BoundedCg { alpha_tol } | CgMode::UnboundedCg { alpha_tol } => {
                if pricing_value < *alpha_tol {
                    break (StopReason::PricingBelowTol, weights);
                }
                if pricing_value <= T::real(ZERO_PRICING_TOL) {
                    break (StopReason::PricingExhausted, weights);
                }
            }
        }
        if t >= max_iters {
            break (StopReason::IterationCap, weights);
        }

        z_prev = z_t;
        w_old = weights;
        next_point = run.point;
    };

    let model = PrototypeModel::new(prototypes, weights, meta_for(cfg, train));
    Ok((model, TrainHistory { records, stop }))
}

fn meta_for<T: Real>(cfg: &CgConfig<T>, _train: &Dataset<T>) -> ModelMeta<T> {
    ModelMeta {
        method: cfg.mode.method(),
        param: Some(cfg.mode.param()),
        seed: Some(cfg.seed),
    }
}

/// Regularizer of a linear ranking baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineReg {
    /// `min sum |w| + C sum xi` as an LP.
    L1,
    /// `min sum xi` with `|w| <= C` as an LP.
    Linf,
    /// `min 0.5 w'w + C sum hinge` by deterministic averaged subgradient
    /// descent.
    L2,
}

impl BaselineReg {
    pub fn method(self) -> Method {
        match self {
            BaselineReg::L1 => Method::L1Ranking,
            BaselineReg::Linf => Method::LinfRanking,
            BaselineReg::L2 => Method::L2Ranking,
        }
    }
}

/// Outcome of a baseline fit; LP-based baselines carry their certificate
/// report, the subgradient baseline its objective checkpoints.
#[derive(Debug, Clone)]
pub struct BaselineOutcome<T> {
    pub model: LinearDistanceModel<T>,
    pub objective: T,
    pub lp_report: Option<CertificateReport<T>>,
    /// Objective of the running averaged iterate every 100 steps (L2 only).
    pub checkpoints: Vec<T>,
}

const L2_ITERATIONS: usize = 2000;
const L2_CHECKPOINT_EVERY: usize = 100;

/// Trains one linear baseline on the full dissimilarity representation
/// (one feature per training point).
pub fn train_linear_baseline<T: Real>(
    train: &Dataset<T>,
    reg: BaselineReg,
    c: T,
    solver: &SolverOptions,
) -> Result<BaselineOutcome<T>, TrainError> {
    if train.pos_idx().is_empty() || train.neg_idx().is_empty() {
        return Err(TrainError::SingleClass);
    }
    assert!(c > T::zero(), "baseline C must be positive");
    let meta = ModelMeta {
        method: reg.method(),
        param: Some(c),
        seed: None,
    };

    match reg {
        BaselineReg::L1 | BaselineReg::Linf => {
            let mut cols = DistanceColumns::for_dataset(train)?;
            for i in 0..train.len() {
                cols.push_prototype(train, train.row(i));
            }
            let kind = match reg {
                BaselineReg::L1 => MasterKind::L1 { c },
                _ => MasterKind::BoxedWeights { c },
            };
            let sol = solve_master(&cols, &kind, solver)?;
            Ok(BaselineOutcome {
                model: LinearDistanceModel::new(train.features().clone(), sol.w, meta),
                objective: sol.objective,
                lp_report: Some(sol.lp_report),
                checkpoints: Vec::new(),
            })
        }
        BaselineReg::L2 => l2_subgradient(train, c, meta),
    }
}

/// Full-batch subgradient descent on the L2-regularized pairwise hinge loss
/// with the 1/k step schedule; returns the averaged iterate.
fn l2_subgradient<T: Real>(
    train: &Dataset<T>,
    c: T,
    meta: ModelMeta<T>,
) -> Result<BaselineOutcome<T>, TrainError> {
    let n = train.len();
    let features = crate::data::dissimilarity_matrix(train, train.features())?;
    let pos = train.pos_idx();
    let neg = train.neg_idx();

    let objective = |w: &[T]| -> T {
        let scores: Vec<T> = features.iter_rows().map(|r| dot(r, w)).collect();
        let mut hinge = T::zero();
        for &p in pos {
            for &q in neg {
                hinge += (T::one() - (scores[p] - scores[q])).max(T::zero());
            }
        }
        T::real(0.5) * dot(w, w) + c * hinge
    };

    let mut w = vec![T::zero(); n];
    let mut w_avg = vec![T::zero(); n];
    let mut checkpoints = Vec::with_capacity(L2_ITERATIONS / L2_CHECKPOINT_EVERY);
    for k in 1..=L2_ITERATIONS {
        let scores: Vec<T> = features.iter_rows().map(|r| dot(r, &w)).collect();
        // net violated-pair coefficient per point
        let mut coef = vec![T::zero(); n];
        for &p in pos {
            for &q in neg {
                if scores[p] - scores[q] < T::one() {
                    coef[p] += T::one();
                    coef[q] -= T::one();
                }
            }
        }
        let step = T::one() / T::from_usize(k).unwrap();
        for j in 0..n {
            let mut hinge_grad = T::zero();
            for (i, &ci) in coef.iter().enumerate() {
                if ci != T::zero() {
                    hinge_grad += ci * features.get(i, j);
                }
            }
            let g = w[j] - c * hinge_grad;
            w[j] -= step * g;
            if !w[j].is_finite() {
                return Err(TrainError::NonFiniteLoss);
            }
        }
        let kf = T::from_usize(k).unwrap();
        for j in 0..n {
            w_avg[j] = (w_avg[j] * (kf - T::one()) + w[j]) / kf;
        }
        if k % L2_CHECKPOINT_EVERY == 0 {
            checkpoints.push(objective(&w_avg));
        }
    }

    let objective_final = objective(&w_avg);
    Ok(BaselineOutcome {
        model: LinearDistanceModel::new(train.features().clone(), w_avg, meta),
        objective: objective_final,
        lp_report: None,
        checkpoints,
    })
}
