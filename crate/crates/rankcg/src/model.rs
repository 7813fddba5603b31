//! Trained models and their versioned text serialization.
//!
//! Every model scores a point as a weighted sum of Euclidean distances to a
//! set of reference points: prototype models carry learned prototypes, the
//! linear baselines carry the training set itself.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::Dataset;
use crate::linalg::{euclidean, Matrix};
use crate::metrics::{MetricsError, ScorePair};
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed model file: {0}")]
    Malformed(String),
    #[error("unsupported model version {0:?}")]
    UnsupportedVersion(String),
    #[error("unknown method name {0:?}")]
    UnknownMethod(String),
    #[error("point dimension {got} does not match model dimension {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// The training method a model came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "smooth")]
    Smooth,
    #[serde(rename = "bounded_cg")]
    BoundedCg,
    #[serde(rename = "unbounded_cg")]
    UnboundedCg,
    #[serde(rename = "l1")]
    L1Ranking,
    #[serde(rename = "linf")]
    LinfRanking,
    #[serde(rename = "l2")]
    L2Ranking,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Smooth,
        Method::BoundedCg,
        Method::UnboundedCg,
        Method::L1Ranking,
        Method::LinfRanking,
        Method::L2Ranking,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Smooth => "smooth",
            Method::BoundedCg => "bounded_cg",
            Method::UnboundedCg => "unbounded_cg",
            Method::L1Ranking => "l1",
            Method::LinfRanking => "linf",
            Method::L2Ranking => "l2",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "smooth" => Ok(Method::Smooth),
            "bounded_cg" => Ok(Method::BoundedCg),
            "unbounded_cg" => Ok(Method::UnboundedCg),
            "l1" => Ok(Method::L1Ranking),
            "linf" => Ok(Method::LinfRanking),
            "l2" => Ok(Method::L2Ranking),
            other => Err(ModelError::UnknownMethod(other.to_string())),
        }
    }
}

/// Training provenance kept with a model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelMeta<T> {
    pub method: Method,
    /// The method's complexity parameter (C or alpha), when it has one.
    pub param: Option<T>,
    /// RNG seed of the training run, when one was used.
    pub seed: Option<u64>,
}

fn score_against<T: Real>(points: &Matrix<T>, weights: &[T], x: &[T]) -> T {
    let mut acc = T::zero();
    for (row, &w) in points.iter_rows().zip(weights) {
        if w != T::zero() {
            acc += w * euclidean(row, x);
        }
    }
    acc
}

/// Prototype model: learned prototype points and one weight per prototype.
#[derive(Debug, Clone)]
pub struct PrototypeModel<T> {
    prototypes: Matrix<T>,
    weights: Vec<T>,
    meta: ModelMeta<T>,
}

impl<T: Real> PrototypeModel<T> {
    pub fn new(prototypes: Matrix<T>, weights: Vec<T>, meta: ModelMeta<T>) -> Self {
        assert_eq!(prototypes.rows(), weights.len(), "one weight per prototype");
        assert!(!weights.is_empty(), "model needs at least one prototype");
        assert!(
            weights.iter().all(|w| w.is_finite())
                && prototypes.data().iter().all(|v| v.is_finite()),
            "model entries must be finite"
        );
        Self {
            prototypes,
            weights,
            meta,
        }
    }

    pub fn dim(&self) -> usize {
        self.prototypes.cols()
    }

    pub fn n_prototypes(&self) -> usize {
        self.prototypes.rows()
    }

    pub fn prototypes(&self) -> &Matrix<T> {
        &self.prototypes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn meta(&self) -> &ModelMeta<T> {
        &self.meta
    }

    pub fn score(&self, x: &[T]) -> Result<T, ModelError> {
        if x.len() != self.dim() {
            return Err(ModelError::DimensionMismatch {
                got: x.len(),
                want: self.dim(),
            });
        }
        Ok(score_against(&self.prototypes, &self.weights, x))
    }
}

/// Distance-feature linear model: the references are training points.
#[derive(Debug, Clone)]
pub struct LinearDistanceModel<T> {
    references: Matrix<T>,
    weights: Vec<T>,
    meta: ModelMeta<T>,
}

impl<T: Real> LinearDistanceModel<T> {
    pub fn new(references: Matrix<T>, weights: Vec<T>, meta: ModelMeta<T>) -> Self {
        assert_eq!(references.rows(), weights.len(), "one weight per reference");
        Self {
            references,
            weights,
            meta,
        }
    }

    pub fn dim(&self) -> usize {
        self.references.cols()
    }

    pub fn references(&self) -> &Matrix<T> {
        &self.references
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn meta(&self) -> &ModelMeta<T> {
        &self.meta
    }

    pub fn score(&self, x: &[T]) -> Result<T, ModelError> {
        if x.len() != self.dim() {
            return Err(ModelError::DimensionMismatch {
                got: x.len(),
                want: self.dim(),
            });
        }
        Ok(score_against(&self.references, &self.weights, x))
    }
}

/// Either trained model behind one scoring interface.
#[derive(Debug, Clone)]
pub enum TrainedModel<T> {
    Prototype(PrototypeModel<T>),
    Linear(LinearDistanceModel<T>),
}

impl<T: Real> TrainedModel<T> {
    pub fn score(&self, x: &[T]) -> Result<T, ModelError> {
        match self {
            TrainedModel::Prototype(m) => m.score(x),
            TrainedModel::Linear(m) => m.score(x),
        }
    }

    pub fn score_rows(&self, rows: &Matrix<T>) -> Result<Vec<T>, ModelError> {
        rows.iter_rows().map(|r| self.score(r)).collect()
    }

    pub fn weights(&self) -> &[T] {
        match self {
            TrainedModel::Prototype(m) => m.weights(),
            TrainedModel::Linear(m) => m.weights(),
        }
    }

    pub fn meta(&self) -> &ModelMeta<T> {
        match self {
            TrainedModel::Prototype(m) => m.meta(),
            TrainedModel::Linear(m) => m.meta(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TrainedModel::Prototype(m) => m.dim(),
            TrainedModel::Linear(m) => m.dim(),
        }
    }

    fn points(&self) -> &Matrix<T> {
        match self {
            TrainedModel::Prototype(m) => &m.prototypes,
            TrainedModel::Linear(m) => &m.references,
        }
    }

    /// Scores a dataset and splits the result by class.
    pub fn score_pair(&self, ds: &Dataset<T>) -> Result<ScorePair<T>, ModelError> {
        let scores = self.score_rows(ds.features())?;
        let pos = ds.pos_idx().iter().map(|&i| scores[i]).collect();
        let neg = ds.neg_idx().iter().map(|&i| scores[i]).collect();
        Ok(ScorePair::new(pos, neg)?)
    }
}

const MODEL_HEADER: &str = "rankcg-model v1";

fn fmt_value<T: Real>(v: T) -> String {
    // 17 significant digits: exact round trip for f64
    format!("{:.16e}", v)
}

/// Serializes a model to the versioned text format. Values carry 17
/// significant digits, so save/load round-trips exactly.
pub fn model_to_string<T: Real>(model: &TrainedModel<T>) -> String {
    let meta = model.meta();
    let points = model.points();
    let mut out = String::new();
    let _ = writeln!(out, "{MODEL_HEADER}");
    let _ = writeln!(out, "kind {}", match model {
        TrainedModel::Prototype(_) => "prototype",
        TrainedModel::Linear(_) => "linear",
    });
    let _ = writeln!(out, "mode {}", meta.method.name());
    let _ = writeln!(out, "dim {}", model.dim());
    match meta.param {
        Some(p) => {
            let _ = writeln!(out, "param {}", fmt_value(p));
        }
        None => {
            let _ = writeln!(out, "param none");
        }
    }
    match meta.seed {
        Some(s) => {
            let _ = writeln!(out, "seed {s}");
        }
        None => {
            let _ = writeln!(out, "seed none");
        }
    }
    let _ = writeln!(out, "points {}", points.rows());
    for row in points.iter_rows() {
        let fields: Vec<String> = row.iter().map(|&v| fmt_value(v)).collect();
        let _ = writeln!(out, "{}", fields.join(" "));
    }
    let _ = writeln!(out, "weights {}", model.weights().len());
    let fields: Vec<String> = model.weights().iter().map(|&v| fmt_value(v)).collect();
    let _ = writeln!(out, "{}", fields.join(" "));
    out
}

pub fn save_model<T: Real>(model: &TrainedModel<T>, path: impl AsRef<Path>) -> Result<(), ModelError> {
    fs::write(path, model_to_string(model))?;
    Ok(())
}

fn parse_values<T: Real>(line: &str, want: usize, what: &str) -> Result<Vec<T>, ModelError> {
    let values: Result<Vec<T>, ModelError> = line
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map(T::real)
                .map_err(|_| ModelError::Malformed(format!("bad {what} value {tok:?}")))
        })
        .collect();
    let values = values?;
    if values.len() != want {
        return Err(ModelError::Malformed(format!(
            "{what} line has {} values, expected {want}",
            values.len()
        )));
    }
    Ok(values)
}

struct LineCursor<'a> {
    lines: std::str::Lines<'a>,
}

impl<'a> LineCursor<'a> {
    fn raw(&mut self, what: &str) -> Result<&'a str, ModelError> {
        self.lines
            .next()
            .ok_or_else(|| ModelError::Malformed(format!("missing {what} line")))
    }

    fn field(&mut self, name: &str) -> Result<String, ModelError> {
        let line = self.raw(name)?;
        line.strip_prefix(name)
            .map(|rest| rest.trim().to_string())
            .ok_or_else(|| ModelError::Malformed(format!("expected {name:?} line, got {line:?}")))
    }
}

pub fn model_from_str<T: Real>(text: &str) -> Result<TrainedModel<T>, ModelError> {
    let mut lines = LineCursor { lines: text.lines() };

    let header = lines.raw("header")?.to_string();
    if header.trim() != MODEL_HEADER {
        return Err(ModelError::UnsupportedVersion(header));
    }
    let kind = lines.field("kind")?;
    let method: Method = lines.field("mode")?.parse()?;
    let dim: usize = lines
        .field("dim")?
        .parse()
        .map_err(|_| ModelError::Malformed("bad dim".into()))?;
    let param_raw = lines.field("param")?;
    let param = if param_raw == "none" {
        None
    } else {
        Some(
            param_raw
                .parse::<f64>()
                .map(T::real)
                .map_err(|_| ModelError::Malformed("bad param".into()))?,
        )
    };
    let seed_raw = lines.field("seed")?;
    let seed = if seed_raw == "none" {
        None
    } else {
        Some(
            seed_raw
                .parse::<u64>()
                .map_err(|_| ModelError::Malformed("bad seed".into()))?,
        )
    };
    let n_points: usize = lines
        .field("points")?
        .parse()
        .map_err(|_| ModelError::Malformed("bad points count".into()))?;
    let mut points = Matrix::zeros(0, dim);
    for _ in 0..n_points {
        let line = lines.raw("point row")?;
        points.push_row(&parse_values::<T>(line, dim, "point")?);
    }
    let n_weights: usize = lines
        .field("weights")?
        .parse()
        .map_err(|_| ModelError::Malformed("bad weights count".into()))?;
    let weights_line = lines.raw("weights")?;
    let weights = parse_values::<T>(weights_line, n_weights, "weight")?;
    if n_weights != n_points {
        return Err(ModelError::Malformed(
            "weights count differs from points count".into(),
        ));
    }

    let meta = ModelMeta { method, param, seed };
    Ok(match kind.as_str() {
        "prototype" => TrainedModel::Prototype(PrototypeModel::new(points, weights, meta)),
        "linear" => TrainedModel::Linear(LinearDistanceModel::new(points, weights, meta)),
        other => return Err(ModelError::Malformed(format!("unknown kind {other:?}"))),
    })
}

pub fn load_model<T: Real>(path: impl AsRef<Path>) -> Result<TrainedModel<T>, ModelError> {
    model_from_str(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_model() -> TrainedModel<f64> {
        let prototypes = Matrix::from_rows(&[vec![0.0, 0.0], vec![1.0, -2.5]]);
        TrainedModel::Prototype(PrototypeModel::new(
            prototypes,
            vec![1.0, -0.123456789012345678],
            ModelMeta {
                method: Method::Smooth,
                param: Some(0.01),
                seed: Some(99),
            },
        ))
    }

    #[test]
    fn score_345() {
        let prototypes = Matrix::from_rows(&[vec![0.0, 0.0]]);
        let m = PrototypeModel::new(
            prototypes,
            vec![1.0],
            ModelMeta {
                method: Method::Smooth,
                param: None,
                seed: None,
            },
        );
        assert_eq!(m.score(&[3.0, 4.0]).unwrap(), 5.0);
    }

    #[test]
    fn zero_weights_score_zero() {
        let prototypes = Matrix::from_rows(&[vec![0.5, 0.5], vec![2.0, 1.0]]);
        let m = PrototypeModel::new(
            prototypes,
            vec![0.0, 0.0],
            ModelMeta {
                method: Method::BoundedCg,
                param: Some(0.001),
                seed: Some(1),
            },
        );
        assert_eq!(m.score(&[10.0, -3.0]).unwrap(), 0.0);
    }

    #[test]
    fn round_trip_is_exact() {
        let model = sample_model();
        let text = model_to_string(&model);
        let back: TrainedModel<f64> = model_from_str(&text).unwrap();
        match (&model, &back) {
            (TrainedModel::Prototype(a), TrainedModel::Prototype(b)) => {
                assert_eq!(a.weights(), b.weights());
                assert_eq!(a.prototypes().data(), b.prototypes().data());
                assert_eq!(a.meta(), b.meta());
            }
            _ => panic!("kind changed in round trip"),
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let model = sample_model();
        assert!(matches!(
            model.score(&[1.0]),
            Err(ModelError::DimensionMismatch { got: 1, want: 2 })
        ));
    }

    #[test]
    fn malformed_file_rejected() {
        assert!(model_from_str::<f64>("not a model").is_err());
        let truncated = "rankcg-model v1\nkind prototype\nmode smooth\n";
        assert!(model_from_str::<f64>(truncated).is_err());
    }

    #[test]
    fn score_matches_distance_matrix_product_oracle() {
        use crate::data::{dissimilarity_matrix, Dataset};
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;

        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut prototypes = Matrix::zeros(0, 4);
        let mut weights = Vec::new();
        for _ in 0..5 {
            let row: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            prototypes.push_row(&row);
            weights.push(rng.random_range(-2.0..2.0));
        }
        let model = PrototypeModel::new(
            prototypes.clone(),
            weights.clone(),
            ModelMeta { method: Method::Smooth, param: None, seed: None },
        );

        // oracle: rows of the query-to-prototype distance matrix times w
        let proto_ds = Dataset::new(
            "protos",
            prototypes,
            vec![1, 1, 1, 1, -1], // labels irrelevant to distances
        )
        .unwrap();
        let mut queries = Matrix::zeros(0, 4);
        for _ in 0..7 {
            let row: Vec<f64> = (0..4).map(|_| rng.random_range(-3.0..3.0)).collect();
            queries.push_row(&row);
        }
        let dist = dissimilarity_matrix(&proto_ds, &queries).unwrap();
        for (i, q) in queries.iter_rows().enumerate() {
            let oracle: f64 = dist.row(i).iter().zip(&weights).map(|(d, w)| d * w).sum();
            let got = model.score(q).unwrap();
            assert!((got - oracle).abs() <= 1e-12);
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
    }
}
