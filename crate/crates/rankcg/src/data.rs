//! Dataset representation and ingestion: CSV and KEEL loaders, stratified
//! splitting, k-fold construction, the noisy-XOR generator, and distance
//! (dissimilarity) feature construction.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::linalg::{euclidean, Matrix};
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("empty file: {0}")]
    EmptyFile(String),
    #[error("label column {0:?} not found")]
    MissingLabelColumn(String),
    #[error("non-numeric feature {value:?} at row {row}, column {col}")]
    NonNumericFeature { row: usize, col: usize, value: String },
    #[error("non-finite feature at row {row}, column {col}")]
    NonFiniteFeature { row: usize, col: usize },
    #[error("expected exactly two label values, found {0}")]
    NotTwoClasses(usize),
    #[error("row {row} has {got} fields, expected {want}")]
    ArityMismatch { row: usize, got: usize, want: usize },
    #[error("missing @data section")]
    MissingDataSection,
    #[error("unknown class value {0:?}; pass an explicit positive label")]
    UnknownClassValue(String),
    #[error("class with fewer than {min} samples cannot be split")]
    ClassTooSmall { min: usize },
    #[error("test fraction must lie in (0, 1), got {0}")]
    BadTestFraction(f64),
    #[error("k_folds must be at least 2, got {0}")]
    BadKFolds(usize),
    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dataset has no rows")]
    Empty,
}

/// Split parameters: one holdout fraction, a fold count, and the seed that
/// makes every split a pure function of its inputs.
#[derive(Debug, Clone, Copy)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub k_folds: usize,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(test_fraction: f64, k_folds: usize, seed: u64) -> Result<Self, DataError> {
        if !(test_fraction > 0.0 && test_fraction < 1.0) {
            return Err(DataError::BadTestFraction(test_fraction));
        }
        if k_folds < 2 {
            return Err(DataError::BadKFolds(k_folds));
        }
        Ok(Self { test_fraction, k_folds, seed })
    }
}

/// Labeled feature matrix with cached positive/negative index sets.
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct Dataset<T> {
    name: String,
    features: Matrix<T>,
    labels: Vec<i8>,
    pos_idx: Vec<usize>,
    neg_idx: Vec<usize>,
}

impl<T: Real> Dataset<T> {
    /// Validates finiteness and label values, and builds the index sets.
    pub fn new(name: impl Into<String>, features: Matrix<T>, labels: Vec<i8>) -> Result<Self, DataError> {
        let n = features.rows();
        if n == 0 {
            return Err(DataError::Empty);
        }
        assert_eq!(labels.len(), n, "labels length must match rows");
        for (i, row) in features.iter_rows().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(DataError::NonFiniteFeature { row: i, col: j });
                }
            }
        }
        let mut pos_idx = Vec::new();
        let mut neg_idx = Vec::new();
        for (i, &l) in labels.iter().enumerate() {
            match l {
                1 => pos_idx.push(i),
                -1 => neg_idx.push(i),
                other => panic!("label must be +1 or -1, got {other}"),
            }
        }
        Ok(Self {
            name: name.into(),
            features,
            labels,
            pos_idx,
            neg_idx,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.features.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &Matrix<T> {
        &self.features
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn pos_idx(&self) -> &[usize] {
        &self.pos_idx
    }

    pub fn neg_idx(&self) -> &[usize] {
        &self.neg_idx
    }

    pub fn row(&self, i: usize) -> &[T] {
        self.features.row(i)
    }

    /// New dataset from a list of row indices (kept in the given order).
    pub fn subset(&self, idx: &[usize], name: impl Into<String>) -> Self {
        let mut features = Matrix::zeros(0, self.dim());
        let mut labels = Vec::with_capacity(idx.len());
        for &i in idx {
            features.push_row(self.features.row(i));
            labels.push(self.labels[i]);
        }
        Dataset::new(name, features, labels).expect("subset of a valid dataset is valid")
    }
}

/// How to find the label column in a CSV header.
#[derive(Debug, Clone)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

/// Loads a two-class CSV file (one header row, comma separated). Rows whose
/// label equals `positive_label` become +1, the others -1; feature column
/// order is preserved.
pub fn load_csv<T: Real>(
    path: impl AsRef<Path>,
    label: &LabelColumn,
    positive_label: &str,
) -> Result<Dataset<T>, DataError> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.is_empty() {
        return Err(DataError::EmptyFile(path.display().to_string()));
    }
    let label_idx = match label {
        LabelColumn::Name(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DataError::MissingLabelColumn(name.clone()))?,
        LabelColumn::Index(i) => {
            if *i >= headers.len() {
                return Err(DataError::MissingLabelColumn(i.to_string()));
            }
            *i
        }
    };

    let d = headers.len() - 1;
    let mut features = Matrix::zeros(0, d);
    let mut raw_labels: Vec<String> = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != headers.len() {
            return Err(DataError::ArityMismatch {
                row: row_no,
                got: record.len(),
                want: headers.len(),
            });
        }
        let mut row = Vec::with_capacity(d);
        for (col, field) in record.iter().enumerate() {
            if col == label_idx {
                raw_labels.push(field.trim().to_string());
                continue;
            }
            let value: f64 = field.trim().parse().map_err(|_| DataError::NonNumericFeature {
                row: row_no,
                col,
                value: field.to_string(),
            })?;
            row.push(T::real(value));
        }
        features.push_row(&row);
    }
    if features.rows() == 0 {
        return Err(DataError::EmptyFile(path.display().to_string()));
    }

    let mut distinct: Vec<&str> = raw_labels.iter().map(String::as_str).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() != 2 {
        return Err(DataError::NotTwoClasses(distinct.len()));
    }
    let labels = raw_labels
        .iter()
        .map(|l| if l == positive_label { 1 } else { -1 })
        .collect();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    Dataset::new(name, features, labels)
}

/// Writes a dataset as CSV with synthesized headers `f0..f{d-1},label` and
/// label strings `positive` / `negative`. Feature formatting round-trips
/// exactly through [`load_csv`].
pub fn save_csv<T: Real>(ds: &Dataset<T>, path: impl AsRef<Path>) -> Result<(), DataError> {
    let mut out = File::create(path)?;
    let header: Vec<String> = (0..ds.dim()).map(|j| format!("f{j}")).collect();
    writeln!(out, "{},label", header.join(","))?;
    for (row, &label) in ds.features.iter_rows().zip(ds.labels()) {
        let fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        let tag = if label == 1 { "positive" } else { "negative" };
        writeln!(out, "{},{}", fields.join(","), tag)?;
    }
    Ok(())
}

/// Loads a KEEL-format file: `@`-prefixed header directives, an `@data`
/// sentinel, then comma-separated rows. The class attribute is the one named
/// by `@outputs` (default: the last attribute).
///
/// Class values `positive`/`negative` map to +1/-1; anything else requires
/// the caller to name the positive class via [`load_keel_with_positive`].
pub fn load_keel<T: Real>(path: impl AsRef<Path>) -> Result<Dataset<T>, DataError> {
    load_keel_with_positive(path, None)
}

pub fn load_keel_with_positive<T: Real>(
    path: impl AsRef<Path>,
    positive_label: Option<&str>,
) -> Result<Dataset<T>, DataError> {
    let path = path.as_ref();
    let file = File::open(path)?;
    let reader = BufReader::new(file);

    let mut attributes: Vec<String> = Vec::new();
    let mut relation = String::new();
    let mut output_attr: Option<String> = None;
    let mut in_data = false;
    let mut rows: Vec<Vec<String>> = Vec::new();

    for line in reader.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if !in_data {
            let lower = line.to_ascii_lowercase();
            if lower.starts_with("@relation") {
                relation = line[9..].trim().to_string();
            } else if lower.starts_with("@attribute") {
                // "@attribute name <domain>": the name is the first token
                let rest = line[10..].trim();
                let name = rest
                    .split(|c: char| c.is_whitespace() || c == '{')
                    .next()
                    .unwrap_or("")
                    .to_string();
                attributes.push(name);
            } else if lower.starts_with("@outputs") {
                output_attr = Some(line[8..].trim().trim_end_matches(',').to_string());
            } else if lower.starts_with("@data") {
                in_data = true;
            }
            // @inputs and unknown directives carry no information we need
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
        rows.push(fields);
    }

    if !in_data {
        return Err(DataError::MissingDataSection);
    }
    if rows.is_empty() {
        return Err(DataError::EmptyFile(path.display().to_string()));
    }

    let arity = attributes.len().max(rows[0].len());
    let class_idx = match &output_attr {
        Some(name) => attributes
            .iter()
            .position(|a| a.eq_ignore_ascii_case(name))
            .unwrap_or(arity - 1),
        None => arity - 1,
    };

    let d = arity - 1;
    let mut features = Matrix::zeros(0, d);
    let mut raw_labels = Vec::with_capacity(rows.len());
    for (row_no, fields) in rows.iter().enumerate() {
        if fields.len() != arity {
            return Err(DataError::ArityMismatch {
                row: row_no,
                got: fields.len(),
                want: arity,
            });
        }
        let mut row = Vec::with_capacity(d);
        for (col, field) in fields.iter().enumerate() {
            if col == class_idx {
                raw_labels.push(field.clone());
                continue;
            }
            let value: f64 = field.parse().map_err(|_| DataError::NonNumericFeature {
                row: row_no,
                col,
                value: field.clone(),
            })?;
            row.push(T::real(value));
        }
        features.push_row(&row);
    }

    let mut distinct: Vec<&str> = raw_labels.iter().map(String::as_str).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() != 2 {
        return Err(DataError::NotTwoClasses(distinct.len()));
    }
    let positive: String = match positive_label {
        Some(p) => p.to_string(),
        None => {
            // KEEL imbalanced-set convention: the positive class is coded
            // literally "positive"
            let has_positive = distinct.iter().any(|v| v.eq_ignore_ascii_case("positive"));
            if !has_positive {
                return Err(DataError::UnknownClassValue(distinct.join(", ")));
            }
            distinct
                .iter()
                .find(|v| v.eq_ignore_ascii_case("positive"))
                .unwrap()
                .to_string()
        }
    };
    let labels = raw_labels
        .iter()
        .map(|l| if l.eq_ignore_ascii_case(&positive) { 1 } else { -1 })
        .collect();
    let name = if relation.is_empty() {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".to_string())
    } else {
        relation
    };
    Dataset::new(name, features, labels)
}

fn shuffled_class_indices<T: Real>(ds: &Dataset<T>, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos = ds.pos_idx().to_vec();
    let mut neg = ds.neg_idx().to_vec();
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    (pos, neg)
}

/// Stratified train/test split. The test side takes `ceil(count * fraction)`
/// samples of each class, so the class ratio of each part stays within one
/// sample of the whole. Deterministic in `spec.seed`.
pub fn stratified_split<T: Real>(
    ds: &Dataset<T>,
    spec: &SplitSpec,
) -> Result<(Dataset<T>, Dataset<T>), DataError> {
    if ds.pos_idx().len() < 2 || ds.neg_idx().len() < 2 {
        return Err(DataError::ClassTooSmall { min: 2 });
    }
    let (pos, neg) = shuffled_class_indices(ds, spec.seed);
    let take = |count: usize| -> usize {
        let t = (count as f64 * spec.test_fraction).ceil() as usize;
        t.clamp(1, count - 1)
    };
    let pos_t = take(pos.len());
    let neg_t = take(neg.len());

    let mut test_idx: Vec<usize> = pos[..pos_t].iter().chain(neg[..neg_t].iter()).copied().collect();
    let mut train_idx: Vec<usize> = pos[pos_t..].iter().chain(neg[neg_t..].iter()).copied().collect();
    test_idx.sort_unstable();
    train_idx.sort_unstable();

    let train = ds.subset(&train_idx, format!("{}-train", ds.name()));
    let test = ds.subset(&test_idx, format!("{}-test", ds.name()));
    Ok((train, test))
}

/// Stratified k-fold assignment: each class is shuffled once and dealt
/// round-robin. Returns `(train_idx, val_idx)` per fold; the folds partition
/// all row indices.
pub fn kfold<T: Real>(ds: &Dataset<T>, spec: &SplitSpec) -> Result<Vec<(Vec<usize>, Vec<usize>)>, DataError> {
    let k = spec.k_folds;
    if k < 2 {
        return Err(DataError::BadKFolds(k));
    }
    if ds.pos_idx().len() < k || ds.neg_idx().len() < k {
        return Err(DataError::ClassTooSmall { min: k });
    }
    let (pos, neg) = shuffled_class_indices(ds, spec.seed);
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &idx) in pos.iter().enumerate() {
        folds[i % k].push(idx);
    }
    for (i, &idx) in neg.iter().enumerate() {
        folds[i % k].push(idx);
    }
    let mut out = Vec::with_capacity(k);
    for f in 0..k {
        let mut val: Vec<usize> = folds[f].clone();
        let mut train: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|(g, _)| *g != f)
            .flat_map(|(_, v)| v.iter().copied())
            .collect();
        val.sort_unstable();
        train.sort_unstable();
        out.push((train, val));
    }
    Ok(out)
}

/// Noisy XOR: four isotropic Gaussian clusters on the unit square corners,
/// (0,0) and (1,1) labeled +1, (0,1) and (1,0) labeled -1.
pub fn make_xor<T: Real>(n_per_cluster: usize, noise_sd: f64, seed: u64) -> Dataset<T> {
    assert!(n_per_cluster >= 1, "n_per_cluster must be at least 1");
    assert!(noise_sd >= 0.0, "noise_sd must be non-negative");
    let centers: [([f64; 2], i8); 4] = [
        ([0.0, 0.0], 1),
        ([1.0, 1.0], 1),
        ([0.0, 1.0], -1),
        ([1.0, 0.0], -1),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut features = Matrix::zeros(0, 2);
    let mut labels = Vec::with_capacity(4 * n_per_cluster);
    for (center, label) in centers {
        for _ in 0..n_per_cluster {
            let dx: f64 = normal.sample(&mut rng);
            let dy: f64 = normal.sample(&mut rng);
            let row = [
                T::real(center[0] + noise_sd * dx),
                T::real(center[1] + noise_sd * dy),
            ];
            features.push_row(&row);
            labels.push(label);
        }
    }
    Dataset::new("xor", features, labels).expect("generated dataset is valid")
}

/// Euclidean distance matrix: entry `(i, j)` is the distance from query row
/// `i` to reference row `j`.
pub fn dissimilarity_matrix<T: Real>(
    reference: &Dataset<T>,
    queries: &Matrix<T>,
) -> Result<Matrix<T>, DataError> {
    if queries.cols() != reference.dim() {
        return Err(DataError::DimensionMismatch {
            expected: reference.dim(),
            got: queries.cols(),
        });
    }
    let mut out = Matrix::zeros(0, reference.len());
    let mut row = vec![T::zero(); reference.len()];
    for q in queries.iter_rows() {
        for (j, r) in reference.features().iter_rows().enumerate() {
            row[j] = euclidean(q, r);
        }
        out.push_row(&row);
    }
    Ok(out)
}

/// Per-column min-max transform to [0, 1], fitted on a training set and
/// applied to anything with the same dimension. Constant columns map to 0.
/// Off by default everywhere; exposed behind config flags only.
#[derive(Debug, Clone)]
pub struct MinMaxScaler<T> {
    mins: Vec<T>,
    ranges: Vec<T>,
}

impl<T: Real> MinMaxScaler<T> {
    pub fn fit(train: &Dataset<T>) -> Self {
        let d = train.dim();
        let mut mins = vec![T::infinity(); d];
        let mut maxs = vec![T::neg_infinity(); d];
        for row in train.features().iter_rows() {
            for (j, &v) in row.iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        let ranges = mins.iter().zip(&maxs).map(|(&lo, &hi)| hi - lo).collect();
        Self { mins, ranges }
    }

    pub fn transform(&self, ds: &Dataset<T>) -> Dataset<T> {
        let mut features = Matrix::zeros(0, ds.dim());
        let mut scaled = vec![T::zero(); ds.dim()];
        for row in ds.features().iter_rows() {
            for (j, &v) in row.iter().enumerate() {
                scaled[j] = if self.ranges[j] > T::zero() {
                    (v - self.mins[j]) / self.ranges[j]
                } else {
                    T::zero()
                };
            }
            features.push_row(&scaled);
        }
        Dataset::new(ds.name().to_string(), features, ds.labels().to_vec())
            .expect("scaling preserves validity")
    }
}

/// Deterministic derived seed for sub-tasks (folds, benchmark cells).
pub fn mix_seed(base: u64, salt: u64) -> u64 {
    // splitmix64 step
    let mut z = base ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniformly chosen row index, used to seed the first prototype.
pub fn random_row_index<T: Real>(ds: &Dataset<T>, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.random_range(0..ds.len())
}
