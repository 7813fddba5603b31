//! General linear programs and a dense bounded-variable revised simplex
//! solver returning primal and dual solutions with verifiable certificates.

mod export;
mod simplex;
mod verify;

pub use export::write_lp_text;
pub use simplex::solve;
pub use verify::{verify_certificates, CertificateReport};

use thiserror::Error;

use crate::linalg::Matrix;
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("dimension inconsistency: {0}")]
    Dimension(String),
    #[error("bound pair with lower > upper at variable {0}")]
    BadBounds(usize),
    #[error("non-finite coefficient in problem data")]
    NonFiniteData,
    #[error("solution is not Optimal; certificates undefined")]
    NotOptimal,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Row comparison sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

/// Per-variable bounds; infinities mark absent bounds. Free variables are
/// handled natively, not split into positive parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Real> Bounds<T> {
    pub fn free() -> Self {
        Self {
            lower: T::neg_infinity(),
            upper: T::infinity(),
        }
    }

    pub fn non_negative() -> Self {
        Self {
            lower: T::zero(),
            upper: T::infinity(),
        }
    }

    pub fn range(lower: T, upper: T) -> Self {
        Self { lower, upper }
    }

    pub fn fixed(v: T) -> Self {
        Self { lower: v, upper: v }
    }
}

/// A minimization LP over dense rows:
/// minimize `objective . x` subject to `a x (sense) rhs` and variable bounds.
#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    pub objective: Vec<T>,
    pub a: Matrix<T>,
    pub senses: Vec<RowSense>,
    pub rhs: Vec<T>,
    pub bounds: Vec<Bounds<T>>,
}

impl<T: Real> LinearProgram<T> {
    pub fn n_rows(&self) -> usize {
        self.a.rows()
    }

    pub fn n_vars(&self) -> usize {
        self.a.cols()
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let (m, k) = (self.a.rows(), self.a.cols());
        if self.objective.len() != k {
            return Err(LpError::Dimension(format!(
                "objective has {} entries for {} variables",
                self.objective.len(),
                k
            )));
        }
        if self.rhs.len() != m || self.senses.len() != m {
            return Err(LpError::Dimension(format!(
                "rhs/senses have {}/{} entries for {} rows",
                self.rhs.len(),
                self.senses.len(),
                m
            )));
        }
        if self.bounds.len() != k {
            return Err(LpError::Dimension(format!(
                "bounds have {} entries for {} variables",
                self.bounds.len(),
                k
            )));
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if !(b.lower <= b.upper) {
                return Err(LpError::BadBounds(j));
            }
        }
        let finite = self
            .objective
            .iter()
            .chain(self.rhs.iter())
            .chain(self.a.data().iter())
            .all(|v| v.is_finite());
        if !finite {
            return Err(LpError::NonFiniteData);
        }
        Ok(())
    }
}

/// Outcome classification of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Iteration cap hit or numerical breakdown; diagnostics say which.
    IterationLimit,
}

/// Primal/dual solution. `y` holds one dual per row, with the minimization
/// convention: `y >= 0` on `>=` rows, `y <= 0` on `<=` rows, free on `=`.
#[derive(Debug, Clone)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub objective: T,
    pub iterations: usize,
    pub diagnostics: Option<String>,
}

/// Solver tolerances and the iteration cap.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Primal feasibility tolerance (also used for dual pricing).
    pub tol_feas: f64,
    /// Relative duality-gap tolerance for the internal self-check.
    pub tol_gap: f64,
    /// Smallest pivot magnitude accepted in the ratio test.
    pub tol_pivot: f64,
    /// Iteration cap; `None` means `50 * (rows + vars)`.
    pub max_iters: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol_feas: 1e-9,
            tol_gap: 1e-7,
            tol_pivot: 1e-10,
            max_iters: None,
        }
    }
}
