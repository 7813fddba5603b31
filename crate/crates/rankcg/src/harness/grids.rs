//! Complexity-parameter grids searched by cross-validation.

use crate::model::Method;

use super::HarnessError;

/// One method's tuning grid.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub method: Method,
    pub param_name: &'static str,
    pub values: Vec<f64>,
}

impl GridSpec {
    pub fn new(method: Method, param_name: &'static str, values: Vec<f64>) -> Result<Self, HarnessError> {
        if values.is_empty() {
            return Err(HarnessError::BadGrid("empty grid".to_string()));
        }
        if !values.windows(2).all(|w| w[0] < w[1]) {
            return Err(HarnessError::BadGrid(
                "grid values must be strictly increasing".to_string(),
            ));
        }
        Ok(Self {
            method,
            param_name,
            values,
        })
    }
}

/// Smoothing-parameter grid: thirteen values spanning [1e-6, 1].
const SMOOTH_C: [f64; 13] = [
    1e-6, 5e-6, 1e-5, 5e-5, 1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 5e-2, 1e-1, 5e-1, 1.0,
];

/// Convergence-parameter grid of the bounded/unbounded trainers.
const CG_ALPHA: [f64; 13] = [
    1e-5, 5e-5, 1e-4, 2.5e-4, 5e-4, 7.5e-4, 1e-3, 2.5e-3, 5e-3, 7.5e-3, 1e-2, 2.5e-2, 5e-2,
];

/// Baseline cost grid, 1-5 pattern from 1e-3 to 5e3.
const BASELINE_C: [f64; 14] = [
    1e-3, 5e-3, 1e-2, 5e-2, 1e-1, 5e-1, 1.0, 5.0, 10.0, 50.0, 100.0, 500.0, 1000.0, 5000.0,
];

/// The grid a method is tuned over by default.
pub fn default_grid(method: Method) -> GridSpec {
    let (name, values): (&'static str, &[f64]) = match method {
        Method::Smooth => ("C", &SMOOTH_C),
        Method::BoundedCg | Method::UnboundedCg => ("alpha", &CG_ALPHA),
        Method::L1Ranking | Method::LinfRanking | Method::L2Ranking => ("C", &BASELINE_C),
    };
    GridSpec::new(method, name, values.to_vec()).expect("built-in grids are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_grid_has_thirteen_entries() {
        assert_eq!(default_grid(Method::Smooth).values.len(), 13);
    }

    #[test]
    fn alpha_grid_has_thirteen_entries() {
        assert_eq!(default_grid(Method::BoundedCg).values.len(), 13);
    }

    #[test]
    fn grids_strictly_increase() {
        for m in Method::ALL {
            let g = default_grid(m);
            assert!(g.values.windows(2).all(|w| w[0] < w[1]), "{m}");
        }
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(GridSpec::new(Method::Smooth, "C", vec![]).is_err());
        assert!(GridSpec::new(Method::Smooth, "C", vec![0.1, 0.1]).is_err());
        assert!(GridSpec::new(Method::Smooth, "C", vec![0.2, 0.1]).is_err());
    }
}
