//! AUC-maximizing ranking classifiers learned by column generation over
//! prototype distance features.
//!
//! A model scores a point as a weighted sum of Euclidean distances to a set
//! of prototypes. Training alternates between a linear master problem over
//! the current prototypes' weights and a nonconvex pricing search for the
//! prototype whose distance column most violates the master's dual. The
//! smoothed variant additionally penalizes per-iteration weight changes so
//! the test performance moves gradually instead of jumping between vertex
//! solutions. Three linear ranking baselines on the full distance
//! representation are included for comparison, along with the LP machinery
//! (a bounded-variable revised simplex with primal/dual certificates), an
//! experiment harness, and a CLI in the companion binary crate.
//!
//! All numeric code is generic over the [`scalar::Real`] scalar; the
//! `*64` aliases below fix `f64`, which every shipped tool uses.

pub mod data;
pub mod harness;
pub mod linalg;
pub mod lp;
pub mod master;
pub mod metrics;
pub mod model;
pub mod pricing;
pub mod scalar;
pub mod train;

pub use scalar::Real;

/// `f64` aliases for the main types.
pub type Dataset64 = data::Dataset<f64>;
pub type Matrix64 = linalg::Matrix<f64>;
pub type LinearProgram64 = lp::LinearProgram<f64>;
pub type LpSolution64 = lp::LpSolution<f64>;
pub type DistanceColumns64 = master::DistanceColumns<f64>;
pub type MasterSolution64 = master::MasterSolution<f64>;
pub type PricingProblem64 = pricing::PricingProblem<f64>;
pub type PrototypeModel64 = model::PrototypeModel<f64>;
pub type LinearDistanceModel64 = model::LinearDistanceModel<f64>;
pub type TrainedModel64 = model::TrainedModel<f64>;
pub type CgConfig64 = train::CgConfig<f64>;
