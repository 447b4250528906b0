//! Variance-based global sensitivity analysis: quasi-random Sobol points,
//! Saltelli's N(2d+2) sampling design, and first-, second- and total-order
//! index estimation from model evaluations.

pub mod benchmarks;
pub mod estimator;
pub mod saltelli;
pub mod sobol;

pub use estimator::{estimate_indices, SensitivityResult};
pub use saltelli::{evaluate_design, saltelli_sample, ModelOutputs, SaltelliDesign};
pub use sobol::{sobol_points, SobolGenerator, MAX_DIMENSION};
