//! Maximum-entropy distribution of classification features.
//!
//! Fits the two-parameter class distribution `(n₀, N̄)` to ranked frequency
//! data, compares it with Zipf, exponential and legacy baselines, and
//! estimates Monte Carlo p-values for the fit error.
#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod baselines;
pub mod dataset;
pub mod error;
pub mod fitting;
pub mod model;
pub mod roots;
pub mod significance;
pub mod studies;
pub mod special;

pub use baselines::{fit_baseline, BaselineConfig, BaselineFit, BaselineMethod};
pub use dataset::Dataset;
pub use error::{Error, Result};
pub use fitting::{fit, preprocess, EmpiricalDistribution, FitConfig, FitResult};
pub use model::{ModelParams, TailTable};
pub use significance::{p_value, SignificanceReport};
pub use special::SeriesConfig;
