//! Exact finite-sample and Monte Carlo null distributions for the generalized
//! Hollander-Proschan test of exponentiality against NBUE alternatives.
//!
//! The statistic is a weighted average of normalized spacings,
//!
//! ```text
//! gamma_j* = sum_k e_k D_k / sum_k D_k,   e_k = (1/j)((n-k+1)/n)^j - 1/(j(j+1))
//! ```
//!
//! and under exponentiality the spacings are i.i.d. exponential, so its law is
//! that of a distinct-weight linear combination of a flat Dirichlet vector.
//! [`exact::ExactNullCdf`] evaluates that law in arbitrary precision,
//! [`montecarlo`] simulates it, and [`tables`] builds critical-value and
//! empirical-size tables from both.

pub mod error;
pub mod exact;
pub mod input;
pub mod montecarlo;
pub mod report;
pub mod sample;
pub mod statistic;
pub mod tables;

mod bigfloat;

pub use error::{Error, Result};
pub use exact::{CdfValue, ExactNullCdf, PrecisionPolicy};
pub use montecarlo::{
    empirical_size, sample_null_statistics, simulated_critical_values, CritSource, CriticalRegion,
    EmpiricalSizeReport, SimConfig,
};
pub use sample::{make_sample, order_and_space, ttt_statistic, OrderedSample, Sample, Spacings};
pub use statistic::{
    coefficients, gamma_star, scale, CoefficientSet, ScaleName, ScaledValue, StatisticVariant,
};
pub use tables::{build_size_table, build_table, CriticalValueTable, Provenance, TablePolicy};
