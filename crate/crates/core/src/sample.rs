//! Validated lifetime samples, order statistics, normalized spacings and the
//! total-time-on-test transform.

use crate::error::{Error, Result};

/// A validated sample of nonnegative lifetimes, kept in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    mean: f64,
}

/// The sorted sample together with the mean of the raw values.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedSample {
    sorted: Vec<f64>,
    mean: f64,
}

/// Normalized spacings `D_k = (n - k + 1)(X_(k) - X_(k-1))` with `X_(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spacings {
    d: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::EmptyOrSingleton(values.len()));
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteValue { index, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeValue { index, value });
            }
        }
        let sum: f64 = values.iter().sum();
        if sum <= 0.0 {
            return Err(Error::AllZero);
        }
        let mean = sum / values.len() as f64;
        Ok(Sample { values, mean })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; a valid sample has at least two values.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sorted copy of the values. The sort is stable, so tied values keep
    /// their input order.
    pub fn sorted(&self) -> Vec<f64> {
        let mut sorted = self.values.clone();
        sorted.sort_by(f64::total_cmp);
        sorted
    }

    pub fn order_and_space(&self) -> (OrderedSample, Spacings) {
        let sorted = self.sorted();
        let d = spacings_of_sorted(&sorted);
        (
            OrderedSample {
                sorted,
                mean: self.mean,
            },
            Spacings { d },
        )
    }

    /// Barlow's total-time-on-test statistic `sum_{i<n} tau_i / tau_n`.
    pub fn ttt_statistic(&self) -> f64 {
        let (_, spacings) = self.order_and_space();
        let tau = spacings.total_time_on_test();
        let total = tau[tau.len() - 1];
        tau[..tau.len() - 1].iter().map(|t| t / total).sum()
    }
}

impl OrderedSample {
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }
}

impl Spacings {
    pub fn as_slice(&self) -> &[f64] {
        &self.d
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.d.iter().sum()
    }

    /// Cumulative sums `tau_i = D_1 + ... + D_i`.
    pub fn total_time_on_test(&self) -> Vec<f64> {
        self.d
            .iter()
            .scan(0.0, |acc, &d| {
                *acc += d;
                Some(*acc)
            })
            .collect()
    }

    /// Rebuilds the order statistics, `X_(k) = sum_{i<=k} D_i / (n - i + 1)`.
    pub fn reconstruct(&self) -> Vec<f64> {
        let n = self.d.len();
        self.d
            .iter()
            .enumerate()
            .scan(0.0, |acc, (i, &d)| {
                *acc += d / (n - i) as f64;
                Some(*acc)
            })
            .collect()
    }
}

pub(crate) fn spacings_of_sorted(sorted: &[f64]) -> Vec<f64> {
    let n = sorted.len();
    let mut prev = 0.0;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let d = (n - i) as f64 * (x - prev);
            prev = x;
            d
        })
        .collect()
}

pub fn make_sample(values: Vec<f64>) -> Result<Sample> {
    Sample::new(values)
}

pub fn order_and_space(s: &Sample) -> (OrderedSample, Spacings) {
    s.order_and_space()
}

pub fn ttt_statistic(s: &Sample) -> f64 {
    s.ttt_statistic()
}
