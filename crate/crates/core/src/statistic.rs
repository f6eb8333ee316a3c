//! Spacing weights, the scale-invariant statistic in both of its published
//! forms, the historical Hollander-Proschan variant and the table scalings.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample::Sample;

/// Weights `e_k = (1/j)((n-k+1)/n)^j - 1/(j(j+1))`, `k = 1..=n`, strictly
/// decreasing from `e_1 = 1/(j+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    n: usize,
    j: f64,
    e: Vec<f64>,
}

impl CoefficientSet {
    pub fn new(n: usize, j: f64) -> Result<Self> {
        validate_nj(n, j)?;
        let e: Vec<f64> = if j == 1.0 {
            // Integer form, exact in binary for every n.
            (1..=n)
                .map(|k| (n as f64 + 2.0 - 2.0 * k as f64) / (2.0 * n as f64))
                .collect()
        } else {
            let offset = 1.0 / (j * (j + 1.0));
            (1..=n)
                .map(|k| {
                    if k == 1 {
                        1.0 / (j + 1.0)
                    } else {
                        (((n - k + 1) as f64) / n as f64).powf(j) / j - offset
                    }
                })
                .collect()
        };
        if let Some(k) = e.windows(2).position(|w| w[0] <= w[1]) {
            return Err(Error::BadParameter(format!(
                "weights e_{} and e_{} coincide in double precision for n={n}, j={j}",
                k + 1,
                k + 2
            )));
        }
        Ok(CoefficientSet { n, j, e })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.e
    }

    /// `(e_n, e_1)`, the range of the statistic.
    pub fn support(&self) -> (f64, f64) {
        (self.e[self.n - 1], self.e[0])
    }

    /// `sum e_k D_k / sum D_k` over the spacings of an already sorted sample.
    fn weighted_spacings(&self, sorted: &[f64]) -> f64 {
        debug_assert_eq!(sorted.len(), self.n);
        let n = self.n;
        let mut prev = 0.0;
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, (&x, &e)) in sorted.iter().zip(&self.e).enumerate() {
            let d = (n - i) as f64 * (x - prev);
            prev = x;
            num += e * d;
            den += d;
        }
        num / den
    }
}

pub(crate) fn validate_nj(n: usize, j: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::BadParameter(format!("n must be >= 2, got {n}")));
    }
    if !(j.is_finite() && j > 0.0) {
        return Err(Error::BadParameter(format!("j must be positive, got {j}")));
    }
    Ok(())
}

pub fn coefficients(n: usize, j: f64) -> Result<CoefficientSet> {
    CoefficientSet::new(n, j)
}

/// Which statistic to compute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatisticVariant {
    /// `gamma_j*`, for any real `j > 0`.
    Generalized(f64),
    /// Hollander and Proschan's published `K*`, weights `3n/2 - 2k + 1/2`.
    /// Equals `gamma_1* - 1/(2n)`.
    Hp1975,
}

impl StatisticVariant {
    pub fn validate(&self) -> Result<()> {
        match *self {
            StatisticVariant::Generalized(j) => validate_nj(2, j),
            StatisticVariant::Hp1975 => Ok(()),
        }
    }

    /// The `j` of the weights whose law this statistic follows (up to a shift).
    pub fn weight_exponent(&self) -> f64 {
        match *self {
            StatisticVariant::Generalized(j) => j,
            StatisticVariant::Hp1975 => 1.0,
        }
    }

    /// Constant added to `gamma_j*` to obtain this statistic.
    pub fn shift(&self, n: usize) -> f64 {
        match self {
            StatisticVariant::Generalized(_) => 0.0,
            StatisticVariant::Hp1975 => -0.5 / n as f64,
        }
    }
}

impl fmt::Display for StatisticVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatisticVariant::Generalized(j) => write!(f, "gamma_{j}*"),
            StatisticVariant::Hp1975 => f.write_str("hp1975"),
        }
    }
}

/// A statistic prepared for repeated evaluation at a fixed `n`.
#[derive(Debug, Clone)]
pub struct Statistic {
    variant: StatisticVariant,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Spacings(CoefficientSet),
    /// Order-statistic weights `(3n/2 - 2k + 1/2) / n`.
    Hp1975(Vec<f64>),
}

impl Statistic {
    pub fn new(n: usize, variant: StatisticVariant) -> Result<Self> {
        let kind = match variant {
            StatisticVariant::Generalized(j) => Kind::Spacings(CoefficientSet::new(n, j)?),
            StatisticVariant::Hp1975 => {
                validate_nj(n, 1.0)?;
                let nf = n as f64;
                Kind::Hp1975(
                    (1..=n)
                        .map(|k| (1.5 * nf - 2.0 * k as f64 + 0.5) / nf)
                        .collect(),
                )
            }
        };
        Ok(Statistic { variant, kind })
    }

    pub fn variant(&self) -> StatisticVariant {
        self.variant
    }

    pub fn n(&self) -> usize {
        match &self.kind {
            Kind::Spacings(c) => c.n,
            Kind::Hp1975(w) => w.len(),
        }
    }

    /// Evaluates on a nondecreasing slice of length `n` with positive sum.
    pub fn evaluate_sorted(&self, sorted: &[f64]) -> f64 {
        match &self.kind {
            Kind::Spacings(c) => c.weighted_spacings(sorted),
            Kind::Hp1975(w) => {
                let num: f64 = sorted.iter().zip(w).map(|(x, w)| x * w).sum();
                let total: f64 = sorted.iter().sum();
                num / total
            }
        }
    }
}

/// The statistic of `s`; for the generalized variant through the spacings
/// form `sum e_k D_k / sum D_k`.
pub fn gamma_star(s: &Sample, variant: StatisticVariant) -> Result<f64> {
    let stat = Statistic::new(s.len(), variant)?;
    Ok(stat.evaluate_sorted(&s.sorted()))
}

/// `gamma_j(F_n) / mean` computed directly from the order statistics:
///
/// ```text
/// gamma_j(F_n) = sum_k X_(k) [ (1/j){((n-k+1)/n)^(j+1) - ((n-k)/n)^(j+1)} - 1/(j(j+1)n) ]
/// ```
pub fn gamma_star_order_form(s: &Sample, j: f64) -> Result<f64> {
    let n = s.len();
    validate_nj(n, j)?;
    let nf = n as f64;
    let offset = 1.0 / (j * (j + 1.0) * nf);
    let gamma: f64 = s
        .sorted()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let k = i + 1;
            let hi = ((n - k + 1) as f64 / nf).powf(j + 1.0);
            let lo = ((n - k) as f64 / nf).powf(j + 1.0);
            x * ((hi - lo) / j - offset)
        })
        .sum();
    Ok(gamma / s.mean())
}

/// Multipliers applied to the raw statistic before tabulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleName {
    None,
    /// `1.25 sqrt(1.5 n)`, used for `j = 0.25`.
    PaperJQuarter,
    /// `sqrt(12 n)`, used for `j = 1` and the hp1975 variant.
    PaperJOne,
    /// `c sqrt(n)` for a user-supplied `c > 0`.
    User(f64),
}

impl ScaleName {
    /// The named scale published for `variant`, if there is one.
    pub fn paper_for(variant: StatisticVariant) -> Result<Self> {
        match variant {
            StatisticVariant::Generalized(0.25) => Ok(ScaleName::PaperJQuarter),
            StatisticVariant::Generalized(1.0) | StatisticVariant::Hp1975 => {
                Ok(ScaleName::PaperJOne)
            }
            StatisticVariant::Generalized(j) => Err(Error::UnknownScale(format!(
                "paper (no published scale for j={j}; use none or user:<c>)"
            ))),
        }
    }

    pub fn factor(&self, n: usize) -> Result<f64> {
        let nf = n as f64;
        match *self {
            ScaleName::None => Ok(1.0),
            ScaleName::PaperJQuarter => Ok(1.25 * (1.5 * nf).sqrt()),
            ScaleName::PaperJOne => Ok((12.0 * nf).sqrt()),
            ScaleName::User(c) if c.is_finite() && c > 0.0 => Ok(c * nf.sqrt()),
            ScaleName::User(c) => Err(Error::NonpositiveUserConstant(c)),
        }
    }

    /// Rejects scales that are not defined for `variant`.
    pub fn check_variant(&self, variant: StatisticVariant) -> Result<()> {
        match (variant, self) {
            (StatisticVariant::Hp1975, ScaleName::None | ScaleName::PaperJOne) => Ok(()),
            (StatisticVariant::Hp1975, other) => Err(Error::BadParameter(format!(
                "hp1975 is only defined unscaled or with sqrt(12n), not {other}"
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ScaleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScaleName::None => f.write_str("none"),
            ScaleName::PaperJQuarter => f.write_str("paper-j-quarter"),
            ScaleName::PaperJOne => f.write_str("paper-j-one"),
            ScaleName::User(c) => write!(f, "user:{c}"),
        }
    }
}

impl FromStr for ScaleName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ScaleName::None),
            "paper-j-quarter" => Ok(ScaleName::PaperJQuarter),
            "paper-j-one" => Ok(ScaleName::PaperJOne),
            _ => {
                let c = s
                    .strip_prefix("user:")
                    .and_then(|c| c.parse::<f64>().ok())
                    .ok_or_else(|| Error::UnknownScale(s.to_string()))?;
                if c.is_finite() && c > 0.0 {
                    Ok(ScaleName::User(c))
                } else {
                    Err(Error::NonpositiveUserConstant(c))
                }
            }
        }
    }
}

impl Serialize for ScaleName {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ScaleName {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledValue {
    pub raw: f64,
    pub scaled: f64,
    pub scale_factor: f64,
    pub scale_name: ScaleName,
}

pub fn scale(value: f64, n: usize, scale_name: ScaleName) -> Result<ScaledValue> {
    if n < 2 {
        return Err(Error::BadParameter(format!("n must be >= 2, got {n}")));
    }
    let scale_factor = scale_name.factor(n)?;
    Ok(ScaledValue {
        raw: value,
        scaled: scale_factor * value,
        scale_factor,
        scale_name,
    })
}
