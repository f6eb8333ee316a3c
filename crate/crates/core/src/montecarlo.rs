//! Seeded simulation of the null distribution.
//!
//! Replicate `i` draws its exponentials from ChaCha8 keyed by the run seed
//! with stream number `i`, so results never depend on how replicates are
//! split across worker threads.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statistic::{ScaleName, Statistic, StatisticVariant};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub variant: StatisticVariant,
    pub replications: usize,
    pub seed: u64,
    /// Rate of the simulated exponential lifetimes; the statistic does not
    /// depend on it.
    pub rate: f64,
    /// Worker threads; `None` uses the global rayon pool. Never changes results.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl SimConfig {
    pub fn new(n: usize, variant: StatisticVariant, replications: usize, seed: u64) -> Self {
        SimConfig {
            n,
            variant,
            replications,
            seed,
            rate: 1.0,
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::BadParameter(format!(
                "n must be >= 2, got {}",
                self.n
            )));
        }
        if self.replications == 0 {
            return Err(Error::BadParameter("replications must be >= 1".into()));
        }
        if !(self.rate.is_finite() && self.rate > 0.0) {
            return Err(Error::BadParameter(format!(
                "rate must be positive, got {}",
                self.rate
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::BadParameter("workers must be >= 1".into()));
        }
        self.variant.validate()
    }
}

/// Rejection region in raw (unscaled) statistic units. Rejection is strict:
/// a statistic equal to a critical value is accepted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "sided", rename_all = "snake_case")]
pub enum CriticalRegion {
    Lower { value: f64 },
    Upper { value: f64 },
    TwoSided { lower: f64, upper: f64 },
}

impl CriticalRegion {
    pub fn rejects(&self, stat: f64) -> bool {
        match *self {
            CriticalRegion::Lower { value } => stat < value,
            CriticalRegion::Upper { value } => stat > value,
            CriticalRegion::TwoSided { lower, upper } => stat < lower || stat > upper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CritSource {
    ExactTable,
    ExternalTable,
    Supplied,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSizeReport {
    pub n: usize,
    pub variant: StatisticVariant,
    pub alpha: f64,
    pub crit_source: CritSource,
    pub region: CriticalRegion,
    pub rejections: usize,
    pub replications: usize,
    pub seed: u64,
    pub empirical_size_percent: f64,
}

/// Uniform on (0, 1] from the top 53 bits.
#[inline]
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn run<T, F>(cfg: &SimConfig, per_replicate: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> T + Sync + Send,
{
    cfg.validate()?;
    let stat = Statistic::new(cfg.n, cfg.variant)?;
    let key = ChaCha8Rng::seed_from_u64(cfg.seed).get_seed();
    let n = cfg.n;
    let rate = cfg.rate;
    let job = || {
        (0..cfg.replications as u64)
            .into_par_iter()
            .map_init(
                || vec![0.0f64; n],
                |buf, index| {
                    let mut rng = ChaCha8Rng::from_seed(key);
                    rng.set_stream(index);
                    for x in buf.iter_mut() {
                        *x = -open_unit(&mut rng).ln() / rate;
                    }
                    buf.sort_unstable_by(f64::total_cmp);
                    per_replicate(stat.evaluate_sorted(buf))
                },
            )
            .collect::<Vec<T>>()
    };
    match cfg.workers {
        None => Ok(job()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::BadParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// `replications` draws of the statistic under exponentiality, in replicate
/// order.
pub fn sample_null_statistics(cfg: &SimConfig) -> Result<Vec<f64>> {
    run(cfg, |s| s)
}

/// Index (1-based) of the order statistic used as the empirical
/// `alpha`-quantile of `count` draws: `ceil(alpha * count)`, at least 1.
pub fn quantile_rank(alpha: f64, count: usize) -> usize {
    // Absorb representation error so that e.g. 0.05 * 10^6 counts as 50000.
    let k = (alpha * count as f64 - 1e-9).ceil();
    (k.max(1.0) as usize).min(count)
}

/// Empirical quantiles of already sorted draws.
pub fn empirical_quantiles(sorted: &[f64], alphas: &[f64]) -> Result<Vec<f64>> {
    if sorted.is_empty() {
        return Err(Error::BadParameter("no draws".into()));
    }
    alphas
        .iter()
        .map(|&a| {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::ProbabilityOutOfRange(a));
            }
            Ok(sorted[quantile_rank(a, sorted.len()) - 1])
        })
        .collect()
}

/// Simulated critical values of the scaled statistic, one per `alpha`.
pub fn simulated_critical_values(
    cfg: &SimConfig,
    alphas: &[f64],
    scale: ScaleName,
) -> Result<Vec<f64>> {
    scale.check_variant(cfg.variant)?;
    let factor = scale.factor(cfg.n)?;
    if let Some(&a) = alphas.iter().find(|&&a| !(a > 0.0 && a < 1.0)) {
        return Err(Error::ProbabilityOutOfRange(a));
    }
    let mut draws = sample_null_statistics(cfg)?;
    draws.sort_unstable_by(f64::total_cmp);
    Ok(empirical_quantiles(&draws, alphas)?
        .into_iter()
        .map(|q| q * factor)
        .collect())
}

/// Rejection rate under exponentiality for the given region.
pub fn empirical_size(
    cfg: &SimConfig,
    alpha: f64,
    region: CriticalRegion,
    crit_source: CritSource,
) -> Result<EmpiricalSizeReport> {
    let rejections = run(cfg, |s| region.rejects(s))?
        .into_iter()
        .filter(|&r| r)
        .count();
    Ok(EmpiricalSizeReport {
        n: cfg.n,
        variant: cfg.variant,
        alpha,
        crit_source,
        region,
        rejections,
        replications: cfg.replications,
        seed: cfg.seed,
        empirical_size_percent: 100.0 * rejections as f64 / cfg.replications as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const J1: StatisticVariant = StatisticVariant::Generalized(1.0);

    #[test]
    fn same_seed_same_draws() {
        let cfg = SimConfig::new(6, J1, 500, 11);
        assert_eq!(
            sample_null_statistics(&cfg).unwrap(),
            sample_null_statistics(&cfg).unwrap()
        );
        let other = SimConfig { seed: 12, ..cfg };
        assert_ne!(
            sample_null_statistics(&cfg).unwrap(),
            sample_null_statistics(&other).unwrap()
        );
    }

    #[test]
    fn worker_count_does_not_matter() {
        let base = SimConfig::new(9, StatisticVariant::Generalized(0.25), 2000, 3);
        let one = sample_null_statistics(&SimConfig {
            workers: Some(1),
            ..base
        })
        .unwrap();
        let four = sample_null_statistics(&SimConfig {
            workers: Some(4),
            ..base
        })
        .unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn rate_does_not_matter() {
        let cfg = SimConfig::new(8, J1, 1000, 5);
        let a = sample_null_statistics(&cfg).unwrap();
        let b = sample_null_statistics(&SimConfig { rate: 7.0, ..cfg }).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn quantile_rank_convention() {
        assert_eq!(quantile_rank(0.05, 1_000_000), 50_000);
        assert_eq!(quantile_rank(0.01, 1_000_000), 10_000);
        assert_eq!(quantile_rank(0.99, 100_000), 99_000);
        assert_eq!(quantile_rank(0.001, 10), 1);
        assert_eq!(quantile_rank(0.5, 3), 2);
    }

    #[test]
    fn full_support_rejects_nothing() {
        let cfg = SimConfig::new(5, J1, 5000, 1);
        let region = CriticalRegion::TwoSided {
            lower: -0.3,
            upper: 0.5,
        };
        let r = empirical_size(&cfg, 0.05, region, CritSource::Supplied).unwrap();
        assert_eq!(r.rejections, 0);
        assert_eq!(r.empirical_size_percent, 0.0);
    }

    #[test]
    fn invalid_configs() {
        let cfg = SimConfig::new(1, J1, 10, 0);
        assert!(sample_null_statistics(&cfg).is_err());
        let cfg = SimConfig {
            replications: 0,
            ..SimConfig::new(3, J1, 10, 0)
        };
        assert!(sample_null_statistics(&cfg).is_err());
        let cfg = SimConfig {
            rate: 0.0,
            ..SimConfig::new(3, J1, 10, 0)
        };
        assert!(sample_null_statistics(&cfg).is_err());
        let cfg = SimConfig::new(3, J1, 10, 0);
        assert!(simulated_critical_values(&cfg, &[1.0], ScaleName::None).is_err());
    }
}
