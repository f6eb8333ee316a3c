//! Exact null distribution of the statistic.
//!
//! Under exponentiality the normalized spacings are i.i.d. exponential, so for
//! strictly decreasing weights `e_1 > ... > e_n`
//!
//! ```text
//! P(gamma* <= x) = 1 - sum_{i : x < e_i} prod_{k != i} (e_i - x) / (e_i - e_k)
//! ```
//!
//! The terms alternate in sign and grow like `n^n / (n/2)!^2`, so the sum is
//! evaluated in binary floating point of increasing width until two
//! successive widths agree.

use std::sync::{Arc, Mutex};

use astro_float::{BigFloat, Consts};
use serde::{Deserialize, Serialize};

use crate::bigfloat::{to_f64, RM};
use crate::error::{Error, Result};
use crate::statistic::{validate_nj, CoefficientSet, StatisticVariant};

/// Largest `n` the exact path accepts unless the policy says otherwise.
pub const DEFAULT_EXACT_MAX_N: usize = 100;

/// Bisection stops once the bracket is narrower than this.
pub const QUANTILE_WIDTH_TOL: f64 = 1e-12;
/// Bisection stops once the CDF is this close to the target.
pub const QUANTILE_CDF_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    pub initial_bits: usize,
    pub max_bits: usize,
    pub agreement_tol: f64,
    /// Sample sizes above this are refused; use Monte Carlo instead.
    pub max_n: usize,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            initial_bits: 256,
            max_bits: 16384,
            agreement_tol: 1e-12,
            max_n: DEFAULT_EXACT_MAX_N,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfValue {
    pub p: f64,
    pub achieved_bits: usize,
    pub estimated_abs_error: f64,
}

/// Weights and reciprocal denominators `1 / prod_{k != i}(e_i - e_k)` at one
/// working precision.
struct Level {
    bits: usize,
    weights: Vec<BigFloat>,
    inv_denoms: Vec<BigFloat>,
    /// `-shift`, added to `x` before comparing with the weights.
    offset: BigFloat,
}

/// Exact CDF of `gamma_j*` (or of the hp1975 statistic) at a fixed `n`.
///
/// Immutable apart from a per-precision cache of the `x`-independent parts
/// of the sum, so it can be shared between threads.
pub struct ExactNullCdf {
    coeffs: CoefficientSet,
    variant: StatisticVariant,
    policy: PrecisionPolicy,
    levels: Mutex<Vec<Arc<Level>>>,
}

impl std::fmt::Debug for ExactNullCdf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExactNullCdf")
            .field("n", &self.coeffs.n())
            .field("variant", &self.variant)
            .field("policy", &self.policy)
            .finish()
    }
}

enum Eval {
    /// `x` at or beyond an endpoint of the support.
    Exact(f64),
    Sum(BigFloat),
}

impl ExactNullCdf {
    pub fn new(n: usize, variant: StatisticVariant) -> Result<Self> {
        Self::with_policy(n, variant, PrecisionPolicy::default())
    }

    pub fn with_policy(
        n: usize,
        variant: StatisticVariant,
        policy: PrecisionPolicy,
    ) -> Result<Self> {
        variant.validate()?;
        validate_nj(n, variant.weight_exponent())?;
        if n > policy.max_n {
            return Err(Error::BadParameter(format!(
                "exact distribution is capped at n={}, got n={n}; use Monte Carlo",
                policy.max_n
            )));
        }
        if policy.initial_bits < 64 || policy.max_bits < policy.initial_bits {
            return Err(Error::BadParameter(format!(
                "precision ladder {}..{} bits is invalid",
                policy.initial_bits, policy.max_bits
            )));
        }
        if policy.agreement_tol.is_nan() || policy.agreement_tol <= 0.0 {
            return Err(Error::BadParameter(
                "agreement tolerance must be positive".into(),
            ));
        }
        let coeffs = CoefficientSet::new(n, variant.weight_exponent())?;
        Ok(ExactNullCdf {
            coeffs,
            variant,
            policy,
            levels: Mutex::new(Vec::new()),
        })
    }

    pub fn n(&self) -> usize {
        self.coeffs.n()
    }

    pub fn variant(&self) -> StatisticVariant {
        self.variant
    }

    pub fn policy(&self) -> &PrecisionPolicy {
        &self.policy
    }

    pub fn coefficients(&self) -> &CoefficientSet {
        &self.coeffs
    }

    /// `(e_n, e_1)`, shifted for the hp1975 variant.
    pub fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.coeffs.support();
        let shift = self.variant.shift(self.n());
        (lo + shift, hi + shift)
    }

    pub fn cdf(&self, x: f64) -> Result<CdfValue> {
        if x.is_nan() {
            return Err(Error::BadParameter("cdf argument is NaN".into()));
        }
        let tol = self.policy.agreement_tol;
        let mut bits = self.policy.initial_bits;
        let mut prev = self.eval(bits, x)?;
        loop {
            let next_bits = bits * 2;
            let cur = self.eval(next_bits, x)?;
            let gap = match (&prev, &cur) {
                (Eval::Exact(a), Eval::Exact(b)) => (a - b).abs(),
                (Eval::Sum(a), Eval::Sum(b)) => to_f64(&a.sub(b, next_bits, RM)).abs(),
                (Eval::Exact(a), Eval::Sum(b)) | (Eval::Sum(b), Eval::Exact(a)) => {
                    (a - to_f64(b)).abs()
                }
            };
            if gap <= tol {
                let p = match cur {
                    Eval::Exact(p) => p,
                    Eval::Sum(s) => to_f64(&s),
                };
                return finish(p, next_bits, gap);
            }
            if next_bits * 2 > self.policy.max_bits {
                return Err(Error::PrecisionExhausted {
                    max_bits: next_bits,
                    tol,
                    gap,
                });
            }
            prev = cur;
            bits = next_bits;
        }
    }

    /// One-sided p-values `(P(T <= x), P(T >= x))`.
    pub fn p_values(&self, x: f64) -> Result<(f64, f64)> {
        let c = self.cdf(x)?.p;
        Ok((c, 1.0 - c))
    }

    /// Solves `cdf(x) = p` by bisection on the support.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        let (mut lo, mut hi) = self.support();
        loop {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= QUANTILE_WIDTH_TOL || mid <= lo || mid >= hi {
                return Ok(mid);
            }
            let c = self.cdf(mid)?.p;
            if (c - p).abs() <= QUANTILE_CDF_TOL {
                return Ok(mid);
            }
            if c < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }

    fn level(&self, bits: usize) -> Result<Arc<Level>> {
        let mut levels = self.levels.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(level) = levels.iter().find(|l| l.bits == bits) {
            return Ok(Arc::clone(level));
        }
        let level = Arc::new(self.build_level(bits)?);
        levels.push(Arc::clone(&level));
        Ok(level)
    }

    fn build_level(&self, bits: usize) -> Result<Level> {
        let n = self.n();
        let j = self.coeffs.j();
        let numeric = |what: &str| Error::BadParameter(format!("{what} failed at {bits} bits"));
        let mut cc = Consts::new().map_err(|_| numeric("constant cache"))?;

        let nb = BigFloat::from_u64(n as u64, bits);
        let weights: Vec<BigFloat> = if j == 1.0 {
            let two_n = BigFloat::from_u64(2 * n as u64, bits);
            (1..=n)
                .map(|k| {
                    BigFloat::from_i64(n as i64 + 2 - 2 * k as i64, bits).div(&two_n, bits, RM)
                })
                .collect()
        } else {
            let jb = BigFloat::from_f64(j, bits);
            let one = BigFloat::from_u64(1, bits);
            let offset = one.div(&jb.mul(&jb.add(&one, bits, RM), bits, RM), bits, RM);
            (1..=n)
                .map(|k| {
                    let ratio = BigFloat::from_u64((n - k + 1) as u64, bits).div(&nb, bits, RM);
                    ratio
                        .pow(&jb, bits, RM, &mut cc)
                        .div(&jb, bits, RM)
                        .sub(&offset, bits, RM)
                })
                .collect()
        };
        if weights.iter().any(|w| w.is_nan() || w.is_inf()) {
            return Err(numeric("weight evaluation"));
        }

        let inv_denoms = (0..n)
            .map(|i| {
                let mut prod = BigFloat::from_u64(1, bits);
                for k in (0..n).filter(|&k| k != i) {
                    prod = prod.mul(&weights[i].sub(&weights[k], bits, RM), bits, RM);
                }
                prod.reciprocal(bits, RM)
            })
            .collect();

        let offset = if self.variant.shift(n) == 0.0 {
            BigFloat::from_u64(0, bits)
        } else {
            // hp1975: K* = gamma_1* - 1/(2n), so evaluate gamma_1* at x + 1/(2n).
            BigFloat::from_u64(1, bits).div(
                &nb.mul(&BigFloat::from_u64(2, bits), bits, RM),
                bits,
                RM,
            )
        };

        Ok(Level {
            bits,
            weights,
            inv_denoms,
            offset,
        })
    }

    fn eval(&self, bits: usize, x: f64) -> Result<Eval> {
        let level = self.level(bits)?;
        let n = self.n();
        let xb = BigFloat::from_f64(x, bits).add(&level.offset, bits, RM);

        // Weights are decreasing.
        if xb.cmp(&level.weights[0]).is_some_and(|c| c >= 0) {
            return Ok(Eval::Exact(1.0));
        }
        if xb.cmp(&level.weights[n - 1]).is_some_and(|c| c <= 0) {
            return Ok(Eval::Exact(0.0));
        }
        // Every term is (e_i - x)^(n-1) / prod_{k != i}(e_i - e_k) and all n
        // terms sum to one, so P(T <= x) is either the sum over e_i < x or
        // one minus the sum over e_i > x. Summing the shorter side keeps the
        // far tails free of cancellation against 1.
        let above = level
            .weights
            .iter()
            .take_while(|w| xb.cmp(w).is_some_and(|c| c < 0))
            .count();
        let term = |i: usize| {
            level.weights[i]
                .sub(&xb, bits, RM)
                .powi(n - 1, bits, RM)
                .mul(&level.inv_denoms[i], bits, RM)
        };
        let p = if above <= n - above {
            let upper = (0..above).fold(BigFloat::from_u64(0, bits), |acc, i| {
                acc.add(&term(i), bits, RM)
            });
            BigFloat::from_u64(1, bits).sub(&upper, bits, RM)
        } else {
            (above..n).fold(BigFloat::from_u64(0, bits), |acc, i| {
                acc.add(&term(i), bits, RM)
            })
        };
        if p.is_nan() {
            return Err(Error::BadParameter(format!(
                "cdf evaluation failed at {bits} bits"
            )));
        }
        Ok(Eval::Sum(p))
    }
}

fn finish(p: f64, achieved_bits: usize, estimated_abs_error: f64) -> Result<CdfValue> {
    let slack = estimated_abs_error.max(f64::MIN_POSITIVE);
    let p = if p < 0.0 {
        if -p > slack {
            return Err(Error::CdfOutOfRange {
                value: p,
                error: estimated_abs_error,
            });
        }
        0.0
    } else if p > 1.0 {
        if p - 1.0 > slack {
            return Err(Error::CdfOutOfRange {
                value: p,
                error: estimated_abs_error,
            });
        }
        1.0
    } else {
        p
    };
    Ok(CdfValue {
        p,
        achieved_bits,
        estimated_abs_error,
    })
}

/// Convenience wrapper: `P(gamma_j* <= x)` at `n`.
pub fn exact_cdf(n: usize, variant: StatisticVariant, x: f64) -> Result<CdfValue> {
    ExactNullCdf::new(n, variant)?.cdf(x)
}

/// Convenience wrapper: the `p`-quantile of `gamma_j*` at `n`.
pub fn exact_quantile(n: usize, variant: StatisticVariant, p: f64) -> Result<f64> {
    ExactNullCdf::new(n, variant)?.quantile(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    const J1: StatisticVariant = StatisticVariant::Generalized(1.0);
    const JQ: StatisticVariant = StatisticVariant::Generalized(0.25);

    #[test]
    fn n2_j1_is_uniform() {
        let d = ExactNullCdf::new(2, J1).unwrap();
        assert_eq!(d.support(), (0.0, 0.5));
        assert!((d.cdf(0.25).unwrap().p - 0.5).abs() < 1e-15);
        for i in 0..=50 {
            let x = i as f64 / 100.0;
            assert!((d.cdf(x).unwrap().p - 2.0 * x).abs() < 1e-12, "x={x}");
        }
        assert!((d.quantile(0.05).unwrap() - 0.025).abs() < 1e-10);
    }

    #[test]
    fn outside_support() {
        for &(n, v) in &[
            (2, J1),
            (4, J1),
            (9, JQ),
            (5, StatisticVariant::Generalized(2.0)),
        ] {
            let d = ExactNullCdf::new(n, v).unwrap();
            let (lo, hi) = d.support();
            assert_eq!(hi, 1.0 / (v.weight_exponent() + 1.0));
            assert_eq!(d.cdf(hi).unwrap().p, 1.0);
            assert_eq!(d.cdf(hi + 1.0).unwrap().p, 1.0);
            assert_eq!(d.cdf(lo).unwrap().p, 0.0);
            assert_eq!(d.cdf(lo - 1.0).unwrap().p, 0.0);
        }
        assert_eq!(ExactNullCdf::new(4, J1).unwrap().support(), (-0.25, 0.5));
    }

    #[test]
    fn matches_high_precision_reference() {
        // 80-digit evaluation of the same sum with mpmath.
        let d = ExactNullCdf::new(10, J1).unwrap();
        for &(x, want) in &[
            (-0.3, 2.755_731_922_398_589e-6),
            (-0.1, 0.041_641_865_079_365_08),
            (0.0, 0.284_791_115_520_282_2),
            (0.1, 0.715_208_884_479_717_8),
            (0.3, 0.998_613_866_843_033_5),
        ] {
            let got = d.cdf(x).unwrap();
            assert!((got.p - want).abs() < 1e-13, "x={x}: {} vs {want}", got.p);
            assert!(got.estimated_abs_error <= 1e-12);
        }
        let d = ExactNullCdf::new(25, JQ).unwrap();
        for &(x, want) in &[
            (-1.0, 1.548_468_845_931_103e-13),
            (-0.5, 3.012_286_812_395_675e-5),
            (0.0, 0.297_617_437_836_317_5),
            (0.3, 0.989_288_133_204_400_6),
            (0.6, 0.999_999_999_921_953_8),
        ] {
            let got = d.cdf(x).unwrap().p;
            assert!((got - want).abs() < 1e-12, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn weight_at_x_drops_out() {
        // x = e_2 = 0 for n = 2, j = 1: only the first term survives.
        let d = ExactNullCdf::new(2, J1).unwrap();
        assert_eq!(d.cdf(0.0).unwrap().p, 0.0);
        let d = ExactNullCdf::new(4, J1).unwrap();
        let at = d.cdf(0.25).unwrap().p;
        let near = d.cdf(0.25 - 1e-12).unwrap().p;
        assert!((at - near).abs() < 1e-9);
    }

    #[test]
    fn hp1975_is_shifted_gamma_one() {
        let g = ExactNullCdf::new(7, J1).unwrap();
        let k = ExactNullCdf::new(7, StatisticVariant::Hp1975).unwrap();
        let shift = 1.0 / 14.0;
        assert!((k.support().1 - (0.5 - shift)).abs() < 1e-15);
        for &x in &[-0.3, -0.1, 0.05, 0.2] {
            let a = g.cdf(x).unwrap().p;
            let b = k.cdf(x - shift).unwrap().p;
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn quantile_rejects_bad_probabilities() {
        let d = ExactNullCdf::new(3, J1).unwrap();
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(
                d.quantile(p),
                Err(Error::ProbabilityOutOfRange(_))
            ));
        }
    }

    #[test]
    fn tiny_p_approaches_lower_endpoint() {
        let d = ExactNullCdf::new(6, J1).unwrap();
        let q = d.quantile(1e-15).unwrap();
        assert!((q - d.support().0).abs() < 0.02);
    }

    #[test]
    fn cap_and_policy_are_enforced() {
        assert!(ExactNullCdf::new(101, J1).is_err());
        let policy = PrecisionPolicy {
            max_n: 200,
            ..Default::default()
        };
        assert!(ExactNullCdf::with_policy(101, J1, policy).is_ok());
        let starved = PrecisionPolicy {
            initial_bits: 64,
            max_bits: 128,
            ..Default::default()
        };
        let d = ExactNullCdf::with_policy(80, J1, starved).unwrap();
        assert!(matches!(d.cdf(0.0), Err(Error::PrecisionExhausted { .. })));
    }
}
