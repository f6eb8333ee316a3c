//! Test reports for an observed sample, and number formatting shared by the
//! text outputs.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exact::{ExactNullCdf, PrecisionPolicy};
use crate::montecarlo::{sample_null_statistics, SimConfig};
use crate::sample::Sample;
use crate::statistic::{gamma_star, scale, ScaleName, ScaledValue, StatisticVariant};
use crate::tables::Sidedness;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum PValueMethod {
    Exact { achieved_bits: usize },
    MonteCarlo { replications: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub n: usize,
    pub variant: StatisticVariant,
    pub raw: f64,
    pub scaled: Option<ScaledValue>,
    /// `P(T <= observed)`.
    pub p_lower: f64,
    /// `P(T >= observed)`; small values point toward NBUE.
    pub p_upper: f64,
    pub method: PValueMethod,
    pub alpha: f64,
    pub sidedness: Sidedness,
    pub reject: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestOptions {
    /// Above this sample size p-values come from simulation.
    pub exact_max_n: usize,
    pub replications: usize,
    pub seed: u64,
    pub precision: PrecisionPolicy,
}

impl Default for TestOptions {
    fn default() -> Self {
        TestOptions {
            exact_max_n: crate::exact::DEFAULT_EXACT_MAX_N,
            replications: 100_000,
            seed: 42,
            precision: PrecisionPolicy::default(),
        }
    }
}

pub fn run_test(
    sample: &Sample,
    variant: StatisticVariant,
    scale_name: ScaleName,
    alpha: f64,
    sidedness: Sidedness,
    opts: &TestOptions,
) -> Result<TestReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(crate::Error::ProbabilityOutOfRange(alpha));
    }
    scale_name.check_variant(variant)?;
    let n = sample.len();
    let raw = gamma_star(sample, variant)?;
    let scaled = match scale_name {
        ScaleName::None => None,
        other => Some(scale(raw, n, other)?),
    };

    let (p_lower, p_upper, method) = if n <= opts.exact_max_n {
        let policy = PrecisionPolicy {
            max_n: opts.precision.max_n.max(opts.exact_max_n),
            ..opts.precision
        };
        let dist = ExactNullCdf::with_policy(n, variant, policy)?;
        let c = dist.cdf(raw)?;
        (
            c.p,
            1.0 - c.p,
            PValueMethod::Exact {
                achieved_bits: c.achieved_bits,
            },
        )
    } else {
        let cfg = SimConfig::new(n, variant, opts.replications, opts.seed);
        let draws = sample_null_statistics(&cfg)?;
        let total = draws.len() as f64;
        let below = draws.iter().filter(|&&t| t <= raw).count() as f64;
        let above = draws.iter().filter(|&&t| t >= raw).count() as f64;
        (
            below / total,
            above / total,
            PValueMethod::MonteCarlo {
                replications: opts.replications,
                seed: opts.seed,
            },
        )
    };

    let reject = match sidedness {
        Sidedness::Lower => p_lower < alpha,
        Sidedness::Upper => p_upper < alpha,
        Sidedness::TwoSided => 2.0 * p_lower.min(p_upper) < alpha,
    };
    Ok(TestReport {
        n,
        variant,
        raw,
        scaled,
        p_lower,
        p_upper,
        method,
        alpha,
        sidedness,
        reject,
    })
}

impl TestReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self, digits: usize) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "statistic     {}", self.variant);
        let _ = writeln!(out, "n             {}", self.n);
        let _ = writeln!(out, "raw           {}", format_sig(self.raw, digits));
        if let Some(s) = &self.scaled {
            let _ = writeln!(
                out,
                "scaled        {} ({}, factor {})",
                format_sig(s.scaled, digits),
                s.scale_name,
                format_sig(s.scale_factor, digits)
            );
        }
        let _ = writeln!(out, "p (lower)     {}", format_sig(self.p_lower, digits));
        let _ = writeln!(out, "p (upper)     {}", format_sig(self.p_upper, digits));
        let method = match self.method {
            PValueMethod::Exact { achieved_bits } => format!("exact ({achieved_bits} bits)"),
            PValueMethod::MonteCarlo { replications, seed } => {
                format!("monte-carlo (N={replications}, seed={seed})")
            }
        };
        let _ = writeln!(out, "method        {method}");
        let _ = writeln!(
            out,
            "decision      {} H0 at alpha={} ({})",
            if self.reject { "reject" } else { "retain" },
            self.alpha,
            self.sidedness
        );
        out
    }

    pub fn to_csv(&self, digits: usize) -> String {
        let scaled = self
            .scaled
            .map_or(String::new(), |s| format_sig(s.scaled, digits));
        let method = match self.method {
            PValueMethod::Exact { .. } => "exact".to_string(),
            PValueMethod::MonteCarlo { replications, seed } => {
                format!("monte-carlo:{replications}:{seed}")
            }
        };
        format!(
            "n,variant,raw,scaled,p_lower,p_upper,method,alpha,sided,reject\n{},{},{},{},{},{},{},{},{},{}\n",
            self.n,
            self.variant,
            format_sig(self.raw, digits),
            scaled,
            format_sig(self.p_lower, digits),
            format_sig(self.p_upper, digits),
            method,
            self.alpha,
            self.sidedness,
            self.reject
        )
    }
}

/// `%g`-style formatting with `digits` significant digits and trailing
/// zeros removed.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
