//! Critical-value tables and empirical-size tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ExactNullCdf, PrecisionPolicy};
use crate::montecarlo::{
    empirical_size, simulated_critical_values, CritSource, CriticalRegion, EmpiricalSizeReport,
    SimConfig,
};
use crate::report::format_sig;
use crate::statistic::{ScaleName, StatisticVariant};

pub const DEFAULT_ALPHAS: [f64; 6] = [0.01, 0.05, 0.10, 0.90, 0.95, 0.99];
pub const DEFAULT_SEED: u64 = 20_110_975;

/// `n = 2(1)25(5)100`.
pub fn default_n_list() -> Vec<usize> {
    (2..=25).chain((30..=100).step_by(5)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    Simulated { replications: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub alpha: f64,
    pub value: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub n: usize,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalValueTable {
    pub variant: StatisticVariant,
    pub scale: ScaleName,
    pub alphas: Vec<f64>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TablePolicy {
    /// Rows with `n` up to this use the exact distribution.
    pub exact_max_n: usize,
    pub replications: usize,
    pub seed: u64,
    pub precision: PrecisionPolicy,
    pub workers: Option<usize>,
}

impl Default for TablePolicy {
    fn default() -> Self {
        TablePolicy {
            exact_max_n: 60,
            replications: 1_000_000,
            seed: DEFAULT_SEED,
            precision: PrecisionPolicy::default(),
            workers: None,
        }
    }
}

/// Seed of the simulated row for sample size `n`.
pub fn row_seed(seed: u64, n: usize) -> u64 {
    // splitmix64 finalizer over (seed, n)
    let mut z = seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn validate_grid(n_list: &[usize], alphas: &[f64]) -> Result<()> {
    if n_list.is_empty() || alphas.is_empty() {
        return Err(Error::BadParameter("empty n list or alpha list".into()));
    }
    if let Some(&n) = n_list.iter().find(|&&n| n < 2) {
        return Err(Error::BadParameter(format!("n must be >= 2, got {n}")));
    }
    if let Some(&a) = alphas.iter().find(|&&a| !(a > 0.0 && a < 1.0)) {
        return Err(Error::ProbabilityOutOfRange(a));
    }
    if alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadParameter(
            "alphas must be strictly increasing".into(),
        ));
    }
    Ok(())
}

pub fn build_table(
    variant: StatisticVariant,
    n_list: &[usize],
    alphas: &[f64],
    scale: ScaleName,
    policy: &TablePolicy,
) -> Result<CriticalValueTable> {
    variant.validate()?;
    scale.check_variant(variant)?;
    validate_grid(n_list, alphas)?;

    let exact_rows: Vec<usize> = n_list
        .iter()
        .copied()
        .filter(|&n| n <= policy.exact_max_n)
        .collect();
    let exact_row = |n: usize| -> Result<Row> {
        let dist = ExactNullCdf::with_policy(n, variant, policy.precision)?;
        let factor = scale.factor(n)?;
        let cells = alphas
            .iter()
            .map(|&alpha| {
                Ok(Cell {
                    alpha,
                    value: factor * dist.quantile(alpha)?,
                    provenance: Provenance::Exact,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Row { n, cells })
    };
    let computed: Vec<Row> = match policy.workers {
        Some(1) => exact_rows
            .iter()
            .map(|&n| exact_row(n))
            .collect::<Result<_>>()?,
        _ => exact_rows
            .par_iter()
            .map(|&n| exact_row(n))
            .collect::<Result<_>>()?,
    };
    let mut by_n: BTreeMap<usize, Row> = computed.into_iter().map(|r| (r.n, r)).collect();

    for &n in n_list.iter().filter(|&&n| n > policy.exact_max_n) {
        let seed = row_seed(policy.seed, n);
        let cfg = SimConfig {
            workers: policy.workers,
            ..SimConfig::new(n, variant, policy.replications, seed)
        };
        let values = simulated_critical_values(&cfg, alphas, scale)?;
        let provenance = Provenance::Simulated {
            replications: policy.replications,
            seed,
        };
        let cells = alphas
            .iter()
            .zip(values)
            .map(|(&alpha, value)| Cell {
                alpha,
                value,
                provenance,
            })
            .collect();
        by_n.insert(n, Row { n, cells });
    }

    let rows = n_list
        .iter()
        .map(|n| by_n.get(n).cloned().expect("every n was computed"))
        .collect();
    Ok(CriticalValueTable {
        variant,
        scale,
        alphas: alphas.to_vec(),
        rows,
    })
}

impl CriticalValueTable {
    pub fn row(&self, n: usize) -> Option<&Row> {
        self.rows.iter().find(|r| r.n == n)
    }

    pub fn value(&self, n: usize, alpha: f64) -> Option<f64> {
        self.row(n)?
            .cells
            .iter()
            .find(|c| (c.alpha - alpha).abs() < 1e-12)
            .map(|c| c.value)
    }

    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from("n");
        for a in &self.alphas {
            let _ = write!(out, ",{a}");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{}", row.n);
            for c in &row.cells {
                let _ = write!(out, ",{}", format_sig(c.value, digits));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_markdown(&self, digits: usize) -> String {
        let mut out = format!(
            "Critical values of {} (scale {})\n\n| n |",
            self.variant, self.scale
        );
        for a in &self.alphas {
            let _ = write!(out, " α = {a} |");
        }
        out.push_str(" source |\n|---|");
        for _ in &self.alphas {
            out.push_str("---|");
        }
        out.push_str("---|\n");
        for row in &self.rows {
            let _ = write!(out, "| {} |", row.n);
            for c in &row.cells {
                let _ = write!(out, " {} |", format_sig(c.value, digits));
            }
            let source = match row.cells.first().map(|c| c.provenance) {
                Some(Provenance::Simulated { replications, seed }) => {
                    format!("simulated (N={replications}, seed={seed})")
                }
                _ => "exact".to_string(),
            };
            let _ = writeln!(out, " {source} |");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

/// Percentile points of Barlow's total-time-on-test statistic, read from a
/// `n,alpha,value` CSV. `alpha` is the lower-tail probability of the point,
/// the same convention as the critical-value tables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BarlowTable {
    entries: Vec<(usize, f64, f64)>,
}

impl BarlowTable {
    pub fn parse_csv(text: &str) -> Result<Self> {
        let bad = |line: usize, message: String| Error::ExternalTable { line, message };
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, header)) if header.trim() == "n,alpha,value" => {}
            Some((i, header)) => {
                return Err(bad(
                    i + 1,
                    format!("expected header n,alpha,value, found {header:?}"),
                ))
            }
            None => return Err(bad(1, "empty file".into())),
        }
        let mut entries: Vec<(usize, f64, f64)> = Vec::new();
        for (i, line) in lines {
            let line_no = i + 1;
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(bad(
                    line_no,
                    format!("expected 3 fields, found {}", fields.len()),
                ));
            }
            let n: usize = fields[0]
                .parse()
                .map_err(|_| bad(line_no, format!("bad n {:?}", fields[0])))?;
            let alpha: f64 = fields[1]
                .parse()
                .map_err(|_| bad(line_no, format!("bad alpha {:?}", fields[1])))?;
            let value: f64 = fields[2]
                .parse()
                .map_err(|_| bad(line_no, format!("bad value {:?}", fields[2])))?;
            if n < 2 {
                return Err(bad(line_no, format!("n must be >= 2, got {n}")));
            }
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(bad(
                    line_no,
                    format!("alpha must lie in (0,1), got {alpha}"),
                ));
            }
            if !value.is_finite() {
                return Err(bad(line_no, format!("value must be finite, got {value}")));
            }
            if entries
                .iter()
                .any(|&(m, a, _)| m == n && (a - alpha).abs() < 1e-12)
            {
                return Err(bad(
                    line_no,
                    format!("duplicate entry for n={n}, alpha={alpha}"),
                ));
            }
            entries.push((n, alpha, value));
        }
        Ok(BarlowTable { entries })
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse_csv(&text)
    }

    pub fn get(&self, n: usize, alpha: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|&&(m, a, _)| m == n && (a - alpha).abs() < 1e-12)
            .map(|&(_, _, v)| v)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,alpha,value\n");
        for (n, a, v) in &self.entries {
            let _ = writeln!(out, "{n},{a},{v}");
        }
        out
    }

    pub fn insert(&mut self, n: usize, alpha: f64, value: f64) {
        self.entries
            .retain(|&(m, a, _)| !(m == n && (a - alpha).abs() < 1e-12));
        self.entries.push((n, alpha, value));
    }

    /// Converts a total-time-on-test point `V = n K* + (n-1)/2` to `K*` units.
    pub fn to_k_star(n: usize, v: f64) -> f64 {
        (v - 0.5 * (n as f64 - 1.0)) / n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sidedness {
    Lower,
    Upper,
    TwoSided,
}

impl std::str::FromStr for Sidedness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lower" => Ok(Sidedness::Lower),
            "upper" => Ok(Sidedness::Upper),
            "two-sided" | "two_sided" | "two" => Ok(Sidedness::TwoSided),
            other => Err(Error::BadParameter(format!("unknown sidedness {other:?}"))),
        }
    }
}

impl std::fmt::Display for Sidedness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sidedness::Lower => "lower",
            Sidedness::Upper => "upper",
            Sidedness::TwoSided => "two-sided",
        })
    }
}

/// Rejection region at level `alpha` from a quantile function.
pub fn region_from_quantiles(
    sidedness: Sidedness,
    alpha: f64,
    mut quantile: impl FnMut(f64) -> Result<f64>,
) -> Result<CriticalRegion> {
    Ok(match sidedness {
        Sidedness::Lower => CriticalRegion::Lower {
            value: quantile(alpha)?,
        },
        Sidedness::Upper => CriticalRegion::Upper {
            value: quantile(1.0 - alpha)?,
        },
        Sidedness::TwoSided => CriticalRegion::TwoSided {
            lower: quantile(alpha / 2.0)?,
            upper: quantile(1.0 - alpha / 2.0)?,
        },
    })
}

#[derive(Debug, Clone)]
pub struct SizeTableConfig {
    pub n_list: Vec<usize>,
    pub alpha: f64,
    pub sidedness: Sidedness,
    pub replications: usize,
    pub seed: u64,
    pub barlow: Option<BarlowTable>,
    /// Fail instead of skipping the Barlow columns when no table is given.
    pub require_barlow: bool,
    pub precision: PrecisionPolicy,
    pub workers: Option<usize>,
}

impl Default for SizeTableConfig {
    fn default() -> Self {
        SizeTableConfig {
            n_list: (2..=10).collect(),
            alpha: 0.05,
            sidedness: Sidedness::Upper,
            replications: 100_000,
            seed: 42,
            barlow: None,
            require_barlow: false,
            precision: PrecisionPolicy::default(),
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeRow {
    pub n: usize,
    /// `gamma_1*` against its own exact critical values.
    pub gamma_exact: EmpiricalSizeReport,
    /// `gamma_1*` against Barlow's points converted to `K*` units.
    pub gamma_barlow: Option<EmpiricalSizeReport>,
    /// hp1975 `K*` against Barlow's points.
    pub hp_barlow: Option<EmpiricalSizeReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeTable {
    pub alpha: f64,
    pub sidedness: Sidedness,
    pub replications: usize,
    pub seed: u64,
    pub rows: Vec<SizeRow>,
}

/// Empirical sizes of `gamma_1*` and hp1975 `K*` under exponentiality. All
/// columns of one row share the simulated samples.
pub fn build_size_table(cfg: &SizeTableConfig) -> Result<SizeTable> {
    if cfg.require_barlow && cfg.barlow.is_none() {
        return Err(Error::MissingExternalTable(
            "Barlow columns requested but no Barlow CSV was supplied".into(),
        ));
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::ProbabilityOutOfRange(cfg.alpha));
    }
    let gamma = StatisticVariant::Generalized(1.0);
    let mut rows = Vec::with_capacity(cfg.n_list.len());
    for &n in &cfg.n_list {
        let seed = row_seed(cfg.seed, n);
        let sim = |variant| SimConfig {
            workers: cfg.workers,
            ..SimConfig::new(n, variant, cfg.replications, seed)
        };
        let dist = ExactNullCdf::with_policy(n, gamma, cfg.precision)?;
        let region = region_from_quantiles(cfg.sidedness, cfg.alpha, |p| dist.quantile(p))?;
        let gamma_exact = empirical_size(&sim(gamma), cfg.alpha, region, CritSource::ExactTable)?;

        let (gamma_barlow, hp_barlow) = match &cfg.barlow {
            None => (None, None),
            Some(table) => {
                let region = region_from_quantiles(cfg.sidedness, cfg.alpha, |p| {
                    table
                        .get(n, p)
                        .map(|v| BarlowTable::to_k_star(n, v))
                        .ok_or_else(|| {
                            Error::MissingExternalTable(format!(
                                "Barlow CSV has no entry for n={n}, alpha={p}"
                            ))
                        })
                })?;
                (
                    Some(empirical_size(
                        &sim(gamma),
                        cfg.alpha,
                        region,
                        CritSource::ExternalTable,
                    )?),
                    Some(empirical_size(
                        &sim(StatisticVariant::Hp1975),
                        cfg.alpha,
                        region,
                        CritSource::ExternalTable,
                    )?),
                )
            }
        };
        rows.push(SizeRow {
            n,
            gamma_exact,
            gamma_barlow,
            hp_barlow,
        });
    }
    Ok(SizeTable {
        alpha: cfg.alpha,
        sidedness: cfg.sidedness,
        replications: cfg.replications,
        seed: cfg.seed,
        rows,
    })
}

impl SizeTable {
    pub fn has_barlow(&self) -> bool {
        self.rows.iter().any(|r| r.gamma_barlow.is_some())
    }

    fn columns(&self) -> Vec<&'static str> {
        let mut cols = vec!["n", "gamma1_exact"];
        if self.has_barlow() {
            cols.extend(["gamma1_barlow", "hp1975_barlow"]);
        }
        cols
    }

    fn cells(&self, row: &SizeRow, digits: usize) -> Vec<String> {
        let mut cells = vec![
            row.n.to_string(),
            format_sig(row.gamma_exact.empirical_size_percent, digits),
        ];
        if self.has_barlow() {
            for r in [&row.gamma_barlow, &row.hp_barlow] {
                cells.push(r.as_ref().map_or(String::new(), |r| {
                    format_sig(r.empirical_size_percent, digits)
                }));
            }
        }
        cells
    }

    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = self.columns().join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&self.cells(row, digits).join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_markdown(&self, digits: usize) -> String {
        let cols = self.columns();
        let mut out = format!(
            "Empirical size (%) at alpha = {}, {} tail, N = {}, seed = {}\n\n| {} |\n|{}\n",
            self.alpha,
            self.sidedness,
            self.replications,
            self.seed,
            cols.join(" | "),
            "---|".repeat(cols.len())
        );
        for row in &self.rows {
            let _ = writeln!(out, "| {} |", self.cells(row, digits).join(" | "));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("size table serializes")
    }
}
