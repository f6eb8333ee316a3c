//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 data error, 3 numerical failure,
//! 4 missing external table.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use nbue::exact::{ExactNullCdf, PrecisionPolicy};
use nbue::input::read_sample;
use nbue::report::{format_sig, run_test, TestOptions};
use nbue::tables::{
    build_size_table, build_table, default_n_list, BarlowTable, Sidedness, SizeTableConfig,
    TablePolicy, DEFAULT_ALPHAS, DEFAULT_SEED,
};
use nbue::{Error, ScaleName, StatisticVariant};

#[derive(Parser)]
#[command(
    name = "nbue",
    version,
    about = "Exact and simulated null distributions of the generalized Hollander-Proschan NBUE test"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Significant digits in numeric output.
    #[arg(long, global = true, default_value_t = 6)]
    precision: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Test a sample of lifetimes for exponentiality.
    Stat(StatArgs),
    /// Exact null CDF at a point.
    Cdf(CdfArgs),
    /// Exact null quantile.
    Quantile(QuantileArgs),
    /// Critical-value table (exact for small n, simulated beyond).
    Table(TableArgs),
    /// Empirical size of the test under exponentiality.
    SizeSim(SizeArgs),
    /// Barlow's total-time-on-test statistic of a sample.
    Ttt(TttArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Generalized,
    Hp1975,
}

#[derive(Clone, Copy, ValueEnum)]
enum SidedArg {
    Lower,
    Upper,
    Two,
}

impl From<SidedArg> for Sidedness {
    fn from(s: SidedArg) -> Self {
        match s {
            SidedArg::Lower => Sidedness::Lower,
            SidedArg::Upper => Sidedness::Upper,
            SidedArg::Two => Sidedness::TwoSided,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Md,
    Json,
}

#[derive(Args)]
struct StatisticArgs {
    /// Weight exponent j > 0.
    #[arg(long, default_value_t = 1.0)]
    j: f64,
    /// hp1975 selects the historical Hollander-Proschan K*.
    #[arg(long, value_enum, default_value = "generalized")]
    variant: VariantArg,
}

impl StatisticArgs {
    fn variant(&self) -> StatisticVariant {
        match self.variant {
            VariantArg::Generalized => StatisticVariant::Generalized(self.j),
            VariantArg::Hp1975 => StatisticVariant::Hp1975,
        }
    }
}

#[derive(Args)]
struct StatArgs {
    input: PathBuf,
    #[command(flatten)]
    stat: StatisticArgs,
    /// none, paper, paper-j-quarter, paper-j-one or user:<c>. Defaults to the
    /// published scale when one exists.
    #[arg(long)]
    scale: Option<String>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "upper")]
    sided: SidedArg,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Largest n for exact p-values; simulation beyond.
    #[arg(long, default_value_t = nbue::exact::DEFAULT_EXACT_MAX_N)]
    exact_max_n: usize,
    #[arg(long, default_value_t = 100_000)]
    reps: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct CdfArgs {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    stat: StatisticArgs,
    /// Point, in scaled units when --scale is given.
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long, default_value = "none")]
    scale: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct QuantileArgs {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    stat: StatisticArgs,
    #[arg(long)]
    p: f64,
    /// Report the quantile in scaled units.
    #[arg(long, default_value = "none")]
    scale: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    stat: StatisticArgs,
    #[arg(long)]
    scale: Option<String>,
    /// Sample sizes; defaults to 2(1)25(5)100.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    alphas: Vec<f64>,
    #[arg(long, default_value_t = 60)]
    exact_max_n: usize,
    #[arg(long, default_value_t = 1_000_000)]
    reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct SizeArgs {
    /// Sample sizes; defaults to 2..=10.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, default_value_t = 100_000)]
    reps: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "upper")]
    sided: SidedArg,
    /// Percentile points of the total-time-on-test statistic (n,alpha,value).
    #[arg(long)]
    barlow_csv: Option<PathBuf>,
    /// Fail when the Barlow columns cannot be produced.
    #[arg(long)]
    with_barlow: bool,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct TttArgs {
    input: PathBuf,
}

fn parse_scale(arg: Option<&str>, variant: StatisticVariant) -> nbue::Result<ScaleName> {
    match arg {
        None => Ok(ScaleName::paper_for(variant).unwrap_or(ScaleName::None)),
        Some("paper") => ScaleName::paper_for(variant),
        Some(s) => s.parse(),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::MissingExternalTable(_) => 4,
        e if e.is_numerical() => 3,
        Error::EmptyOrSingleton(_)
        | Error::NegativeValue { .. }
        | Error::NonFiniteValue { .. }
        | Error::AllZero
        | Error::Parse { .. }
        | Error::ExternalTable { .. }
        | Error::Io(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: &Cli) -> nbue::Result<String> {
    let digits = cli.precision;
    match &cli.command {
        Command::Stat(a) => {
            let variant = a.stat.variant();
            variant.validate()?;
            let scale = parse_scale(a.scale.as_deref(), variant)?;
            let sample = read_sample(&a.input)?;
            let opts = TestOptions {
                exact_max_n: a.exact_max_n,
                replications: a.reps,
                seed: a.seed,
                precision: PrecisionPolicy::default(),
            };
            let report = run_test(&sample, variant, scale, a.alpha, a.sided.into(), &opts)?;
            Ok(match a.format {
                Format::Json => report.to_json() + "\n",
                Format::Csv => report.to_csv(digits),
                Format::Text | Format::Md => report.to_text(digits),
            })
        }
        Command::Cdf(a) => {
            let variant = a.stat.variant();
            let scale = parse_scale(Some(&a.scale), variant)?;
            scale.check_variant(variant)?;
            let dist = exact_dist(a.n, variant)?;
            let x = a.x / scale.factor(a.n)?;
            let c = dist.cdf(x)?;
            Ok(match a.format {
                Format::Json => {
                    serde_json::to_string_pretty(&json!({
                        "n": a.n, "variant": variant, "x": a.x, "raw_x": x, "scale": scale,
                        "cdf": c.p, "achieved_bits": c.achieved_bits,
                        "estimated_abs_error": c.estimated_abs_error,
                    }))
                    .expect("json")
                        + "\n"
                }
                _ => format!("{}\n", format_sig(c.p, digits)),
            })
        }
        Command::Quantile(a) => {
            let variant = a.stat.variant();
            let scale = parse_scale(Some(&a.scale), variant)?;
            scale.check_variant(variant)?;
            if !(a.p > 0.0 && a.p < 1.0) {
                return Err(Error::ProbabilityOutOfRange(a.p));
            }
            let dist = exact_dist(a.n, variant)?;
            let raw = dist.quantile(a.p)?;
            let value = raw * scale.factor(a.n)?;
            Ok(match a.format {
                Format::Json => {
                    serde_json::to_string_pretty(&json!({
                        "n": a.n, "variant": variant, "p": a.p, "scale": scale,
                        "raw": raw, "value": value,
                    }))
                    .expect("json")
                        + "\n"
                }
                _ => format!("{}\n", format_sig(value, digits)),
            })
        }
        Command::Table(a) => {
            let variant = a.stat.variant();
            variant.validate()?;
            let scale = parse_scale(a.scale.as_deref(), variant)?;
            let n_list = if a.n.is_empty() {
                default_n_list()
            } else {
                a.n.clone()
            };
            let alphas = if a.alphas.is_empty() {
                DEFAULT_ALPHAS.to_vec()
            } else {
                a.alphas.clone()
            };
            let policy = TablePolicy {
                exact_max_n: a.exact_max_n,
                replications: a.reps,
                seed: a.seed,
                precision: PrecisionPolicy {
                    max_n: a.exact_max_n.max(nbue::exact::DEFAULT_EXACT_MAX_N),
                    ..PrecisionPolicy::default()
                },
                workers: a.workers,
            };
            let table = build_table(variant, &n_list, &alphas, scale, &policy)?;
            Ok(match a.format {
                Format::Csv => table.to_csv(digits),
                Format::Json => table.to_json() + "\n",
                Format::Text | Format::Md => table.to_markdown(digits),
            })
        }
        Command::SizeSim(a) => {
            let barlow = a.barlow_csv.as_ref().map(BarlowTable::read).transpose()?;
            if barlow.is_none() && !a.with_barlow {
                eprintln!("note: Barlow columns skipped (no --barlow-csv given)");
            }
            let cfg = SizeTableConfig {
                n_list: if a.n.is_empty() {
                    (2..=10).collect()
                } else {
                    a.n.clone()
                },
                alpha: a.alpha,
                sidedness: a.sided.into(),
                replications: a.reps,
                seed: a.seed,
                barlow,
                require_barlow: a.with_barlow,
                precision: PrecisionPolicy::default(),
                workers: a.workers,
            };
            let table = build_size_table(&cfg)?;
            Ok(match a.format {
                Format::Csv => table.to_csv(digits),
                Format::Json => table.to_json() + "\n",
                Format::Text | Format::Md => table.to_markdown(digits),
            })
        }
        Command::Ttt(a) => {
            let sample = read_sample(&a.input)?;
            Ok(format!("{}\n", format_sig(sample.ttt_statistic(), digits)))
        }
    }
}

fn exact_dist(n: usize, variant: StatisticVariant) -> nbue::Result<ExactNullCdf> {
    ExactNullCdf::new(n, variant)
}
