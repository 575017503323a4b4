//! The `concord` command line.
//!
//! Exit codes: 0 on success, 2 on input errors, 3 when a requested index is
//! undefined for the input.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Number, Value};

use crate::bench::bench_point;
use crate::contingency::DEFAULT_DENSE_CAP;
use crate::error::Error;
use crate::indices::{compare, IndexReport};
use crate::labels::{read_label_file, LabelColumns, LabelFormat, ReadOptions};
use crate::model::{bias, moments, JointDistribution, Scenario};
use crate::simulate::{bias_study, BiasGrid};

pub const SIMULATE_SCHEMA: &str = "# concord simulate v1";
pub const BENCH_SCHEMA: &str = "# concord bench v1";

#[derive(Debug, Parser)]
#[command(name = "concord", version, about = "Pair-counting comparison of clusterings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare two clusterings given as label files.
    Compare(CompareArgs),
    /// Evaluate model moments and the adjustment bias for a joint distribution.
    Expect(ExpectArgs),
    /// Tabulate the adjustment bias over the benchmark scenarios.
    Simulate(SimulateArgs),
    /// Time the sparse and dense contingency summaries.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Tsv,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Two-column label file, or the first of two single-column files.
    pub first: PathBuf,
    /// Single-column label file for the second clustering.
    pub second: Option<PathBuf>,
    /// Field delimiter: a single character, or `tab`.
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    pub delimiter: char,
    /// Skip the first line of each input file.
    #[arg(long)]
    pub header: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Exit with status 3 if MARI is undefined (fewer than four items).
    #[arg(long)]
    pub require_mari: bool,
    /// Exit with status 3 if the normalized ARI is undefined.
    #[arg(long)]
    pub require_normalized: bool,
}

#[derive(Debug, Args)]
pub struct ExpectArgs {
    /// Delimited matrix of joint probabilities, one row per cluster of the first clustering.
    #[arg(long)]
    pub pi: PathBuf,
    /// Number of items.
    #[arg(short, long)]
    pub n: u64,
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    pub delimiter: char,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario ids (1, 2, 3).
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub scenario: Vec<u8>,
    #[arg(long = "K-grid", value_delimiter = ',', default_value = "2,4,8,16,32,64,128")]
    pub k_grid: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.3,0.8")]
    pub epsilon: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128,256,512,1024")]
    pub n_grid: Vec<u64>,
    /// Monte-Carlo replicates per row (0 for analytic values only).
    #[arg(long, default_value_t = 0)]
    pub mc: usize,
    /// Use the product of each scenario's marginals instead.
    #[arg(long)]
    pub independent: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (0 for all cores).
    #[arg(long, env = "CONCORD_THREADS", default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "100000,200000,400000,800000,1600000")]
    pub n_grid: Vec<usize>,
    #[arg(long = "K-grid", value_delimiter = ',', default_value = "10,100,1000,5000")]
    pub k_grid: Vec<usize>,
    /// Timed repetitions per point; the median is reported.
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest dense table (K * L cells) to allocate.
    #[arg(long, default_value_t = DEFAULT_DENSE_CAP)]
    pub dense_cap: u128,
    #[arg(long, env = "CONCORD_THREADS", default_value_t = 0)]
    pub threads: usize,
}

fn parse_delimiter(s: &str) -> Result<char, String> {
    match s {
        "tab" | "\\t" | "\t" => Ok('\t'),
        _ => {
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(format!("delimiter must be one character or `tab`, got {s:?}")),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    fn degenerate(message: impl Into<String>) -> Self {
        CliError { code: 3, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::input(e.to_string())
    }
}

/// Formats a real with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_real(x: f64) -> Value {
    Number::from_str(&fmt_real(x)).map_or(Value::Null, Value::Number)
}

fn render(format: OutputFormat, fields: Vec<(&str, Value)>) -> String {
    match format {
        OutputFormat::Json => {
            let map: Map<String, Value> = fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
            let mut out = serde_json::to_string_pretty(&Value::Object(map)).expect("serializable");
            out.push('\n');
            out
        }
        OutputFormat::Tsv => {
            let header: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
            let values: Vec<String> = fields
                .iter()
                .map(|(_, v)| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect();
            format!("{}\n{}\n", header.join("\t"), values.join("\t"))
        }
    }
}

fn index_fields(r: &IndexReport, format: OutputFormat) -> Vec<(&'static str, Value)> {
    let fallible = |v: &crate::error::Result<f64>| match v {
        Ok(x) => json_real(*x),
        Err(e) if format == OutputFormat::Tsv => Value::String(e.kind().to_string()),
        Err(_) => Value::Null,
    };
    let mut fields = vec![
        ("n", Value::from(r.n)),
        ("k", Value::from(r.k)),
        ("l", Value::from(r.l)),
        ("ri", json_real(r.ri)),
        ("mri", json_real(r.mri)),
        ("ari_paper", json_real(r.ari_paper)),
        ("ari_normalized", fallible(&r.ari_normalized)),
        ("mari", fallible(&r.mari)),
    ];
    if format == OutputFormat::Json {
        let errors: Map<String, Value> = [("ari_normalized", &r.ari_normalized), ("mari", &r.mari)]
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().err().map(|e| (k.to_string(), Value::from(e.kind()))))
            .collect();
        fields.push(("errors", Value::Object(errors)));
    }
    fields
}

pub fn cmd_compare(args: &CompareArgs) -> Result<String, CliError> {
    let mut options = ReadOptions {
        format: LabelFormat::TwoColumn,
        delimiter: args.delimiter,
        header: args.header,
    };
    let with_path = |path: &PathBuf, e: Error| CliError::input(format!("{}: {e}", path.display()));
    let (c1, c2) = match &args.second {
        None => match read_label_file(&args.first, &options).map_err(|e| with_path(&args.first, e))? {
            LabelColumns::Two(a, b) => (a, b),
            LabelColumns::One(_) => unreachable!("two-column read"),
        },
        Some(second) => {
            options.format = LabelFormat::SingleColumn;
            let read_one = |path: &PathBuf| match read_label_file(path, &options) {
                Ok(LabelColumns::One(v)) => Ok(v),
                Ok(LabelColumns::Two(..)) => unreachable!("single-column read"),
                Err(e) => Err(with_path(path, e)),
            };
            (read_one(&args.first)?, read_one(second)?)
        }
    };
    let report = compare(&c1, &c2)?;
    if args.require_mari {
        if let Err(e) = &report.mari {
            return Err(CliError::degenerate(format!("mari: {e}")));
        }
    }
    if args.require_normalized {
        if let Err(e) = &report.ari_normalized {
            return Err(CliError::degenerate(format!("ari_normalized: {e}")));
        }
    }
    Ok(render(args.format, index_fields(&report, args.format)))
}

pub fn cmd_expect(args: &ExpectArgs) -> Result<String, CliError> {
    let pi = JointDistribution::read(&args.pi, args.delimiter)
        .map_err(|e| CliError::input(format!("{}: {e}", args.pi.display())))?;
    let m = moments(&pi, args.n)?;
    let b = bias(&pi, args.n)?;
    let fields = vec![
        ("n", Value::from(args.n)),
        ("k", Value::from(pi.rows())),
        ("l", Value::from(pi.cols())),
        ("theta", json_real(m.theta)),
        ("theta0", json_real(m.theta0)),
        ("theta_ri", json_real(m.theta_ri)),
        ("theta0_ri", json_real(m.theta0_ri)),
        ("sigma2", json_real(m.sigma2)),
        ("e_ari", json_real(m.e_ari)),
        ("bias", json_real(b.bias)),
        ("bound", json_real(b.bound)),
    ];
    Ok(render(args.format, fields))
}

fn strictly_increasing<T: PartialOrd + std::fmt::Debug>(name: &str, grid: &[T]) -> Result<(), CliError> {
    if grid.is_empty() {
        return Err(CliError::input(format!("{name}: grid is empty")));
    }
    if let Some(w) = grid.windows(2).find(|w| w[0] >= w[1]) {
        return Err(CliError::input(format!(
            "{name}: grid must be strictly increasing ({:?} then {:?})",
            w[0], w[1]
        )));
    }
    Ok(())
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<String, CliError> {
    strictly_increasing("--scenario", &args.scenario)?;
    strictly_increasing("--K-grid", &args.k_grid)?;
    strictly_increasing("--epsilon", &args.epsilon)?;
    strictly_increasing("--n-grid", &args.n_grid)?;
    let min_n = if args.mc > 0 { 4 } else { 2 };
    if args.n_grid[0] < min_n {
        return Err(CliError::input(format!("--n-grid: n must be at least {min_n}")));
    }
    let scenarios = args
        .scenario
        .iter()
        .map(|&id| Scenario::from_id(id))
        .collect::<Result<Vec<_>, _>>()?;
    let grid = BiasGrid {
        scenarios,
        k: args.k_grid.clone(),
        epsilon: args.epsilon.clone(),
        n: args.n_grid.clone(),
        independent: args.independent,
        mc_reps: args.mc,
        seed: args.seed,
        threads: args.threads,
    };
    let rows = bias_study(&grid)?;

    let mut out = String::new();
    out.push_str(SIMULATE_SCHEMA);
    out.push('\n');
    out.push_str("scenario,k,epsilon,n,bias,abs_bias,bound,mari_target,mc_reps,ari_mean,ari_se,mari_mean,mari_se\n");
    for row in rows {
        let mc = match row.mc {
            Some(mc) => format!(
                "{},{},{},{},{}",
                mc.reps,
                fmt_real(mc.ari_paper.mean),
                fmt_real(mc.ari_paper.se),
                fmt_real(mc.mari.mean),
                fmt_real(mc.mari.se)
            ),
            None => "0,,,,".to_string(),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.spec.scenario.id(),
            row.spec.k,
            row.spec.epsilon,
            row.n,
            fmt_real(row.bias),
            fmt_real(row.bias.abs()),
            fmt_real(row.bound),
            fmt_real(row.mari_target),
            mc
        ));
    }
    Ok(out)
}

pub fn cmd_bench(args: &BenchArgs) -> Result<String, CliError> {
    strictly_increasing("--n-grid", &args.n_grid)?;
    strictly_increasing("--K-grid", &args.k_grid)?;
    if args.reps == 0 {
        return Err(CliError::input("--reps must be at least 1"));
    }
    if args.n_grid[0] == 0 || args.k_grid[0] == 0 {
        return Err(CliError::input("grids must be positive"));
    }
    let mut out = format!("{BENCH_SCHEMA}\nn,k,l,sparse_seconds,dense_seconds\n");
    for &n in &args.n_grid {
        for &k in &args.k_grid {
            let row = bench_point(n, k, args.reps, args.seed, args.dense_cap)?;
            let dense = row
                .dense
                .map_or_else(|| "skipped".to_string(), |d| fmt_real(d.as_secs_f64()));
            out.push_str(&format!(
                "{n},{k},{k},{},{dense}\n",
                fmt_real(row.sparse.as_secs_f64())
            ));
        }
    }
    Ok(out)
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Compare(args) => cmd_compare(args),
        Command::Expect(args) => cmd_expect(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Bench(args) => cmd_bench(args),
    }
}
