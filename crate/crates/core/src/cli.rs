//! Command-line front end: `fit`, `grenander`, `simulate`, `rate` and `replay`.
//!
//! Every command computes all of its outputs in memory first and only then
//! creates the output directory, so a failing run leaves nothing behind. Each
//! run writes `meta.json` holding the full effective configuration; `replay`
//! re-executes it.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::experiments::{coverage_experiment, fmt_real, rate_study, ExperimentSettings, TruthSpec};
use crate::gibbs::{run_chain, ChainConfig};
use crate::grenander::grenander_fit;
use crate::model::Sample;
use crate::prior::{EmpiricalPrior, HyperSchedule};
use crate::summaries::{default_grid, pointwise_band};

#[derive(Debug, Parser)]
#[command(name = "ebmono", version, about = "Empirical-Bayes inference for monotone densities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: RunConfig,
}

/// The effective configuration of one run; serialized verbatim into `meta.json`.
#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum RunConfig {
    /// Fit the posterior to a data file and write the Grenander fit and a credible band.
    Fit(FitArgs),
    /// Write only the Grenander estimator of a data file.
    Grenander(GrenanderArgs),
    /// Coverage study of credible intervals under a known truth.
    Simulate(SimulateArgs),
    /// Posterior contraction study over increasing sample sizes.
    Rate(RateArgs),
    /// Re-run the configuration stored in a meta.json.
    #[serde(skip)]
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ChainArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long = "burnin", default_value_t = 1000)]
    pub burn_in: usize,
    #[arg(long = "iters", default_value_t = 2000)]
    pub iterations: usize,
    #[arg(long, default_value_t = 1)]
    pub thin: usize,
    /// Multiplier in c = MULT · n^{5/3} / (ln n)^{2/3}.
    #[arg(long = "c-mult", default_value_t = 0.01)]
    pub c_mult: f64,
    /// Divisor in δ = ln n / DIV.
    #[arg(long = "delta-div", default_value_t = 20.0)]
    pub delta_div: f64,
}

impl ChainArgs {
    pub fn chain(&self) -> ChainConfig {
        ChainConfig {
            burn_in: self.burn_in,
            iterations: self.iterations,
            thin: self.thin,
            seed: self.seed,
        }
    }

    pub fn schedule(&self) -> Result<HyperSchedule> {
        if !(self.c_mult > 0.0 && self.c_mult.is_finite() && self.delta_div > 0.0 && self.delta_div.is_finite()) {
            return Err(Error::invalid("--c-mult and --delta-div must be positive"));
        }
        Ok(HyperSchedule { c_mult: self.c_mult, delta_div: self.delta_div })
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FitArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Number of band grid points.
    #[arg(long, default_value_t = 512, value_parser = clap::value_parser!(u64).range(1..))]
    pub grid: u64,
    #[arg(long, default_value_t = 0.95, value_parser = parse_level)]
    pub level: f64,
    /// Also write every retained draw to draws.csv.
    #[arg(long)]
    pub emit_draws: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GrenanderArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[arg(long, value_parser = parse_truth)]
    pub truth: TruthSpec,
    /// Comma-separated sample sizes.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Comma-separated evaluation points.
    #[arg(long = "x", value_delimiter = ',', required = true)]
    pub x: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value_t = 0.95, value_parser = parse_level)]
    pub level: f64,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RateArgs {
    #[arg(long, value_parser = parse_truth)]
    pub truth: TruthSpec,
    #[arg(long = "n", value_delimiter = ',', default_value = "100,400,1600")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ReplayArgs {
    /// A meta.json written by an earlier run.
    #[arg(long)]
    pub meta: PathBuf,
    /// Output directory; defaults to the one recorded in the meta file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_level(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("level must lie in (0, 1), got {v}"))
    }
}

fn parse_truth(s: &str) -> std::result::Result<TruthSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Read observations: one value per line, or the first numeric column of a
/// comma-separated file. A non-numeric first line is treated as a header.
pub fn ingest(path: &Path) -> Result<Sample> {
    let text = fs::read_to_string(path)?;
    let parse_err = |line: usize, msg: String| Error::Parse { path: path.to_path_buf(), line, msg };
    let mut column: Option<usize> = None;
    let mut values = Vec::new();
    let mut seen_content = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let col = match column {
            Some(c) => c,
            None => match fields.iter().position(|f| f.parse::<f64>().is_ok()) {
                Some(c) => {
                    column = Some(c);
                    c
                }
                None if !seen_content => {
                    seen_content = true;
                    continue;
                }
                None => return Err(parse_err(line_no, format!("no numeric value in '{line}'"))),
            },
        };
        seen_content = true;
        let field = fields
            .get(col)
            .ok_or_else(|| parse_err(line_no, format!("missing column {} in '{line}'", col + 1)))?;
        let v: f64 = field
            .parse()
            .map_err(|_| parse_err(line_no, format!("'{field}' is not a number")))?;
        if !(v.is_finite() && v > 0.0) {
            return Err(parse_err(line_no, format!("observation {v} is not a finite positive number")));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::EmptyData(path.to_path_buf()));
    }
    Sample::new(values)
}

/// Files produced by a command, written only once all of them are ready.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(String, String)>,
}

impl Outputs {
    fn add(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|f| f.0.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|f| f.0 == name).map(|f| f.1.as_str())
    }

    fn write_all(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for (name, contents) in &self.files {
            fs::write(dir.join(name), contents)?;
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    version: String,
    config: RunConfig,
    summary: serde_json::Value,
    outputs: Vec<String>,
    wall_clock_seconds: f64,
}

/// Execute one command and write its outputs.
pub fn run(config: RunConfig) -> Result<Outputs> {
    let config = match config {
        RunConfig::Replay(args) => load_replay(&args)?,
        other => other,
    };
    let started = Instant::now();
    let (mut outputs, summary) = match &config {
        RunConfig::Fit(args) => fit_command(args)?,
        RunConfig::Grenander(args) => grenander_command(args)?,
        RunConfig::Simulate(args) => simulate_command(args)?,
        RunConfig::Rate(args) => rate_command(args)?,
        RunConfig::Replay(_) => unreachable!("replay resolved above"),
    };
    let mut names: Vec<String> = outputs.names().map(String::from).collect();
    names.push("meta.json".into());
    let meta = Meta {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        summary,
        outputs: names,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    outputs.add("meta.json", serde_json::to_string_pretty(&meta)? + "\n");
    outputs.write_all(out_dir(&config))?;
    Ok(outputs)
}

fn out_dir(config: &RunConfig) -> &Path {
    match config {
        RunConfig::Fit(a) => &a.out,
        RunConfig::Grenander(a) => &a.out,
        RunConfig::Simulate(a) => &a.out,
        RunConfig::Rate(a) => &a.out,
        RunConfig::Replay(_) => unreachable!("replay has no output directory of its own"),
    }
}

fn load_replay(args: &ReplayArgs) -> Result<RunConfig> {
    let meta: Meta = serde_json::from_str(&fs::read_to_string(&args.meta)?)?;
    let mut config = meta.config;
    if let Some(out) = &args.out {
        match &mut config {
            RunConfig::Fit(a) => a.out = out.clone(),
            RunConfig::Grenander(a) => a.out = out.clone(),
            RunConfig::Simulate(a) => a.out = out.clone(),
            RunConfig::Rate(a) => a.out = out.clone(),
            RunConfig::Replay(_) => return Err(Error::invalid("meta file cannot describe a replay")),
        }
    }
    Ok(config)
}

fn grenander_csv(sample: &Sample) -> String {
    let fit = grenander_fit(sample);
    let view = fit.to_step();
    let mut csv = String::from("component,knot,height,weight,location\n");
    for (s, ((&t, &h), (w, m))) in view.knots().iter().zip(view.heights()).zip(fit.components()).enumerate() {
        let _ = writeln!(csv, "{},{},{},{},{}", s + 1, fmt_real(t), fmt_real(h), fmt_real(w), fmt_real(m));
    }
    csv
}

fn grenander_command(args: &GrenanderArgs) -> Result<(Outputs, serde_json::Value)> {
    let sample = ingest(&args.data)?;
    let fit = grenander_fit(&sample);
    let mut out = Outputs::default();
    out.add("grenander.csv", grenander_csv(&sample));
    Ok((out, json!({ "n": sample.len(), "S": fit.len(), "max_observation": sample.max() })))
}

pub fn fit_command(args: &FitArgs) -> Result<(Outputs, serde_json::Value)> {
    let sample = ingest(&args.data)?;
    let schedule = args.chain.schedule()?;
    let hp = schedule.at(sample.len())?;
    let center = grenander_fit(&sample);
    let prior = EmpiricalPrior::build(&center, hp);
    let chain = args.chain.chain();
    let draws = run_chain(&prior, &center, &sample, &chain)?;
    let grid = default_grid(sample.max(), args.grid as usize);
    let band = pointwise_band(&draws, &grid, args.level)?;

    let mut out = Outputs::default();
    out.add("grenander.csv", grenander_csv(&sample));

    let mut csv = String::from("x,mean,lower,upper\n");
    for k in 0..band.grid.len() {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt_real(band.grid[k]),
            fmt_real(band.mean[k]),
            fmt_real(band.lower[k]),
            fmt_real(band.upper[k])
        );
    }
    out.add("band.csv", csv);

    if args.emit_draws {
        let mut csv = String::from("draw,component,weight,location\n");
        for (d, theta) in draws.iter().enumerate() {
            for (s, (w, m)) in theta.components().enumerate() {
                let _ = writeln!(csv, "{},{},{},{}", d + 1, s + 1, fmt_real(w), fmt_real(m));
            }
        }
        out.add("draws.csv", csv);
    }

    let summary = json!({
        "n": sample.len(),
        "S": center.len(),
        "c": hp.c,
        "delta": hp.delta,
        "seed": chain.seed,
        "chain": chain,
        "draws": draws.len(),
        "level": args.level,
        "grid_points": grid.len(),
    });
    Ok((out, summary))
}

fn settings(chain: &ChainArgs, level: f64) -> Result<ExperimentSettings> {
    Ok(ExperimentSettings { chain: chain.chain(), schedule: chain.schedule()?, level })
}

pub fn simulate_command(args: &SimulateArgs) -> Result<(Outputs, serde_json::Value)> {
    let settings = settings(&args.chain, args.level)?;
    let report = coverage_experiment(args.truth, &args.n, &args.x, args.reps, &settings)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    let mut out = Outputs::default();
    out.add("coverage.csv", String::from_utf8(csv).expect("csv is utf-8"));
    let summary = json!({
        "truth": args.truth,
        "n": args.n,
        "x": args.x,
        "replications": args.reps,
        "seed": args.chain.seed,
        "chain": settings.chain,
        "schedule": settings.schedule,
        "level": args.level,
    });
    Ok((out, summary))
}

pub fn rate_command(args: &RateArgs) -> Result<(Outputs, serde_json::Value)> {
    let settings = settings(&args.chain, 0.95)?;
    let report = rate_study(args.truth, &args.n, args.reps, &settings)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    let mut out = Outputs::default();
    out.add("rate.csv", String::from_utf8(csv).expect("csv is utf-8"));
    let summary = json!({
        "truth": args.truth,
        "n": args.n,
        "replications": args.reps,
        "seed": args.chain.seed,
        "chain": settings.chain,
        "schedule": settings.schedule,
        "radius_multiplier": report.radius_multiplier,
        "log_log_slope": report.log_log_slope(),
    });
    Ok((out, summary))
}
