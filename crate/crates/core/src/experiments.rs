//! Monte Carlo studies: credible-interval coverage under known truths and the
//! empirical contraction rate of the posterior.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Open01, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::gibbs::{run_chain, ChainConfig};
use crate::grenander::grenander_fit;
use crate::model::{Density, Sample};
use crate::prior::{EmpiricalPrior, HyperSchedule};
use crate::summaries::{interval_at, l1_distance, posterior_mean_mixture};

/// Known monotone truth used to simulate data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruthSpec {
    /// `f(x) = e^{-x}`.
    Exponential,
    /// `f(x) = 2 φ(x)`.
    HalfNormal,
}

impl TruthSpec {
    pub const ALL: [TruthSpec; 2] = [TruthSpec::Exponential, TruthSpec::HalfNormal];

    pub fn name(&self) -> &'static str {
        match self {
            TruthSpec::Exponential => "exponential",
            TruthSpec::HalfNormal => "halfnormal",
        }
    }

    fn tag(&self) -> u64 {
        match self {
            TruthSpec::Exponential => 1,
            TruthSpec::HalfNormal => 2,
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            TruthSpec::Exponential => {
                let u: f64 = rng.sample(Open01);
                -u.ln()
            }
            TruthSpec::HalfNormal => loop {
                let z: f64 = rng.sample(StandardNormal);
                if z != 0.0 {
                    break z.abs();
                }
            },
        }
    }
}

impl fmt::Display for TruthSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TruthSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exponential" | "exp" => Ok(TruthSpec::Exponential),
            "halfnormal" | "half-normal" | "hnm" => Ok(TruthSpec::HalfNormal),
            _ => Err(Error::invalid(format!(
                "unknown truth '{s}'; valid names: {}",
                TruthSpec::ALL.map(|t| t.name()).join(", ")
            ))),
        }
    }
}

impl Density for TruthSpec {
    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match self {
            TruthSpec::Exponential => (-x).exp(),
            TruthSpec::HalfNormal => (2.0 / std::f64::consts::PI).sqrt() * (-0.5 * x * x).exp(),
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            TruthSpec::Exponential => -(-x).exp_m1(),
            TruthSpec::HalfNormal => erf(x / std::f64::consts::SQRT_2),
        }
    }
}

/// `n` iid draws from the truth.
pub fn gen_truth<R: Rng + ?Sized>(spec: TruthSpec, n: usize, rng: &mut R) -> Result<Sample> {
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    Sample::new((0..n).map(|_| spec.draw(rng)).collect())
}

/// Contraction rate `(ln n)^{1/3} n^{-1/3}`.
pub fn contraction_rate(n: usize) -> f64 {
    let nf = n as f64;
    (nf.ln() / nf).cbrt()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one replication, a function of every coordinate of the cell.
pub fn replication_seed(master: u64, replication: usize, n: usize, truth: TruthSpec) -> u64 {
    let mut h = splitmix64(master);
    for v in [replication as u64, n as u64, truth.tag()] {
        h = splitmix64(h ^ v);
    }
    h
}

/// Everything a replication needs besides the truth and sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSettings {
    /// Chain lengths; `seed` is the master seed of the whole study.
    pub chain: ChainConfig,
    pub schedule: HyperSchedule,
    pub level: f64,
}

impl Default for ExperimentSettings {
    fn default() -> Self {
        Self {
            chain: ChainConfig::default(),
            schedule: HyperSchedule::default(),
            level: 0.95,
        }
    }
}

struct Replication {
    data: Sample,
    draws: crate::gibbs::PosteriorDraws,
}

fn replicate(truth: TruthSpec, n: usize, rep: usize, settings: &ExperimentSettings) -> Result<Replication> {
    let mut rng = ChaCha8Rng::seed_from_u64(replication_seed(settings.chain.seed, rep, n, truth));
    let data = gen_truth(truth, n, &mut rng)?;
    let center = grenander_fit(&data);
    let prior = EmpiricalPrior::build(&center, settings.schedule.at(n)?);
    let chain = settings.chain.with_seed(rng.next_u64());
    let draws = run_chain(&prior, &center, &data, &chain)?;
    Ok(Replication { data, draws })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub n: usize,
    pub x: f64,
    /// `f*(x)`.
    pub truth_value: f64,
    pub covered: usize,
    pub replications: usize,
    pub coverage: f64,
    pub mean_length: f64,
    /// `sqrt(p (1 − p) / reps)`.
    pub mc_std_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub truth: TruthSpec,
    pub level: f64,
    pub rows: Vec<CoverageRow>,
}

impl CoverageReport {
    pub fn row(&self, n: usize, x: f64) -> Option<&CoverageRow> {
        self.rows.iter().find(|r| r.n == n && r.x == x)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "truth,n,x,truth_value,level,covered,replications,coverage,mean_length,mc_std_err")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                self.truth,
                r.n,
                fmt_real(r.x),
                fmt_real(r.truth_value),
                fmt_real(self.level),
                r.covered,
                r.replications,
                fmt_real(r.coverage),
                fmt_real(r.mean_length),
                fmt_real(r.mc_std_err)
            )?;
        }
        Ok(())
    }
}

/// Coverage and mean length of the equal-tailed credible interval for `f(x)`.
///
/// Each replication simulates data, fits the Grenander center, builds the prior
/// from the schedule at `n`, runs the chain and checks every `x` against `f*(x)`.
/// Replications run in parallel; results are reduced in replication order.
pub fn coverage_experiment(
    truth: TruthSpec,
    n_list: &[usize],
    x_list: &[f64],
    replications: usize,
    settings: &ExperimentSettings,
) -> Result<CoverageReport> {
    if replications == 0 {
        return Err(Error::invalid("coverage experiment needs at least one replication"));
    }
    if n_list.is_empty() || x_list.is_empty() {
        return Err(Error::invalid("coverage experiment needs at least one n and one x"));
    }
    if let Some(x) = x_list.iter().find(|x| !(**x > 0.0)) {
        return Err(Error::domain(format!("evaluation point {x} is not positive")));
    }
    settings.chain.validate()?;
    let mut rows = Vec::with_capacity(n_list.len() * x_list.len());
    for &n in n_list {
        let per_rep: Vec<Vec<(f64, f64)>> = (0..replications)
            .into_par_iter()
            .map(|rep| {
                let r = replicate(truth, n, rep, settings)?;
                x_list
                    .iter()
                    .map(|&x| interval_at(&r.draws, x, settings.level))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        for (k, &x) in x_list.iter().enumerate() {
            let truth_value = truth.pdf(x);
            let mut covered = 0;
            let mut length = 0.0;
            for intervals in &per_rep {
                let (lo, hi) = intervals[k];
                if lo <= truth_value && truth_value <= hi {
                    covered += 1;
                }
                length += hi - lo;
            }
            let p = covered as f64 / replications as f64;
            rows.push(CoverageRow {
                n,
                x,
                truth_value,
                covered,
                replications,
                coverage: p,
                mean_length: length / replications as f64,
                mc_std_err: (p * (1.0 - p) / replications as f64).sqrt(),
            });
        }
    }
    Ok(CoverageReport { truth, level: settings.level, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: usize,
    pub eps_n: f64,
    /// Average over replications of `d(f*, posterior mean)`.
    pub mean_l1: f64,
    /// Average posterior mass of `{f : d(f*, f) > M ε_n}`.
    pub mean_mass_outside: f64,
    pub replications: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub truth: TruthSpec,
    /// Radius multiplier calibrated at the smallest `n`.
    pub radius_multiplier: f64,
    pub rows: Vec<RateRow>,
}

impl RateReport {
    /// Least-squares slope of `ln mean_l1` against `ln n`.
    pub fn log_log_slope(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .map(|r| ((r.n as f64).ln(), r.mean_l1.ln()))
            .collect();
        log_log_fit(&pts)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "truth,n,eps_n,radius_multiplier,mean_l1,mean_mass_outside,replications")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                self.truth,
                r.n,
                fmt_real(r.eps_n),
                fmt_real(self.radius_multiplier),
                fmt_real(r.mean_l1),
                fmt_real(r.mean_mass_outside),
                r.replications
            )?;
        }
        Ok(())
    }
}

fn log_log_fit(pts: &[(f64, f64)]) -> f64 {
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Empirical contraction study: L1 error of the posterior mean and the posterior
/// mass outside an `M ε_n` ball around the truth, for increasing `n`.
///
/// `M` is the median of `d(f*, f_θ) / ε_{n_1}` over all draws at the smallest `n`,
/// so the mass outside the ball starts near one half.
pub fn rate_study(
    truth: TruthSpec,
    n_list: &[usize],
    replications: usize,
    settings: &ExperimentSettings,
) -> Result<RateReport> {
    if n_list.len() < 3 {
        return Err(Error::invalid("rate study needs at least three sample sizes"));
    }
    if !n_list.windows(2).all(|p| p[0] < p[1]) {
        return Err(Error::invalid("rate study sample sizes must be strictly increasing"));
    }
    if replications == 0 {
        return Err(Error::invalid("rate study needs at least one replication"));
    }
    settings.chain.validate()?;

    // per n, per replication: (error of the posterior mean, distance of every draw)
    let mut results: Vec<Vec<(f64, Vec<f64>)>> = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let per_rep = (0..replications)
            .into_par_iter()
            .map(|rep| {
                let r = replicate(truth, n, rep, settings)?;
                debug_assert!(r.draws.iter().all(|d| d.log_likelihood(&r.data) > f64::NEG_INFINITY));
                let mean = posterior_mean_mixture(&r.draws);
                let err = l1_distance(&mean, &truth);
                let dists = r.draws.iter().map(|d| l1_distance(d, &truth)).collect();
                Ok((err, dists))
            })
            .collect::<Result<Vec<_>>>()?;
        results.push(per_rep);
    }

    let eps0 = contraction_rate(n_list[0]);
    let mut scaled: Vec<f64> = results[0]
        .iter()
        .flat_map(|(_, d)| d.iter().map(|v| v / eps0))
        .collect();
    scaled.sort_by(f64::total_cmp);
    let radius_multiplier = crate::summaries::quantile_sorted(&scaled, 0.5);

    let rows = n_list
        .iter()
        .zip(&results)
        .map(|(&n, per_rep)| {
            let eps_n = contraction_rate(n);
            let radius = radius_multiplier * eps_n;
            let reps = per_rep.len() as f64;
            let mean_l1 = per_rep.iter().map(|r| r.0).sum::<f64>() / reps;
            let mean_mass_outside = per_rep
                .iter()
                .map(|(_, d)| d.iter().filter(|&&v| v > radius).count() as f64 / d.len() as f64)
                .sum::<f64>()
                / reps;
            RateRow { n, eps_n, mean_l1, mean_mass_outside, replications: per_rep.len() }
        })
        .collect();
    Ok(RateReport { truth, radius_multiplier, rows })
}

/// Reals are written with 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truth_means() {
        let n = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = gen_truth(TruthSpec::Exponential, n, &mut rng).unwrap();
        let mean = s.values().iter().sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 3.0 * (1.0 / n as f64).sqrt(), "{mean}");

        let s = gen_truth(TruthSpec::HalfNormal, n, &mut rng).unwrap();
        let mean = s.values().iter().sum::<f64>() / n as f64;
        let mu = (2.0 / std::f64::consts::PI).sqrt();
        assert!((mu - 0.797885).abs() < 1e-6);
        let sd = (1.0 - mu * mu).sqrt();
        assert!((mean - mu).abs() < 3.0 * sd / (n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn truth_reproducible() {
        for t in TruthSpec::ALL {
            let a = gen_truth(t, 20, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
            let b = gen_truth(t, 20, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn truth_densities_integrate_to_one() {
        for t in TruthSpec::ALL {
            let total = crate::summaries::integrate(|x| t.pdf(x), 0.0, 40.0, 1e-12);
            assert!((total - 1.0).abs() < 1e-9, "{t}: {total}");
            assert!((t.cdf(1.3) - crate::summaries::integrate(|x| t.pdf(x), 0.0, 1.3, 1e-13)).abs() < 1e-10);
            assert!(t.pdf(0.5) >= t.pdf(0.6));
        }
    }

    #[test]
    fn truth_names() {
        assert_eq!("exponential".parse::<TruthSpec>().unwrap(), TruthSpec::Exponential);
        assert_eq!("halfnormal".parse::<TruthSpec>().unwrap(), TruthSpec::HalfNormal);
        let err = "gamma".parse::<TruthSpec>().unwrap_err().to_string();
        assert!(err.contains("exponential") && err.contains("halfnormal"));
    }

    #[test]
    fn seeds_differ_by_coordinate() {
        let base = replication_seed(7, 0, 100, TruthSpec::Exponential);
        assert_ne!(base, replication_seed(7, 1, 100, TruthSpec::Exponential));
        assert_ne!(base, replication_seed(7, 0, 200, TruthSpec::Exponential));
        assert_ne!(base, replication_seed(7, 0, 100, TruthSpec::HalfNormal));
        assert_ne!(base, replication_seed(8, 0, 100, TruthSpec::Exponential));
        assert_eq!(base, replication_seed(7, 0, 100, TruthSpec::Exponential));
    }

    #[test]
    fn rate_formula() {
        assert!((contraction_rate(100) - (100f64.ln() / 100.0).cbrt()).abs() < 1e-15);
    }

    #[test]
    fn slope_fit_recovers_power_law() {
        let pts: Vec<(f64, f64)> = [10.0f64, 100.0, 1000.0]
            .iter()
            .map(|&n| (n.ln(), (2.0 * n.powf(-0.4)).ln()))
            .collect();
        assert!((log_log_fit(&pts) + 0.4).abs() < 1e-12);
    }

    #[test]
    fn fmt_real_has_17_digits() {
        assert_eq!(fmt_real(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_real(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn small_coverage_shape() {
        let settings = ExperimentSettings {
            chain: ChainConfig { burn_in: 20, iterations: 50, thin: 1, seed: 3 },
            ..Default::default()
        };
        let rep = coverage_experiment(TruthSpec::Exponential, &[30], &[0.5, 1.0], 4, &settings).unwrap();
        assert_eq!(rep.rows.len(), 2);
        for r in &rep.rows {
            assert_eq!(r.replications, 4);
            assert!((0.0..=1.0).contains(&r.coverage));
            assert_eq!(r.coverage, r.covered as f64 / 4.0);
            assert!(r.mean_length >= 0.0);
        }
        let again = coverage_experiment(TruthSpec::Exponential, &[30], &[0.5, 1.0], 4, &settings).unwrap();
        assert_eq!(rep, again);
        assert!(coverage_experiment(TruthSpec::Exponential, &[30], &[1.0], 0, &settings).is_err());
    }

    #[test]
    fn rate_preconditions() {
        let s = ExperimentSettings::default();
        assert!(rate_study(TruthSpec::Exponential, &[100, 400], 1, &s).is_err());
        assert!(rate_study(TruthSpec::Exponential, &[400, 100, 1600], 1, &s).is_err());
    }
}
