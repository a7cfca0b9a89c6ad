//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use ebmono::{EmpiricalPrior, MixtureOfUniforms, Sample};
use rand::Rng;

/// Antitonic (non-increasing) weighted regression by pool-adjacent-violators.
/// Returns one fitted value per input.
pub fn pava_decreasing(y: &[f64], w: &[f64]) -> Vec<f64> {
    // blocks of (weighted mean, total weight, count)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::new();
    for (&yi, &wi) in y.iter().zip(w) {
        blocks.push((yi, wi, 1));
        while blocks.len() >= 2 {
            let b = blocks[blocks.len() - 1];
            let a = blocks[blocks.len() - 2];
            if a.0 <= b.0 {
                blocks.pop();
                blocks.pop();
                let wt = a.1 + b.1;
                blocks.push(((a.0 * a.1 + b.0 * b.1) / wt, wt, a.2 + b.2));
            } else {
                break;
            }
        }
    }
    blocks.into_iter().flat_map(|(m, _, c)| std::iter::repeat_n(m, c)).collect()
}

/// Grenander heights on each gap `(x_{j-1}, x_j]` of the distinct observations,
/// computed by PAVA on the raw ECDF slopes with gap-length weights.
pub fn grenander_heights_by_pava(data: &Sample) -> (Vec<f64>, Vec<f64>) {
    let n = data.len() as f64;
    let mut xs: Vec<f64> = Vec::new();
    let mut mass: Vec<f64> = Vec::new();
    for &x in data.values() {
        if xs.last() == Some(&x) {
            *mass.last_mut().unwrap() += 1.0 / n;
        } else {
            xs.push(x);
            mass.push(1.0 / n);
        }
    }
    let mut prev = 0.0;
    let mut slopes = Vec::new();
    let mut gaps = Vec::new();
    for (&x, &m) in xs.iter().zip(&mass) {
        slopes.push(m / (x - prev));
        gaps.push(x - prev);
        prev = x;
    }
    (xs, pava_decreasing(&slopes, &gaps))
}

/// Random sample from a mix of monotone truths, including ties.
pub fn random_monotone_sample<R: Rng>(rng: &mut R, n: usize) -> Sample {
    let kind = rng.gen_range(0..4);
    let mut values: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = 1.0 - rng.gen::<f64>();
            match kind {
                0 => -u.ln(),
                1 => u * 3.0,
                2 => u * u * 2.0,
                _ => (10.0 * u).round().max(1.0) / 4.0,
            }
        })
        .collect();
    values.retain(|v| *v > 0.0);
    if values.is_empty() {
        values.push(1.0);
    }
    Sample::new(values).unwrap()
}

/// `Pareto(scale, shape)` distribution function.
pub fn pareto_cdf(x: f64, scale: f64, shape: f64) -> f64 {
    if x < scale {
        0.0
    } else {
        1.0 - (scale / x).powf(shape)
    }
}

/// `E(μ^{-k})` for `μ ~ Pareto(scale, shape)`.
pub fn pareto_negative_moment(scale: f64, shape: f64, k: f64) -> f64 {
    shape / (shape + k) * scale.powf(-k)
}

/// `Var(μ^{-k})` for `μ ~ Pareto(scale, shape)`.
pub fn pareto_negative_moment_var(scale: f64, shape: f64, k: f64) -> f64 {
    let m2 = pareto_negative_moment(scale, shape, 2.0 * k);
    let m1 = pareto_negative_moment(scale, shape, k);
    m2 - m1 * m1
}

/// One-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic(values: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Random valid canonical mixture with up to `max_s` components.
pub fn random_mixture<R: Rng>(rng: &mut R, max_s: usize) -> MixtureOfUniforms {
    let s = rng.gen_range(1..=max_s);
    let w: Vec<f64> = (0..s).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    let m: Vec<f64> = (0..s).map(|_| rng.gen_range(0.1..5.0)).collect();
    MixtureOfUniforms::new(w.iter().map(|x| x / total).collect(), m).unwrap()
}

/// Prior with a single component.
pub fn single_component_prior(alpha: f64, scale: f64, delta: f64) -> EmpiricalPrior {
    EmpiricalPrior::new(vec![alpha], vec![scale], delta).unwrap()
}
