//! Posterior functionals and distances between densities.
//!
//! Quantiles use linear interpolation between order statistics: for sorted values
//! `v_0 ≤ … ≤ v_{N-1}` the `p`-quantile is `v_j + (h − j)(v_{j+1} − v_j)` with
//! `h = (N − 1) p` and `j = ⌊h⌋`.
//!
//! The L1 distance is half-normalized, `d(f, g) = ½ ∫ |f − g|`, so it lies in `[0, 1]`.
//! Hellinger is `H(f, g) = sqrt(1 − ∫ sqrt(f g))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gibbs::PosteriorDraws;
use crate::model::{Density, MixtureOfUniforms};

/// Absolute tolerance for distances that need numerical integration.
pub const QUADRATURE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CredibleBand {
    pub grid: Vec<f64>,
    pub mean: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub level: f64,
}

/// `p`-quantile of already sorted values.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty set");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let j = h.floor() as usize;
    if j + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    sorted[j] + (h - j as f64) * (sorted[j + 1] - sorted[j])
}

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid(format!("credible level must lie in (0, 1), got {level}")));
    }
    Ok(())
}

fn check_draws(draws: &PosteriorDraws) -> Result<()> {
    // a single draw gives the degenerate interval [f(x), f(x)]
    if draws.is_empty() {
        return Err(Error::invalid("credible intervals need at least one posterior draw"));
    }
    Ok(())
}

fn interval_from_values(mut values: Vec<f64>, level: f64) -> (f64, f64) {
    values.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    (quantile_sorted(&values, tail), quantile_sorted(&values, 1.0 - tail))
}

/// Equal-tailed credible interval for `f(x)` at `level`.
pub fn interval_at(draws: &PosteriorDraws, x: f64, level: f64) -> Result<(f64, f64)> {
    check_level(level)?;
    check_draws(draws)?;
    if !(x > 0.0) {
        return Err(Error::domain(format!("interval requested at non-positive x = {x}")));
    }
    Ok(interval_from_values(draws.values_at(x), level))
}

/// Pointwise mean and equal-tailed interval of `f(x)` at each grid point.
pub fn pointwise_band(draws: &PosteriorDraws, grid: &[f64], level: f64) -> Result<CredibleBand> {
    check_level(level)?;
    check_draws(draws)?;
    if grid.is_empty() {
        return Err(Error::invalid("evaluation grid is empty"));
    }
    if let Some(x) = grid.iter().find(|x| !(**x > 0.0)) {
        return Err(Error::domain(format!("grid point {x} is not positive")));
    }
    let mut band = CredibleBand {
        grid: grid.to_vec(),
        mean: Vec::with_capacity(grid.len()),
        lower: Vec::with_capacity(grid.len()),
        upper: Vec::with_capacity(grid.len()),
        level,
    };
    for &x in grid {
        let values = draws.values_at(x);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let (lo, hi) = interval_from_values(values, level);
        // keep lower <= mean <= upper under rounding
        band.mean.push(mean.clamp(lo, hi));
        band.lower.push(lo);
        band.upper.push(hi);
    }
    Ok(band)
}

/// Pointwise average of `f_θ` over the draws.
pub fn posterior_mean_density(draws: &PosteriorDraws, grid: &[f64]) -> Vec<f64> {
    let d = draws.len() as f64;
    grid.iter()
        .map(|&x| draws.iter().map(|t| t.density_at(x)).sum::<f64>() / d)
        .collect()
}

/// The posterior mean density as an exact mixture: every component of every
/// draw with its weight divided by the number of draws.
pub fn posterior_mean_mixture(draws: &PosteriorDraws) -> MixtureOfUniforms {
    let d = draws.len() as f64;
    let mut weights = Vec::new();
    let mut locations = Vec::new();
    for theta in draws {
        for (w, m) in theta.components() {
            weights.push(w / d);
            locations.push(m);
        }
    }
    MixtureOfUniforms::from_parts_unchecked(weights, locations).canonical()
}

/// `n` equally spaced points from `x_max / n` to `1.05 · x_max`.
pub fn default_grid(x_max: f64, n: usize) -> Vec<f64> {
    let lo = x_max / n as f64;
    let hi = 1.05 * x_max;
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + step * i as f64).collect()
}

/// Half-normalized L1 distance. Exact for two step densities, adaptive quadrature otherwise.
pub fn l1_distance(f: &dyn Density, g: &dyn Density) -> f64 {
    match (f.as_mixture(), g.as_mixture()) {
        (Some(a), Some(b)) => l1_steps(a, b),
        (Some(a), None) => l1_step_smooth(a, g),
        (None, Some(b)) => l1_step_smooth(b, f),
        (None, None) => l1_smooth(f, g),
    }
}

/// Hellinger distance. Exact for two step densities, adaptive quadrature otherwise.
pub fn hellinger_distance(f: &dyn Density, g: &dyn Density) -> f64 {
    let affinity = match (f.as_mixture(), g.as_mixture()) {
        (Some(a), Some(b)) => affinity_steps(a, b),
        (Some(a), None) => affinity_step_smooth(a, g),
        (None, Some(b)) => affinity_step_smooth(b, f),
        (None, None) => affinity_smooth(f, g),
    };
    (1.0 - affinity).max(0.0).sqrt()
}

/// Pieces `(left, right, height)` of a step density, left to right.
fn step_pieces(m: &MixtureOfUniforms) -> Vec<(f64, f64, f64)> {
    let view = m.to_step();
    let mut prev = 0.0;
    view.knots()
        .iter()
        .zip(view.heights())
        .map(|(&t, &h)| {
            let piece = (prev, t, h);
            prev = t;
            piece
        })
        .collect()
}

/// Walk the union of knots of two step densities, calling `visit(width, f, g)`
/// on every interval where at least one of them is positive.
fn merge_steps(a: &MixtureOfUniforms, b: &MixtureOfUniforms, mut visit: impl FnMut(f64, f64, f64)) {
    let pa = step_pieces(a);
    let pb = step_pieces(b);
    let (mut i, mut j) = (0, 0);
    let mut left = 0.0;
    while i < pa.len() || j < pb.len() {
        let ra = pa.get(i).map_or(f64::INFINITY, |p| p.1);
        let rb = pb.get(j).map_or(f64::INFINITY, |p| p.1);
        let right = ra.min(rb);
        let fa = pa.get(i).map_or(0.0, |p| p.2);
        let fb = pb.get(j).map_or(0.0, |p| p.2);
        visit(right - left, fa, fb);
        left = right;
        if ra == right {
            i += 1;
        }
        if rb == right {
            j += 1;
        }
    }
}

fn l1_steps(a: &MixtureOfUniforms, b: &MixtureOfUniforms) -> f64 {
    let mut total = 0.0;
    merge_steps(a, b, |w, fa, fb| total += w * (fa - fb).abs());
    (0.5 * total).clamp(0.0, 1.0)
}

fn affinity_steps(a: &MixtureOfUniforms, b: &MixtureOfUniforms) -> f64 {
    let mut total = 0.0;
    merge_steps(a, b, |w, fa, fb| total += w * (fa * fb).sqrt());
    total.min(1.0)
}

/// Smallest `T` (doubling from 1) with `1 − G(T) < 1e-13`.
fn tail_cutoff(g: &dyn Density) -> f64 {
    let mut t = 1.0;
    while 1.0 - g.cdf(t) >= 1e-13 && t < 1e12 {
        t *= 2.0;
    }
    t
}

/// `½ ∫ |f − g| = ∫ (g − f)_+` for densities that both integrate to one.
/// Beyond the step support `f = 0`, so that tail contributes `1 − G(τ_S)`.
fn l1_step_smooth(step: &MixtureOfUniforms, g: &dyn Density) -> f64 {
    let cutoff = tail_cutoff(g);
    let pieces = step_pieces(step);
    let support = pieces.last().unwrap().1;
    let span = support.min(cutoff);
    let mut total = 0.0;
    for &(a, b, h) in &pieces {
        if a >= cutoff {
            break;
        }
        let b = b.min(cutoff);
        let tol = QUADRATURE_TOL * 0.1 * (b - a) / span;
        total += integrate(|x| (g.pdf(x) - h).max(0.0), a, b, tol);
    }
    total += (1.0 - g.cdf(support)).max(0.0);
    total.clamp(0.0, 1.0)
}

fn affinity_step_smooth(step: &MixtureOfUniforms, g: &dyn Density) -> f64 {
    let cutoff = tail_cutoff(g);
    let pieces = step_pieces(step);
    let span = pieces.last().unwrap().1.min(cutoff);
    let mut total = 0.0;
    for &(a, b, h) in &pieces {
        if a >= cutoff {
            break;
        }
        let b = b.min(cutoff);
        let tol = QUADRATURE_TOL * 0.1 * (b - a) / span;
        total += h.sqrt() * integrate(|x| g.pdf(x).sqrt(), a, b, tol / h.sqrt().max(1.0));
    }
    total.min(1.0)
}

fn l1_smooth(f: &dyn Density, g: &dyn Density) -> f64 {
    let cutoff = tail_cutoff(f).max(tail_cutoff(g));
    let total = integrate(|x| (f.pdf(x) - g.pdf(x)).abs(), 0.0, cutoff, QUADRATURE_TOL * 0.1);
    (0.5 * total).clamp(0.0, 1.0)
}

fn affinity_smooth(f: &dyn Density, g: &dyn Density) -> f64 {
    let cutoff = tail_cutoff(f).min(tail_cutoff(g));
    integrate(|x| (f.pdf(x) * g.pdf(x)).sqrt(), 0.0, cutoff, QUADRATURE_TOL * 0.1).min(1.0)
}

/// Adaptive Simpson quadrature on `[a, b]` to absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol.max(1e-15), 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}
