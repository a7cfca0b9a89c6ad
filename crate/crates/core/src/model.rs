//! Finite mixtures of `Uniform(0, μ)` kernels and their step-density form.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WEIGHT_SUM_TOL: f64 = 1e-9;

/// A probability density on `[0, ∞)` that can be evaluated pointwise.
///
/// `pdf` is the right-continuous-at-zero density: `pdf(0)` is the limit `f(0+)`
/// and `pdf(x) = 0` for `x < 0`.
pub trait Density {
    fn pdf(&self, x: f64) -> f64;

    fn cdf(&self, x: f64) -> f64;

    /// The mixture backing this density, when it is a finite mixture of uniforms.
    /// Distances between two step densities are integrated exactly.
    fn as_mixture(&self) -> Option<&MixtureOfUniforms> {
        None
    }
}

/// `θ = (ω, μ)`: mixture weights on the simplex and uniform upper endpoints.
///
/// Two flavours share this type. [`MixtureOfUniforms::new`] builds the canonical
/// form used for point estimates: zero weights dropped, ties merged, locations
/// strictly increasing. [`MixtureOfUniforms::labeled`] keeps components bound to
/// their labels in the given order, which is what prior and posterior draws need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureOfUniforms {
    weights: Vec<f64>,
    locations: Vec<f64>,
}

impl MixtureOfUniforms {
    /// Canonical mixture. Weights must be non-negative and sum to one within
    /// `1e-9`; they are renormalized so the sum is one to rounding.
    pub fn new(weights: Vec<f64>, locations: Vec<f64>) -> Result<Self> {
        let raw = Self::labeled(weights, locations)?;
        Ok(raw.canonical())
    }

    /// Label-bound mixture: order is kept, zero weights are kept. Locations only
    /// need to be positive and finite.
    pub fn labeled(weights: Vec<f64>, locations: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("mixture needs at least one component"));
        }
        if weights.len() != locations.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                found: locations.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::invalid(format!("mixture weight {w} is not a finite non-negative number")));
        }
        if let Some(m) = locations.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::invalid(format!("mixture location {m} is not a finite positive number")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::invalid(format!("mixture weights sum to {total}, expected 1")));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(Self { weights, locations })
    }

    /// A single `Uniform(0, upper)`.
    pub fn uniform(upper: f64) -> Result<Self> {
        Self::new(vec![1.0], vec![upper])
    }

    /// Trusted constructor for internal callers that already hold valid parts.
    pub(crate) fn from_parts_unchecked(weights: Vec<f64>, locations: Vec<f64>) -> Self {
        debug_assert_eq!(weights.len(), locations.len());
        Self { weights, locations }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn components(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.weights.iter().copied().zip(self.locations.iter().copied())
    }

    /// Largest location carrying positive weight: the right end of the support.
    pub fn support_max(&self) -> f64 {
        self.components()
            .filter(|&(w, _)| w > 0.0)
            .map(|(_, m)| m)
            .fold(0.0, f64::max)
    }

    /// True when locations are strictly increasing and every weight is positive.
    pub fn is_canonical(&self) -> bool {
        self.weights.iter().all(|&w| w > 0.0) && self.locations.windows(2).all(|p| p[0] < p[1])
    }

    /// Sorted copy with zero weights dropped and tied locations merged.
    pub fn canonical(&self) -> Self {
        let mut parts: Vec<(f64, f64)> = self.components().filter(|&(w, _)| w > 0.0).collect();
        parts.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut weights: Vec<f64> = Vec::with_capacity(parts.len());
        let mut locations: Vec<f64> = Vec::with_capacity(parts.len());
        for (w, m) in parts {
            match locations.last() {
                Some(&last) if last == m => *weights.last_mut().unwrap() += w,
                _ => {
                    weights.push(w);
                    locations.push(m);
                }
            }
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        Self { weights, locations }
    }

    /// `f_θ(x) = Σ ω_s / μ_s · 1(x ≤ μ_s)` for `x > 0`.
    pub fn density(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::domain(format!("density evaluated at non-positive x = {x}")));
        }
        Ok(self.density_at(x))
    }

    pub(crate) fn density_at(&self, x: f64) -> f64 {
        self.components()
            .filter(|&(_, m)| x <= m)
            .map(|(w, m)| w / m)
            .sum()
    }

    /// `F_θ(x) = Σ ω_s min(x / μ_s, 1)` for `x ≥ 0`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain(format!("cdf evaluated at negative x = {x}")));
        }
        Ok(self.cdf_at(x))
    }

    pub(crate) fn cdf_at(&self, x: f64) -> f64 {
        let v: f64 = self.components().map(|(w, m)| w * (x / m).min(1.0)).sum();
        v.min(1.0)
    }

    /// `Σ_i log f_θ(X_i)`, or `-∞` when some observation lies beyond the support.
    pub fn log_likelihood(&self, data: &Sample) -> f64 {
        let logw: Vec<f64> = self.components().map(|(w, m)| w.ln() - m.ln()).collect();
        let mut total = 0.0;
        for &x in data.values() {
            let feasible = self
                .locations
                .iter()
                .zip(&logw)
                .filter(|&(&m, lw)| x <= m && lw.is_finite())
                .map(|(_, &lw)| lw);
            let lse = log_sum_exp(feasible);
            if lse == f64::NEG_INFINITY {
                return f64::NEG_INFINITY;
            }
            total += lse;
        }
        total
    }

    /// `n` iid draws from `f_θ`: a component with probability `ω_s`, then a point
    /// uniform on `(0, μ_s]`. Returned sorted.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Sample> {
        if n == 0 {
            return Err(Error::invalid("sample size must be at least 1"));
        }
        let mut cumulative = Vec::with_capacity(self.len());
        let mut acc = 0.0;
        for &w in &self.weights {
            acc += w;
            cumulative.push(acc);
        }
        let values = (0..n)
            .map(|_| {
                let u = rng.gen::<f64>() * acc;
                let s = cumulative
                    .partition_point(|&c| c <= u)
                    .min(self.len() - 1);
                // 1 - U is uniform on (0, 1]
                self.locations[s] * (1.0 - rng.gen::<f64>())
            })
            .collect();
        Sample::new(values)
    }

    /// Step form: knots at the sorted locations, heights `h_s = Σ_{r ≥ s} ω_r / μ_r`.
    pub fn to_step(&self) -> StepDensityView {
        let canon = if self.is_canonical() { self.clone() } else { self.canonical() };
        let mut heights = vec![0.0; canon.len()];
        let mut acc = 0.0;
        for s in (0..canon.len()).rev() {
            acc += canon.weights[s] / canon.locations[s];
            heights[s] = acc;
        }
        StepDensityView { knots: canon.locations, heights }
    }

    /// Inverse of [`to_step`](Self::to_step): `ω_s = τ_s (h_s − h_{s+1})`.
    pub fn from_step(view: &StepDensityView) -> Result<Self> {
        let s = view.knots.len();
        let weights: Vec<f64> = (0..s)
            .map(|i| {
                let next = if i + 1 < s { view.heights[i + 1] } else { 0.0 };
                view.knots[i] * (view.heights[i] - next)
            })
            .collect();
        Self::new(weights, view.knots.clone())
    }
}

impl Density for MixtureOfUniforms {
    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.density_at(x)
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            self.cdf_at(x)
        }
    }

    fn as_mixture(&self) -> Option<&MixtureOfUniforms> {
        Some(self)
    }
}

/// Piecewise-constant view of a canonical mixture: height `h_s` on `(τ_{s-1}, τ_s]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepDensityView {
    knots: Vec<f64>,
    heights: Vec<f64>,
}

impl StepDensityView {
    pub fn new(knots: Vec<f64>, heights: Vec<f64>) -> Result<Self> {
        if knots.is_empty() || knots.len() != heights.len() {
            return Err(Error::invalid("step density needs equally many knots and heights, at least one"));
        }
        if !knots.iter().all(|t| t.is_finite() && *t > 0.0) || !knots.windows(2).all(|p| p[0] < p[1]) {
            return Err(Error::invalid("step knots must be positive and strictly increasing"));
        }
        if !heights.iter().all(|h| h.is_finite() && *h > 0.0) {
            return Err(Error::invalid("step heights must be positive"));
        }
        if !heights.windows(2).all(|p| p[0] > p[1]) {
            return Err(Error::invalid("step heights must be strictly decreasing"));
        }
        let view = Self { knots, heights };
        let mass = view.mass();
        if (mass - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::invalid(format!("step density integrates to {mass}, expected 1")));
        }
        Ok(view)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    /// `Σ h_s (τ_s − τ_{s−1})` with `τ_0 = 0`.
    pub fn mass(&self) -> f64 {
        let mut prev = 0.0;
        let mut total = 0.0;
        for (&t, &h) in self.knots.iter().zip(&self.heights) {
            total += h * (t - prev);
            prev = t;
        }
        total
    }
}

/// Observations `X_1, …, X_n > 0`, stored sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("sample must contain at least one observation"));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::domain(format!("observation {i} = {v} is not a finite positive number")));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The largest observation `X_(n)`.
    pub fn max(&self) -> f64 {
        *self.values.last().expect("sample is never empty")
    }
}

pub(crate) fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.map(|t| (t - max).exp()).sum::<f64>().ln()
}
