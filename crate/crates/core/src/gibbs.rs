//! Conjugate Gibbs sampler for the posterior `L_n(θ) Π_n(dθ)`.
//!
//! Latent allocations `z_i` make every conditional exact:
//!
//! * `P(z_i = s | ω, μ) ∝ ω_s / μ_s · 1(X_i ≤ μ_s)`,
//! * `ω | z ~ Dir(α̂ + counts)`,
//! * `μ_s | z ~ Pareto(max(μ̂_s, max{X_i : z_i = s}), δ + n_s)`.
//!
//! Components are fixed in number and bound to their labels; empty components
//! draw their location from the prior.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist;
use crate::error::{Error, Result};
use crate::model::{MixtureOfUniforms, Sample};
use crate::prior::EmpiricalPrior;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub burn_in: usize,
    pub iterations: usize,
    pub thin: usize,
    pub seed: u64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self { burn_in: 1000, iterations: 2000, thin: 1, seed: 0 }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::invalid("chain needs at least one iteration"));
        }
        if self.thin == 0 {
            return Err(Error::invalid("thinning interval must be at least 1"));
        }
        Ok(())
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    /// Number of retained draws, `floor(iterations / thin)`.
    pub fn retained(&self) -> usize {
        self.iterations / self.thin
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GibbsState {
    theta: MixtureOfUniforms,
    allocations: Vec<usize>,
    counts: Vec<usize>,
    cluster_max: Vec<Option<f64>>,
}

impl GibbsState {
    pub fn theta(&self) -> &MixtureOfUniforms {
        &self.theta
    }

    /// Zero-based component index of each observation, in sorted-data order.
    pub fn allocations(&self) -> &[usize] {
        &self.allocations
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Largest observation allocated to each component; `None` when empty.
    pub fn cluster_max(&self) -> &[Option<f64>] {
        &self.cluster_max
    }

    /// True when every observation lies inside the support of its component.
    pub fn is_feasible(&self, data: &Sample) -> bool {
        let locs = self.theta.locations();
        data.values()
            .iter()
            .zip(&self.allocations)
            .all(|(&x, &z)| x <= locs[z])
    }

    /// One systematic scan: allocations, then weights, then locations.
    pub fn sweep<R: Rng + ?Sized>(&mut self, prior: &EmpiricalPrior, data: &Sample, rng: &mut R) {
        self.update_allocations(data, rng);
        self.update_weights(prior, rng);
        self.update_locations(prior, rng);
    }

    fn update_allocations<R: Rng + ?Sized>(&mut self, data: &Sample, rng: &mut R) {
        let s_len = self.theta.len();
        let locs = self.theta.locations().to_vec();
        let log_w: Vec<f64> = self
            .theta
            .components()
            .map(|(w, m)| w.ln() - m.ln())
            .collect();
        let global_max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let scaled: Vec<f64> = log_w.iter().map(|&l| (l - global_max).exp()).collect();

        self.counts.iter_mut().for_each(|c| *c = 0);
        self.cluster_max.iter_mut().for_each(|c| *c = None);
        let mut probs = vec![0.0; s_len];
        for (i, &x) in data.values().iter().enumerate() {
            let mut total = 0.0;
            for s in 0..s_len {
                probs[s] = if x <= locs[s] { scaled[s] } else { 0.0 };
                total += probs[s];
            }
            if !(total > 1e-280) {
                // every feasible term underflowed against the global max; rescale locally
                let local_max = (0..s_len)
                    .filter(|&s| x <= locs[s])
                    .map(|s| log_w[s])
                    .fold(f64::NEG_INFINITY, f64::max);
                total = 0.0;
                for s in 0..s_len {
                    probs[s] = if x <= locs[s] { (log_w[s] - local_max).exp() } else { 0.0 };
                    total += probs[s];
                }
            }
            let u = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for s in 0..s_len {
                if probs[s] > 0.0 {
                    acc += probs[s];
                    chosen = Some(s);
                    if u < acc {
                        break;
                    }
                }
            }
            let z = chosen.expect("feasible state has a component covering every observation");
            self.allocations[i] = z;
            self.counts[z] += 1;
            // data are sorted, so the latest point is the cluster maximum
            self.cluster_max[z] = Some(x);
        }
    }

    fn update_weights<R: Rng + ?Sized>(&mut self, prior: &EmpiricalPrior, rng: &mut R) {
        let alpha: Vec<f64> = prior
            .alpha()
            .iter()
            .zip(&self.counts)
            .map(|(&a, &n)| a + n as f64)
            .collect();
        let weights = dist::dirichlet(&alpha, rng);
        self.theta = MixtureOfUniforms::from_parts_unchecked(weights, self.theta.locations().to_vec());
    }

    fn update_locations<R: Rng + ?Sized>(&mut self, prior: &EmpiricalPrior, rng: &mut R) {
        let delta = prior.delta();
        let locations = prior
            .pareto_scales()
            .iter()
            .zip(self.counts.iter().zip(&self.cluster_max))
            .map(|(&scale, (&n, cmax))| match cmax {
                Some(mx) => dist::pareto(scale.max(*mx), delta + n as f64, rng),
                None => dist::pareto(scale, delta, rng),
            })
            .collect();
        self.theta = MixtureOfUniforms::from_parts_unchecked(self.theta.weights().to_vec(), locations);
    }
}

/// Start at `θ̂` and draw allocations from their conditional given `θ̂`.
pub fn init_state<R: Rng + ?Sized>(
    prior: &EmpiricalPrior,
    theta_hat: &MixtureOfUniforms,
    data: &Sample,
    rng: &mut R,
) -> Result<GibbsState> {
    if theta_hat.len() != prior.len() {
        return Err(Error::DimensionMismatch { expected: prior.len(), found: theta_hat.len() });
    }
    if data.max() > theta_hat.support_max() {
        return Err(Error::Infeasible(format!(
            "largest observation {} exceeds the center's support {}",
            data.max(),
            theta_hat.support_max()
        )));
    }
    let s_len = prior.len();
    let mut state = GibbsState {
        theta: theta_hat.clone(),
        allocations: vec![0; data.len()],
        counts: vec![0; s_len],
        cluster_max: vec![None; s_len],
    };
    state.update_allocations(data, rng);
    Ok(state)
}

/// Retained posterior draws of `θ`, in chain order.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    draws: Vec<MixtureOfUniforms>,
    config: ChainConfig,
}

impl PosteriorDraws {
    pub fn new(draws: Vec<MixtureOfUniforms>, config: ChainConfig) -> Result<Self> {
        if draws.is_empty() {
            return Err(Error::invalid("posterior draws cannot be empty"));
        }
        let s = draws[0].len();
        if let Some(d) = draws.iter().find(|d| d.len() != s) {
            return Err(Error::DimensionMismatch { expected: s, found: d.len() });
        }
        Ok(Self { draws, config })
    }

    pub fn draws(&self) -> &[MixtureOfUniforms] {
        &self.draws
    }

    pub fn config(&self) -> &ChainConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MixtureOfUniforms> {
        self.draws.iter()
    }

    /// `f_θ(x)` for every draw.
    pub fn values_at(&self, x: f64) -> Vec<f64> {
        self.draws.iter().map(|d| d.density_at(x)).collect()
    }
}

impl<'a> IntoIterator for &'a PosteriorDraws {
    type Item = &'a MixtureOfUniforms;
    type IntoIter = std::slice::Iter<'a, MixtureOfUniforms>;

    fn into_iter(self) -> Self::IntoIter {
        self.draws.iter()
    }
}

/// Run `burn_in` discarded sweeps then `iterations` sweeps, keeping every
/// `thin`-th state. Deterministic in `config.seed`.
pub fn run_chain(
    prior: &EmpiricalPrior,
    theta_hat: &MixtureOfUniforms,
    data: &Sample,
    config: &ChainConfig,
) -> Result<PosteriorDraws> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = init_state(prior, theta_hat, data, &mut rng)?;
    for _ in 0..config.burn_in {
        state.sweep(prior, data, &mut rng);
    }
    let mut draws = Vec::with_capacity(config.retained());
    for t in 1..=config.iterations {
        state.sweep(prior, data, &mut rng);
        if t % config.thin == 0 {
            draws.push(state.theta.clone());
        }
    }
    PosteriorDraws::new(draws, *config)
}
