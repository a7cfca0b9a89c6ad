//! The data-centered empirical prior: `ω ~ Dir(1 + c ω̂)` independent of
//! `μ_s ~ Pareto(μ̂_s, δ)`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::dist;
use crate::error::{Error, Result};
use crate::model::MixtureOfUniforms;

/// Prior spread constants: Dirichlet concentration `c` and Pareto shape `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub c: f64,
    pub delta: f64,
}

impl Hyperparams {
    pub fn new(c: f64, delta: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) || !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::invalid(format!("hyperparameters must be positive, got c = {c}, delta = {delta}")));
        }
        Ok(Self { c, delta })
    }
}

/// Sample-size schedule `c = c_mult · n^{5/3} / (ln n)^{2/3}`, `δ = ln n / delta_div`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperSchedule {
    pub c_mult: f64,
    pub delta_div: f64,
}

impl Default for HyperSchedule {
    fn default() -> Self {
        Self { c_mult: 0.01, delta_div: 20.0 }
    }
}

impl HyperSchedule {
    pub fn at(&self, n: usize) -> Result<Hyperparams> {
        if n < 2 {
            return Err(Error::invalid(format!("hyperparameter schedule needs n >= 2, got {n}")));
        }
        let nf = n as f64;
        let log_n = nf.ln();
        let c = self.c_mult * nf.powf(5.0 / 3.0) / log_n.powf(2.0 / 3.0);
        let delta = log_n / self.delta_div;
        Hyperparams::new(c, delta)
    }
}

/// Default schedule evaluated at `n`.
pub fn hyperparams(n: usize) -> Result<Hyperparams> {
    HyperSchedule::default().at(n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalPrior {
    alpha: Vec<f64>,
    pareto_scales: Vec<f64>,
    delta: f64,
}

impl EmpiricalPrior {
    /// Center the prior on `theta_hat`: `α̂_s = 1 + c ω̂_s`, Pareto scales `μ̂_s`.
    pub fn build(theta_hat: &MixtureOfUniforms, hp: Hyperparams) -> Self {
        let center = if theta_hat.is_canonical() { theta_hat.clone() } else { theta_hat.canonical() };
        let alpha = center.weights().iter().map(|w| 1.0 + hp.c * w).collect();
        Self {
            alpha,
            pareto_scales: center.locations().to_vec(),
            delta: hp.delta,
        }
    }

    /// Explicit parameters, for priors not centered on a fit.
    pub fn new(alpha: Vec<f64>, pareto_scales: Vec<f64>, delta: f64) -> Result<Self> {
        if alpha.is_empty() || alpha.len() != pareto_scales.len() {
            return Err(Error::invalid("prior needs equally many Dirichlet parameters and Pareto scales"));
        }
        if !alpha.iter().all(|a| a.is_finite() && *a > 0.0) {
            return Err(Error::invalid("Dirichlet parameters must be positive"));
        }
        if !pareto_scales.iter().all(|m| m.is_finite() && *m > 0.0) {
            return Err(Error::invalid("Pareto scales must be positive"));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::invalid("Pareto shape must be positive"));
        }
        Ok(Self { alpha, pareto_scales, delta })
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn pareto_scales(&self) -> &[f64] {
        &self.pareto_scales
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// The prior mode `θ̂` (for a prior built from a fit) as a labeled mixture.
    pub fn mode(&self) -> MixtureOfUniforms {
        let excess: Vec<f64> = self.alpha.iter().map(|a| (a - 1.0).max(0.0)).collect();
        let total: f64 = excess.iter().sum();
        let weights = if total > 0.0 {
            excess.iter().map(|e| e / total).collect()
        } else {
            vec![1.0 / self.len() as f64; self.len()]
        };
        MixtureOfUniforms::from_parts_unchecked(weights, self.pareto_scales.clone())
    }

    /// One prior draw. Components stay bound to their labels, so locations are
    /// generally not sorted.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> MixtureOfUniforms {
        let weights = dist::dirichlet(&self.alpha, rng);
        let locations = self
            .pareto_scales
            .iter()
            .map(|&m| dist::pareto(m, self.delta, rng))
            .collect();
        MixtureOfUniforms::from_parts_unchecked(weights, locations)
    }

    /// Dirichlet log density at `ω` plus the Pareto log densities at `μ`.
    /// `theta` is read component by component in label order.
    pub fn log_density(&self, theta: &MixtureOfUniforms) -> Result<f64> {
        if theta.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: theta.len() });
        }
        let mut lp = 0.0;
        for (&m, &scale) in theta.locations().iter().zip(&self.pareto_scales) {
            if m < scale {
                return Ok(f64::NEG_INFINITY);
            }
            lp += self.delta.ln() + self.delta * scale.ln() - (self.delta + 1.0) * m.ln();
        }
        let alpha_sum: f64 = self.alpha.iter().sum();
        lp += ln_gamma(alpha_sum) - self.alpha.iter().map(|&a| ln_gamma(a)).sum::<f64>();
        for (&w, &a) in theta.weights().iter().zip(&self.alpha) {
            if a != 1.0 {
                lp += (a - 1.0) * w.ln();
            }
        }
        Ok(if lp.is_nan() { f64::NEG_INFINITY } else { lp })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn schedule_examples() {
        let hp = hyperparams(100).unwrap();
        let c = 0.01 * 100f64.powf(5.0 / 3.0) / 100f64.ln().powf(2.0 / 3.0);
        assert_eq!(hp.c, c);
        assert!((hp.c - 7.7834).abs() < 1e-4, "{}", hp.c);
        assert!((hp.delta - 0.230259).abs() < 1e-6);

        assert!((hyperparams(200).unwrap().delta - 0.264916).abs() < 1e-6);

        let hp = hyperparams(2).unwrap();
        assert!(hp.c > 0.0 && hp.c.is_finite());
        assert!(hyperparams(1).is_err());
        assert!(hyperparams(0).is_err());
    }

    #[test]
    fn schedule_overrides() {
        let s = HyperSchedule { c_mult: 0.02, delta_div: 10.0 };
        let a = s.at(100).unwrap();
        let b = hyperparams(100).unwrap();
        assert!((a.c - 2.0 * b.c).abs() < 1e-12);
        assert!((a.delta - 2.0 * b.delta).abs() < 1e-15);
    }

    #[test]
    fn build_examples() {
        let theta = MixtureOfUniforms::new(vec![0.25, 0.75], vec![1.0, 3.0]).unwrap();
        let p = EmpiricalPrior::build(&theta, Hyperparams::new(8.0, 1.0).unwrap());
        assert_eq!(p.alpha(), &[3.0, 7.0]);
        assert_eq!(p.pareto_scales(), &[1.0, 3.0]);

        let theta = MixtureOfUniforms::uniform(2.0).unwrap();
        let p = EmpiricalPrior::build(&theta, Hyperparams::new(5.5, 1.0).unwrap());
        assert_eq!(p.alpha(), &[6.5]);
        assert_eq!(p.mode(), theta);
    }

    #[test]
    fn log_density_examples() {
        let theta = MixtureOfUniforms::uniform(2.0).unwrap();
        let p = EmpiricalPrior::build(&theta, Hyperparams::new(3.0, 1.0).unwrap());
        assert!((p.log_density(&theta).unwrap() + 2f64.ln()).abs() < 1e-12);

        let below = MixtureOfUniforms::uniform(1.5).unwrap();
        assert_eq!(p.log_density(&below).unwrap(), f64::NEG_INFINITY);

        let two = MixtureOfUniforms::new(vec![0.5, 0.5], vec![1.0, 3.0]).unwrap();
        assert!(matches!(p.log_density(&two), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn mode_beats_random_draws() {
        let theta = MixtureOfUniforms::new(vec![0.1, 0.3, 0.6], vec![0.4, 1.1, 2.5]).unwrap();
        let p = EmpiricalPrior::build(&theta, hyperparams(100).unwrap());
        let at_mode = p.log_density(&theta).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let draw = p.sample(&mut rng);
            assert!(p.log_density(&draw).unwrap() <= at_mode);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_supported() {
        let theta = MixtureOfUniforms::new(vec![0.4, 0.6], vec![1.0, 2.0]).unwrap();
        let p = EmpiricalPrior::build(&theta, hyperparams(50).unwrap());
        let a = p.sample(&mut ChaCha8Rng::seed_from_u64(1));
        let b = p.sample(&mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(a, b);
        for (m, s) in a.locations().iter().zip(p.pareto_scales()) {
            assert!(m >= s);
        }
    }

    #[test]
    fn alpha_excess_sums_to_c() {
        let theta = MixtureOfUniforms::new(vec![0.05, 0.2, 0.3, 0.45], vec![0.1, 0.2, 0.8, 1.9]).unwrap();
        let hp = hyperparams(500).unwrap();
        let p = EmpiricalPrior::build(&theta, hp);
        let excess: f64 = p.alpha().iter().map(|a| a - 1.0).sum();
        assert!((excess - hp.c).abs() < 1e-9);
        assert!(p.alpha().iter().all(|&a| a > 1.0));
    }
}
