//! Random variates used by the prior and the Gibbs conditionals.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

/// `Pareto(scale, shape)` by inversion: `scale · U^{-1/shape}` with `U` uniform on `(0, 1]`.
///
/// Computed in log space; a draw that overflows `f64` is clamped to `f64::MAX`,
/// which only happens for tiny shapes.
pub(crate) fn pareto<R: Rng + ?Sized>(scale: f64, shape: f64, rng: &mut R) -> f64 {
    let u = 1.0 - rng.gen::<f64>();
    let log_draw = scale.ln() - u.ln() / shape;
    let draw = log_draw.exp();
    if draw.is_finite() {
        draw.max(scale)
    } else {
        f64::MAX
    }
}

/// `Dirichlet(alpha)` as normalized independent `Gamma(alpha_s, 1)` variates.
pub(crate) fn dirichlet<R: Rng + ?Sized>(alpha: &[f64], rng: &mut R) -> Vec<f64> {
    let mut draws: Vec<f64> = alpha
        .iter()
        .map(|&a| Gamma::new(a, 1.0).expect("Dirichlet parameters are positive").sample(rng))
        .collect();
    let total: f64 = draws.iter().sum();
    if total > 0.0 && total.is_finite() {
        draws.iter_mut().for_each(|g| *g /= total);
    } else {
        // every gamma underflowed; only reachable with very small alphas
        let idx = alpha
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        draws.iter_mut().for_each(|g| *g = 0.0);
        draws[idx] = 1.0;
    }
    draws
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pareto_cdf_at_twice_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let reps = 100_000;
        let hits = (0..reps).filter(|_| pareto(2.0, 1.0, &mut rng) <= 4.0).count();
        let p = hits as f64 / reps as f64;
        let se = (0.25f64 / reps as f64).sqrt();
        assert!((p - 0.5).abs() < 3.0 * se, "{p}");
    }

    #[test]
    fn pareto_never_below_scale_and_finite() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10_000 {
            let d = pareto(1.5, 0.03, &mut rng);
            assert!(d >= 1.5 && d.is_finite());
        }
    }

    #[test]
    fn dirichlet_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let reps = 100_000;
        let draws: Vec<f64> = (0..reps).map(|_| dirichlet(&[3.0, 7.0], &mut rng)[0]).collect();
        let mean = draws.iter().sum::<f64>() / reps as f64;
        // Beta(3, 7) variance
        let var = 3.0 * 7.0 / (100.0 * 11.0);
        let se = (var / reps as f64).sqrt();
        assert!((mean - 0.3).abs() < 3.0 * se, "{mean}");
    }
}
