mod common;

use common::{pareto_negative_moment, pareto_negative_moment_var, random_monotone_sample};
use ebmono::{grenander_fit, hyperparams, EmpiricalPrior, Hyperparams, MixtureOfUniforms};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn mode_beats_ten_thousand_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [20, 100, 400] {
        let data = random_monotone_sample(&mut rng, n);
        let center = grenander_fit(&data);
        let prior = EmpiricalPrior::build(&center, hyperparams(n).unwrap());
        let at_mode = prior.log_density(&center).unwrap();
        for _ in 0..10_000 {
            let draw = prior.sample(&mut rng);
            assert!(prior.log_density(&draw).unwrap() <= at_mode);
        }
    }
}

#[test]
fn pareto_negative_moments() {
    let center = MixtureOfUniforms::new(vec![0.2, 0.5, 0.3], vec![0.5, 1.2, 3.0]).unwrap();
    let prior = EmpiricalPrior::build(&center, hyperparams(100).unwrap());
    let delta = prior.delta();
    let reps = 200_000;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let draws: Vec<MixtureOfUniforms> = (0..reps).map(|_| prior.sample(&mut rng)).collect();
    for k in [1.0, 2.0, 3.0] {
        for (s, &scale) in prior.pareto_scales().iter().enumerate() {
            let mean = draws.iter().map(|d| d.locations()[s].powf(-k)).sum::<f64>() / reps as f64;
            let target = pareto_negative_moment(scale, delta, k);
            let se = (pareto_negative_moment_var(scale, delta, k) / reps as f64).sqrt();
            assert!((mean - target).abs() < 4.0 * se, "k = {k}, s = {s}: {mean} vs {target}");
        }
    }
}

#[test]
fn prior_draws_cover_the_centering_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let data = random_monotone_sample(&mut rng, 150);
    let center = grenander_fit(&data);
    let prior = EmpiricalPrior::build(&center, hyperparams(150).unwrap());
    for _ in 0..2000 {
        let draw = prior.sample(&mut rng);
        for (m, s) in draw.locations().iter().zip(prior.pareto_scales()) {
            assert!(m >= s);
        }
        assert!(draw.support_max() >= data.max());
        assert!(draw.log_likelihood(&data) > f64::NEG_INFINITY);
    }
}

#[test]
fn single_pareto_and_dirichlet_marginals() {
    let reps = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(4);

    let prior = EmpiricalPrior::new(vec![2.0], vec![2.0], 1.0).unwrap();
    let hits = (0..reps).filter(|_| prior.sample(&mut rng).locations()[0] <= 4.0).count();
    let p = hits as f64 / reps as f64;
    assert!((p - 0.5).abs() < 3.0 * (0.25f64 / reps as f64).sqrt(), "{p}");

    let center = MixtureOfUniforms::new(vec![0.25, 0.75], vec![1.0, 3.0]).unwrap();
    let prior = EmpiricalPrior::build(&center, Hyperparams::new(8.0, 1.0).unwrap());
    assert_eq!(prior.alpha(), &[3.0, 7.0]);
    let mean = (0..reps).map(|_| prior.sample(&mut rng).weights()[0]).sum::<f64>() / reps as f64;
    let se = (3.0 * 7.0 / (100.0 * 11.0) / reps as f64).sqrt();
    assert!((mean - 0.3).abs() < 3.0 * se, "{mean}");
}

#[test]
fn single_component_log_density_at_scale() {
    for scale in [0.5, 1.0, 4.0] {
        let center = MixtureOfUniforms::uniform(scale).unwrap();
        let prior = EmpiricalPrior::build(&center, Hyperparams::new(3.0, 1.0).unwrap());
        assert!((prior.log_density(&center).unwrap() + f64::ln(scale)).abs() < 1e-12);
    }
}
