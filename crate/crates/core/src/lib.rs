//! Empirical-Bayes inference for monotone non-increasing densities on `[0, ∞)`.
//!
//! A monotone density is a scale mixture of `Uniform(0, μ)` kernels. This crate
//! fits the Grenander estimator (the nonparametric MLE), expresses it exactly as a
//! finite mixture of uniforms, centers a Dirichlet × Pareto prior on that fit and
//! samples the resulting posterior with a conjugate Gibbs sampler.
//!
//! ```
//! use ebmono::{grenander_fit, Sample};
//!
//! let data = Sample::new(vec![3.0, 1.0]).unwrap();
//! let fit = grenander_fit(&data);
//! assert_eq!(fit.weights(), &[0.25, 0.75]);
//! assert_eq!(fit.locations(), &[1.0, 3.0]);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
mod dist;
pub mod error;
pub mod experiments;
pub mod gibbs;
pub mod grenander;
pub mod model;
pub mod prior;
pub mod summaries;

pub use error::{Error, Result};
pub use experiments::{
    coverage_experiment, gen_truth, rate_study, CoverageReport, CoverageRow, ExperimentSettings,
    RateReport, RateRow, TruthSpec,
};
pub use gibbs::{init_state, run_chain, ChainConfig, GibbsState, PosteriorDraws};
pub use grenander::{empirical_cdf, grenander_fit, least_concave_majorant, ConcaveMajorant, EcdfPoints};
pub use model::{Density, MixtureOfUniforms, Sample, StepDensityView};
pub use prior::{hyperparams, EmpiricalPrior, HyperSchedule, Hyperparams};
pub use summaries::{
    hellinger_distance, interval_at, l1_distance, pointwise_band, posterior_mean_density,
    posterior_mean_mixture, CredibleBand,
};
