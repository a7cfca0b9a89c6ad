//! C ABI over `ebmono`.
//!
//! Objects cross the boundary as opaque heap handles (`EbSample`, `EbMixture`,
//! `EbDraws`) that the caller releases with the matching `*_free`. Every fallible
//! function returns an [`EbStatus`] and writes results through out-pointers; the
//! message for the most recent failure on the calling thread is available from
//! [`eb_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use ebmono::{
    cli, grenander_fit, hellinger_distance, interval_at, l1_distance, pointwise_band, posterior_mean_density,
    run_chain, ChainConfig, EmpiricalPrior, Error, HyperSchedule, MixtureOfUniforms, PosteriorDraws, Sample,
};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DomainError = 3,
    Infeasible = 4,
    BufferTooSmall = 5,
    IoError = 6,
    ParseError = 7,
    Panic = 8,
}

/// Observations, sorted ascending.
pub struct EbSample(Sample);

/// A finite mixture of uniforms.
pub struct EbMixture(MixtureOfUniforms);

/// Retained posterior draws.
pub struct EbDraws(PosteriorDraws);

/// Chain lengths and seed, mirroring the Rust `ChainConfig`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EbChainConfig {
    pub burn_in: u64,
    pub iterations: u64,
    pub thin: u64,
    pub seed: u64,
}

impl From<EbChainConfig> for ChainConfig {
    fn from(c: EbChainConfig) -> Self {
        ChainConfig {
            burn_in: c.burn_in as usize,
            iterations: c.iterations as usize,
            thin: c.thin as usize,
            seed: c.seed,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(EbStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Domain(_) => EbStatus::DomainError,
            Error::InvalidInput(_) | Error::DimensionMismatch { .. } => EbStatus::InvalidArgument,
            Error::Infeasible(_) => EbStatus::Infeasible,
            Error::Parse { .. } | Error::EmptyData(_) | Error::Json(_) => EbStatus::ParseError,
            Error::Io(_) => EbStatus::IoError,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(EbStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            clear_last_error();
            EbStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside ebmono".into());
            EbStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice_in<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn slice_out<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn write_out<T>(p: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

fn copy_into(src: &[f64], dst: *mut f64, cap: usize) -> Result<(), Failure> {
    if cap < src.len() {
        return Err(Failure(
            EbStatus::BufferTooSmall,
            format!("buffer holds {cap} values, {} needed", src.len()),
        ));
    }
    let out = unsafe { slice_out(dst, src.len(), "output buffer")? };
    out.copy_from_slice(src);
    Ok(())
}

/// Message describing the most recent failure on this thread, or NULL.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn eb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// The library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn eb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `values` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eb_sample_new(values: *const f64, n: usize, out: *mut *mut EbSample) -> EbStatus {
    guard(|| {
        let v = slice_in(values, n, "values")?;
        let sample = Sample::new(v.to_vec())?;
        write_out(out, Box::into_raw(Box::new(EbSample(sample))), "out")
    })
}

/// Read a data file with the same rules as the command-line tool.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eb_sample_from_file(path: *const c_char, out: *mut *mut EbSample) -> EbStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Failure(EbStatus::InvalidArgument, "path is not valid UTF-8".into()))?;
        let sample = cli::ingest(Path::new(path))?;
        write_out(out, Box::into_raw(Box::new(EbSample(sample))), "out")
    })
}

/// Number of observations, or 0 for NULL.
///
/// # Safety
/// `sample` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eb_sample_len(sample: *const EbSample) -> usize {
    sample.as_ref().map_or(0, |s| s.0.len())
}

/// Copy the sorted observations into `buf` (capacity `cap`).
///
/// # Safety
/// `sample` must be a live handle; `buf` must have room for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn eb_sample_values(sample: *const EbSample, buf: *mut f64, cap: usize) -> EbStatus {
    guard(|| copy_into(borrow(sample, "sample")?.0.values(), buf, cap))
}

/// # Safety
/// `sample` must be NULL or a handle from this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn eb_sample_free(sample: *mut EbSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

/// Canonical mixture from `s` weights and locations.
///
/// # Safety
/// `weights` and `locations` must each point to `s` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eb_mixture_new(
    weights: *const f64,
    locations: *const f64,
    s: usize,
    out: *mut *mut EbMixture,
) -> EbStatus {
    guard(|| {
        let w = slice_in(weights, s, "weights")?;
        let m = slice_in(locations, s, "locations")?;
        let mix = MixtureOfUniforms::new(w.to_vec(), m.to_vec())?;
        write_out(out, Box::into_raw(Box::new(EbMixture(mix))), "out")
    })
}

/// Number of components, or 0 for NULL.
///
/// # Safety
/// `mixture` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eb_mixture_len(mixture: *const EbMixture) -> usize {
    mixture.as_ref().map_or(0, |m| m.0.len())
}

/// # Safety
/// `mixture` must be a live handle; `buf` must have room for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn eb_mixture_weights(mixture: *const EbMixture, buf: *mut f64, cap: usize) -> EbStatus {
    guard(|| copy_into(borrow(mixture, "mixture")?.0.weights(), buf, cap))
}

/// # Safety
/// `mixture` must be a live handle; `buf` must have room for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn eb_mixture_locations(mixture: *const EbMixture, buf: *mut f64, cap: usize) -> EbStatus {
    guard(|| copy_into(borrow(mixture, "mixture")?.0.locations(), buf, cap))
}

/// Density at `x > 0`.
///
/// # Safety
/// `mixture` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eb_mixture_density(mixture: *const EbMixture, x: f64, out: *mut f64) -> EbStatus {
    guard(|| {
        let v = borrow(mixture, "mixture")?.0.density(x)?;
        write_out(out, v, "out")
    })
}

/// Distribution function at `x ≥ 0`.
///
/// # Safety
/// `mixture` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eb_mixture_cdf(mixture: *const EbMixture, x: f64, out: *mut f64) -> EbStatus {
    guard(|| {
        let v = borrow(mixture, "mixture")?.0.cdf(x)?;
        write_out(out, v, "out")
    })
}

/// Log-likelihood of the sample; `-INFINITY` when an observation is outside the support.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eb_mixture_log_likelihood(
    mixture: *const EbMixture,
    sample: *const EbSample,
    out: *mut f64,
) -> EbStatus {
    guard(|| {
        let m = borrow(mixture, "mixture")?;
        let s = borrow(sample, "sample")?;
        write_out(out, m.0.log_likelihood(&s.0), "out")
    })
}

/// # Safety
/// `mixture` must be NULL or a handle from this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn eb_mixture_free(mixture: *mut EbMixture) {
    if !mixture.is_null() {
        drop(Box::from_raw(mixture));
    }
}

/// The Grenander estimator of the sample as a mixture of uniforms.
///
/// # Safety
/// `sample` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eb_grenander_fit(sample: *const EbSample, out: *mut *mut EbMixture) -> EbStatus {
    guard(|| {
        let fit = grenander_fit(&borrow(sample, "sample")?.0);
        write_out(out, Box::into_raw(Box::new(EbMixture(fit))), "out")
    })
}

/// Prior constants for sample size `n` under the schedule
/// `c = c_mult · n^{5/3} / (ln n)^{2/3}`, `δ = ln n / delta_div`.
///
/// # Safety
/// `c` and `delta` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eb_hyperparams(n: usize, c_mult: f64, delta_div: f64, c: *mut f64, delta: *mut f64) -> EbStatus {
    guard(|| {
        let hp = HyperSchedule { c_mult, delta_div }.at(n)?;
        write_out(c, hp.c, "c")?;
        write_out(delta, hp.delta, "delta")
    })
}

/// Default chain: 1000 burn-in sweeps, 2000 retained iterations, no thinning, seed 0.
#[no_mangle]
pub extern "C" fn eb_chain_config_default() -> EbChainConfig {
    let c = ChainConfig::default();
    EbChainConfig {
        burn_in: c.burn_in as u64,
        iterations: c.iterations as u64,
        thin: c.thin as u64,
        seed: c.seed,
    }
}

/// Full pipeline: Grenander center, prior from the schedule, Gibbs chain.
///
/// # Safety
/// `sample` must be a live handle, `config` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eb_posterior_fit(
    sample: *const EbSample,
    config: *const EbChainConfig,
    c_mult: f64,
    delta_div: f64,
    out: *mut *mut EbDraws,
) -> EbStatus {
    guard(|| {
        let data = &borrow(sample, "sample")?.0;
        let chain: ChainConfig = (*borrow(config, "config")?).into();
        let hp = HyperSchedule { c_mult, delta_div }.at(data.len())?;
        let center = grenander_fit(data);
        let prior = EmpiricalPrior::build(&center, hp);
        let draws = run_chain(&prior, &center, data, &chain)?;
        write_out(out, Box::into_raw(Box::new(EbDraws(draws))), "out")
    })
}

/// Number of retained draws, or 0 for NULL.
///
/// # Safety
/// `draws` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eb_draws_len(draws: *const EbDraws) -> usize {
    draws.as_ref().map_or(0, |d| d.0.len())
}

/// Copy of draw `index` as a new mixture handle (components in label order).
///
/// # Safety
/// `draws` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eb_draws_get(draws: *const EbDraws, index: usize, out: *mut *mut EbMixture) -> EbStatus {
    guard(|| {
        let d = borrow(draws, "draws")?;
        let theta = d.0.draws().get(index).ok_or_else(|| {
            Failure(EbStatus::InvalidArgument, format!("draw index {index} out of range 0..{}", d.0.len()))
        })?;
        write_out(out, Box::into_raw(Box::new(EbMixture(theta.clone()))), "out")
    })
}

/// Equal-tailed credible interval for `f(x)`.
///
/// # Safety
/// `draws` must be a live handle; `lower` and `upper` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eb_draws_interval(
    draws: *const EbDraws,
    x: f64,
    level: f64,
    lower: *mut f64,
    upper: *mut f64,
) -> EbStatus {
    guard(|| {
        let (lo, hi) = interval_at(&borrow(draws, "draws")?.0, x, level)?;
        write_out(lower, lo, "lower")?;
        write_out(upper, hi, "upper")
    })
}

/// Pointwise mean and credible band on `grid` (length `len`); each output holds `len` doubles.
///
/// # Safety
/// `grid`, `mean`, `lower` and `upper` must each point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn eb_draws_band(
    draws: *const EbDraws,
    grid: *const f64,
    len: usize,
    level: f64,
    mean: *mut f64,
    lower: *mut f64,
    upper: *mut f64,
) -> EbStatus {
    guard(|| {
        let d = borrow(draws, "draws")?;
        let g = slice_in(grid, len, "grid")?;
        let band = pointwise_band(&d.0, g, level)?;
        slice_out(mean, len, "mean")?.copy_from_slice(&band.mean);
        slice_out(lower, len, "lower")?.copy_from_slice(&band.lower);
        slice_out(upper, len, "upper")?.copy_from_slice(&band.upper);
        Ok(())
    })
}

/// Posterior mean density on `grid`.
///
/// # Safety
/// `grid` and `out` must each point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn eb_draws_mean_density(
    draws: *const EbDraws,
    grid: *const f64,
    len: usize,
    out: *mut f64,
) -> EbStatus {
    guard(|| {
        let d = borrow(draws, "draws")?;
        let g = slice_in(grid, len, "grid")?;
        slice_out(out, len, "out")?.copy_from_slice(&posterior_mean_density(&d.0, g));
        Ok(())
    })
}

/// # Safety
/// `draws` must be NULL or a handle from this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn eb_draws_free(draws: *mut EbDraws) {
    if !draws.is_null() {
        drop(Box::from_raw(draws));
    }
}

/// Half-normalized L1 distance `½ ∫ |f − g|`.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eb_l1_distance(a: *const EbMixture, b: *const EbMixture, out: *mut f64) -> EbStatus {
    guard(|| {
        let d = l1_distance(&borrow(a, "a")?.0, &borrow(b, "b")?.0);
        write_out(out, d, "out")
    })
}

/// Hellinger distance `sqrt(1 − ∫ sqrt(f g))`.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eb_hellinger_distance(a: *const EbMixture, b: *const EbMixture, out: *mut f64) -> EbStatus {
    guard(|| {
        let d = hellinger_distance(&borrow(a, "a")?.0, &borrow(b, "b")?.0);
        write_out(out, d, "out")
    })
}
