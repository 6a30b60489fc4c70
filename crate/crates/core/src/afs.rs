//! Adaptive frequency sampling.
//!
//! Starting from a handful of Chebyshev-spaced frequencies, each step fits
//! the sampled data twice with common-pole rational models of different
//! orders, evaluates the system where the two fits disagree most, and stops
//! once both the time-domain change between successive steps (`E1`) and the
//! frequency-domain dual-fit discrepancy (`E2`) have stayed below their
//! thresholds for the requested number of validation steps.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::laplace::{self, FsmGrid, LaplaceError, TimeSeries};
use crate::systems::{FrequencyDomainSystem, SystemError};
use crate::vecfit::{self, FitError, FitOptions, RationalModel, Spectrum};
use crate::FrequencySample;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AfsError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("fit orders degenerate for {samples} samples (low order {low}, high order {high})")]
    DegenerateOrder {
        samples: usize,
        high: usize,
        low: usize,
    },
    #[error("channel {channel} of the high-order fit is identically zero on the grid")]
    DegenerateChannel { channel: usize },
    #[error("test channel {channel} has zero energy on the time grid")]
    ZeroEnergy { channel: usize },
    #[error("time series are on different grids")]
    GridMismatch,
    #[error("every grid point lies within the exclusion radius of a sample")]
    ExhaustedGrid,
    #[error("no convergence after {iterations} iterations")]
    NotConverged {
        iterations: usize,
        partial: Box<AfsResult>,
    },
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Laplace(#[from] LaplaceError),
}

/// Sweep constants. `orf` and `test` may be left empty, in which case
/// [`AfsConfig::resolve_channels`] fills them.
#[derive(Debug, Clone, PartialEq)]
pub struct AfsConfig {
    /// Time period `T` of the response (s).
    pub period: f64,
    /// Upper edge of the band (rad/s).
    pub omega_max: f64,
    /// Contour abscissa (1/s).
    pub eta: f64,
    pub initial_count: usize,
    pub alpha_high: f64,
    pub alpha_low: f64,
    pub e1_threshold: f64,
    pub e2_threshold: f64,
    pub validation_steps: usize,
    /// Observation channels used for pole identification.
    pub orf: Vec<usize>,
    /// Channels checked for convergence.
    pub test: Vec<usize>,
    /// Seed for the random observation-channel draw.
    pub seed: u64,
    /// Number of random observation channels drawn when `orf` is empty.
    pub random_orf_count: usize,
    pub grid_points: usize,
    pub time_points: usize,
    pub max_iterations: usize,
    pub relocations: usize,
    /// Reconstruct time histories only from poles left of `re(s) = eta`
    /// and inside `|im(s)| <= omega_max`; otherwise every pole is summed.
    pub band_limited_inverse: bool,
}

impl AfsConfig {
    pub fn new(period: f64, omega_max: f64, eta: f64) -> Self {
        Self {
            period,
            omega_max,
            eta,
            initial_count: 16,
            alpha_high: 2.0,
            alpha_low: 2.3,
            e1_threshold: 1e-4,
            e2_threshold: 2e-3,
            validation_steps: 3,
            orf: Vec::new(),
            test: Vec::new(),
            seed: 0,
            random_orf_count: 5,
            grid_points: 4096,
            time_points: 512,
            max_iterations: 500,
            relocations: 3,
            band_limited_inverse: true,
        }
    }

    /// Band and contour matching a Fourier-series grid of `samples` points
    /// over `period` with damping `kappa`.
    pub fn matching_fsm(period: f64, samples: usize, kappa: f64) -> Result<Self, AfsError> {
        let grid = FsmGrid::new(period, samples)?;
        Ok(Self::new(
            period,
            grid.omega_max(),
            laplace::damping_eta(kappa, period),
        ))
    }

    pub fn validate(&self, channel_count: usize) -> Result<(), AfsError> {
        let fail = |msg: String| Err(AfsError::Config(msg));
        if !(self.period.is_finite() && self.period > 0.0) {
            return fail(alloc::format!(
                "period must be positive, got {}",
                self.period
            ));
        }
        if !(self.omega_max.is_finite() && self.omega_max > 0.0) {
            return fail(alloc::format!(
                "omega_max must be positive, got {}",
                self.omega_max
            ));
        }
        if !self.eta.is_finite() {
            return fail("eta must be finite".into());
        }
        if self.initial_count < 4 {
            return fail(alloc::format!(
                "initial_count must be at least 4, got {}",
                self.initial_count
            ));
        }
        if !(1.0 < self.alpha_high && self.alpha_high < self.alpha_low) {
            return fail(alloc::format!(
                "need 1 < alpha_high < alpha_low, got {} and {}",
                self.alpha_high,
                self.alpha_low
            ));
        }
        if !(self.e1_threshold > 0.0 && self.e2_threshold > 0.0) {
            return fail("thresholds must be positive".into());
        }
        if self.grid_points < 2 || self.time_points < 2 {
            return fail("grid_points and time_points must be at least 2".into());
        }
        if self.orf.is_empty() || self.test.is_empty() {
            return fail("observation and test channel sets must be nonempty".into());
        }
        for &k in self.orf.iter().chain(&self.test) {
            if k >= channel_count {
                return fail(alloc::format!(
                    "channel {k} out of range for {channel_count} channels"
                ));
            }
        }
        for (i, k) in self.orf.iter().enumerate() {
            if self.orf[..i].contains(k) {
                return fail(alloc::format!("observation channel {k} listed twice"));
            }
        }
        for (i, k) in self.test.iter().enumerate() {
            if self.test[..i].contains(k) {
                return fail(alloc::format!("test channel {k} listed twice"));
            }
        }
        Ok(())
    }

    /// Fills empty channel sets: observation channels are drawn uniformly
    /// without replacement with the configured seed; test channels default
    /// to every channel not observed (or the observed ones if none remain).
    pub fn resolve_channels(&mut self, channel_count: usize) {
        if self.orf.is_empty() {
            self.orf = random_channels(channel_count, self.random_orf_count, self.seed);
        }
        if self.test.is_empty() {
            self.test = (0..channel_count)
                .filter(|k| !self.orf.contains(k))
                .collect();
            if self.test.is_empty() {
                self.test = self.orf.clone();
            }
        }
    }

    pub fn exclusion_radius(&self) -> f64 {
        self.omega_max / (4.0 * self.grid_points as f64)
    }

    /// Uniform `s = eta + i w`, `w` in `[0, omega_max]`, used for the
    /// continuous maxima.
    pub fn search_grid(&self) -> Vec<Complex64> {
        let g = self.grid_points;
        (0..g)
            .map(|i| Complex64::new(self.eta, self.omega_max * i as f64 / (g - 1) as f64))
            .collect()
    }
}

/// `count` distinct channels out of `channel_count`, drawn by a partial
/// Fisher-Yates shuffle seeded with `seed`, returned in ascending order.
pub fn random_channels(channel_count: usize, count: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<usize> = (0..channel_count).collect();
    let take = count.min(channel_count);
    for i in 0..take {
        let j = rng.random_range(i..channel_count);
        pool.swap(i, j);
    }
    let mut out = pool[..take].to_vec();
    out.sort_unstable();
    out
}

/// Chebyshev points `eta + i W [1 - cos(j pi / (2 (J0 - 1)))]`.
pub fn initial_frequencies(count: usize, eta: f64, omega_max: f64) -> Vec<Complex64> {
    assert!(count >= 2, "need at least two initial frequencies");
    (0..count)
        .map(|j| {
            let theta = j as f64 * PI / (2.0 * (count - 1) as f64);
            let im = if j == count - 1 {
                omega_max
            } else {
                omega_max * (1.0 - theta.cos())
            };
            Complex64::new(eta, im)
        })
        .collect()
}

/// `(floor(J / alpha_high), floor(J / alpha_low))`, with the low order
/// lowered to `M_H - 1` if the two coincide.
pub fn fit_orders(
    samples: usize,
    alpha_high: f64,
    alpha_low: f64,
) -> Result<(usize, usize), AfsError> {
    let high = (samples as f64 / alpha_high).floor() as usize;
    let mut low = (samples as f64 / alpha_low).floor() as usize;
    if low >= high {
        low = high.saturating_sub(1);
    }
    if low < 1 {
        return Err(AfsError::DegenerateOrder { samples, high, low });
    }
    Ok((high, low))
}

/// Two fits of the same channels evaluated on the search grid.
#[derive(Debug, Clone)]
pub struct Discrepancy {
    grid: Vec<Complex64>,
    /// `|f_H - f_L|` per channel and grid point.
    gap: Vec<Vec<f64>>,
    errors: Vec<f64>,
}

impl Discrepancy {
    pub fn new(
        fit_high: &RationalModel,
        fit_low: &RationalModel,
        grid: &[Complex64],
    ) -> Result<Self, AfsError> {
        assert_eq!(fit_high.channel_count(), fit_low.channel_count());
        let channels = fit_high.channel_count();
        let mut gap = vec![Vec::with_capacity(grid.len()); channels];
        let mut peak = vec![0.0f64; channels];
        for &s in grid {
            let h = fit_high.eval(s)?;
            let l = fit_low.eval(s)?;
            for k in 0..channels {
                gap[k].push((h[k] - l[k]).norm());
                peak[k] = peak[k].max(h[k].norm());
            }
        }
        let mut errors = Vec::with_capacity(channels);
        for k in 0..channels {
            if peak[k] == 0.0 {
                return Err(AfsError::DegenerateChannel { channel: k });
            }
            errors.push(gap[k].iter().fold(0.0f64, |m, g| m.max(*g)) / peak[k]);
        }
        Ok(Self {
            grid: grid.to_vec(),
            gap,
            errors,
        })
    }

    /// Relative dual-fit error `e_k` of every channel.
    pub fn errors(&self) -> &[f64] {
        &self.errors
    }

    /// Grid point of largest `|f_H - f_L|` in the observation channel with
    /// the largest `e_k`, skipping points within `radius` of `existing`.
    /// Ties resolve to the lowest frequency.
    pub fn select(
        &self,
        orf: &[usize],
        existing: &[Complex64],
        radius: f64,
    ) -> Result<Complex64, AfsError> {
        let mut k_max = orf[0];
        for &k in orf {
            if self.errors[k] > self.errors[k_max] {
                k_max = k;
            }
        }
        let mut best: Option<(usize, f64)> = None;
        for (g, &s) in self.grid.iter().enumerate() {
            if existing.iter().any(|e| (e - s).norm() <= radius) {
                continue;
            }
            let d = self.gap[k_max][g];
            if best.is_none_or(|(_, b)| d > b) {
                best = Some((g, d));
            }
        }
        best.map(|(g, _)| self.grid[g])
            .ok_or(AfsError::ExhaustedGrid)
    }
}

/// `e_k = max |f_{k,H} - f_{k,L}| / max |f_{k,H}|` over the grid.
pub fn channel_errors(
    fit_high: &RationalModel,
    fit_low: &RationalModel,
    grid: &[Complex64],
) -> Result<Vec<f64>, AfsError> {
    Ok(Discrepancy::new(fit_high, fit_low, grid)?.errors)
}

pub fn select_new_frequency(
    fit_high: &RationalModel,
    fit_low: &RationalModel,
    orf: &[usize],
    grid: &[Complex64],
    existing: &[Complex64],
    radius: f64,
) -> Result<Complex64, AfsError> {
    Discrepancy::new(fit_high, fit_low, grid)?.select(orf, existing, radius)
}

fn trapezoid_energy(times: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    times
        .windows(2)
        .enumerate()
        .map(|(i, w)| 0.5 * (w[1] - w[0]) * (f(i) + f(i + 1)))
        .sum()
}

/// Largest relative squared change between successive time-domain
/// solutions, integrated by the trapezoidal rule.
pub fn error_e1(current: &TimeSeries, previous: &TimeSeries) -> Result<f64, AfsError> {
    if current.times() != previous.times() || current.channel_count() != previous.channel_count() {
        return Err(AfsError::GridMismatch);
    }
    let times = current.times();
    let mut worst = 0.0f64;
    for k in 0..current.channel_count() {
        let (a, b) = (current.channel(k), previous.channel(k));
        let den = trapezoid_energy(times, |i| a[i] * a[i]);
        if den == 0.0 {
            return Err(AfsError::ZeroEnergy { channel: k });
        }
        let num = trapezoid_energy(times, |i| (a[i] - b[i]) * (a[i] - b[i]));
        worst = worst.max(num / den);
    }
    Ok(worst)
}

/// Largest dual-fit error over the test channels.
pub fn error_e2(test_errors: &[f64]) -> f64 {
    test_errors.iter().fold(0.0, |m, e| m.max(*e))
}

/// One pass of the adaptive loop.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// Sample count `J` when the fits were made.
    pub samples: usize,
    pub order_high: usize,
    pub order_low: usize,
    /// Infinite at the first iteration and whenever the time series of this
    /// or the previous fit overflowed.
    pub e1: f64,
    pub e2: f64,
    pub passed: bool,
    /// Frequency added after this iteration; `None` for the final one.
    pub s_new: Option<Complex64>,
}

/// Mutable progress of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct AfsState {
    pub sampled: Vec<FrequencySample>,
    pub iteration: usize,
    pub previous: Option<TimeSeries>,
    pub history: Vec<IterationRecord>,
    pub consecutive_passes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AfsResult {
    /// Final high-order poles with residues for every system channel;
    /// `None` only if that last residue solve failed.
    pub model: Option<RationalModel>,
    pub sampled: Vec<FrequencySample>,
    pub history: Vec<IterationRecord>,
    pub converged: bool,
    /// Channels actually used, after resolution.
    pub orf: Vec<usize>,
    pub test: Vec<usize>,
    /// Calls made to the system during this run (excludes reused samples).
    pub solver_calls: usize,
}

impl AfsResult {
    /// Number of frequencies at which the system was solved.
    pub fn n_c(&self) -> usize {
        self.sampled.len()
    }
}

/// Evaluates a system at most once per distinct frequency.
struct SampleCache<'a, S: FrequencyDomainSystem + ?Sized> {
    system: &'a S,
    known: Vec<FrequencySample>,
    calls: usize,
}

impl<S: FrequencyDomainSystem + ?Sized> SampleCache<'_, S> {
    fn get(&mut self, s: Complex64) -> Result<FrequencySample, AfsError> {
        if let Some(hit) = self.known.iter().find(|k| k.s == s) {
            return Ok(hit.clone());
        }
        let values = self.system.evaluate(s)?;
        self.calls += 1;
        let sample = FrequencySample::new(s, values);
        self.known.push(sample.clone());
        Ok(sample)
    }
}

pub fn run_afs<S: FrequencyDomainSystem + ?Sized>(
    system: &S,
    config: &AfsConfig,
) -> Result<AfsResult, AfsError> {
    run_afs_with_samples(system, config, &[])
}

/// Runs the adaptive loop, taking responses from `known` instead of the
/// system whenever a requested frequency matches one exactly. A run resumed
/// from the samples of an interrupted run retraces the same frequencies.
pub fn run_afs_with_samples<S: FrequencyDomainSystem + ?Sized>(
    system: &S,
    config: &AfsConfig,
    known: &[FrequencySample],
) -> Result<AfsResult, AfsError> {
    let descriptor = system.descriptor();
    let labels = descriptor.channel_labels.clone();
    let mut config = config.clone();
    config.resolve_channels(labels.len());
    config.validate(labels.len())?;

    // fitted channels: observation channels first, then the remaining test ones
    let mut fitted: Vec<usize> = config.orf.clone();
    for &k in &config.test {
        if !fitted.contains(&k) {
            fitted.push(k);
        }
    }
    let local_orf: Vec<usize> = (0..config.orf.len()).collect();
    let local_test: Vec<usize> = config
        .test
        .iter()
        .map(|k| fitted.iter().position(|f| f == k).unwrap())
        .collect();

    let options = FitOptions {
        relocations: config.relocations,
        band_max: Some(config.omega_max),
        ..FitOptions::default()
    };
    let grid = config.search_grid();
    let times = laplace::uniform_times(config.period, config.time_points);
    let radius = config.exclusion_radius();

    let mut cache = SampleCache {
        system,
        known: known.to_vec(),
        calls: 0,
    };
    let mut state = AfsState {
        sampled: Vec::new(),
        iteration: 0,
        previous: None,
        history: Vec::new(),
        consecutive_passes: 0,
    };
    for s in initial_frequencies(config.initial_count, config.eta, config.omega_max) {
        state.sampled.push(cache.get(s)?);
    }

    let last_high = loop {
        let j = state.sampled.len();
        let (order_high, order_low) = fit_orders(j, config.alpha_high, config.alpha_low)?;
        let spectrum = Spectrum::new(labels.clone(), state.sampled.clone())?.select(&fitted)?;
        let (fit_high, _) = vecfit::vector_fit(&spectrum, &local_orf, order_high, &options)?;
        let (fit_low, _) = vecfit::vector_fit(&spectrum, &local_orf, order_low, &options)?;
        let discrepancy = Discrepancy::new(&fit_high, &fit_low, &grid)?;

        let test_errors: Vec<f64> = local_test
            .iter()
            .map(|&k| discrepancy.errors()[k])
            .collect();
        let e2 = error_e2(&test_errors);
        // a retained unstable pole can overflow the closed-form inverse;
        // that iteration then counts as a failed time-domain check
        let series = match test_series(&fit_high, &local_test, &config, &times) {
            Ok(series) => Some(series),
            Err(AfsError::Laplace(
                LaplaceError::Overflow { .. } | LaplaceError::NonFiniteValue { .. },
            )) => None,
            Err(e) => return Err(e),
        };
        let e1 = match (&series, &state.previous) {
            (Some(current), Some(prev)) => error_e1(current, prev)?,
            _ => f64::INFINITY,
        };
        let passed = e1 <= config.e1_threshold && e2 <= config.e2_threshold;
        state.consecutive_passes = if passed {
            state.consecutive_passes + 1
        } else {
            0
        };
        state.history.push(IterationRecord {
            samples: j,
            order_high,
            order_low,
            e1,
            e2,
            passed,
            s_new: None,
        });
        state.previous = series;
        state.iteration += 1;

        if state.consecutive_passes > config.validation_steps {
            let model = vecfit::fit_residues(
                &Spectrum::new(labels.clone(), state.sampled.clone())?,
                fit_high.slots().to_vec(),
            )?;
            return Ok(AfsResult {
                model: Some(model),
                sampled: state.sampled,
                history: state.history,
                converged: true,
                orf: config.orf,
                test: config.test,
                solver_calls: cache.calls,
            });
        }
        if state.iteration >= config.max_iterations {
            break fit_high;
        }

        let existing: Vec<Complex64> = state.sampled.iter().map(|s| s.s).collect();
        let s_new = discrepancy.select(&local_orf, &existing, radius)?;
        state.history.last_mut().unwrap().s_new = Some(s_new);
        state.sampled.push(cache.get(s_new)?);
    };

    let model = vecfit::fit_residues(
        &Spectrum::new(labels, state.sampled.clone())?,
        last_high.slots().to_vec(),
    )
    .ok();
    let iterations = state.iteration;
    Err(AfsError::NotConverged {
        iterations,
        partial: Box::new(AfsResult {
            model,
            sampled: state.sampled,
            history: state.history,
            converged: false,
            orf: config.orf,
            test: config.test,
            solver_calls: cache.calls,
        }),
    })
}

impl AfsConfig {
    /// Time histories of `model` as reconstructed for the convergence check.
    pub fn invert(&self, model: &RationalModel, times: &[f64]) -> Result<TimeSeries, LaplaceError> {
        if self.band_limited_inverse {
            laplace::rational_invert_band(model, self.eta, self.omega_max, times)
        } else {
            laplace::rational_invert(model, times)
        }
    }
}

fn test_series(
    fit: &RationalModel,
    test: &[usize],
    config: &AfsConfig,
    times: &[f64],
) -> Result<TimeSeries, AfsError> {
    let full = config.invert(fit, times)?;
    let values = test.iter().map(|&k| full.channel(k).to_vec()).collect();
    let labels = test.iter().map(|&k| full.labels()[k].clone()).collect();
    Ok(TimeSeries::new(times.to_vec(), values, labels)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn model(poles: Vec<Complex64>, residues: Vec<Complex64>) -> RationalModel {
        RationalModel::new(poles, vec![residues], vec!["a".to_string()]).unwrap()
    }

    #[test]
    fn chebyshev_points() {
        let pts = initial_frequencies(16, 2.0, 100.0);
        assert_eq!(pts[0], c(2.0, 0.0));
        assert_eq!(pts[15], c(2.0, 100.0));
        for w in pts.windows(2) {
            assert!(w[1].im > w[0].im);
        }
        let three = initial_frequencies(3, 0.5, 1.0);
        assert_eq!(three[0].im, 0.0);
        assert!((three[1].im - (1.0 - (PI / 4.0).cos())).abs() < 1e-15);
        assert!((three[1].im - 0.2929).abs() < 1e-4);
        assert_eq!(three[2].im, 1.0);
        assert!(three.iter().all(|s| s.re == 0.5));
    }

    #[test]
    fn orders_from_sample_count() {
        assert_eq!(fit_orders(32, 2.0, 2.3).unwrap(), (16, 13));
        assert_eq!(fit_orders(16, 2.0, 2.3).unwrap(), (8, 6));
        assert_eq!(fit_orders(5, 2.0, 2.3).unwrap(), (2, 1));
        assert!(matches!(
            fit_orders(3, 2.0, 2.3),
            Err(AfsError::DegenerateOrder { .. })
        ));
        for j in 4..300 {
            let (h, l) = fit_orders(j, 2.0, 2.3).unwrap();
            assert!(l < h && 2 * h <= j);
        }
    }

    #[test]
    fn channel_errors_identities() {
        let h = model(
            vec![c(-1.0, 5.0), c(-1.0, -5.0)],
            vec![c(1.0, 2.0), c(1.0, -2.0)],
        );
        let grid: Vec<_> = (0..50).map(|i| c(0.5, i as f64 * 0.2)).collect();
        assert_eq!(channel_errors(&h, &h, &grid).unwrap(), vec![0.0]);
        let e = channel_errors(&h, &h.scaled(0.0), &grid).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-15);
        let l = model(vec![c(-2.0, 0.0)], vec![c(3.0, 0.0)]);
        let base = channel_errors(&h, &l, &grid).unwrap()[0];
        let scaled = channel_errors(&h.scaled(-7.5), &l.scaled(-7.5), &grid).unwrap()[0];
        assert!((base - scaled).abs() < 1e-14 * base);
        assert!(matches!(
            channel_errors(&h.scaled(0.0), &l, &grid),
            Err(AfsError::DegenerateChannel { channel: 0 })
        ));
    }

    #[test]
    fn new_frequency_lands_on_missing_peak() {
        // the low fit lacks the resonance at w = 7
        let peak = 7.0;
        let h = model(
            vec![c(-1.0, 2.0), c(-1.0, -2.0), c(-0.05, peak), c(-0.05, -peak)],
            vec![c(0.0, -1.0), c(0.0, 1.0), c(0.0, -0.2), c(0.0, 0.2)],
        );
        let l = model(
            vec![c(-1.0, 2.0), c(-1.0, -2.0)],
            vec![c(0.0, -1.0), c(0.0, 1.0)],
        );
        let grid: Vec<_> = (0..1001).map(|i| c(0.1, i as f64 * 0.01)).collect();
        let s = select_new_frequency(&h, &l, &[0], &grid, &[], 0.0025).unwrap();
        assert!((s.im - peak).abs() <= 0.01 + 1e-12, "{s}");
        assert_eq!(s.re, 0.1);
        // with that point taken the next choice differs
        let t = select_new_frequency(&h, &l, &[0], &grid, &[s], 0.0025).unwrap();
        assert_ne!(s, t);
    }

    #[test]
    fn discrepancy_only_at_zero() {
        let grid: Vec<_> = (0..11).map(|i| c(1.0, i as f64)).collect();
        let h = model(vec![c(-0.001, 0.0)], vec![c(1.0, 0.0)]);
        let l = model(vec![c(-0.001, 0.0)], vec![c(0.999, 0.0)]);
        // the difference 0.001/(s + 0.001) is largest at the lowest frequency
        assert_eq!(
            select_new_frequency(&h, &l, &[0], &grid, &[], 0.01).unwrap(),
            c(1.0, 0.0)
        );
        assert_eq!(
            select_new_frequency(&h, &l, &[0], &grid, &[c(1.0, 0.0)], 0.01).unwrap(),
            c(1.0, 1.0)
        );
    }

    #[test]
    fn exhausted_grid() {
        let grid = vec![c(1.0, 0.0), c(1.0, 1.0)];
        let h = model(vec![c(-1.0, 0.0)], vec![c(1.0, 0.0)]);
        let l = model(vec![c(-2.0, 0.0)], vec![c(1.0, 0.0)]);
        assert!(matches!(
            select_new_frequency(&h, &l, &[0], &grid, &grid, 0.1),
            Err(AfsError::ExhaustedGrid)
        ));
    }

    fn series(values: Vec<Vec<f64>>) -> TimeSeries {
        let n = values[0].len();
        let labels = (0..values.len()).map(|k| alloc::format!("c{k}")).collect();
        TimeSeries::new(laplace::uniform_times(1.0, n), values, labels).unwrap()
    }

    #[test]
    fn e1_identities() {
        let a = series(vec![vec![0.0, 1.0, 2.0, 1.5], vec![3.0, -1.0, 0.5, 0.0]]);
        assert_eq!(error_e1(&a, &a).unwrap(), 0.0);
        let zero = series(vec![vec![0.0; 4], vec![0.0; 4]]);
        assert!((error_e1(&a, &zero).unwrap() - 1.0).abs() < 1e-15);
        let b = series(vec![vec![0.1, 0.9, 2.1, 1.5], vec![3.0, -1.2, 0.5, 0.1]]);
        let scaled = |t: &TimeSeries, f: f64| {
            series(
                (0..t.channel_count())
                    .map(|k| t.channel(k).iter().map(|v| v * f).collect())
                    .collect(),
            )
        };
        let e = error_e1(&a, &b).unwrap();
        let es = error_e1(&scaled(&a, -3.0), &scaled(&b, -3.0)).unwrap();
        assert!((e - es).abs() < 1e-14 * e);
        assert!(matches!(
            error_e1(&zero, &a),
            Err(AfsError::ZeroEnergy { channel: 0 })
        ));
    }

    #[test]
    fn e2_is_max() {
        assert_eq!(error_e2(&[0.0, 0.0]), 0.0);
        assert_eq!(error_e2(&[1e-3, 5e-3]), 5e-3);
        assert_eq!(error_e2(&[0.25]), 0.25);
    }

    #[test]
    fn random_channels_are_seeded_and_distinct() {
        let a = random_channels(20, 5, 7);
        assert_eq!(a, random_channels(20, 5, 7));
        assert_eq!(a.len(), 5);
        for w in a.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert_eq!(random_channels(3, 5, 1), vec![0, 1, 2]);
    }

    #[test]
    fn config_validation() {
        let mut cfg = AfsConfig::new(1.0, 10.0, 1.0);
        assert!(cfg.validate(3).is_err());
        cfg.resolve_channels(3);
        assert!(cfg.validate(3).is_ok());
        cfg.alpha_low = 1.5;
        assert!(cfg.validate(3).is_err());
        let mut cfg = AfsConfig::new(1.0, 10.0, 1.0);
        cfg.orf = vec![0];
        cfg.test = vec![5];
        assert!(cfg.validate(3).is_err());
    }
}
