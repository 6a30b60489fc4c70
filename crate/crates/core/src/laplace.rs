//! Time-domain reconstruction from frequency-domain data.
//!
//! Two routes are provided: the Fourier-series method on the equally spaced
//! contour `s_k = eta + i k dw` (trapezoidal Bromwich integral evaluated by
//! FFT), and the closed-form inverse of a rational model,
//! `h(t) = sum_m r_m exp(a_m t)`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{LN_10, PI};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::fft::{self, Direction};
use crate::vecfit::RationalModel;

/// Largest `re(a) t` accepted by [`rational_invert`].
pub const MAX_EXPONENT: f64 = 700.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LaplaceError {
    #[error("sample count must be even and positive, got {0}")]
    OddSampleCount(usize),
    #[error("period must be positive and finite, got {0}")]
    InvalidPeriod(f64),
    #[error("expected {expected} half-spectrum values, got {actual}")]
    HalfSpectrumLength { expected: usize, actual: usize },
    #[error("time grid must be strictly increasing and finite (index {index})")]
    InvalidTimeGrid { index: usize },
    #[error("channel {channel} has {actual} values for {expected} times")]
    ValueCountMismatch {
        channel: usize,
        expected: usize,
        actual: usize,
    },
    #[error("non-finite value in channel {channel} at index {index}")]
    NonFiniteValue { channel: usize, index: usize },
    #[error("pole {pole} grows as exp({exponent:.1}) on the time grid")]
    Overflow { pole: usize, exponent: f64 },
    #[error("reconstruction has imaginary part {ratio:e} relative to its maximum")]
    NotReal { ratio: f64 },
}

/// Equally spaced Fourier-series grid of `samples` points over `period`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsmGrid {
    period: f64,
    samples: usize,
}

impl FsmGrid {
    pub fn new(period: f64, samples: usize) -> Result<Self, LaplaceError> {
        if !(period.is_finite() && period > 0.0) {
            return Err(LaplaceError::InvalidPeriod(period));
        }
        if samples == 0 || samples % 2 == 1 {
            return Err(LaplaceError::OddSampleCount(samples));
        }
        Ok(Self { period, samples })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// `2 pi / T`
    pub fn dw(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// `T / N_s`
    pub fn dt(&self) -> f64 {
        self.period / self.samples as f64
    }

    /// `N_s dw / 2`, equal to `pi / dt`.
    pub fn omega_max(&self) -> f64 {
        self.samples as f64 * self.dw() / 2.0
    }

    /// Number of frequencies that must actually be computed, `N_s/2 + 1`.
    pub fn solve_count(&self) -> usize {
        self.samples / 2 + 1
    }

    /// The `N_s/2 + 1` contour points `eta + i k dw`.
    pub fn frequencies(&self, eta: f64) -> Vec<Complex64> {
        let dw = self.dw();
        (0..self.solve_count())
            .map(|k| Complex64::new(eta, k as f64 * dw))
            .collect()
    }

    /// `t_n = n dt` for `n = 0..N_s`.
    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..self.samples).map(|n| n as f64 * dt).collect()
    }
}

/// `kappa ln(10) / T`
pub fn damping_eta(kappa: f64, period: f64) -> f64 {
    kappa * LN_10 / period
}

/// `0.5 (1 + cos(2 pi k / N_s))`
pub fn hanning_window(k: usize, samples: usize) -> f64 {
    0.5 * (1.0 + (2.0 * PI * k as f64 / samples as f64).cos())
}

/// Extends the `N_s/2 + 1` computed values to the full length-`N_s` DFT
/// spectrum with `h_{N_s-k} = conj(h_k)`. Entries 0 and `N_s/2` are made real.
pub fn conjugate_fill(half: &[Complex64]) -> Result<Vec<Complex64>, LaplaceError> {
    if half.len() < 2 {
        return Err(LaplaceError::HalfSpectrumLength {
            expected: 2,
            actual: half.len(),
        });
    }
    let n = 2 * (half.len() - 1);
    let mut full = vec![Complex64::new(0.0, 0.0); n];
    full[..half.len()].copy_from_slice(half);
    full[0].im = 0.0;
    full[n / 2].im = 0.0;
    for k in n / 2 + 1..n {
        full[k] = half[n - k].conj();
    }
    Ok(full)
}

/// Real samples of one or more channels on a common time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
    labels: Vec<String>,
}

impl TimeSeries {
    pub fn new(
        times: Vec<f64>,
        values: Vec<Vec<f64>>,
        labels: Vec<String>,
    ) -> Result<Self, LaplaceError> {
        check_time_grid(&times)?;
        assert_eq!(values.len(), labels.len(), "one label per channel");
        for (channel, v) in values.iter().enumerate() {
            if v.len() != times.len() {
                return Err(LaplaceError::ValueCountMismatch {
                    channel,
                    expected: times.len(),
                    actual: v.len(),
                });
            }
            if let Some(index) = v.iter().position(|x| !x.is_finite()) {
                return Err(LaplaceError::NonFiniteValue { channel, index });
            }
        }
        Ok(Self {
            times,
            values,
            labels,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn channel(&self, k: usize) -> &[f64] {
        &self.values[k]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn channel_count(&self) -> usize {
        self.values.len()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn channel_by_label(&self, label: &str) -> Option<&[f64]> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|k| &self.values[k][..])
    }
}

fn check_time_grid(times: &[f64]) -> Result<(), LaplaceError> {
    for (index, t) in times.iter().enumerate() {
        if !t.is_finite() || (index > 0 && *t <= times[index - 1]) {
            return Err(LaplaceError::InvalidTimeGrid { index });
        }
    }
    Ok(())
}

/// Relative imaginary residue tolerated before a reconstruction is rejected.
const REALNESS_TOL: f64 = 1e-10;

/// Fourier-series inversion of one channel:
/// `h(n dt) = exp(eta n dt) / T * sum_k W_k h(s_k) exp(2 pi i n k / N_s)`.
pub fn fsm_invert_channel(
    grid: &FsmGrid,
    eta: f64,
    half: &[Complex64],
    window: bool,
) -> Result<Vec<f64>, LaplaceError> {
    let n = grid.samples();
    if half.len() != grid.solve_count() {
        return Err(LaplaceError::HalfSpectrumLength {
            expected: grid.solve_count(),
            actual: half.len(),
        });
    }
    let mut spectrum = conjugate_fill(half)?;
    if window {
        for (k, v) in spectrum.iter_mut().enumerate() {
            *v *= hanning_window(k, n);
        }
    }
    fft::transform(&mut spectrum, Direction::Inverse);
    let peak = spectrum.iter().map(|v| v.re.abs()).fold(0.0, f64::max);
    let worst = spectrum.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    if worst > REALNESS_TOL * peak.max(f64::MIN_POSITIVE) {
        return Err(LaplaceError::NotReal {
            ratio: worst / peak,
        });
    }
    let dt = grid.dt();
    let inv_t = 1.0 / grid.period();
    Ok(spectrum
        .iter()
        .enumerate()
        .map(|(k, v)| (eta * k as f64 * dt).exp() * inv_t * v.re)
        .collect())
}

/// Fourier-series inversion of every channel; `half[k]` holds channel `k` on
/// the `N_s/2 + 1` grid frequencies.
pub fn fsm_invert(
    grid: &FsmGrid,
    eta: f64,
    half: &[Vec<Complex64>],
    labels: Vec<String>,
    window: bool,
) -> Result<TimeSeries, LaplaceError> {
    let values = half
        .iter()
        .map(|h| fsm_invert_channel(grid, eta, h, window))
        .collect::<Result<Vec<_>, _>>()?;
    TimeSeries::new(grid.times(), values, labels)
}

/// Closed-form inverse of a rational model, `sum_m r_m exp(a_m t)`, on any
/// strictly increasing time grid.
pub fn rational_invert(model: &RationalModel, times: &[f64]) -> Result<TimeSeries, LaplaceError> {
    invert_poles(model, times, |_| true)
}

/// Inverse restricted to the poles that samples on the segment
/// `eta + i[-omega_max, omega_max]` can resolve. Along the Bromwich line
/// `re(s) = eta` the contour closes to the left for `t > 0`, so poles with
/// `re(a_m) >= eta` belong to the anti-causal part and are dropped. Poles with
/// `|im(a_m)| > omega_max` lie beyond the sampled band, where the Fourier
/// series inversion also discards the spectrum. Unstable poles inside both
/// limits are kept and grow.
pub fn rational_invert_band(
    model: &RationalModel,
    eta: f64,
    omega_max: f64,
    times: &[f64],
) -> Result<TimeSeries, LaplaceError> {
    invert_poles(model, times, |a| a.re < eta && a.im.abs() <= omega_max)
}

fn invert_poles(
    model: &RationalModel,
    times: &[f64],
    keep: impl Fn(Complex64) -> bool,
) -> Result<TimeSeries, LaplaceError> {
    check_time_grid(times)?;
    let t_max = times.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let kept: Vec<usize> = (0..model.order())
        .filter(|&m| keep(model.poles()[m]))
        .collect();
    for &pole in &kept {
        let exponent = model.poles()[pole].re * t_max;
        if exponent > MAX_EXPONENT {
            return Err(LaplaceError::Overflow { pole, exponent });
        }
    }
    let values = (0..model.channel_count())
        .map(|k| {
            let residues = model.residues(k);
            times
                .iter()
                .map(|&t| {
                    kept.iter()
                        .map(|&m| residues[m] * (model.poles()[m] * t).exp())
                        .sum::<Complex64>()
                        .re
                })
                .collect()
        })
        .collect();
    TimeSeries::new(times.to_vec(), values, model.labels().to_vec())
}

/// `n` uniform points covering `[0, period]` inclusive.
pub fn uniform_times(period: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| period * i as f64 / (n - 1) as f64).collect(),
    }
}
