//! Common-pole rational approximation of multi-channel frequency responses.
//!
//! A [`RationalModel`] is `f_k(s) = sum_m r_{k,m} / (s - a_m)` with a pole set
//! shared by every channel. Poles are identified from a few observation
//! channels by iterative relocation (the zeros of a scaling function become
//! the next poles), then residues for every channel follow from a linear
//! least-squares problem with the poles held fixed.
//!
//! All unknowns are real: a conjugate pole pair `(a, conj a)` is represented
//! by the real and imaginary parts of the residue of `a`, and every complex
//! sample equation is split into its real and imaginary rows. Models are
//! therefore conjugate-closed by construction and their impulse responses
//! are real.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{self, EigenError, Matrix};
use crate::FrequencySample;

/// Relative pivot threshold for the pole-relocation least squares.
const RELOCATION_RCOND: f64 = 1e-13;
/// Relative pivot threshold below which residue identification reports a
/// rank-deficient basis.
const RESIDUE_RCOND: f64 = 1e-14;
/// Two sample frequencies closer than this (relative) are duplicates.
const DUPLICATE_TOL: f64 = 1e-14;
/// Conjugate partners may differ by this much (relative) on input.
const CONJUGATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("no frequency samples supplied")]
    NoSamples,
    #[error("sample {index} has {actual} channel values, expected {expected}")]
    ChannelCountMismatch {
        index: usize,
        expected: usize,
        actual: usize,
    },
    #[error("samples {first} and {second} share the frequency {re}{im:+}i")]
    DuplicateFrequency {
        first: usize,
        second: usize,
        re: f64,
        im: f64,
    },
    #[error("non-finite value in sample {index}")]
    NonFiniteData { index: usize },
    #[error("duplicate channel label `{0}`")]
    DuplicateLabel(String),
    #[error("expected {expected} channel labels, got {actual}")]
    LabelCountMismatch { expected: usize, actual: usize },
    #[error("model order must be at least 1")]
    ZeroOrder,
    #[error("order {order} is too high for {samples} samples (needs {required} samples)")]
    OrderTooHigh {
        order: usize,
        samples: usize,
        required: usize,
    },
    #[error("the set of observation channels is empty")]
    NoObservationChannels,
    #[error("channel index {index} out of range for {channels} channels")]
    ChannelOutOfRange { index: usize, channels: usize },
    #[error("least-squares matrix has numerical rank {rank}, needs at least {required}")]
    RankDeficient { rank: usize, required: usize },
    #[error("evaluation point coincides with pole {index}")]
    PoleCollision { index: usize },
    #[error("reference data has zero energy")]
    ZeroEnergy,
    #[error("pole {index} has no conjugate partner with a conjugate residue")]
    NotConjugateClosed { index: usize },
    #[error("channel {channel} has {actual} residues for {expected} poles")]
    ResidueCountMismatch {
        channel: usize,
        expected: usize,
        actual: usize,
    },
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

/// A real-parameterized basis slot: one real pole, or a conjugate pair
/// stored by its member with positive imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PoleSlot {
    Real(f64),
    Pair(Complex64),
}

impl PoleSlot {
    pub fn width(self) -> usize {
        match self {
            PoleSlot::Real(_) => 1,
            PoleSlot::Pair(_) => 2,
        }
    }
}

/// Number of real unknowns (equivalently, of complex poles) in `slots`.
pub fn order_of(slots: &[PoleSlot]) -> usize {
    slots.iter().map(|s| s.width()).sum()
}

/// Flattens slots into the canonical conjugate-closed pole list:
/// real poles as they come, each pair as `a, conj(a)`.
pub fn flatten(slots: &[PoleSlot]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(order_of(slots));
    for slot in slots {
        match *slot {
            PoleSlot::Real(a) => out.push(Complex64::new(a, 0.0)),
            PoleSlot::Pair(a) => {
                out.push(a);
                out.push(a.conj());
            }
        }
    }
    out
}

/// Groups a flat pole list whose conjugate members are adjacent (as produced
/// by the eigenvalue solver) into slots.
fn slots_from_eigenvalues(ev: &[Complex64]) -> Vec<PoleSlot> {
    let mut slots = Vec::with_capacity(ev.len());
    let mut i = 0;
    while i < ev.len() {
        if ev[i].im == 0.0 {
            slots.push(PoleSlot::Real(ev[i].re));
            i += 1;
        } else {
            slots.push(PoleSlot::Pair(Complex64::new(ev[i].re, ev[i].im.abs())));
            i += 2;
        }
    }
    slots
}

/// Columns of the real-parameterized partial-fraction basis at `s`.
fn basis_row(slots: &[PoleSlot], s: Complex64, out: &mut Vec<Complex64>) {
    out.clear();
    let i = Complex64::new(0.0, 1.0);
    for slot in slots {
        match *slot {
            PoleSlot::Real(a) => out.push(1.0 / (s - a)),
            PoleSlot::Pair(a) => {
                let p = 1.0 / (s - a);
                let q = 1.0 / (s - a.conj());
                out.push(p + q);
                out.push(i * p - i * q);
            }
        }
    }
}

/// Maps real unknowns back to residues aligned with [`flatten`].
fn residues_from_unknowns(slots: &[PoleSlot], x: &[f64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(x.len());
    let mut j = 0;
    for slot in slots {
        match slot {
            PoleSlot::Real(_) => {
                out.push(Complex64::new(x[j], 0.0));
                j += 1;
            }
            PoleSlot::Pair(_) => {
                let r = Complex64::new(x[j], x[j + 1]);
                out.push(r);
                out.push(r.conj());
                j += 2;
            }
        }
    }
    out
}

/// Multi-channel frequency-response data on distinct complex frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    labels: Vec<String>,
    samples: Vec<FrequencySample>,
}

impl Spectrum {
    pub fn new(labels: Vec<String>, samples: Vec<FrequencySample>) -> Result<Self, FitError> {
        check_unique_labels(&labels)?;
        let channels = labels.len();
        for (index, sample) in samples.iter().enumerate() {
            if sample.values.len() != channels {
                return Err(FitError::ChannelCountMismatch {
                    index,
                    expected: channels,
                    actual: sample.values.len(),
                });
            }
            let finite = sample.s.re.is_finite()
                && sample.s.im.is_finite()
                && sample
                    .values
                    .iter()
                    .all(|v| v.re.is_finite() && v.im.is_finite());
            if !finite {
                return Err(FitError::NonFiniteData { index });
            }
        }
        for i in 0..samples.len() {
            for j in i + 1..samples.len() {
                let (a, b) = (samples[i].s, samples[j].s);
                if (a - b).norm() <= DUPLICATE_TOL * a.norm().max(b.norm()).max(1.0) {
                    return Err(FitError::DuplicateFrequency {
                        first: i,
                        second: j,
                        re: a.re,
                        im: a.im,
                    });
                }
            }
        }
        Ok(Self { labels, samples })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn samples(&self) -> &[FrequencySample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn channel_count(&self) -> usize {
        self.labels.len()
    }

    pub fn frequencies(&self) -> Vec<Complex64> {
        self.samples.iter().map(|s| s.s).collect()
    }

    pub fn channel(&self, k: usize) -> Vec<Complex64> {
        self.samples.iter().map(|s| s.values[k]).collect()
    }

    /// Restricts the data to the given channels, in the given order.
    pub fn select(&self, channels: &[usize]) -> Result<Spectrum, FitError> {
        for &k in channels {
            if k >= self.channel_count() {
                return Err(FitError::ChannelOutOfRange {
                    index: k,
                    channels: self.channel_count(),
                });
            }
        }
        let labels = channels.iter().map(|&k| self.labels[k].clone()).collect();
        let samples = self
            .samples
            .iter()
            .map(|s| FrequencySample::new(s.s, channels.iter().map(|&k| s.values[k]).collect()))
            .collect();
        Ok(Spectrum { labels, samples })
    }
}

fn check_unique_labels(labels: &[String]) -> Result<(), FitError> {
    for (i, a) in labels.iter().enumerate() {
        if labels[..i].contains(a) {
            return Err(FitError::DuplicateLabel(a.clone()));
        }
    }
    Ok(())
}

/// Partial-fraction model with poles shared across channels.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalModel {
    slots: Vec<PoleSlot>,
    poles: Vec<Complex64>,
    residues: Vec<Vec<Complex64>>,
    labels: Vec<String>,
}

impl RationalModel {
    /// Builds a model from a flat pole list and one residue vector per
    /// channel. Every complex pole must have its conjugate in the list with
    /// the conjugate residue in every channel; the result is stored in the
    /// canonical order (reals, then each pair as `a, conj(a)` with
    /// `im(a) > 0`).
    pub fn new(
        poles: Vec<Complex64>,
        residues: Vec<Vec<Complex64>>,
        labels: Vec<String>,
    ) -> Result<Self, FitError> {
        if labels.len() != residues.len() {
            return Err(FitError::LabelCountMismatch {
                expected: residues.len(),
                actual: labels.len(),
            });
        }
        check_unique_labels(&labels)?;
        for (channel, r) in residues.iter().enumerate() {
            if r.len() != poles.len() {
                return Err(FitError::ResidueCountMismatch {
                    channel,
                    expected: poles.len(),
                    actual: r.len(),
                });
            }
        }
        let close =
            |a: Complex64, b: Complex64, scale: f64| (a - b).norm() <= CONJUGATE_TOL * scale;
        let mut used = vec![false; poles.len()];
        let mut slots = Vec::new();
        let mut order = Vec::new();
        for i in 0..poles.len() {
            if used[i] {
                continue;
            }
            let p = poles[i];
            used[i] = true;
            if p.im == 0.0 {
                slots.push(PoleSlot::Real(p.re));
                order.push((i, None));
                continue;
            }
            let partner = (0..poles.len()).find(|&j| {
                !used[j]
                    && close(poles[j], p.conj(), p.norm().max(1.0))
                    && residues.iter().all(|r| {
                        let scale = r[i].norm().max(r[j].norm()).max(f64::MIN_POSITIVE);
                        close(r[j], r[i].conj(), scale)
                            || (r[i].norm() == 0.0 && r[j].norm() == 0.0)
                    })
            });
            let Some(j) = partner else {
                return Err(FitError::NotConjugateClosed { index: i });
            };
            used[j] = true;
            let (upper, lower) = if p.im > 0.0 { (i, j) } else { (j, i) };
            slots.push(PoleSlot::Pair(poles[upper]));
            order.push((upper, Some(lower)));
        }
        let residues = residues
            .iter()
            .map(|r| {
                let mut out = Vec::with_capacity(r.len());
                for &(upper, lower) in &order {
                    out.push(r[upper]);
                    if lower.is_some() {
                        out.push(r[upper].conj());
                    }
                }
                out
            })
            .collect();
        Ok(Self::from_slots(slots, residues, labels))
    }

    pub fn from_slots(
        slots: Vec<PoleSlot>,
        residues: Vec<Vec<Complex64>>,
        labels: Vec<String>,
    ) -> Self {
        let poles = flatten(&slots);
        debug_assert!(residues.iter().all(|r| r.len() == poles.len()));
        Self {
            slots,
            poles,
            residues,
            labels,
        }
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    pub fn slots(&self) -> &[PoleSlot] {
        &self.slots
    }

    /// Residues of channel `k`, aligned with [`poles`](Self::poles).
    pub fn residues(&self, k: usize) -> &[Complex64] {
        &self.residues[k]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn order(&self) -> usize {
        self.poles.len()
    }

    pub fn channel_count(&self) -> usize {
        self.residues.len()
    }

    pub fn unstable_pole_count(&self) -> usize {
        self.poles.iter().filter(|p| p.re > 0.0).count()
    }

    /// The same poles with every residue multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let residues = self
            .residues
            .iter()
            .map(|r| r.iter().map(|v| v * factor).collect())
            .collect();
        Self::from_slots(self.slots.clone(), residues, self.labels.clone())
    }

    fn check_collision(&self, s: Complex64) -> Result<(), FitError> {
        for (index, a) in self.poles.iter().enumerate() {
            if (s - a).norm() <= f64::EPSILON * a.norm().max(1.0) {
                return Err(FitError::PoleCollision { index });
            }
        }
        Ok(())
    }

    /// `sum_m r_{k,m} / (s - a_m)` for every channel.
    pub fn eval(&self, s: Complex64) -> Result<Vec<Complex64>, FitError> {
        self.check_collision(s)?;
        Ok((0..self.channel_count())
            .map(|k| self.eval_channel_unchecked(k, s))
            .collect())
    }

    pub fn eval_channel(&self, k: usize, s: Complex64) -> Result<Complex64, FitError> {
        self.check_collision(s)?;
        Ok(self.eval_channel_unchecked(k, s))
    }

    fn eval_channel_unchecked(&self, k: usize, s: Complex64) -> Complex64 {
        self.residues[k]
            .iter()
            .zip(&self.poles)
            .map(|(r, a)| r / (s - a))
            .sum()
    }
}

/// Starting poles: `floor(M/2)` conjugate pairs with imaginary parts equally
/// spaced over `(0, band_max]` and real parts at -1/100 of the imaginary
/// part, plus one real pole at `-band_max/100` when `M` is odd.
pub fn initial_poles(band_max: f64, order: usize) -> Vec<PoleSlot> {
    let pairs = order / 2;
    let mut slots = Vec::with_capacity(pairs + 1);
    if order % 2 == 1 {
        slots.push(PoleSlot::Real(-band_max / 100.0));
    }
    for m in 1..=pairs {
        let beta = band_max * m as f64 / pairs as f64;
        slots.push(PoleSlot::Pair(Complex64::new(-beta / 100.0, beta)));
    }
    slots
}

/// Outcome of one relocation step.
#[derive(Debug, Clone, PartialEq)]
pub struct Relocation {
    pub poles: Vec<PoleSlot>,
    /// RMS of the weighted linearized residual `sigma f - (sigma f)_fit` over
    /// all real sample rows, each channel normalized to unit RMS.
    pub residual_rms: f64,
    pub rank: usize,
}

/// One vector-fitting pole relocation on the given channels of `data`.
pub fn relocate_poles(
    data: &Spectrum,
    channels: &[usize],
    poles: &[PoleSlot],
) -> Result<Relocation, FitError> {
    if data.is_empty() {
        return Err(FitError::NoSamples);
    }
    if channels.is_empty() {
        return Err(FitError::NoObservationChannels);
    }
    let m = order_of(poles);
    if m == 0 {
        return Err(FitError::ZeroOrder);
    }
    let j = data.len();
    if j < m {
        return Err(FitError::OrderTooHigh {
            order: m,
            samples: j,
            required: m,
        });
    }
    for &k in channels {
        if k >= data.channel_count() {
            return Err(FitError::ChannelOutOfRange {
                index: k,
                channels: data.channel_count(),
            });
        }
    }

    let rows_per_channel = 2 * j - m;
    let mut stacked = Matrix::zeros(rows_per_channel * channels.len(), m);
    let mut stacked_rhs = vec![0.0; rows_per_channel * channels.len()];
    let mut basis = Vec::with_capacity(m);
    for (c, &k) in channels.iter().enumerate() {
        let values = data.channel(k);
        let energy: f64 = values.iter().map(|v| v.norm_sqr()).sum();
        let weight = if energy > 0.0 {
            1.0 / (energy / j as f64).sqrt()
        } else {
            1.0
        };
        let mut a = Matrix::zeros(2 * j, 2 * m);
        let mut b = vec![0.0; 2 * j];
        for (row, (sample, f)) in data.samples().iter().zip(&values).enumerate() {
            let f = f * weight;
            basis_row(poles, sample.s, &mut basis);
            for (col, phi) in basis.iter().enumerate() {
                let scaled = -f * phi;
                a[(2 * row, col)] = phi.re;
                a[(2 * row + 1, col)] = phi.im;
                a[(2 * row, m + col)] = scaled.re;
                a[(2 * row + 1, m + col)] = scaled.im;
            }
            b[2 * row] = f.re;
            b[2 * row + 1] = f.im;
        }
        let (reduced, rb) = linalg::eliminate_leading(a, b, m);
        let offset = c * rows_per_channel;
        for r in 0..rows_per_channel {
            for col in 0..m {
                stacked[(offset + r, col)] = reduced[(r, col)];
            }
            stacked_rhs[offset + r] = rb[r];
        }
    }

    let sol = linalg::lstsq(stacked, &stacked_rhs, RELOCATION_RCOND);
    if sol.rank == 0 {
        return Err(FitError::RankDeficient {
            rank: m + sol.rank,
            required: m + 1,
        });
    }

    // zeros of sigma(s) = 1 + c^T (sI - A)^{-1} b are the eigenvalues of A - b c^T
    let mut h = Matrix::zeros(m, m);
    let mut bvec = vec![0.0; m];
    let mut idx = 0;
    for slot in poles {
        match *slot {
            PoleSlot::Real(a) => {
                h[(idx, idx)] = a;
                bvec[idx] = 1.0;
                idx += 1;
            }
            PoleSlot::Pair(a) => {
                h[(idx, idx)] = a.re;
                h[(idx, idx + 1)] = a.im;
                h[(idx + 1, idx)] = -a.im;
                h[(idx + 1, idx + 1)] = a.re;
                bvec[idx] = 2.0;
                idx += 2;
            }
        }
    }
    for r in 0..m {
        for col in 0..m {
            h[(r, col)] -= bvec[r] * sol.x[col];
        }
    }
    let ev = linalg::eigenvalues(&h)?;
    let total_rows = (2 * j * channels.len()) as f64;
    Ok(Relocation {
        poles: slots_from_eigenvalues(&ev),
        residual_rms: sol.residual_norm / total_rows.sqrt(),
        rank: sol.rank,
    })
}

/// Least-squares residues of one channel for fixed poles.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueFit {
    /// Aligned with [`flatten`] of the poles.
    pub residues: Vec<Complex64>,
    /// RMS of `|f_fit(s_j) - f_j|` over the samples.
    pub rms: f64,
}

pub fn identify_residues(
    frequencies: &[Complex64],
    values: &[Complex64],
    poles: &[PoleSlot],
) -> Result<ResidueFit, FitError> {
    assert_eq!(frequencies.len(), values.len());
    let j = frequencies.len();
    if j == 0 {
        return Err(FitError::NoSamples);
    }
    let m = order_of(poles);
    if m == 0 {
        return Err(FitError::ZeroOrder);
    }
    if 2 * j < m {
        return Err(FitError::OrderTooHigh {
            order: m,
            samples: j,
            required: m.div_ceil(2),
        });
    }
    let mut a = Matrix::zeros(2 * j, m);
    let mut b = vec![0.0; 2 * j];
    let mut basis = Vec::with_capacity(m);
    for (row, (s, f)) in frequencies.iter().zip(values).enumerate() {
        basis_row(poles, *s, &mut basis);
        for (col, phi) in basis.iter().enumerate() {
            a[(2 * row, col)] = phi.re;
            a[(2 * row + 1, col)] = phi.im;
        }
        b[2 * row] = f.re;
        b[2 * row + 1] = f.im;
    }
    let sol = linalg::lstsq(a, &b, RESIDUE_RCOND);
    if sol.rank < m {
        return Err(FitError::RankDeficient {
            rank: sol.rank,
            required: m,
        });
    }
    Ok(ResidueFit {
        residues: residues_from_unknowns(poles, &sol.x),
        // each complex residual contributes one real and one imaginary row
        rms: sol.residual_norm / (j as f64).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Maximum number of pole relocations (at least one is performed).
    pub relocations: usize,
    /// Relocation stops once the largest relative pole change drops below
    /// this value.
    pub movement_tol: f64,
    /// Upper edge of the band for the starting poles; defaults to the
    /// largest sampled imaginary part.
    pub band_max: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            relocations: 3,
            movement_tol: 1e-8,
            band_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub iterations_used: usize,
    /// Largest relative pole change in the last relocation.
    pub pole_movement: f64,
    /// Poles with positive real part; these are kept as identified.
    pub unstable_pole_count: usize,
    /// Weighted linearized residual reported by the last relocation.
    pub relocation_rms: f64,
    pub per_channel_rms: Vec<f64>,
}

/// Largest distance from a pole of `new` to the nearest pole of `old`,
/// relative to the magnitude of the new pole.
pub fn pole_movement(old: &[PoleSlot], new: &[PoleSlot]) -> f64 {
    let old = flatten(old);
    let new = flatten(new);
    let scale = old.iter().chain(&new).map(|p| p.norm()).fold(0.0, f64::max);
    let floor = 1e-12 * scale.max(f64::MIN_POSITIVE);
    new.iter()
        .map(|p| {
            let nearest = old
                .iter()
                .map(|q| (p - q).norm())
                .fold(f64::INFINITY, f64::min);
            nearest / p.norm().max(floor)
        })
        .fold(0.0, f64::max)
}

/// Identifies common poles from the observation channels `orf`, then
/// residues for every channel of `data` with those poles.
pub fn vector_fit(
    data: &Spectrum,
    orf: &[usize],
    order: usize,
    options: &FitOptions,
) -> Result<(RationalModel, FitReport), FitError> {
    if data.is_empty() {
        return Err(FitError::NoSamples);
    }
    if orf.is_empty() {
        return Err(FitError::NoObservationChannels);
    }
    if order == 0 {
        return Err(FitError::ZeroOrder);
    }
    if data.len() < order {
        return Err(FitError::OrderTooHigh {
            order,
            samples: data.len(),
            required: order,
        });
    }
    let band = options.band_max.unwrap_or_else(|| {
        let top = data
            .samples()
            .iter()
            .map(|s| s.s.im.abs())
            .fold(0.0, f64::max);
        if top > 0.0 {
            top
        } else {
            data.samples()
                .iter()
                .map(|s| s.s.norm())
                .fold(1.0, f64::max)
        }
    });

    let mut poles = initial_poles(band, order);
    let mut movement = f64::INFINITY;
    let mut relocation_rms = 0.0;
    let mut iterations = 0;
    for _ in 0..options.relocations.max(1) {
        let step = relocate_poles(data, orf, &poles)?;
        iterations += 1;
        movement = pole_movement(&poles, &step.poles);
        relocation_rms = step.residual_rms;
        poles = step.poles;
        if movement < options.movement_tol {
            break;
        }
    }

    let model = fit_residues(data, poles)?;
    let frequencies = data.frequencies();
    let per_channel_rms = (0..data.channel_count())
        .map(|k| {
            let values = data.channel(k);
            let sq: f64 = frequencies
                .iter()
                .zip(&values)
                .map(|(s, f)| (model.eval_channel_unchecked(k, *s) - f).norm_sqr())
                .sum();
            (sq / frequencies.len() as f64).sqrt()
        })
        .collect();
    let report = FitReport {
        iterations_used: iterations,
        pole_movement: movement,
        unstable_pole_count: model.unstable_pole_count(),
        relocation_rms,
        per_channel_rms,
    };
    Ok((model, report))
}

/// Residue identification for every channel of `data` with fixed poles.
pub fn fit_residues(data: &Spectrum, poles: Vec<PoleSlot>) -> Result<RationalModel, FitError> {
    let frequencies = data.frequencies();
    let residues = (0..data.channel_count())
        .map(|k| identify_residues(&frequencies, &data.channel(k), &poles).map(|fit| fit.residues))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RationalModel::from_slots(
        poles,
        residues,
        data.labels().to_vec(),
    ))
}

/// `sqrt(sum_j |f(s_j) - f_j|^2 / sum_j |f_j|^2)` between channel
/// `model_channel` of the model and channel `data_channel` of the data.
pub fn fit_error_evf(
    model: &RationalModel,
    model_channel: usize,
    data: &Spectrum,
    data_channel: usize,
) -> Result<f64, FitError> {
    if data.is_empty() {
        return Err(FitError::NoSamples);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for sample in data.samples() {
        let fj = sample.values[data_channel];
        let fit = model.eval_channel(model_channel, sample.s)?;
        num += (fit - fj).norm_sqr();
        den += fj.norm_sqr();
    }
    if den == 0.0 {
        return Err(FitError::ZeroEnergy);
    }
    Ok((num / den).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|k| alloc::format!("ch{k}")).collect()
    }

    fn contour(eta: f64, band: f64, j: usize) -> Vec<Complex64> {
        (0..j)
            .map(|i| c(eta, band * i as f64 / (j - 1) as f64))
            .collect()
    }

    fn spectrum_of(model: &RationalModel, points: &[Complex64]) -> Spectrum {
        let samples = points
            .iter()
            .map(|&s| FrequencySample::new(s, model.eval(s).unwrap()))
            .collect();
        Spectrum::new(model.labels().to_vec(), samples).unwrap()
    }

    fn nearest(p: Complex64, set: &[Complex64]) -> f64 {
        set.iter()
            .map(|q| (p - q).norm())
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn initial_poles_two_at_band_edge() {
        let p = flatten(&initial_poles(100.0, 2));
        assert_eq!(p, vec![c(-1.0, 100.0), c(-1.0, -100.0)]);
    }

    #[test]
    fn initial_poles_equally_spaced() {
        let p = flatten(&initial_poles(100.0, 4));
        assert_eq!(
            p,
            vec![
                c(-0.5, 50.0),
                c(-0.5, -50.0),
                c(-1.0, 100.0),
                c(-1.0, -100.0)
            ]
        );
        let odd = flatten(&initial_poles(100.0, 5));
        assert_eq!(odd.len(), 5);
        assert_eq!(odd[0], c(-1.0, 0.0));
    }

    #[test]
    fn initial_poles_are_conjugate_closed() {
        for m in 1..12 {
            let p = flatten(&initial_poles(37.0, m));
            assert_eq!(p.len(), m);
            for a in &p {
                assert!(p.contains(&a.conj()));
            }
        }
    }

    #[test]
    fn eval_single_real_pole() {
        let m = RationalModel::new(vec![c(-2.0, 0.0)], vec![vec![c(1.0, 0.0)]], labels(1)).unwrap();
        assert_eq!(m.eval(c(0.0, 0.0)).unwrap(), vec![c(0.5, 0.0)]);
    }

    #[test]
    fn eval_conjugate_and_linear() {
        let m = RationalModel::new(
            vec![c(-1.0, 10.0), c(-1.0, -10.0), c(-3.0, 0.0)],
            vec![vec![c(0.5, 2.0), c(0.5, -2.0), c(4.0, 0.0)]],
            labels(1),
        )
        .unwrap();
        let s = c(0.7, 3.1);
        let a = m.eval(s).unwrap()[0];
        let b = m.eval(s.conj()).unwrap()[0];
        assert!((a.conj() - b).norm() < 1e-15);
        let doubled = m.scaled(2.0).eval(s).unwrap()[0];
        assert!((doubled - 2.0 * a).norm() < 1e-15);
    }

    #[test]
    fn eval_at_pole_is_rejected() {
        let m = RationalModel::new(vec![c(-2.0, 0.0)], vec![vec![c(1.0, 0.0)]], labels(1)).unwrap();
        assert_eq!(
            m.eval(c(-2.0, 0.0)),
            Err(FitError::PoleCollision { index: 0 })
        );
    }

    #[test]
    fn model_requires_conjugate_partners() {
        let err = RationalModel::new(vec![c(-1.0, 1.0)], vec![vec![c(1.0, 0.0)]], labels(1));
        assert_eq!(err, Err(FitError::NotConjugateClosed { index: 0 }));
        let err = RationalModel::new(
            vec![c(-1.0, 1.0), c(-1.0, -1.0)],
            vec![vec![c(1.0, 1.0), c(1.0, 1.0)]],
            labels(1),
        );
        assert!(matches!(err, Err(FitError::NotConjugateClosed { .. })));
    }

    #[test]
    fn model_is_canonicalized() {
        let m = RationalModel::new(
            vec![c(-1.0, -1.0), c(-5.0, 0.0), c(-1.0, 1.0)],
            vec![vec![c(2.0, -3.0), c(7.0, 0.0), c(2.0, 3.0)]],
            labels(1),
        )
        .unwrap();
        assert_eq!(m.poles(), &[c(-1.0, 1.0), c(-1.0, -1.0), c(-5.0, 0.0)]);
        assert_eq!(m.residues(0), &[c(2.0, 3.0), c(2.0, -3.0), c(7.0, 0.0)]);
    }

    #[test]
    fn duplicate_frequencies_rejected() {
        let samples = vec![
            FrequencySample::new(c(1.0, 2.0), vec![c(0.0, 0.0)]),
            FrequencySample::new(c(1.0, 2.0), vec![c(1.0, 0.0)]),
        ];
        assert!(matches!(
            Spectrum::new(labels(1), samples),
            Err(FitError::DuplicateFrequency {
                first: 0,
                second: 1,
                ..
            })
        ));
    }

    #[test]
    fn residues_of_exact_single_pole() {
        let points = contour(0.5, 10.0, 8);
        let values: Vec<_> = points.iter().map(|s| 1.0 / (s + 2.0)).collect();
        let fit = identify_residues(&points, &values, &[PoleSlot::Real(-2.0)]).unwrap();
        assert!((fit.residues[0] - c(1.0, 0.0)).norm() < 1e-10);
        assert!(fit.rms < 1e-12);
    }

    #[test]
    fn zero_data_gives_zero_residues() {
        let points = contour(0.5, 10.0, 8);
        let values = vec![c(0.0, 0.0); 8];
        let poles = initial_poles(10.0, 4);
        let fit = identify_residues(&points, &values, &poles).unwrap();
        assert!(fit.residues.iter().all(|r| r.norm() == 0.0));
    }

    #[test]
    fn residue_order_too_high() {
        let points = contour(0.5, 10.0, 2);
        let values = vec![c(1.0, 0.0); 2];
        let poles = initial_poles(10.0, 5);
        assert!(matches!(
            identify_residues(&points, &values, &poles),
            Err(FitError::OrderTooHigh { .. })
        ));
    }

    #[test]
    fn relocation_converges_to_true_pair() {
        let truth = RationalModel::new(
            vec![c(-1.0, 10.0), c(-1.0, -10.0)],
            vec![vec![c(0.3, 2.0), c(0.3, -2.0)]],
            labels(1),
        )
        .unwrap();
        let data = spectrum_of(&truth, &contour(0.5, 30.0, 12));
        let mut poles = vec![PoleSlot::Pair(c(-0.5, 50.0))];
        for _ in 0..3 {
            poles = relocate_poles(&data, &[0], &poles).unwrap().poles;
        }
        for p in flatten(&poles) {
            assert!(nearest(p, truth.poles()) < 1e-8 * p.norm(), "{p}");
        }
    }

    #[test]
    fn relocation_fixed_point_at_true_poles() {
        let truth = RationalModel::new(
            vec![c(-1.0, 10.0), c(-1.0, -10.0), c(-4.0, 0.0)],
            vec![vec![c(0.3, 2.0), c(0.3, -2.0), c(-1.5, 0.0)]],
            labels(1),
        )
        .unwrap();
        let data = spectrum_of(&truth, &contour(0.5, 30.0, 12));
        let step = relocate_poles(&data, &[0], truth.slots()).unwrap();
        for p in flatten(&step.poles) {
            assert!(nearest(p, truth.poles()) < 1e-10 * p.norm(), "{p}");
        }
    }

    #[test]
    fn unstable_pole_is_retained() {
        let truth = RationalModel::new(
            vec![c(0.3, 0.0), c(-1.0, 10.0), c(-1.0, -10.0)],
            vec![vec![c(1.0, 0.0), c(0.2, 1.0), c(0.2, -1.0)]],
            labels(1),
        )
        .unwrap();
        let data = spectrum_of(&truth, &contour(1.0, 30.0, 16));
        let options = FitOptions {
            relocations: 10,
            ..FitOptions::default()
        };
        let (model, report) = vector_fit(&data, &[0], 3, &options).unwrap();
        assert_eq!(report.unstable_pole_count, 1);
        let unstable: Vec<_> = model.poles().iter().filter(|p| p.re > 0.0).collect();
        assert!((unstable[0] - c(0.3, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn relocation_on_zero_data_is_rank_deficient() {
        let samples = contour(0.5, 10.0, 8)
            .into_iter()
            .map(|s| FrequencySample::new(s, vec![c(0.0, 0.0)]))
            .collect();
        let data = Spectrum::new(labels(1), samples).unwrap();
        assert!(matches!(
            relocate_poles(&data, &[0], &initial_poles(10.0, 4)),
            Err(FitError::RankDeficient { .. })
        ));
    }

    #[test]
    fn common_poles_fit_all_channels() {
        let poles = vec![c(-2.0, 15.0), c(-2.0, -15.0), c(-0.5, 40.0), c(-0.5, -40.0)];
        let residues = vec![
            vec![c(1.0, 3.0), c(1.0, -3.0), c(0.5, -1.0), c(0.5, 1.0)],
            vec![c(-2.0, 0.5), c(-2.0, -0.5), c(0.1, 4.0), c(0.1, -4.0)],
            vec![c(0.0, 1.0), c(0.0, -1.0), c(3.0, 0.0), c(3.0, 0.0)],
        ];
        let truth = RationalModel::new(poles, residues, labels(3)).unwrap();
        let data = spectrum_of(&truth, &contour(1.0, 50.0, 20));
        let options = FitOptions {
            relocations: 10,
            ..FitOptions::default()
        };
        let (model, report) = vector_fit(&data, &[0], 4, &options).unwrap();
        assert_eq!(model.channel_count(), 3);
        for rms in &report.per_channel_rms {
            assert!(*rms < 1e-8, "{rms}");
        }
        for p in model.poles() {
            assert!(nearest(*p, truth.poles()) < 1e-8 * p.norm());
        }
    }

    #[test]
    fn vector_fit_validates_inputs() {
        let truth =
            RationalModel::new(vec![c(-2.0, 0.0)], vec![vec![c(1.0, 0.0)]], labels(1)).unwrap();
        let data = spectrum_of(&truth, &contour(1.0, 10.0, 4));
        assert_eq!(
            vector_fit(&data, &[], 2, &FitOptions::default()).unwrap_err(),
            FitError::NoObservationChannels
        );
        assert_eq!(
            vector_fit(&data, &[3], 2, &FitOptions::default()).unwrap_err(),
            FitError::ChannelOutOfRange {
                index: 3,
                channels: 1
            }
        );
        assert!(matches!(
            vector_fit(&data, &[0], 5, &FitOptions::default()).unwrap_err(),
            FitError::OrderTooHigh { .. }
        ));
    }

    #[test]
    fn evf_exact_and_zero_models() {
        let truth =
            RationalModel::new(vec![c(-2.0, 0.0)], vec![vec![c(1.0, 0.0)]], labels(1)).unwrap();
        let data = spectrum_of(&truth, &contour(1.0, 10.0, 6));
        assert_eq!(fit_error_evf(&truth, 0, &data, 0).unwrap(), 0.0);
        let zero = truth.scaled(0.0);
        assert!((fit_error_evf(&zero, 0, &data, 0).unwrap() - 1.0).abs() < 1e-15);
        let silent = spectrum_of(&zero, &contour(1.0, 10.0, 6));
        assert_eq!(
            fit_error_evf(&truth, 0, &silent, 0),
            Err(FitError::ZeroEnergy)
        );
    }

    #[test]
    fn select_reorders_channels() {
        let truth = RationalModel::new(
            vec![c(-2.0, 0.0)],
            vec![vec![c(1.0, 0.0)], vec![c(2.0, 0.0)]],
            vec!["a".to_string(), "b".to_string()],
        )
        .unwrap();
        let data = spectrum_of(&truth, &contour(1.0, 10.0, 3));
        let sel = data.select(&[1, 0]).unwrap();
        assert_eq!(sel.labels(), &["b".to_string(), "a".to_string()]);
        assert_eq!(sel.channel(0), data.channel(1));
    }
}
