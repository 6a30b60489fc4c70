//! Frequency-domain systems: the expensive solve that the sampling schemes
//! try to call as rarely as possible.
//!
//! Three systems are built in. [`RationalSystem`] evaluates a known
//! partial-fraction model exactly. [`RodSystem`] is the analytic response
//! of a fixed-free prismatic rod under a step traction at its free end.
//! [`ModalSystem`] is a sum of damped single-degree-of-freedom modes.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::laplace::{LaplaceError, TimeSeries};
use crate::vecfit::{FitError, RationalModel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SystemError {
    #[error("evaluation failed: {0}")]
    Evaluation(#[from] FitError),
    #[error("the step load has a pole at s = 0")]
    ZeroFrequency,
    #[error("invalid system parameter: {0}")]
    InvalidParameter(String),
    #[error("duplicate channel label `{0}`")]
    DuplicateLabel(String),
}

/// Channel layout of a system.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemDescriptor {
    pub channel_labels: Vec<String>,
    /// Suggested upper band edge in rad/s.
    pub band_hint: Option<f64>,
}

impl SystemDescriptor {
    pub fn new(channel_labels: Vec<String>, band_hint: Option<f64>) -> Result<Self, SystemError> {
        if channel_labels.is_empty() {
            return Err(SystemError::InvalidParameter(
                "a system needs at least one channel".into(),
            ));
        }
        for (i, a) in channel_labels.iter().enumerate() {
            if channel_labels[..i].contains(a) {
                return Err(SystemError::DuplicateLabel(a.clone()));
            }
        }
        Ok(Self {
            channel_labels,
            band_hint,
        })
    }

    pub fn channel_count(&self) -> usize {
        self.channel_labels.len()
    }
}

/// A linear system whose response can be computed at any complex frequency
/// in the upper half of the sampling contour. Implementations must be pure:
/// equal `s` gives bit-identical output.
pub trait FrequencyDomainSystem {
    fn descriptor(&self) -> &SystemDescriptor;

    fn evaluate(&self, s: Complex64) -> Result<Vec<Complex64>, SystemError>;
}

impl<T: FrequencyDomainSystem + ?Sized> FrequencyDomainSystem for &T {
    fn descriptor(&self) -> &SystemDescriptor {
        (**self).descriptor()
    }

    fn evaluate(&self, s: Complex64) -> Result<Vec<Complex64>, SystemError> {
        (**self).evaluate(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RationalSystem {
    model: RationalModel,
    descriptor: SystemDescriptor,
}

impl RationalSystem {
    pub fn new(model: RationalModel, band_hint: Option<f64>) -> Result<Self, SystemError> {
        let descriptor = SystemDescriptor::new(model.labels().to_vec(), band_hint)?;
        Ok(Self { model, descriptor })
    }

    pub fn model(&self) -> &RationalModel {
        &self.model
    }
}

impl FrequencyDomainSystem for RationalSystem {
    fn descriptor(&self) -> &SystemDescriptor {
        &self.descriptor
    }

    fn evaluate(&self, s: Complex64) -> Result<Vec<Complex64>, SystemError> {
        Ok(self.model.eval(s)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// Axial displacement.
    Displacement,
    /// Axial traction (stress).
    Traction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Station {
    pub label: String,
    /// Distance from the fixed end along the axis.
    pub x: f64,
    pub quantity: Quantity,
}

/// Fixed-free prismatic rod, step traction `P0 H(t)` at `x = L`, zero
/// Poisson ratio (the response is uniform over the cross-section).
#[derive(Debug, Clone, PartialEq)]
pub struct RodParameters {
    pub length: f64,
    /// Cross-section side; metadata only.
    pub side: f64,
    pub youngs_modulus: f64,
    pub density: f64,
    pub load_amplitude: f64,
    pub stations: Vec<Station>,
}

impl RodParameters {
    pub fn validate(&self) -> Result<(), SystemError> {
        let positive = |v: f64, name: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(SystemError::InvalidParameter(alloc::format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive(self.length, "length")?;
        positive(self.youngs_modulus, "youngs_modulus")?;
        positive(self.density, "density")?;
        if !self.load_amplitude.is_finite() {
            return Err(SystemError::InvalidParameter(
                "load_amplitude must be finite".into(),
            ));
        }
        for st in &self.stations {
            if !(0.0..=self.length).contains(&st.x) {
                return Err(SystemError::InvalidParameter(alloc::format!(
                    "station `{}` at x = {} lies outside [0, {}]",
                    st.label,
                    st.x,
                    self.length
                )));
            }
        }
        Ok(())
    }

    /// Longitudinal wave speed `sqrt(E / rho)`.
    pub fn wave_speed(&self) -> f64 {
        (self.youngs_modulus / self.density).sqrt()
    }

    /// Static end displacement `P0 L / E`.
    pub fn static_tip_displacement(&self) -> f64 {
        self.load_amplitude * self.length / self.youngs_modulus
    }

    /// Circular frequency of mode `n >= 1`: `(2n - 1) pi c / (2L)`.
    pub fn mode_frequency(&self, n: usize) -> f64 {
        (2 * n - 1) as f64 * PI * self.wave_speed() / (2.0 * self.length)
    }
}

/// `(sinh(z x) / cosh(z L), cosh(z x) / cosh(z L))` without overflow, for
/// `re(z) >= 0`. Both numerator and denominator are scaled by `exp(-z L)`.
fn scaled_ratios(z: Complex64, x: f64, length: f64) -> (Complex64, Complex64) {
    let a = (z * (x - length)).exp();
    let b = (-z * (x + length)).exp();
    let den = 1.0 + (-2.0 * z * length).exp();
    ((a - b) / den, (a + b) / den)
}

fn hyperbolic_ratios(z: Complex64, x: f64, length: f64) -> (Complex64, Complex64) {
    if z.re >= 0.0 {
        scaled_ratios(z, x, length)
    } else {
        // sinh is odd, cosh even
        let (sh, ch) = scaled_ratios(-z, x, length);
        (-sh, ch)
    }
}

/// Laplace-domain response of one station:
/// `u = P0 c sinh(s x / c) / (E s^2 cosh(s L / c))`,
/// `sigma = P0 cosh(s x / c) / (s cosh(s L / c))`.
pub fn rod_frequency_response(
    p: &RodParameters,
    station: &Station,
    s: Complex64,
) -> Result<Complex64, SystemError> {
    if s.re == 0.0 && s.im == 0.0 {
        return Err(SystemError::ZeroFrequency);
    }
    let c = p.wave_speed();
    let (sh, ch) = hyperbolic_ratios(s / c, station.x, p.length);
    Ok(match station.quantity {
        Quantity::Displacement => p.load_amplitude * c * sh / (p.youngs_modulus * s * s),
        Quantity::Traction => p.load_amplitude * ch / s,
    })
}

/// Modal-series time response of one station, truncated at `modes` terms:
/// `u = P0/E [x - sum (8L/pi^2) (-1)^(n-1)/(2n-1)^2 sin(k_n x) cos(w_n t)]`
/// and its axial derivative times `E` for traction.
pub fn rod_time_response(p: &RodParameters, station: &Station, t: f64, modes: usize) -> f64 {
    let l = p.length;
    let x = station.x;
    let mut acc = 0.0;
    for n in 1..=modes {
        let odd = (2 * n - 1) as f64;
        let k = odd * PI / (2.0 * l);
        let w = p.mode_frequency(n);
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        acc += match station.quantity {
            Quantity::Displacement => {
                sign * 8.0 * l / (PI * PI * odd * odd) * (k * x).sin() * (w * t).cos()
            }
            Quantity::Traction => sign * 4.0 / (PI * odd) * (k * x).cos() * (w * t).cos(),
        };
    }
    match station.quantity {
        Quantity::Displacement => p.load_amplitude / p.youngs_modulus * (x - acc),
        Quantity::Traction => p.load_amplitude * (1.0 - acc),
    }
}

/// Default truncation of the modal series.
pub const DEFAULT_ROD_MODES: usize = 400;

/// Reference histories of every station on `times`.
pub fn rod_time_reference(
    p: &RodParameters,
    times: &[f64],
    modes: usize,
) -> Result<TimeSeries, LaplaceError> {
    let values = p
        .stations
        .iter()
        .map(|st| {
            times
                .iter()
                .map(|&t| rod_time_response(p, st, t, modes))
                .collect()
        })
        .collect();
    let labels = p.stations.iter().map(|st| st.label.clone()).collect();
    TimeSeries::new(times.to_vec(), values, labels)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RodSystem {
    params: RodParameters,
    descriptor: SystemDescriptor,
}

impl RodSystem {
    pub fn new(params: RodParameters) -> Result<Self, SystemError> {
        params.validate()?;
        let labels = params.stations.iter().map(|s| s.label.clone()).collect();
        let descriptor = SystemDescriptor::new(labels, None)?;
        Ok(Self { params, descriptor })
    }

    pub fn params(&self) -> &RodParameters {
        &self.params
    }
}

impl FrequencyDomainSystem for RodSystem {
    fn descriptor(&self) -> &SystemDescriptor {
        &self.descriptor
    }

    fn evaluate(&self, s: Complex64) -> Result<Vec<Complex64>, SystemError> {
        self.params
            .stations
            .iter()
            .map(|st| rod_frequency_response(&self.params, st, s))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub omega: f64,
    pub zeta: f64,
}

impl Mode {
    /// Upper member `-zeta w + i w sqrt(1 - zeta^2)` of the pole pair.
    pub fn pole(&self) -> Complex64 {
        Complex64::new(
            -self.zeta * self.omega,
            self.omega * (1.0 - self.zeta * self.zeta).sqrt(),
        )
    }
}

/// `f_k(s) = sum_n phi_{k,n} / (s^2 + 2 zeta_n w_n s + w_n^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalSystem {
    modes: Vec<Mode>,
    participation: Vec<Vec<f64>>,
    descriptor: SystemDescriptor,
}

impl ModalSystem {
    /// `participation[k][n]` is the weight of mode `n` in channel `k`.
    pub fn new(
        modes: Vec<Mode>,
        participation: Vec<Vec<f64>>,
        labels: Vec<String>,
        band_hint: Option<f64>,
    ) -> Result<Self, SystemError> {
        for (n, m) in modes.iter().enumerate() {
            if !(m.omega.is_finite() && m.omega > 0.0) || !(m.zeta > 0.0 && m.zeta < 1.0) {
                return Err(SystemError::InvalidParameter(alloc::format!(
                    "mode {n}: need omega > 0 and 0 < zeta < 1, got omega = {}, zeta = {}",
                    m.omega,
                    m.zeta
                )));
            }
        }
        if participation.len() != labels.len() {
            return Err(SystemError::InvalidParameter(alloc::format!(
                "{} participation rows for {} channels",
                participation.len(),
                labels.len()
            )));
        }
        if let Some(k) = participation
            .iter()
            .position(|row| row.len() != modes.len())
        {
            return Err(SystemError::InvalidParameter(alloc::format!(
                "channel {k}: expected {} participation factors",
                modes.len()
            )));
        }
        let descriptor = SystemDescriptor::new(labels, band_hint)?;
        Ok(Self {
            modes,
            participation,
            descriptor,
        })
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn participation(&self) -> &[Vec<f64>] {
        &self.participation
    }

    /// Exact partial-fraction form: for each mode the pole pair `p, conj p`
    /// with residue `phi / (p - conj p)` on `p`.
    pub fn to_rational(&self) -> RationalModel {
        use crate::vecfit::PoleSlot;
        let slots = self
            .modes
            .iter()
            .map(|m| PoleSlot::Pair(m.pole()))
            .collect();
        let residues = self
            .participation
            .iter()
            .map(|row| {
                let mut r = Vec::with_capacity(2 * row.len());
                for (phi, m) in row.iter().zip(&self.modes) {
                    let p = m.pole();
                    let res = *phi / (p - p.conj());
                    r.push(res);
                    r.push(res.conj());
                }
                r
            })
            .collect();
        RationalModel::from_slots(slots, residues, self.descriptor.channel_labels.clone())
    }

    /// Impulse response `sum_n phi e^{-zeta w t} sin(w_d t) / w_d` of channel `k`.
    pub fn impulse_response(&self, k: usize, t: f64) -> f64 {
        self.participation[k]
            .iter()
            .zip(&self.modes)
            .map(|(phi, m)| {
                let wd = m.omega * (1.0 - m.zeta * m.zeta).sqrt();
                phi * (-m.zeta * m.omega * t).exp() * (wd * t).sin() / wd
            })
            .sum()
    }
}

impl FrequencyDomainSystem for ModalSystem {
    fn descriptor(&self) -> &SystemDescriptor {
        &self.descriptor
    }

    fn evaluate(&self, s: Complex64) -> Result<Vec<Complex64>, SystemError> {
        Ok(self
            .participation
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.modes)
                    .map(|(phi, m)| *phi / (s * s + 2.0 * m.zeta * m.omega * s + m.omega * m.omega))
                    .sum()
            })
            .collect())
    }
}
