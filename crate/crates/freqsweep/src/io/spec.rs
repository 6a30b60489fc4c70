use freqsweep_core::afs::{AfsConfig, AfsError};
use freqsweep_core::laplace::{self, LaplaceError, TimeSeries};
use freqsweep_core::systems::{
    self, FrequencyDomainSystem, ModalSystem, Mode, Quantity, RationalSystem, RodParameters,
    RodSystem, Station, SystemDescriptor, SystemError,
};
use freqsweep_core::vecfit::RationalModel;
use freqsweep_core::Complex64;
use serde::{Deserialize, Serialize};

use super::{extended_float, from_json_str, to_json_string, FormatError};

/// Residues of one channel, as `[re, im]` pairs matching `poles`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelResidues {
    pub label: String,
    pub residues: Vec<[f64; 2]>,
}

/// Pole-residue model: `{"poles": [[re, im], ...], "channels": [{"label", "residues"}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub poles: Vec<[f64; 2]>,
    pub channels: Vec<ChannelResidues>,
}

pub(crate) fn complex(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

pub(crate) fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl ModelSpec {
    pub fn from_model(model: &RationalModel) -> Self {
        let channels = model
            .labels()
            .iter()
            .enumerate()
            .map(|(k, label)| ChannelResidues {
                label: label.clone(),
                residues: model.residues(k).iter().copied().map(pair).collect(),
            })
            .collect();
        Self {
            poles: model.poles().iter().copied().map(pair).collect(),
            channels,
        }
    }

    pub fn to_model(&self) -> Result<RationalModel, FormatError> {
        let poles = self.poles.iter().copied().map(complex).collect();
        let residues = self
            .channels
            .iter()
            .map(|c| c.residues.iter().copied().map(complex).collect())
            .collect();
        let labels = self.channels.iter().map(|c| c.label.clone()).collect();
        Ok(RationalModel::new(poles, residues, labels)?)
    }
}

pub fn model_to_json(model: &RationalModel) -> String {
    to_json_string(&ModelSpec::from_model(model))
}

pub fn model_from_json(text: &str) -> Result<RationalModel, FormatError> {
    from_json_str::<ModelSpec>(text)?.to_model()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantitySpec {
    Displacement,
    Traction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationSpec {
    pub label: String,
    pub x: f64,
    pub quantity: QuantitySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RodSpec {
    pub length: f64,
    pub side: f64,
    pub youngs_modulus: f64,
    pub density: f64,
    pub load_amplitude: f64,
    pub stations: Vec<StationSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub omega: f64,
    pub zeta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModalSpec {
    pub modes: Vec<ModeSpec>,
    /// `participation[k][n]`: weight of mode `n` in channel `k`.
    pub participation: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    #[serde(default)]
    pub band_hint: Option<f64>,
}

/// System description, tagged by `"type"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SystemSpec {
    Rational {
        #[serde(flatten)]
        model: ModelSpec,
        #[serde(default)]
        band_hint: Option<f64>,
    },
    Rod(RodSpec),
    Modal(ModalSpec),
}

impl SystemSpec {
    pub fn build(&self) -> Result<BuiltSystem, FormatError> {
        Ok(match self {
            SystemSpec::Rational { model, band_hint } => {
                BuiltSystem::Rational(RationalSystem::new(model.to_model()?, *band_hint)?)
            }
            SystemSpec::Rod(rod) => {
                let stations = rod
                    .stations
                    .iter()
                    .map(|s| Station {
                        label: s.label.clone(),
                        x: s.x,
                        quantity: match s.quantity {
                            QuantitySpec::Displacement => Quantity::Displacement,
                            QuantitySpec::Traction => Quantity::Traction,
                        },
                    })
                    .collect();
                BuiltSystem::Rod(RodSystem::new(RodParameters {
                    length: rod.length,
                    side: rod.side,
                    youngs_modulus: rod.youngs_modulus,
                    density: rod.density,
                    load_amplitude: rod.load_amplitude,
                    stations,
                })?)
            }
            SystemSpec::Modal(m) => BuiltSystem::Modal(ModalSystem::new(
                m.modes
                    .iter()
                    .map(|x| Mode {
                        omega: x.omega,
                        zeta: x.zeta,
                    })
                    .collect(),
                m.participation.clone(),
                m.labels.clone(),
                m.band_hint,
            )?),
        })
    }
}

/// A system ready for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltSystem {
    Rational(RationalSystem),
    Rod(RodSystem),
    Modal(ModalSystem),
}

impl BuiltSystem {
    pub fn kind(&self) -> &'static str {
        match self {
            BuiltSystem::Rational(_) => "rational",
            BuiltSystem::Rod(_) => "rod",
            BuiltSystem::Modal(_) => "modal",
        }
    }

    /// Closed-form time response of every channel: step response for the
    /// rod, impulse response for modal and rational systems.
    pub fn reference(&self, times: &[f64]) -> Result<TimeSeries, LaplaceError> {
        match self {
            BuiltSystem::Rational(s) => laplace::rational_invert(s.model(), times),
            BuiltSystem::Rod(s) => {
                systems::rod_time_reference(s.params(), times, systems::DEFAULT_ROD_MODES)
            }
            BuiltSystem::Modal(s) => {
                let values = (0..s.descriptor().channel_count())
                    .map(|k| times.iter().map(|&t| s.impulse_response(k, t)).collect())
                    .collect();
                TimeSeries::new(
                    times.to_vec(),
                    values,
                    s.descriptor().channel_labels.clone(),
                )
            }
        }
    }
}

impl FrequencyDomainSystem for BuiltSystem {
    fn descriptor(&self) -> &SystemDescriptor {
        match self {
            BuiltSystem::Rational(s) => s.descriptor(),
            BuiltSystem::Rod(s) => s.descriptor(),
            BuiltSystem::Modal(s) => s.descriptor(),
        }
    }

    fn evaluate(&self, s: Complex64) -> Result<Vec<Complex64>, SystemError> {
        match self {
            BuiltSystem::Rational(x) => x.evaluate(s),
            BuiltSystem::Rod(x) => x.evaluate(s),
            BuiltSystem::Modal(x) => x.evaluate(s),
        }
    }
}

fn default_kappa() -> f64 {
    3.0
}

fn default_true() -> bool {
    true
}

/// Grid and sweep settings shared by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Time period `T` (s).
    pub period: f64,
    /// Fourier-series sample count `N_s` (even).
    pub samples: usize,
    /// Damping factor, `eta = kappa ln(10) / T`.
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    /// Hanning window for the Fourier-series inverse.
    #[serde(default = "default_true")]
    pub window: bool,
    #[serde(default)]
    pub afs: AfsSettings,
}

/// Adaptive sweep constants; every field is optional in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AfsSettings {
    /// Overrides the band edge implied by `samples`.
    pub omega_max: Option<f64>,
    /// Overrides the abscissa implied by `kappa`.
    pub eta: Option<f64>,
    pub initial_count: usize,
    pub alpha_high: f64,
    pub alpha_low: f64,
    #[serde(with = "extended_float")]
    pub e1_threshold: f64,
    #[serde(with = "extended_float")]
    pub e2_threshold: f64,
    pub validation_steps: usize,
    pub orf: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
    pub random_orf_count: usize,
    pub grid_points: usize,
    pub time_points: usize,
    pub max_iterations: usize,
    pub relocations: usize,
    pub band_limited_inverse: bool,
}

impl Default for AfsSettings {
    fn default() -> Self {
        let c = AfsConfig::new(1.0, 1.0, 0.0);
        Self {
            omega_max: None,
            eta: None,
            initial_count: c.initial_count,
            alpha_high: c.alpha_high,
            alpha_low: c.alpha_low,
            e1_threshold: c.e1_threshold,
            e2_threshold: c.e2_threshold,
            validation_steps: c.validation_steps,
            orf: c.orf,
            test: c.test,
            seed: c.seed,
            random_orf_count: c.random_orf_count,
            grid_points: c.grid_points,
            time_points: c.time_points,
            max_iterations: c.max_iterations,
            relocations: c.relocations,
            band_limited_inverse: c.band_limited_inverse,
        }
    }
}

impl SweepConfig {
    pub fn new(period: f64, samples: usize) -> Self {
        Self {
            period,
            samples,
            kappa: default_kappa(),
            window: true,
            afs: AfsSettings::default(),
        }
    }

    /// Contour abscissa of the Fourier-series sweep.
    pub fn fsm_eta(&self) -> f64 {
        laplace::damping_eta(self.kappa, self.period)
    }

    pub fn afs_config(&self) -> Result<AfsConfig, AfsError> {
        let mut c = AfsConfig::matching_fsm(self.period, self.samples, self.kappa)?;
        let a = &self.afs;
        if let Some(w) = a.omega_max {
            c.omega_max = w;
        }
        if let Some(e) = a.eta {
            c.eta = e;
        }
        c.initial_count = a.initial_count;
        c.alpha_high = a.alpha_high;
        c.alpha_low = a.alpha_low;
        c.e1_threshold = a.e1_threshold;
        c.e2_threshold = a.e2_threshold;
        c.validation_steps = a.validation_steps;
        c.orf = a.orf.clone();
        c.test = a.test.clone();
        c.seed = a.seed;
        c.random_orf_count = a.random_orf_count;
        c.grid_points = a.grid_points;
        c.time_points = a.time_points;
        c.max_iterations = a.max_iterations;
        c.relocations = a.relocations;
        c.band_limited_inverse = a.band_limited_inverse;
        Ok(c)
    }
}
