use std::path::Path;

use freqsweep_core::vecfit::RationalModel;
use freqsweep_core::FrequencySample;
use serde::{Deserialize, Serialize};

use super::spec::{complex, pair, ModelSpec, SweepConfig};
use super::{from_json_value, read_text, to_json_string, write_atomic, FormatError};

pub const ARCHIVE_VERSION: u64 = 1;

/// Snapshot of an adaptive sweep, sufficient to resume it.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepArchive {
    pub version: u64,
    /// Configuration with observation and test channels resolved.
    pub config: SweepConfig,
    pub labels: Vec<String>,
    /// Samples in acquisition order.
    pub samples: Vec<FrequencySample>,
    pub converged: bool,
    pub model: Option<RationalModel>,
}

impl SweepArchive {
    pub fn new(
        config: SweepConfig,
        labels: Vec<String>,
        samples: Vec<FrequencySample>,
        converged: bool,
        model: Option<RationalModel>,
    ) -> Self {
        Self {
            version: ARCHIVE_VERSION,
            config,
            labels,
            samples,
            converged,
            model,
        }
    }

    pub fn n_c(&self) -> usize {
        self.samples.len()
    }

    pub fn to_json(&self) -> String {
        let dto = ArchiveDto {
            format_version: self.version,
            config: self.config.clone(),
            labels: self.labels.clone(),
            n_c: self.n_c(),
            converged: self.converged,
            samples: self
                .samples
                .iter()
                .map(|x| SampleDto {
                    s: pair(x.s),
                    values: x.values.iter().copied().map(pair).collect(),
                })
                .collect(),
            model: self.model.as_ref().map(ModelSpec::from_model),
        };
        to_json_string(&dto)
    }

    /// Parses and validates an archive; nothing is returned unless the whole
    /// document is consistent.
    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| FormatError::schema(".", e.to_string()))?;
        let found = value
            .get("format_version")
            .ok_or_else(|| FormatError::schema("format_version", "missing field"))?
            .as_u64()
            .ok_or_else(|| FormatError::schema("format_version", "expected an unsigned integer"))?;
        if found != ARCHIVE_VERSION {
            return Err(FormatError::VersionMismatch {
                found,
                expected: ARCHIVE_VERSION,
            });
        }
        let dto: ArchiveDto = from_json_value(value)?;
        if dto.n_c != dto.samples.len() {
            return Err(FormatError::schema(
                "n_c",
                format!(
                    "records {} samples but {} are stored",
                    dto.n_c,
                    dto.samples.len()
                ),
            ));
        }
        let mut samples = Vec::with_capacity(dto.samples.len());
        for (j, x) in dto.samples.into_iter().enumerate() {
            if x.values.len() != dto.labels.len() {
                return Err(FormatError::schema(
                    format!("samples[{j}].values"),
                    format!(
                        "expected {} values, got {}",
                        dto.labels.len(),
                        x.values.len()
                    ),
                ));
            }
            samples.push(FrequencySample::new(
                complex(x.s),
                x.values.into_iter().map(complex).collect(),
            ));
        }
        let model = match dto.model {
            Some(m) => Some(
                m.to_model()
                    .map_err(|e| FormatError::schema("model", e.to_string()))?,
            ),
            None => None,
        };
        Ok(Self {
            version: found,
            config: dto.config,
            labels: dto.labels,
            samples,
            converged: dto.converged,
            model,
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleDto {
    s: [f64; 2],
    values: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArchiveDto {
    format_version: u64,
    config: SweepConfig,
    labels: Vec<String>,
    n_c: usize,
    converged: bool,
    samples: Vec<SampleDto>,
    model: Option<ModelSpec>,
}

pub fn save_archive(archive: &SweepArchive, destination: &Path) -> Result<(), FormatError> {
    write_atomic(destination, archive.to_json().as_bytes())
}

pub fn load_archive(source: &Path) -> Result<SweepArchive, FormatError> {
    SweepArchive::from_json(&read_text(source)?)
}
