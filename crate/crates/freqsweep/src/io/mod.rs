//! JSON and CSV interchange.

mod archive;
mod spec;
mod tables;

pub use archive::{load_archive, save_archive, SweepArchive, ARCHIVE_VERSION};
pub use spec::{
    model_from_json, model_to_json, AfsSettings, BuiltSystem, ChannelResidues, ModalSpec, ModeSpec,
    ModelSpec, QuantitySpec, RodSpec, StationSpec, SweepConfig, SystemSpec,
};
pub use tables::{
    export_spectrum_csv, export_timeseries_csv, parse_spectrum_csv, parse_timeseries_csv,
    spectrum_from_rows, SpectrumRow,
};

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use freqsweep_core::systems::SystemError;
use freqsweep_core::vecfit::FitError;
use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("archive format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u64, expected: u64 },
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Model(#[from] FitError),
}

impl FormatError {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        FormatError::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        FormatError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<csv::Error> for FormatError {
    fn from(e: csv::Error) -> Self {
        FormatError::Csv(e.to_string())
    }
}

/// Parses JSON text, reporting the field path of the first schema violation.
pub fn from_json_str<T: DeserializeOwned>(text: &str) -> Result<T, FormatError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        FormatError::schema(path, e.into_inner().to_string())
    })?;
    de.end()
        .map_err(|e| FormatError::schema(".", e.to_string()))?;
    Ok(value)
}

pub(crate) fn from_json_value<T: DeserializeOwned>(
    value: serde_json::Value,
) -> Result<T, FormatError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        FormatError::schema(path, e.into_inner().to_string())
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("in-memory JSON serialization");
    text.push('\n');
    text
}

pub fn read_text(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|e| FormatError::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, FormatError> {
    from_json_str(&read_text(path)?)
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so readers never observe a partially written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), FormatError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| FormatError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| FormatError::io(path, e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| FormatError::io(path, e))?;
    tmp.persist(path)
        .map_err(|e| FormatError::io(path, e.error))?;
    Ok(())
}

/// Serde adapter for floats that may be infinite: finite values are plain
/// JSON numbers, the rest are the strings `"inf"`, `"-inf"` and `"nan"`.
pub mod extended_float {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &f64, ser: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            ser.serialize_f64(*x)
        } else if x.is_nan() {
            ser.serialize_str("nan")
        } else if *x > 0.0 {
            ser.serialize_str("inf")
        } else {
            ser.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<f64, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = f64;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v.to_ascii_lowercase().as_str() {
                    "inf" | "+inf" | "infinity" | "+infinity" => Ok(f64::INFINITY),
                    "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                    "nan" => Ok(f64::NAN),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        de.deserialize_any(V)
    }
}
