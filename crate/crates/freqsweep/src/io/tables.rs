use std::cmp::Ordering;

use freqsweep_core::laplace::TimeSeries;
use freqsweep_core::vecfit::Spectrum;
use freqsweep_core::{Complex64, FrequencySample};

use super::FormatError;

/// One row of a spectrum CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub omega: f64,
    pub channel: String,
    pub value: Complex64,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn into_string(writer: csv::Writer<Vec<u8>>) -> Result<String, FormatError> {
    let bytes = writer
        .into_inner()
        .map_err(|e| FormatError::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| FormatError::Csv(e.to_string()))
}

/// `omega,channel,re,im,abs`, sorted by `omega` then channel label.
pub fn export_spectrum_csv(
    labels: &[String],
    samples: &[FrequencySample],
) -> Result<String, FormatError> {
    let mut rows: Vec<(f64, &str, Complex64)> = Vec::new();
    for (j, x) in samples.iter().enumerate() {
        if x.values.len() != labels.len() {
            return Err(FormatError::schema(
                format!("samples[{j}]"),
                format!("expected {} values, got {}", labels.len(), x.values.len()),
            ));
        }
        for (label, v) in labels.iter().zip(&x.values) {
            rows.push((x.s.im, label, *v));
        }
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["omega", "channel", "re", "im", "abs"])?;
    for (omega, label, v) in rows {
        w.write_record([
            num(omega),
            label.to_string(),
            num(v.re),
            num(v.im),
            num(v.norm()),
        ])?;
    }
    into_string(w)
}

fn parse_field(
    record: &csv::StringRecord,
    line: usize,
    index: usize,
    name: &str,
) -> Result<f64, FormatError> {
    let raw = record
        .get(index)
        .ok_or_else(|| FormatError::Csv(format!("line {line}: missing `{name}`")))?;
    raw.trim()
        .parse()
        .map_err(|_| FormatError::Csv(format!("line {line}: `{name}` is not a number: {raw}")))
}

pub fn parse_spectrum_csv(text: &str) -> Result<Vec<SpectrumRow>, FormatError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != ["omega", "channel", "re", "im", "abs"] {
        return Err(FormatError::Csv(
            "expected header omega,channel,re,im,abs".into(),
        ));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        rows.push(SpectrumRow {
            omega: parse_field(&rec, line, 0, "omega")?,
            channel: rec.get(1).unwrap_or_default().to_string(),
            value: Complex64::new(
                parse_field(&rec, line, 2, "re")?,
                parse_field(&rec, line, 3, "im")?,
            ),
        });
    }
    Ok(rows)
}

/// Groups rows into samples at `s = eta + i omega`. Channels follow the
/// order of first appearance; every frequency must carry every channel.
pub fn spectrum_from_rows(rows: &[SpectrumRow], eta: f64) -> Result<Spectrum, FormatError> {
    let mut labels: Vec<String> = Vec::new();
    for row in rows {
        if !labels.contains(&row.channel) {
            labels.push(row.channel.clone());
        }
    }
    let mut sorted: Vec<&SpectrumRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    let mut samples: Vec<FrequencySample> = Vec::new();
    let mut filled: Vec<Vec<bool>> = Vec::new();
    for row in sorted {
        let k = labels
            .iter()
            .position(|l| *l == row.channel)
            .expect("label collected");
        if samples
            .last()
            .is_none_or(|x| x.s.im.partial_cmp(&row.omega) != Some(Ordering::Equal))
        {
            samples.push(FrequencySample::new(
                Complex64::new(eta, row.omega),
                vec![Complex64::new(0.0, 0.0); labels.len()],
            ));
            filled.push(vec![false; labels.len()]);
        }
        let last = samples.len() - 1;
        if filled[last][k] {
            return Err(FormatError::Csv(format!(
                "channel `{}` appears twice at omega = {}",
                row.channel, row.omega
            )));
        }
        filled[last][k] = true;
        samples[last].values[k] = row.value;
    }
    for (j, f) in filled.iter().enumerate() {
        if let Some(k) = f.iter().position(|x| !x) {
            return Err(FormatError::Csv(format!(
                "channel `{}` missing at omega = {}",
                labels[k], samples[j].s.im
            )));
        }
    }
    Ok(Spectrum::new(labels, samples)?)
}

/// `t,<label1>,<label2>,...`, one row per time.
pub fn export_timeseries_csv(series: &TimeSeries) -> Result<String, FormatError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    header.extend(series.labels().iter().cloned());
    w.write_record(&header)?;
    for (n, t) in series.times().iter().enumerate() {
        let mut row = vec![num(*t)];
        row.extend((0..series.channel_count()).map(|k| num(series.channel(k)[n])));
        w.write_record(&row)?;
    }
    into_string(w)
}

pub fn parse_timeseries_csv(text: &str) -> Result<TimeSeries, FormatError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers()?.clone();
    if header.get(0) != Some("t") {
        return Err(FormatError::Csv("first column must be `t`".into()));
    }
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut times = Vec::new();
    let mut values = vec![Vec::new(); labels.len()];
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        times.push(parse_field(&rec, line, 0, "t")?);
        for (k, column) in values.iter_mut().enumerate() {
            column.push(parse_field(&rec, line, k + 1, &labels[k])?);
        }
    }
    TimeSeries::new(times, values, labels).map_err(|e| FormatError::Csv(e.to_string()))
}
