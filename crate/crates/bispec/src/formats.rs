//! Text formats for samples, cumulant tables, fields and phase decompositions.
//!
//! Every number is written with Rust's shortest round-trip formatting, so
//! reading a file back reproduces the in-memory values bit for bit.

use std::fs;
use std::io::Write;
use std::path::Path;

use bispec_core::cumulant::CumulantTable;
use bispec_core::dft::grid_frequency;
use bispec_core::phase::PhaseOffset;
use bispec_core::{
    BifrequencyField, Complex64, FieldKind, FieldSource, PhaseDecomposition, TimeSeriesSample,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult, Location};

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Input(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = dir.map_or_else(|| tmp_name.clone().into(), |d| d.join(&tmp_name));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(CliError::io(path, e));
    }
    Ok(())
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn csv_error(origin: &str, line: usize, message: impl Into<String>) -> CliError {
    CliError::Csv {
        origin: origin.to_string(),
        line,
        message: message.into(),
    }
}

/// Non-empty data lines after a required header, with 1-based line numbers.
fn csv_rows<'a>(
    text: &'a str,
    header: &str,
    origin: &str,
) -> CliResult<impl Iterator<Item = (usize, &'a str)>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, h)) if h == header => {}
        Some((_, h)) => {
            return Err(csv_error(
                origin,
                1,
                format!("expected header `{header}`, found `{h}`"),
            ))
        }
        None => return Err(csv_error(origin, 1, format!("missing header `{header}`"))),
    }
    Ok(lines.filter(|(_, l)| !l.is_empty()))
}

fn parse_f64(origin: &str, line: usize, column: &str, text: &str) -> CliResult<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| csv_error(origin, line, format!("column `{column}`: `{text}` is not a number")))
}

fn parse_i64(origin: &str, line: usize, column: &str, text: &str) -> CliResult<i64> {
    text.trim()
        .parse::<i64>()
        .map_err(|_| csv_error(origin, line, format!("column `{column}`: `{text}` is not an integer")))
}

fn split_fields<'a>(origin: &str, line: usize, row: &'a str, count: usize) -> CliResult<Vec<&'a str>> {
    let fields: Vec<&str> = row.split(',').collect();
    if fields.len() != count {
        return Err(csv_error(
            origin,
            line,
            format!("expected {count} fields, found {}", fields.len()),
        ));
    }
    Ok(fields)
}

/// One value per line under the header `x`.
pub fn sample_to_csv(sample: &TimeSeriesSample) -> String {
    let mut out = String::with_capacity(sample.len() * 22 + 2);
    out.push_str("x\n");
    for v in sample.values() {
        out.push_str(&format!("{v}\n"));
    }
    out
}

pub fn sample_from_csv(text: &str, origin: &str) -> CliResult<TimeSeriesSample> {
    let values = csv_rows(text, "x", origin)?
        .map(|(line, row)| {
            let v = parse_f64(origin, line, "x", row)?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(csv_error(origin, line, "values must be finite"))
            }
        })
        .collect::<CliResult<Vec<f64>>>()?;
    Ok(TimeSeriesSample::new(values, None, origin.to_string())?)
}

/// `t1,t2,value` rows in the table's row-major order.
pub fn cumulants_to_csv(table: &CumulantTable) -> String {
    let mut out = String::from("t1,t2,value\n");
    for (t1, t2, v) in table.iter() {
        out.push_str(&format!("{t1},{t2},{v}\n"));
    }
    out
}

pub fn cumulants_from_csv(text: &str, origin: &str) -> CliResult<CumulantTable> {
    let mut rows = Vec::new();
    for (line, row) in csv_rows(text, "t1,t2,value", origin)? {
        let f = split_fields(origin, line, row, 3)?;
        rows.push((
            line,
            parse_i64(origin, line, "t1", f[0])?,
            parse_i64(origin, line, "t2", f[1])?,
            parse_f64(origin, line, "value", f[2])?,
        ));
    }
    let span = (rows.len() as f64).sqrt() as usize;
    if span * span != rows.len() || span.is_multiple_of(2) {
        return Err(csv_error(
            origin,
            rows.len() + 1,
            format!("{} rows do not form a square lag window", rows.len()),
        ));
    }
    let t = (span / 2) as i64;
    for (i, &(line, t1, t2, _)) in rows.iter().enumerate() {
        let expected = ((i / span) as i64 - t, (i % span) as i64 - t);
        if (t1, t2) != expected {
            return Err(csv_error(
                origin,
                line,
                format!("expected lags {expected:?}, found ({t1}, {t2})"),
            ));
        }
    }
    Ok(CumulantTable::from_values(
        t as usize,
        rows.into_iter().map(|r| r.3).collect(),
    )?)
}

/// `omega1,omega2,re,im` rows, `omega1` outer.
pub fn field_to_csv(field: &BifrequencyField) -> String {
    let mut out = String::with_capacity(field.values().len() * 80 + 24);
    out.push_str("omega1,omega2,re,im\n");
    for (w1, w2, z) in field.iter() {
        out.push_str(&format!("{w1},{w2},{},{}\n", z.re, z.im));
    }
    out
}

/// Sidecar metadata stored next to a field CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMetadata {
    pub grid: usize,
    pub kind: FieldKind,
    pub source: FieldSource,
    pub max_abs: f64,
}

impl FieldMetadata {
    pub fn of(field: &BifrequencyField) -> Self {
        FieldMetadata {
            grid: field.grid(),
            kind: field.kind(),
            source: field.source().clone(),
            max_abs: field.max_abs(),
        }
    }
}

pub fn field_metadata_to_toml(field: &BifrequencyField) -> CliResult<String> {
    toml::to_string(&FieldMetadata::of(field)).map_err(|e| CliError::Serialize(e.to_string()))
}

fn toml_parse_error(origin: &str, source: &str, e: toml::de::Error) -> CliError {
    CliError::Parse {
        origin: origin.to_string(),
        key: "<document>".to_string(),
        location: Location::of_offset(source, e.span().map_or(0, |s| s.start)),
        message: e.message().to_string(),
    }
}

/// Rebuilds a field from its CSV and sidecar texts.
pub fn field_from_csv(csv: &str, metadata: &str, origin: &str) -> CliResult<BifrequencyField> {
    let meta: FieldMetadata =
        toml::from_str(metadata).map_err(|e| toml_parse_error(origin, metadata, e))?;
    let g = meta.grid;
    let mut values = Vec::with_capacity(g * g);
    for (i, (line, row)) in csv_rows(csv, "omega1,omega2,re,im", origin)?.enumerate() {
        let f = split_fields(origin, line, row, 4)?;
        let w1 = parse_f64(origin, line, "omega1", f[0])?;
        let w2 = parse_f64(origin, line, "omega2", f[1])?;
        if i >= g * g || w1 != grid_frequency(i / g, g) || w2 != grid_frequency(i % g, g) {
            return Err(csv_error(
                origin,
                line,
                format!("row does not match grid point {i} of a {g}x{g} grid"),
            ));
        }
        values.push(Complex64::new(
            parse_f64(origin, line, "re", f[2])?,
            parse_f64(origin, line, "im", f[3])?,
        ));
    }
    if values.len() != g * g {
        return Err(csv_error(
            origin,
            values.len() + 2,
            format!("expected {} rows, found {}", g * g, values.len()),
        ));
    }
    Ok(BifrequencyField::from_values(g, values, meta.kind, meta.source)?)
}

/// Structured-text form of a [`PhaseDecomposition`].
///
/// `k_labels` is run-length encoded as space-separated `value*count` tokens,
/// with `_` standing for masked grid points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PhaseText {
    n: i64,
    offset: PhaseOffset,
    residual: f64,
    grid: usize,
    k_labels: String,
}

pub fn encode_labels(labels: &[Option<i64>]) -> String {
    let mut runs: Vec<(Option<i64>, usize)> = Vec::new();
    for &l in labels {
        match runs.last_mut() {
            Some((v, count)) if *v == l => *count += 1,
            _ => runs.push((l, 1)),
        }
    }
    runs.iter()
        .map(|(v, count)| match v {
            Some(v) => format!("{v}*{count}"),
            None => format!("_*{count}"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn decode_labels(text: &str) -> Result<Vec<Option<i64>>, String> {
    let mut out = Vec::new();
    for token in text.split_whitespace() {
        let (v, count) = token
            .split_once('*')
            .ok_or_else(|| format!("run `{token}` lacks `*`"))?;
        let count: usize = count
            .parse()
            .map_err(|_| format!("run `{token}` has a bad count"))?;
        let v = match v {
            "_" => None,
            v => Some(v.parse::<i64>().map_err(|_| format!("run `{token}` has a bad label"))?),
        };
        out.extend(std::iter::repeat_n(v, count));
    }
    Ok(out)
}

pub fn phase_to_text(d: &PhaseDecomposition) -> CliResult<String> {
    toml::to_string(&PhaseText {
        n: d.n,
        offset: d.offset,
        residual: d.residual,
        grid: d.k_labels.len(),
        k_labels: encode_labels(&d.k_labels),
    })
    .map_err(|e| CliError::Serialize(e.to_string()))
}

pub fn phase_from_text(text: &str, origin: &str) -> CliResult<PhaseDecomposition> {
    let raw: PhaseText = toml::from_str(text).map_err(|e| toml_parse_error(origin, text, e))?;
    let labels = decode_labels(&raw.k_labels).map_err(|m| CliError::Parse {
        origin: origin.to_string(),
        key: "k_labels".to_string(),
        location: Location::of_offset(text, text.find("k_labels").unwrap_or(0)),
        message: m,
    })?;
    if labels.len() != raw.grid {
        return Err(CliError::Input(format!(
            "{origin}: k_labels cover {} points, grid is {}",
            labels.len(),
            raw.grid
        )));
    }
    Ok(PhaseDecomposition {
        n: raw.n,
        offset: raw.offset,
        k_labels: labels,
        residual: raw.residual,
    })
}
