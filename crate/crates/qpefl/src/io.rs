//! Spectrum files and CSV output.
//!
//! Every CSV written here starts with a `# config: {...}` line holding the
//! resolved run configuration as compact JSON, followed by a header row.
//! Floats are written with 17 significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use qpefl_core::spectral::{Line, Spectrum};
use serde::Serialize;

use crate::error::{Error, Result};

/// Round-trip formatting for CSV cells.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Reads a two-column `energy,weight` CSV. Lines starting with `#` are
/// comments and an `energy,weight` header row is optional. Lines are
/// returned sorted by energy.
pub fn load_spectrum(path: &Path) -> Result<Spectrum> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => Error::io(path, source),
            other => Error::Invalid(format!("{}: {other:?}", path.display())),
        })?;
    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(parse_err(
                line,
                format!("expected 2 columns `energy,weight`, found {}", record.len()),
            ));
        }
        if first
            && record[0].eq_ignore_ascii_case("energy")
            && record[1].eq_ignore_ascii_case("weight")
        {
            first = false;
            continue;
        }
        first = false;
        let energy: f64 = record[0]
            .parse()
            .map_err(|_| parse_err(line, format!("invalid energy `{}`", &record[0])))?;
        let weight: f64 = record[1]
            .parse()
            .map_err(|_| parse_err(line, format!("invalid weight `{}`", &record[1])))?;
        if !energy.is_finite() {
            return Err(parse_err(
                line,
                format!("energy `{}` is not finite", &record[0]),
            ));
        }
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(parse_err(
                line,
                format!("negative or non-finite weight `{}`", &record[1]),
            ));
        }
        lines.push(Line { energy, weight });
    }
    if lines.is_empty() {
        return Err(Error::Invalid(format!(
            "{}: empty spectrum",
            path.display()
        )));
    }
    Ok(Spectrum::new(lines)?)
}

/// Writes the config line, a header row and the rows.
pub fn write_csv<W: Write>(
    out: W,
    config: &impl Serialize,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let mut out = out;
    let json = serde_json::to_string(config)?;
    writeln!(out, "# config: {json}").map_err(|e| Error::io("<output>", e))?;
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    writer.flush().map_err(|e| Error::io("<output>", e))?;
    Ok(())
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Pretty JSON with the struct's field order and a trailing newline.
pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}
