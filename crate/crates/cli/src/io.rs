//! Dataset input, number formatting and output plumbing.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use xisym::PairedSample;

use crate::CliError;

/// Formats a float with 12 significant digits, the fixed width used in
/// every CSV cell. Parsing the result and formatting it again reproduces
/// the same bytes.
pub fn fmt12(value: f64) -> String {
    format!("{value:.11e}")
}

/// Rounds to 12 significant digits for JSON output, so envelopes are
/// stable across serializer versions.
pub fn sig12(value: f64) -> f64 {
    fmt12(value).parse().expect("12-digit form parses back")
}

/// Reads a two-column numeric CSV from a path, or stdin when the path is
/// "-". A non-numeric first row is treated as a header unless
/// `assume_no_header` insists the data starts immediately.
pub fn read_dataset(path: &str, assume_no_header: bool) -> Result<PairedSample, CliError> {
    let raw = if path == "-" {
        let mut buffer = String::new();
        io::stdin()
            .read_to_string(&mut buffer)
            .map_err(CliError::Io)?;
        buffer
    } else {
        std::fs::read_to_string(Path::new(path))
            .map_err(|e| CliError::Data(format!("cannot read {path}: {e}")))?
    };

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(raw.as_bytes());

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let row = index + 1;
        let record = record.map_err(|e| CliError::Data(format!("row {row}: {e}")))?;
        if record.len() < 2 {
            return Err(CliError::Data(format!(
                "row {row}: expected two columns, found {}",
                record.len()
            )));
        }
        let fields = (record[0].trim(), record[1].trim());
        match (fields.0.parse::<f64>(), fields.1.parse::<f64>()) {
            (Ok(x), Ok(y)) => {
                xs.push(x);
                ys.push(y);
            }
            _ if index == 0 && !assume_no_header => {
                // Header row; skip it.
            }
            (Err(_), _) => {
                return Err(CliError::Data(format!(
                    "row {row}: could not parse '{}' as a number",
                    fields.0
                )));
            }
            (_, Err(_)) => {
                return Err(CliError::Data(format!(
                    "row {row}: could not parse '{}' as a number",
                    fields.1
                )));
            }
        }
    }

    if xs.len() < 2 {
        return Err(CliError::Data(format!(
            "need at least 2 data rows, found {}",
            xs.len()
        )));
    }
    PairedSample::new(xs, ys).map_err(CliError::from)
}

/// Writes table output to `--out` or stdout.
pub fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let mut file = File::create(path).map_err(CliError::Io)?;
            file.write_all(content.as_bytes()).map_err(CliError::Io)
        }
        None => io::stdout()
            .write_all(content.as_bytes())
            .map_err(CliError::Io),
    }
}
