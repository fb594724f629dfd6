//! CSV files with a commented header block.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::settings::CliResult;

/// Resolved configuration as ordered `key = value` pairs.
#[derive(Debug, Clone, Default)]
pub struct Header {
    pub command: &'static str,
    pub master_seed: u64,
    pub entries: Vec<(String, String)>,
}

impl Header {
    pub fn new(command: &'static str, master_seed: u64) -> Self {
        Self {
            command,
            master_seed,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    fn write_to(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "# schedtune {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(out, "# command = {}", self.command)?;
        writeln!(out, "# master_seed = {}", self.master_seed)?;
        for (k, v) in &self.entries {
            writeln!(out, "# {k} = {v}")?;
        }
        Ok(())
    }
}

/// Writes the header block, then `columns` and `rows` as CSV, to `path` or
/// to stdout.
pub fn write_csv(
    path: Option<&Path>,
    header: &Header,
    columns: &[&str],
    rows: &[Vec<String>],
) -> CliResult<()> {
    let mut sink: Box<dyn Write> = match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    };
    header.write_to(&mut sink)?;
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(columns)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Plot series as `series,x,y` rows.
pub fn write_plot(path: &Path, header: &Header, points: &[(String, f64, f64)]) -> CliResult<()> {
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|(s, x, y)| vec![s.clone(), fmt_f64(*x), fmt_f64(*y)])
        .collect();
    write_csv(Some(path), header, &["series", "x", "y"], &rows)
}

/// Shortest round-trip decimal; non-finite values become `nan`/`inf`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v}")
    }
}

/// A response known to be a whole number of jiffies.
pub fn fmt_jiffies(v: f64) -> String {
    if v.is_finite() && v.fract() == 0.0 {
        format!("{}", v as i64)
    } else {
        fmt_f64(v)
    }
}

pub fn fmt_opt(v: Option<usize>) -> String {
    v.map_or_else(String::new, |n| n.to_string())
}
