//! Plain-text writers. Numbers use the shortest decimal that round-trips.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::CliError;

/// Shortest round-trip decimal, switching to exponent form for very large or
/// small magnitudes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "none".into())
}

/// Buffered CSV with a mandatory header.
pub struct CsvWriter<W: Write> {
    out: W,
    columns: usize,
    line: String,
}

impl CsvWriter<BufWriter<File>> {
    pub fn create(path: &Path, header: &[String]) -> Result<Self, CliError> {
        let file = File::create(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        CsvWriter::new(BufWriter::new(file), header).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut out: W, header: &[String]) -> std::io::Result<Self> {
        writeln!(out, "{}", header.join(","))?;
        Ok(CsvWriter {
            out,
            columns: header.len(),
            line: String::new(),
        })
    }

    pub fn row(&mut self, values: &[f64]) -> std::io::Result<()> {
        debug_assert_eq!(values.len(), self.columns);
        self.line.clear();
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                self.line.push(',');
            }
            write!(self.line, "{v:?}").expect("writing to a String");
        }
        writeln!(self.out, "{}", self.line)
    }

    /// Row whose cells are already formatted.
    pub fn text_row(&mut self, cells: &[String]) -> std::io::Result<()> {
        debug_assert_eq!(cells.len(), self.columns);
        writeln!(self.out, "{}", cells.join(","))
    }

    pub fn finish(mut self) -> std::io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

/// `key=value` lines.
pub fn key_values(pairs: &[(&str, String)]) -> String {
    pairs.iter().fold(String::new(), |mut s, (k, v)| {
        let _ = writeln!(s, "{k}={v}");
        s
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
