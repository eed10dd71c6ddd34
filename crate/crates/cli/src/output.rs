//! Deterministic CSV artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliResult;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Formats `v` with `precision` significant digits in scientific notation.
pub fn format_number(v: f64, precision: usize) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        // Normalize −0 so that sign-of-zero noise never changes the bytes.
        let v = if v == 0.0 { 0.0 } else { v };
        format!("{:.*e}", precision.saturating_sub(1), v)
    }
}

pub enum Cell {
    Int(usize),
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// A CSV document with a `#`-prefixed header block.
pub struct Csv {
    text: String,
    precision: usize,
}

impl Csv {
    pub fn new(command: &str, config_hash: &str, precision: usize) -> Self {
        let mut text = String::new();
        writeln!(text, "# micromaser {VERSION}").unwrap();
        writeln!(text, "# command: {command}").unwrap();
        writeln!(text, "# config-hash: {config_hash}").unwrap();
        Self { text, precision }
    }

    pub fn comment(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        writeln!(self.text, "# {key}: {value}").unwrap();
        self
    }

    pub fn number(&self, v: f64) -> String {
        format_number(v, self.precision)
    }

    pub fn columns<S: AsRef<str>>(&mut self, names: &[S]) -> &mut Self {
        let line: Vec<&str> = names.iter().map(|s| s.as_ref()).collect();
        writeln!(self.text, "{}", line.join(",")).unwrap();
        self
    }

    pub fn row(&mut self, cells: Vec<Cell>) -> &mut Self {
        let line: Vec<String> = cells
            .into_iter()
            .map(|c| match c {
                Cell::Int(v) => v.to_string(),
                Cell::Num(v) => format_number(v, self.precision),
                Cell::Text(s) => s,
            })
            .collect();
        writeln!(self.text, "{}", line.join(",")).unwrap();
        self
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, dir: &Path, name: &str) -> CliResult<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(name);
        fs::write(&path, &self.text)?;
        Ok(path)
    }
}

/// File-name fragment for a flux value (`0.27` → `0.27`).
pub fn tag(v: f64) -> String {
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0486, 12), "4.86000000000e-2");
        assert_eq!(format_number(-0.0, 3), "0.00e0");
        assert_eq!(format_number(f64::NAN, 12), "nan");
        assert_eq!(format_number(1234.5, 3), "1.23e3");
    }

    #[test]
    fn document_layout() {
        let mut csv = Csv::new("fig4", "abc", 4);
        csv.comment("n_th", 0.1)
            .columns(&["n", "p"])
            .row(vec![3usize.into(), 0.25.into()]);
        assert_eq!(
            csv.as_str(),
            format!("# micromaser {VERSION}\n# command: fig4\n# config-hash: abc\n# n_th: 0.1\nn,p\n3,2.500e-1\n")
        );
    }
}
