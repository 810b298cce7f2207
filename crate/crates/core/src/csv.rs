//! CSV emission with 17 significant digits.

use std::fmt::Write;

/// Formats `v` with 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// In-memory CSV document with a one-line header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvTable {
    text: String,
    columns: usize,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        CsvTable {
            text,
            columns: header.len(),
        }
    }

    pub fn push(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.columns);
        let mut first = true;
        for &v in values {
            if !first {
                self.text.push(',');
            }
            first = false;
            self.text.push_str(&format_f64(v));
        }
        self.text.push('\n');
    }

    /// Row whose first column is an integer index.
    pub fn push_indexed(&mut self, index: usize, values: &[f64]) {
        debug_assert_eq!(values.len() + 1, self.columns);
        write!(self.text, "{index}").expect("writing to a String");
        for &v in values {
            self.text.push(',');
            self.text.push_str(&format_f64(v));
        }
        self.text.push('\n');
    }

    /// Two-column table from paired slices.
    pub fn from_columns(header: [&str; 2], xs: &[f64], ys: &[f64]) -> Self {
        let mut t = CsvTable::new(&header);
        for (&x, &y) in xs.iter().zip(ys) {
            t.push(&[x, y]);
        }
        t
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn into_string(self) -> String {
        self.text
    }
}
