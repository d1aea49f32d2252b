//! Plain CSV: comma separated, LF endings, reals with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::config::{usage, CliError};

/// `x` in scientific notation with 16 digits after the point.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Default)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut csv = Self::default();
        csv.text.push_str(&header.join(","));
        csv.text.push('\n');
        csv
    }

    pub fn row(&mut self, fields: &[String]) {
        let _ = write!(self.text, "{}", fields.join(","));
        self.text.push('\n');
    }

    #[cfg(test)]
    pub fn as_str(&self) -> &str {
        &self.text
    }

    /// Writes to `out`, or to standard output when no path is given.
    pub fn emit(&self, out: Option<&Path>) -> Result<(), CliError> {
        match out {
            Some(path) => fs::write(path, &self.text).map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
            None => {
                let mut stdout = io::stdout().lock();
                stdout
                    .write_all(self.text.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(|e| usage(format!("cannot write to standard output: {e}")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_keep_full_precision() {
        for x in [0.1, 1.0 / 3.0, 2f64.powf(0.6), -1e-300, 0.0] {
            let s = real(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            assert!(s.contains('e'));
        }
    }

    #[test]
    fn rows_end_with_lf() {
        let mut csv = Csv::new(&["a", "b"]);
        csv.row(&["1".into(), real(0.5)]);
        assert_eq!(csv.as_str(), "a,b\n1,5.0000000000000000e-1\n");
    }
}
