//! Deterministic plain-text and CSV reports.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Formats `x` with 17 significant digits (round-half-even on the exact
/// binary value), positional for moderate exponents and scientific otherwise.
pub fn fmt_real(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0000000000000000" } else { "0.0000000000000000" }.into();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..17).contains(&exp) {
        return sci;
    }
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if exp < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(&digits);
    } else {
        let int_len = exp as usize + 1;
        out.push_str(&digits[..int_len]);
        out.push('.');
        let frac = &digits[int_len..];
        out.push_str(if frac.is_empty() { "0" } else { frac });
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualRow {
    pub name: String,
    pub achieved: f64,
    pub tolerance: f64,
}

impl ResidualRow {
    pub fn passed(&self) -> bool {
        self.achieved <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub command: String,
    pub model_digest: Option<String>,
    pub seed: u64,
    pub results: Vec<(String, f64)>,
    pub residuals: Vec<ResidualRow>,
    /// Free-form lines, e.g. output model blocks.
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: &str, model_digest: Option<String>, seed: u64) -> Self {
        Report {
            command: command.to_string(),
            model_digest,
            seed,
            ..Default::default()
        }
    }

    pub fn result(&mut self, name: impl Into<String>, value: f64) {
        self.results.push((name.into(), value));
    }

    pub fn residual(&mut self, name: impl Into<String>, achieved: f64, tolerance: f64) {
        self.residuals.push(ResidualRow {
            name: name.into(),
            achieved,
            tolerance,
        });
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn passed(&self) -> bool {
        self.residuals.iter().all(ResidualRow::passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# thermoflow report").unwrap();
        writeln!(out, "command = {}", self.command).unwrap();
        writeln!(
            out,
            "model_sha256 = {}",
            self.model_digest.as_deref().unwrap_or("none")
        )
        .unwrap();
        writeln!(out, "seed = {}", self.seed).unwrap();
        if !self.results.is_empty() {
            writeln!(out, "[results]").unwrap();
            for (name, v) in &self.results {
                writeln!(out, "{name} = {}", fmt_real(*v)).unwrap();
            }
        }
        if !self.residuals.is_empty() {
            writeln!(out, "[residuals]").unwrap();
            for r in &self.residuals {
                writeln!(
                    out,
                    "{} {} <= {} {}",
                    if r.passed() { "PASS" } else { "FAIL" },
                    r.name,
                    fmt_real(r.tolerance),
                    fmt_real(r.achieved)
                )
                .unwrap();
            }
        }
        if !self.notes.is_empty() {
            writeln!(out, "[notes]").unwrap();
            for line in &self.notes {
                writeln!(out, "{line}").unwrap();
            }
        }
        writeln!(out, "status = {}", if self.passed() { "ok" } else { "fail" }).unwrap();
        out
    }

    /// One row per named result under the fixed header `name,value`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let io = |e: csv::Error| Error::InvalidArgument(format!("cannot write {}: {e}", path.display()));
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(["name", "value"]).map_err(io)?;
        for (name, v) in &self.results {
            w.write_record([name.as_str(), &fmt_real(*v)]).map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_real(2f64.ln()), "0.69314718055994529");
        assert_eq!(fmt_real(1.0), "1.0000000000000000");
        assert_eq!(fmt_real(-123.5), "-123.50000000000000");
        assert_eq!(fmt_real(1e-3), "0.0010000000000000000");
        assert_eq!(fmt_real(1e-7), "9.9999999999999995e-8");
        assert_eq!(fmt_real(1e20), "1.0000000000000000e20");
        assert_eq!(fmt_real(0.0), "0.0000000000000000");
        assert_eq!(fmt_real(f64::NAN), "NaN");
    }

    #[test]
    fn ties_round_to_even() {
        // exactly representable ties at the 17th digit
        assert_eq!(format!("{:.0e}", 2.5), "2e0");
        assert_eq!(format!("{:.0e}", 3.5), "4e0");
    }

    #[test]
    fn render_is_stable() {
        let mut r = Report::new("entropy", None, 0);
        r.result("h_sigma", 2f64.ln());
        r.residual("perron_residual", 1e-16, 1e-12);
        let text = r.render();
        assert_eq!(text, r.clone().render());
        assert!(text.contains("h_sigma = 0.69314718055994529\n"));
        assert!(text.ends_with("status = ok\n"));
        r.residual("bad", 1.0, 0.5);
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn csv_output() {
        let dir = std::env::temp_dir().join(format!("thermoflow-csv-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.csv");
        let mut r = Report::new("entropy", None, 0);
        r.result("h_sigma", 2f64.ln());
        r.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "name,value\nh_sigma,0.69314718055994529\n");
        std::fs::remove_dir_all(dir).unwrap();
    }
}
