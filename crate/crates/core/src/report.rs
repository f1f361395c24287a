//! JSON and CSV output: solver reports and true spectra.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigensolvers::ConvergenceRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    One,
    Two,
    Subspace,
}

/// Full solver output. `records` holds converged trajectories only; anything
/// that stagnated, degenerated or failed goes to `failures`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub algorithm: Algorithm,
    /// `σ` for the Cayley solvers, the shift `a` for subspace iteration.
    pub sigma: Complex64,
    pub records: Vec<ConvergenceRecord>,
    pub failures: Vec<ConvergenceRecord>,
}

impl SpectrumReport {
    pub fn new(algorithm: Algorithm, sigma: Complex64, all: Vec<ConvergenceRecord>) -> Self {
        let (records, failures) = all.into_iter().partition(|r| r.converged());
        Self {
            algorithm,
            sigma,
            records,
            failures,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// One row per converged record.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.records {
            let lam = r.lambda.finite().unwrap_or(Complex64::new(f64::INFINITY, 0.0));
            w.serialize(CsvRow {
                converged_value_re: lam.re,
                converged_value_im: lam.im,
                iter: r.iterations,
                lu: r.lu_count,
                residual_order: r.residual_order,
            })?;
        }
        let bytes = w.into_inner().map_err(|e| Error::io("csv buffer", e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv()?).map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub converged_value_re: f64,
    pub converged_value_im: f64,
    pub iter: usize,
    pub lu: usize,
    pub residual_order: Option<i32>,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Spectrum as a JSON array of `[re, im]` pairs.
pub fn spectrum_to_json(values: &[Complex64]) -> Result<String> {
    let pairs: Vec<[f64; 2]> = values.iter().map(|z| [z.re, z.im]).collect();
    Ok(serde_json::to_string(&pairs)?)
}

pub fn spectrum_from_json(text: &str) -> Result<Vec<Complex64>> {
    let pairs: Vec<[f64; 2]> = serde_json::from_str(text)?;
    Ok(pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect())
}

pub fn write_spectrum(values: &[Complex64], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, spectrum_to_json(values)?).map_err(|e| Error::io(path, e))
}

pub fn read_spectrum(path: impl AsRef<Path>) -> Result<Vec<Complex64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    spectrum_from_json(&text)
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` (spaces ignored, `i` or `j`).
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidParameter(format!("not a complex number: {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    let num = |x: &str| -> Result<f64> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| bad()),
        }
    };
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, num(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, num(body)?)),
    }
}

pub fn format_complex(z: Complex64) -> String {
    if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}
