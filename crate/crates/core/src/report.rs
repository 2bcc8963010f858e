//! Sampled residual checks and their reports.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::CoordinateDomain;
use crate::expr::EvalError;

/// Maximal number of fresh points tried in place of a singular one.
pub const MAX_RETRIES: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub residual: f64,
    pub point: Vec<f64>,
    pub pass: bool,
    pub millis: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    /// Report wall time; switched off for byte-stable output.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { samples: 200, seed: 42, tol: 1e-9, timing: true }
    }
}

impl RunOptions {
    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CheckError {
    #[error("evaluation failed at {point:?} after {retries} retries: {source}")]
    Singular { point: Vec<f64>, retries: usize, source: EvalError },
    #[error("precondition failed for {check}: {reason}")]
    Precondition { check: String, reason: String },
    #[error("structure error: {0}")]
    Structure(String),
}

impl From<EvalError> for CheckError {
    fn from(e: EvalError) -> Self {
        CheckError::Singular { point: vec![], retries: 0, source: e }
    }
}

/// Failures local to one sample point. Evaluation errors trigger a retry.
#[derive(Debug)]
pub enum PointError {
    Eval(EvalError),
    Fatal(CheckError),
}

impl From<EvalError> for PointError {
    fn from(e: EvalError) -> Self {
        PointError::Eval(e)
    }
}

impl From<CheckError> for PointError {
    fn from(e: CheckError) -> Self {
        PointError::Fatal(e)
    }
}

/// Evaluates `residual` at sampled points and keeps the worst one.
pub fn run_sampled<F>(name: &str, domain: &CoordinateDomain, opts: &RunOptions, mut residual: F) -> Result<CheckReport, CheckError>
where
    F: FnMut(&[f64]) -> Result<f64, PointError>,
{
    let start = Instant::now();
    let mut sampler = domain.sampler(opts.seed);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_point = Vec::new();
    for _ in 0..opts.samples.max(1) {
        let mut tries = 0;
        loop {
            let p = sampler.next_point();
            match residual(&p) {
                Ok(r) => {
                    let r = if r.is_nan() { f64::INFINITY } else { r };
                    if r > worst {
                        worst = r;
                        worst_point = p;
                    }
                    break;
                }
                Err(PointError::Eval(e)) => {
                    tries += 1;
                    if tries > MAX_RETRIES {
                        return Err(CheckError::Singular { point: p, retries: MAX_RETRIES, source: e });
                    }
                }
                Err(PointError::Fatal(e)) => return Err(e),
            }
        }
    }
    Ok(CheckReport {
        check: name.to_string(),
        residual: worst,
        point: worst_point,
        pass: worst < opts.tol,
        millis: if opts.timing { start.elapsed().as_millis() as u64 } else { 0 },
    })
}

/// Combines several reports into one under a new name: worst residual wins,
/// pass requires every part to pass.
pub fn combine(name: &str, parts: &[CheckReport]) -> CheckReport {
    let mut out = CheckReport { check: name.to_string(), residual: 0.0, point: vec![], pass: true, millis: 0 };
    let mut first = true;
    for p in parts {
        if first || p.residual > out.residual {
            out.residual = p.residual;
            out.point = p.point.clone();
            first = false;
        }
        out.pass &= p.pass;
        out.millis += p.millis;
    }
    out
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:<22} {:<4} residual {:.3e} at {:?} ({} ms)",
            self.check,
            if self.pass { "PASS" } else { "FAIL" },
            self.residual,
            self.point,
            self.millis
        )
    }
}
