//! Coordinate boxes and deterministic point sampling.

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("coordinate {index}: lower bound {lo} is not below upper bound {hi}")]
    EmptyInterval { index: usize, lo: f64, hi: f64 },
    #[error("box has {got} intervals but dimension is {dim}")]
    Shape { dim: usize, got: usize },
    #[error("dimension must be positive")]
    ZeroDim,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordinateDomain {
    pub dim: usize,
    #[serde(rename = "box")]
    pub box_: Vec<[f64; 2]>,
    pub periodic: Vec<bool>,
}

impl CoordinateDomain {
    pub fn new(box_: Vec<[f64; 2]>, periodic: Vec<bool>) -> Result<Self, DomainError> {
        let dim = box_.len();
        if dim == 0 {
            return Err(DomainError::ZeroDim);
        }
        if periodic.len() != dim {
            return Err(DomainError::Shape { dim, got: periodic.len() });
        }
        for (index, [lo, hi]) in box_.iter().copied().enumerate() {
            if !(lo < hi) {
                return Err(DomainError::EmptyInterval { index, lo, hi });
            }
        }
        Ok(CoordinateDomain { dim, box_, periodic })
    }

    /// Same interval `[lo, hi]` on every coordinate, none periodic.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Self::new(vec![[lo, hi]; dim], vec![false; dim]).expect("valid cube")
    }

    /// Appends product-factor coordinates on `[-1, 1]`.
    pub fn with_factors(&self, h: usize) -> Self {
        let mut b = self.box_.clone();
        let mut p = self.periodic.clone();
        for _ in 0..h {
            b.push([-1.0, 1.0]);
            p.push(false);
        }
        CoordinateDomain { dim: self.dim + h, box_: b, periodic: p }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim && p.iter().zip(&self.box_).all(|(x, [lo, hi])| *lo <= *x && *x <= *hi)
    }

    pub fn sampler(&self, seed: u64) -> Sampler<'_> {
        Sampler { domain: self, rng: SplitMix64::seed_from_u64(seed) }
    }
}

/// Uniform sampler over the box. Periodic coordinates cover one full period.
pub struct Sampler<'a> {
    domain: &'a CoordinateDomain,
    rng: SplitMix64,
}

impl Sampler<'_> {
    pub fn next_point(&mut self) -> Vec<f64> {
        self.domain
            .box_
            .iter()
            .zip(&self.domain.periodic)
            .map(|([lo, hi], periodic)| {
                if *periodic {
                    self.rng.gen_range(*lo..*hi)
                } else {
                    self.rng.gen_range(*lo..=*hi)
                }
            })
            .collect()
    }

    pub fn rng(&mut self) -> &mut SplitMix64 {
        &mut self.rng
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_interval() {
        assert!(CoordinateDomain::new(vec![[1.0, 1.0]], vec![false]).is_err());
        assert!(CoordinateDomain::new(vec![[0.0, 1.0]], vec![]).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_inside() {
        let d = CoordinateDomain::new(vec![[0.0, 1.0], [-2.0, 3.0]], vec![true, false]).unwrap();
        let a: Vec<_> = {
            let mut s = d.sampler(42);
            (0..20).map(|_| s.next_point()).collect()
        };
        let b: Vec<_> = {
            let mut s = d.sampler(42);
            (0..20).map(|_| s.next_point()).collect()
        };
        assert_eq!(a, b);
        assert!(a.iter().all(|p| d.contains(p)));
    }
}
