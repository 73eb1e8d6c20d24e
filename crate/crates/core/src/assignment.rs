//! Route shares: one simplex vector per population.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Tolerance accepted on input before clamping and renormalizing.
pub const SIMPLEX_TOLERANCE: f64 = 1e-12;

/// `theta[p][i]` is the share of population `p` on its route `i`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Assignment {
    shares: Vec<Vec<f64>>,
}

fn normalize(p: usize, v: &[f64]) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(Error::NotInSimplex { population: p, reason: "empty share vector".into() });
    }
    let mut s = 0.0;
    for (i, &x) in v.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::NotInSimplex { population: p, reason: format!("share {i} is {x}") });
        }
        if x < -SIMPLEX_TOLERANCE {
            return Err(Error::NotInSimplex { population: p, reason: format!("share {i} = {x} is negative") });
        }
        s += x;
    }
    if math::abs(s - 1.0) > SIMPLEX_TOLERANCE {
        return Err(Error::NotInSimplex { population: p, reason: format!("shares sum to {s}") });
    }
    let clamped: Vec<f64> = v.iter().map(|&x| if x < 0.0 { 0.0 } else { x }).collect();
    let s: f64 = clamped.iter().sum();
    Ok(clamped.into_iter().map(|x| x / s).collect())
}

impl Assignment {
    /// Validates every component against the simplex, then clamps and
    /// renormalizes once.
    pub fn new(shares: Vec<Vec<f64>>) -> Result<Self> {
        let shares = shares.iter().enumerate().map(|(p, v)| normalize(p, v)).collect::<Result<_>>()?;
        Ok(Assignment { shares })
    }

    /// Builds from vectors known to be nonnegative with positive sum.
    /// Used by iterations that renormalize every step.
    pub(crate) fn from_normalized(shares: Vec<Vec<f64>>) -> Self {
        let shares = shares
            .into_iter()
            .map(|v| {
                let s: f64 = v.iter().sum();
                v.into_iter().map(|x| x / s).collect()
            })
            .collect();
        Assignment { shares }
    }

    /// Barycenter of every simplex.
    pub fn uniform(route_counts: &[usize]) -> Self {
        Assignment {
            shares: route_counts.iter().map(|&n| alloc::vec![1.0 / n as f64; n]).collect(),
        }
    }

    /// Every population on one route: `routes[p]` for population `p`.
    pub fn vertex(route_counts: &[usize], routes: &[usize]) -> Self {
        Assignment {
            shares: route_counts
                .iter()
                .zip(routes)
                .map(|(&n, &k)| (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect())
                .collect(),
        }
    }

    pub fn populations(&self) -> usize {
        self.shares.len()
    }

    pub fn route_counts(&self) -> Vec<usize> {
        self.shares.iter().map(Vec::len).collect()
    }

    pub fn population(&self, p: usize) -> &[f64] {
        &self.shares[p]
    }

    pub fn shares(&self) -> &[Vec<f64>] {
        &self.shares
    }

    pub fn into_shares(self) -> Vec<Vec<f64>> {
        self.shares
    }

    /// Moves `eps` of population `p` from route `from` to route `to`, or
    /// `None` when the result leaves the simplex.
    pub fn shifted(&self, p: usize, from: usize, to: usize, eps: f64) -> Option<Self> {
        let v = &self.shares[p];
        if from == to || v[from] < eps || v[to] + eps > 1.0 + SIMPLEX_TOLERANCE {
            return None;
        }
        let mut out = self.clone();
        out.shares[p][from] -= eps;
        out.shares[p][to] += eps;
        Some(out)
    }

    /// Same assignment with population `p` replaced by `v` (not renormalized).
    pub fn with_population(&self, p: usize, v: Vec<f64>) -> Self {
        let mut out = self.clone();
        out.shares[p] = v;
        out
    }

    /// Largest absolute difference over all shares.
    pub fn distance_inf(&self, other: &Self) -> f64 {
        self.shares
            .iter()
            .zip(&other.shares)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| math::abs(x - y)))
            .fold(0.0, f64::max)
    }

    /// `(1 - w) * self + w * other`.
    pub fn blend(&self, other: &Self, w: f64) -> Self {
        let shares = self
            .shares
            .iter()
            .zip(&other.shares)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (1.0 - w) * x + w * y).collect())
            .collect();
        Assignment::from_normalized(shares)
    }

    /// Checks population count and route counts against `counts`.
    pub fn check_dimensions(&self, counts: &[usize]) -> Result<()> {
        if self.shares.len() != counts.len() {
            return Err(Error::Dimension(format!(
                "assignment has {} populations, network has {}",
                self.shares.len(),
                counts.len()
            )));
        }
        for (p, (v, &n)) in self.shares.iter().zip(counts).enumerate() {
            if v.len() != n {
                return Err(Error::Dimension(format!(
                    "population {p} has {} shares but {n} routes",
                    v.len()
                )));
            }
        }
        Ok(())
    }
}
