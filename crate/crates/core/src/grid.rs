//! Uniform grids on simplices and their products.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Number of points of the `(n-1)`-simplex grid with step `1/m`:
/// `C(m + n - 1, n - 1)`, saturating.
pub fn simplex_grid_size(n: usize, m: usize) -> u128 {
    if n == 0 {
        return 0;
    }
    let k = (n - 1) as u128;
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc * (m + i) / i stays exact because acc is C(m + i - 1, i - 1)
        acc = match acc.checked_mul(m as u128 + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    acc
}

/// Size of the product of per-population simplex grids, saturating.
pub fn product_grid_size(route_counts: &[usize], m: usize) -> u128 {
    route_counts.iter().fold(1u128, |acc, &n| acc.saturating_mul(simplex_grid_size(n, m)))
}

pub fn check_budget(points: u128, budget: u128) -> Result<()> {
    if points > budget {
        Err(Error::BudgetExceeded { points, budget })
    } else {
        Ok(())
    }
}

/// Compositions of `m` into `n` nonnegative parts, in lexicographic order
/// with the first part largest first.
#[derive(Clone, Debug)]
pub struct Compositions {
    m: usize,
    current: Option<Vec<usize>>,
}

impl Compositions {
    pub fn new(n: usize, m: usize) -> Self {
        let current = if n == 0 {
            None
        } else {
            let mut v = vec![0; n];
            v[0] = m;
            Some(v)
        };
        Compositions { m, current }
    }

    /// Steps `c` to the next composition; false when exhausted.
    fn advance(c: &mut [usize]) -> bool {
        let n = c.len();
        if n < 2 {
            return false;
        }
        // rightmost position, excluding the last, holding a positive part
        let Some(i) = (0..n - 1).rev().find(|&i| c[i] > 0) else {
            return false;
        };
        let tail = c[n - 1];
        c[n - 1] = 0;
        c[i] -= 1;
        c[i + 1] = tail + 1;
        true
    }

    pub fn to_shares(c: &[usize], m: usize) -> Vec<f64> {
        c.iter().map(|&k| k as f64 / m as f64).collect()
    }

    pub fn resolution(&self) -> usize {
        self.m
    }
}

impl Iterator for Compositions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.as_mut()?;
        let out = cur.clone();
        if !Self::advance(cur) {
            self.current = None;
        }
        Some(out)
    }
}

/// Every point of `simplex_grid(n_0, m) x ... x simplex_grid(n_{P-1}, m)`,
/// as share vectors.
pub fn product_grid(route_counts: &[usize], m: usize) -> Vec<Vec<Vec<f64>>> {
    let per: Vec<Vec<Vec<f64>>> = route_counts
        .iter()
        .map(|&n| Compositions::new(n, m).map(|c| Compositions::to_shares(&c, m)).collect())
        .collect();
    let mut out: Vec<Vec<Vec<f64>>> = vec![Vec::new()];
    for choices in &per {
        let mut next = Vec::with_capacity(out.len() * choices.len());
        for prefix in &out {
            for c in choices {
                let mut v = prefix.clone();
                v.push(c.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}
