//! Gauss-Legendre rules on `[0, 1]`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math;

/// Nodes and weights of the `k`-point rule, mapped to `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_k` from the Chebyshev-like initial guesses.
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "quadrature needs at least one node");
        let mut nodes = Vec::with_capacity(k);
        let mut weights = Vec::with_capacity(k);
        let n = k as f64;
        for i in 0..k {
            let mut x = math::cos(PI * (i as f64 + 0.75) / (n + 0.5));
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(k, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if math::abs(dx) < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(k, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // [-1, 1] -> [0, 1]
            nodes.push(0.5 * (1.0 - x));
            weights.push(0.5 * w);
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `(P_k(x), P_k'(x))` by the three-term recurrence.
fn legendre(k: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if k == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=k {
        let j = j as f64;
        let p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    let d = k as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
