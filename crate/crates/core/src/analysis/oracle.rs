//! Exhaustive grid search for Nash equilibria.
//!
//! Every point of the product of simplex grids with step `1/m` is tested
//! with the Nash predicate at a time tolerance `max(tol, c / m)`, where `c`
//! is a sampled Lipschitz bound of route-time differences. Hits closer than
//! `2/m` are merged into clusters.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::assignment::Assignment;
use crate::equilibrium::{self, Tolerances};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::grid::{self, Compositions};
use crate::math;
use crate::network::Model;
use crate::rng::SeededRng;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OracleParams {
    pub resolution: usize,
    /// Floor of the time tolerance.
    pub tol: f64,
    /// Largest number of grid points evaluated.
    pub budget: u128,
    pub seed: u64,
}

impl Default for OracleParams {
    fn default() -> Self {
        OracleParams { resolution: 100, tol: 1e-9, budget: 5_000_000, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OracleCluster {
    /// Member with the smallest Nash residual.
    pub representative: Assignment,
    pub residual: ExtReal,
    pub size: usize,
    pub relevant_times: Vec<ExtReal>,
    /// Every grid point of the cluster.
    #[cfg_attr(feature = "serde", serde(skip))]
    pub members: Vec<Assignment>,
}

impl OracleCluster {
    /// Distance from `theta` to the closest member.
    pub fn distance(&self, theta: &Assignment) -> f64 {
        self.members.iter().map(|m| m.distance_inf(theta)).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OracleResult {
    pub resolution: usize,
    pub tolerance: f64,
    pub lipschitz: f64,
    pub points: u128,
    pub hits: usize,
    pub clusters: Vec<OracleCluster>,
}

impl OracleResult {
    /// Cluster with a member closest to `theta`, with that distance.
    pub fn nearest(&self, theta: &Assignment) -> Option<(&OracleCluster, f64)> {
        self.clusters
            .iter()
            .map(|c| (c, c.distance(theta)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

const LIPSCHITZ_SAMPLES: usize = 256;

/// Largest observed `|T(x) - T(y)| / |x - y|_inf` over seeded point pairs,
/// far apart and one grid step apart, ignoring infinite times. Doubled,
/// since a time difference moves with both of its terms.
fn lipschitz_estimate(model: &Model, m: usize, seed: u64) -> Result<f64> {
    let counts = model.route_counts();
    let mut rng = SeededRng::new(seed);
    let mut best: f64 = 0.0;
    let draw = |rng: &mut SeededRng| Assignment::from_normalized(counts.iter().map(|&n| rng.simplex(n)).collect());
    for k in 0..LIPSCHITZ_SAMPLES {
        let x = draw(&mut rng);
        let y = if k % 2 == 0 {
            draw(&mut rng)
        } else {
            // one step of 1/m toward a random point
            let z = draw(&mut rng);
            let d = x.distance_inf(&z);
            if d == 0.0 {
                continue;
            }
            x.blend(&z, (1.0 / m as f64 / d).min(1.0))
        };
        let d = x.distance_inf(&y);
        if d <= 0.0 {
            continue;
        }
        let tx = equilibrium::raw_route_times(model, &x)?;
        let ty = equilibrium::raw_route_times(model, &y)?;
        for (a, b) in tx.iter().flatten().zip(ty.iter().flatten()) {
            if let (Some(a), Some(b)) = (a.value(), b.value()) {
                best = best.max(math::abs(a - b) / d);
            }
        }
    }
    Ok(2.0 * best)
}

fn relevant_times(model: &Model, theta: &Assignment, tol: &Tolerances) -> Result<Vec<ExtReal>> {
    let times = equilibrium::raw_route_times(model, theta)?;
    Ok(times
        .iter()
        .enumerate()
        .map(|(p, t)| {
            let s = theta.population(p);
            let mass: f64 = s.iter().filter(|&&x| x > tol.share).sum();
            s.iter().zip(t).filter(|(&x, _)| x > tol.share).map(|(&x, &ti)| ti.weighted(x / mass)).sum()
        })
        .collect())
}

struct Hit {
    coords: Vec<Vec<usize>>,
    residual: ExtReal,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Offsets in `{-2, ..., 2}^k`.
fn offsets(k: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|v| (-2..=2).map(move |d| {
                let mut w = v.clone();
                w.push(d);
                w
            }))
            .collect();
    }
    out
}

fn cluster(hits: &[Hit], m: usize) -> Vec<Vec<usize>> {
    let key = |c: &Vec<Vec<usize>>| -> Vec<usize> { c.iter().flat_map(|v| v[..v.len() - 1].iter().copied()).collect() };
    let index: BTreeMap<Vec<usize>, usize> = hits.iter().enumerate().map(|(i, h)| (key(&h.coords), i)).collect();
    let mut parent: Vec<usize> = (0..hits.len()).collect();
    let free = hits.first().map_or(0, |h| key(&h.coords).len());
    let offs = offsets(free);
    let radius = 2;
    for (i, h) in hits.iter().enumerate() {
        let base = key(&h.coords);
        for off in &offs {
            let mut probe = Vec::with_capacity(free);
            let mut ok = true;
            for (b, d) in base.iter().zip(off) {
                let v = *b as i64 + d;
                if v < 0 || v > m as i64 {
                    ok = false;
                    break;
                }
                probe.push(v as usize);
            }
            if !ok || probe == base {
                continue;
            }
            let Some(&j) = index.get(&probe) else { continue };
            // the dropped last coordinates must be close as well
            let close = h.coords.iter().zip(&hits[j].coords).all(|(a, b)| {
                a.iter().zip(b).all(|(x, y)| x.abs_diff(*y) <= radius)
            });
            if close {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..hits.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Enumerates the product grid and clusters the points passing the Nash test.
pub fn brute_force_equilibria(model: &Model, params: &OracleParams) -> Result<OracleResult> {
    let m = params.resolution;
    if m == 0 {
        return Err(Error::InvalidParameter("grid resolution must be positive".into()));
    }
    let counts = model.route_counts();
    let points = grid::product_grid_size(&counts, m);
    grid::check_budget(points, params.budget)?;

    let lipschitz = lipschitz_estimate(model, m, params.seed)?;
    let tolerance = params.tol.max(lipschitz / m as f64);
    let tol = Tolerances { share: 1e-9, time_rel: 0.0, time_abs: tolerance };

    let per: Vec<Vec<Vec<usize>>> = counts.iter().map(|&n| Compositions::new(n, m).collect()).collect();
    let per_shares: Vec<Vec<Vec<f64>>> =
        per.iter().map(|cs| cs.iter().map(|c| Compositions::to_shares(c, m)).collect()).collect();
    let mut idx = vec![0usize; counts.len()];
    let mut hits = Vec::new();
    'outer: loop {
        let theta = Assignment::from_normalized(idx.iter().enumerate().map(|(p, &k)| per_shares[p][k].clone()).collect());
        let times = equilibrium::raw_route_times(model, &theta)?;
        let v = equilibrium::nash_with(model, &theta, &times, &tol);
        if v.holds {
            hits.push(Hit { coords: idx.iter().enumerate().map(|(p, &k)| per[p][k].clone()).collect(), residual: v.residual });
        }
        // mixed-radix increment, last population fastest
        for p in (0..idx.len()).rev() {
            idx[p] += 1;
            if idx[p] < per[p].len() {
                continue 'outer;
            }
            idx[p] = 0;
        }
        break;
    }

    let mut clusters = Vec::new();
    for members in cluster(&hits, m) {
        let best = members
            .iter()
            .copied()
            .min_by(|&a, &b| hits[a].residual.cmp(&hits[b].residual).then(a.cmp(&b)))
            .expect("nonempty cluster");
        let representative = Assignment::from_normalized(
            hits[best].coords.iter().map(|c| Compositions::to_shares(c, m)).collect(),
        );
        let relevant_times = relevant_times(model, &representative, &tol)?;
        let size = members.len();
        let members = members
            .iter()
            .map(|&i| Assignment::from_normalized(hits[i].coords.iter().map(|c| Compositions::to_shares(c, m)).collect()))
            .collect();
        clusters.push(OracleCluster { representative, residual: hits[best].residual, size, relevant_times, members });
    }
    Ok(OracleResult { resolution: m, tolerance, lipschitz, points, hits: hits.len(), clusters })
}
