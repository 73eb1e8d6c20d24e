//! The simplex self-map whose fixed points are the Nash equilibria, and a
//! damped iteration driving it.
//!
//! For population `p` with route times `T_p`,
//!
//! ```text
//! F_p(theta) = N( theta_p - lambda * (phi(T_p) - (theta_p . phi(T_p)) 1) ),
//! phi(x) = x / (1 + x),  phi(inf) = 1,
//! lambda = min_p 1 / (2 n_p),
//! ```
//!
//! where `N` clips negative entries to zero and divides by the sum. Routes
//! faster than the population average gain mass, slower ones lose it.

use alloc::format;
use alloc::vec::Vec;

use crate::assignment::Assignment;
use crate::equilibrium::{self, EquilibriumReport, Tolerances};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::grid;
use crate::network::Model;
use crate::rng::SeededRng;

/// `x / (1 + x)`, and `1` at `+inf`.
pub fn phi(x: ExtReal) -> f64 {
    match x {
        ExtReal::Finite(v) => v / (1.0 + v),
        ExtReal::Infinity => 1.0,
    }
}

/// Step size `(1/2) min_p 1/n_p`.
pub fn lambda(route_counts: &[usize]) -> f64 {
    0.5 / route_counts.iter().copied().max().unwrap_or(1).max(1) as f64
}

fn map_with_times(theta: &Assignment, times: &[Vec<ExtReal>], lam: f64) -> Result<Assignment> {
    let mut out = Vec::with_capacity(times.len());
    for (p, t) in times.iter().enumerate() {
        let shares = theta.population(p);
        let ph: Vec<f64> = t.iter().copied().map(phi).collect();
        let avg: f64 = shares.iter().zip(&ph).map(|(s, f)| s * f).sum();
        let raw: Vec<f64> = shares
            .iter()
            .zip(&ph)
            .map(|(s, f)| {
                let v = s - lam * (f - avg);
                if v > 0.0 {
                    v
                } else {
                    0.0
                }
            })
            .collect();
        let denom: f64 = raw.iter().sum();
        if !(denom > 0.0) {
            return Err(Error::DegenerateNormalization(p));
        }
        out.push(raw);
    }
    Ok(Assignment::from_normalized(out))
}

/// One application of the map.
pub fn fp_map(model: &Model, theta: &Assignment) -> Result<Assignment> {
    theta.check_dimensions(&model.route_counts())?;
    let times = equilibrium::raw_route_times(model, theta)?;
    map_with_times(theta, &times, lambda(&model.route_counts()))
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SolverParams {
    /// Damping `omega` in `(0, 1]`.
    pub omega: f64,
    pub max_iters: usize,
    /// Stop once `|theta - F(theta)|_inf` drops below this.
    pub residual_tol: f64,
    pub tolerances: Tolerances,
    /// Run even when some cost is not monotone.
    pub allow_nonmonotone: bool,
    pub record_trajectory: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            omega: 0.5,
            max_iters: 1_000_000,
            residual_tol: 1e-14,
            tolerances: Tolerances::default(),
            allow_nonmonotone: false,
            record_trajectory: false,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega <= 1.0) {
            return Err(Error::InvalidParameter(format!("omega must lie in (0, 1], got {}", self.omega)));
        }
        if !(self.residual_tol > 0.0) {
            return Err(Error::InvalidParameter(format!("residual tolerance must be positive, got {}", self.residual_tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SolveResult {
    /// Best iterate (smallest residual seen).
    pub assignment: Assignment,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub verified: EquilibriumReport,
    /// Residual per iteration, when requested.
    pub trajectory: Option<Vec<f64>>,
}

impl SolveResult {
    /// Converged and verified as a Nash equilibrium.
    pub fn success(&self) -> bool {
        self.converged && self.verified.is_nash
    }
}

pub(crate) fn check_monotone(model: &Model, params: &SolverParams) -> Result<()> {
    if params.allow_nonmonotone {
        return Ok(());
    }
    match model.first_nonmonotone() {
        Some((h, p)) => Err(Error::NonMonotone {
            road: model.road_ids[h].clone(),
            population: model.population_names[p].clone(),
        }),
        None => Ok(()),
    }
}

/// Iterates `theta <- (1 - omega) theta + omega F(theta)` from `start`.
pub fn solve_fixed_point(model: &Model, start: &Assignment, params: &SolverParams) -> Result<SolveResult> {
    params.validate()?;
    check_monotone(model, params)?;
    start.check_dimensions(&model.route_counts())?;
    let lam = lambda(&model.route_counts());

    let mut theta = start.clone();
    let mut best: Option<(Assignment, f64)> = None;
    let mut trajectory = params.record_trajectory.then(Vec::new);
    let mut iterations = 0;
    let mut converged = false;
    loop {
        let times = equilibrium::raw_route_times(model, &theta)?;
        let image = map_with_times(&theta, &times, lam)?;
        let residual = theta.distance_inf(&image);
        if let Some(t) = trajectory.as_mut() {
            t.push(residual);
        }
        if best.as_ref().map_or(true, |(_, r)| residual < *r) {
            best = Some((theta.clone(), residual));
        }
        if residual < params.residual_tol {
            converged = true;
            break;
        }
        if iterations >= params.max_iters {
            break;
        }
        theta = if params.omega == 1.0 { image } else { theta.blend(&image, params.omega) };
        iterations += 1;
    }
    let (assignment, residual) = best.expect("at least one iterate");
    let verified = equilibrium::verify(model, &assignment, None, false, &params.tolerances)?;
    Ok(SolveResult { assignment, iterations, residual, converged, verified, trajectory })
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MultistartParams {
    /// Simplex grid resolution for the deterministic starts (1 = vertices).
    pub grid_depth: usize,
    pub random_starts: usize,
    pub seed: u64,
}

impl Default for MultistartParams {
    fn default() -> Self {
        MultistartParams { grid_depth: 1, random_starts: 8, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Multistart {
    /// Distinct verified equilibria, sorted.
    pub equilibria: Vec<SolveResult>,
    pub starts: usize,
    /// Starts that did not end in a verified equilibrium.
    pub failed_starts: usize,
}

/// Distance below which two solutions are the same equilibrium.
pub const DEDUP_DISTANCE: f64 = 1e-6;

/// Start points: grid corners, barycenter, then seeded random points.
pub fn multistart_points(route_counts: &[usize], ms: &MultistartParams) -> Vec<Assignment> {
    let mut starts: Vec<Assignment> = grid::product_grid(route_counts, ms.grid_depth.max(1))
        .into_iter()
        .map(Assignment::from_normalized)
        .collect();
    starts.push(Assignment::uniform(route_counts));
    let mut rng = SeededRng::new(ms.seed);
    for _ in 0..ms.random_starts {
        starts.push(Assignment::from_normalized(route_counts.iter().map(|&n| rng.simplex(n)).collect()));
    }
    starts
}

fn lex_cmp(a: &Assignment, b: &Assignment) -> core::cmp::Ordering {
    a.shares()
        .iter()
        .flatten()
        .zip(b.shares().iter().flatten())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(core::cmp::Ordering::Equal)
}

/// Solves from every start and keeps the distinct verified equilibria.
pub fn solve_multistart(model: &Model, params: &SolverParams, ms: &MultistartParams) -> Result<Multistart> {
    params.validate()?;
    check_monotone(model, params)?;
    let starts = multistart_points(&model.route_counts(), ms);
    let mut found = Vec::new();
    let mut failed = 0;
    for s in &starts {
        match solve_fixed_point(model, s, params) {
            Ok(r) if r.success() => found.push(r),
            Ok(_) | Err(Error::DegenerateNormalization(_)) => failed += 1,
            Err(e) => return Err(e),
        }
    }
    found.sort_by(|a, b| lex_cmp(&a.assignment, &b.assignment).then(a.residual.total_cmp(&b.residual)));
    let mut distinct: Vec<SolveResult> = Vec::new();
    for r in found {
        if distinct.iter().all(|d| d.assignment.distance_inf(&r.assignment) >= DEDUP_DISTANCE) {
            distinct.push(r);
        }
    }
    Ok(Multistart { equilibria: distinct, starts: starts.len(), failed_starts: failed })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConditionalMinimum {
    /// Mean time of the population at `theta*`.
    pub value: ExtReal,
    /// Smallest mean time over the grid, others held at `theta*`.
    pub grid_min: ExtReal,
    pub argmin: Vec<f64>,
    pub attained: bool,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConditionalOptimality {
    pub holds: bool,
    pub resolution: usize,
    pub populations: Vec<ConditionalMinimum>,
}

/// For each population, minimizes its mean time over a simplex grid of step
/// `1/m` with every other population held at `theta`, and reports whether
/// `theta` attains the minimum. The tolerance is the time tolerance plus the
/// grid's value spread times `1/m^2`.
pub fn check_conditional_optimality(
    model: &Model,
    theta: &Assignment,
    m: usize,
    budget: u128,
    tol: &Tolerances,
) -> Result<ConditionalOptimality> {
    theta.check_dimensions(&model.route_counts())?;
    if m == 0 {
        return Err(Error::InvalidParameter("grid resolution must be positive".into()));
    }
    let counts = model.route_counts();
    let total: u128 = counts.iter().map(|&n| grid::simplex_grid_size(n, m)).fold(0u128, u128::saturating_add);
    grid::check_budget(total, budget)?;
    let at = equilibrium::route_times(model, theta)?;
    let mut populations = Vec::with_capacity(counts.len());
    for (p, &n) in counts.iter().enumerate() {
        let mut lo: Option<(ExtReal, Vec<f64>)> = None;
        let mut hi = ExtReal::ZERO;
        for c in grid::Compositions::new(n, m) {
            let v = grid::Compositions::to_shares(&c, m);
            let trial = theta.with_population(p, v.clone());
            let mean = equilibrium::route_times(model, &trial)?.mean[p];
            if mean.is_finite() {
                hi = hi.max(mean);
            }
            if lo.as_ref().map_or(true, |(b, _)| mean < *b) {
                lo = Some((mean, v));
            }
        }
        let (grid_min, argmin) = lo.expect("nonempty grid");
        let value = at.mean[p];
        let spread = hi.excess_over(grid_min).value().unwrap_or(0.0);
        let h = 1.0 / m as f64;
        let slack = Tolerances { time_abs: tol.time_abs + spread * h * h, ..*tol };
        let attained = slack.at_least(grid_min, value);
        populations.push(ConditionalMinimum { value, grid_min, argmin, attained });
    }
    Ok(ConditionalOptimality { holds: populations.iter().all(|c| c.attained), resolution: m, populations })
}
