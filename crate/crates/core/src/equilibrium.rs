//! Route and mean travel times and the three equilibrium predicates.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::math;
use crate::network::Model;

/// Numerical tolerances shared by the predicates and the solver.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Tolerances {
    /// Shares at or below this count as unused.
    pub share: f64,
    /// Relative tolerance on finite time comparisons.
    pub time_rel: f64,
    /// Absolute floor on time comparisons.
    pub time_abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { share: 1e-9, time_rel: 1e-9, time_abs: 1e-12 }
    }
}

impl Tolerances {
    /// Same share tolerance, time tolerance replaced by `tol` (relative and absolute).
    pub fn with_time(self, tol: f64) -> Self {
        Tolerances { time_rel: tol, time_abs: tol, ..self }
    }

    fn slack(&self, a: f64, b: f64) -> f64 {
        self.time_abs + self.time_rel * math::abs(a).max(math::abs(b))
    }

    /// Finite values within tolerance, or both infinite.
    pub fn times_equal(&self, a: ExtReal, b: ExtReal) -> bool {
        match (a.value(), b.value()) {
            (Some(x), Some(y)) => math::abs(x - y) <= self.slack(x, y),
            (None, None) => true,
            _ => false,
        }
    }

    /// `a >= b` up to tolerance.
    pub fn at_least(&self, a: ExtReal, b: ExtReal) -> bool {
        match (a.value(), b.value()) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(x), Some(y)) => x >= y - self.slack(x, y),
        }
    }
}

/// Route times `times[p][i]` and mean times `mean[p]`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RouteTimes {
    pub times: Vec<Vec<ExtReal>>,
    pub mean: Vec<ExtReal>,
}

/// Cost of every road for every population at `theta`: `tau[h][p]`.
pub(crate) fn road_costs(model: &Model, theta: &Assignment) -> Result<Vec<Vec<ExtReal>>> {
    let flows = model.flows(theta)?;
    Ok(flows
        .iter()
        .enumerate()
        .map(|(h, eta)| (0..model.populations()).map(|p| model.road_cost(h, p, eta)).collect())
        .collect())
}

/// Route times of every population; `+inf` propagates through road sums.
pub fn route_times(model: &Model, theta: &Assignment) -> Result<RouteTimes> {
    let times = raw_route_times(model, theta)?;
    let mean = mean_times(theta, &times);
    Ok(RouteTimes { times, mean })
}

pub(crate) fn raw_route_times(model: &Model, theta: &Assignment) -> Result<Vec<Vec<ExtReal>>> {
    let tau = road_costs(model, theta)?;
    Ok(model
        .route_roads
        .iter()
        .enumerate()
        .map(|(p, routes)| routes.iter().map(|roads| roads.iter().map(|&h| tau[h][p]).sum()).collect())
        .collect())
}

/// `theta_p . T_p` with `0 * inf = 0`.
pub fn mean_times(theta: &Assignment, times: &[Vec<ExtReal>]) -> Vec<ExtReal> {
    times
        .iter()
        .enumerate()
        .map(|(p, t)| t.iter().zip(theta.population(p)).map(|(&ti, &s)| ti.weighted(s)).sum())
        .collect()
}

/// Share-weighted mean over the routes carrying more than `tol.share`.
fn relevant_time(shares: &[f64], times: &[ExtReal], tol: &Tolerances) -> ExtReal {
    let mass: f64 = shares.iter().filter(|&&s| s > tol.share).sum();
    shares
        .iter()
        .zip(times)
        .filter(|(&s, _)| s > tol.share)
        .map(|(&s, &t)| t.weighted(s / mass))
        .sum()
}

/// Outcome of one predicate.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Verdict {
    pub holds: bool,
    /// Worst violation; zero when the predicate holds exactly.
    pub residual: ExtReal,
    /// One line per violated condition.
    pub violations: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict { holds: true, residual: ExtReal::ZERO, violations: Vec::new() }
    }

    fn fail(&mut self, amount: ExtReal, what: String) {
        self.holds = false;
        self.residual = self.residual.max(amount);
        self.violations.push(what);
    }

    fn note(&mut self, amount: ExtReal) {
        self.residual = self.residual.max(amount);
    }
}

fn spread(a: ExtReal, b: ExtReal) -> ExtReal {
    a.excess_over(b).max(b.excess_over(a))
}

fn equilibrium_with(model: &Model, theta: &Assignment, times: &[Vec<ExtReal>], tol: &Tolerances) -> Verdict {
    let mut v = Verdict::new();
    for (p, t) in times.iter().enumerate() {
        let shares = theta.population(p);
        let relevant: Vec<usize> = (0..t.len()).filter(|&i| shares[i] > tol.share).collect();
        let Some(&first) = relevant.first() else { continue };
        for &i in &relevant[1..] {
            let gap = spread(t[i], t[first]);
            if !tol.times_equal(t[i], t[first]) {
                v.fail(
                    gap,
                    format!(
                        "{}: relevant routes {first} and {i} have times {} and {}",
                        model.population_names[p], t[first], t[i]
                    ),
                );
            } else {
                v.note(gap);
            }
        }
    }
    v
}

/// All relevant route times of each population coincide.
pub fn is_equilibrium(model: &Model, theta: &Assignment, tol: &Tolerances) -> Result<Verdict> {
    let times = raw_route_times(model, theta)?;
    Ok(equilibrium_with(model, theta, &times, tol))
}

pub(crate) fn nash_with(model: &Model, theta: &Assignment, times: &[Vec<ExtReal>], tol: &Tolerances) -> Verdict {
    let mut v = equilibrium_with(model, theta, times, tol);
    for (p, t) in times.iter().enumerate() {
        let shares = theta.population(p);
        let reference = relevant_time(shares, t, tol);
        for (i, &ti) in t.iter().enumerate() {
            if shares[i] > tol.share {
                continue;
            }
            let gap = reference.excess_over(ti);
            if !tol.at_least(ti, reference) {
                v.fail(
                    gap,
                    format!(
                        "{}: unused route {i} has time {ti} below the mean {reference}",
                        model.population_names[p]
                    ),
                );
            } else {
                v.note(gap);
            }
        }
    }
    v
}

/// Equilibrium in which no unused route is faster than the mean.
pub fn is_nash(model: &Model, theta: &Assignment, tol: &Tolerances) -> Result<Verdict> {
    let times = raw_route_times(model, theta)?;
    Ok(nash_with(model, theta, &times, tol))
}

fn shift_check(model: &Model, theta: &Assignment, times: &[Vec<ExtReal>], eps: f64, tol: &Tolerances, v: &mut Verdict) -> Result<()> {
    for (p, t) in times.iter().enumerate() {
        for i in 0..t.len() {
            for j in 0..t.len() {
                let Some(moved) = theta.shifted(p, i, j, eps) else { continue };
                let after = raw_route_times(model, &moved)?;
                let tj = after[p][j];
                let gap = t[i].excess_over(tj);
                if !tol.at_least(tj, t[i]) {
                    v.fail(
                        gap,
                        format!(
                            "{}: moving {eps} from route {i} ({}) to route {j} gives it time {tj}",
                            model.population_names[p], t[i]
                        ),
                    );
                } else {
                    v.note(gap);
                }
            }
        }
    }
    Ok(())
}

/// Nash, and moving `eps` of any population from a route `i` to a route `j`
/// never leaves the movers better off. In `strict` mode the shift test is
/// repeated at `eps/2` and `eps/4`.
pub fn is_eps_nash(model: &Model, theta: &Assignment, eps: f64, strict: bool, tol: &Tolerances) -> Result<Verdict> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1], got {eps}")));
    }
    let times = raw_route_times(model, theta)?;
    let mut v = nash_with(model, theta, &times, tol);
    let ladder: &[f64] = if strict { &[1.0, 0.5, 0.25] } else { &[1.0] };
    for &k in ladder {
        shift_check(model, theta, &times, eps * k, tol, &mut v)?;
    }
    Ok(v)
}

/// Half the smallest positive share over all populations.
pub fn default_eps(theta: &Assignment, tol: &Tolerances) -> f64 {
    theta
        .shares()
        .iter()
        .flat_map(|v| v.iter().copied().filter(|&s| s > tol.share))
        .fold(1.0, f64::min)
        / 2.0
}

/// Everything the three predicates say about one assignment.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EquilibriumReport {
    pub is_equilibrium: bool,
    pub is_nash: bool,
    pub is_eps_nash: bool,
    /// Mean time over the relevant routes of each population.
    pub relevant_times: Vec<ExtReal>,
    pub equilibrium_residual: ExtReal,
    pub nash_residual: ExtReal,
    pub eps_nash_residual: ExtReal,
    pub eps: f64,
    pub strict: bool,
    pub violations: Vec<String>,
    pub route_times: RouteTimes,
}

/// Runs every predicate. `eps` defaults to [`default_eps`].
pub fn verify(model: &Model, theta: &Assignment, eps: Option<f64>, strict: bool, tol: &Tolerances) -> Result<EquilibriumReport> {
    theta.check_dimensions(&model.route_counts())?;
    let rt = route_times(model, theta)?;
    let eps = eps.unwrap_or_else(|| default_eps(theta, tol));
    let eq = equilibrium_with(model, theta, &rt.times, tol);
    let nash = nash_with(model, theta, &rt.times, tol);
    let epsn = is_eps_nash(model, theta, eps, strict, tol)?;
    let relevant_times = rt
        .times
        .iter()
        .enumerate()
        .map(|(p, t)| relevant_time(theta.population(p), t, tol))
        .collect();
    Ok(EquilibriumReport {
        is_equilibrium: eq.holds,
        is_nash: nash.holds,
        is_eps_nash: epsn.holds,
        relevant_times,
        equilibrium_residual: eq.residual,
        nash_residual: nash.residual,
        eps_nash_residual: epsn.residual,
        eps,
        strict,
        violations: epsn.violations,
        route_times: rt,
    })
}
