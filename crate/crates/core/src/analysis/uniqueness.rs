//! Sampled uniqueness diagnostics for two populations.
//!
//! The sufficient condition checked here asks that, for every pair of
//! assignments, all roads but at most one have a strictly positive definite
//! 2x2 form, and the remaining road is one of the semidefinite cases. Each
//! road's form only involves the populations whose routes use it: a road
//! used by a single population is strict when that population's own
//! derivative is positive, and a road nobody uses is ignored.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::segment::{check_defpos, classify_road, segment_matrices, RoadCase, DEFAULT_NODES};
use crate::assignment::Assignment;
use crate::equilibrium::{self, Tolerances};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::network::{condition_gamma_of, Model};
use crate::rng::SeededRng;
use crate::grid;

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HypothesisSampler {
    pub pairs: usize,
    pub seed: u64,
    /// Also test every pair of simplex vertices and vertex/barycenter pairs.
    pub include_corners: bool,
    pub nodes: usize,
}

impl Default for HypothesisSampler {
    fn default() -> Self {
        HypothesisSampler { pairs: 100, seed: 0, include_corners: true, nodes: DEFAULT_NODES }
    }
}

/// Case of one road at the worst sampled pair.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RoadDiagnosis {
    pub road: String,
    /// Populations whose routes use the road.
    pub users: Vec<String>,
    pub case: RoadCase,
    /// Counts against the single allowed exception.
    pub exceptional: bool,
    pub q_hat: f64,
    pub p_hat: f64,
    pub p_check: f64,
    pub q_check: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct UniquenessReport {
    /// Every sampled pair gave a semidefinite form on every road.
    pub defpos_ok: bool,
    pub hypothesis_holds: bool,
    /// Largest number of exceptional roads over the sampled pairs.
    pub exceptional_roads: usize,
    pub roads: Vec<RoadDiagnosis>,
    pub pairs_checked: usize,
    /// Pairs skipped because some cost is infinite along the segment.
    pub pairs_skipped: usize,
    /// `(theta''_p - theta'_p) . (T_p(theta'') - T_p(theta'))` for every
    /// pair of the supplied equilibria.
    pub pair_residuals: Vec<Vec<f64>>,
    pub verdict: String,
}

pub const VERDICT_HOLDS: &str = "hypothesis satisfied at all sampled pairs";
pub const VERDICT_FAILS: &str = "hypothesis fails (sampled)";

fn diagnose(model: &Model, blocks: &[Vec<Vec<f64>>], h: usize) -> RoadDiagnosis {
    let (qh, ph, pc, qc) = (blocks[0][0][h], blocks[0][1][h], blocks[1][0][h], blocks[1][1][h]);
    let case = classify_road(qh, ph, pc, qc);
    let users: Vec<usize> = (0..2).filter(|&p| model.uses(h, p)).collect();
    let exceptional = match users.as_slice() {
        [] => false,
        [p] => classify_road(blocks[*p][*p][h], 0.0, 0.0, 0.0) != RoadCase::H2,
        _ => case != RoadCase::H0,
    };
    RoadDiagnosis {
        road: model.road_ids[h].clone(),
        users: users.iter().map(|&p| model.population_names[p].clone()).collect(),
        case,
        exceptional,
        q_hat: qh,
        p_hat: ph,
        p_check: pc,
        q_check: qc,
    }
}

fn sample_pairs(counts: &[usize], sampler: &HypothesisSampler) -> Vec<(Assignment, Assignment)> {
    let mut pairs = Vec::new();
    if sampler.include_corners {
        let mut corners: Vec<Assignment> =
            grid::product_grid(counts, 1).into_iter().map(Assignment::from_normalized).collect();
        corners.push(Assignment::uniform(counts));
        for i in 0..corners.len() {
            for j in i + 1..corners.len() {
                pairs.push((corners[i].clone(), corners[j].clone()));
            }
        }
    }
    let mut rng = SeededRng::new(sampler.seed);
    for _ in 0..sampler.pairs {
        let a = Assignment::from_normalized(counts.iter().map(|&n| rng.simplex(n)).collect());
        let b = Assignment::from_normalized(counts.iter().map(|&n| rng.simplex(n)).collect());
        pairs.push((a, b));
    }
    pairs
}

/// Samples the uniqueness hypothesis. Condition (Gamma) must hold for both
/// populations. `equilibria` (typically multistart output) feed the
/// pairwise residuals of [`check_unique0`].
pub fn check_hypothesis_h(
    model: &Model,
    sampler: &HypothesisSampler,
    equilibria: &[Assignment],
    tol: &Tolerances,
) -> Result<UniquenessReport> {
    if model.populations() != 2 {
        return Err(Error::UnsupportedPopulations(model.populations()));
    }
    for (p, g) in model.incidence.iter().enumerate() {
        let c = condition_gamma_of(g, &model.road_ids);
        if let Some(route) = c.first_failure() {
            return Err(Error::ConditionGamma { population: model.population_names[p].clone(), route });
        }
    }
    let mut defpos_ok = true;
    let mut worst: Option<((bool, usize), Vec<RoadDiagnosis>)> = None;
    let mut checked = 0;
    let mut skipped = 0;
    for (a, b) in sample_pairs(&model.route_counts(), sampler) {
        let sm = match segment_matrices(model, &a, &b, sampler.nodes) {
            Ok(sm) => sm,
            Err(Error::InfiniteSegment { .. }) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        checked += 1;
        defpos_ok &= check_defpos(&sm)?.ok;
        let roads: Vec<RoadDiagnosis> = (0..model.roads()).map(|h| diagnose(model, &sm.blocks, h)).collect();
        // a non-semidefinite shared road is worse than any number of exceptions
        let violated = roads.iter().any(|r| r.exceptional && r.case == RoadCase::Violation);
        let badness = (violated, roads.iter().filter(|r| r.exceptional).count());
        if worst.as_ref().map_or(true, |(w, _)| badness > *w) {
            worst = Some((badness, roads));
        }
    }
    let ((violated, exceptional_roads), roads) = worst.unwrap_or(((false, 0), Vec::new()));
    let hypothesis_holds = checked > 0 && !violated && exceptional_roads <= 1;

    let mut pair_residuals = Vec::new();
    for i in 0..equilibria.len() {
        for j in i + 1..equilibria.len() {
            pair_residuals.push(check_unique0(model, &equilibria[i], &equilibria[j], tol)?);
        }
    }
    let verdict = if hypothesis_holds {
        format!("{VERDICT_HOLDS}; at most one Nash equilibrium (sampled)")
    } else if checked == 0 {
        format!("{VERDICT_FAILS}: no pair had finite costs along its segment")
    } else {
        String::from(VERDICT_FAILS)
    };
    Ok(UniquenessReport {
        defpos_ok,
        hypothesis_holds,
        exceptional_roads,
        roads,
        pairs_checked: checked,
        pairs_skipped: skipped,
        pair_residuals,
        verdict,
    })
}

/// `(theta''_p - theta'_p) . (T_p(theta'') - T_p(theta'))` per population;
/// both inputs must be Nash equilibria. Terms whose share does not change
/// are skipped, so unused infinite routes contribute nothing.
pub fn check_unique0(model: &Model, a: &Assignment, b: &Assignment, tol: &Tolerances) -> Result<Vec<f64>> {
    for (label, x) in [("first", a), ("second", b)] {
        let v = equilibrium::is_nash(model, x, tol)?;
        if !v.holds {
            return Err(Error::NotNash(format!("{label} assignment: {}", v.violations.join("; "))));
        }
    }
    let ta = equilibrium::route_times(model, a)?;
    let tb = equilibrium::route_times(model, b)?;
    Ok((0..model.populations())
        .map(|p| {
            let mut acc = 0.0;
            for (i, (&x, &y)) in a.population(p).iter().zip(b.population(p)).enumerate() {
                let d = y - x;
                if d == 0.0 {
                    continue;
                }
                acc += match (ta.times[p][i], tb.times[p][i]) {
                    (ExtReal::Finite(s), ExtReal::Finite(t)) => d * (t - s),
                    _ => f64::INFINITY,
                };
            }
            if acc.is_nan() {
                f64::INFINITY
            } else {
                acc
            }
        })
        .collect())
}
