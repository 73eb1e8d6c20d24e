//! Equilibrium travel times before and after a network change.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::network::Model;
use crate::solver::{self, MultistartParams, SolveResult, SolverParams};

/// Increase above which a population counts as worse off.
pub const PARADOX_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BraessRow {
    pub population: String,
    pub before: ExtReal,
    pub after: ExtReal,
    /// `after - before`; infinite when only `after` is.
    #[cfg_attr(feature = "serde", serde(serialize_with = "signed_ext"))]
    pub delta: f64,
    pub paradox: bool,
}

#[cfg(feature = "serde")]
fn signed_ext<S: serde::Serializer>(v: &f64, s: S) -> core::result::Result<S::Ok, S::Error> {
    if *v == f64::INFINITY {
        s.serialize_str("inf")
    } else if *v == f64::NEG_INFINITY {
        s.serialize_str("-inf")
    } else {
        s.serialize_f64(*v)
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BraessReport {
    pub base: Assignment,
    pub variant: Assignment,
    pub rows: Vec<BraessRow>,
    pub tolerance: f64,
}

impl BraessReport {
    pub fn any_paradox(&self) -> bool {
        self.rows.iter().any(|r| r.paradox)
    }
}

/// Solves from the barycenter, falling back to the first multistart
/// equilibrium when that start does not verify.
fn solve(model: &Model, params: &SolverParams, label: &str) -> Result<SolveResult> {
    let r = solver::solve_fixed_point(model, &Assignment::uniform(&model.route_counts()), params)?;
    if r.success() {
        return Ok(r);
    }
    let ms = solver::solve_multistart(model, params, &MultistartParams::default())?;
    ms.equilibria.into_iter().next().ok_or_else(|| Error::Unsolved(label.into()))
}

fn delta(before: ExtReal, after: ExtReal) -> f64 {
    match (before, after) {
        (ExtReal::Finite(a), ExtReal::Finite(b)) => b - a,
        (ExtReal::Finite(_), ExtReal::Infinity) => f64::INFINITY,
        (ExtReal::Infinity, ExtReal::Finite(_)) => f64::NEG_INFINITY,
        (ExtReal::Infinity, ExtReal::Infinity) => 0.0,
    }
}

/// Equilibrium relevant times of each population on `base` and `variant`,
/// matched by population name.
pub fn compare_scenarios(base: &Model, variant: &Model, params: &SolverParams) -> Result<BraessReport> {
    for name in &base.population_names {
        if !variant.population_names.contains(name) {
            return Err(Error::Dimension(format!("population {name} is missing from the variant network")));
        }
    }
    let before = solve(base, params, "base")?;
    let after = solve(variant, params, "variant")?;
    let rows = base
        .population_names
        .iter()
        .enumerate()
        .map(|(p, name)| {
            let q = variant.population_names.iter().position(|n| n == name).expect("checked above");
            let b = before.verified.relevant_times[p];
            let a = after.verified.relevant_times[q];
            let d = delta(b, a);
            BraessRow { population: name.clone(), before: b, after: a, delta: d, paradox: d > PARADOX_TOLERANCE }
        })
        .collect();
    Ok(BraessReport { base: before.assignment, variant: after.assignment, rows, tolerance: PARADOX_TOLERANCE })
}
