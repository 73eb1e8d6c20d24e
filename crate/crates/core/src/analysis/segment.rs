//! Averaged partial derivatives of road costs between two assignments, and
//! the per-road semidefiniteness test of the two-population form.
//!
//! The path from `theta'` to `theta''` changes one population at a time, the
//! last population first. While population `q` moves, populations before it
//! sit at `theta'` and populations after it at `theta''`. Along that leg
//!
//! ```text
//! D[p][q]_hh = int_0^1 d tau_{h,p} / d eta_q ds,
//! ```
//!
//! and the legs telescope to the exact identity
//! `T_p(theta'') - T_p(theta') = sum_q Gamma_p^T D[p][q] Gamma_q (theta''_q - theta'_q)`.
//! For two populations `D[0][0]`, `D[0][1]`, `D[1][0]`, `D[1][1]` are the
//! matrices `Q_hat`, `P_hat`, `P_check`, `Q_check`.

use alloc::vec;
use alloc::vec::Vec;

use super::quadrature::GaussLegendre;
use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::math;
use crate::network::Model;

pub const DEFAULT_NODES: usize = 16;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SegmentMatrices {
    /// `blocks[p][q][h]`: diagonal of `D[p][q]`.
    pub blocks: Vec<Vec<Vec<f64>>>,
    pub from: Assignment,
    pub to: Assignment,
    pub nodes: usize,
}

impl SegmentMatrices {
    pub fn populations(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, p: usize, q: usize) -> &[f64] {
        &self.blocks[p][q]
    }

    /// `Gamma_p^T D[p][q] Gamma_q (theta''_q - theta'_q)`: the change of
    /// population `p`'s route times due to population `q`'s leg.
    pub fn route_increment(&self, model: &Model, p: usize, q: usize) -> Vec<f64> {
        let gp = &model.incidence[p];
        let gq = &model.incidence[q];
        let dq: Vec<f64> =
            self.to.population(q).iter().zip(self.from.population(q)).map(|(b, a)| b - a).collect();
        let d = &self.blocks[p][q];
        (0..gp.cols())
            .map(|i| (0..gp.rows()).filter(|&h| gp.get(h, i) == 1).map(|h| d[h] * gq.row_dot(h, &dq)).sum())
            .collect()
    }
}

/// Road flows at the point of leg `q` with parameter `s`.
fn leg_point(model: &Model, from: &Assignment, to: &Assignment, q: usize, s: f64) -> Vec<Vec<f64>> {
    let shares = (0..model.populations())
        .map(|r| {
            if r < q {
                from.population(r).to_vec()
            } else if r > q {
                to.population(r).to_vec()
            } else {
                from.population(r).iter().zip(to.population(r)).map(|(a, b)| s * b + (1.0 - s) * a).collect()
            }
        })
        .collect();
    let theta = Assignment::from_normalized(shares);
    model.flows(&theta).expect("dimensions checked")
}

/// Segment matrices along the population-by-population path, with a
/// `nodes`-point Gauss-Legendre rule on every leg.
pub fn segment_matrices(model: &Model, from: &Assignment, to: &Assignment, nodes: usize) -> Result<SegmentMatrices> {
    let counts = model.route_counts();
    from.check_dimensions(&counts)?;
    to.check_dimensions(&counts)?;
    if nodes == 0 {
        return Err(Error::InvalidParameter("quadrature needs at least one node".into()));
    }
    let np = model.populations();
    let nr = model.roads();
    let rule = GaussLegendre::new(nodes);
    let mut blocks = vec![vec![vec![0.0; nr]; np]; np];
    for q in 0..np {
        for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
            let flows = leg_point(model, from, to, q, s);
            for (h, eta) in flows.iter().enumerate() {
                for (p, block) in blocks.iter_mut().enumerate() {
                    let d = model.road_partial(h, p, q, eta).map_err(|_| Error::InfiniteSegment {
                        road: model.road_ids[h].clone(),
                        population: model.population_names[p].clone(),
                    })?;
                    block[q][h] += w * d;
                }
            }
        }
    }
    Ok(SegmentMatrices { blocks, from: from.clone(), to: to.clone(), nodes })
}

/// Case of one road's 2x2 form `Q_hat x^2 + (P_hat + P_check) x y + Q_check y^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum RoadCase {
    /// Both diagonal terms positive, discriminant strictly negative.
    H0,
    /// Everything zero.
    H1,
    /// Only `Q_hat` positive.
    H2,
    /// Only `Q_check` positive.
    H3,
    /// Both diagonal terms positive, discriminant zero.
    H4,
    Violation,
}

impl RoadCase {
    pub fn label(self) -> &'static str {
        match self {
            RoadCase::H0 => "H0",
            RoadCase::H1 => "H1",
            RoadCase::H2 => "H2",
            RoadCase::H3 => "H3",
            RoadCase::H4 => "H4",
            RoadCase::Violation => "violation",
        }
    }

    pub fn admissible(self) -> bool {
        self != RoadCase::Violation
    }
}

impl core::fmt::Display for RoadCase {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.label())
    }
}

/// Values at or below this are zero in [`classify_road`].
pub const ZERO_TOLERANCE: f64 = 1e-14;
/// Relative width of the discriminant's boundary band.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Classifies one road from its four nonnegative diagonal entries.
pub fn classify_road(q_hat: f64, p_hat: f64, p_check: f64, q_check: f64) -> RoadCase {
    let zero = |x: f64| x <= ZERO_TOLERANCE;
    let (qh, qc, cross) = (zero(q_hat), zero(q_check), zero(p_hat) && zero(p_check));
    match (qh, qc) {
        (true, true) if cross => RoadCase::H1,
        (false, true) if cross => RoadCase::H2,
        (true, false) if cross => RoadCase::H3,
        (false, false) => {
            let lhs = 4.0 * q_hat * q_check;
            let s = p_hat + p_check;
            let rhs = s * s;
            let band = BOUNDARY_TOLERANCE * lhs.max(rhs);
            if lhs > rhs + band {
                RoadCase::H0
            } else if math::abs(lhs - rhs) <= band {
                RoadCase::H4
            } else {
                RoadCase::Violation
            }
        }
        _ => RoadCase::Violation,
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DefposReport {
    pub ok: bool,
    pub cases: Vec<RoadCase>,
}

/// Per-road semidefiniteness of the block form built from the four
/// matrices. A single population has only `Q`; its roads are `H1` or `H2`.
pub fn check_defpos(sm: &SegmentMatrices) -> Result<DefposReport> {
    let cases: Vec<RoadCase> = match sm.populations() {
        1 => sm.blocks[0][0].iter().map(|&q| classify_road(q, 0.0, 0.0, 0.0)).collect(),
        2 => (0..sm.blocks[0][0].len())
            .map(|h| classify_road(sm.blocks[0][0][h], sm.blocks[0][1][h], sm.blocks[1][0][h], sm.blocks[1][1][h]))
            .collect(),
        n => return Err(Error::UnsupportedPopulations(n)),
    };
    Ok(DefposReport { ok: cases.iter().all(|c| c.admissible()), cases })
}
