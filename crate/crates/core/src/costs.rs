//! Road cost expressions over per-population flows.
//!
//! A road's cost for one population is a function of the flows every
//! population puts on that road, `eta = (eta_0, ..., eta_{P-1}) in [0,1]^P`.
//! Coefficient vectors are indexed by population; entries past the end of a
//! vector are zero, so an expression written for the populations that matter
//! stays valid on a network with more of them.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::math;

/// Tolerance on flows outside `[0, 1]` before they are rejected.
pub const FLOW_TOLERANCE: f64 = 1e-12;

/// `coeff * prod_p eta_p^exponents[p]`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Monomial {
    pub coeff: f64,
    pub exponents: Vec<u32>,
}

impl Monomial {
    pub fn new(coeff: f64, exponents: Vec<u32>) -> Self {
        Monomial { coeff, exponents }
    }

    fn eval(&self, flows: &[f64]) -> f64 {
        let mut v = self.coeff;
        for (p, &k) in self.exponents.iter().enumerate() {
            v *= math::powu(flow(flows, p), k);
        }
        v
    }

    fn partial(&self, flows: &[f64], p: usize) -> f64 {
        let kp = self.exponents.get(p).copied().unwrap_or(0);
        if kp == 0 {
            return 0.0;
        }
        let mut v = self.coeff * f64::from(kp);
        for (q, &k) in self.exponents.iter().enumerate() {
            let e = if q == p { k - 1 } else { k };
            v *= math::powu(flow(flows, q), e);
        }
        v
    }

    /// Number of populations with a nonzero exponent.
    fn variables(&self) -> usize {
        self.exponents.iter().filter(|&&k| k > 0).count()
    }
}

/// A cost function `[0,1]^P -> [0, +inf]`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum CostExpr {
    /// `c`.
    Constant(f64),
    /// `constant + sum_p coeffs[p] * eta_p`, all coefficients nonnegative.
    Affine { constant: f64, coeffs: Vec<f64> },
    /// Sum of monomials with nonnegative coefficients.
    Poly(Vec<Monomial>),
    /// `s / (capacity - s)` with `s = sum_p weights[p] * eta_p`; `+inf` once `s >= capacity`.
    Congestion { weights: Vec<f64>, capacity: f64 },
    Sum(Vec<CostExpr>),
    /// `factor * expr`, `factor >= 0`.
    Scale(f64, Box<CostExpr>),
    /// Affine form with signed coefficients. Not monotone in general; it
    /// exists to encode examples where class C fails on purpose.
    NonMonotoneAffine { constant: f64, coeffs: Vec<f64> },
}

#[inline]
fn flow(flows: &[f64], p: usize) -> f64 {
    flows.get(p).copied().unwrap_or(0.0)
}

#[inline]
fn coeff(v: &[f64], p: usize) -> f64 {
    v.get(p).copied().unwrap_or(0.0)
}

fn dot(coeffs: &[f64], flows: &[f64]) -> f64 {
    coeffs.iter().enumerate().map(|(p, c)| c * flow(flows, p)).sum()
}

fn check_coeff(what: &str, c: f64, signed: bool) -> Result<()> {
    if !c.is_finite() {
        return Err(Error::InvalidCost(format!("{what} must be finite, got {c}")));
    }
    if !signed && c < 0.0 {
        return Err(Error::InvalidCost(format!("{what} must be nonnegative, got {c}")));
    }
    Ok(())
}

impl CostExpr {
    pub fn constant(c: f64) -> Self {
        CostExpr::Constant(c)
    }

    pub fn affine(constant: f64, coeffs: Vec<f64>) -> Self {
        CostExpr::Affine { constant, coeffs }
    }

    pub fn congestion(weights: Vec<f64>, capacity: f64) -> Self {
        CostExpr::Congestion { weights, capacity }
    }

    pub fn scale(factor: f64, expr: CostExpr) -> Self {
        CostExpr::Scale(factor, Box::new(expr))
    }

    pub fn nonmonotone_affine(constant: f64, coeffs: Vec<f64>) -> Self {
        CostExpr::NonMonotoneAffine { constant, coeffs }
    }

    /// Checks coefficient signs, finiteness and that the expression refers to
    /// at most `populations` flows.
    pub fn validate(&self, populations: usize) -> Result<()> {
        let arity = |len: usize| {
            if len > populations {
                Err(Error::InvalidCost(format!(
                    "expression refers to {len} populations, network has {populations}"
                )))
            } else {
                Ok(())
            }
        };
        match self {
            CostExpr::Constant(c) => check_coeff("constant", *c, false),
            CostExpr::Affine { constant, coeffs } => {
                check_coeff("affine constant", *constant, false)?;
                arity(coeffs.len())?;
                coeffs.iter().try_for_each(|&c| check_coeff("affine coefficient", c, false))
            }
            CostExpr::Poly(terms) => terms.iter().try_for_each(|m| {
                check_coeff("monomial coefficient", m.coeff, false)?;
                arity(m.exponents.len())
            }),
            CostExpr::Congestion { weights, capacity } => {
                arity(weights.len())?;
                weights.iter().try_for_each(|&w| check_coeff("congestion weight", w, false))?;
                check_coeff("capacity", *capacity, false)?;
                if *capacity <= 0.0 {
                    return Err(Error::InvalidCost(format!("capacity must be positive, got {capacity}")));
                }
                Ok(())
            }
            CostExpr::Sum(terms) => terms.iter().try_for_each(|t| t.validate(populations)),
            CostExpr::Scale(c, inner) => {
                check_coeff("scale factor", *c, false)?;
                inner.validate(populations)
            }
            CostExpr::NonMonotoneAffine { constant, coeffs } => {
                check_coeff("affine constant", *constant, true)?;
                arity(coeffs.len())?;
                coeffs.iter().try_for_each(|&c| check_coeff("affine coefficient", c, true))?;
                let floor = constant + coeffs.iter().filter(|&&c| c < 0.0).sum::<f64>();
                if floor < 0.0 {
                    return Err(Error::InvalidCost(format!(
                        "signed affine form reaches {floor} < 0 on the unit cube"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Evaluates at flows already known to lie in `[0, 1]`.
    pub(crate) fn eval_unchecked(&self, flows: &[f64]) -> ExtReal {
        match self {
            CostExpr::Constant(c) => ExtReal::finite(*c),
            CostExpr::Affine { constant, coeffs } => ExtReal::finite(constant + dot(coeffs, flows)),
            CostExpr::Poly(terms) => ExtReal::finite(terms.iter().map(|m| m.eval(flows)).sum()),
            CostExpr::Congestion { weights, capacity } => {
                let s = dot(weights, flows);
                if s >= *capacity {
                    ExtReal::Infinity
                } else {
                    ExtReal::finite(s / (capacity - s))
                }
            }
            CostExpr::Sum(terms) => terms.iter().map(|t| t.eval_unchecked(flows)).sum(),
            CostExpr::Scale(c, inner) => {
                if *c == 0.0 {
                    // identically zero; never forms 0 * inf
                    ExtReal::ZERO
                } else {
                    inner.eval_unchecked(flows).scale(*c)
                }
            }
            CostExpr::NonMonotoneAffine { constant, coeffs } => {
                let v = constant + dot(coeffs, flows);
                ExtReal::finite(if v < 0.0 { 0.0 } else { v })
            }
        }
    }

    /// Partial derivative with respect to `eta_p`, at a point where the
    /// expression is finite.
    pub(crate) fn partial_unchecked(&self, flows: &[f64], p: usize) -> f64 {
        match self {
            CostExpr::Constant(_) => 0.0,
            CostExpr::Affine { coeffs, .. } | CostExpr::NonMonotoneAffine { coeffs, .. } => coeff(coeffs, p),
            CostExpr::Poly(terms) => terms.iter().map(|m| m.partial(flows, p)).sum(),
            CostExpr::Congestion { weights, capacity } => {
                let s = dot(weights, flows);
                let gap = capacity - s;
                coeff(weights, p) * capacity / (gap * gap)
            }
            CostExpr::Sum(terms) => terms.iter().map(|t| t.partial_unchecked(flows, p)).sum(),
            CostExpr::Scale(c, inner) => {
                if *c == 0.0 {
                    0.0
                } else {
                    c * inner.partial_unchecked(flows, p)
                }
            }
        }
    }

    /// True unless the expression contains a signed affine form with a
    /// negative coefficient that is not scaled away.
    pub fn is_structurally_monotone(&self) -> bool {
        match self {
            CostExpr::Constant(_) | CostExpr::Affine { .. } | CostExpr::Poly(_) | CostExpr::Congestion { .. } => true,
            CostExpr::Sum(terms) => terms.iter().all(CostExpr::is_structurally_monotone),
            CostExpr::Scale(c, inner) => *c == 0.0 || inner.is_structurally_monotone(),
            CostExpr::NonMonotoneAffine { coeffs, .. } => coeffs.iter().all(|&c| c >= 0.0),
        }
    }

    /// `Some(true)` when convexity follows from the AST alone, `None` when it
    /// has to be sampled. Monomials in two or more variables (`eta_0 * eta_1`)
    /// are not convex in general.
    pub fn structural_convexity(&self) -> Option<bool> {
        match self {
            CostExpr::Constant(_)
            | CostExpr::Affine { .. }
            | CostExpr::NonMonotoneAffine { .. }
            | CostExpr::Congestion { .. } => Some(true),
            CostExpr::Poly(terms) => {
                if terms.iter().all(|m| m.variables() <= 1) {
                    Some(true)
                } else {
                    None
                }
            }
            CostExpr::Sum(terms) => {
                if terms.iter().all(|t| t.structural_convexity() == Some(true)) {
                    Some(true)
                } else {
                    None
                }
            }
            CostExpr::Scale(c, inner) => {
                if *c == 0.0 {
                    Some(true)
                } else {
                    inner.structural_convexity()
                }
            }
        }
    }

    /// Largest population index the expression refers to, plus one.
    pub fn arity(&self) -> usize {
        match self {
            CostExpr::Constant(_) => 0,
            CostExpr::Affine { coeffs, .. } | CostExpr::NonMonotoneAffine { coeffs, .. } => coeffs.len(),
            CostExpr::Poly(terms) => terms.iter().map(|m| m.exponents.len()).max().unwrap_or(0),
            CostExpr::Congestion { weights, .. } => weights.len(),
            CostExpr::Sum(terms) => terms.iter().map(CostExpr::arity).max().unwrap_or(0),
            CostExpr::Scale(_, inner) => inner.arity(),
        }
    }
}

/// Clamps flows into `[0, 1]`, rejecting values further out than
/// [`FLOW_TOLERANCE`].
pub fn checked_flows(flows: &[f64]) -> Result<Vec<f64>> {
    flows
        .iter()
        .enumerate()
        .map(|(p, &v)| {
            if v.is_nan() || v < -FLOW_TOLERANCE || v > 1.0 + FLOW_TOLERANCE {
                Err(Error::FlowOutOfRange { population: p, value: v })
            } else {
                Ok(v.clamp(0.0, 1.0))
            }
        })
        .collect()
}

/// Exact evaluation of `expr` at `flows`.
pub fn eval_cost(expr: &CostExpr, flows: &[f64]) -> Result<ExtReal> {
    let flows = checked_flows(flows)?;
    Ok(expr.eval_unchecked(&flows))
}

/// Analytic partial derivative with respect to the flow of population `p`.
///
/// Fails with [`Error::InfiniteCost`] where the expression is `+inf`.
pub fn eval_partial(expr: &CostExpr, flows: &[f64], p: usize) -> Result<f64> {
    let flows = checked_flows(flows)?;
    if expr.eval_unchecked(&flows).is_infinite() {
        return Err(Error::InfiniteCost);
    }
    Ok(expr.partial_unchecked(&flows, p))
}

/// Outcome of [`classify_cost`].
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CostClassReport {
    /// Weakly increasing in every flow (class C, with continuity).
    pub monotone: bool,
    pub c1_smooth_where_finite: bool,
    pub convex: bool,
    /// Grid difference tests agreed with `monotone`.
    pub sampled_monotone: bool,
    /// Grid midpoint tests found no convexity violation.
    pub sampled_convex: bool,
    pub samples: usize,
}

const SAMPLE_SLACK: f64 = 1e-12;

/// Classifies `expr` over `[0,1]^populations` with structural rules first and
/// an `m^populations` grid second. Sampled verdicts are advisory: they only
/// decide `convex` when the structure cannot.
pub fn classify_cost(expr: &CostExpr, populations: usize, m: usize) -> CostClassReport {
    let dims = populations.max(expr.arity()).max(1);
    let m = m.max(2);
    let grid = Grid::new(dims, m);

    let values: Vec<ExtReal> = (0..grid.len()).map(|idx| expr.eval_unchecked(&grid.point(idx))).collect();

    let mut sampled_monotone = true;
    let mut sampled_convex = true;
    let mut idx_buf = alloc::vec![0usize; dims];
    for idx in 0..grid.len() {
        grid.unflatten(idx, &mut idx_buf);
        let here = values[idx];
        for p in 0..dims {
            if idx_buf[p] + 1 < m {
                let next = values[idx + grid.stride(p)];
                if let (Some(a), Some(b)) = (here.value(), next.value()) {
                    if b < a - SAMPLE_SLACK * (1.0 + math::abs(a)) {
                        sampled_monotone = false;
                    }
                } else if here.is_infinite() && next.is_finite() {
                    sampled_monotone = false;
                }
            }
        }
        // midpoint tests along e_p and e_p +- e_q
        for p in 0..dims {
            for q in p..dims {
                for sign in [1i64, -1] {
                    if q == p && sign < 0 {
                        continue;
                    }
                    let mut plus = Vec::with_capacity(dims);
                    let mut minus = Vec::with_capacity(dims);
                    let mut ok = true;
                    for r in 0..dims {
                        let mut d = 0i64;
                        if r == p {
                            d += 1;
                        }
                        if r == q && q != p {
                            d += sign;
                        }
                        let i = idx_buf[r] as i64;
                        if i + d < 0 || i + d >= m as i64 || i - d < 0 || i - d >= m as i64 {
                            ok = false;
                            break;
                        }
                        plus.push((i + d) as usize);
                        minus.push((i - d) as usize);
                    }
                    if !ok {
                        continue;
                    }
                    let a = values[grid.flatten(&plus)];
                    let b = values[grid.flatten(&minus)];
                    match (a.value(), b.value(), here.value()) {
                        (Some(a), Some(b), Some(c)) => {
                            if a + b < 2.0 * c - SAMPLE_SLACK * (1.0 + math::abs(c)) {
                                sampled_convex = false;
                            }
                        }
                        (Some(_), Some(_), None) => sampled_convex = false,
                        _ => {}
                    }
                }
            }
        }
    }

    let monotone = expr.is_structurally_monotone();
    CostClassReport {
        monotone,
        c1_smooth_where_finite: true,
        convex: expr.structural_convexity().unwrap_or(sampled_convex),
        sampled_monotone,
        sampled_convex,
        samples: grid.len(),
    }
}

/// Regular grid `{0, 1/(m-1), ..., 1}^dims`.
struct Grid {
    dims: usize,
    m: usize,
}

impl Grid {
    fn new(dims: usize, m: usize) -> Self {
        Grid { dims, m }
    }

    fn len(&self) -> usize {
        self.m.pow(self.dims as u32)
    }

    fn stride(&self, p: usize) -> usize {
        self.m.pow(p as u32)
    }

    fn unflatten(&self, mut idx: usize, out: &mut [usize]) {
        for slot in out.iter_mut().take(self.dims) {
            *slot = idx % self.m;
            idx /= self.m;
        }
    }

    fn flatten(&self, coords: &[usize]) -> usize {
        coords.iter().rev().fold(0, |acc, &c| acc * self.m + c)
    }

    fn point(&self, idx: usize) -> Vec<f64> {
        let mut coords = alloc::vec![0usize; self.dims];
        self.unflatten(idx, &mut coords);
        let h = 1.0 / (self.m - 1) as f64;
        coords.iter().map(|&c| c as f64 * h).collect()
    }
}
