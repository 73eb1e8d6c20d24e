//! Global Nash equilibria for road networks shared by several traveler
//! populations.
//!
//! Each population has its own origin, destination, route list and road
//! costs. Costs are continuous, weakly increasing in every population's flow
//! and may blow up to `+inf` (congestion). The crate provides
//!
//! * the network data model, structural validation and incidence matrices
//!   ([`network`]),
//! * an extended-real cost expression language with exact evaluation and
//!   analytic derivatives ([`costs`], [`ExtReal`]),
//! * route/mean travel times and the three equilibrium predicates
//!   ([`equilibrium`]),
//! * the simplex self-map whose fixed points contain every Nash equilibrium,
//!   together with a damped iteration and a multistart driver ([`solver`]),
//! * uniqueness diagnostics, a brute-force grid oracle and Braess scenario
//!   comparison ([`analysis`]),
//! * the worked example networks used throughout the tests ([`fixtures`]).
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod assignment;
pub mod costs;
pub mod equilibrium;
mod error;
pub mod ext;
pub mod fixtures;
pub mod grid;
mod math;
pub mod network;
pub mod rng;
pub mod solver;

pub use assignment::Assignment;
pub use costs::{CostExpr, Monomial};
pub use equilibrium::{EquilibriumReport, RouteTimes, Tolerances};
pub use error::{Error, Result};
pub use ext::ExtReal;
pub use network::{Model, Network, Population, Road, Route};
pub use solver::{SolveResult, SolverParams};
