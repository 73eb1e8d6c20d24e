//! Uniqueness diagnostics, the brute-force grid oracle and Braess scenario
//! comparison.

pub mod braess;
pub mod oracle;
pub mod quadrature;
pub mod segment;
pub mod uniqueness;

pub use braess::{compare_scenarios, BraessReport, BraessRow};
pub use oracle::{brute_force_equilibria, OracleCluster, OracleParams, OracleResult};
pub use segment::{check_defpos, classify_road, segment_matrices, DefposReport, RoadCase, SegmentMatrices};
pub use uniqueness::{check_hypothesis_h, check_unique0, HypothesisSampler, UniquenessReport};
