use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("flow {value} of population {population} lies outside [0, 1]")]
    FlowOutOfRange { population: usize, value: f64 },

    #[error("cost is infinite at the requested point, derivative undefined")]
    InfiniteCost,

    #[error("cost of road `{road}` for population `{population}` is infinite along the segment")]
    InfiniteSegment { road: String, population: String },

    #[error("unknown population index {0}")]
    UnknownPopulation(usize),

    #[error("unknown junction `{0}`")]
    UnknownJunction(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid cost expression: {0}")]
    InvalidCost(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("shares of population {population} are not in the simplex: {reason}")]
    NotInSimplex { population: usize, reason: String },

    #[error("normalization denominator vanished for population {0}")]
    DegenerateNormalization(usize),

    #[error("cost of road `{road}` for population `{population}` is not monotone")]
    NonMonotone { road: String, population: String },

    #[error("route {route} of population `{population}` has no road of its own (condition Gamma fails)")]
    ConditionGamma { population: String, route: usize },

    #[error("assignment is not a Nash equilibrium: {0}")]
    NotNash(String),

    #[error("grid of {points} points exceeds the budget of {budget}")]
    BudgetExceeded { points: u128, budget: u128 },

    #[error("no start produced a verified Nash equilibrium")]
    NoEquilibrium,

    #[error("solver did not verify a Nash equilibrium for scenario `{0}`")]
    Unsolved(String),

    #[error("analysis supports one or two populations, got {0}")]
    UnsupportedPopulations(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
