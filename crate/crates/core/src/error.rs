use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the toolkit reports. Each variant maps to a stable,
/// machine-parsable code via [`Error::code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("bad grid: {0}")]
    BadGrid(String),

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("hypothesis violated ({condition}) at y={y}, T={temperature}")]
    HypothesisViolation {
        condition: String,
        y: f64,
        temperature: f64,
    },

    #[error("negative temperature {0} passed to a nonlinearity")]
    NegativeTemperature(f64),

    #[error("principal eigenpair did not converge at lambda={lambda}: {reason}")]
    EigenNoConvergence { lambda: f64, reason: String },

    #[error("eigenvector at lambda={lambda} has entries of both signs")]
    SignAmbiguity { lambda: f64 },

    #[error("mu(0) = {mu0} is not negative; no minimal speed exists")]
    PreconditionMu0 { mu0: f64 },

    #[error("k(lambda)/lambda has no interior minimum on [{lo}, {hi}]")]
    BracketNotFound { lo: f64, hi: f64 },

    #[error("speed {c} is below the minimal speed {c_star}")]
    SpeedBelowMinimal { c: f64, c_star: f64 },

    #[error("no upper root of k(lambda) = {c} lambda below lambda = {hi}")]
    UpperBracketNotFound { c: f64, hi: f64 },

    #[error("|mu(0)| = {mu0:e} is within 1e-10 of zero; this case is not classified")]
    DegenerateMuZero { mu0: f64 },

    #[error("decay rate {lambda} sits on the boundary mu(lambda) = lambda^2; not classified")]
    UnclassifiableBoundary { lambda: f64 },

    #[error("initial profile infeasible: {0}")]
    SandwichInfeasible(String),

    #[error("time step {dt} exceeds the stability limit {limit}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("bound invariant broken for {field} at (i={i}, j={j}): value {value}")]
    BoundInvariantBroken {
        field: &'static str,
        i: usize,
        j: usize,
        value: f64,
    },

    #[error("{field}-front at x={position} is within the guard margin of the domain end")]
    FrontTouchedBoundary { field: &'static str, position: f64 },

    #[error("profile never crosses threshold {threshold}")]
    NoCrossing { threshold: f64 },

    #[error("need at least {need} samples, have {have}")]
    TooFewSamples { have: usize, need: usize },

    #[error("fit region [{lo}, {hi}] lies outside the grid")]
    RegionOutsideGrid { lo: f64, hi: f64 },

    #[error("temperature underflows in the fit region")]
    UnderflowRegion,

    #[error("a front lies inside the left plateau strip")]
    FrontInStrip,

    #[error("front solution has not converged")]
    NotConverged,

    #[error("speed {c} is not admissible (need c > max(0, c*) with c* = {c_star})")]
    SpeedNotAdmissible { c: f64, c_star: f64 },

    #[error("sub/super-solution parameter search failed: {0}")]
    ParameterSearchFailed(String),

    #[error("linear solve failed: {0}")]
    LinearSolveFailed(String),

    #[error("front iteration at c={c} did not converge after {iterations} iterations (change {change:e})")]
    NoConvergence { c: f64, iterations: usize, change: f64 },

    #[error("sup (mu(lambda) - lambda^2) = {sup} is not negative")]
    SupConditionFails { sup: f64 },

    #[error("configuration file not found: {0}")]
    ConfigNotFound(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::BadGrid(_) => "BAD_GRID",
            Error::BadParameter(_) => "BAD_PARAMETER",
            Error::HypothesisViolation { .. } => "HYPOTHESIS_VIOLATION",
            Error::NegativeTemperature(_) => "NEGATIVE_TEMPERATURE",
            Error::EigenNoConvergence { .. } => "EIGEN_NO_CONVERGENCE",
            Error::SignAmbiguity { .. } => "SIGN_AMBIGUITY",
            Error::PreconditionMu0 { .. } => "PRECONDITION_MU0",
            Error::BracketNotFound { .. } => "BRACKET_NOT_FOUND",
            Error::SpeedBelowMinimal { .. } => "SPEED_BELOW_MINIMAL",
            Error::UpperBracketNotFound { .. } => "UPPER_BRACKET_NOT_FOUND",
            Error::DegenerateMuZero { .. } => "DEGENERATE_MU_ZERO",
            Error::UnclassifiableBoundary { .. } => "UNCLASSIFIABLE_BOUNDARY",
            Error::SandwichInfeasible(_) => "SANDWICH_INFEASIBLE",
            Error::CflViolation { .. } => "CFL_VIOLATION",
            Error::BoundInvariantBroken { .. } => "BOUND_INVARIANT_BROKEN",
            Error::FrontTouchedBoundary { .. } => "FRONT_TOUCHED_BOUNDARY",
            Error::NoCrossing { .. } => "NO_CROSSING",
            Error::TooFewSamples { .. } => "TOO_FEW_SAMPLES",
            Error::RegionOutsideGrid { .. } => "REGION_OUTSIDE_GRID",
            Error::UnderflowRegion => "UNDERFLOW_REGION",
            Error::FrontInStrip => "FRONT_IN_STRIP",
            Error::NotConverged => "NOT_CONVERGED",
            Error::SpeedNotAdmissible { .. } => "SPEED_NOT_ADMISSIBLE",
            Error::ParameterSearchFailed(_) => "PARAMETER_SEARCH_FAILED",
            Error::LinearSolveFailed(_) => "LINEAR_SOLVE_FAILED",
            Error::NoConvergence { .. } => "NO_CONVERGENCE",
            Error::SupConditionFails { .. } => "SUP_CONDITION_FAILS",
            Error::ConfigNotFound(_) => "CONFIG_NOT_FOUND",
            Error::Config(_) => "CONFIG_PARSE",
            Error::Io(_) => "IO_ERROR",
        }
    }
}
