use thiserror::Error;

/// A matrix cell `(good, consumer)` reported by the interiority checks.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Cell {
    pub good: usize,
    pub consumer: usize,
    pub value: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed economy document: {0}")]
    Parse(String),

    #[error("{path}: {message}")]
    Validation { path: String, message: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("I + phi G is numerically singular for good {good} (condition number {cond:e})")]
    SingularLayer { good: usize, cond: f64 },

    #[error("system matrix H is numerically singular (condition number {cond:e})")]
    SingularH { cond: f64 },

    #[error("aggregate influence matrix sum(alpha M) is numerically singular")]
    SingularAggregate,

    #[error("effective endowment is not positive for consumer {consumer} (mu = {value:e})")]
    NonPositiveMu { consumer: usize, value: f64 },

    #[error("equilibrium is not interior: x[{}][{}] = {:e}", .0.good, .0.consumer, .0.value)]
    NonInteriorEquilibrium(Cell),

    #[error("Pareto allocation formula leaves the interior at {} cell(s)", .0.len())]
    NonInteriorPareto(Vec<Cell>),

    #[error("Lindahl allocation is not interior at {} cell(s)", .0.len())]
    NonInteriorLindahl(Vec<Cell>),

    #[error("witness allocation of the resource-utilization bound has {} negative cell(s)", .0.len())]
    ConstructionInfeasible(Vec<Cell>),

    #[error("centrality parallel condition holds; no Pareto improvement exists")]
    ParallelNoImprovement,

    #[error("improvement direction system is infeasible for goods ({0}, {1})")]
    ImprovementInfeasible(usize, usize),

    #[error("line search step fell below {0:e} without a strict improvement")]
    LineSearchFailed(f64),

    #[error("rank condition fails: rank(Mbar) = {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("degenerate comparison network: {0}")]
    DegenerateNetwork(String),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "ParseError",
            Error::Validation { .. } => "ValidationError",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::SingularLayer { .. } => "SingularLayer",
            Error::SingularH { .. } => "SingularH",
            Error::SingularAggregate => "SingularAggregate",
            Error::NonPositiveMu { .. } => "NonPositiveMu",
            Error::NonInteriorEquilibrium(_) => "NonInteriorEquilibrium",
            Error::NonInteriorPareto(_) => "NonInteriorPareto",
            Error::NonInteriorLindahl(_) => "NonInteriorLindahl",
            Error::ConstructionInfeasible(_) => "ConstructionInfeasible",
            Error::ParallelNoImprovement => "ParallelNoImprovement",
            Error::ImprovementInfeasible(..) => "ImprovementInfeasible",
            Error::LineSearchFailed(_) => "LineSearchFailed",
            Error::RankDeficient { .. } => "RankDeficient",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::Domain(_) => "DomainError",
            Error::DegenerateNetwork(_) => "DegenerateNetwork",
        }
    }

    /// True for errors caused by bad input rather than by the solvers.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::Validation { .. }
                | Error::DimensionMismatch(_)
                | Error::Domain(_)
                | Error::DegenerateNetwork(_)
        )
    }

    /// Location hint: a field path for validation errors, a cell for
    /// interiority errors, a good index for layer errors.
    pub fn location(&self) -> Option<String> {
        match self {
            Error::Validation { path, .. } => Some(path.clone()),
            Error::SingularLayer { good, .. } => Some(format!("goods[{good}]")),
            Error::NonPositiveMu { consumer, .. } => Some(format!("mu[{consumer}]")),
            Error::NonInteriorEquilibrium(c) => Some(cell_path(c)),
            Error::NonInteriorPareto(cs)
            | Error::NonInteriorLindahl(cs)
            | Error::ConstructionInfeasible(cs) => cs.first().map(cell_path),
            Error::ImprovementInfeasible(s, t) => Some(format!("goods[{s}],goods[{t}]")),
            _ => None,
        }
    }

    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}

fn cell_path(c: &Cell) -> String {
    format!("allocation[{}][{}]", c.good, c.consumer)
}

pub type Result<T> = std::result::Result<T, Error>;
