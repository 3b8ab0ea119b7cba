use thiserror::Error;

/// Which end of a feasible interval a boundary optimum sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Lower,
    Upper,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("function has {finite} finite grid values, at least 3 are required")]
    DegenerateFunction { finite: usize },

    #[error("function is not concave: second difference {excess:e} at grid index {index}")]
    NotConcave { index: usize, excess: f64 },

    #[error("derivative requested at x = {x} which is within one grid step of the support edge")]
    EdgeDerivative { x: f64 },

    #[error("equilibrium is attained at the {endpoint:?} boundary of the feasible interval")]
    BoundarySolution { endpoint: Endpoint },

    #[error("no feasible energy split for total energy {epsilon0}")]
    NoFeasibleSplit { epsilon0: f64 },

    #[error("temperature must be positive, got kT = {0}")]
    InvalidTemperature(f64),

    #[error("{name} = {value} is outside its admissible range")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("output letter {output} has positive probability but zero moment generating sum")]
    IncompatibleSupport { output: usize },

    #[error("operation requires the {expected} phase, system is {found}")]
    PhaseMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("enumeration needs {required} steps, budget is {budget}")]
    TooLarge { required: u128, budget: u64 },

    #[error("observed output has zero likelihood under every codeword")]
    ImpossibleOutput,

    #[error("rate {rate} exceeds the largest achievable main-channel rate {max}")]
    InfeasibleRate { rate: f64, max: f64 },

    #[error("code rate {rate} does not exceed the eavesdropper mutual information {capacity}")]
    NotAboveCapacity { rate: f64, capacity: f64 },

    #[error("invalid specification: {field}: {message}")]
    Spec { field: String, message: String },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn spec(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Spec {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
