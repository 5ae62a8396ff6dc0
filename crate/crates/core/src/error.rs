use thiserror::Error;

/// Problems found while reading or validating a machine description.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MachineError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: unknown {kind} `{name}`")]
    UnknownName {
        line: usize,
        kind: &'static str,
        name: String,
    },

    #[error("line {line}: duplicate edge from state `{state}` on symbol `{symbol}`")]
    DuplicateEdge {
        line: usize,
        state: String,
        symbol: String,
    },

    #[error("edge from state `{state}` on symbol `{symbol}` has probability {value}, expected a value in (0, 1]")]
    InvalidProbability {
        state: String,
        symbol: String,
        value: f64,
    },

    #[error("outgoing probabilities of state `{state}` sum to {sum}, expected 1")]
    RowSum { state: String, sum: f64 },

    #[error("transition graph is not strongly connected (state `{unreachable}` is not mutually reachable with `{from}`)")]
    NotStronglyConnected { from: String, unreachable: String },

    #[error("states {states:?} are probabilistically equivalent")]
    EquivalentStates { states: Vec<String> },

    #[error("invalid machine shape: {0}")]
    Shape(String),

    #[error("unknown state index {0}")]
    StateOutOfRange(usize),

    #[error("unknown symbol index {0}")]
    SymbolOutOfRange(usize),

    #[error("random generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },

    #[error("stationary distribution: {0}")]
    Solve(#[from] SolveError),
}

/// Failure of a dense linear solve.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SolveError {
    #[error("matrix is numerically singular (pivot {pivot:e} in column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("solution has a non-positive entry {value:e} at index {index}")]
    NonPositive { index: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RateError {
    #[error("machine is non-exact: pair ({first}, {second}) can never be merged")]
    NonExact { first: String, second: String },

    #[error("spectral radius did not converge after {iterations} iterations; bracket [{lower}, {upper}]")]
    Accuracy {
        iterations: usize,
        lower: f64,
        upper: f64,
    },

    #[error("edge machine: {0}")]
    Solve(#[from] SolveError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("word has probability 0 under the initial distribution")]
    ImpossibleWord,

    #[error("enumeration needs {required} path steps, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("no reset word of length <= {cap} found and the subset search is not exhausted")]
    CapExceeded { cap: usize },

    #[error("initial distribution has {got} entries, machine has {expected} states")]
    DistributionLength { expected: usize, got: usize },

    #[error(transparent)]
    Machine(#[from] MachineError),
}
