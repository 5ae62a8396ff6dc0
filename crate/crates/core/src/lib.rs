//! Synchronization measures of ε-machines.
//!
//! An ε-machine is a strongly connected partial DFA with a probability
//! distribution on each state's outgoing edges. This crate computes
//!
//! * the synchronization rate constant of exact machines, as the spectral
//!   radius of the pair-automaton matrix ([`rates::sync_rate`]);
//! * the prediction rate constant of non-exact machines, from the stationary
//!   log-likelihood ratios on closed deadlock components
//!   ([`rates::prediction_rate`]);
//!
//! and checks both against word enumeration and Monte Carlo simulation
//! ([`oracle`]).
//!
//! ```
//! use emsync::{format::parse_machine, rates};
//!
//! let m = parse_machine(
//!     "machine ex\nstates 0 1\nsymbols a b\n\
//!      edge 0 a 0 0.5\nedge 0 b 1 0.5\nedge 1 a 0 0.75\nedge 1 b 0 0.25\nend\n",
//! )
//! .unwrap();
//! let src = rates::sync_rate(&m, 1e-10).unwrap();
//! assert!((src - 0.125f64.sqrt()).abs() < 1e-9);
//! ```

pub mod cli;
pub mod equivalence;
pub mod error;
pub mod format;
pub mod generate;
pub mod graph;
pub mod linalg;
pub mod machine;
pub mod oracle;
pub mod pair_space;
pub mod rates;
pub mod report;

pub use error::{MachineError, OracleError, RateError, SolveError};
pub use machine::{Edge, EpsilonMachine, StationaryDist};
pub use pair_space::{classify, Classification, DeadlockAnalysis, Pair, PairAutomaton};
