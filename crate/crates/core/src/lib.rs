//! Estimation of the missing-tag probability from repeated RFID reader sessions.
//!
//! A closed population of `N` tags is read in `R` sessions. In every session a
//! tag is unreadable with probability `p`. From which tags were seen in which
//! sessions this crate estimates `p`, the population size `N`, and the
//! probability `p_M = 1 - (1 - p^R)^N` that at least one tag was never read.
//! A sequential controller keeps requesting sessions until that probability
//! falls below a threshold.
//!
//! Layout:
//!
//! - [`estimators`]: two-session closed forms, window-ratio estimators (RME and
//!   REGM), the Schnabel capture-recapture estimator, and `p_M`.
//! - [`sim`]: independent and Markov-correlated session generators plus the
//!   tallying of a read history into multiplicity counts.
//! - [`oracle`]: exact enumeration of the two-session multinomial outcome space.
//! - [`controller`]: the stop/continue rule and the sequential driver.
//! - [`experiment`]: seeded Monte Carlo sweeps and stop-R distributions with
//!   CSV output.

pub mod controller;
pub mod estimators;
pub mod experiment;
pub mod oracle;
pub mod sim;

mod error;
mod numeric;

pub use controller::{run_sequential, should_continue, SessionLog, StopOutcome, StopPolicy};
pub use error::{Error, Result};
pub use estimators::{EstimateReport, Estimator, MultiplicityVector, SchnabelTallies, WindowPair};
pub use sim::{
    derive_correlation, simulate_correlated, simulate_independent, tally, CorrelationParams, PopulationParams,
    ReadHistory, SessionSource, Tallier, Tally,
};
