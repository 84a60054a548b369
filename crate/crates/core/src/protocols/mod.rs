//! Discriminating non-orthogonal states under a p-norm rule, and the
//! signalling protocols that follow from it and from nonunitary gates.

mod discrimination;
mod signalling;

pub use discrimination::{
    build_discrimination_setup, discrimination_bound_check, discrimination_distribution, discrimination_error,
    discrimination_monte_carlo, leak_weight, DiscriminationSetup, MonteCarloEstimate,
};
pub use signalling::{
    option_i_ensemble_tvd, option_i_monte_carlo, pairs_needed, signalling_multistate_ii, signalling_option_i,
    signalling_option_ii, SignallingReport, STEERING_LEAK,
};

use thiserror::Error;

use crate::numerics::NumericsError;
use crate::state::StateError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("need d >= 2, got {0}")]
    InvalidDimension(usize),
    #[error("the bound chain is stated for odd d, got {0}")]
    EvenDimension(usize),
    #[error("p must be positive, got {0}")]
    NonPositiveP(f64),
    #[error("the two ensembles coincide at p = 2")]
    PEqualsTwo,
    #[error("epsilon must lie in [0, 1], got {0}")]
    InvalidEpsilon(f64),
    #[error("state index {j} out of range for d = {d}")]
    StateOutOfRange { j: usize, d: usize },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

fn check_p(p: f64) -> Result<(), ProtocolError> {
    if p.is_nan() || p <= 0.0 {
        return Err(ProtocolError::NonPositiveP(p));
    }
    Ok(())
}

fn check_d(d: usize) -> Result<(), ProtocolError> {
    if d < 2 {
        return Err(ProtocolError::InvalidDimension(d));
    }
    Ok(())
}

/// Total variation distance between two distributions on the same outcomes.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0
}
