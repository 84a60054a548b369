//! Postselected computation: the majority-decision algorithm, the
//! nonunitary OR solver, and the p-norm postselection gadget.

mod gadget;
mod table;
mod majority;

pub use gadget::{
    decide_via_bqp_p, decide_via_bqp_p_with, gadget_size, or_solve_gate_g, postselection_gadget,
    postselection_gadget_for, GadgetOutcome, OrSolve,
};
pub use table::{BooleanFunction, TruthTableError};
pub use majority::{
    majority_threshold, postbqp_decide, prepare_psi_s, psi_s_closed_form, varphi_overlap, varphi_overlap_circuit,
    DecisionMode, MajorityDecision, PerIndex, PsiPreparation, Verdict, BAD_CASE_BOUND, GOOD_CASE_BOUND,
};

use thiserror::Error;

use crate::state::StateError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PostBqpError {
    #[error("need 0 < s and s != 2^(n-1); got s = {s} for n = {n}")]
    PaddingViolation { s: usize, n: usize },
    #[error("the gadget needs p != 2")]
    PEqualsTwo,
    #[error("p must be positive, got {0}")]
    NonPositiveP(f64),
    #[error("{what} = {value} exceeds the supported maximum {max}")]
    TooLarge { what: &'static str, value: usize, max: usize },
    #[error("index i = {i} outside [-n, n] for n = {n}")]
    IndexOutOfRange { i: i32, n: usize },
    #[error(transparent)]
    State(#[from] StateError),
}
