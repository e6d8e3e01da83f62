//! One-clock clock-dependent probabilistic timed automata: syntax, exact
//! semantics of timed moves, and the structural checks the abstraction needs.

mod automaton;
mod constraint;
mod semantics;
mod validate;

pub use automaton::{AffineExpr, Cdpta, Outcome, ProbEdge};
pub use constraint::{eval_constraint, Atom, ClockConstraint, ClockInterval, InvariantSpec, Relation};
pub use semantics::{enabled_interval, template_eval, transition_distribution, TimedState};
pub use validate::{
    check_initialised, validate, verify_witness, Initialisation, ModelRef, ValidationReport, Violation,
    ViolationCode,
};
