//! Exact semantics of a single timed move: let time elapse, then take an edge.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::automaton::{Cdpta, Outcome, ProbEdge};
use super::constraint::ClockInterval;
use crate::error::{Error, Result};
use crate::rational::{fmt_rational, Rational};

/// A concrete state `(location, clock value)` of the semantic MDP.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimedState {
    pub location: String,
    pub clock: Rational,
}

impl TimedState {
    pub fn new(location: impl Into<String>, clock: Rational) -> Self {
        TimedState {
            location: location.into(),
            clock,
        }
    }
}

impl fmt::Display for TimedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.location, fmt_rational(&self.clock))
    }
}

/// Valuations where the edge is enabled: guard and source invariant.
/// `None` when the edge can never be taken.
pub fn enabled_interval(edge: &ProbEdge, model: &Cdpta) -> Option<ClockInterval> {
    let inv = model.invariant(&edge.source)?;
    edge.guard.interval_within(inv)
}

/// Value of the outcome's template at `v`, which must lie in the closure of the
/// enabled interval.
pub fn template_eval(edge: &ProbEdge, outcome: &Outcome, v: &Rational, model: &Cdpta) -> Result<Rational> {
    let in_domain = enabled_interval(edge, model)
        .map(|i| i.closure_contains(v))
        .unwrap_or(false);
    if !in_domain {
        return Err(Error::OutOfDomain {
            edge: edge.id.clone(),
            value: fmt_rational(v),
        });
    }
    Ok(outcome.expr.eval(v))
}

/// Distribution over successor states after waiting until `delay_to` and taking `edge`.
///
/// When `delay_to` is zero, reset and non-reset mass toward the same location
/// land on the same state and are summed.
pub fn transition_distribution(
    model: &Cdpta,
    state: &TimedState,
    delay_to: &Rational,
    edge: &ProbEdge,
) -> Result<BTreeMap<TimedState, Rational>> {
    let inv = model
        .invariant(&state.location)
        .ok_or_else(|| Error::PreViolation(format!("unknown location `{}`", state.location)))?;
    if edge.source != state.location {
        return Err(Error::PreViolation(format!(
            "edge `{}` does not leave location `{}`",
            edge.id, state.location
        )));
    }
    if state.clock < Rational::zero() || !inv.holds(&state.clock) {
        return Err(Error::PreViolation(format!("{state} violates the invariant {inv}")));
    }
    if delay_to < &state.clock {
        return Err(Error::PreViolation(format!(
            "cannot move the clock back from {} to {}",
            fmt_rational(&state.clock),
            fmt_rational(delay_to)
        )));
    }
    // invariants are upper bounds, so satisfaction at `delay_to` covers the whole delay
    if !inv.holds(delay_to) {
        return Err(Error::PreViolation(format!(
            "waiting until {} violates the invariant {inv}",
            fmt_rational(delay_to)
        )));
    }
    if !edge.guard.holds(delay_to) {
        return Err(Error::PreViolation(format!(
            "guard {} of edge `{}` is false at {}",
            edge.guard,
            edge.id,
            fmt_rational(delay_to)
        )));
    }

    let mut dist: BTreeMap<TimedState, Rational> = BTreeMap::new();
    for outcome in &edge.outcomes {
        let mass = outcome.expr.eval(delay_to);
        if mass.is_zero() {
            continue;
        }
        let clock = if outcome.reset {
            Rational::zero()
        } else {
            delay_to.clone()
        };
        *dist
            .entry(TimedState::new(outcome.target.clone(), clock))
            .or_insert_with(Rational::zero) += mass;
    }
    dist.retain(|_, p| !p.is_zero());
    Ok(dist)
}
