//! The region / endpoint-indicator interval MDP of a validated model.
//!
//! A timed move `(v, p)` of the automaton becomes two steps here: the region
//! picks an action `(B, p)` for the partition element containing `v` and an
//! assignment over the two endpoint indicators of `B` (the assignment encodes
//! where `v` sits inside `B`), then the chosen indicator resolves the edge with
//! the template evaluated at that endpoint. Because templates are affine, the
//! mixture over both endpoints reproduces the template value at `v` exactly.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::partition::{boundary_set, interval_partition, ClockPredicate, IntervalB};
use super::system::Imdp;
use crate::error::{Error, Result};
use crate::interval::{Assignment, IntervalDistribution, ProbInterval};
use crate::model::{Cdpta, ProbEdge};
use crate::rational::{fmt_rational, nat, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Le,
    Re,
}

impl Side {
    pub fn endpoint(self, interval: IntervalB) -> u64 {
        match self {
            Side::Le => interval.le(),
            Side::Re => interval.re(),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Le => "le",
            Side::Re => "re",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ImdpState {
    /// Location with the clock somewhere in `interval`.
    Region { location: String, interval: IntervalB },
    /// The edge is being taken from `interval`, resolved at one endpoint.
    Endpoint { interval: IntervalB, edge: String, side: Side },
}

impl ImdpState {
    pub fn region(location: impl Into<String>, interval: IntervalB) -> Self {
        ImdpState::Region {
            location: location.into(),
            interval,
        }
    }

    pub fn endpoint(interval: IntervalB, edge: impl Into<String>, side: Side) -> Self {
        ImdpState::Endpoint {
            interval,
            edge: edge.into(),
            side,
        }
    }

    pub fn location(&self) -> Option<&str> {
        match self {
            ImdpState::Region { location, .. } => Some(location),
            ImdpState::Endpoint { .. } => None,
        }
    }
}

impl fmt::Display for ImdpState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImdpState::Region { location, interval } => write!(f, "({location},{interval})"),
            ImdpState::Endpoint { interval, edge, side } => write!(f, "({interval},{edge},{side})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ImdpAction {
    Delay { interval: IntervalB, edge: String },
    Tau,
}

impl fmt::Display for ImdpAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImdpAction::Delay { interval, edge } => write!(f, "({interval},{edge})"),
            ImdpAction::Tau => write!(f, "tau"),
        }
    }
}

/// The interval MDP of a model.
pub type RegionImdp = Imdp<ImdpState, ImdpAction>;

/// Probability that the endpoint indicator `(interval, edge, side)` moves to
/// the region `(target_location, target_interval)`.
pub fn endpoint_target_prob(
    interval: IntervalB,
    edge: &ProbEdge,
    side: Side,
    target_location: &str,
    target_interval: IntervalB,
) -> Rational {
    let at = nat(side.endpoint(interval));
    let mass = |reset: bool| {
        edge.outcome(reset, target_location)
            .map(|o| o.expr.eval(&at))
            .unwrap_or_else(Rational::zero)
    };
    if target_interval == interval && interval.is_zero() {
        mass(true) + mass(false)
    } else if target_interval == interval {
        mass(false)
    } else if target_interval.is_zero() {
        mass(true)
    } else {
        Rational::zero()
    }
}

fn open_row(interval: IntervalB, edge: &str, index: &BTreeMap<ImdpState, usize>) -> IntervalDistribution<usize> {
    [Side::Le, Side::Re]
        .into_iter()
        .map(|side| {
            let key = index[&ImdpState::endpoint(interval, edge, side)];
            (key, ProbInterval::open(Rational::zero(), Rational::one()))
        })
        .collect()
}

/// Builds the interval MDP. The model is expected to pass validation.
pub fn build_imdp(model: &Cdpta) -> Result<RegionImdp> {
    let boundaries = boundary_set(model);
    let partition = interval_partition(&boundaries);

    let mut states = Vec::new();
    for (location, inv) in model.locations() {
        for &b in &partition {
            if inv.holds_on(b) {
                states.push(ImdpState::region(location.clone(), b));
            }
        }
    }
    let mut enabled: Vec<(IntervalB, &ProbEdge)> = Vec::new();
    for edge in model.edges() {
        let inv = model
            .invariant(&edge.source)
            .ok_or_else(|| Error::AssumptionBroken(format!("edge `{}` has no source invariant", edge.id)))?;
        for &b in &partition {
            if edge.guard.holds_on(b) && inv.holds_on(b) {
                enabled.push((b, edge));
                for side in [Side::Le, Side::Re] {
                    states.push(ImdpState::endpoint(b, edge.id.clone(), side));
                }
            }
        }
    }
    let index: BTreeMap<ImdpState, usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();

    let mut choices = Vec::with_capacity(states.len());
    for state in &states {
        match state {
            ImdpState::Region { location, interval } => {
                let list: Vec<_> = enabled
                    .iter()
                    .filter(|(b, edge)| &edge.source == location && b >= interval)
                    .map(|(b, edge)| {
                        (
                            ImdpAction::Delay {
                                interval: *b,
                                edge: edge.id.clone(),
                            },
                            open_row(*b, &edge.id, &index),
                        )
                    })
                    .collect();
                if list.is_empty() {
                    return Err(Error::AssumptionBroken(format!(
                        "region {state} has no available action"
                    )));
                }
                choices.push(list);
            }
            ImdpState::Endpoint { interval, edge, side } => {
                let edge = model.edge(edge).expect("indicator edges come from the model");
                let mut row = IntervalDistribution::new();
                for outcome in &edge.outcomes {
                    for target_interval in [*interval, IntervalB::Point(0)] {
                        let p = endpoint_target_prob(*interval, edge, *side, &outcome.target, target_interval);
                        if p.is_zero() {
                            continue;
                        }
                        let target = ImdpState::region(outcome.target.clone(), target_interval);
                        let Some(&t) = index.get(&target) else {
                            return Err(Error::AssumptionBroken(format!(
                                "{state} moves with probability {} to {target}, which violates its invariant",
                                fmt_rational(&p)
                            )));
                        };
                        row.insert(t, ProbInterval::point(p));
                    }
                }
                choices.push(vec![(ImdpAction::Tau, row)]);
            }
        }
    }

    let initial = index
        .get(&ImdpState::region(model.initial(), IntervalB::Point(0)))
        .copied()
        .ok_or_else(|| Error::AssumptionBroken("initial location does not admit clock value 0".into()))?;
    Imdp::new(states, choices, initial)
        .map_err(|e| Error::AssumptionBroken(format!("constructed rows are malformed: {e}")))
}

/// Region states whose location is in `locations`.
pub fn region_targets<'a>(imdp: &RegionImdp, locations: impl IntoIterator<Item = &'a str>) -> Vec<usize> {
    let wanted: std::collections::BTreeSet<&str> = locations.into_iter().collect();
    (0..imdp.num_states())
        .filter(|&i| imdp.state(i).location().map(|l| wanted.contains(l)).unwrap_or(false))
        .collect()
}

/// Encodes a valuation inside an open interval as weights on its endpoints.
pub fn valuation_to_assignment(interval: IntervalB, v: &Rational) -> Result<Assignment<Side>> {
    let IntervalB::Open(a, b) = interval else {
        return Err(Error::OutOfInterval {
            interval: interval.to_string(),
            value: fmt_rational(v),
        });
    };
    if !interval.contains(v) {
        return Err(Error::OutOfInterval {
            interval: interval.to_string(),
            value: fmt_rational(v),
        });
    }
    let (lo, hi) = (nat(a), nat(b));
    let width = &hi - &lo;
    let mut alpha = Assignment::new();
    alpha.set(Side::Le, (&hi - v) / &width);
    alpha.set(Side::Re, (v - &lo) / &width);
    Ok(alpha)
}

/// The valuation encoded by endpoint weights; inverse of [`valuation_to_assignment`].
pub fn assignment_to_valuation(interval: IntervalB, alpha: &Assignment<Side>) -> Result<Rational> {
    let IntervalB::Open(a, b) = interval else {
        return Err(Error::Degenerate(interval.to_string()));
    };
    let le = alpha.get(&Side::Le);
    let re = alpha.get(&Side::Re);
    let zero = Rational::zero();
    if le <= zero || re <= zero || !(&le + &re).is_one() {
        return Err(Error::Degenerate(interval.to_string()));
    }
    let (lo, hi) = (nat(a), nat(b));
    Ok(&hi - le * (&hi - &lo))
}

/// Closed-form size bounds `(|L| (2k+1), 2 (2k+1) |prob|)` on regions and indicators.
pub fn size_bounds(model: &Cdpta) -> (usize, usize) {
    let parts = interval_partition(&boundary_set(model)).len();
    (model.locations().len() * parts, 2 * parts * model.edges().len())
}

/// Counts of region and endpoint-indicator states.
pub fn state_counts(imdp: &RegionImdp) -> (usize, usize) {
    let regions = imdp
        .states()
        .iter()
        .filter(|s| matches!(s, ImdpState::Region { .. }))
        .count();
    (regions, imdp.num_states() - regions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AffineExpr, ClockConstraint, InvariantSpec, Outcome};
    use crate::rational::{int, rat};

    fn loop_model() -> Cdpta {
        let edge = ProbEdge::new(
            "p",
            "l",
            ClockConstraint::truth(),
            vec![Outcome::new(false, "l", AffineExpr::constant(int(1)))],
        );
        Cdpta::new([("l".to_string(), InvariantSpec::le(1))].into(), vec![edge], "l").unwrap()
    }

    #[test]
    fn smallest_build() {
        let imdp = build_imdp(&loop_model()).unwrap();
        assert_eq!(state_counts(&imdp), (3, 6));
        assert_eq!(size_bounds(&loop_model()), (3, 6));
        let init = imdp.initial();
        assert_eq!(imdp.state(init), &ImdpState::region("l", IntervalB::Point(0)));
        assert_eq!(imdp.actions(init).len(), 3);
        for s in 0..imdp.num_states() {
            for row in imdp.rows(s) {
                assert!(crate::interval::is_interval_distribution(row));
            }
        }
        let top = imdp.index_of(&ImdpState::region("l", IntervalB::Point(1))).unwrap();
        assert_eq!(imdp.actions(top).len(), 1);
    }

    #[test]
    fn valuation_encoding() {
        let a = valuation_to_assignment(IntervalB::Open(1, 3), &rat(3, 2)).unwrap();
        assert_eq!((a.get(&Side::Le), a.get(&Side::Re)), (rat(3, 4), rat(1, 4)));
        assert_eq!(assignment_to_valuation(IntervalB::Open(1, 3), &a).unwrap(), rat(3, 2));
        let b = valuation_to_assignment(IntervalB::Open(4, 5), &rat(9, 2)).unwrap();
        assert_eq!((b.get(&Side::Le), b.get(&Side::Re)), (rat(1, 2), rat(1, 2)));
        assert!(matches!(
            valuation_to_assignment(IntervalB::Open(1, 3), &int(3)),
            Err(Error::OutOfInterval { .. })
        ));
        let mut corner = Assignment::new();
        corner.set(Side::Le, int(1));
        assert!(matches!(
            assignment_to_valuation(IntervalB::Open(1, 3), &corner),
            Err(Error::Degenerate(_))
        ));
    }
}
