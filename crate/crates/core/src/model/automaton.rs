use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use super::constraint::{ClockConstraint, ClockInterval, InvariantSpec};
use crate::error::{Error, Result};
use crate::rational::{fmt_rational, Rational};

/// The affine map `v -> constant + slope * v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineExpr {
    pub constant: Rational,
    pub slope: Rational,
}

impl AffineExpr {
    pub fn new(constant: Rational, slope: Rational) -> Self {
        AffineExpr { constant, slope }
    }

    pub fn constant(c: Rational) -> Self {
        AffineExpr::new(c, Rational::zero())
    }

    pub fn eval(&self, v: &Rational) -> Rational {
        &self.constant + &self.slope * v
    }

    pub fn is_constant(&self) -> bool {
        self.slope.is_zero()
    }

    /// True iff the value is strictly positive on every point of `interval`.
    pub fn positive_on(&self, interval: &ClockInterval) -> bool {
        let at_lo = self.eval(&interval.lo);
        let at_hi = self.eval(&interval.hi);
        let zero = Rational::zero();
        if interval.is_point() {
            return at_lo > zero;
        }
        let lo_ok = if interval.lo_open { at_lo >= zero } else { at_lo > zero };
        let hi_ok = if interval.hi_open { at_hi >= zero } else { at_hi > zero };
        // both open endpoints at zero means the map vanishes identically
        lo_ok && hi_ok && (at_lo + at_hi) > zero
    }

    /// The sub-interval of `interval` where the value is strictly positive.
    pub fn positive_part(&self, interval: &ClockInterval) -> Option<ClockInterval> {
        let zero = Rational::zero();
        if self.slope.is_zero() {
            return (self.constant > zero).then(|| interval.clone());
        }
        let root = -&self.constant / &self.slope;
        if self.slope > zero {
            if root < interval.lo {
                Some(interval.clone())
            } else {
                ClockInterval::new(root, interval.hi.clone(), true, interval.hi_open)
            }
        } else if root > interval.hi {
            Some(interval.clone())
        } else {
            ClockInterval::new(interval.lo.clone(), root, interval.lo_open, true)
        }
    }
}

impl fmt::Display for AffineExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let zero = Rational::zero();
        if self.slope.is_zero() {
            return write!(f, "{}", fmt_rational(&self.constant));
        }
        let magnitude = if self.slope < zero { -&self.slope } else { self.slope.clone() };
        let term = if magnitude.is_one() {
            "x".to_string()
        } else {
            format!("{}*x", fmt_rational(&magnitude))
        };
        match (self.constant.is_zero(), self.slope < zero) {
            (true, false) => write!(f, "{term}"),
            (true, true) => write!(f, "-{term}"),
            (false, false) => write!(f, "{} + {term}", fmt_rational(&self.constant)),
            (false, true) => write!(f, "{} - {term}", fmt_rational(&self.constant)),
        }
    }
}

/// A reset flag and target location with its clock-dependent probability.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Outcome {
    pub reset: bool,
    pub target: String,
    pub expr: AffineExpr,
}

impl Outcome {
    pub fn new(reset: bool, target: impl Into<String>, expr: AffineExpr) -> Self {
        Outcome {
            reset,
            target: target.into(),
            expr,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProbEdge {
    pub id: String,
    pub source: String,
    pub guard: ClockConstraint,
    pub outcomes: Vec<Outcome>,
}

impl ProbEdge {
    pub fn new(
        id: impl Into<String>,
        source: impl Into<String>,
        guard: ClockConstraint,
        outcomes: Vec<Outcome>,
    ) -> Self {
        ProbEdge {
            id: id.into(),
            source: source.into(),
            guard,
            outcomes,
        }
    }

    /// Constant iff no outcome depends on the clock.
    pub fn is_constant(&self) -> bool {
        self.outcomes.iter().all(|o| o.expr.is_constant())
    }

    pub fn outcome(&self, reset: bool, target: &str) -> Option<&Outcome> {
        self.outcomes
            .iter()
            .find(|o| o.reset == reset && o.target == target)
    }
}

/// A one-clock clock-dependent probabilistic timed automaton.
///
/// Edges are kept sorted by id so that structurally equal models compare equal
/// regardless of declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cdpta {
    locations: BTreeMap<String, InvariantSpec>,
    edges: Vec<ProbEdge>,
    initial: String,
}

impl Cdpta {
    pub fn new(
        locations: BTreeMap<String, InvariantSpec>,
        mut edges: Vec<ProbEdge>,
        initial: impl Into<String>,
    ) -> Result<Self> {
        let initial = initial.into();
        if !locations.contains_key(&initial) {
            return Err(Error::Model(format!("initial location `{initial}` is not declared")));
        }
        let mut ids = BTreeSet::new();
        for edge in &edges {
            if !ids.insert(edge.id.as_str()) {
                return Err(Error::Model(format!("duplicate edge id `{}`", edge.id)));
            }
            if !locations.contains_key(&edge.source) {
                return Err(Error::Model(format!(
                    "edge `{}` leaves undeclared location `{}`",
                    edge.id, edge.source
                )));
            }
            if edge.outcomes.is_empty() {
                return Err(Error::Model(format!("edge `{}` has no outcomes", edge.id)));
            }
            let mut seen = BTreeSet::new();
            for o in &edge.outcomes {
                if !locations.contains_key(&o.target) {
                    return Err(Error::Model(format!(
                        "edge `{}` targets undeclared location `{}`",
                        edge.id, o.target
                    )));
                }
                if !seen.insert((o.reset, o.target.as_str())) {
                    return Err(Error::Model(format!(
                        "edge `{}` repeats outcome ({}, {})",
                        edge.id,
                        if o.reset { "reset" } else { "no reset" },
                        o.target
                    )));
                }
            }
        }
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(Cdpta {
            locations,
            edges,
            initial,
        })
    }

    pub fn locations(&self) -> &BTreeMap<String, InvariantSpec> {
        &self.locations
    }

    pub fn invariant(&self, location: &str) -> Option<&InvariantSpec> {
        self.locations.get(location)
    }

    pub fn edges(&self) -> &[ProbEdge] {
        &self.edges
    }

    pub fn edge(&self, id: &str) -> Option<&ProbEdge> {
        self.edges
            .binary_search_by(|e| e.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.edges[i])
    }

    pub fn edges_from<'a>(&'a self, location: &'a str) -> impl Iterator<Item = &'a ProbEdge> + 'a {
        self.edges.iter().filter(move |e| e.source == location)
    }

    pub fn initial(&self) -> &str {
        &self.initial
    }

    /// Number of locations plus total outcome count, a rough model size.
    pub fn size(&self) -> usize {
        self.locations.len() + self.edges.iter().map(|e| e.outcomes.len()).sum::<usize>()
    }
}
