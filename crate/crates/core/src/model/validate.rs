//! Structural checks a model must pass before it can be abstracted.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_traits::{One, Zero};

use super::automaton::Cdpta;
use super::constraint::{ClockInterval, InvariantSpec};
use super::semantics::enabled_interval;
use crate::rational::{fmt_rational, nat, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationCode {
    InvShape,
    NoEnabledEdge,
    TargetInvariant,
    AffineNegative,
    AffineSum,
    EmptyGuard,
    NotInitialised,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::InvShape => "INV_SHAPE",
            ViolationCode::NoEnabledEdge => "NO_ENABLED_EDGE",
            ViolationCode::TargetInvariant => "TARGET_INVARIANT",
            ViolationCode::AffineNegative => "AFFINE_NEGATIVE",
            ViolationCode::AffineSum => "AFFINE_SUM",
            ViolationCode::EmptyGuard => "EMPTY_GUARD",
            ViolationCode::NotInitialised => "NOT_INITIALISED",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelRef {
    Location(String),
    Edge(String),
    /// Edge ids of a violating path fragment.
    Fragment(Vec<String>),
}

impl fmt::Display for ModelRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelRef::Location(l) => write!(f, "location {l}"),
            ModelRef::Edge(e) => write!(f, "edge {e}"),
            ModelRef::Fragment(es) => write!(f, "fragment [{}]", es.join(", ")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    pub at: ModelRef,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.at, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    fn push(&mut self, code: ViolationCode, at: ModelRef, message: String) {
        self.violations.push(Violation { code, at, message });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return writeln!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Outcome of [`check_initialised`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Initialisation {
    Ok,
    /// Edge ids along a fragment that starts and ends with non-constant edges
    /// without the clock passing through a natural value in between.
    Violated(Vec<String>),
}

/// Runs every structural check and reports all failures.
pub fn validate(model: &Cdpta) -> ValidationReport {
    let mut report = ValidationReport::default();

    for (name, inv) in model.locations() {
        if !inv.is_well_formed() {
            report.push(
                ViolationCode::InvShape,
                ModelRef::Location(name.clone()),
                format!("invariant {inv} is unsatisfiable; a strict bound must be at least 1"),
            );
            continue;
        }
        if !has_escape_edge(model, name, inv) {
            let needed = if inv.strict {
                format!("an edge enabled on all of ({}, {})", inv.bound - 1, inv.bound)
            } else {
                format!("an edge enabled at {}", inv.bound)
            };
            report.push(
                ViolationCode::NoEnabledEdge,
                ModelRef::Location(name.clone()),
                format!("time can be blocked by {inv}; need {needed}"),
            );
        }
    }

    let mut numeric_ok = true;
    for edge in model.edges() {
        let Some(enabled) = enabled_interval(edge, model) else {
            numeric_ok = false;
            report.push(
                ViolationCode::EmptyGuard,
                ModelRef::Edge(edge.id.clone()),
                format!(
                    "guard {} never holds under the invariant of `{}`",
                    edge.guard, edge.source
                ),
            );
            continue;
        };

        for o in &edge.outcomes {
            for v in [&enabled.lo, &enabled.hi] {
                let value = o.expr.eval(v);
                if value < Rational::zero() {
                    numeric_ok = false;
                    report.push(
                        ViolationCode::AffineNegative,
                        ModelRef::Edge(edge.id.clone()),
                        format!(
                            "outcome to `{}` has probability {} at x = {}",
                            o.target,
                            fmt_rational(&value),
                            fmt_rational(v)
                        ),
                    );
                }
            }
        }

        if enabled.is_point() {
            let total: Rational = edge.outcomes.iter().map(|o| o.expr.eval(&enabled.lo)).sum();
            if !total.is_one() {
                numeric_ok = false;
                report.push(
                    ViolationCode::AffineSum,
                    ModelRef::Edge(edge.id.clone()),
                    format!(
                        "outcome probabilities sum to {} at x = {}",
                        fmt_rational(&total),
                        fmt_rational(&enabled.lo)
                    ),
                );
            }
        } else {
            let constants: Rational = edge.outcomes.iter().map(|o| o.expr.constant.clone()).sum();
            let slopes: Rational = edge.outcomes.iter().map(|o| o.expr.slope.clone()).sum();
            if !constants.is_one() || !slopes.is_zero() {
                numeric_ok = false;
                report.push(
                    ViolationCode::AffineSum,
                    ModelRef::Edge(edge.id.clone()),
                    format!(
                        "outcome probabilities sum to {} + {}*x instead of 1",
                        fmt_rational(&constants),
                        fmt_rational(&slopes)
                    ),
                );
            }
        }

        for o in edge.outcomes.iter().filter(|o| !o.reset) {
            let Some(target_inv) = model.invariant(&o.target) else { continue };
            let Some(positive) = o.expr.positive_part(&enabled) else { continue };
            let allowed = target_inv
                .as_interval()
                .map(|t| positive.is_subset_of(&t))
                .unwrap_or(false);
            if !allowed {
                report.push(
                    ViolationCode::TargetInvariant,
                    ModelRef::Edge(edge.id.clone()),
                    format!(
                        "outcome to `{}` is possible for x in {positive} but `{}` requires {target_inv}",
                        o.target, o.target
                    ),
                );
            }
        }
    }

    if numeric_ok {
        if let Initialisation::Violated(fragment) = check_initialised(model) {
            report.push(
                ViolationCode::NotInitialised,
                ModelRef::Fragment(fragment.clone()),
                format!(
                    "non-constant edges {} and {} can follow each other without the clock \
                     being reset or pinned to a natural value",
                    fragment.first().map(String::as_str).unwrap_or("?"),
                    fragment.last().map(String::as_str).unwrap_or("?")
                ),
            );
        }
    }
    report
}

fn has_escape_edge(model: &Cdpta, location: &str, inv: &InvariantSpec) -> bool {
    let c = nat(inv.bound);
    model.edges_from(location).any(|edge| {
        if inv.strict {
            let needed = ClockInterval::new(&c - Rational::one(), c.clone(), true, true)
                .expect("strict bound is at least 1");
            edge.guard
                .interval_within(inv)
                .map(|sat| needed.is_subset_of(&sat))
                .unwrap_or(false)
        } else {
            edge.guard.holds(&c)
        }
    })
}

/// Decides initialisation on the graph of edges linked by non-reset outcomes
/// that are positive on the whole enabled interval and whose enabled intervals
/// share more than one valuation.
pub fn check_initialised(model: &Cdpta) -> Initialisation {
    let edges = model.edges();
    let enabled: Vec<Option<ClockInterval>> =
        edges.iter().map(|e| enabled_interval(e, model)).collect();

    let mut successors: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, edge) in edges.iter().enumerate() {
        let Some(from) = &enabled[i] else { continue };
        for (j, next) in edges.iter().enumerate() {
            let Some(to) = &enabled[j] else { continue };
            let linked = edge.outcomes.iter().any(|o| {
                !o.reset && o.target == next.source && o.expr.positive_on(from)
            });
            let overlap = from.intersect(to).map(|i| i.is_proper()).unwrap_or(false);
            if linked && overlap {
                successors.entry(i).or_default().push(j);
            }
        }
    }

    // shortest path (at least one arc) from each non-constant edge to a non-constant edge
    for start in (0..edges.len()).filter(|&i| !edges[i].is_constant()) {
        let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
        let mut queue = VecDeque::new();
        for &n in successors.get(&start).into_iter().flatten() {
            if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(n) {
                e.insert(start);
                queue.push_back(n);
            }
        }
        while let Some(node) = queue.pop_front() {
            if !edges[node].is_constant() {
                let mut path = vec![node];
                let mut cur = node;
                loop {
                    let p = parent[&cur];
                    path.push(p);
                    if p == start {
                        break;
                    }
                    cur = p;
                }
                path.reverse();
                return Initialisation::Violated(path.into_iter().map(|k| edges[k].id.clone()).collect());
            }
            for &n in successors.get(&node).into_iter().flatten() {
                if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(n) {
                    e.insert(node);
                    queue.push_back(n);
                }
            }
        }
    }
    Initialisation::Ok
}

/// Re-checks a witness returned by [`check_initialised`]: consecutive edges
/// must be linked by a non-reset outcome positive on the whole enabled
/// interval with an overlap of more than one valuation, and both ends must be
/// non-constant.
pub fn verify_witness(model: &Cdpta, fragment: &[String]) -> bool {
    if fragment.len() < 2 {
        return false;
    }
    let Some(edges) = fragment.iter().map(|id| model.edge(id)).collect::<Option<Vec<_>>>() else {
        return false;
    };
    if edges[0].is_constant() || edges[edges.len() - 1].is_constant() {
        return false;
    }
    edges.windows(2).all(|pair| {
        let (Some(from), Some(to)) = (enabled_interval(pair[0], model), enabled_interval(pair[1], model))
        else {
            return false;
        };
        let linked = pair[0]
            .outcomes
            .iter()
            .any(|o| !o.reset && o.target == pair[1].source && o.expr.positive_on(&from));
        linked && from.intersect(&to).map(|i| i.is_proper()).unwrap_or(false)
    })
}
