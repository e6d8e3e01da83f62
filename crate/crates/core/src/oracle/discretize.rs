use std::collections::HashMap;
use std::ops::Range;

use num_bigint::BigInt;
use num_traits::One;

use super::mdp::FiniteMdp;
use crate::error::{Error, Result};
use crate::imdp::boundary_set;
use crate::model::{eval_constraint, transition_distribution, Cdpta, TimedState};
use crate::rational::{nat, Rational};

/// Clock valuations restricted to multiples of `2^-k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiscretizationLevel {
    k: u32,
}

impl DiscretizationLevel {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 || k > 30 {
            return Err(Error::Format(format!("discretization level {k} outside 1..=30")));
        }
        Ok(DiscretizationLevel { k })
    }

    pub fn k(self) -> u32 {
        self.k
    }

    pub fn step(self) -> Rational {
        Rational::new(BigInt::one(), BigInt::one() << self.k)
    }

    /// `i · 2^-k`.
    pub fn point(self, i: u64) -> Rational {
        Rational::new(BigInt::from(i), BigInt::one() << self.k)
    }
}

/// Timed moves `(v̂, p)` of the discretized semantics.
pub type GridMove = (Rational, String);

/// The semantics of `model` with clock values and delays on the grid.
pub fn discretize(model: &Cdpta, level: DiscretizationLevel) -> Result<FiniteMdp<TimedState, GridMove>> {
    let top = boundary_set(model).max() << level.k();
    let mut states = Vec::new();
    for (location, inv) in model.locations() {
        for i in 0..=top {
            let v = level.point(i);
            if inv.holds(&v) {
                states.push(TimedState::new(location.clone(), v));
            }
        }
    }
    let index: HashMap<TimedState, usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();

    // one block of rows per edge, in increasing order of the delay target
    let mut rows = Vec::new();
    let mut blocks: HashMap<&str, Vec<Range<usize>>> = HashMap::new();
    for edge in model.edges() {
        let inv = model.invariant(&edge.source).expect("validated model");
        let block = blocks.entry(edge.source.as_str()).or_default();
        let start = rows.len();
        for i in 0..=top {
            let v = level.point(i);
            if !(inv.holds(&v) && eval_constraint(&edge.guard, &v)) {
                continue;
            }
            let here = TimedState::new(edge.source.clone(), v.clone());
            let dist = transition_distribution(model, &here, &v, edge)?
                .into_iter()
                .map(|(t, p)| {
                    index
                        .get(&t)
                        .map(|&j| (j, p))
                        .ok_or_else(|| Error::AssumptionBroken(format!("successor {t} is off the grid")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(((v, edge.id.clone()), dist));
        }
        block.push(start..rows.len());
    }

    let mut available = Vec::with_capacity(states.len());
    for s in &states {
        let mut ranges = Vec::new();
        for block in blocks.get(s.location.as_str()).map(Vec::as_slice).unwrap_or(&[]) {
            let first = block.start + rows[block.clone()].partition_point(|((v, _), _)| v < &s.clock);
            ranges.push(first..block.end);
        }
        available.push(ranges);
    }
    let initial = index
        .get(&TimedState::new(model.initial(), nat(0)))
        .copied()
        .ok_or_else(|| Error::AssumptionBroken("initial state violates its invariant".into()))?;
    FiniteMdp::new(states, rows, available, initial)
}
