use std::collections::BTreeSet;

use num_traits::{One, Zero};

use super::scheduler::{BStep, Move, SchedulerKind, TableScheduler};
use crate::error::{Error, Result};
use crate::imdp::{valuation_to_assignment, BoundaryIdx, ImdpState, IntervalB, RegionImdp, Side};
use crate::interval::{is_assignment, Assignment};
use crate::model::{transition_distribution, Cdpta, TimedState};
use crate::rational::{nat, Rational};

fn region(boundaries: &BoundaryIdx, v: &Rational) -> Result<IntervalB> {
    boundaries
        .region_of(v)
        .ok_or_else(|| Error::PreViolation(format!("clock value {v} exceeds the largest constant")))
}

/// Probability of visiting a location in `targets` within `horizon` timed
/// moves, from the initial state, under a table scheduler.
pub fn bounded_reach_cdpta(
    model: &Cdpta,
    sched: &TableScheduler,
    horizon: usize,
    targets: &[String],
) -> Result<Rational> {
    if sched.kind() != SchedulerKind::Cdpta {
        return Err(Error::PreViolation("scheduler is not a model scheduler".into()));
    }
    let targets: BTreeSet<&str> = targets.iter().map(String::as_str).collect();
    let boundaries = crate::imdp::boundary_set(model);
    let start = TimedState::new(model.initial(), nat(0));
    let key = vec![BStep::Region(start.location.clone(), IntervalB::Point(0))];
    recurse_cdpta(model, sched, &boundaries, &targets, &start, key, horizon)
}

fn recurse_cdpta(
    model: &Cdpta,
    sched: &TableScheduler,
    boundaries: &BoundaryIdx,
    targets: &BTreeSet<&str>,
    state: &TimedState,
    key: Vec<BStep>,
    left: usize,
) -> Result<Rational> {
    if targets.contains(state.location.as_str()) {
        return Ok(Rational::one());
    }
    if left == 0 {
        return Ok(Rational::zero());
    }
    let mut total = Rational::zero();
    for (m, p) in sched.get(&key)? {
        let Move::Timed { delay_to, edge } = m else {
            unreachable!("kind checked on insert")
        };
        let edge_ref = model
            .edge(edge)
            .ok_or_else(|| Error::PreViolation(format!("unknown edge `{edge}`")))?;
        let chosen = region(boundaries, delay_to)?;
        for (next, q) in transition_distribution(model, state, delay_to, edge_ref)? {
            let mut next_key = key.clone();
            next_key.push(BStep::Choice(chosen, edge.clone()));
            next_key.push(BStep::Region(next.location.clone(), region(boundaries, &next.clock)?));
            let r = recurse_cdpta(model, sched, boundaries, targets, &next, next_key, left - 1)?;
            total += p * q * r;
        }
    }
    Ok(total)
}

/// Probability of visiting a state in `targets` within `horizon` region-to-region
/// steps (each passing through one endpoint indicator), from the initial state.
pub fn bounded_reach_imdp(
    imdp: &RegionImdp,
    sched: &TableScheduler,
    horizon: usize,
    targets: &[usize],
) -> Result<Rational> {
    if sched.kind() != SchedulerKind::Imdp {
        return Err(Error::PreViolation("scheduler is not an interval MDP scheduler".into()));
    }
    let targets: BTreeSet<usize> = targets.iter().copied().collect();
    let start = imdp.initial();
    let ImdpState::Region { location, interval } = imdp.state(start) else {
        return Err(Error::PreViolation("initial state is not a region".into()));
    };
    let key = vec![BStep::Region(location.clone(), *interval)];
    recurse_imdp(imdp, sched, &targets, start, key, horizon)
}

fn recurse_imdp(
    imdp: &RegionImdp,
    sched: &TableScheduler,
    targets: &BTreeSet<usize>,
    state: usize,
    key: Vec<BStep>,
    left: usize,
) -> Result<Rational> {
    if targets.contains(&state) {
        return Ok(Rational::one());
    }
    if left == 0 {
        return Ok(Rational::zero());
    }
    let mut total = Rational::zero();
    for (m, p) in sched.get(&key)? {
        let Move::Action {
            interval,
            edge,
            assignment,
        } = m
        else {
            unreachable!("kind checked on insert")
        };
        let action = imdp
            .choices(state)
            .find(|(a, _)| matches!(a, crate::imdp::ImdpAction::Delay { interval: b, edge: e } if b == interval && e == edge));
        let Some((_, row)) = action else {
            return Err(Error::PreViolation(format!(
                "action ({interval},{edge}) is not available at {}",
                imdp.state(state)
            )));
        };
        let indicator = |side| {
            imdp.index_of(&ImdpState::endpoint(*interval, edge.clone(), side))
                .expect("available actions lead to indicators")
        };
        let by_index: Assignment<usize> = [Side::Le, Side::Re]
            .into_iter()
            .map(|side| (indicator(side), assignment.get(&side)))
            .collect();
        if !is_assignment(row, &by_index) {
            return Err(Error::PreViolation(format!(
                "assignment {m} is not valid for action ({interval},{edge})"
            )));
        }
        for side in [Side::Le, Side::Re] {
            let weight = assignment.get(&side);
            if weight.is_zero() {
                continue;
            }
            let tau = &imdp.rows(indicator(side))[0];
            for (&next, q) in tau.iter() {
                let ImdpState::Region { location, interval: b } = imdp.state(next) else {
                    unreachable!("indicators lead to regions")
                };
                let mut next_key = key.clone();
                next_key.push(BStep::Choice(*interval, edge.clone()));
                next_key.push(BStep::Region(location.clone(), *b));
                let r = recurse_imdp(imdp, sched, targets, next, next_key, left - 1)?;
                total += p * &weight * q.lep() * r;
            }
        }
    }
    Ok(total)
}

/// The interval MDP scheduler that encodes each timed move by its partition
/// element and the position of the clock inside it.
pub fn mimic_scheduler(sched: &TableScheduler, imdp: &RegionImdp) -> Result<TableScheduler> {
    if sched.kind() != SchedulerKind::Cdpta {
        return Err(Error::PreViolation("scheduler is not a model scheduler".into()));
    }
    let points = imdp.states().iter().filter_map(|s| match s {
        ImdpState::Region {
            interval: IntervalB::Point(b),
            ..
        } => Some(*b),
        _ => None,
    });
    let boundaries = BoundaryIdx::new(points);
    if !sched.is_b_minimal(|v| boundaries.region_of(v)) {
        return Err(Error::NotBMinimal(
            "some entry takes one edge at two clock values of the same partition element".into(),
        ));
    }
    let half = Rational::new(1.into(), 2.into());
    let mut out = TableScheduler::new(SchedulerKind::Imdp);
    for (key, moves) in sched.entries() {
        let mut mapped = Vec::with_capacity(moves.len());
        for (m, p) in moves {
            let Move::Timed { delay_to, edge } = m else {
                unreachable!("kind checked above")
            };
            let interval = region(&boundaries, delay_to)?;
            let assignment = match interval {
                IntervalB::Open(..) => valuation_to_assignment(interval, delay_to)?,
                IntervalB::Point(_) => [(Side::Le, half.clone()), (Side::Re, half.clone())].into_iter().collect(),
            };
            mapped.push((
                Move::Action {
                    interval,
                    edge: edge.clone(),
                    assignment,
                },
                p.clone(),
            ));
        }
        out.insert(key.clone(), mapped)?;
    }
    Ok(out)
}
