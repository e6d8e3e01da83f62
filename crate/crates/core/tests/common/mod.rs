//! Shared fixtures, generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use cdpta::dsl::parse;
use cdpta::imdp::{boundary_set, interval_partition, BoundaryIdx, ClockPredicate, Imdp, IntervalB};
use cdpta::interval::{is_interval_distribution, IntervalDistribution, ProbInterval};
use cdpta::model::{
    transition_distribution, AffineExpr, Atom, Cdpta, ClockConstraint, InvariantSpec, Outcome, ProbEdge,
    Relation, TimedState,
};
use cdpta::oracle::{BStep, Move, SchedulerKind, TableScheduler};
use cdpta::rational::{nat, rat, Rational};
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const TASK: &str = include_str!("../../fixtures/task.cdpta");
pub const NOTINIT: &str = include_str!("../../fixtures/notinit.cdpta");

pub fn task() -> Cdpta {
    parse(TASK).expect("task fixture parses")
}

pub fn notinit() -> Cdpta {
    parse(NOTINIT).expect("notinit fixture parses")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// analytic values for task

fn expr(model: &Cdpta, edge: &str, reset: bool, target: &str, at: u64) -> Rational {
    model
        .edge(edge)
        .and_then(|e| e.outcome(reset, target))
        .map(|o| o.expr.eval(&nat(at)))
        .unwrap_or_else(Rational::zero)
}

/// `(max reach S, min reach T)` from `(W,0)`. A memoryless scheduler picks
/// one delay `x` in W and one delay `y` in F, so each value is a linear
/// fractional function of the outcome probabilities, extremal at the
/// endpoints of the guards.
pub fn task_analytic() -> (Rational, Rational) {
    let m = task();
    let mut best_s: Option<Rational> = None;
    let mut best_t: Option<Rational> = None;
    for x in [1, 3] {
        for y in [4, 5] {
            let s = expr(&m, "p_W", false, "S", x);
            let t = expr(&m, "p_W", false, "T", x);
            let f = expr(&m, "p_W", false, "F", x);
            let back = expr(&m, "p_F", true, "W", y);
            let t2 = expr(&m, "p_F", false, "T", y);
            let loop_mass = Rational::one() - &f * &back;
            let reach_s = &s / &loop_mass;
            let reach_t = (&t + &f * &t2) / &loop_mass;
            best_s = Some(best_s.map_or(reach_s.clone(), |b| b.max(reach_s)));
            best_t = Some(best_t.map_or(reach_t.clone(), |b| b.min(reach_t)));
        }
    }
    (best_s.unwrap(), best_t.unwrap())
}

// ---------------------------------------------------------------------------
// grid oracle for interval distributions over three keys

/// Common denominator of all grid probabilities.
pub const GRID: i64 = 48;

/// Endpoints with denominator at most four.
pub fn small_endpoints() -> Vec<Rational> {
    let mut v: Vec<Rational> = vec![
        rat(0, 1),
        rat(1, 4),
        rat(1, 3),
        rat(1, 2),
        rat(2, 3),
        rat(3, 4),
        rat(1, 1),
    ];
    v.sort();
    v
}

/// Every interval over [`small_endpoints`], with every openness pattern.
pub fn small_intervals() -> Vec<ProbInterval> {
    let ends = small_endpoints();
    let mut out = Vec::new();
    for (i, a) in ends.iter().enumerate() {
        out.push(ProbInterval::point(a.clone()));
        for b in &ends[i + 1..] {
            for (lc, rc) in [(true, true), (true, false), (false, true), (false, false)] {
                out.push(ProbInterval::new(a.clone(), b.clone(), lc, rc).expect("a < b"));
            }
        }
    }
    out
}

/// Integer form of an interval on the grid: endpoints times [`GRID`].
#[derive(Clone, Copy, Debug)]
pub struct GridInterval {
    lo: i64,
    hi: i64,
    lc: bool,
    rc: bool,
}

impl GridInterval {
    pub fn of(i: &ProbInterval) -> Self {
        let scale = |q: &Rational| {
            let s = q * Rational::from_integer(GRID.into());
            assert!(s.is_integer(), "endpoint {q} is not on the grid");
            i64::try_from(s.to_integer()).unwrap()
        };
        GridInterval {
            lo: scale(i.lep()),
            hi: scale(i.rep()),
            lc: i.left_closed(),
            rc: i.right_closed(),
        }
    }

    fn contains(self, x: i64) -> bool {
        (x > self.lo || (self.lc && x == self.lo)) && (x < self.hi || (self.rc && x == self.hi))
    }
}

/// For three intervals: `masks[m]` is true when some grid assignment has
/// support exactly `m` (bit `i` set when key `i` gets positive mass).
pub fn grid_support_masks(ints: &[GridInterval; 3]) -> [bool; 8] {
    let mut masks = [false; 8];
    for a in 0..=GRID {
        if !ints[0].contains(a) {
            continue;
        }
        for b in 0..=GRID - a {
            let c = GRID - a - b;
            if ints[1].contains(b) && ints[2].contains(c) {
                let m = usize::from(a > 0) | usize::from(b > 0) << 1 | usize::from(c > 0) << 2;
                masks[m] = true;
            }
        }
    }
    masks
}

/// Some assignment exists.
pub fn grid_feasible(masks: &[bool; 8]) -> bool {
    masks.iter().any(|&m| m)
}

/// Some assignment has support inside `u`.
pub fn grid_support_within(masks: &[bool; 8], u: usize) -> bool {
    (0..8).any(|m| masks[m] && m & !u == 0)
}

/// Some assignment has support inside `u` and puts mass on `v`.
pub fn grid_positive_mass(masks: &[bool; 8], u: usize, v: usize) -> bool {
    (0..8).any(|m| masks[m] && m & !u == 0 && m & v != 0)
}

// ---------------------------------------------------------------------------
// vertex enumeration for closed rows

/// Extremum of `Σ x_i v_i` over `{x : l <= x <= u, Σ x = 1}` by visiting every
/// vertex: all coordinates but one at a bound, the last one absorbing the rest.
pub fn vertex_optimum(bounds: &[(Rational, Rational)], values: &[Rational], maximise: bool) -> Option<Rational> {
    let n = bounds.len();
    let mut best: Option<Rational> = None;
    for free in 0..n {
        for pattern in 0..(1u32 << n) {
            if pattern & (1 << free) != 0 {
                continue;
            }
            let mut x: Vec<Rational> = (0..n)
                .map(|i| {
                    if pattern & (1 << i) != 0 {
                        bounds[i].1.clone()
                    } else {
                        bounds[i].0.clone()
                    }
                })
                .collect();
            let others: Rational = (0..n).filter(|&i| i != free).map(|i| x[i].clone()).sum();
            x[free] = Rational::one() - others;
            if x[free] < bounds[free].0 || x[free] > bounds[free].1 {
                continue;
            }
            let dot: Rational = x.iter().zip(values).map(|(a, b)| a * b).sum();
            best = Some(match best {
                None => dot,
                Some(b) if maximise => b.max(dot),
                Some(b) => b.min(dot),
            });
        }
    }
    best
}

// ---------------------------------------------------------------------------
// random interval MDPs

fn quarter(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(0..=4), 4)
}

/// A random interval over quarters; closed more often than open.
pub fn random_interval(rng: &mut ChaCha8Rng) -> ProbInterval {
    let (a, b) = {
        let a = quarter(rng);
        let b = quarter(rng);
        if a <= b { (a, b) } else { (b, a) }
    };
    if a == b {
        return ProbInterval::point(a);
    }
    let lc = rng.gen_bool(0.6);
    let rc = rng.gen_bool(0.6);
    ProbInterval::new(a, b, lc, rc).expect("a < b")
}

/// A random feasible row over a subset of `0..n`.
pub fn random_row(rng: &mut ChaCha8Rng, n: usize) -> IntervalDistribution<usize> {
    loop {
        let size = rng.gen_range(1..=n.min(3));
        let mut row = IntervalDistribution::new();
        while row.len() < size {
            let key = rng.gen_range(0..n);
            if row.get(&key).is_none() {
                row.insert(key, random_interval(rng));
            }
        }
        if is_interval_distribution(&row) {
            return row;
        }
    }
}

/// A random interval MDP with at most six states and three actions per state,
/// plus a non-empty target set.
pub fn random_imdp(rng: &mut ChaCha8Rng) -> (Imdp<usize, usize>, Vec<usize>) {
    let n = rng.gen_range(1..=6);
    let choices: Vec<Vec<(usize, IntervalDistribution<usize>)>> = (0..n)
        .map(|_| {
            let actions = rng.gen_range(1..=3);
            (0..actions).map(|a| (a, random_row(rng, n))).collect()
        })
        .collect();
    let imdp = Imdp::new((0..n).collect(), choices, 0).expect("generated rows are feasible");
    let mut targets: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
    if targets.is_empty() {
        targets.push(rng.gen_range(0..n));
    }
    (imdp, targets)
}

// ---------------------------------------------------------------------------
// random B-minimal schedulers

fn region(boundaries: &BoundaryIdx, v: &Rational) -> IntervalB {
    boundaries.region_of(v).expect("clock within the largest constant")
}

/// A clock value in `b` that is at least `from`; interior for open elements.
fn pick_in(rng: &mut ChaCha8Rng, b: IntervalB, from: &Rational) -> Rational {
    match b {
        IntervalB::Point(c) => nat(c),
        IntervalB::Open(lo, hi) => {
            let lo = from.clone().max(nat(lo));
            let t = rat(rng.gen_range(1..=15), 16);
            &lo + (nat(hi) - &lo) * t
        }
    }
}

/// Moves available at `state`, as (edge, partition element) pairs reachable by
/// letting time pass.
fn candidate_moves(model: &Cdpta, partition: &[IntervalB], state: &TimedState, here: IntervalB) -> Vec<(String, IntervalB)> {
    let inv = model.invariant(&state.location).expect("declared location");
    let mut out = Vec::new();
    for edge in model.edges_from(&state.location) {
        for &b in partition {
            if b < here || !edge.guard.holds_on(b) || !inv.holds_on(b) {
                continue;
            }
            // the current open element only has room above the clock
            out.push((edge.id.clone(), b));
        }
    }
    out
}

fn explore(
    model: &Cdpta,
    partition: &[IntervalB],
    boundaries: &BoundaryIdx,
    rng: &mut ChaCha8Rng,
    table: &mut BTreeMap<Vec<BStep>, Vec<(Move, Rational)>>,
    state: &TimedState,
    key: Vec<BStep>,
    left: usize,
) {
    if left == 0 {
        return;
    }
    let moves = match table.get(&key) {
        Some(m) => m.clone(),
        None => {
            let here = region(boundaries, &state.clock);
            let mut options = candidate_moves(model, partition, state, here);
            let count = if options.len() > 1 && rng.gen_bool(0.4) { 2 } else { 1 };
            let mut chosen = Vec::new();
            for _ in 0..count {
                let (edge, b) = options.swap_remove(rng.gen_range(0..options.len()));
                let v = pick_in(rng, b, &state.clock);
                chosen.push(Move::Timed { delay_to: v, edge });
            }
            let probs = if count == 1 {
                vec![Rational::one()]
            } else {
                let p = rat(rng.gen_range(1..=7), 8);
                vec![p.clone(), Rational::one() - p]
            };
            let entry: Vec<(Move, Rational)> = chosen.into_iter().zip(probs).collect();
            table.insert(key.clone(), entry.clone());
            entry
        }
    };
    for (m, _) in moves {
        let Move::Timed { delay_to, edge } = m else { unreachable!() };
        let edge_ref = model.edge(&edge).expect("model edge");
        let chosen = region(boundaries, &delay_to);
        let dist = transition_distribution(model, state, &delay_to, edge_ref).expect("valid move");
        for next in dist.keys() {
            let mut next_key = key.clone();
            next_key.push(BStep::Choice(chosen, edge.clone()));
            next_key.push(BStep::Region(next.location.clone(), region(boundaries, &next.clock)));
            explore(model, partition, boundaries, rng, table, next, next_key, left - 1);
        }
    }
}

/// A random B-minimal table scheduler covering every history of up to
/// `horizon` moves from the initial state.
pub fn random_b_minimal_scheduler(model: &Cdpta, horizon: usize, rng: &mut ChaCha8Rng) -> TableScheduler {
    let boundaries = boundary_set(model);
    let partition = interval_partition(&boundaries);
    let start = TimedState::new(model.initial(), nat(0));
    let key = vec![BStep::Region(start.location.clone(), IntervalB::Point(0))];
    let mut table = BTreeMap::new();
    explore(model, &partition, &boundaries, rng, &mut table, &start, key, horizon);
    let mut sched = TableScheduler::new(SchedulerKind::Cdpta);
    for (k, moves) in table {
        sched.insert(k, moves).expect("generated entries are distributions");
    }
    sched
}

// ---------------------------------------------------------------------------
// scalable models

/// `n` locations with invariant `x <= 4` and two edges each: a clock-dependent
/// one that always resets, and a constant one without reset. Every location
/// sees all five constants, so the partition has nine elements.
pub fn chain_model(n: usize) -> Cdpta {
    assert!(n >= 3);
    let name = |i: usize| format!("L{}", i % n);
    let locations: BTreeMap<String, InvariantSpec> = (0..n).map(|i| (name(i), InvariantSpec::le(4))).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        let c = (i % 4) as u64;
        edges.push(ProbEdge::new(
            format!("a{i}"),
            name(i),
            ClockConstraint::new(vec![Atom::new(Relation::Ge, c)]),
            vec![
                Outcome::new(true, name(i + 1), AffineExpr::new(rat(0, 1), rat(1, 4))),
                Outcome::new(true, name(i + 2), AffineExpr::new(rat(1, 1), rat(-1, 4))),
            ],
        ));
        edges.push(ProbEdge::new(
            format!("b{i}"),
            name(i),
            ClockConstraint::new(vec![Atom::new(Relation::Le, c + 1)]),
            vec![
                Outcome::new(false, name(i + 1), AffineExpr::constant(rat(1, 2))),
                Outcome::new(false, name(i + 3), AffineExpr::constant(rat(1, 2))),
            ],
        ));
    }
    Cdpta::new(locations, edges, name(0)).expect("well-formed chain model")
}

/// Closed-form state counts of [`chain_model`]: nine regions per location, and
/// two indicators per partition element where each edge is enabled:
/// `2(2(4-c)+1) + 2(2(c+1)+1) = 24` per location.
pub fn chain_counts(n: usize) -> (usize, usize) {
    (9 * n, 24 * n)
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
