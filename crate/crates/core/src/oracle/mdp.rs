use std::collections::{HashMap, VecDeque};
use std::hash::Hash;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::interval::Assignment;
use crate::rational::{to_f64, Rational};
use crate::solve::{Mode, SolveConfig};

/// A finite MDP with exact distributions. Rows are stored once and states
/// refer to their available rows by index ranges, so that systems where many
/// states share long runs of actions stay small.
#[derive(Clone, Debug)]
pub struct FiniteMdp<S, A> {
    states: Vec<S>,
    index: HashMap<S, usize>,
    rows: Vec<(A, Vec<(usize, Rational)>)>,
    available: Vec<Vec<Range<usize>>>,
    initial: usize,
}

impl<S: Clone + Eq + Hash, A: Clone> FiniteMdp<S, A> {
    pub fn new(
        states: Vec<S>,
        rows: Vec<(A, Vec<(usize, Rational)>)>,
        available: Vec<Vec<Range<usize>>>,
        initial: usize,
    ) -> Result<Self> {
        let n = states.len();
        if available.len() != n || initial >= n {
            return Err(Error::Format("inconsistent MDP dimensions".into()));
        }
        let one = Rational::from_integer(1.into());
        for (r, (_, dist)) in rows.iter().enumerate() {
            if dist.iter().any(|(t, p)| *t >= n || p < &Rational::from_integer(0.into())) {
                return Err(Error::Format(format!("row {r} has a bad entry")));
            }
            if dist.iter().map(|(_, p)| p.clone()).sum::<Rational>() != one {
                return Err(Error::Format(format!("row {r} does not sum to 1")));
            }
        }
        for (s, ranges) in available.iter().enumerate() {
            if ranges.iter().all(|r| r.is_empty()) {
                return Err(Error::Format(format!("state {s} has no action")));
            }
            if ranges.iter().any(|r| r.end > rows.len()) {
                return Err(Error::Format(format!("state {s} refers to a missing row")));
            }
        }
        let mut index = HashMap::with_capacity(n);
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::Format(format!("duplicate state at index {i}")));
            }
        }
        Ok(FiniteMdp {
            states,
            index,
            rows,
            available,
            initial,
        })
    }

    /// One private row per available action.
    pub fn from_choices(states: Vec<S>, choices: Vec<Vec<(A, Vec<(usize, Rational)>)>>, initial: usize) -> Result<Self> {
        let mut rows = Vec::new();
        let mut available = Vec::with_capacity(choices.len());
        for list in choices {
            let start = rows.len();
            rows.extend(list);
            available.push(vec![start..rows.len()]);
        }
        Self::new(states, rows, available, initial)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn index_of(&self, s: &S) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Available actions of `s` with their distributions.
    pub fn choices(&self, s: usize) -> impl Iterator<Item = (&A, &[(usize, Rational)])> {
        self.available[s]
            .iter()
            .flat_map(|r| self.rows[r.clone()].iter())
            .map(|(a, d)| (a, d.as_slice()))
    }

    /// The distribution of a choice as an assignment over successor states.
    pub fn assignment(&self, row: usize) -> Assignment<usize> {
        self.rows[row].1.iter().cloned().collect()
    }
}

/// Range maximum/minimum queries over a fixed array.
struct SparseTable {
    levels: Vec<Vec<f64>>,
    mode: Mode,
}

impl SparseTable {
    fn new(values: &[f64], mode: Mode) -> Self {
        let pick = |a: f64, b: f64| match mode {
            Mode::Max => a.max(b),
            Mode::Min => a.min(b),
        };
        let mut levels = vec![values.to_vec()];
        let mut width = 1;
        while 2 * width <= values.len() {
            let prev = levels.last().expect("non-empty");
            let next: Vec<f64> = (0..=values.len() - 2 * width).map(|i| pick(prev[i], prev[i + width])).collect();
            levels.push(next);
            width *= 2;
        }
        SparseTable { levels, mode }
    }

    fn query(&self, r: &Range<usize>) -> f64 {
        let len = r.end - r.start;
        let level = (usize::BITS - 1 - len.leading_zeros()) as usize;
        let a = self.levels[level][r.start];
        let b = self.levels[level][r.end - (1 << level)];
        match self.mode {
            Mode::Max => a.max(b),
            Mode::Min => a.min(b),
        }
    }
}

/// Prefix counts for "does any row in the range satisfy ...".
fn any_in(prefix: &[usize], r: &Range<usize>) -> bool {
    prefix[r.end] > prefix[r.start]
}

fn prefix_counts(flags: impl Iterator<Item = bool>) -> Vec<usize> {
    let mut out = vec![0];
    for f in flags {
        out.push(out.last().expect("non-empty") + usize::from(f));
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct MdpValues {
    pub values: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl<S: Clone + Eq + Hash, A: Clone> FiniteMdp<S, A> {
    fn has_row(&self, s: usize, flags: &[usize]) -> bool {
        self.available[s].iter().any(|r| !r.is_empty() && any_in(flags, r))
    }

    /// States that can reach `goal` with positive probability, moving only through `through`.
    fn reach(&self, goal: &[bool], through: impl Fn(usize) -> bool) -> Vec<bool> {
        let n = self.num_states();
        let mut row_pred: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (r, (_, dist)) in self.rows.iter().enumerate() {
            for (t, p) in dist {
                if p > &Rational::from_integer(0.into()) {
                    row_pred[*t].push(r);
                }
            }
        }
        let mut owners: Vec<Vec<usize>> = vec![Vec::new(); self.rows.len()];
        for (s, ranges) in self.available.iter().enumerate() {
            for range in ranges {
                for r in range.clone() {
                    owners[r].push(s);
                }
            }
        }
        let mut seen = goal.to_vec();
        let mut row_seen = vec![false; self.rows.len()];
        let mut queue: VecDeque<usize> = (0..n).filter(|&s| goal[s]).collect();
        while let Some(t) = queue.pop_front() {
            for &r in &row_pred[t] {
                if std::mem::replace(&mut row_seen[r], true) {
                    continue;
                }
                for &s in &owners[r] {
                    if !seen[s] && through(s) {
                        seen[s] = true;
                        queue.push_back(s);
                    }
                }
            }
        }
        seen
    }

    fn all_inside(&self, r: usize, inside: &[bool]) -> bool {
        self.rows[r].1.iter().all(|(t, _)| inside[*t])
    }

    /// Largest set of non-targets where some action keeps the run inside.
    fn avoid_forever(&self, target: &[bool]) -> Vec<bool> {
        let mut u: Vec<bool> = target.iter().map(|t| !t).collect();
        loop {
            let ok = prefix_counts((0..self.rows.len()).map(|r| self.all_inside(r, &u)));
            let mut changed = false;
            for s in 0..self.num_states() {
                if u[s] && !self.has_row(s, &ok) {
                    u[s] = false;
                    changed = true;
                }
            }
            if !changed {
                return u;
            }
        }
    }

    /// States with a scheduler reaching the targets almost surely.
    fn reach_surely(&self, target: &[bool]) -> Vec<bool> {
        let n = self.num_states();
        let mut u = vec![true; n];
        loop {
            let mut v: Vec<bool> = (0..n).map(|s| target[s]).collect();
            loop {
                let ok = prefix_counts((0..self.rows.len()).map(|r| {
                    self.all_inside(r, &u) && self.rows[r].1.iter().any(|(t, p)| v[*t] && p > &Rational::from_integer(0.into()))
                }));
                let mut grown = false;
                for s in 0..n {
                    if u[s] && !v[s] && self.has_row(s, &ok) {
                        v[s] = true;
                        grown = true;
                    }
                }
                if !grown {
                    break;
                }
            }
            if v == u {
                return u;
            }
            u = v;
        }
    }
}

/// Extremal reachability probabilities by value iteration from below, after
/// fixing the states of value 0 and 1 by graph analysis.
pub fn mdp_reach<S: Clone + Eq + Hash, A: Clone>(
    mdp: &FiniteMdp<S, A>,
    targets: &[usize],
    cfg: &SolveConfig,
) -> Result<MdpValues> {
    let n = mdp.num_states();
    let mut target = vec![false; n];
    for &t in targets {
        if t >= n {
            return Err(Error::TargetUnknownState(t.to_string()));
        }
        target[t] = true;
    }
    let (zero, one) = match cfg.mode {
        Mode::Max => {
            let can = mdp.reach(&target, |_| true);
            (can.iter().map(|c| !c).collect::<Vec<_>>(), mdp.reach_surely(&target))
        }
        Mode::Min => {
            let zero = mdp.avoid_forever(&target);
            let leak = mdp.reach(&zero, |s| !target[s]);
            let one: Vec<bool> = (0..n).map(|s| target[s] || !leak[s]).collect();
            (zero, one)
        }
    };
    let rows: Vec<Vec<(usize, f64)>> = mdp
        .rows
        .iter()
        .map(|(_, d)| d.iter().map(|(t, p)| (*t, to_f64(p))).collect())
        .collect();
    let fixed: Vec<bool> = (0..n).map(|s| target[s] || zero[s] || one[s]).collect();
    let mut x: Vec<f64> = (0..n).map(|s| if target[s] || one[s] { 1.0 } else { 0.0 }).collect();
    let mut row_values = vec![0.0; rows.len()];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iterations {
        iterations += 1;
        for (r, dist) in rows.iter().enumerate() {
            row_values[r] = dist.iter().map(|(t, p)| p * x[*t]).sum();
        }
        let table = SparseTable::new(&row_values, cfg.mode);
        let mut delta: f64 = 0.0;
        let mut next = x.clone();
        for s in 0..n {
            if fixed[s] {
                continue;
            }
            let best = mdp.available[s]
                .iter()
                .filter(|r| !r.is_empty())
                .map(|r| table.query(r))
                .reduce(|a, b| match cfg.mode {
                    Mode::Max => a.max(b),
                    Mode::Min => a.min(b),
                })
                .expect("every state has an action")
                .clamp(0.0, 1.0);
            delta = delta.max((best - x[s]).abs());
            next[s] = best;
        }
        x = next;
        if delta < cfg.epsilon {
            converged = true;
            break;
        }
    }
    Ok(MdpValues {
        values: x,
        iterations,
        converged,
    })
}
