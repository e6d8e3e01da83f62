//! Qualitative reachability on interval systems whose states offer one or
//! more interval rows. An interval chain is the case of one row per state.

use std::collections::VecDeque;

use num_traits::{One, Zero};

use crate::interval::{close_intervals, positive_mass_feasible, support_feasible, IntervalDistribution};
use crate::rational::Rational;

#[derive(Clone, Debug)]
pub(crate) struct System {
    pub choices: Vec<Vec<IntervalDistribution<usize>>>,
}

impl System {
    pub fn closed(&self) -> System {
        System {
            choices: self
                .choices
                .iter()
                .map(|rows| rows.iter().map(close_intervals).collect())
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    /// `t` can receive positive probability from `s` under some row and assignment.
    fn positive_edges(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.len()];
        for (s, rows) in self.choices.iter().enumerate() {
            for row in rows {
                let sum_lep: Rational = row.iter().map(|(_, i)| i.lep().clone()).sum();
                let free = sum_lep < Rational::one();
                for (&t, i) in row.iter() {
                    if i.rep() > &Rational::zero() && (free || i.lep() > &Rational::zero()) {
                        succ[s].push(t);
                    }
                }
            }
            succ[s].sort_unstable();
            succ[s].dedup();
        }
        succ
    }

    /// States that reach `goal` along positive edges, visiting only states in `through`
    /// before the goal.
    fn backward_reach(&self, goal: &[bool], through: impl Fn(usize) -> bool) -> Vec<bool> {
        let succ = self.positive_edges();
        let mut pred = vec![Vec::new(); self.len()];
        for (s, ts) in succ.iter().enumerate() {
            for &t in ts {
                pred[t].push(s);
            }
        }
        let mut seen = goal.to_vec();
        let mut queue: VecDeque<usize> = (0..self.len()).filter(|&s| goal[s]).collect();
        while let Some(t) = queue.pop_front() {
            for &s in &pred[t] {
                if !seen[s] && through(s) {
                    seen[s] = true;
                    queue.push_back(s);
                }
            }
        }
        seen
    }

    /// No scheduler reaches a target with positive probability.
    pub fn forall0(&self, target: &[bool]) -> Vec<bool> {
        self.backward_reach(target, |_| true).into_iter().map(|r| !r).collect()
    }

    /// Some scheduler avoids the targets forever: the largest non-target set
    /// in which every state has a row that can stay inside the set.
    pub fn exists0(&self, target: &[bool]) -> Vec<bool> {
        let mut u: Vec<bool> = target.iter().map(|t| !t).collect();
        loop {
            let mut changed = false;
            for s in 0..self.len() {
                if u[s] && !self.choices[s].iter().any(|row| support_feasible(row, |&t| u[t])) {
                    u[s] = false;
                    changed = true;
                }
            }
            if !changed {
                return u;
            }
        }
    }

    /// Some scheduler reaches the targets almost surely.
    pub fn exists1(&self, target: &[bool]) -> Vec<bool> {
        let n = self.len();
        let mut u = vec![true; n];
        loop {
            let mut v: Vec<bool> = (0..n).map(|s| target[s] && u[s]).collect();
            loop {
                let mut grown = false;
                for s in 0..n {
                    if !v[s]
                        && u[s]
                        && self.choices[s]
                            .iter()
                            .any(|row| positive_mass_feasible(row, |&t| u[t], |&t| v[t] || target[t]))
                    {
                        v[s] = true;
                        grown = true;
                    }
                }
                if !grown {
                    break;
                }
            }
            let next: Vec<bool> = (0..n).map(|s| target[s] || v[s]).collect();
            if next == u {
                return u;
            }
            u = next;
        }
    }

    /// Every scheduler reaches the targets almost surely. A scheduler misses
    /// with positive probability exactly when it can get, avoiding targets, to
    /// a state from which the closed system can avoid them forever; from such
    /// a state the open rows allow avoidance with probability arbitrarily close
    /// to one by shrinking the leak at each step.
    pub fn forall1(&self, target: &[bool]) -> Vec<bool> {
        let escape = self.closed().exists0(target);
        let reach = self.backward_reach(&escape, |s| !target[s]);
        (0..self.len()).map(|s| target[s] || !reach[s]).collect()
    }
}
