use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::interval::{is_interval_distribution, IntervalDistribution};

/// A finite interval MDP over labelled states. Rows are keyed by state index.
#[derive(Clone, Debug)]
pub struct Imdp<S, A> {
    states: Vec<S>,
    index: HashMap<S, usize>,
    actions: Vec<Vec<A>>,
    rows: Vec<Vec<IntervalDistribution<usize>>>,
    initial: usize,
}

impl<S: Clone + Eq + Hash, A: Clone> Imdp<S, A> {
    /// `choices[s]` lists the available actions of state `s` with their rows.
    pub fn new(
        states: Vec<S>,
        choices: Vec<Vec<(A, IntervalDistribution<usize>)>>,
        initial: usize,
    ) -> Result<Self> {
        if states.len() != choices.len() {
            return Err(Error::Format("one action list per state is required".into()));
        }
        if initial >= states.len() {
            return Err(Error::Format(format!("initial state {initial} out of range")));
        }
        let mut index = HashMap::with_capacity(states.len());
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::Format(format!("duplicate state at index {i}")));
            }
        }
        let mut actions = Vec::with_capacity(states.len());
        let mut rows = Vec::with_capacity(states.len());
        for (s, list) in choices.into_iter().enumerate() {
            if list.is_empty() {
                return Err(Error::Format(format!("state {s} has no available action")));
            }
            let (acts, ds): (Vec<A>, Vec<_>) = list.into_iter().unzip();
            for d in &ds {
                if d.keys().any(|&t| t >= states.len()) {
                    return Err(Error::Format(format!("row of state {s} targets an unknown state")));
                }
                if !is_interval_distribution(d) {
                    return Err(Error::Format(format!("row of state {s} is not an interval distribution")));
                }
            }
            actions.push(acts);
            rows.push(ds);
        }
        Ok(Imdp {
            states,
            index,
            actions,
            rows,
            initial,
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &S {
        &self.states[i]
    }

    pub fn index_of(&self, s: &S) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn actions(&self, s: usize) -> &[A] {
        &self.actions[s]
    }

    pub fn rows(&self, s: usize) -> &[IntervalDistribution<usize>] {
        &self.rows[s]
    }

    pub fn choices(&self, s: usize) -> impl Iterator<Item = (&A, &IntervalDistribution<usize>)> {
        self.actions[s].iter().zip(self.rows[s].iter())
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn num_choices(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn num_transitions(&self) -> usize {
        self.rows.iter().flatten().map(IntervalDistribution::len).sum()
    }
}
