use std::cmp::Ordering;

use num_traits::{One, Zero};

use super::Mode;
use crate::interval::{Assignment, IntervalDistribution};
use crate::rational::{to_f64, Rational};

fn order(mode: Mode, a: (f64, usize), b: (f64, usize)) -> Ordering {
    let by_value = match mode {
        Mode::Max => b.0.total_cmp(&a.0),
        Mode::Min => a.0.total_cmp(&b.0),
    };
    by_value.then(a.1.cmp(&b.1))
}

/// Optimum of `Σ α(t)·values(t)` over the assignments of a closed row, with a
/// witnessing assignment. Greedy: every entry starts at its left endpoint and
/// the remaining mass goes to the best entries first, up to their right
/// endpoints. Ties are broken by key order.
pub fn extremal_value<K: Ord + Clone>(
    row: &IntervalDistribution<K>,
    values: impl Fn(&K) -> f64,
    mode: Mode,
) -> (f64, Assignment<K>) {
    let entries: Vec<(&K, _, f64)> = row.iter().map(|(k, i)| (k, i, values(k))).collect();
    let mut order_idx: Vec<usize> = (0..entries.len()).collect();
    order_idx.sort_by(|&a, &b| order(mode, (entries[a].2, a), (entries[b].2, b)));

    let mut alpha: Vec<Rational> = entries.iter().map(|(_, i, _)| i.lep().clone()).collect();
    let mut budget = Rational::one() - alpha.iter().cloned().sum::<Rational>();
    for &j in &order_idx {
        if budget <= Rational::zero() {
            break;
        }
        let room = entries[j].1.rep() - &alpha[j];
        let add = room.min(budget.clone());
        alpha[j] += &add;
        budget -= add;
    }
    let value = entries.iter().zip(&alpha).map(|((_, _, v), a)| to_f64(a) * v).sum();
    let assignment = entries.iter().zip(alpha).map(|((k, _, _), a)| ((*k).clone(), a)).collect();
    (value, assignment)
}

/// A closed row in floating point, ready for repeated greedy evaluation.
#[derive(Clone, Debug)]
pub(crate) struct FastRow {
    pub targets: Vec<usize>,
    pub lep: Vec<f64>,
    pub rep: Vec<f64>,
    base: f64,
}

impl FastRow {
    pub fn new(row: &IntervalDistribution<usize>) -> Self {
        let targets: Vec<usize> = row.keys().copied().collect();
        let lep: Vec<f64> = row.iter().map(|(_, i)| to_f64(i.lep())).collect();
        let rep: Vec<f64> = row.iter().map(|(_, i)| to_f64(i.rep())).collect();
        let sum_lep: Rational = row.iter().map(|(_, i)| i.lep().clone()).sum();
        let base = to_f64(&(Rational::one() - sum_lep));
        FastRow { targets, lep, rep, base }
    }

    /// Greedy optimum against `values`; `scratch` is reused between calls.
    pub fn eval(&self, values: &[f64], mode: Mode, scratch: &mut Vec<usize>) -> f64 {
        let n = self.targets.len();
        let mut acc: f64 = (0..n).map(|j| self.lep[j] * values[self.targets[j]]).sum();
        let mut budget = self.base;
        if budget <= 0.0 {
            return acc;
        }
        scratch.clear();
        scratch.extend(0..n);
        scratch.sort_by(|&a, &b| {
            order(
                mode,
                (values[self.targets[a]], self.targets[a]),
                (values[self.targets[b]], self.targets[b]),
            )
        });
        for &j in scratch.iter() {
            let add = (self.rep[j] - self.lep[j]).min(budget);
            acc += add * values[self.targets[j]];
            budget -= add;
            if budget <= 0.0 {
                break;
            }
        }
        acc
    }
}
