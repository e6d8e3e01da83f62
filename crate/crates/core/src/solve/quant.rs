use std::collections::BTreeSet;

use super::inner::FastRow;
use super::qual::System;
use super::{Mode, QuantResult, SolveConfig};

/// Robust value iteration on the closed system, from below, with the states of
/// value exactly 0 and 1 fixed up front. `observe` sees every iterate.
pub(crate) fn value_iteration(
    system: &System,
    target: &[bool],
    cfg: &SolveConfig,
    mut observe: impl FnMut(usize, &[f64]),
) -> QuantResult {
    let n = system.len();
    let closed = system.closed();
    let (zero, one) = match cfg.mode {
        Mode::Max => (system.forall0(target), closed.exists1(target)),
        Mode::Min => (closed.exists0(target), system.forall1(target)),
    };
    let fixed: Vec<bool> = (0..n).map(|s| target[s] || zero[s] || one[s]).collect();
    let rows: Vec<Vec<FastRow>> = closed
        .choices
        .iter()
        .enumerate()
        .map(|(s, rows)| if fixed[s] { Vec::new() } else { rows.iter().map(FastRow::new).collect() })
        .collect();

    let mut x: Vec<f64> = (0..n).map(|s| if target[s] || one[s] { 1.0 } else { 0.0 }).collect();
    let mut next = x.clone();
    let mut scratch = Vec::new();
    observe(0, &x);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let mut delta: f64 = 0.0;
        for s in 0..n {
            if fixed[s] {
                continue;
            }
            let values = rows[s].iter().map(|r| r.eval(&x, cfg.mode, &mut scratch));
            let v = match cfg.mode {
                Mode::Max => values.fold(f64::NEG_INFINITY, f64::max),
                Mode::Min => values.fold(f64::INFINITY, f64::min),
            }
            .clamp(0.0, 1.0);
            delta = delta.max((v - x[s]).abs());
            next[s] = v;
        }
        std::mem::swap(&mut x, &mut next);
        observe(iterations, &x);
        if delta < cfg.epsilon {
            converged = true;
            break;
        }
    }
    let collect = |flags: &[bool]| -> BTreeSet<usize> { (0..n).filter(|&s| flags[s]).collect() };
    let exact_one: Vec<bool> = (0..n).map(|s| target[s] || one[s]).collect();
    QuantResult {
        values: x,
        iterations,
        converged,
        exact_zero: collect(&zero),
        exact_one: collect(&exact_one),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::{IntervalDistribution, ProbInterval};
    use crate::rational::rat;
    use crate::solve::Mode;

    /// 0 loops with [1/4,1/2], reaches the target 1 with [1/4,3/4], or falls
    /// into the sink 2 with [0,1/2].
    fn leaky_loop() -> System {
        let row = |e: &[(usize, ProbInterval)]| -> IntervalDistribution<usize> { e.iter().cloned().collect() };
        let one = ProbInterval::point(rat(1, 1));
        System {
            choices: vec![
                vec![row(&[
                    (0, ProbInterval::closed(rat(1, 4), rat(1, 2))),
                    (1, ProbInterval::closed(rat(1, 4), rat(3, 4))),
                    (2, ProbInterval::closed(rat(0, 1), rat(1, 2))),
                ])],
                vec![row(&[(1, one.clone())])],
                vec![row(&[(2, one)])],
            ],
        }
    }

    #[test]
    fn extremal_values_of_a_loop() {
        let sys = leaky_loop();
        let target = [false, true, false];
        let max = value_iteration(&sys, &target, &SolveConfig::new(Mode::Max), |_, _| {});
        // best: 3/4 to the target, 1/4 back
        assert!((max.values[0] - 1.0).abs() < 1e-8);
        let min = value_iteration(&sys, &target, &SolveConfig::new(Mode::Min), |_, _| {});
        // worst: 1/4 to the target, 1/2 to the sink, 1/4 back: v = 1/4 + v/4
        assert!((min.values[0] - 1.0 / 3.0).abs() < 1e-8);
        assert!(max.converged && min.converged);
        assert!(min.exact_zero.contains(&2) && min.exact_one.contains(&1));
    }

    #[test]
    fn iterates_never_decrease() {
        let sys = leaky_loop();
        let mut last = vec![0.0; 3];
        value_iteration(&sys, &[false, true, false], &SolveConfig::new(Mode::Min), |_, x| {
            assert!(x.iter().zip(&last).all(|(a, b)| a >= b));
            last = x.to_vec();
        });
    }
}
