//! Reduce an interval MDP to an interval Markov chain and show that both give
//! the same values.

use cdpta::imc::{imc_to_text, reduce_to_imc};
use cdpta::imdp::Imdp;
use cdpta::interval::{IntervalDistribution, ProbInterval};
use cdpta::rational::rat;
use cdpta::solve::{solve_quant, solve_quant_imdp, Mode, SolveConfig};

fn main() {
    let closed = |a, b, c, d| ProbInterval::closed(rat(a, b), rat(c, d));
    // s0 either gambles between s1 and s2 or retries through s3
    let gamble: IntervalDistribution<usize> =
        [(1, ProbInterval::new(rat(1, 4), rat(2, 3), false, true).unwrap()), (2, ProbInterval::new(rat(1, 3), rat(3, 4), true, false).unwrap())]
            .into_iter()
            .collect();
    let retry: IntervalDistribution<usize> = [(3, closed(1, 2, 1, 1)), (2, closed(0, 1, 1, 2))].into_iter().collect();
    let stay = |s: usize| -> IntervalDistribution<usize> { [(s, closed(1, 1, 1, 1))].into_iter().collect() };
    let back: IntervalDistribution<usize> = [(0, closed(1, 2, 1, 2)), (1, closed(1, 2, 1, 2))].into_iter().collect();
    let imdp = Imdp::new(
        vec!["s0", "s1", "s2", "s3"],
        vec![
            vec![("gamble", gamble), ("retry", retry)],
            vec![("stay", stay(1))],
            vec![("stay", stay(2))],
            vec![("back", back)],
        ],
        0,
    )
    .expect("well-formed rows");
    let imc = reduce_to_imc(&imdp);
    print!("{}", imc_to_text(&imc));
    let goal = [1];
    let lifted = imc.lift_targets(&goal).unwrap();
    for mode in [Mode::Max, Mode::Min] {
        let cfg = SolveConfig::new(mode);
        let direct = solve_quant_imdp(&imdp, &goal, &cfg).unwrap().values[0];
        let reduced = solve_quant(&imc, &lifted, &cfg).unwrap().values[0];
        println!("{mode}: interval MDP {direct:.9}, interval chain {reduced:.9}");
    }
}
