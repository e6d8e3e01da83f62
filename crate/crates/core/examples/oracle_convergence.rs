//! Discretize the clock on finer and finer grids and watch the finite MDP
//! values approach the interval value from below.

use cdpta::dsl::parse;
use cdpta::oracle::{discretize, mdp_reach, DiscretizationLevel};
use cdpta::solve::{solve_query, Mode, Query, SolveConfig};

fn main() {
    let model = parse(include_str!("../fixtures/task.cdpta")).expect("fixture parses");
    let exact = solve_query(&model, &["S".into()], &Query::Quant { mode: Mode::Max, threshold: None }, 1e-9)
        .unwrap()
        .value
        .unwrap();
    println!("interval value {exact:.9}");
    for k in 1..=10 {
        let mdp = discretize(&model, DiscretizationLevel::new(k).unwrap()).unwrap();
        let goal: Vec<usize> = (0..mdp.num_states()).filter(|&i| mdp.states()[i].location == "S").collect();
        let v = mdp_reach(&mdp, &goal, &SolveConfig::new(Mode::Max)).unwrap().values[mdp.initial()];
        println!("step 2^-{k:<2} {:>6} states  {v:.9}  gap {:.2e}", mdp.num_states(), exact - v);
    }
}
