//! Maximal and minimal reachability probabilities of the task model, with a
//! threshold check.

use cdpta::dsl::parse;
use cdpta::solve::{solve_query, Mode, Query};

fn main() {
    let model = parse(include_str!("../fixtures/task.cdpta")).expect("fixture parses");
    let queries = [
        ("S", Mode::Max, Some(">= 4/5")),
        ("T", Mode::Min, None),
        ("T", Mode::Max, Some("> 99/100")),
    ];
    for (target, mode, threshold) in queries {
        let query = Query::Quant {
            mode,
            threshold: threshold.map(|t| t.parse().expect("valid threshold")),
        };
        let answer = solve_query(&model, &[target.to_string()], &query, 1e-9).expect("valid query");
        let s = &answer.stats;
        print!("P{mode}(reach {target}) = {:.9}", answer.value.unwrap());
        if let (Some(t), Some(h)) = (threshold, answer.holds) {
            print!("  [{t}: {h}{}]", if answer.undecided { ", within tolerance" } else { "" });
        }
        println!("  ({} iterations, {} chain states)", s.iterations, s.imc_states);
    }
}
