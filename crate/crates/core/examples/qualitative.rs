//! The four qualitative questions on the task model. With open probability
//! intervals the success location can be made likely but never certain.

use cdpta::dsl::parse;
use cdpta::solve::{solve_query, Mode, QualMode, Query};

fn main() {
    let model = parse(include_str!("../fixtures/task.cdpta")).expect("fixture parses");
    for target in ["S", "T"] {
        let targets = [target.to_string()];
        let max = solve_query(&model, &targets, &Query::Quant { mode: Mode::Max, threshold: None }, 1e-9).unwrap();
        print!("reach {target}: max {:.6}", max.value.unwrap());
        for mode in QualMode::ALL {
            let answer = solve_query(&model, &targets, &Query::Qual(mode), 1e-9).unwrap();
            print!("  {mode}={}", answer.holds.unwrap());
        }
        println!();
    }
}
