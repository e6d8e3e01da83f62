//! Build the interval MDP of the task model and write it as DOT.
//!
//! cargo run --example build_imdp > imdp.dot

use cdpta::dsl::parse;
use cdpta::imdp::{build_imdp, imdp_to_dot, size_bounds, state_counts};

fn main() {
    let model = parse(include_str!("../fixtures/task.cdpta")).expect("fixture parses");
    let imdp = build_imdp(&model).expect("fixture satisfies the construction assumptions");
    let (regions, indicators) = state_counts(&imdp);
    let (max_regions, max_indicators) = size_bounds(&model);
    eprintln!("{regions} regions (bound {max_regions}), {indicators} endpoint indicators (bound {max_indicators})");
    eprintln!("{} choices, {} transitions", imdp.num_choices(), imdp.num_transitions());
    for (action, row) in imdp.choices(imdp.initial()) {
        eprintln!("initial action {action}: {} successors", row.len());
    }
    print!("{}", imdp_to_dot(&imdp, &model));
}
