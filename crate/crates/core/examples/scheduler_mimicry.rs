//! A table scheduler of the model and its interval MDP counterpart reach the
//! target with exactly the same probability.

use cdpta::dsl::parse;
use cdpta::imdp::{build_imdp, region_targets, IntervalB};
use cdpta::oracle::{bounded_reach_cdpta, bounded_reach_imdp, mimic_scheduler, BStep, Move, SchedulerKind, TableScheduler};
use cdpta::rational::{fmt_rational, rat};

fn main() {
    let model = parse(include_str!("../fixtures/task.cdpta")).expect("fixture parses");
    let imdp = build_imdp(&model).unwrap();
    let w0 = BStep::Region("W".into(), IntervalB::Point(0));
    let after_w = BStep::Choice(IntervalB::Open(1, 3), "p_W".into());
    let timed = |v, e: &str| Move::Timed { delay_to: v, edge: e.into() };
    // at most one clock value per (edge, partition element) after each B-path
    let mut sched = TableScheduler::new(SchedulerKind::Cdpta);
    sched.insert(vec![w0.clone()], vec![(timed(rat(5, 2), "p_W"), rat(1, 1))]).unwrap();
    for (loc, edge, v) in [("S", "s_loop", rat(3, 1)), ("T", "t_loop", rat(5, 1)), ("F", "p_F", rat(19, 4))] {
        let key = vec![w0.clone(), after_w.clone(), BStep::Region(loc.into(), IntervalB::Open(1, 3))];
        sched.insert(key, vec![(timed(v, edge), rat(1, 1))]).unwrap();
    }
    let mimic = mimic_scheduler(&sched, &imdp).unwrap();
    print!("{}", sched.to_text());
    print!("{}", mimic.to_text());
    for target in ["S", "T"] {
        let left = bounded_reach_cdpta(&model, &sched, 2, &[target.to_string()]).unwrap();
        let right = bounded_reach_imdp(&imdp, &mimic, 2, &region_targets(&imdp, [target])).unwrap();
        println!("reach {target} within 2 moves: {} (model) {} (interval MDP)", fmt_rational(&left), fmt_rational(&right));
    }
}
