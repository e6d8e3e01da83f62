//! Acceptance run: one PASS/FAIL line per criterion. Runs sequentially so the
//! wall-time bounds are not skewed by other tests.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cdpta::imc::reduce_to_imc;
use cdpta::imdp::{
    build_imdp, endpoint_target_prob, region_targets, size_bounds, state_counts, ImdpAction, ImdpState,
    IntervalB, Side,
};
use cdpta::interval::{
    is_assignment, is_interval_distribution, positive_mass_feasible, support_feasible, IntervalDistribution,
    ProbInterval,
};
use cdpta::model::{check_initialised, validate, verify_witness, Initialisation, ViolationCode};
use cdpta::oracle::{bounded_reach_cdpta, bounded_reach_imdp, discretize, mdp_reach, mimic_scheduler, DiscretizationLevel};
use cdpta::rational::{rat, to_f64, Rational};
use cdpta::solve::{
    extremal_value, solve_qual, solve_qual_imdp, solve_quant, solve_quant_imdp, solve_query, Mode, QualMode,
    Query, SolveConfig,
};
use common::*;
use num_traits::{One, Zero};
use rand::Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn targets(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn task_end_to_end() -> Outcome {
    let model = task();
    let (p, q) = task_analytic();
    check(p == rat(3, 4) + &p / rat(16, 1), format!("analytic max {p} is not the fixed point"))?;
    check(q == rat(3, 16) + &q / rat(16, 1), format!("analytic min {q} is not the fixed point"))?;
    let mut details = Vec::new();
    for (name, mode, expected) in [("S", Mode::Max, p), ("T", Mode::Min, q)] {
        let start = Instant::now();
        let query = Query::Quant { mode, threshold: None };
        let answer = solve_query(&model, &targets(&[name]), &query, 1e-9).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        let value = answer.value.expect("quantitative");
        let want = to_f64(&expected);
        check((value - want).abs() < 1e-6, format!("{mode} reach {name} = {value}, expected {want}"))?;
        check(elapsed < Duration::from_secs(1), format!("{mode} reach {name} took {elapsed:?}"))?;
        details.push(format!("{mode} {name} = {value:.9} ({} ms)", elapsed.as_millis()));
    }
    Ok(details.join(", "))
}

fn open_interval_gap() -> Outcome {
    let model = task();
    let t = targets(&["T"]);
    let quant = solve_query(&model, &t, &Query::Quant { mode: Mode::Max, threshold: None }, 1e-9)
        .map_err(|e| e.to_string())?;
    let value = quant.value.expect("quantitative");
    check((value - 1.0).abs() < 1e-6, format!("max reach T = {value}, expected 1"))?;
    let mut verdicts = Vec::new();
    for mode in [QualMode::Exists1, QualMode::Forall0, QualMode::Exists0] {
        let a = solve_query(&model, &t, &Query::Qual(mode), 1e-9).map_err(|e| e.to_string())?;
        check(a.holds == Some(false), format!("{mode} T holds at the initial state"))?;
        verdicts.push(format!("{mode}=false"));
    }
    Ok(format!("max T = {value:.9}, {}", verdicts.join(" ")))
}

fn construction_fidelity() -> Outcome {
    let model = task();
    let imdp = build_imdp(&model).map_err(|e| e.to_string())?;
    let open13 = IntervalB::Open(1, 3);
    let open45 = IntervalB::Open(4, 5);
    let zero = IntervalB::Point(0);
    let region = |l: &str, b| ImdpState::region(l, b);
    let ind = |b, e: &str, s| ImdpState::endpoint(b, e, s);

    // reachable part from the initial state, with S and T regions as sinks
    let mut seen = BTreeSet::new();
    let mut stack = vec![imdp.initial()];
    while let Some(s) = stack.pop() {
        if !seen.insert(s) {
            continue;
        }
        if matches!(imdp.state(s).location(), Some("S" | "T")) {
            continue;
        }
        for row in imdp.rows(s) {
            stack.extend(row.keys().copied());
        }
    }
    let got: BTreeSet<ImdpState> = seen.iter().map(|&i| imdp.state(i).clone()).collect();
    let expected: BTreeSet<ImdpState> = [
        region("W", zero),
        ind(open13, "p_W", Side::Le),
        ind(open13, "p_W", Side::Re),
        region("S", open13),
        region("T", open13),
        region("F", open13),
        ind(open45, "p_F", Side::Le),
        ind(open45, "p_F", Side::Re),
        region("T", open45),
    ]
    .into_iter()
    .collect();
    check(got == expected, format!("reachable states differ: {got:?}"))?;

    let idx = |s: &ImdpState| imdp.index_of(s).ok_or(format!("missing {s}"));
    let actions_of = |s: &ImdpState| -> Result<Vec<ImdpAction>, String> { Ok(imdp.actions(idx(s)?).to_vec()) };
    let delay = |b, e: &str| ImdpAction::Delay { interval: b, edge: e.into() };
    check(actions_of(&region("W", zero))? == vec![delay(open13, "p_W")], "actions of (W,[0,0])")?;
    check(actions_of(&region("F", open13))? == vec![delay(open45, "p_F")], "actions of (F,(1,3))")?;

    let open01 = ProbInterval::open(Rational::zero(), Rational::one());
    for (from, b, e) in [(region("W", zero), open13, "p_W"), (region("F", open13), open45, "p_F")] {
        let row = &imdp.rows(idx(&from)?)[0];
        let mut want = IntervalDistribution::new();
        want.insert(idx(&ind(b, e, Side::Le))?, open01.clone());
        want.insert(idx(&ind(b, e, Side::Re))?, open01.clone());
        check(row == &want, format!("row of {from} is not (0,1) on both endpoints"))?;
    }

    // singleton tau probabilities; zero entries are absent from the rows
    let tau = [
        (ind(open13, "p_W", Side::Le), region("S", open13), rat(0, 1)),
        (ind(open13, "p_W", Side::Le), region("T", open13), rat(1, 2)),
        (ind(open13, "p_W", Side::Le), region("F", open13), rat(1, 2)),
        (ind(open13, "p_W", Side::Re), region("S", open13), rat(3, 4)),
        (ind(open13, "p_W", Side::Re), region("T", open13), rat(1, 8)),
        (ind(open13, "p_W", Side::Re), region("F", open13), rat(1, 8)),
        (ind(open45, "p_F", Side::Le), region("W", zero), rat(0, 1)),
        (ind(open45, "p_F", Side::Le), region("T", open45), rat(1, 1)),
        (ind(open45, "p_F", Side::Re), region("W", zero), rat(1, 2)),
        (ind(open45, "p_F", Side::Re), region("T", open45), rat(1, 2)),
    ];
    for (from, to, p) in &tau {
        let i = idx(from)?;
        check(imdp.actions(i) == [ImdpAction::Tau], format!("{from} has a non-tau action"))?;
        let row = &imdp.rows(i)[0];
        let got = row.get(&idx(to)?);
        let ok = match got {
            Some(iv) => iv.is_point() && iv.lep() == p && !p.is_zero(),
            None => p.is_zero(),
        };
        check(ok, format!("{from} -> {to}: {got:?}, expected {p}"))?;
        let ImdpState::Endpoint { interval, edge, side } = from else { unreachable!() };
        let ImdpState::Region { location, interval: target } = to else { unreachable!() };
        let direct = endpoint_target_prob(*interval, model.edge(edge).unwrap(), *side, location, *target);
        check(&direct == p, format!("endpoint_target_prob {from} -> {to} = {direct}"))?;
    }
    for (from, _, _) in &tau {
        let row = &imdp.rows(idx(from)?)[0];
        let total: Rational = row.iter().map(|(_, i)| i.lep().clone()).sum();
        check(total.is_one(), format!("{from} row does not sum to 1"))?;
    }
    Ok(format!("{} reachable states, {} tau probabilities", expected.len(), tau.len()))
}

fn oracle_convergence() -> Outcome {
    let start = Instant::now();
    let model = task();
    let solver = solve_query(&model, &targets(&["S"]), &Query::Quant { mode: Mode::Max, threshold: None }, 1e-9)
        .map_err(|e| e.to_string())?
        .value
        .expect("quantitative");
    let cfg = SolveConfig::new(Mode::Max);
    let mut previous = f64::NEG_INFINITY;
    let mut last = 0.0;
    let mut trail = Vec::new();
    for k in 4..=10 {
        let mdp = discretize(&model, DiscretizationLevel::new(k).unwrap()).map_err(|e| e.to_string())?;
        let goal: Vec<usize> = (0..mdp.num_states()).filter(|&i| mdp.states()[i].location == "S").collect();
        let v = mdp_reach(&mdp, &goal, &cfg).map_err(|e| e.to_string())?.values[mdp.initial()];
        check(v >= previous - 1e-12, format!("k={k}: {v} < previous {previous}"))?;
        check(v <= solver + 1e-9, format!("k={k}: {v} exceeds solver value {solver}"))?;
        trail.push(format!("{v:.6}"));
        previous = v;
        last = v;
    }
    let gap = solver - last;
    check(gap < 0.01, format!("k=10 gap {gap}"))?;
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(30), format!("took {elapsed:?}"))?;
    Ok(format!("values [{}], gap {gap:.2e}, {:.1} s", trail.join(" "), elapsed.as_secs_f64()))
}

fn reduction_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(0x5eed_0021);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let (imdp, goal) = random_imdp(&mut rng);
        let imc = reduce_to_imc(&imdp);
        let lifted = imc.lift_targets(&goal).map_err(|e| e.to_string())?;
        for mode in [Mode::Max, Mode::Min] {
            let cfg = SolveConfig::new(mode).with_epsilon(1e-13);
            let direct = solve_quant_imdp(&imdp, &goal, &cfg).map_err(|e| e.to_string())?;
            let reduced = solve_quant(&imc, &lifted, &cfg).map_err(|e| e.to_string())?;
            for s in 0..imdp.num_states() {
                let d = (direct.values[s] - reduced.values[s]).abs();
                worst = worst.max(d);
                check(d < 1e-9, format!("case {case} {mode} state {s}: {} vs {}", direct.values[s], reduced.values[s]))?;
            }
        }
        for mode in QualMode::ALL {
            let direct = solve_qual_imdp(&imdp, &goal, mode).map_err(|e| e.to_string())?;
            let reduced = solve_qual(&imc, &lifted, mode).map_err(|e| e.to_string())?;
            let on_base: BTreeSet<usize> = reduced.holds.iter().copied().filter(|&s| s < imdp.num_states()).collect();
            check(direct.holds == on_base, format!("case {case} {mode}: {:?} vs {:?}", direct.holds, on_base))?;
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(60), format!("took {elapsed:?}"))?;
    Ok(format!("200 systems, max difference {worst:.1e}, {:.1} s", elapsed.as_secs_f64()))
}

fn mimicry_suite() -> Outcome {
    let model = task();
    let imdp = build_imdp(&model).map_err(|e| e.to_string())?;
    let mut rng = rng(0x5eed_0044);
    let goals = [vec!["S"], vec!["T"], vec!["S", "T"], vec!["F"]];
    let mut nonzero = 0;
    for case in 0..50 {
        let horizon = rng.gen_range(0..=4);
        let names = targets(&goals[case % goals.len()]);
        let sched = random_b_minimal_scheduler(&model, horizon, &mut rng);
        let mimic = mimic_scheduler(&sched, &imdp).map_err(|e| e.to_string())?;
        let lifted = region_targets(&imdp, names.iter().map(String::as_str));
        let left = bounded_reach_cdpta(&model, &sched, horizon, &names).map_err(|e| e.to_string())?;
        let right = bounded_reach_imdp(&imdp, &mimic, horizon, &lifted).map_err(|e| e.to_string())?;
        check(left == right, format!("case {case} (H={horizon}): {left} vs {right}"))?;
        if !left.is_zero() {
            nonzero += 1;
        }
    }
    Ok(format!("50 schedulers, {nonzero} with positive probability, all equal"))
}

fn feasibility_suite() -> Outcome {
    let start = Instant::now();
    let pool = small_intervals();
    let grid: Vec<GridInterval> = pool.iter().map(GridInterval::of).collect();
    let mut cases = 0usize;
    for a in 0..pool.len() {
        for b in a..pool.len() {
            for c in b..pool.len() {
                let masks = grid_support_masks(&[grid[a], grid[b], grid[c]]);
                let d: IntervalDistribution<usize> =
                    [(0, pool[a].clone()), (1, pool[b].clone()), (2, pool[c].clone())].into_iter().collect();
                cases += 1;
                // messages are built only on failure; this loop is hot
                if is_interval_distribution(&d) != grid_feasible(&masks) {
                    return Err(format!("is_interval_distribution disagrees on {d:?}"));
                }
                for u in 0..8usize {
                    let in_u = |k: &usize| u & (1 << k) != 0;
                    if support_feasible(&d, in_u) != grid_support_within(&masks, u) {
                        return Err(format!("support_feasible U={u:03b} on {d:?}"));
                    }
                    for v in 1..8usize {
                        let in_v = |k: &usize| v & (1 << k) != 0;
                        if positive_mass_feasible(&d, in_u, in_v) != grid_positive_mass(&masks, u, v) {
                            return Err(format!("positive_mass_feasible U={u:03b} V={v:03b} on {d:?}"));
                        }
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(60), format!("took {elapsed:?}"))?;
    Ok(format!("{cases} interval maps, {:.1} s", elapsed.as_secs_f64()))
}

fn initialisation_fixtures() -> Outcome {
    check(check_initialised(&task()) == Initialisation::Ok, "task is reported as not initialised")?;
    check(validate(&task()).ok(), "task fails validation")?;
    let model = notinit();
    check(validate(&model).has(ViolationCode::NotInitialised), "NOT_INITIALISED missing")?;
    let Initialisation::Violated(fragment) = check_initialised(&model) else {
        return Err("notinit reported as initialised".into());
    };
    check(verify_witness(&model, &fragment), format!("witness {fragment:?} rejected"))?;
    // independent reading of the witness: non-constant ends, linked by
    // non-reset outcomes, enabled intervals overlapping in more than a point
    let edges: Vec<_> = fragment.iter().map(|id| model.edge(id).expect("known edge")).collect();
    check(!edges[0].is_constant() && !edges[edges.len() - 1].is_constant(), "constant fragment end")?;
    for w in edges.windows(2) {
        let linked = w[0].outcomes.iter().any(|o| !o.reset && o.target == w[1].source);
        check(linked, format!("{} does not lead to {} without reset", w[0].id, w[1].id))?;
        let a = cdpta::model::enabled_interval(w[0], &model).expect("enabled");
        let b = cdpta::model::enabled_interval(w[1], &model).expect("enabled");
        check(a.intersect(&b).is_some_and(|i| i.is_proper()), "enabled intervals meet in a point")?;
    }
    Ok(format!("task initialised, notinit witness [{}]", fragment.join(", ")))
}

fn inner_step_suite() -> Outcome {
    let mut rng = rng(0x5eed_0099);
    let mut cases = 0;
    while cases < 500 {
        let n = rng.gen_range(1..=4);
        let mut row = IntervalDistribution::new();
        let mut bounds = Vec::new();
        for k in 0..n {
            let a = rat(rng.gen_range(0..=8), 8);
            let b = rat(rng.gen_range(0..=8), 8);
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            row.insert(k, ProbInterval::closed(a.clone(), b.clone()));
            bounds.push((a, b));
        }
        if !is_interval_distribution(&row) {
            continue;
        }
        cases += 1;
        let values: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(0..=64), 64)).collect();
        for mode in [Mode::Max, Mode::Min] {
            let (approx, alpha) = extremal_value(&row, |k| to_f64(&values[*k]), mode);
            check(is_assignment(&row, &alpha), format!("invalid assignment {alpha:?} for {row:?}"))?;
            let exact: Rational = alpha.iter().map(|(k, p)| p * &values[*k]).sum();
            let best = vertex_optimum(&bounds, &values, mode == Mode::Max).expect("feasible row has a vertex");
            check(exact == best, format!("{mode} on {row:?}: {exact} vs vertex {best}"))?;
            check((approx - to_f64(&best)).abs() < 1e-12, format!("reported value {approx} vs {best}"))?;
        }
    }
    Ok("500 rows, exact match in both modes".into())
}

fn polynomiality() -> Outcome {
    let mut points = Vec::new();
    let mut details = Vec::new();
    for n in [5usize, 10, 20, 40] {
        let model = chain_model(n);
        check(validate(&model).ok(), format!("chain model {n} fails validation: {}", validate(&model)))?;
        let imdp = build_imdp(&model).map_err(|e| e.to_string())?;
        let counts = state_counts(&imdp);
        check(counts == chain_counts(n), format!("n={n}: counts {counts:?} vs {:?}", chain_counts(n)))?;
        let (max_regions, max_indicators) = size_bounds(&model);
        check(counts.0 <= max_regions && counts.1 <= max_indicators, format!("n={n}: exceeds size bounds"))?;
        let query = Query::Quant { mode: Mode::Max, threshold: None };
        let mut best = Duration::MAX;
        for _ in 0..3 {
            let start = Instant::now();
            solve_query(&model, &targets(&["L0"]), &query, 1e-9).map_err(|e| e.to_string())?;
            best = best.min(start.elapsed());
        }
        points.push((n as f64, best.as_secs_f64().max(1e-6)));
        details.push(format!("n={n}: {}+{} states {:.1} ms", counts.0, counts.1, best.as_secs_f64() * 1e3));
    }
    let slope = log_log_slope(&points);
    check(slope <= 3.0, format!("log-log slope {slope:.2}"))?;
    Ok(format!("{}; slope {slope:.2}", details.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("task end-to-end values", task_end_to_end),
        ("open-interval gap", open_interval_gap),
        ("construction fidelity", construction_fidelity),
        ("oracle convergence", oracle_convergence),
        ("IMDP to IMC reduction", reduction_suite),
        ("scheduler mimicry", mimicry_suite),
        ("feasibility oracle", feasibility_suite),
        ("initialisation fixtures", initialisation_fixtures),
        ("inner-step oracle", inner_step_suite),
        ("polynomial size and time", polynomiality),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
