use std::fmt::Write;

use num_traits::Zero;

use super::build::{endpoint_target_prob, ImdpState, RegionImdp};
use super::partition::IntervalB;
use crate::model::Cdpta;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering: regions as boxes, endpoint indicators as shaded boxes,
/// action nodes as points. Outcome targets that receive nothing from an
/// indicator are drawn as dashed `[0,0]` edges.
pub fn imdp_to_dot(imdp: &RegionImdp, model: &Cdpta) -> String {
    let mut out = String::from("digraph imdp {\n  rankdir=LR;\n  node [fontname=\"Helvetica\"];\n");
    for (i, s) in imdp.states().iter().enumerate() {
        let style = match s {
            ImdpState::Region { .. } if i == imdp.initial() => "shape=box, penwidth=2",
            ImdpState::Region { .. } => "shape=box",
            ImdpState::Endpoint { .. } => "shape=box, style=filled, fillcolor=lightgrey",
        };
        let _ = writeln!(out, "  s{i} [label={}, {style}];", quote(&s.to_string()));
    }
    for s in 0..imdp.num_states() {
        match imdp.state(s) {
            ImdpState::Region { .. } => {
                for (a, (action, row)) in imdp.choices(s).enumerate() {
                    let node = format!("a{s}_{a}");
                    let _ = writeln!(out, "  {node} [shape=point];");
                    let _ = writeln!(out, "  s{s} -> {node} [label={}];", quote(&action.to_string()));
                    for (t, interval) in row.iter() {
                        let _ = writeln!(out, "  {node} -> s{t} [label={}];", quote(&interval.to_string()));
                    }
                }
            }
            ImdpState::Endpoint { interval, edge, side } => {
                let row = &imdp.rows(s)[0];
                for (t, p) in row.iter() {
                    let _ = writeln!(out, "  s{s} -> s{t} [label={}];", quote(&p.to_string()));
                }
                let Some(edge) = model.edge(edge) else { continue };
                for outcome in &edge.outcomes {
                    let b = if outcome.reset { IntervalB::Point(0) } else { *interval };
                    let target = ImdpState::region(outcome.target.clone(), b);
                    let Some(t) = imdp.index_of(&target) else { continue };
                    if row.get(&t).is_none() && endpoint_target_prob(*interval, edge, *side, &outcome.target, b).is_zero() {
                        let _ = writeln!(out, "  s{s} -> s{t} [label=\"[0,0]\", style=dashed];");
                    }
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Line-oriented listing of states and rows.
pub fn imdp_to_text(imdp: &RegionImdp) -> String {
    let mut out = String::from("format cdpta-imdp 1\n");
    let _ = writeln!(out, "states {}", imdp.num_states());
    let _ = writeln!(out, "initial {}", imdp.initial());
    for (i, s) in imdp.states().iter().enumerate() {
        let _ = writeln!(out, "state {i} {s}");
    }
    for s in 0..imdp.num_states() {
        for (action, row) in imdp.choices(s) {
            let _ = write!(out, "choice {s} {action}");
            for (t, interval) in row.iter() {
                let _ = write!(out, " {t}:{interval}");
            }
            out.push('\n');
        }
    }
    out
}
