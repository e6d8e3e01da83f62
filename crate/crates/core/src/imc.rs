//! Reduction of an interval MDP to an interval Markov chain.
//!
//! Every state keeps a copy `Base(s)` whose row spreads `[0,1]` over the
//! product states `Pair(s, a)`, one per available action; a product state
//! carries the interval row of its action. Resolving the `[0,1]` row is the
//! action choice, so reachability questions carry over unchanged.

use std::collections::HashMap;
use std::fmt::{self, Write};
use std::hash::Hash;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::imdp::Imdp;
use crate::interval::{is_interval_distribution, IntervalDistribution, ProbInterval};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ImcState<S, A> {
    Base(S),
    Pair(S, A),
}

impl<S: fmt::Display, A: fmt::Display> fmt::Display for ImcState<S, A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImcState::Base(s) => write!(f, "{s}"),
            ImcState::Pair(s, a) => write!(f, "<{s}, {a}>"),
        }
    }
}

/// An interval Markov chain. Base states come first, in the order of the
/// underlying system, followed by the product states.
#[derive(Clone, Debug)]
pub struct Imc<S, A> {
    states: Vec<ImcState<S, A>>,
    rows: Vec<IntervalDistribution<usize>>,
    /// `pair_base[i]` is the base index of product state `i` (or `i` for base states).
    pair_base: Vec<usize>,
    num_base: usize,
    initial: usize,
}

impl<S: Clone + Eq + Hash, A: Clone> Imc<S, A> {
    fn from_parts(
        states: Vec<ImcState<S, A>>,
        rows: Vec<IntervalDistribution<usize>>,
        pair_base: Vec<usize>,
        num_base: usize,
        initial: usize,
    ) -> Result<Self> {
        let n = states.len();
        if rows.len() != n || pair_base.len() != n || initial >= num_base || num_base > n {
            return Err(Error::Format("inconsistent chain dimensions".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.keys().any(|&t| t >= n) {
                return Err(Error::Format(format!("row of state {i} targets an unknown state")));
            }
            let is_base = i < num_base;
            if row.keys().any(|&t| (t < num_base) == is_base) {
                return Err(Error::Format(format!("row of state {i} breaks the base/pair alternation")));
            }
            if !is_interval_distribution(row) {
                return Err(Error::Format(format!("row of state {i} is not an interval distribution")));
            }
        }
        Ok(Imc {
            states,
            rows,
            pair_base,
            num_base,
            initial,
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_base(&self) -> usize {
        self.num_base
    }

    pub fn states(&self) -> &[ImcState<S, A>] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &ImcState<S, A> {
        &self.states[i]
    }

    pub fn row(&self, i: usize) -> &IntervalDistribution<usize> {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[IntervalDistribution<usize>] {
        &self.rows
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    /// Base index owning state `i`.
    pub fn base_of(&self, i: usize) -> usize {
        self.pair_base[i]
    }

    pub fn num_transitions(&self) -> usize {
        self.rows.iter().map(IntervalDistribution::len).sum()
    }

    /// Lifts target states of the underlying system (given by index) to base states.
    pub fn lift_targets(&self, targets: &[usize]) -> Result<Vec<usize>> {
        targets
            .iter()
            .map(|&t| {
                if t < self.num_base {
                    Ok(t)
                } else {
                    Err(Error::TargetUnknownState(t.to_string()))
                }
            })
            .collect()
    }
}

/// The chain whose base states mirror `imdp` index for index.
pub fn reduce_to_imc<S: Clone + Eq + Hash, A: Clone>(imdp: &Imdp<S, A>) -> Imc<S, A> {
    let n = imdp.num_states();
    let mut states: Vec<ImcState<S, A>> = imdp.states().iter().cloned().map(ImcState::Base).collect();
    let mut rows = vec![IntervalDistribution::new(); n];
    let mut pair_base: Vec<usize> = (0..n).collect();
    let full = ProbInterval::closed(Zero::zero(), One::one());
    for s in 0..n {
        for (action, row) in imdp.choices(s) {
            let id = states.len();
            states.push(ImcState::Pair(imdp.state(s).clone(), action.clone()));
            rows[s].insert(id, full.clone());
            rows.push(row.clone());
            pair_base.push(s);
        }
    }
    Imc::from_parts(states, rows, pair_base, n, imdp.initial()).expect("reduction of a well-formed system")
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering with product states drawn as small circles.
pub fn imc_to_dot<S: fmt::Display, A: fmt::Display>(imc: &Imc<S, A>) -> String {
    let mut out = String::from("digraph imc {\n  rankdir=LR;\n  node [fontname=\"Helvetica\"];\n");
    for (i, s) in imc.states.iter().enumerate() {
        let shape = match s {
            ImcState::Base(_) if i == imc.initial => "shape=box, penwidth=2",
            ImcState::Base(_) => "shape=box",
            ImcState::Pair(..) => "shape=ellipse, fontsize=10",
        };
        let _ = writeln!(out, "  s{i} [label={}, {shape}];", quote(&s.to_string()));
    }
    for (i, row) in imc.rows.iter().enumerate() {
        for (t, interval) in row.iter() {
            let _ = writeln!(out, "  s{i} -> s{t} [label={}];", quote(&interval.to_string()));
        }
    }
    out.push_str("}\n");
    out
}

/// Reloadable text form; see [`imc_from_text`].
pub fn imc_to_text<S: fmt::Display, A: fmt::Display>(imc: &Imc<S, A>) -> String {
    let mut out = String::from("format cdpta-imc 1\n");
    let _ = writeln!(out, "states {} {}", imc.states.len(), imc.num_base);
    let _ = writeln!(out, "initial {}", imc.initial);
    for (i, s) in imc.states.iter().enumerate() {
        match s {
            ImcState::Base(b) => {
                let _ = writeln!(out, "base {i} {b}");
            }
            ImcState::Pair(_, a) => {
                let _ = writeln!(out, "pair {i} {} {a}", imc.pair_base[i]);
            }
        }
    }
    for (i, row) in imc.rows.iter().enumerate() {
        let _ = write!(out, "row {i}");
        for (t, interval) in row.iter() {
            let _ = write!(out, " {t}:{interval}");
        }
        out.push('\n');
    }
    out
}

/// Parses the output of [`imc_to_text`]; labels come back as strings.
pub fn imc_from_text(text: &str) -> Result<Imc<String, String>> {
    let bad = |line: usize, msg: &str| Error::Format(format!("line {line}: {msg}"));
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    match lines.next() {
        Some((_, "format cdpta-imc 1")) => {}
        Some((n, _)) => return Err(bad(n, "expected `format cdpta-imc 1`")),
        None => return Err(bad(0, "empty input")),
    }
    let (n, header) = lines.next().ok_or_else(|| bad(0, "missing `states`"))?;
    let dims: Vec<usize> = header
        .strip_prefix("states ")
        .ok_or_else(|| bad(n, "expected `states N B`"))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| bad(n, "bad count")))
        .collect::<Result<_>>()?;
    let [total, num_base] = dims[..] else {
        return Err(bad(n, "expected `states N B`"));
    };
    let (n, init) = lines.next().ok_or_else(|| bad(0, "missing `initial`"))?;
    let initial: usize = init
        .strip_prefix("initial ")
        .and_then(|t| t.trim().parse().ok())
        .ok_or_else(|| bad(n, "expected `initial I`"))?;

    let mut states: Vec<Option<ImcState<String, String>>> = vec![None; total];
    let mut pair_base: Vec<usize> = (0..total).collect();
    let mut rows: Vec<Option<IntervalDistribution<usize>>> = vec![None; total];
    let index = |n: usize, tok: Option<&str>| -> Result<usize> {
        tok.and_then(|t| t.parse::<usize>().ok())
            .filter(|&i| i < total)
            .ok_or_else(|| bad(n, "bad state index"))
    };
    for (n, line) in lines {
        let (kind, rest) = line.split_once(' ').ok_or_else(|| bad(n, "unexpected line"))?;
        match kind {
            "base" => {
                let (id, label) = rest.split_once(' ').unwrap_or((rest, ""));
                let id = index(n, Some(id))?;
                if id >= num_base {
                    return Err(bad(n, "base index out of range"));
                }
                states[id] = Some(ImcState::Base(label.to_string()));
            }
            "pair" => {
                let mut parts = rest.splitn(3, ' ');
                let id = index(n, parts.next())?;
                let base = index(n, parts.next())?;
                if id < num_base || base >= num_base {
                    return Err(bad(n, "pair index out of range"));
                }
                let label = parts.next().unwrap_or("").to_string();
                states[id] = Some(ImcState::Pair(base.to_string(), label));
                pair_base[id] = base;
            }
            "row" => {
                let mut parts = rest.split_whitespace();
                let id = index(n, parts.next())?;
                let mut row = IntervalDistribution::new();
                for entry in parts {
                    let (t, interval) = entry.split_once(':').ok_or_else(|| bad(n, "expected `target:interval`"))?;
                    let t = index(n, Some(t))?;
                    let interval: ProbInterval = interval.parse().map_err(|e: Error| bad(n, &e.to_string()))?;
                    row.insert(t, interval);
                }
                rows[id] = Some(row);
            }
            _ => return Err(bad(n, "unknown directive")),
        }
    }
    let mut out_states = Vec::with_capacity(total);
    for (i, s) in states.into_iter().enumerate() {
        out_states.push(s.ok_or_else(|| Error::Format(format!("state {i} is not declared")))?);
    }
    // pair labels refer to their base state's label
    let labels: Vec<String> = out_states
        .iter()
        .map(|s| match s {
            ImcState::Base(b) => b.clone(),
            ImcState::Pair(..) => String::new(),
        })
        .collect();
    for s in out_states.iter_mut() {
        if let ImcState::Pair(base, _) = s {
            *base = labels[base.parse::<usize>().expect("written above")].clone();
        }
    }
    let rows = rows
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.ok_or_else(|| Error::Format(format!("state {i} has no row"))))
        .collect::<Result<Vec<_>>>()?;
    Imc::from_parts(out_states, rows, pair_base, num_base, initial)
}

/// Base states of a reloaded chain whose label names one of `locations`.
pub fn label_targets(imc: &Imc<String, String>, locations: &[String]) -> Vec<usize> {
    let wanted: HashMap<&str, ()> = locations.iter().map(|l| (l.as_str(), ())).collect();
    (0..imc.num_base())
        .filter(|&i| match imc.state(i) {
            ImcState::Base(label) => label_location(label).map(|l| wanted.contains_key(l)).unwrap_or(false),
            ImcState::Pair(..) => false,
        })
        .collect()
}

/// Location of a region label `(l,B)`; endpoint labels start with `((` or `([`.
pub fn label_location(label: &str) -> Option<&str> {
    let inner = label.strip_prefix('(')?;
    if inner.starts_with('(') || inner.starts_with('[') {
        return None;
    }
    inner.split_once(',').map(|(l, _)| l)
}
