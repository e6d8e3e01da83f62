use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::imdp::{IntervalB, Side};
use crate::interval::Assignment;
use crate::rational::{fmt_rational, parse_rational, Rational};

/// One entry of a B-path: a region visited, or the partition element and
/// edge of a move taken.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BStep {
    Region(String, IntervalB),
    Choice(IntervalB, String),
}

impl fmt::Display for BStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BStep::Region(l, b) => write!(f, "({l},{b})"),
            BStep::Choice(b, e) => write!(f, "({b},{e})"),
        }
    }
}

impl std::str::FromStr for BStep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Format(format!("cannot parse B-path step `{s}`"));
        let inner = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        if inner.starts_with('(') || inner.starts_with('[') {
            let (b, e) = inner.rsplit_once(',').ok_or_else(bad)?;
            Ok(BStep::Choice(b.parse().map_err(|_| bad())?, e.to_string()))
        } else {
            let (l, b) = inner.split_once(',').ok_or_else(bad)?;
            Ok(BStep::Region(l.to_string(), b.parse().map_err(|_| bad())?))
        }
    }
}

pub type BPath = Vec<BStep>;

fn fmt_path(path: &[BStep]) -> String {
    path.iter().map(BStep::to_string).collect::<Vec<_>>().join(" ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchedulerKind {
    Cdpta,
    Imdp,
}

/// A choice of a scheduler.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Move {
    /// Let time pass until the clock reads `delay_to`, then take `edge`.
    Timed { delay_to: Rational, edge: String },
    /// Take action `(interval, edge)` and resolve its row with `assignment`.
    Action {
        interval: IntervalB,
        edge: String,
        assignment: Assignment<Side>,
    },
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Timed { delay_to, edge } => write!(f, "delay {} {edge}", fmt_rational(delay_to)),
            Move::Action {
                interval,
                edge,
                assignment,
            } => write!(
                f,
                "action {interval} {edge} le={} re={}",
                fmt_rational(&assignment.get(&Side::Le)),
                fmt_rational(&assignment.get(&Side::Re))
            ),
        }
    }
}

/// A scheduler given by a finite table from B-paths to distributions over moves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableScheduler {
    kind: SchedulerKind,
    table: BTreeMap<BPath, Vec<(Move, Rational)>>,
}

impl TableScheduler {
    pub fn new(kind: SchedulerKind) -> Self {
        TableScheduler {
            kind,
            table: BTreeMap::new(),
        }
    }

    pub fn kind(&self) -> SchedulerKind {
        self.kind
    }

    /// Sets the decision after histories whose B-path is `key`. Probabilities
    /// must be positive and sum to one, and moves must match the kind.
    pub fn insert(&mut self, key: BPath, moves: Vec<(Move, Rational)>) -> Result<()> {
        let what = fmt_path(&key);
        if !matches!(key.last(), Some(BStep::Region(..))) {
            return Err(Error::Format(format!("key `{what}` must end with a region")));
        }
        if moves.iter().any(|(_, p)| p <= &Rational::zero()) {
            return Err(Error::Format(format!("entry `{what}` has a non-positive probability")));
        }
        if moves.iter().map(|(_, p)| p.clone()).sum::<Rational>() != Rational::one() {
            return Err(Error::Format(format!("entry `{what}` does not sum to 1")));
        }
        let kind_ok = moves.iter().all(|(m, _)| match (self.kind, m) {
            (SchedulerKind::Cdpta, Move::Timed { .. }) | (SchedulerKind::Imdp, Move::Action { .. }) => true,
            _ => false,
        });
        if !kind_ok {
            return Err(Error::Format(format!("entry `{what}` mixes move kinds")));
        }
        self.table.insert(key, moves);
        Ok(())
    }

    pub fn get(&self, key: &[BStep]) -> Result<&[(Move, Rational)]> {
        self.table
            .get(key)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::MissingTableEntry(fmt_path(key)))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&BPath, &[(Move, Rational)])> {
        self.table.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// No entry supports two timed moves with the same edge whose targets lie
    /// in the same partition element, as located by `region_of`.
    pub fn is_b_minimal(&self, region_of: impl Fn(&Rational) -> Option<IntervalB>) -> bool {
        self.table.values().all(|moves| {
            let mut seen = BTreeSet::new();
            moves.iter().all(|(m, _)| match m {
                Move::Timed { delay_to, edge } => seen.insert((edge.clone(), region_of(delay_to))),
                Move::Action { interval, edge, .. } => seen.insert((edge.clone(), Some(*interval))),
            })
        })
    }

    /// One line per supported move: `key | move | probability`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let kind = match self.kind {
            SchedulerKind::Cdpta => "cdpta",
            SchedulerKind::Imdp => "imdp",
        };
        let _ = writeln!(out, "kind {kind}");
        for (key, moves) in &self.table {
            for (m, p) in moves {
                let _ = writeln!(out, "{} | {m} | {}", fmt_path(key), fmt_rational(p));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let kind = match lines.next() {
            Some((_, "kind cdpta")) => SchedulerKind::Cdpta,
            Some((_, "kind imdp")) => SchedulerKind::Imdp,
            Some((n, _)) => return Err(Error::Format(format!("line {n}: expected `kind cdpta` or `kind imdp`"))),
            None => return Err(Error::Format("empty scheduler file".into())),
        };
        let mut grouped: BTreeMap<BPath, Vec<(Move, Rational)>> = BTreeMap::new();
        for (n, line) in lines {
            let bad = |msg: &str| Error::Format(format!("line {n}: {msg}"));
            let parts: Vec<&str> = line.split('|').map(str::trim).collect();
            let [key, mv, p] = parts[..] else {
                return Err(bad("expected `key | move | probability`"));
            };
            let key: BPath = key
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_>>()
                .map_err(|e| bad(&e.to_string()))?;
            let p = parse_rational(p).ok_or_else(|| bad("bad probability"))?;
            let words: Vec<&str> = mv.split_whitespace().collect();
            let m = match words[..] {
                ["delay", v, edge] => Move::Timed {
                    delay_to: parse_rational(v).ok_or_else(|| bad("bad delay target"))?,
                    edge: edge.to_string(),
                },
                ["action", interval, edge, le, re] => {
                    let weight = |w: &str, prefix: &str| {
                        w.strip_prefix(prefix)
                            .and_then(parse_rational)
                            .ok_or_else(|| bad("bad endpoint weight"))
                    };
                    let mut assignment = Assignment::new();
                    assignment.set(Side::Le, weight(le, "le=")?);
                    assignment.set(Side::Re, weight(re, "re=")?);
                    Move::Action {
                        interval: interval.parse().map_err(|e: String| bad(&e))?,
                        edge: edge.to_string(),
                        assignment,
                    }
                }
                _ => return Err(bad("expected `delay V EDGE` or `action B EDGE le=A re=B`")),
            };
            grouped.entry(key).or_default().push((m, p));
        }
        let mut sched = TableScheduler::new(kind);
        for (key, moves) in grouped {
            sched.insert(key, moves)?;
        }
        Ok(sched)
    }
}
