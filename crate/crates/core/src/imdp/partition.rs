use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::model::{Atom, Cdpta, ClockConstraint, ClockInterval, InvariantSpec, Relation};
use crate::rational::{nat, Rational};

/// Sorted distinct constants of a model, always starting with 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryIdx(Vec<u64>);

impl BoundaryIdx {
    pub fn new(constants: impl IntoIterator<Item = u64>) -> Self {
        let set: BTreeSet<u64> = constants.into_iter().chain(std::iter::once(0)).collect();
        BoundaryIdx(set.into_iter().collect())
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    /// Largest constant `b_k`.
    pub fn max(&self) -> u64 {
        *self.0.last().expect("always contains 0")
    }

    /// Number of constants after 0, i.e. `k`.
    pub fn k(&self) -> usize {
        self.0.len() - 1
    }

    /// The partition element containing `v`, if `v <= b_k`.
    pub fn region_of(&self, v: &Rational) -> Option<IntervalB> {
        for (i, &b) in self.0.iter().enumerate() {
            let bq = nat(b);
            match v.cmp(&bq) {
                Ordering::Equal => return Some(IntervalB::Point(b)),
                Ordering::Less => return (i > 0).then(|| IntervalB::Open(self.0[i - 1], b)),
                Ordering::Greater => continue,
            }
        }
        None
    }
}

/// An element of the partition of `[0, b_k]`: a constant or the open gap
/// between two consecutive constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IntervalB {
    Point(u64),
    Open(u64, u64),
}

impl IntervalB {
    pub fn le(self) -> u64 {
        match self {
            IntervalB::Point(b) | IntervalB::Open(b, _) => b,
        }
    }

    pub fn re(self) -> u64 {
        match self {
            IntervalB::Point(b) | IntervalB::Open(_, b) => b,
        }
    }

    pub fn is_open(self) -> bool {
        matches!(self, IntervalB::Open(..))
    }

    pub fn is_zero(self) -> bool {
        self == IntervalB::Point(0)
    }

    pub fn contains(self, v: &Rational) -> bool {
        match self {
            IntervalB::Point(b) => v == &nat(b),
            IntervalB::Open(a, b) => v > &nat(a) && v < &nat(b),
        }
    }

    pub fn as_clock_interval(self) -> ClockInterval {
        match self {
            IntervalB::Point(b) => ClockInterval::point(nat(b)),
            IntervalB::Open(a, b) => {
                ClockInterval::new(nat(a), nat(b), true, true).expect("consecutive constants")
            }
        }
    }

    /// A valuation inside the interval (the midpoint for open gaps).
    pub fn sample(self) -> Rational {
        match self {
            IntervalB::Point(b) => nat(b),
            IntervalB::Open(a, b) => (nat(a) + nat(b)) / nat(2),
        }
    }

    fn order_key(self) -> (u64, u8) {
        match self {
            IntervalB::Point(b) => (b, 0),
            IntervalB::Open(a, _) => (a, 1),
        }
    }
}

impl PartialOrd for IntervalB {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IntervalB {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl fmt::Display for IntervalB {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntervalB::Point(b) => write!(f, "[{b},{b}]"),
            IntervalB::Open(a, b) => write!(f, "({a},{b})"),
        }
    }
}

impl std::str::FromStr for IntervalB {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let bad = || format!("cannot parse clock region `{s}`");
        if s.len() < 2 {
            return Err(bad());
        }
        let (a, b) = s[1..s.len() - 1].split_once(',').ok_or_else(bad)?;
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        match (s.chars().next(), s.chars().last()) {
            (Some('['), Some(']')) if a == b => Ok(IntervalB::Point(a)),
            (Some('('), Some(')')) if a < b => Ok(IntervalB::Open(a, b)),
            _ => Err(bad()),
        }
    }
}

/// `{0}` together with every constant of the guards and invariants.
pub fn boundary_set(model: &Cdpta) -> BoundaryIdx {
    let guards = model.edges().iter().flat_map(|e| e.guard.constants());
    let invariants = model.locations().values().map(|inv| inv.bound);
    BoundaryIdx::new(guards.chain(invariants))
}

/// `[b0,b0], (b0,b1), [b1,b1], ..., [bk,bk]`.
pub fn interval_partition(boundaries: &BoundaryIdx) -> Vec<IntervalB> {
    let values = boundaries.values();
    let mut out = Vec::with_capacity(2 * values.len() - 1);
    for (i, &b) in values.iter().enumerate() {
        if i > 0 {
            out.push(IntervalB::Open(values[i - 1], b));
        }
        out.push(IntervalB::Point(b));
    }
    out
}

/// Something an interval of the partition may satisfy entirely.
pub trait ClockPredicate {
    fn holds_on(&self, interval: IntervalB) -> bool;
}

fn atom_holds_on(atom: &Atom, interval: IntervalB) -> bool {
    let c = atom.bound;
    match (interval, atom.relation) {
        (IntervalB::Point(b), rel) => rel.holds(&nat(b), &nat(c)),
        (IntervalB::Open(_, hi), Relation::Lt | Relation::Le) => hi <= c,
        (IntervalB::Open(lo, _), Relation::Gt | Relation::Ge) => lo >= c,
    }
}

impl ClockPredicate for ClockConstraint {
    fn holds_on(&self, interval: IntervalB) -> bool {
        self.atoms.iter().all(|a| atom_holds_on(a, interval))
    }
}

impl ClockPredicate for InvariantSpec {
    fn holds_on(&self, interval: IntervalB) -> bool {
        let rel = if self.strict { Relation::Lt } else { Relation::Le };
        atom_holds_on(&Atom::new(rel, self.bound), interval)
    }
}

/// Every valuation of `interval` satisfies `predicate`.
pub fn interval_sat(interval: IntervalB, predicate: &impl ClockPredicate) -> bool {
    predicate.holds_on(interval)
}
