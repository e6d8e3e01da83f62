use std::fmt;

use num_traits::Zero;

use crate::rational::{nat, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Lt,
    Le,
    Ge,
    Gt,
}

impl Relation {
    pub fn holds(self, v: &Rational, bound: &Rational) -> bool {
        match self {
            Relation::Lt => v < bound,
            Relation::Le => v <= bound,
            Relation::Ge => v >= bound,
            Relation::Gt => v > bound,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }
}

/// One comparison `x ~ bound` against the single clock.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub relation: Relation,
    pub bound: u64,
}

impl Atom {
    pub fn new(relation: Relation, bound: u64) -> Self {
        Atom { relation, bound }
    }
}

/// Conjunction of atoms over the clock; the empty conjunction is `true`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ClockConstraint {
    pub atoms: Vec<Atom>,
}

impl ClockConstraint {
    pub fn truth() -> Self {
        ClockConstraint { atoms: Vec::new() }
    }

    pub fn new(atoms: Vec<Atom>) -> Self {
        ClockConstraint { atoms }
    }

    pub fn holds(&self, v: &Rational) -> bool {
        self.atoms
            .iter()
            .all(|a| a.relation.holds(v, &nat(a.bound)))
    }

    pub fn constants(&self) -> impl Iterator<Item = u64> + '_ {
        self.atoms.iter().map(|a| a.bound)
    }

    /// Satisfaction set intersected with `x >= 0` and the upper bound given
    /// by `inv`, as an interval (or `None` when empty).
    pub fn interval_within(&self, inv: &InvariantSpec) -> Option<ClockInterval> {
        let mut lo = Rational::zero();
        let mut lo_open = false;
        let mut hi = nat(inv.bound);
        let mut hi_open = inv.strict;
        for atom in &self.atoms {
            let b = nat(atom.bound);
            match atom.relation {
                Relation::Gt | Relation::Ge => {
                    let open = atom.relation == Relation::Gt;
                    if b > lo || (b == lo && open) {
                        lo = b;
                        lo_open = open;
                    }
                }
                Relation::Lt | Relation::Le => {
                    let open = atom.relation == Relation::Lt;
                    if b < hi || (b == hi && open) {
                        hi = b;
                        hi_open = open;
                    }
                }
            }
        }
        ClockInterval::new(lo, hi, lo_open, hi_open)
    }
}

impl fmt::Display for ClockConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "true");
        }
        for (i, atom) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, " && ")?;
            }
            write!(f, "x {} {}", atom.relation.symbol(), atom.bound)?;
        }
        Ok(())
    }
}

/// Location invariant, always an upper bound `x < c` or `x <= c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct InvariantSpec {
    pub strict: bool,
    pub bound: u64,
}

impl InvariantSpec {
    pub fn lt(bound: u64) -> Self {
        InvariantSpec { strict: true, bound }
    }

    pub fn le(bound: u64) -> Self {
        InvariantSpec { strict: false, bound }
    }

    pub fn holds(&self, v: &Rational) -> bool {
        let b = nat(self.bound);
        if self.strict {
            v < &b
        } else {
            v <= &b
        }
    }

    /// A strict invariant needs a positive bound, otherwise no valuation satisfies it.
    pub fn is_well_formed(&self) -> bool {
        !self.strict || self.bound >= 1
    }

    pub fn as_interval(&self) -> Option<ClockInterval> {
        ClockInterval::new(Rational::zero(), nat(self.bound), false, self.strict)
    }
}

impl fmt::Display for InvariantSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x {} {}", if self.strict { "<" } else { "<=" }, self.bound)
    }
}

/// Non-empty bounded interval of clock valuations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClockInterval {
    pub lo: Rational,
    pub hi: Rational,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl ClockInterval {
    /// Returns `None` for empty intervals. A single point is always stored closed.
    pub fn new(lo: Rational, hi: Rational, lo_open: bool, hi_open: bool) -> Option<Self> {
        if lo > hi || (lo == hi && (lo_open || hi_open)) {
            return None;
        }
        Some(ClockInterval {
            lo,
            hi,
            lo_open,
            hi_open,
        })
    }

    pub fn point(v: Rational) -> Self {
        ClockInterval {
            lo: v.clone(),
            hi: v,
            lo_open: false,
            hi_open: false,
        }
    }

    pub fn contains(&self, v: &Rational) -> bool {
        let above = if self.lo_open { v > &self.lo } else { v >= &self.lo };
        let below = if self.hi_open { v < &self.hi } else { v <= &self.hi };
        above && below
    }

    pub fn closure_contains(&self, v: &Rational) -> bool {
        v >= &self.lo && v <= &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// More than one valuation.
    pub fn is_proper(&self) -> bool {
        self.lo < self.hi
    }

    pub fn intersect(&self, other: &ClockInterval) -> Option<ClockInterval> {
        let (lo, lo_open) = match self.lo.cmp(&other.lo) {
            std::cmp::Ordering::Greater => (self.lo.clone(), self.lo_open),
            std::cmp::Ordering::Less => (other.lo.clone(), other.lo_open),
            std::cmp::Ordering::Equal => (self.lo.clone(), self.lo_open || other.lo_open),
        };
        let (hi, hi_open) = match self.hi.cmp(&other.hi) {
            std::cmp::Ordering::Less => (self.hi.clone(), self.hi_open),
            std::cmp::Ordering::Greater => (other.hi.clone(), other.hi_open),
            std::cmp::Ordering::Equal => (self.hi.clone(), self.hi_open || other.hi_open),
        };
        ClockInterval::new(lo, hi, lo_open, hi_open)
    }

    pub fn is_subset_of(&self, other: &ClockInterval) -> bool {
        let lo_ok = match self.lo.cmp(&other.lo) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => self.lo_open || !other.lo_open,
        };
        let hi_ok = match self.hi.cmp(&other.hi) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => self.hi_open || !other.hi_open,
        };
        lo_ok && hi_ok
    }
}

impl fmt::Display for ClockInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.lo_open { "(" } else { "[" },
            crate::rational::fmt_rational(&self.lo),
            crate::rational::fmt_rational(&self.hi),
            if self.hi_open { ")" } else { "]" }
        )
    }
}

pub fn eval_constraint(constraint: &ClockConstraint, v: &Rational) -> bool {
    constraint.holds(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn open_1_3() -> ClockConstraint {
        ClockConstraint::new(vec![Atom::new(Relation::Gt, 1), Atom::new(Relation::Lt, 3)])
    }

    #[test]
    fn constraint_evaluation() {
        assert!(eval_constraint(&open_1_3(), &int(2)));
        assert!(!eval_constraint(&open_1_3(), &int(3)));
        let f = ClockConstraint::new(vec![Atom::new(Relation::Gt, 4), Atom::new(Relation::Lt, 5)]);
        assert!(eval_constraint(&f, &rat(9, 2)));
        assert!(eval_constraint(&ClockConstraint::truth(), &int(100)));
    }

    #[test]
    fn interval_within_invariant() {
        let i = open_1_3().interval_within(&InvariantSpec::lt(3)).unwrap();
        assert_eq!(i, ClockInterval::new(int(1), int(3), true, true).unwrap());
        let g = ClockConstraint::new(vec![Atom::new(Relation::Le, 2)]);
        let i = g.interval_within(&InvariantSpec::le(2)).unwrap();
        assert_eq!(i, ClockInterval::new(int(0), int(2), false, false).unwrap());
        let g = ClockConstraint::new(vec![Atom::new(Relation::Gt, 5)]);
        assert!(g.interval_within(&InvariantSpec::lt(5)).is_none());
        let g = ClockConstraint::new(vec![Atom::new(Relation::Ge, 2)]);
        let i = g.interval_within(&InvariantSpec::le(2)).unwrap();
        assert!(i.is_point());
    }

    #[test]
    fn intersection_and_subset() {
        let a = ClockInterval::new(int(1), int(3), true, true).unwrap();
        let b = ClockInterval::new(int(3), int(5), false, true).unwrap();
        assert!(a.intersect(&b).is_none());
        let c = ClockInterval::new(int(0), int(3), false, false).unwrap();
        assert_eq!(a.intersect(&c), Some(a.clone()));
        assert!(a.is_subset_of(&c));
        assert!(!c.is_subset_of(&a));
        let d = ClockInterval::new(int(2), int(3), false, false).unwrap();
        assert_eq!(a.intersect(&d).unwrap(), ClockInterval::new(int(2), int(3), false, true).unwrap());
    }
}
