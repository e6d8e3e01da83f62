//! Probability intervals with independently open or closed endpoints,
//! interval distributions and their assignments.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, is_in_unit, parse_rational, rat, Rational};

/// A subinterval of `[0, 1]`. Point intervals are always closed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProbInterval {
    lep: Rational,
    rep: Rational,
    left_closed: bool,
    right_closed: bool,
}

impl ProbInterval {
    pub fn new(lep: Rational, rep: Rational, left_closed: bool, right_closed: bool) -> Result<Self> {
        if !is_in_unit(&lep) || !is_in_unit(&rep) || lep > rep {
            return Err(Error::Format(format!(
                "invalid probability interval endpoints {} and {}",
                fmt_rational(&lep),
                fmt_rational(&rep)
            )));
        }
        if lep == rep && !(left_closed && right_closed) {
            return Err(Error::Format(format!(
                "degenerate interval at {} must be closed",
                fmt_rational(&lep)
            )));
        }
        Ok(ProbInterval {
            lep,
            rep,
            left_closed,
            right_closed,
        })
    }

    pub fn point(p: Rational) -> Self {
        ProbInterval::new(p.clone(), p, true, true).expect("point probability must lie in [0,1]")
    }

    pub fn closed(lep: Rational, rep: Rational) -> Self {
        ProbInterval::new(lep, rep, true, true).expect("invalid closed interval")
    }

    pub fn open(lep: Rational, rep: Rational) -> Self {
        ProbInterval::new(lep, rep, false, false).expect("invalid open interval")
    }

    /// The always-available `[0, 0]` used for absent keys.
    pub fn zero() -> Self {
        ProbInterval::point(Rational::zero())
    }

    pub fn lep(&self) -> &Rational {
        &self.lep
    }

    pub fn rep(&self) -> &Rational {
        &self.rep
    }

    pub fn left_closed(&self) -> bool {
        self.left_closed
    }

    pub fn right_closed(&self) -> bool {
        self.right_closed
    }

    pub fn is_closed(&self) -> bool {
        self.left_closed && self.right_closed
    }

    pub fn is_point(&self) -> bool {
        self.lep == self.rep
    }

    pub fn contains(&self, q: &Rational) -> bool {
        let above = if self.left_closed { q >= &self.lep } else { q > &self.lep };
        let below = if self.right_closed { q <= &self.rep } else { q < &self.rep };
        above && below
    }

    /// Zero is an admissible value.
    pub fn admits_zero(&self) -> bool {
        self.lep.is_zero() && self.left_closed
    }

    pub fn closure(&self) -> Self {
        ProbInterval {
            lep: self.lep.clone(),
            rep: self.rep.clone(),
            left_closed: true,
            right_closed: true,
        }
    }
}

impl fmt::Display for ProbInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.left_closed { "[" } else { "(" },
            fmt_rational(&self.lep),
            fmt_rational(&self.rep),
            if self.right_closed { "]" } else { ")" }
        )
    }
}

impl FromStr for ProbInterval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Format(format!("cannot parse probability interval `{s}`"));
        let left_closed = match s.chars().next() {
            Some('[') => true,
            Some('(') => false,
            _ => return Err(bad()),
        };
        let right_closed = match s.chars().last() {
            Some(']') => true,
            Some(')') => false,
            _ => return Err(bad()),
        };
        let inner = &s[1..s.len() - 1];
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let lep = parse_rational(a).ok_or_else(bad)?;
        let rep = parse_rational(b).ok_or_else(bad)?;
        ProbInterval::new(lep, rep, left_closed, right_closed)
    }
}

/// Finite map from target keys to probability intervals; absent keys mean `[0,0]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalDistribution<K: Ord> {
    entries: BTreeMap<K, ProbInterval>,
}

impl<K: Ord> Default for IntervalDistribution<K> {
    fn default() -> Self {
        IntervalDistribution {
            entries: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> IntervalDistribution<K> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts an entry; `[0,0]` entries are dropped to keep the map canonical.
    pub fn insert(&mut self, key: K, interval: ProbInterval) {
        if interval.is_point() && interval.lep().is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, interval);
        }
    }

    pub fn get(&self, key: &K) -> Option<&ProbInterval> {
        self.entries.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &ProbInterval)> {
        self.entries.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn map_keys<J: Ord + Clone>(&self, mut f: impl FnMut(&K) -> J) -> IntervalDistribution<J> {
        let mut out = IntervalDistribution::new();
        for (k, i) in &self.entries {
            out.insert(f(k), i.clone());
        }
        out
    }

    fn sum_lep(&self, mut keep: impl FnMut(&K) -> bool) -> Rational {
        self.entries
            .iter()
            .filter(|(k, _)| keep(k))
            .map(|(_, i)| i.lep().clone())
            .sum()
    }

    fn sum_rep(&self, mut keep: impl FnMut(&K) -> bool) -> Rational {
        self.entries
            .iter()
            .filter(|(k, _)| keep(k))
            .map(|(_, i)| i.rep().clone())
            .sum()
    }
}

impl<K: Ord + Clone> FromIterator<(K, ProbInterval)> for IntervalDistribution<K> {
    fn from_iter<T: IntoIterator<Item = (K, ProbInterval)>>(iter: T) -> Self {
        let mut d = IntervalDistribution::new();
        for (k, i) in iter {
            d.insert(k, i);
        }
        d
    }
}

impl<K: Ord + Clone + fmt::Display> fmt::Display for IntervalDistribution<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, interval)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}: {interval}")?;
        }
        write!(f, "}}")
    }
}

/// A concrete distribution chosen inside an interval distribution.
/// Zero entries are not stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment<K: Ord> {
    probs: BTreeMap<K, Rational>,
}

impl<K: Ord> Default for Assignment<K> {
    fn default() -> Self {
        Assignment {
            probs: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> Assignment<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: K, p: Rational) {
        if p.is_zero() {
            self.probs.remove(&key);
        } else {
            self.probs.insert(key, p);
        }
    }

    pub fn get(&self, key: &K) -> Rational {
        self.probs.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Rational)> {
        self.probs.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &K> {
        self.probs.keys()
    }

    pub fn total(&self) -> Rational {
        self.probs.values().cloned().sum()
    }

    /// Non-negative and summing to exactly one.
    pub fn is_distribution(&self) -> bool {
        self.probs.values().all(|p| p > &Rational::zero()) && self.total().is_one()
    }
}

impl<K: Ord + Clone> FromIterator<(K, Rational)> for Assignment<K> {
    fn from_iter<T: IntoIterator<Item = (K, Rational)>>(iter: T) -> Self {
        let mut a = Assignment::new();
        for (k, p) in iter {
            let cur = a.get(&k);
            a.set(k, cur + p);
        }
        a
    }
}

/// Feasibility conditions: `sum lep <= 1 <= sum rep`, and a boundary sum of
/// exactly one forces the corresponding endpoints to be closed.
pub fn is_interval_distribution<K: Ord + Clone>(d: &IntervalDistribution<K>) -> bool {
    let lo = d.sum_lep(|_| true);
    let hi = d.sum_rep(|_| true);
    let one = Rational::one();
    if lo > one || hi < one {
        return false;
    }
    if lo == one && d.iter().any(|(_, i)| !i.left_closed()) {
        return false;
    }
    if hi == one && d.iter().any(|(_, i)| !i.right_closed()) {
        return false;
    }
    true
}

pub fn is_assignment<K: Ord + Clone>(d: &IntervalDistribution<K>, alpha: &Assignment<K>) -> bool {
    if !alpha.total().is_one() {
        return false;
    }
    let zero = ProbInterval::zero();
    let in_range = alpha
        .iter()
        .all(|(k, p)| d.get(k).unwrap_or(&zero).contains(p));
    // keys of `d` missing from `alpha` take the value zero
    let zeros_ok = d
        .iter()
        .filter(|(k, _)| alpha.get(k).is_zero())
        .all(|(_, i)| i.contains(&Rational::zero()));
    in_range && zeros_ok
}

/// Some valid assignment, built deterministically: start at the left
/// endpoints, move open-left entries inside by a common step, then fill
/// entries up to their midpoints and finally up to safe caps, in key order.
pub fn witness_assignment<K: Ord + Clone>(d: &IntervalDistribution<K>) -> Option<Assignment<K>> {
    if !is_interval_distribution(d) {
        return None;
    }
    let one = Rational::one();
    let two = rat(2, 1);
    let sum_lep = d.sum_lep(|_| true);
    let sum_rep = d.sum_rep(|_| true);

    let open_left: Vec<&K> = d.iter().filter(|(_, i)| !i.left_closed()).map(|(k, _)| k).collect();
    let delta = if open_left.is_empty() {
        Rational::zero()
    } else {
        let count = Rational::from_integer(open_left.len().into());
        let by_width = d
            .iter()
            .filter(|(_, i)| !i.left_closed())
            .map(|(_, i)| (i.rep() - i.lep()) / (Rational::from_integer(4.into()) * &count))
            .min()
            .expect("non-empty");
        // keep at least half of the free budget after the nudge
        let by_budget = (&one - &sum_lep) / (&two * &count);
        by_width.min(by_budget)
    };

    let mut values: BTreeMap<K, Rational> = d
        .iter()
        .map(|(k, i)| {
            let v = if i.left_closed() { i.lep().clone() } else { i.lep() + &delta };
            (k.clone(), v)
        })
        .collect();
    let mut remaining = &one - values.values().cloned().sum::<Rational>();

    // first pass: up to midpoints
    for (k, i) in d.iter() {
        if remaining.is_zero() {
            break;
        }
        let v = values.get_mut(k).expect("key present");
        let mid = (i.lep() + i.rep()) / &two;
        if *v < mid {
            let add = (&mid - &*v).min(remaining.clone());
            *v += &add;
            remaining -= add;
        }
    }

    // second pass: closed right endpoints may be reached, open ones keep a margin
    let slack = &sum_rep - &one;
    let open_right = d.iter().filter(|(_, i)| !i.right_closed()).count();
    for (k, i) in d.iter() {
        if remaining.is_zero() {
            break;
        }
        let v = values.get_mut(k).expect("key present");
        let cap = if i.right_closed() {
            i.rep().clone()
        } else {
            let margin = ((i.rep() - &*v) / &two)
                .min(&slack / (&two * Rational::from_integer(open_right.into())));
            i.rep() - margin
        };
        if *v < cap {
            let add = (&cap - &*v).min(remaining.clone());
            *v += &add;
            remaining -= add;
        }
    }
    debug_assert!(remaining.is_zero(), "feasible rows always absorb the budget");
    let alpha: Assignment<K> = values.into_iter().collect();
    Some(alpha)
}

/// Same endpoints, all closed.
pub fn close_intervals<K: Ord + Clone>(d: &IntervalDistribution<K>) -> IntervalDistribution<K> {
    d.iter().map(|(k, i)| (k.clone(), i.closure())).collect()
}

/// Whether some assignment has its support inside `in_u`.
pub fn support_feasible<K: Ord + Clone>(d: &IntervalDistribution<K>, in_u: impl Fn(&K) -> bool) -> bool {
    if d.iter().any(|(k, i)| !in_u(k) && !i.admits_zero()) {
        return false;
    }
    let lo = d.sum_lep(&in_u);
    let hi = d.sum_rep(&in_u);
    let one = Rational::one();
    if lo > one || hi < one {
        return false;
    }
    if lo == one && d.iter().any(|(k, i)| in_u(k) && !i.left_closed()) {
        return false;
    }
    if hi == one && d.iter().any(|(k, i)| in_u(k) && !i.right_closed()) {
        return false;
    }
    true
}

/// Whether some assignment supported inside `in_u` puts positive mass on `in_v`.
pub fn positive_mass_feasible<K: Ord + Clone>(
    d: &IntervalDistribution<K>,
    in_u: impl Fn(&K) -> bool,
    in_v: impl Fn(&K) -> bool,
) -> bool {
    if !support_feasible(d, &in_u) {
        return false;
    }
    let lo = d.sum_lep(&in_u);
    let budget_free = lo < Rational::one();
    d.iter().any(|(k, i)| {
        in_u(k) && in_v(k) && i.rep() > &Rational::zero() && (budget_free || i.lep() > &Rational::zero())
    })
}

/// Whether some assignment gives `key` positive probability.
pub fn assignably_positive<K: Ord + Clone>(d: &IntervalDistribution<K>, key: &K) -> bool {
    positive_mass_feasible(d, |_| true, |k| k == key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn dist(entries: &[(&'static str, ProbInterval)]) -> IntervalDistribution<&'static str> {
        entries.iter().cloned().collect()
    }

    fn zero_one_open() -> IntervalDistribution<&'static str> {
        dist(&[("a", ProbInterval::open(int(0), int(1))), ("b", ProbInterval::open(int(0), int(1)))])
    }

    fn halves() -> IntervalDistribution<&'static str> {
        dist(&[("a", ProbInterval::point(rat(1, 2))), ("b", ProbInterval::point(rat(1, 2)))])
    }

    fn assign(entries: &[(&'static str, Rational)]) -> Assignment<&'static str> {
        entries.iter().cloned().collect()
    }

    #[test]
    fn interval_membership_respects_openness() {
        let i: ProbInterval = "(1/4,2/3]".parse().unwrap();
        assert!(!i.contains(&rat(1, 4)));
        assert!(i.contains(&rat(2, 3)));
        assert!(ProbInterval::new(rat(1, 2), rat(1, 2), false, true).is_err());
        assert!(ProbInterval::new(rat(3, 4), rat(1, 2), true, true).is_err());
        assert_eq!(i.to_string(), "(1/4,2/3]");
    }

    #[test]
    fn interval_distribution_conditions() {
        assert!(is_interval_distribution(&zero_one_open()));
        assert!(is_interval_distribution(&halves()));
        let d = dist(&[
            ("a", ProbInterval::new(int(0), rat(1, 2), false, false).unwrap()),
            ("b", ProbInterval::point(rat(1, 2))),
        ]);
        assert!(!is_interval_distribution(&d));
    }

    #[test]
    fn assignments() {
        let d = zero_one_open();
        assert!(is_assignment(&d, &assign(&[("a", rat(3, 4)), ("b", rat(1, 4))])));
        assert!(!is_assignment(&d, &assign(&[("a", int(1))])));
        assert!(is_assignment(&halves(), &assign(&[("a", rat(1, 2)), ("b", rat(1, 2))])));
        assert!(!is_assignment(&halves(), &assign(&[("a", rat(1, 2)), ("c", rat(1, 2))])));
    }

    #[test]
    fn witness_examples() {
        let w = witness_assignment(&zero_one_open()).unwrap();
        assert_eq!(w, assign(&[("a", rat(1, 2)), ("b", rat(1, 2))]));
        let one = dist(&[("a", ProbInterval::point(int(1)))]);
        assert_eq!(witness_assignment(&one).unwrap(), assign(&[("a", int(1))]));
        let d = dist(&[("a", ProbInterval::point(rat(1, 4))), ("b", ProbInterval::open(int(0), int(1)))]);
        let w = witness_assignment(&d).unwrap();
        assert_eq!(w, assign(&[("a", rat(1, 4)), ("b", rat(3, 4))]));
        assert!(is_assignment(&d, &w));
    }

    #[test]
    fn witness_survives_tight_budget() {
        // the width-based nudge alone would overshoot the free budget
        let d = dist(&[
            ("a", ProbInterval::point(rat(99, 100))),
            ("b", ProbInterval::open(int(0), int(1))),
        ]);
        let w = witness_assignment(&d).unwrap();
        assert!(is_assignment(&d, &w));
    }

    #[test]
    fn closing() {
        let closed = close_intervals(&zero_one_open());
        assert_eq!(closed.get(&"a"), Some(&ProbInterval::closed(int(0), int(1))));
        assert_eq!(close_intervals(&closed), closed);
    }

    #[test]
    fn support_examples() {
        let d = dist(&[("a", ProbInterval::closed(int(0), int(1))), ("b", ProbInterval::closed(int(0), int(1)))]);
        assert!(support_feasible(&d, |k| *k == "a"));
        assert!(!support_feasible(&zero_one_open(), |k| *k == "a"));
        assert!(!support_feasible(&halves(), |k| *k == "a"));
    }

    #[test]
    fn positive_mass_examples() {
        assert!(positive_mass_feasible(&zero_one_open(), |_| true, |k| *k == "a"));
        let d = dist(&[("a", ProbInterval::zero()), ("b", ProbInterval::point(int(1)))]);
        assert!(!positive_mass_feasible(&d, |_| true, |k| *k == "a"));
        assert!(positive_mass_feasible(&halves(), |_| true, |k| *k == "b"));
    }
}
