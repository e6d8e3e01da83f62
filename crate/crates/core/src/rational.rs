//! Exact rational helpers shared by the model, the interval layer and the oracle.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational used for all model arithmetic.
pub type Rational = BigRational;

/// Builds `num/den`. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn nat(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // very large numerators or denominators: fall back to a scaled division
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Reduced text form: `3`, `-3/8`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `INT` or `INT/NAT` (optional leading `-`).
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    if den.starts_with('-') || den.starts_with('+') {
        return None;
    }
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued-fraction convergents and semiconvergents).
pub fn best_rational_approx(x: f64, max_den: u64) -> Option<Rational> {
    if !x.is_finite() || max_den == 0 {
        return None;
    }
    let negative = x < 0.0;
    let mut value = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    let max_den = max_den as u128;
    let mut best: Option<(u128, u128)> = None;
    for _ in 0..64 {
        let a = value.floor();
        if a > 1e30 {
            break;
        }
        let a = a as u128;
        let p2 = a.saturating_mul(p1).saturating_add(p0);
        let q2 = a.saturating_mul(q1).saturating_add(q0);
        if q2 > max_den {
            // largest admissible semiconvergent
            let t = (max_den - q0) / q1.max(1);
            if t > 0 {
                let (ps, qs) = (t * p1 + p0, t * q1 + q0);
                let err_s = (ps as f64 / qs as f64 - x.abs()).abs();
                let err_c = best
                    .map(|(p, q)| (p as f64 / q as f64 - x.abs()).abs())
                    .unwrap_or(f64::INFINITY);
                if err_s < err_c {
                    best = Some((ps, qs));
                }
            }
            break;
        }
        best = Some((p2, q2));
        let frac = value - value.floor();
        if frac < 1e-15 {
            break;
        }
        value = 1.0 / frac;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    best.map(|(p, q)| {
        let r = Rational::new(BigInt::from(p), BigInt::from(q));
        if negative {
            -r
        } else {
            r
        }
    })
}

/// Rationalizes a float with a tolerance: the simplest fraction within `tol`
/// among denominators up to `max_den`, if any.
pub fn snap_rational(x: f64, tol: f64, max_den: u64) -> Option<Rational> {
    let mut den = 1u64;
    while den <= max_den {
        if let Some(r) = best_rational_approx(x, den) {
            if (to_f64(&r) - x).abs() <= tol {
                return Some(r);
            }
        }
        den = den.saturating_mul(2).max(den + 1);
    }
    best_rational_approx(x, max_den).filter(|r| (to_f64(r) - x).abs() <= tol)
}

pub fn is_in_unit(q: &Rational) -> bool {
    !q.is_negative() && q <= &Rational::one()
}

/// Least common multiple of the denominators, useful for grid enumeration.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/6"), Some(rat(1, 2)));
        assert_eq!(parse_rational("-3/8"), Some(rat(-3, 8)));
        assert_eq!(parse_rational("4"), Some(int(4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1/-2"), None);
        assert_eq!(fmt_rational(&rat(6, 8)), "3/4");
        assert_eq!(fmt_rational(&int(-2)), "-2");
    }

    #[test]
    fn approximation_recovers_simple_fractions() {
        assert_eq!(best_rational_approx(0.8, 1000), Some(rat(4, 5)));
        assert_eq!(best_rational_approx(0.79999999995, 1000), Some(rat(4, 5)));
        assert_eq!(best_rational_approx(-0.25, 10), Some(rat(-1, 4)));
        assert_eq!(best_rational_approx(3.14159265, 10), Some(rat(22, 7)));
        assert_eq!(snap_rational(0.2000000001, 1e-8, 1_000_000), Some(rat(1, 5)));
    }

    #[test]
    fn lcm_of_denominators() {
        let qs = [rat(1, 4), rat(1, 3), rat(1, 2)];
        assert_eq!(common_denominator(qs.iter()), BigInt::from(12));
    }
}
