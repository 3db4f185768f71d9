use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Exact arbitrary-precision rational.
pub type Rational = BigRational;

/// Largest denominator considered when snapping.
pub const SNAP_MAX_DENOMINATOR: u32 = 1000;
/// Distance below which a float is snapped to a nearby rational.
pub const SNAP_TOL: f64 = 1e-9;

/// Snaps `x` to the rational `p/q` with the smallest `q <= 1000` satisfying
/// `|x - p/q| < 1e-9`. Returns `None` when no such rational exists.
pub fn snap_probability(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    for q in 1..=SNAP_MAX_DENOMINATOR {
        let qf = q as f64;
        let p = (x * qf).round();
        if (x - p / qf).abs() < SNAP_TOL {
            return Some(Rational::new(BigInt::from(p as i64), BigInt::from(q)));
        }
    }
    None
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `p/q` form, or just `p` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p.into(), q.into())
    }

    #[test]
    fn snaps_small_fractions() {
        assert_eq!(snap_probability(1.0 / 12.0), Some(r(1, 12)));
        assert_eq!(snap_probability(2.0 / 3.0 + 1e-13), Some(r(2, 3)));
        assert_eq!(snap_probability(1e-17), Some(r(0, 1)));
        assert_eq!(snap_probability(0.75), Some(r(3, 4)));
    }

    #[test]
    fn irrational_does_not_snap() {
        assert_eq!(snap_probability(std::f64::consts::FRAC_1_SQRT_2), None);
    }

    #[test]
    fn format_and_parse_round_trip() {
        for v in [r(0, 1), r(1, 12), r(-7, 3), r(5, 1)] {
            assert_eq!(parse_rational(&format_rational(&v)), Some(v));
        }
        assert_eq!(parse_rational("1/0"), None);
    }
}
