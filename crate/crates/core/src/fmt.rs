//! Number formatting shared by reports, CSV output and certificates.

use serde::Serializer;

use crate::qcore::{format_rational, Rational};

/// `x` with 12 significant digits; plain notation for magnitudes in
/// `[1e-4, 1e12)`, scientific otherwise.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..12).contains(&mag) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - mag) as usize;
    format!("{x:.decimals$}")
}

/// Exact rational when available, else 12 significant digits.
pub fn format_probability(p: f64, exact: Option<&Rational>) -> String {
    match exact {
        Some(r) => format_rational(r),
        None => format_sig12(p),
    }
}

pub(crate) fn serialize_opt_rational<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&format_rational(r)),
        None => s.serialize_none(),
    }
}

pub(crate) fn serialize_rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

/// Serde helpers for a rational stored as a `"p/q"` string.
pub(crate) mod rational_str {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use crate::qcore::{parse_rational, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        super::serialize_rational(r, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).ok_or_else(|| D::Error::custom(format!("not a rational: `{text}`")))
    }
}

/// Serde helpers for a list of `"p/q"` strings.
pub(crate) mod rational_vec {
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    use crate::qcore::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format_rational(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| parse_rational(t).ok_or_else(|| D::Error::custom(format!("not a rational: `{t}`"))))
            .collect()
    }
}
