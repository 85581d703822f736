//! Exact rational arithmetic helpers and the `{num, den}` JSON encoding.

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = Ratio<u64>;

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: u64,
    den: u64,
}

/// `#[serde(with = "crate::rational::json")]` adapter.
pub mod json {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        RationalRepr {
            num: *r.numer(),
            den: *r.denom(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let repr = RationalRepr::deserialize(d)?;
        if repr.den == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Rational::new(repr.num, repr.den))
    }
}

/// Same as [`json`] for optional fields.
pub mod json_opt {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        r.map(|r| RationalRepr {
            num: *r.numer(),
            den: *r.denom(),
        })
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let repr = Option::<RationalRepr>::deserialize(d)?;
        match repr {
            Some(r) if r.den == 0 => Err(serde::de::Error::custom("zero denominator")),
            Some(r) => Ok(Some(Rational::new(r.num, r.den))),
            None => Ok(None),
        }
    }
}

/// Exact check of `count <= factor * eps * scale` where `eps = bad / total`.
///
/// Everything is cross-multiplied in `u128`, so no rounding is involved.
pub fn count_within(count: u64, factor: u64, eps: Rational, scale: u64) -> bool {
    let lhs = count as u128 * *eps.denom() as u128;
    let rhs = factor as u128 * *eps.numer() as u128 * scale as u128;
    lhs <= rhs
}

/// Exact check of `p <= factor * eps` for two rationals.
pub fn prob_within(p: Rational, factor: u64, eps: Rational) -> bool {
    let lhs = *p.numer() as u128 * *eps.denom() as u128;
    let rhs = factor as u128 * *eps.numer() as u128 * *p.denom() as u128;
    lhs <= rhs
}

pub fn format(r: Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
