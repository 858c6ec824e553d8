//! JSON forms shared by every file the CLI reads or writes.
//!
//! A polynomial is `{"dimension": n, "terms": [{"exponents": [...], "num": "..",
//! "den": ".."}, ...]}` with terms in descending graded-lex order; rationals are
//! decimal strings so that no integer width limit applies.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::{parse_rational, MultiPoly, PolyMap, Rational};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct TermJson {
    exponents: Vec<u32>,
    num: String,
    den: String,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    dimension: usize,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct PolyMapJson {
    domain_dim: usize,
    components: Vec<MultiPoly>,
}

fn poly_to_json(p: &MultiPoly) -> PolyJson {
    PolyJson {
        dimension: p.dimension(),
        terms: p
            .terms()
            .rev()
            .map(|(m, c)| TermJson {
                exponents: m.exponents().to_vec(),
                num: c.numer().to_string(),
                den: c.denom().to_string(),
            })
            .collect(),
    }
}

fn poly_from_json(j: PolyJson) -> Result<MultiPoly> {
    if j.dimension == 0 {
        return Err(Error::Parse("polynomial dimension must be positive".into()));
    }
    let mut seen = std::collections::HashSet::new();
    let mut terms = Vec::with_capacity(j.terms.len());
    for t in j.terms {
        if t.exponents.len() != j.dimension {
            return Err(Error::Parse(format!(
                "term has {} exponents, polynomial dimension is {}",
                t.exponents.len(),
                j.dimension
            )));
        }
        if !seen.insert(t.exponents.clone()) {
            return Err(Error::Parse(format!("duplicate monomial {:?}", t.exponents)));
        }
        let num: BigInt = t
            .num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("invalid numerator {:?}", t.num)))?;
        let den: BigInt = t
            .den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("invalid denominator {:?}", t.den)))?;
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        terms.push((t.exponents, Rational::new(num, den)));
    }
    MultiPoly::from_terms(j.dimension, terms)
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        poly_to_json(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        poly_from_json(PolyJson::deserialize(d)?).map_err(de::Error::custom)
    }
}

impl Serialize for PolyMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyMapJson {
            domain_dim: self.domain_dim(),
            components: self.components().to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PolyMapJson::deserialize(d)?;
        PolyMap::new(j.domain_dim, j.components).map_err(de::Error::custom)
    }
}

/// Serde adapter for a single rational stored as `"n"` or `"n/d"`.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(de::Error::custom)
    }
}

/// Serde adapter for a vector of string-encoded rationals.
pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|q| q.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(de::Error::custom))
            .collect()
    }
}

/// Serde adapter for a matrix (or list of points) of string-encoded rationals.
pub mod rational_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(
        m: &[Vec<Rational>],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(
            m.iter()
                .map(|row| row.iter().map(|q| q.to_string()).collect::<Vec<_>>()),
        )
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
        let v = Vec::<Vec<String>>::deserialize(d)?;
        v.iter()
            .map(|row| {
                row.iter()
                    .map(|s| parse_rational(s).map_err(de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

pub fn poly_to_string(p: &MultiPoly) -> String {
    serde_json::to_string(p).expect("polynomial serializes")
}

pub fn poly_from_str(s: &str) -> Result<MultiPoly> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, rat_int};

    #[test]
    fn format_is_graded_lex_descending() {
        let p = MultiPoly::from_terms(
            2,
            vec![
                (vec![0, 0], rat_int(-1)),
                (vec![1, 1], rat(3, 4)),
                (vec![2, 0], rat_int(2)),
            ],
        )
        .unwrap();
        let s = poly_to_string(&p);
        assert_eq!(
            s,
            r#"{"dimension":2,"terms":[{"exponents":[2,0],"num":"2","den":"1"},{"exponents":[1,1],"num":"3","den":"4"},{"exponents":[0,0],"num":"-1","den":"1"}]}"#
        );
        assert_eq!(poly_from_str(&s).unwrap(), p);
    }

    #[test]
    fn parse_canonicalizes_and_validates() {
        let p = poly_from_str(
            r#"{"dimension":1,"terms":[{"exponents":[0],"num":"2","den":"-4"},{"exponents":[3],"num":"0","den":"5"}]}"#,
        )
        .unwrap();
        assert_eq!(p, MultiPoly::constant(1, rat(-1, 2)));
        for bad in [
            r#"{"dimension":1,"terms":[{"exponents":[0,1],"num":"1","den":"1"}]}"#,
            r#"{"dimension":1,"terms":[{"exponents":[0],"num":"1","den":"0"}]}"#,
            r#"{"dimension":1,"terms":[{"exponents":[1],"num":"1","den":"1"},{"exponents":[1],"num":"1","den":"1"}]}"#,
            r#"{"dimension":0,"terms":[]}"#,
            r#"{"dimension":1,"terms":[{"exponents":[0],"num":"1.5","den":"1"}]}"#,
        ] {
            assert!(poly_from_str(bad).is_err(), "{bad}");
        }
    }
}
