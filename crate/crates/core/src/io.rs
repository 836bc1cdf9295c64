//! Algebra file format.
//!
//! ```json
//! {"dim": 3, "scalar_mode": "rational", "brackets": [{"i": 1, "j": 2, "k": 3, "c": "1"}]}
//! ```
//!
//! Indices are 1-based, `c` is a decimal or `"p/q"` string (plain JSON numbers
//! are accepted on input). Rational files round-trip bit-exactly.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bracket::{BracketTensor, FloatBracket, RationalBracket};
use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    Rational,
    Float,
}

impl std::str::FromStr for ScalarMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(Self::Rational),
            "float" => Ok(Self::Float),
            other => Err(Error::Parse(format!("unknown scalar mode {other:?}"))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct AlgebraFile {
    dim: usize,
    scalar_mode: ScalarMode,
    brackets: Vec<Entry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Entry {
    i: usize,
    j: usize,
    k: usize,
    c: serde_json::Value,
}

/// A bracket read from a file, in whichever mode the file declares.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyBracket {
    Rational(RationalBracket),
    Float(FloatBracket),
}

impl AnyBracket {
    pub fn mode(&self) -> ScalarMode {
        match self {
            Self::Rational(_) => ScalarMode::Rational,
            Self::Float(_) => ScalarMode::Float,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Rational(mu) => mu.dim(),
            Self::Float(mu) => mu.dim(),
        }
    }

    pub fn to_float(&self) -> FloatBracket {
        match self {
            Self::Rational(mu) => mu.to_f64(),
            Self::Float(mu) => mu.clone(),
        }
    }

    /// Convert to the requested mode. Float to rational uses the exact binary
    /// value of each constant.
    pub fn into_mode(self, mode: ScalarMode) -> Self {
        match (self, mode) {
            (Self::Float(mu), ScalarMode::Rational) => Self::Rational(mu.to_rational()),
            (Self::Rational(mu), ScalarMode::Float) => Self::Float(mu.to_f64()),
            (same, _) => same,
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            Self::Rational(mu) => to_json(mu),
            Self::Float(mu) => to_json(mu),
        }
    }
}

fn parse_value(v: &serde_json::Value) -> Result<String> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::Parse(format!("structure constant must be a string or number, got {other}"))),
    }
}

pub fn parse_algebra(text: &str) -> Result<AnyBracket> {
    let file: AlgebraFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid algebra JSON: {e}")))?;
    let n = file.dim;
    if n == 0 {
        return Err(Error::Parse("dim must be positive".into()));
    }
    let mut seen = BTreeSet::new();
    let mut raw = Vec::with_capacity(file.brackets.len());
    for e in &file.brackets {
        if e.i == 0 || e.j == 0 || e.k == 0 || e.i > n || e.j > n || e.k > n {
            return Err(Error::Parse(format!(
                "bracket index ({}, {}, {}) outside 1..={n}",
                e.i, e.j, e.k
            )));
        }
        if e.i == e.j {
            return Err(Error::Parse(format!("bracket [e{0}, e{0}] must be zero", e.i)));
        }
        let key = (e.i.min(e.j), e.i.max(e.j), e.k);
        if !seen.insert(key) {
            return Err(Error::Parse(format!(
                "duplicate entry for [e{}, e{}] -> e{}",
                key.0, key.1, key.2
            )));
        }
        raw.push((e.i - 1, e.j - 1, e.k - 1, parse_value(&e.c)?));
    }
    Ok(match file.scalar_mode {
        ScalarMode::Rational => AnyBracket::Rational(build(n, &raw, parse_rational)?),
        ScalarMode::Float => AnyBracket::Float(build(n, &raw, f64::parse_scalar)?),
    })
}

fn build<T: Scalar>(
    n: usize,
    raw: &[(usize, usize, usize, String)],
    parse: impl Fn(&str) -> Result<T>,
) -> Result<BracketTensor<T>> {
    let mut entries = Vec::with_capacity(raw.len());
    for (i, j, k, c) in raw {
        entries.push((*i, *j, *k, parse(c)?));
    }
    Ok(BracketTensor::from_entries(n, entries))
}

/// Canonical JSON: entries sorted by `(i, j, k)`, `i < j`, no zeros.
pub fn to_json<T: Scalar>(mu: &BracketTensor<T>) -> String {
    let file = AlgebraFile {
        dim: mu.dim(),
        scalar_mode: if T::EXACT { ScalarMode::Rational } else { ScalarMode::Float },
        brackets: mu
            .one_based_entries()
            .into_iter()
            .map(|(i, j, k, c)| Entry {
                i,
                j,
                k,
                c: serde_json::Value::String(c.to_string()),
            })
            .collect(),
    };
    serde_json::to_string(&file).expect("algebra file serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn rational_round_trip() {
        let text = r#"{"dim": 4, "scalar_mode": "rational", "brackets": [
            {"i": 1, "j": 2, "k": 3, "c": "1"},
            {"i": 1, "j": 2, "k": 4, "c": "-7/3"},
            {"i": 1, "j": 3, "k": 4, "c": "0.125"}]}"#;
        let mu = parse_algebra(text).unwrap();
        let AnyBracket::Rational(r) = &mu else { panic!("mode") };
        assert_eq!(r.get(0, 1, 3), Rational::ratio(-7, 3));
        assert_eq!(r.get(2, 0, 3), Rational::ratio(-1, 8));
        let again = parse_algebra(&mu.to_json()).unwrap();
        assert_eq!(again, mu);
        assert_eq!(again.to_json(), mu.to_json());
    }

    #[test]
    fn float_round_trip_is_exact() {
        let mu = FloatBracket::from_one_based(3, &[(1, 2, 3, 0.1 + 0.2)]);
        let back = parse_algebra(&to_json(&mu)).unwrap();
        assert_eq!(back, AnyBracket::Float(mu));
    }

    #[test]
    fn reversed_pairs_flip_sign() {
        let text = r#"{"dim": 3, "scalar_mode": "rational", "brackets": [{"i": 2, "j": 1, "k": 3, "c": 1}]}"#;
        let AnyBracket::Rational(r) = parse_algebra(text).unwrap() else { panic!() };
        assert_eq!(r.get(0, 1, 2), Rational::ratio(-1, 1));
    }

    #[test]
    fn rejects_malformed_files() {
        for bad in [
            r#"{"dim": 3, "scalar_mode": "rational", "brackets": [{"i": 1, "j": 1, "k": 3, "c": "1"}]}"#,
            r#"{"dim": 3, "scalar_mode": "rational", "brackets": [{"i": 1, "j": 2, "k": 4, "c": "1"}]}"#,
            r#"{"dim": 3, "scalar_mode": "exact", "brackets": []}"#,
            r#"{"dim": 3, "scalar_mode": "rational", "brackets": [{"i": 1, "j": 2, "k": 3, "c": "x"}]}"#,
            r#"{"dim": 3, "scalar_mode": "rational", "brackets": [
                {"i": 1, "j": 2, "k": 3, "c": "1"}, {"i": 2, "j": 1, "k": 3, "c": "1"}]}"#,
            "not json",
        ] {
            assert!(matches!(parse_algebra(bad), Err(Error::Parse(_))), "{bad}");
        }
    }
}
