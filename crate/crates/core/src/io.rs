//! JSON codecs for graphs, circulations, expansion parameters and exact
//! numbers.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::expansion::{ExpansionParams, SubsetSpec};
use crate::graph::{Circulation, FiniteGraph, Side};
use crate::Rational;

/// Serializes a `BigUint` as a decimal string.
pub mod biguint_string {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Serializes a rational as `"p/q"`.
pub mod rational_string {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::Rational;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// `p/q` in lowest terms with a positive denominator, `/1` included.
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Accepts `p/q` or a bare integer.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("bad rational {text:?}"));
    let (p, q) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text.trim(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

/// Wire form of a [`FiniteGraph`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertex_count: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bipartition: Option<Vec<Side>>,
}

impl Serialize for Side {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

impl<'de> Deserialize<'de> for Side {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match String::deserialize(d)?.as_str() {
            "A" => Ok(Side::A),
            "B" => Ok(Side::B),
            other => Err(serde::de::Error::custom(format!("bad side {other:?}"))),
        }
    }
}

impl From<&FiniteGraph> for GraphJson {
    fn from(g: &FiniteGraph) -> Self {
        Self {
            vertex_count: g.vertex_count(),
            edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
            bipartition: g.bipartition().map(<[Side]>::to_vec),
        }
    }
}

impl TryFrom<GraphJson> for FiniteGraph {
    type Error = Error;

    /// Requires the canonical edge order, as exported.
    fn try_from(j: GraphJson) -> Result<Self> {
        FiniteGraph::new(
            j.vertex_count,
            j.edges.into_iter().map(|[u, v]| (u, v)).collect(),
            j.bipartition,
        )
    }
}

pub fn graph_to_json(g: &FiniteGraph) -> String {
    serde_json::to_string(&GraphJson::from(g)).expect("graph serialization is infallible")
}

pub fn graph_from_json(text: &str) -> Result<FiniteGraph> {
    let j: GraphJson = serde_json::from_str(text)?;
    FiniteGraph::try_from(j)
}

pub fn circulation_to_json(f: &Circulation) -> String {
    let values: Vec<String> = f.values().iter().map(format_rational).collect();
    serde_json::to_string(&values).expect("string array serialization is infallible")
}

pub fn circulation_from_json(text: &str) -> Result<Circulation> {
    let values: Vec<String> = serde_json::from_str(text)?;
    Ok(Circulation::new(
        values
            .iter()
            .map(|v| parse_rational(v))
            .collect::<Result<_>>()?,
    ))
}

/// Orientation index on the wire: a JSON integer when it fits in `u64`,
/// otherwise a decimal string.
fn index_to_value(i: &BigUint) -> Value {
    match i.to_u64() {
        Some(v) => Value::from(v),
        None => Value::from(i.to_string()),
    }
}

fn index_from_value(v: &Value) -> Result<BigUint> {
    match v {
        Value::Number(n) => n
            .as_u64()
            .map(BigUint::from)
            .ok_or_else(|| Error::Parse(format!("bad orientation index {n}"))),
        Value::String(s) => s
            .parse()
            .map_err(|_| Error::Parse(format!("bad orientation index {s:?}"))),
        other => Err(Error::Parse(format!("bad orientation index {other}"))),
    }
}

#[derive(Serialize, Deserialize)]
struct ParamsJson {
    base: GraphJson,
    d: usize,
    #[serde(rename = "N")]
    n: u64,
    orientation_subset: Value,
}

pub fn params_to_json(p: &ExpansionParams) -> String {
    params_value(p).to_string()
}

/// [`params_to_json`] as a JSON value, for embedding in reports.
pub fn params_value(p: &ExpansionParams) -> Value {
    let subset = if p.is_full_subset() {
        Value::from("all")
    } else {
        Value::Array(p.subset().iter().map(index_to_value).collect())
    };
    let j = ParamsJson {
        base: GraphJson::from(p.base()),
        d: p.degree(),
        n: p.n(),
        orientation_subset: subset,
    };
    serde_json::to_value(&j).expect("params serialization is infallible")
}

pub fn params_from_json(text: &str) -> Result<ExpansionParams> {
    let j: ParamsJson = serde_json::from_str(text)?;
    let subset = match &j.orientation_subset {
        Value::String(s) if s == "all" => SubsetSpec::All,
        Value::Array(items) => {
            SubsetSpec::Indices(items.iter().map(index_from_value).collect::<Result<_>>()?)
        }
        other => {
            return Err(Error::Parse(format!(
                "orientation_subset must be \"all\" or an array, got {other}"
            )))
        }
    };
    let base = Arc::new(FiniteGraph::try_from(j.base)?);
    let p = ExpansionParams::new(base, j.n, subset)?;
    if p.degree() != j.d {
        return Err(Error::InvalidParams(format!(
            "declared d = {} but the base graph is {}-regular",
            j.d,
            p.degree()
        )));
    }
    Ok(p)
}
