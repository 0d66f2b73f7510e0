//! The JSON network file format.
//!
//! ```json
//! {
//!   "states": ["1", "2"],
//!   "rates": [{"from": "1", "to": "2", "rate": 1}, {"from": "2", "to": "1", "rate": "3/2"}],
//!   "class": {"forbidden": [], "balanced": [["1", "2"]]},
//!   "compartments": {"interior": ["1"], "sources": [], "sinks": ["2"]}
//! }
//! ```
//!
//! Rates are JSON numbers or strings holding a decimal or a fraction `p/q`;
//! both are read exactly.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{ClassAnnotation, CompartmentSpec, Network, Pair, Rate};
use crate::error::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    states: Vec<String>,
    #[serde(default)]
    rates: Vec<RawRate>,
    #[serde(default)]
    class: Option<RawClass>,
    #[serde(default)]
    compartments: Option<RawCompartments>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRate {
    from: String,
    to: String,
    rate: Value,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawClass {
    #[serde(default)]
    forbidden: Vec<[String; 2]>,
    #[serde(default)]
    balanced: Vec<[String; 2]>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawCompartments {
    #[serde(default)]
    interior: Vec<String>,
    #[serde(default)]
    sources: Vec<String>,
    #[serde(default)]
    sinks: Vec<String>,
}

pub fn parse_network(text: &str) -> Result<Network> {
    let raw: RawNetwork = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut net = Network::new(raw.states)?;
    let mut seen = BTreeSet::new();
    for entry in raw.rates {
        let from = net.index_of(&entry.from)?;
        let to = net.index_of(&entry.to)?;
        if from == to {
            return Err(Error::SelfLoop(entry.from));
        }
        if !seen.insert((from, to)) {
            return Err(Error::DuplicateRate {
                from: entry.from,
                to: entry.to,
            });
        }
        let literal = match &entry.rate {
            Value::Number(n) => n.to_string(),
            Value::String(s) => s.clone(),
            other => return Err(Error::InvalidRate(other.to_string())),
        };
        let value = super::parse_exact(literal.trim())
            .ok_or_else(|| Error::InvalidRate(literal.clone()))?;
        let Ok(rate) = Rate::new(value) else {
            return Err(Error::NegativeRate {
                from: entry.from,
                to: entry.to,
                value: literal,
            });
        };
        net.set_rate(from, to, rate)?;
    }
    if let Some(class) = raw.class {
        let pairs = |list: &[[String; 2]]| -> Result<Vec<Pair>> {
            list.iter()
                .map(|[a, b]| {
                    let (ia, ib) = (net.index_of(a)?, net.index_of(b)?);
                    Pair::new(ia, ib).ok_or_else(|| Error::SelfLoop(a.clone()))
                })
                .collect()
        };
        let forbidden = pairs(&class.forbidden)?;
        let balanced = pairs(&class.balanced)?;
        let annotation = ClassAnnotation::new(forbidden, balanced).map_err(|e| match e {
            Error::ClassOverlap(a, b) => Error::ClassOverlap(
                net.label(a.parse().unwrap()).to_string(),
                net.label(b.parse().unwrap()).to_string(),
            ),
            other => other,
        })?;
        net.set_class(annotation)?;
    }
    if let Some(c) = raw.compartments {
        let idx = |list: &[String]| -> Result<Vec<usize>> {
            list.iter().map(|s| net.index_of(s)).collect()
        };
        let spec = CompartmentSpec::new(idx(&c.interior)?, idx(&c.sources)?, idx(&c.sinks)?);
        net.set_compartments(spec)?;
    }
    Ok(net)
}

fn rate_value(rate: &Rate) -> Value {
    if rate.value().is_integer() {
        // Integers stay JSON numbers; the literal is exact either way.
        serde_json::from_str(&rate.to_string()).expect("integer literal")
    } else {
        Value::String(rate.to_string())
    }
}

/// Canonical text form: states in declared order, rates sorted by `(from, to)` label.
pub fn serialize_network(net: &Network) -> String {
    let mut rates: Vec<_> = net.rates().iter().collect();
    rates.sort_by(|((f1, t1), _), ((f2, t2), _)| {
        (net.label(*f1), net.label(*t1)).cmp(&(net.label(*f2), net.label(*t2)))
    });
    let rates: Vec<Value> = rates
        .into_iter()
        .map(|(&(from, to), rate)| {
            json!({"from": net.label(from), "to": net.label(to), "rate": rate_value(rate)})
        })
        .collect();
    let mut doc = json!({"states": net.states(), "rates": rates});
    let labels = |pairs: &BTreeSet<Pair>| -> Vec<[String; 2]> {
        pairs
            .iter()
            .map(|p| [net.label(p.lo()).to_string(), net.label(p.hi()).to_string()])
            .collect()
    };
    if let Some(class) = net.class() {
        doc["class"] = serde_json::to_value(RawClass {
            forbidden: labels(&class.forbidden),
            balanced: labels(&class.balanced),
        })
        .expect("serializable");
    }
    if let Some(spec) = net.compartments() {
        let names = |v: &[usize]| v.iter().map(|&i| net.label(i).to_string()).collect();
        doc["compartments"] = serde_json::to_value(RawCompartments {
            interior: names(&spec.interior),
            sources: names(&spec.sources),
            sinks: names(&spec.sinks),
        })
        .expect("serializable");
    }
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
    text.push('\n');
    text
}
