//! Network data model: states, rates, class annotations, compartments.
//!
//! States are addressed by their position in [`Network::states`]. Rates are
//! stored exactly as rationals; floats enter only when a [`Generator`] is built.

mod checks;
mod file;
mod generator;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::dense::{rat_from_f64, rat_to_f64, Dense};

pub use checks::{
    check_class_membership, check_compartments, CompartmentCondition, CompartmentReport,
    MembershipReport, MembershipViolation,
};
pub use file::{parse_network, serialize_network};
pub use generator::{check_ergodic, ErgodicityReport, Generator};

/// A nonnegative reaction rate kept as an exact rational.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rate(BigRational);

impl Rate {
    pub fn new(value: BigRational) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::InvalidRate(value.to_string()));
        }
        Ok(Self(value))
    }

    pub fn from_f64(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidRate(value.to_string()));
        }
        Self::new(rat_from_f64(value))
    }

    pub fn integer(value: u64) -> Self {
        Self(BigRational::from_integer(value.into()))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Rate {
    type Err = Error;

    /// Accepts integers, decimals with optional exponent, and fractions `p/q`.
    fn from_str(s: &str) -> Result<Self> {
        let parsed = parse_exact(s.trim()).ok_or_else(|| Error::InvalidRate(s.to_string()))?;
        Self::new(parsed)
    }
}

fn parse_exact(s: &str) -> Option<BigRational> {
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_exact(p.trim())?;
        let q = parse_exact(q.trim())?;
        if q.is_zero() {
            return None;
        }
        return Some(p / q);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let numer: BigInt = all.parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(numer);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

/// Unordered pair of distinct states, stored with the smaller index first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Pair(usize, usize);

impl Pair {
    /// Returns `None` when `a == b`.
    pub fn new(a: usize, b: usize) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Self(a, b)),
            std::cmp::Ordering::Greater => Some(Self(b, a)),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn lo(self) -> usize {
        self.0
    }

    pub fn hi(self) -> usize {
        self.1
    }

    pub fn contains(self, v: usize) -> bool {
        self.0 == v || self.1 == v
    }

    /// Every unordered pair over `dim` states, in lexicographic order.
    pub fn all(dim: usize) -> impl Iterator<Item = Pair> {
        (0..dim).flat_map(move |a| (a + 1..dim).map(move |b| Pair(a, b)))
    }
}

/// Forbidden (`E_N`) and balanced (`E_B`) pair sets; everything else is unconstrained.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassAnnotation {
    pub forbidden: BTreeSet<Pair>,
    pub balanced: BTreeSet<Pair>,
}

impl ClassAnnotation {
    pub fn new(
        forbidden: impl IntoIterator<Item = Pair>,
        balanced: impl IntoIterator<Item = Pair>,
    ) -> Result<Self> {
        let annotation = Self {
            forbidden: forbidden.into_iter().collect(),
            balanced: balanced.into_iter().collect(),
        };
        if let Some(p) = annotation.forbidden.intersection(&annotation.balanced).next() {
            return Err(Error::ClassOverlap(p.lo().to_string(), p.hi().to_string()));
        }
        Ok(annotation)
    }

    /// `E_{n-B}`: pairs that are neither forbidden nor balanced.
    pub fn unconstrained(&self, dim: usize) -> BTreeSet<Pair> {
        Pair::all(dim)
            .filter(|p| !self.forbidden.contains(p) && !self.balanced.contains(p))
            .collect()
    }
}

/// Partition of the states into interior `α`, sources `α_in` and sinks `α_out`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompartmentSpec {
    pub interior: Vec<usize>,
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
}

impl CompartmentSpec {
    pub fn new(interior: Vec<usize>, sources: Vec<usize>, sinks: Vec<usize>) -> Self {
        let sorted = |mut v: Vec<usize>| {
            v.sort_unstable();
            v
        };
        Self {
            interior: sorted(interior),
            sources: sorted(sources),
            sinks: sorted(sinks),
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        let mut seen = vec![false; dim];
        for &s in self.interior.iter().chain(&self.sources).chain(&self.sinks) {
            if s >= dim {
                return Err(Error::StateOutOfRange { index: s, dim });
            }
            if std::mem::replace(&mut seen[s], true) {
                return Err(Error::BadPartition(format!("state {s} listed twice")));
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::BadPartition(format!("state {missing} not assigned")));
        }
        if self.interior.is_empty() {
            return Err(Error::BadPartition("empty interior".into()));
        }
        Ok(())
    }
}

/// A linear reaction network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    states: Vec<String>,
    rates: BTreeMap<(usize, usize), Rate>,
    class: Option<ClassAnnotation>,
    compartments: Option<CompartmentSpec>,
}

impl Network {
    pub fn new(states: Vec<String>) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::TooFewStates);
        }
        let mut seen = BTreeSet::new();
        for s in &states {
            if !seen.insert(s.as_str()) {
                return Err(Error::DuplicateState(s.clone()));
            }
        }
        Ok(Self {
            states,
            rates: BTreeMap::new(),
            class: None,
            compartments: None,
        })
    }

    /// States labelled `1..=dim`.
    pub fn numbered(dim: usize) -> Result<Self> {
        Self::new((1..=dim).map(|i| i.to_string()).collect())
    }

    /// Reads the off-diagonal rates of a generator-shaped matrix (`m[k][i]` is `i -> k`).
    pub fn from_matrix(m: &Dense<BigRational>) -> Result<Self> {
        let mut net = Self::numbered(m.dim())?;
        for i in 0..m.dim() {
            for k in 0..m.dim() {
                if i != k && !m[(k, i)].is_zero() {
                    net.set_rate(i, k, Rate::new(m[(k, i)].clone())?)?;
                }
            }
        }
        Ok(net)
    }

    pub fn from_matrix_f64(m: &Dense<f64>) -> Result<Self> {
        Self::from_matrix(&m.to_rational())
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn label(&self, i: usize) -> &str {
        &self.states[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == label)
            .ok_or_else(|| Error::UnknownState(label.to_string()))
    }

    /// Sets the rate of `from -> to`; a zero rate removes the entry.
    pub fn set_rate(&mut self, from: usize, to: usize, rate: Rate) -> Result<()> {
        let dim = self.dim();
        for index in [from, to] {
            if index >= dim {
                return Err(Error::StateOutOfRange { index, dim });
            }
        }
        if from == to {
            return Err(Error::SelfLoop(self.states[from].clone()));
        }
        if rate.is_zero() {
            self.rates.remove(&(from, to));
        } else {
            self.rates.insert((from, to), rate);
        }
        Ok(())
    }

    pub fn with_rate(mut self, from: usize, to: usize, rate: Rate) -> Result<Self> {
        self.set_rate(from, to, rate)?;
        Ok(self)
    }

    pub fn rate(&self, from: usize, to: usize) -> Option<&Rate> {
        self.rates.get(&(from, to))
    }

    /// Nonzero rates keyed by `(from, to)`.
    pub fn rates(&self) -> &BTreeMap<(usize, usize), Rate> {
        &self.rates
    }

    pub fn class(&self) -> Option<&ClassAnnotation> {
        self.class.as_ref()
    }

    pub fn set_class(&mut self, class: ClassAnnotation) -> Result<()> {
        let dim = self.dim();
        for p in class.forbidden.iter().chain(&class.balanced) {
            if p.hi() >= dim {
                return Err(Error::StateOutOfRange { index: p.hi(), dim });
            }
        }
        self.class = Some(class);
        Ok(())
    }

    pub fn compartments(&self) -> Option<&CompartmentSpec> {
        self.compartments.as_ref()
    }

    pub fn set_compartments(&mut self, spec: CompartmentSpec) -> Result<()> {
        spec.validate(self.dim())?;
        self.compartments = Some(spec);
        Ok(())
    }

    /// Builds the Markovian generator (see [`Generator::from_network`]).
    pub fn generator(&self) -> Generator {
        Generator::from_network(self)
    }
}
