use std::fmt::Write as _;

use num_rational::BigRational;
use serde::Serialize;

use super::{check_detailed_balance, DbReport};
use crate::error::{Error, Result};
use crate::netmodel::{check_ergodic, Generator, Network};
use crate::numerics::dense::{Dense, Scalar};
use crate::numerics::{propagate, steady_state_exact, uniformize};

fn block<T: Scalar>(a: &Dense<T>, states: &[usize]) -> Dense<T> {
    let k = states.len();
    let mut e = Dense::from_fn(k, k, |r, c| {
        if r == c {
            T::zero()
        } else {
            a[(states[r], states[c])].clone()
        }
    });
    for c in 0..k {
        let mut out = T::zero();
        for r in (0..k).filter(|&r| r != c) {
            out = out + e[(r, c)].clone();
        }
        e[(c, c)] = -out;
    }
    e
}

/// `E_β`: the rates among `states`, with the diagonal counting only
/// outflow that stays inside the block.
pub fn compartment_block(gen: &Generator, states: &[usize]) -> Dense<f64> {
    block(gen.matrix(), states)
}

pub fn compartment_block_exact(gen: &Generator, states: &[usize]) -> Option<Dense<BigRational>> {
    gen.exact().map(|a| block(a, states))
}

/// `C_β`: diagonal matrix of rates leaving the block.
pub fn loss_matrix(gen: &Generator, states: &[usize]) -> Dense<f64> {
    let a = gen.matrix();
    let k = states.len();
    let mut c = Dense::zeros(k, k);
    for (pos, &i) in states.iter().enumerate() {
        c[(pos, pos)] = (0..gen.dim())
            .filter(|j| !states.contains(j))
            .map(|j| a[(j, i)])
            .sum();
    }
    c
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtendedDbReport {
    pub satisfied: bool,
    /// Interior states, in the order used by `interior_steady`.
    pub interior: Vec<usize>,
    pub interior_steady: Vec<f64>,
    /// Detailed-balance report of `E_α`, indexed by position in `interior`.
    pub db: DbReport,
}

fn interior_generator(net: &Network) -> Result<(Generator, Vec<usize>)> {
    let spec = net.compartments().ok_or(Error::MissingCompartments)?;
    let gen = net.generator();
    let e = compartment_block_exact(&gen, &spec.interior).expect("networks are exact");
    Ok((Generator::from_exact(e)?, spec.interior.clone()))
}

/// Detailed balance of the interior block `E_α` against its own kernel.
pub fn check_extended_db(net: &Network) -> Result<ExtendedDbReport> {
    let (e, interior) = interior_generator(net)?;
    if interior.len() < 2 {
        return Err(Error::NotErgodic("interior has a single state".into()));
    }
    if !check_ergodic(&e).ergodic {
        return Err(Error::NotErgodic("interior block".into()));
    }
    let n = steady_state_exact(&e)?;
    let db = check_detailed_balance(&e, &n);
    Ok(ExtendedDbReport {
        satisfied: db.satisfied,
        interior,
        interior_steady: n.values,
        db,
    })
}

/// Sampled response function `R_ij(t)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResponseSeries {
    pub from: usize,
    pub to: usize,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl ResponseSeries {
    /// CSV with header `t,value` and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for (t, v) in self.times.iter().zip(&self.values) {
            writeln!(out, "{t:.16e},{v:.16e}").expect("string write");
        }
        out
    }
}

fn check_times(ts: &[f64]) -> Result<()> {
    match ts.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        Some(&t) => Err(Error::BadTime(t)),
        None => Ok(()),
    }
}

/// `R_ij(t) = ⟨e_j, e^{tA} e_i⟩` of a closed network.
pub fn closed_response(gen: &Generator, i: usize, j: usize, ts: &[f64]) -> Result<ResponseSeries> {
    gen.check_index(i)?;
    gen.check_index(j)?;
    check_times(ts)?;
    let values = ts
        .iter()
        .map(|&t| propagate(gen, t).map(|p| p.response(i, j)))
        .collect::<Result<_>>()?;
    Ok(ResponseSeries {
        from: i,
        to: j,
        times: ts.to_vec(),
        values,
    })
}

/// `R_ij(t) = ⟨e_j, e^{t(E_α − C_α)} e_i⟩` for interior states `i`, `j`
/// (given as network indices).
pub fn open_response(net: &Network, i: usize, j: usize, ts: &[f64]) -> Result<ResponseSeries> {
    let spec = net.compartments().ok_or(Error::MissingCompartments)?;
    let position = |s: usize| {
        spec.interior.iter().position(|&x| x == s).ok_or_else(|| {
            Error::InvalidArgument(format!("state {s} is not in the interior"))
        })
    };
    let (pi, pj) = (position(i)?, position(j)?);
    check_times(ts)?;
    let gen = net.generator();
    let m = compartment_block(&gen, &spec.interior).sub(&loss_matrix(&gen, &spec.interior));
    let values = ts
        .iter()
        .map(|&t| uniformize(&m, t).map(|p| p.matrix[(pj, pi)]))
        .collect::<Result<_>>()?;
    Ok(ResponseSeries {
        from: i,
        to: j,
        times: ts.to_vec(),
        values,
    })
}
