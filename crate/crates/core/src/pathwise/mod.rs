//! Pathwise detailed balance.
//!
//! For a pair `(i, j)` the condition is `N_i ⟨e_j, Aⁿ e_i⟩ = N_j ⟨e_i, Aⁿ e_j⟩`
//! for every `n`. By Cayley–Hamilton it suffices to check `n = 1..L−1`.

mod walks;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::balance::SymmetrizedGenerator;
use crate::error::{Error, Result};
use crate::netmodel::Generator;
use crate::numerics::dense::{rat_to_f64, Dense, Scalar};
use crate::numerics::{propagate, steady_state, unit, SteadyState};
use crate::tol::{TAU_PDB, TAU_RATIO};

pub use walks::{walk_sum_oracle, WalkSum};

/// `Δ_n = N_i ⟨e_j, Aⁿ e_i⟩ − N_j ⟨e_i, Aⁿ e_j⟩` for `n = 1..=values.len()`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaSeries {
    pub pair: (usize, usize),
    pub values: Vec<f64>,
    /// Exact values, when both the generator and `N` are rational.
    #[serde(skip)]
    pub exact: Option<Vec<BigRational>>,
    /// `c = N_j / N_i`.
    pub ratio_constant: f64,
    /// `‖A‖_∞ⁿ` for each `n`.
    pub scale: Vec<f64>,
    /// `N_i`, the prefactor of the tolerance.
    pub weight: f64,
}

impl DeltaSeries {
    /// Whether `Δ_n` passes at index `k` (`n = k + 1`).
    pub fn passes(&self, k: usize) -> bool {
        match &self.exact {
            Some(ex) => ex[k].is_zero(),
            None => self.values[k].abs() <= TAU_PDB * self.weight * self.scale[k],
        }
    }

    /// Least `n` with a violation.
    pub fn first_failing_n(&self) -> Option<usize> {
        (0..self.values.len()).find(|&k| !self.passes(k)).map(|k| k + 1)
    }

    /// `|Δ_n| / (N_i ‖A‖_∞ⁿ)`.
    pub fn relative(&self, n: usize) -> f64 {
        self.values[n - 1].abs() / (self.weight * self.scale[n - 1])
    }
}

fn deltas<T: Scalar>(a: &Dense<T>, ni: &T, nj: &T, i: usize, j: usize, count: usize) -> Vec<T> {
    let dim = a.dim();
    let mut x = unit::<T>(dim, i);
    let mut y = unit::<T>(dim, j);
    (0..count)
        .map(|_| {
            x = a.mul_vec(&x);
            y = a.mul_vec(&y);
            ni.clone() * x[j].clone() - nj.clone() * y[i].clone()
        })
        .collect()
}

fn check_pair(gen: &Generator, n: &SteadyState, i: usize, j: usize) -> Result<()> {
    gen.check_index(i)?;
    gen.check_index(j)?;
    if i == j {
        return Err(Error::SameState(i));
    }
    if n.dim() != gen.dim() {
        return Err(Error::InvalidArgument("steady state has the wrong length".into()));
    }
    Ok(())
}

/// `Δ_n` for `n = 1..L−1`.
pub fn delta_series(gen: &Generator, n: &SteadyState, i: usize, j: usize) -> Result<DeltaSeries> {
    delta_series_upto(gen, n, i, j, gen.dim() - 1)
}

/// `Δ_n` for `n = 1..=max_n`. Uses exact arithmetic when both `gen` and `n`
/// carry exact values.
pub fn delta_series_upto(
    gen: &Generator,
    n: &SteadyState,
    i: usize,
    j: usize,
    max_n: usize,
) -> Result<DeltaSeries> {
    check_pair(gen, n, i, j)?;
    let a = gen.matrix();
    let norm = a.norm_inf();
    let scale = (1..=max_n).map(|k| norm.powi(k as i32)).collect();
    let (values, exact) = match (gen.exact(), &n.exact) {
        (Some(ea), Some(en)) => {
            let ex = deltas(ea, &en[i], &en[j], i, j, max_n);
            (ex.iter().map(rat_to_f64).collect(), Some(ex))
        }
        _ => (deltas(a, &n.values[i], &n.values[j], i, j, max_n), None),
    };
    Ok(DeltaSeries {
        pair: (i, j),
        values,
        exact,
        ratio_constant: n.values[j] / n.values[i],
        scale,
        weight: n.values[i],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PdbReport {
    pub holds: bool,
    pub first_failing_n: Option<usize>,
    pub series: DeltaSeries,
}

pub fn check_pdb(gen: &Generator, n: &SteadyState, i: usize, j: usize) -> Result<PdbReport> {
    let series = delta_series(gen, n, i, j)?;
    let first_failing_n = series.first_failing_n();
    Ok(PdbReport {
        holds: first_failing_n.is_none(),
        first_failing_n,
        series,
    })
}

/// `⟨e_i, Bⁿ e_j⟩ = ⟨e_j, Bⁿ e_i⟩` for `n = 1..L−1`, relative to `‖B‖_∞ⁿ`.
pub fn check_pathwise_symmetry(b: &SymmetrizedGenerator, i: usize, j: usize) -> bool {
    let m = &b.matrix;
    let dim = m.dim();
    let norm = m.norm_inf();
    let mut x = unit::<f64>(dim, i);
    let mut y = unit::<f64>(dim, j);
    (1..dim).all(|k| {
        x = m.mul_vec(&x);
        y = m.mul_vec(&y);
        (y[i] - x[j]).abs() <= TAU_PDB * norm.powi(k as i32)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioReport {
    pub constant: bool,
    /// Median of `R_ij(t) / R_ji(t)` over the grid.
    pub fitted_c: f64,
    /// Largest `|ratio − fitted_c| / fitted_c`.
    pub max_deviation: f64,
    pub times: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `N_j / N_i`.
    pub expected_c: f64,
    /// `|fitted_c − N_j/N_i| ≤ τ_ratio · N_j/N_i`.
    pub matches_steady_state: bool,
}

/// Tests whether `R_ij(t) / R_ji(t)` is constant over the positive times in `ts`.
pub fn response_ratio_test(gen: &Generator, i: usize, j: usize, ts: &[f64]) -> Result<RatioReport> {
    gen.check_index(i)?;
    gen.check_index(j)?;
    if i == j {
        return Err(Error::SameState(i));
    }
    let times: Vec<f64> = ts.iter().copied().filter(|&t| t > 0.0).collect();
    if times.len() < 2 {
        return Err(Error::BadTimeGrid(2));
    }
    let mut ratios = Vec::with_capacity(times.len());
    for &t in &times {
        let p = propagate(gen, t)?;
        let (rij, rji) = (p.response(i, j), p.response(j, i));
        if !(rji > 0.0) {
            return Err(Error::InvalidArgument(format!("R_ji({t}) is not positive")));
        }
        ratios.push(rij / rji);
    }
    let fitted_c = median(&ratios);
    let max_deviation = ratios
        .iter()
        .map(|r| (r - fitted_c).abs() / fitted_c.abs())
        .fold(0.0, f64::max);
    let n = steady_state(gen)?;
    let expected_c = n.values[j] / n.values[i];
    Ok(RatioReport {
        constant: max_deviation <= TAU_RATIO,
        fitted_c,
        max_deviation,
        times,
        ratios,
        expected_c,
        matches_steady_state: (fitted_c - expected_c).abs() <= TAU_RATIO * expected_c,
    })
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}
