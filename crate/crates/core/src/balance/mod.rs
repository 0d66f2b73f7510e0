//! Detailed balance: direct check, symmetrization, spanning-tree energy
//! vectors, and the extended condition for networks with sources and sinks.

mod open;
mod trees;

use serde::Serialize;

use crate::netmodel::{Generator, Pair};
use crate::numerics::dense::Dense;
use crate::numerics::SteadyState;
use crate::tol::{EPS_FLOOR, TAU_DB};

pub use open::{
    check_extended_db, closed_response, compartment_block, compartment_block_exact,
    loss_matrix, open_response, ExtendedDbReport, ResponseSeries,
};
pub use trees::{db_via_trees, fundamental_trees, spanning_tree_energy, EnergyVector, TreeDbReport};

/// Relative residual `|A_ij N_j − A_ji N_i| / max(A_ij N_j, A_ji N_i, ε)`.
///
/// A one-way pair gives 1; a pair with no rate either way gives 0.
pub fn db_residual(a: &Dense<f64>, n: &[f64], i: usize, j: usize) -> f64 {
    let x = a[(i, j)] * n[j];
    let y = a[(j, i)] * n[i];
    (x - y).abs() / x.max(y).max(EPS_FLOOR)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DbReport {
    pub satisfied: bool,
    pub worst_pair: Option<Pair>,
    pub worst_residual: f64,
    /// Residual of every pair with a positive rate in some direction.
    pub residuals: Vec<(Pair, f64)>,
}

impl DbReport {
    /// Pairs over `τ_db`, largest residual first, ties in pair order.
    pub fn violations(&self) -> Vec<(Pair, f64)> {
        let mut v: Vec<_> = self
            .residuals
            .iter()
            .copied()
            .filter(|&(_, r)| r > TAU_DB)
            .collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }
}

pub fn check_detailed_balance(gen: &Generator, n: &SteadyState) -> DbReport {
    let a = gen.matrix();
    let mut residuals = Vec::new();
    let mut worst: Option<(Pair, f64)> = None;
    for p in Pair::all(gen.dim()) {
        let (i, j) = (p.lo(), p.hi());
        if a[(i, j)] == 0.0 && a[(j, i)] == 0.0 {
            continue;
        }
        let r = db_residual(a, &n.values, i, j);
        residuals.push((p, r));
        if worst.is_none_or(|(_, w)| r > w) {
            worst = Some((p, r));
        }
    }
    let worst_residual = worst.map_or(0.0, |w| w.1);
    DbReport {
        satisfied: worst_residual <= TAU_DB,
        worst_pair: worst.map(|w| w.0),
        worst_residual,
        residuals,
    }
}

/// `B = S⁻¹ A S` with `S = diag(√N)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetrizedGenerator {
    pub matrix: Dense<f64>,
    /// Diagonal of `S`.
    pub scaling: Vec<f64>,
    /// `‖B − Bᵀ‖_∞`.
    pub asymmetry: f64,
    /// Largest entrywise `|B_ij − B_ji| / max(|B_ij|, |B_ji|)`.
    pub relative_asymmetry: f64,
    /// Pair attaining `relative_asymmetry`.
    pub worst_pair: Option<Pair>,
}

impl SymmetrizedGenerator {
    pub fn is_symmetric(&self) -> bool {
        self.relative_asymmetry <= TAU_DB
    }

    /// `max(‖Bv‖_∞, ‖vᵀB‖_∞)` for `v = √N`.
    pub fn kernel_residual(&self) -> f64 {
        let b = &self.matrix;
        let right = b.mul_vec(&self.scaling);
        let left = b.transpose().mul_vec(&self.scaling);
        right.iter().chain(&left).fold(0.0, |m, x| x.abs().max(m))
    }
}

pub fn symmetrize(gen: &Generator, n: &SteadyState) -> SymmetrizedGenerator {
    let a = gen.matrix();
    let dim = gen.dim();
    let b = Dense::from_fn(dim, dim, |i, j| a[(i, j)] * (n.values[j] / n.values[i]).sqrt());
    let scaling = n.values.iter().map(|x| x.sqrt()).collect();
    let asymmetry = b.sub(&b.transpose()).norm_inf();
    let mut worst: Option<(Pair, f64)> = None;
    for p in Pair::all(dim) {
        let (x, y) = (b[(p.lo(), p.hi())], b[(p.hi(), p.lo())]);
        let r = (x - y).abs() / x.abs().max(y.abs()).max(EPS_FLOOR);
        if worst.is_none_or(|(_, w)| r > w) {
            worst = Some((p, r));
        }
    }
    SymmetrizedGenerator {
        matrix: b,
        scaling,
        asymmetry,
        relative_asymmetry: worst.map_or(0.0, |w| w.1),
        worst_pair: worst.filter(|w| w.1 > 0.0).map(|w| w.0),
    }
}
