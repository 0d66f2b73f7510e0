//! Perturbations that keep the steady state, the instability probe for
//! pathwise detailed balance, random sampling inside a stability class, and
//! the dimension counts behind the choice of measurements.

mod derivative;
mod dims;
mod probe;
mod sampling;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::netmodel::{Generator, Pair};
use crate::numerics::dense::{Dense, Scalar};
use crate::numerics::SteadyState;
use crate::topology::PathCertificate;

pub use derivative::{delta_along, fd_mixed_derivative, mixed_derivative, DeltaPair};
pub use dims::{
    dimension_report, nonreciprocal_rank_check, printed_linearization, DimensionReport,
    RankReport,
};
pub use probe::{instability_probe, instability_probe_with, Derivatives, ProbeVerdict, StabilityVerdict, Witness};
pub use sampling::{
    class_preserving_perturbation, rebalance, stability_sampling, SamplingConfig,
    SamplingReport,
};

/// `D(e)` for a directed edge `e = (e₁, e₂)`: raises the rate `e₁ → e₂` by
/// one and `e₂ → e₁` by `N_{e₁}/N_{e₂}`, with matching diagonal losses, so
/// columns still sum to zero and `D(e) N = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgePerturbation {
    pub edge: (usize, usize),
    pub matrix: Dense<f64>,
    pub steady_state_used: Vec<f64>,
}

pub(crate) fn edge_matrix<T: Scalar>(n: &[T], e1: usize, e2: usize) -> Dense<T> {
    let ratio = n[e1].clone() / n[e2].clone();
    let mut d = Dense::zeros(n.len(), n.len());
    d[(e1, e2)] = ratio.clone();
    d[(e2, e1)] = T::one();
    d[(e1, e1)] = -T::one();
    d[(e2, e2)] = -ratio;
    d
}

/// Largest of `|column sums|` and `|D N|` entries.
pub fn conservation_defect(d: &Dense<f64>, n: &[f64]) -> f64 {
    let cols = (0..d.dim()).map(|c| d.column(c).iter().sum::<f64>().abs());
    let dn = d.mul_vec(n).into_iter().map(f64::abs);
    cols.chain(dn).fold(0.0, f64::max)
}

pub fn edge_perturbation(n: &SteadyState, e1: usize, e2: usize) -> Result<EdgePerturbation> {
    for index in [e1, e2] {
        if index >= n.dim() {
            return Err(Error::StateOutOfRange { index, dim: n.dim() });
        }
    }
    if e1 == e2 {
        return Err(Error::SameState(e1));
    }
    let matrix = edge_matrix(&n.values, e1, e2);
    debug_assert!(conservation_defect(&matrix, &n.values) < 1e-12);
    Ok(EdgePerturbation {
        edge: (e1, e2),
        matrix,
        steady_state_used: n.values.clone(),
    })
}

/// Size of each `ε(e)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Epsilon {
    Common(f64),
    /// One value per perturbed edge, in path order.
    PerEdge(Vec<f64>),
}

/// `D(π) = Σ_{e ∈ π, e ≠ α} ε(e) D(e)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathPerturbation {
    pub path: PathCertificate,
    pub excluded_edge: (usize, usize),
    /// Perturbed edges in path order with their `ε`.
    pub epsilons: Vec<((usize, usize), f64)>,
    pub matrix: Dense<f64>,
}

impl PathPerturbation {
    /// `Ā(π) = A + D(π)`; fails if a rate would turn negative.
    pub fn apply(&self, gen: &Generator) -> Result<Generator> {
        let m = gen.matrix().add(&self.matrix);
        for r in 0..m.dim() {
            for c in 0..m.dim() {
                if r != c && m[(r, c)] < 0.0 {
                    return Err(Error::Infeasible(format!(
                        "rate {c} -> {r} would become {}",
                        m[(r, c)]
                    )));
                }
            }
        }
        Generator::from_offdiag(m)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.epsilons.iter().map(|e| e.0).collect()
    }
}

/// Path edges other than `alpha`, oriented along the path, and `alpha`'s
/// orientation.
pub(crate) fn split_path(
    path: &PathCertificate,
    alpha: Pair,
) -> Result<(Vec<(usize, usize)>, (usize, usize))> {
    let mut oriented = None;
    let mut rest = Vec::new();
    for (a, b) in path.edges() {
        if Pair::new(a, b) == Some(alpha) {
            oriented = Some((a, b));
        } else {
            rest.push((a, b));
        }
    }
    let alpha = oriented.ok_or_else(|| {
        Error::InvalidArgument(format!("edge ({}, {}) is not on the path", alpha.lo(), alpha.hi()))
    })?;
    Ok((rest, alpha))
}

pub fn path_perturbation(
    n: &SteadyState,
    path: &PathCertificate,
    alpha: Pair,
    eps: &Epsilon,
) -> Result<PathPerturbation> {
    let (edges, excluded_edge) = split_path(path, alpha)?;
    let values = match eps {
        Epsilon::Common(e) => vec![*e; edges.len()],
        Epsilon::PerEdge(v) if v.len() == edges.len() => v.clone(),
        Epsilon::PerEdge(v) => {
            return Err(Error::InvalidArgument(format!(
                "{} epsilons for {} edges",
                v.len(),
                edges.len()
            )))
        }
    };
    if let Some(bad) = values.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidArgument(format!("epsilon {bad} is not positive")));
    }
    let mut matrix = Dense::zeros(n.dim(), n.dim());
    for (&(a, b), &e) in edges.iter().zip(&values) {
        matrix = matrix.add(&edge_matrix(&n.values, a, b).scale(&e));
    }
    Ok(PathPerturbation {
        path: path.clone(),
        excluded_edge,
        epsilons: edges.into_iter().zip(values).collect(),
        matrix,
    })
}
