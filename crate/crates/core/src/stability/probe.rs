use num_rational::BigRational;
use serde::Serialize;

use super::derivative::{fd_mixed_derivative, mixed_derivative, DeltaPair};
use super::{edge_matrix, path_perturbation, split_path, Epsilon, PathPerturbation};
use crate::balance::check_detailed_balance;
use crate::error::{Error, Result};
use crate::netmodel::{ClassAnnotation, Generator, Pair};
use crate::numerics::dense::{rat, rat_to_f64, Dense};
use crate::numerics::SteadyState;
use crate::pathwise::{check_pdb, delta_series_upto};
use crate::tol::TAU_DB;
use crate::topology::{
    check_stability_class_shape, path_through_edge, CutClassReport, SupportGraph,
};

/// Outcome of the probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProbeVerdict {
    /// Detailed balance holds; pathwise detailed balance follows for every pair.
    Db,
    /// Every violating edge is cut off from the pair by a cut vertex.
    CutShielded,
    /// A steady-state-preserving perturbation breaks pathwise detailed balance.
    Unstable,
    /// The perturbation left every `Δ_n` under tolerance.
    Inconclusive,
}

/// The perturbation tried by the probe. It witnesses instability only when
/// the verdict is [`ProbeVerdict::Unstable`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub perturbation: PathPerturbation,
    pub epsilon: f64,
    pub halvings: usize,
    /// Power at which `Δ_n(Ā)` was evaluated.
    pub n: usize,
    pub delta_value: f64,
    /// `|Δ_n(Ā)| / (N_i ‖Ā‖_∞ⁿ)`.
    pub relative_delta: f64,
}

/// Mixed derivative of `Δ_n(Ā(π))` in every `ε(e)`, `n` the path length.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Derivatives {
    pub n: usize,
    /// `N_j (N_{α₁}/N_{α₂} A^{α₁}_{α₂} − A^{α₂}_{α₁})`, `α` oriented along the path.
    pub closed_form: f64,
    /// Coefficient of `Π ε(e)`, from truncated multilinear arithmetic.
    pub exact: f64,
    pub finite_difference: f64,
    pub fd_step: f64,
    /// Whether `exact` and `finite_difference` used rational arithmetic.
    pub rational: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub verdict: ProbeVerdict,
    pub pair: (usize, usize),
    pub pdb_holds: bool,
    pub db_holds: bool,
    /// `None` when the probe is inconclusive.
    pub stable: Option<bool>,
    /// The violating edge the witness path runs through.
    pub violating_edge: Option<Pair>,
    /// Violating edges with no simple path from `i` to `j` through them.
    pub shielded_edges: Vec<Pair>,
    pub witness: Option<Witness>,
    pub cut_class: Option<CutClassReport>,
    pub derivatives: Option<Derivatives>,
}

const EPS_FACTOR: f64 = 1e-3;
const MAX_HALVINGS: usize = 40;

/// Tries to break pathwise detailed balance of `(i, j)` with a perturbation
/// that keeps `N`.
///
/// Violating edges are taken in decreasing order of DB residual (ties by
/// pair order); the first one that some simple path from `i` to `j` runs
/// through is used. Every other edge of that path gets `ε = 10⁻³ ×` the
/// smallest positive rate on the path, and `Δ_n` of the perturbed generator
/// is evaluated at `n` = path length, then at every other `n < L`.
pub fn instability_probe(
    gen: &Generator,
    n: &SteadyState,
    i: usize,
    j: usize,
) -> Result<StabilityVerdict> {
    instability_probe_with(gen, n, i, j, None)
}

/// [`instability_probe`] with an explicit starting `ε` for the witness.
pub fn instability_probe_with(
    gen: &Generator,
    n: &SteadyState,
    i: usize,
    j: usize,
    epsilon: Option<f64>,
) -> Result<StabilityVerdict> {
    if let Some(e) = epsilon.filter(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {e}")));
    }
    let pdb = check_pdb(gen, n, i, j)?;
    let db = check_detailed_balance(gen, n);
    let mut verdict = StabilityVerdict {
        verdict: ProbeVerdict::Db,
        pair: (i, j),
        pdb_holds: pdb.holds,
        db_holds: db.satisfied,
        stable: Some(true),
        violating_edge: None,
        shielded_edges: Vec::new(),
        witness: None,
        cut_class: None,
        derivatives: None,
    };
    if db.satisfied {
        return Ok(verdict);
    }
    if !pdb.holds {
        return Err(Error::PdbViolated(i, j));
    }
    let g = SupportGraph::from_generator(gen);
    let mut found = None;
    for (alpha, _) in db.violations() {
        match path_through_edge(&g, i, j, alpha) {
            Ok(path) => {
                found = Some((alpha, path));
                break;
            }
            Err(Error::NoPath { .. }) => verdict.shielded_edges.push(alpha),
            Err(e) => return Err(e),
        }
    }
    let Some((alpha, path)) = found else {
        let balanced = db
            .residuals
            .iter()
            .filter(|(_, r)| *r <= TAU_DB)
            .map(|(p, _)| *p);
        let annotation = ClassAnnotation::new([], balanced)?;
        verdict.verdict = ProbeVerdict::CutShielded;
        verdict.cut_class = Some(shielding_cut(&g, &annotation, i, j)?);
        return Ok(verdict);
    };
    verdict.violating_edge = Some(alpha);

    let a = gen.matrix();
    let min_rate = path
        .edges()
        .iter()
        .flat_map(|&(u, v)| [a[(u, v)], a[(v, u)]])
        .filter(|&r| r > 0.0)
        .fold(f64::INFINITY, f64::min);
    let mut epsilon = epsilon.unwrap_or(EPS_FACTOR * min_rate);
    let mut halvings = 0;
    let (perturbation, perturbed) = loop {
        let p = path_perturbation(n, &path, alpha, &Epsilon::Common(epsilon))?;
        match p.apply(gen) {
            Ok(g2) => break (p, g2),
            Err(Error::Infeasible(_)) if halvings < MAX_HALVINGS => {
                epsilon /= 2.0;
                halvings += 1;
            }
            Err(e) => return Err(e),
        }
    };
    if perturbation.epsilons.is_empty() {
        return Err(Error::InvalidArgument(
            "the witness path consists of the violating edge alone".into(),
        ));
    }

    // Ā keeps N, so the unperturbed steady state is reused (float path).
    let n_float = SteadyState {
        exact: None,
        ..n.clone()
    };
    let len = path.len();
    let series = delta_series_upto(&perturbed, &n_float, i, j, len.max(gen.dim() - 1))?;
    let order = std::iter::once(len).chain((1..gen.dim()).filter(|&k| k != len));
    let failing = order.into_iter().find(|&k| !series.passes(k - 1));
    let shown = failing.unwrap_or(len);
    verdict.witness = Some(Witness {
        perturbation: perturbation.clone(),
        epsilon,
        halvings,
        n: shown,
        delta_value: series.values[shown - 1],
        relative_delta: series.relative(shown),
    });
    verdict.derivatives = Some(derivatives(gen, n, &perturbation, alpha, i, j, len)?);
    if failing.is_some() {
        verdict.verdict = ProbeVerdict::Unstable;
        verdict.stable = Some(false);
    } else {
        verdict.verdict = ProbeVerdict::Inconclusive;
        verdict.stable = None;
    }
    Ok(verdict)
}

fn shielding_cut(
    g: &SupportGraph,
    annotation: &ClassAnnotation,
    i: usize,
    j: usize,
) -> Result<CutClassReport> {
    let report = check_stability_class_shape(g, annotation)?;
    if report.shields(i, j) {
        return Ok(report);
    }
    // Prefer a cut vertex whose balanced side holds the pair.
    let cuts = crate::topology::find_cut_vertices(g)?;
    for x in cuts {
        let r = crate::topology::cut_class_at(g, annotation, x);
        if r.shields(i, j) {
            return Ok(r);
        }
    }
    Ok(report)
}

fn fd_step(k: usize) -> f64 {
    // Rounding in Δ is amplified by (2h)^-k; keep h^k near 1e-8.
    1e-4f64.max(10f64.powf(-8.0 / k as f64))
}

fn derivatives(
    gen: &Generator,
    n: &SteadyState,
    perturbation: &PathPerturbation,
    alpha: Pair,
    i: usize,
    j: usize,
    len: usize,
) -> Result<Derivatives> {
    let (edges, (a1, a2)) = split_path(&perturbation.path, alpha)?;
    let a = gen.matrix();
    let nv = &n.values;
    let closed_form = nv[j] * (nv[a1] / nv[a2] * a[(a2, a1)] - a[(a1, a2)]);
    if let (Some(ea), Some(en)) = (gen.exact(), n.exact.as_ref()) {
        let ds: Vec<Dense<BigRational>> =
            edges.iter().map(|&(u, v)| edge_matrix(en, u, v)).collect();
        let pair = DeltaPair {
            n_i: &en[i],
            n_j: &en[j],
            i,
            j,
        };
        let exact = mixed_derivative(ea, &ds, pair, len);
        let fd = fd_mixed_derivative(ea, &ds, pair, len, rat(1, 10_000));
        return Ok(Derivatives {
            n: len,
            closed_form,
            exact: rat_to_f64(&exact),
            finite_difference: rat_to_f64(&fd),
            fd_step: 1e-4,
            rational: true,
        });
    }
    let ds: Vec<Dense<f64>> = edges.iter().map(|&(u, v)| edge_matrix(nv, u, v)).collect();
    let pair = DeltaPair {
        n_i: &nv[i],
        n_j: &nv[j],
        i,
        j,
    };
    let h = fd_step(ds.len());
    Ok(Derivatives {
        n: len,
        closed_form,
        exact: mixed_derivative(a, &ds, pair, len),
        finite_difference: fd_mixed_derivative(a, &ds, pair, len, h),
        fd_step: h,
        rational: false,
    })
}
