use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::balance::db_residual;
use crate::error::{Error, Result};
use crate::netmodel::{ClassAnnotation, Generator, Network, Pair};
use crate::numerics::dense::Dense;
use crate::numerics::steady_state;
use crate::pathwise::check_pdb;
use crate::tol::TAU_DB;

/// Parameters of [`stability_sampling`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplingConfig {
    pub trials: usize,
    /// Largest change of a single rate.
    pub radius: f64,
    pub seed: u64,
    /// Also give forbidden pairs small rates.
    pub weak_topology: bool,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            radius: 1e-3,
            seed: 0,
            weak_topology: false,
            workers: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplingReport {
    pub trials: usize,
    /// Trials after which pathwise detailed balance failed.
    pub violations: usize,
    /// Largest `|Δ_n| / (N_i ‖A‖_∞ⁿ)` seen.
    pub max_delta: f64,
    /// Trials whose perturbed generator satisfied detailed balance.
    pub db_count: usize,
    /// Trials where rebalancing did not converge; these are not counted
    /// as passes or violations.
    pub not_converged: usize,
    pub seed: u64,
}

const MAX_REBALANCE: usize = 100;
/// Rebalancing stops early once the class residual reaches this level.
const REBALANCE_TARGET: f64 = 1e-14;

/// Restores detailed balance on the balanced pairs: with `N` the steady
/// state of the current matrix, sets `rate(hi → lo) := rate(lo → hi) N_lo / N_hi`
/// and repeats. Returns the generator and the number of iterations.
pub fn rebalance(mut m: Dense<f64>, balanced: &[Pair]) -> Result<(Generator, usize)> {
    let mut best = f64::INFINITY;
    for iter in 0..=MAX_REBALANCE {
        let gen = Generator::from_offdiag(m.clone())?;
        let n = steady_state(&gen)?;
        let residual = balanced
            .iter()
            .map(|p| db_residual(gen.matrix(), &n.values, p.lo(), p.hi()))
            .fold(0.0, f64::max);
        let stalled = residual >= best;
        best = best.min(residual);
        if residual <= REBALANCE_TARGET || (stalled && residual <= TAU_DB) {
            return Ok((gen, iter));
        }
        if iter == MAX_REBALANCE || (stalled && iter > 10) {
            break;
        }
        for p in balanced {
            let (lo, hi) = (p.lo(), p.hi());
            m[(lo, hi)] = m[(hi, lo)] * n.values[lo] / n.values[hi];
        }
    }
    Err(Error::NoConvergence(MAX_REBALANCE))
}

/// One random member of the class near `gen`: unconstrained rates move by
/// up to `radius` and stay positive (absent ones may appear), the forward
/// rate of each balanced pair moves likewise before rebalancing, and
/// forbidden pairs stay zero unless `weak` is set. A new weak reaction must
/// not carry a net flux into the balanced block, so it is rebalanced along
/// with the balanced pairs.
pub fn class_preserving_perturbation<R: Rng>(
    gen: &Generator,
    class: &ClassAnnotation,
    radius: f64,
    weak: bool,
    rng: &mut R,
) -> Result<Generator> {
    let dim = gen.dim();
    let mut m = gen.matrix().clone();
    let mut weak_pairs = Vec::new();
    let nudge = |m: &mut Dense<f64>, from: usize, to: usize, rng: &mut R| {
        let old = m[(to, from)];
        m[(to, from)] = if old > 0.0 {
            let new = old + radius * rng.random_range(-1.0..=1.0);
            if new > 0.0 {
                new
            } else {
                old / 2.0
            }
        } else {
            radius * rng.random::<f64>()
        };
    };
    for p in Pair::all(dim) {
        let (lo, hi) = (p.lo(), p.hi());
        if class.forbidden.contains(&p) {
            if weak {
                nudge(&mut m, lo, hi, rng);
                weak_pairs.push(p);
            }
        } else if class.balanced.contains(&p) {
            if m[(hi, lo)] > 0.0 {
                nudge(&mut m, lo, hi, rng);
            }
        } else {
            nudge(&mut m, lo, hi, rng);
            nudge(&mut m, hi, lo, rng);
        }
    }
    let balanced: Vec<Pair> = class.balanced.iter().copied().chain(weak_pairs).collect();
    Ok(rebalance(m, &balanced)?.0)
}

enum Trial {
    Done { pdb: bool, db: bool, delta: f64 },
    NotConverged,
}

/// Re-tests pathwise detailed balance of `(i, j)` on `trials` random
/// class members around `net`. Trial `k` draws from stream `k` of a
/// ChaCha8 generator seeded with `seed`, so results do not depend on the
/// number of workers.
pub fn stability_sampling(
    net: &Network,
    i: usize,
    j: usize,
    config: &SamplingConfig,
) -> Result<SamplingReport> {
    let class = net.class().ok_or(Error::MissingAnnotation)?;
    let gen = net.generator();
    let n = steady_state(&gen)?;
    if !check_pdb(&gen, &n, i, j)?.holds {
        return Err(Error::PdbViolated(i, j));
    }
    let run = |k: usize| -> Result<Trial> {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(k as u64);
        let perturbed = match class_preserving_perturbation(
            &gen,
            class,
            config.radius,
            config.weak_topology,
            &mut rng,
        ) {
            Ok(g) => g,
            Err(Error::NoConvergence(_)) => return Ok(Trial::NotConverged),
            Err(e) => return Err(e),
        };
        let n = steady_state(&perturbed)?;
        let report = check_pdb(&perturbed, &n, i, j)?;
        let delta = (1..perturbed.dim())
            .map(|k| report.series.relative(k))
            .fold(0.0, f64::max);
        let db = crate::balance::check_detailed_balance(&perturbed, &n).satisfied;
        Ok(Trial::Done {
            pdb: report.holds,
            db,
            delta,
        })
    };
    let results: Vec<Result<Trial>> = if config.workers == 0 {
        (0..config.trials).into_par_iter().map(run).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(|| (0..config.trials).into_par_iter().map(run).collect())
    };
    let mut report = SamplingReport {
        trials: config.trials,
        violations: 0,
        max_delta: 0.0,
        db_count: 0,
        not_converged: 0,
        seed: config.seed,
    };
    for r in results {
        match r? {
            Trial::Done { pdb, db, delta } => {
                report.violations += usize::from(!pdb);
                report.db_count += usize::from(db);
                report.max_delta = report.max_delta.max(delta);
            }
            Trial::NotConverged => report.not_converged += 1,
        }
    }
    Ok(report)
}
