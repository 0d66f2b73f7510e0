//! Jump-chain simulation of single trajectories and Monte Carlo estimates
//! of response functions.
//!
//! Randomness comes from ChaCha8 with a 64-bit seed; trajectory `k` of an
//! ensemble uses stream `k`, so estimates do not depend on how trajectories
//! are spread over threads.

mod regenerative;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::netmodel::Generator;

pub use regenerative::{estimate_response_regenerative, RegenerativeEstimate};

/// Normal quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.96;

/// Exit rates and cumulative jump weights per state.
#[derive(Clone, Debug)]
pub(crate) struct JumpTable {
    exit: Vec<f64>,
    /// `(target, cumulative rate)` per source state.
    targets: Vec<Vec<(usize, f64)>>,
}

impl JumpTable {
    pub(crate) fn new(gen: &Generator) -> Self {
        let a = gen.matrix();
        let dim = gen.dim();
        let mut exit = Vec::with_capacity(dim);
        let mut targets = Vec::with_capacity(dim);
        for s in 0..dim {
            let mut acc = 0.0;
            let mut list = Vec::new();
            for t in (0..dim).filter(|&t| t != s && a[(t, s)] > 0.0) {
                acc += a[(t, s)];
                list.push((t, acc));
            }
            exit.push(acc);
            targets.push(list);
        }
        Self { exit, targets }
    }
}

/// A single process `X_t` with its own random stream.
pub(crate) struct Walker<'a> {
    table: &'a JumpTable,
    rng: ChaCha8Rng,
    /// Current state and the time it was entered.
    pub(crate) state: usize,
    pub(crate) entered: f64,
    /// Time of the pending jump out of `state`.
    pub(crate) next_jump: f64,
}

impl<'a> Walker<'a> {
    pub(crate) fn new(table: &'a JumpTable, rng: ChaCha8Rng, start: usize) -> Self {
        let mut w = Self {
            table,
            rng,
            state: start,
            entered: 0.0,
            next_jump: 0.0,
        };
        w.schedule();
        w
    }

    fn schedule(&mut self) {
        let rate = self.table.exit[self.state];
        self.next_jump = if rate > 0.0 {
            let e: f64 = self.rng.sample(Exp1);
            self.entered + e / rate
        } else {
            f64::INFINITY
        };
    }

    /// Performs the pending jump.
    pub(crate) fn jump(&mut self) -> Result<()> {
        if self.next_jump.is_infinite() {
            return Err(Error::Absorbing {
                state: self.state,
                time: self.entered,
            });
        }
        let list = &self.table.targets[self.state];
        let total = self.table.exit[self.state];
        let u = self.rng.random::<f64>() * total;
        let next = list
            .iter()
            .find(|&&(_, cum)| u < cum)
            .unwrap_or_else(|| list.last().expect("positive exit rate"))
            .0;
        self.entered = self.next_jump;
        self.state = next;
        self.schedule();
        Ok(())
    }

    /// Advances to time `t` and returns `X_t`. An absorbing state is an
    /// error as soon as it is entered.
    pub(crate) fn state_at(&mut self, t: f64) -> Result<usize> {
        while self.next_jump <= t {
            self.jump()?;
        }
        if self.next_jump.is_infinite() {
            return Err(Error::Absorbing {
                state: self.state,
                time: self.entered,
            });
        }
        Ok(self.state)
    }
}

pub(crate) fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A simulated path up to a horizon.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub initial_state: usize,
    pub horizon: f64,
    pub jump_times: Vec<f64>,
    /// Visited states; one longer than `jump_times`.
    pub states: Vec<usize>,
    pub rng_seed: u64,
}

impl Trajectory {
    /// `X_t` for `0 ≤ t ≤ horizon`.
    pub fn state_at(&self, t: f64) -> usize {
        let k = self.jump_times.partition_point(|&s| s <= t);
        self.states[k]
    }

    /// Time spent in each state up to the horizon.
    pub fn occupation(&self, dim: usize) -> Vec<f64> {
        let mut occ = vec![0.0; dim];
        let mut last = 0.0;
        for (k, &t) in self.jump_times.iter().enumerate() {
            occ[self.states[k]] += t - last;
            last = t;
        }
        occ[*self.states.last().expect("nonempty")] += self.horizon - last;
        occ
    }
}

/// Holding times are exponential with rate `|A_ss|`; the next state is drawn
/// in proportion to the off-diagonal entries of column `s`.
pub fn simulate(gen: &Generator, start: usize, horizon: f64, seed: u64) -> Result<Trajectory> {
    gen.check_index(start)?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::BadTime(horizon));
    }
    let table = JumpTable::new(gen);
    let mut w = Walker::new(&table, stream(seed, 0), start);
    let mut jump_times = Vec::new();
    let mut states = vec![start];
    loop {
        if w.next_jump.is_infinite() {
            return Err(Error::Absorbing {
                state: w.state,
                time: w.entered,
            });
        }
        if w.next_jump > horizon {
            break;
        }
        w.jump()?;
        jump_times.push(w.entered);
        states.push(w.state);
    }
    Ok(Trajectory {
        initial_state: start,
        horizon,
        jump_times,
        states,
        rng_seed: seed,
    })
}

/// Indicator averages for `R_ij(t)` over independent trajectories.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResponseEstimate {
    pub pair: (usize, usize),
    pub times: Vec<f64>,
    pub estimates: Vec<f64>,
    /// `1.96 √(p̂(1 − p̂)/N)`.
    pub half_widths: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl ResponseEstimate {
    /// CSV with header `t,estimate,half_width,samples`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,estimate,half_width,samples\n");
        for k in 0..self.times.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{}",
                self.times[k], self.estimates[k], self.half_widths[k], self.samples
            )
            .expect("string write");
        }
        out
    }

    /// Whether `value` lies in the interval at grid point `k`.
    pub fn covers(&self, k: usize, value: f64) -> bool {
        (self.estimates[k] - value).abs() <= self.half_widths[k]
    }
}

pub fn half_width(p: f64, samples: usize) -> f64 {
    Z95 * (p * (1.0 - p) / samples as f64).sqrt()
}

pub const MIN_SAMPLES: usize = 100;

/// Runs `samples` trajectories from `i` and averages `1{X_t = j}` on the
/// grid. `workers = 0` uses the global thread pool.
pub fn estimate_response_iid(
    gen: &Generator,
    i: usize,
    j: usize,
    times: &[f64],
    samples: usize,
    seed: u64,
    workers: usize,
) -> Result<ResponseEstimate> {
    gen.check_index(i)?;
    gen.check_index(j)?;
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_SAMPLES} samples required, got {samples}"
        )));
    }
    if let Some(&t) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::BadTime(t));
    }
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
    let table = JumpTable::new(gen);
    let run = |k: usize| -> Result<Vec<u64>> {
        let mut w = Walker::new(&table, stream(seed, k as u64), i);
        let mut hits = vec![0u64; times.len()];
        for &idx in &order {
            if w.state_at(times[idx])? == j {
                hits[idx] = 1;
            }
        }
        Ok(hits)
    };
    let add = |a: Result<Vec<u64>>, b: Result<Vec<u64>>| -> Result<Vec<u64>> {
        let (mut a, b) = (a?, b?);
        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        Ok(a)
    };
    let zero = || Ok(vec![0u64; times.len()]);
    let counts = if workers == 0 {
        (0..samples).into_par_iter().map(run).reduce(zero, add)?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(|| (0..samples).into_par_iter().map(run).reduce(zero, add))?
    };
    let estimates: Vec<f64> = counts.iter().map(|&c| c as f64 / samples as f64).collect();
    Ok(ResponseEstimate {
        pair: (i, j),
        times: times.to_vec(),
        half_widths: estimates.iter().map(|&p| half_width(p, samples)).collect(),
        estimates,
        samples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::dense::Dense;

    fn two_state() -> Generator {
        Generator::from_matrix(Dense::from_rows(&[vec![-1.0, 2.0], vec![1.0, -2.0]])).unwrap()
    }

    #[test]
    fn same_seed_same_path() {
        let a = simulate(&two_state(), 0, 50.0, 3).unwrap();
        let b = simulate(&two_state(), 0, 50.0, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.jump_times.windows(2).all(|w| w[0] < w[1]));
        assert!(a.states.windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn absorbing_state_errors() {
        let gen = Generator::from_matrix(Dense::from_rows(&[vec![0.0, 1.0], vec![0.0, -1.0]]))
            .unwrap();
        assert!(matches!(
            simulate(&gen, 1, 10.0, 1),
            Err(Error::Absorbing { state: 0, .. })
        ));
    }

    #[test]
    fn time_zero_is_exact() {
        let est = estimate_response_iid(&two_state(), 0, 0, &[0.0, 1.0], 200, 1, 1).unwrap();
        assert_eq!(est.estimates[0], 1.0);
        assert_eq!(est.half_widths[0], 0.0);
        assert!(est.to_csv().starts_with("t,estimate,half_width,samples\n"));
    }
}
