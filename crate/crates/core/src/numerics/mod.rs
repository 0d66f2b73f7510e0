//! Steady states, matrix powers and the uniformized matrix exponential.

pub mod dense;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use statrs::distribution::{Discrete, DiscreteCDF, Poisson};

use crate::error::{Error, Result};
use crate::netmodel::{check_ergodic, Generator};
use crate::tol::{K_MAX, N_MAX, TAU_EXP};
use dense::{rat_to_f64, Dense, Scalar};

/// Normalized positive kernel vector of an ergodic generator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SteadyState {
    pub values: Vec<f64>,
    /// Present when computed in exact arithmetic.
    #[serde(skip)]
    pub exact: Option<Vec<BigRational>>,
    /// `‖AN‖_∞`.
    pub residual: f64,
    /// `|‖N‖₁ − 1|`.
    pub norm_deviation: f64,
}

impl SteadyState {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Wraps a known vector, recording its residual against `gen`.
    pub fn from_values(gen: &Generator, values: Vec<f64>) -> Self {
        let residual = gen
            .matrix()
            .mul_vec(&values)
            .iter()
            .fold(0.0, |m, x| x.abs().max(m));
        let norm_deviation = (values.iter().sum::<f64>() - 1.0).abs();
        Self {
            values,
            exact: None,
            residual,
            norm_deviation,
        }
    }
}

fn normalization_row<T: Scalar>(a: &Dense<T>) -> usize {
    // Row with the largest |diagonal|; first one on ties.
    let mut best = 0;
    for r in 1..a.dim() {
        if a[(r, r)].abs() > a[(best, best)].abs() {
            best = r;
        }
    }
    best
}

fn kernel_vector<T: Scalar>(a: &Dense<T>) -> Result<Vec<T>> {
    let n = a.dim();
    let r = normalization_row(a);
    let mut m = a.clone();
    for c in 0..n {
        m[(r, c)] = T::one();
    }
    let mut rhs = vec![T::zero(); n];
    rhs[r] = T::one();
    m.solve(&rhs)
}

fn require_ergodic(gen: &Generator) -> Result<()> {
    let report = check_ergodic(gen);
    if !report.ergodic {
        let (a, b) = report.witness.unwrap_or((0, 0));
        return Err(Error::NotErgodic(format!(
            "{} strongly connected components; state {b} unreachable from {a}",
            report.scc_count
        )));
    }
    Ok(())
}

/// Floating-point steady state.
pub fn steady_state(gen: &Generator) -> Result<SteadyState> {
    require_ergodic(gen)?;
    let values = kernel_vector(gen.matrix())?;
    if let Some(k) = values.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::NotErgodic(format!("steady state entry {k} is {}", values[k])));
    }
    Ok(SteadyState::from_values(gen, values))
}

/// Exact steady state for rational generators; falls back to the float
/// solve when the generator has no exact form.
pub fn steady_state_exact(gen: &Generator) -> Result<SteadyState> {
    let Some(a) = gen.exact() else {
        return steady_state(gen);
    };
    require_ergodic(gen)?;
    let exact = kernel_vector(a)?;
    if let Some(k) = exact.iter().position(|x| !x.is_positive()) {
        return Err(Error::NotErgodic(format!("steady state entry {k} is {}", exact[k])));
    }
    let mut ss = SteadyState::from_values(gen, exact.iter().map(rat_to_f64).collect());
    ss.exact = Some(exact);
    Ok(ss)
}

/// `Aⁿ v` by repeated multiplication, with the default cap [`N_MAX`].
pub fn matrix_power_apply(gen: &Generator, n: usize, v: &[f64]) -> Result<Vec<f64>> {
    power_apply(gen.matrix(), n, v, N_MAX)
}

/// `Aⁿ v` in exact arithmetic.
pub fn matrix_power_apply_exact(
    gen: &Generator,
    n: usize,
    v: &[BigRational],
) -> Result<Option<Vec<BigRational>>> {
    gen.exact()
        .map(|a| power_apply(a, n, v, N_MAX))
        .transpose()
}

pub fn power_apply<T: Scalar>(a: &Dense<T>, n: usize, v: &[T], n_max: usize) -> Result<Vec<T>> {
    if n > n_max {
        return Err(Error::PowerTooLarge { n, max: n_max });
    }
    let mut x = v.to_vec();
    for _ in 0..n {
        x = a.mul_vec(&x);
    }
    Ok(x)
}

/// Basis vector `e_i`.
pub fn unit<T: Scalar>(dim: usize, i: usize) -> Vec<T> {
    let mut v = vec![T::zero(); dim];
    v[i] = T::one();
    v
}

pub fn unit_exact(dim: usize, i: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); dim];
    v[i] = BigRational::one();
    v
}

/// `e^{tM}` for a generator or sub-generator `M`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Propagator {
    pub time: f64,
    pub matrix: Dense<f64>,
    /// Poisson tail mass left out of the truncated series.
    pub truncation_bound: f64,
}

impl Propagator {
    /// `⟨e_j, e^{tA} e_i⟩`.
    pub fn response(&self, i: usize, j: usize) -> f64 {
        self.matrix[(j, i)]
    }
}

pub fn propagate(gen: &Generator, t: f64) -> Result<Propagator> {
    uniformize(gen.matrix(), t)
}

/// Uniformization of any matrix with nonnegative off-diagonals and
/// nonpositive column sums; the result is column sub-stochastic.
pub fn uniformize(m: &Dense<f64>, t: f64) -> Result<Propagator> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::BadTime(t));
    }
    let dim = m.dim();
    let gamma = (0..dim).map(|i| m[(i, i)].abs()).fold(0.0, f64::max);
    if gamma == 0.0 || t == 0.0 {
        return Ok(Propagator {
            time: t,
            matrix: Dense::identity(dim),
            truncation_bound: 0.0,
        });
    }
    let lambda = gamma * t;
    let poisson = Poisson::new(lambda).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let (order, tail) = truncation_order(&poisson, lambda)?;
    let p = Dense::identity(dim).add(&m.scale(&(1.0 / gamma)));
    let mut power = Dense::<f64>::identity(dim);
    let mut acc = Dense::<f64>::zeros(dim, dim);
    for k in 0..=order {
        let w = poisson.ln_pmf(k as u64).exp();
        if w > 0.0 {
            acc = acc.add(&power.scale(&w));
        }
        if k < order {
            power = p.matmul(&power);
        }
    }
    Ok(Propagator {
        time: t,
        matrix: acc,
        truncation_bound: tail,
    })
}

fn truncation_order(poisson: &Poisson, lambda: f64) -> Result<(usize, f64)> {
    let mut k = lambda.floor() as u64;
    let step = (lambda.sqrt().ceil() as u64).max(1);
    while poisson.sf(k) > TAU_EXP {
        k += step;
        if k as usize > K_MAX {
            return Err(Error::TruncationTooLarge {
                needed: k as usize,
                limit: K_MAX,
            });
        }
    }
    // Walk back to the smallest order meeting the bound.
    while k > 0 && poisson.sf(k - 1) <= TAU_EXP {
        k -= 1;
    }
    Ok((k as usize, poisson.sf(k)))
}
