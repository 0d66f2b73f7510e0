use num_rational::BigRational;
use num_traits::{Signed, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use super::Network;
use crate::error::{Error, Result};
use crate::numerics::dense::Dense;
use crate::tol::TAU_MARKOV;

/// Validated Markovian rate matrix `A`.
///
/// Column convention: `A[k][i]` is the rate of `i -> k` and the diagonal is
/// the negated column sum, so every column sums to zero. When all rates are
/// known exactly the rational matrix is kept alongside the float one.
#[derive(Clone, Debug)]
pub struct Generator {
    float: Dense<f64>,
    exact: Option<Dense<BigRational>>,
    column_residual: f64,
}

impl Generator {
    pub fn from_network(net: &Network) -> Self {
        let dim = net.dim();
        let mut exact = Dense::<BigRational>::zeros(dim, dim);
        for (&(from, to), rate) in net.rates() {
            exact[(to, from)] = rate.value().clone();
        }
        Self::from_exact_offdiag(exact)
    }

    /// Takes the off-diagonal entries of `m` (which must be nonnegative) and
    /// derives the diagonal exactly.
    pub fn from_exact_offdiag(mut m: Dense<BigRational>) -> Self {
        let dim = m.dim();
        for i in 0..dim {
            let out: BigRational = (0..dim)
                .filter(|&k| k != i)
                .map(|k| m[(k, i)].clone())
                .sum();
            m[(i, i)] = -out;
        }
        let float = m.to_f64();
        let column_residual = column_residual(&float);
        Self {
            float,
            exact: Some(m),
            column_residual,
        }
    }

    /// Like [`Generator::from_exact_offdiag`] for a float matrix; the diagonal
    /// is rebuilt as the negated off-diagonal column sum.
    pub fn from_offdiag(mut m: Dense<f64>) -> Result<Self> {
        let dim = m.dim();
        for i in 0..dim {
            let mut out = 0.0;
            for k in (0..dim).filter(|&k| k != i) {
                let v = m[(k, i)];
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::NotMarkovian(format!(
                        "entry ({k}, {i}) = {v} is not a nonnegative rate"
                    )));
                }
                out += v;
            }
            m[(i, i)] = -out;
        }
        let column_residual = column_residual(&m);
        Ok(Self {
            float: m,
            exact: None,
            column_residual,
        })
    }

    /// Validates a complete float matrix against the Markov structure.
    pub fn from_matrix(m: Dense<f64>) -> Result<Self> {
        check_markov_shape(&m)?;
        let column_residual = column_residual(&m);
        if column_residual > TAU_MARKOV {
            return Err(Error::NotMarkovian(format!(
                "column sum residual {column_residual:e} exceeds {TAU_MARKOV:e}"
            )));
        }
        Ok(Self {
            float: m,
            exact: None,
            column_residual,
        })
    }

    /// Validates an exact matrix; columns must sum to exactly zero.
    pub fn from_exact(m: Dense<BigRational>) -> Result<Self> {
        let dim = m.dim();
        for c in 0..dim {
            for r in 0..dim {
                let v = &m[(r, c)];
                if (r == c && v.is_positive()) || (r != c && v.is_negative()) {
                    return Err(Error::NotMarkovian(format!("entry ({r}, {c}) = {v}")));
                }
            }
            let sum: BigRational = m.column(c).into_iter().sum();
            if !sum.is_zero() {
                return Err(Error::NotMarkovian(format!("column {c} sums to {sum}")));
            }
        }
        Ok(Self::from_exact_offdiag(m))
    }

    pub fn dim(&self) -> usize {
        self.float.dim()
    }

    pub fn matrix(&self) -> &Dense<f64> {
        &self.float
    }

    pub fn exact(&self) -> Option<&Dense<BigRational>> {
        self.exact.as_ref()
    }

    /// Max over columns of `|Σ_i A_ij|`.
    pub fn column_residual(&self) -> f64 {
        self.column_residual
    }

    /// Rate of `from -> to`.
    pub fn rate(&self, from: usize, to: usize) -> f64 {
        self.float[(to, from)]
    }

    pub fn exit_rate(&self, state: usize) -> f64 {
        -self.float[(state, state)]
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.dim() {
            return Err(Error::StateOutOfRange {
                index,
                dim: self.dim(),
            });
        }
        Ok(())
    }
}

fn check_markov_shape(m: &Dense<f64>) -> Result<()> {
    for r in 0..m.dim() {
        for c in 0..m.dim() {
            let v = m[(r, c)];
            if !v.is_finite() || (r == c && v > 0.0) || (r != c && v < 0.0) {
                return Err(Error::NotMarkovian(format!("entry ({r}, {c}) = {v}")));
            }
        }
    }
    Ok(())
}

fn column_residual(m: &Dense<f64>) -> f64 {
    (0..m.dim())
        .map(|c| m.column(c).iter().sum::<f64>().abs())
        .fold(0.0, f64::max)
}

/// Result of the strong-connectivity test on the rate graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErgodicityReport {
    pub ergodic: bool,
    pub scc_count: usize,
    /// `(a, b)` with `b` unreachable from `a`.
    pub witness: Option<(usize, usize)>,
}

pub fn check_ergodic(gen: &Generator) -> ErgodicityReport {
    let dim = gen.dim();
    let a = gen.matrix();
    let mut graph = DiGraph::<(), ()>::with_capacity(dim, dim * dim);
    let nodes: Vec<_> = (0..dim).map(|_| graph.add_node(())).collect();
    for from in 0..dim {
        for to in 0..dim {
            if from != to && a[(to, from)] > 0.0 {
                graph.add_edge(nodes[from], nodes[to], ());
            }
        }
    }
    let scc_count = tarjan_scc(&graph).len();
    let witness = (scc_count > 1).then(|| {
        (0..dim)
            .find_map(|s| {
                let reach = reachable(a, s);
                reach.iter().position(|r| !r).map(|t| (s, t))
            })
            .expect("more than one component implies an unreachable pair")
    });
    ErgodicityReport {
        ergodic: scc_count == 1,
        scc_count,
        witness,
    }
}

fn reachable(a: &Dense<f64>, start: usize) -> Vec<bool> {
    let dim = a.dim();
    let mut seen = vec![false; dim];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for w in 0..dim {
            if w != v && !seen[w] && a[(w, v)] > 0.0 {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::Rate;
    use crate::numerics::dense::rat;

    #[test]
    fn two_state_generator() {
        let net = Network::numbered(2)
            .unwrap()
            .with_rate(0, 1, Rate::integer(1))
            .unwrap()
            .with_rate(1, 0, Rate::integer(2))
            .unwrap();
        let gen = net.generator();
        let expected = Dense::from_rows(&[vec![-1.0, 2.0], vec![1.0, -2.0]]);
        assert_eq!(gen.matrix(), &expected);
        assert_eq!(gen.column_residual(), 0.0);
        assert!(check_ergodic(&gen).ergodic);
    }

    #[test]
    fn absorbing_state_is_not_ergodic() {
        let gen = Generator::from_matrix(Dense::from_rows(&[vec![0.0, 1.0], vec![0.0, -1.0]]))
            .unwrap();
        let report = check_ergodic(&gen);
        assert!(!report.ergodic);
        assert_eq!(report.scc_count, 2);
        assert_eq!(report.witness, Some((0, 1)));
    }

    #[test]
    fn empty_rates_give_zero_matrix() {
        let gen = Network::numbered(3).unwrap().generator();
        assert_eq!(gen.matrix(), &Dense::zeros(3, 3));
        let report = check_ergodic(&gen);
        assert!(!report.ergodic);
        assert_eq!(report.scc_count, 3);
    }

    #[test]
    fn non_markov_matrices_rejected() {
        let bad = Dense::from_rows(&[vec![-1.0, -1.0], vec![1.0, 1.0]]);
        assert!(Generator::from_matrix(bad).is_err());
        let unbalanced = Dense::from_rows(&[vec![-1.0, 1.0], vec![2.0, -1.0]]);
        assert!(Generator::from_matrix(unbalanced).is_err());
        let exact = Dense::from_rows(&[vec![rat(-1, 1), rat(1, 1)], vec![rat(1, 2), rat(-1, 1)]]);
        assert!(Generator::from_exact(exact).is_err());
    }
}
