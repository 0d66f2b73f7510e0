use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::netmodel::Pair;
use crate::numerics::dense::{rat, Dense};

/// Dimension counts for the sets of generators with detailed balance (`B`)
/// and with pathwise detailed balance for one pair (`C`) or `d` pairs (`C_d`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionReport {
    pub l: usize,
    pub dim_a: usize,
    pub dim_b: usize,
    pub dim_c: usize,
    /// `dim C_d` for `d = 1..=L`; assumes the `d` pairs give independent constraints.
    pub dim_c_d: Vec<(usize, i64)>,
    /// The `d` at which `dim C_d = dim B`.
    pub reciprocal_d_for_equality: f64,
    pub note: &'static str,
}

impl DimensionReport {
    pub fn dim_c_d(&self, d: usize) -> i64 {
        dim_c_d(self.l, d)
    }
}

fn dim_c_d(l: usize, d: usize) -> i64 {
    let (l, d) = (l as i64, d as i64);
    l * (l - 1) - d * (l - 1) + d
}

pub fn dimension_report(l: usize) -> Result<DimensionReport> {
    if l < 3 {
        return Err(Error::InvalidArgument(format!("dimension counts need L >= 3, got {l}")));
    }
    let lf = l as f64;
    Ok(DimensionReport {
        l,
        dim_a: l * (l - 1),
        dim_b: (l - 1) * (l + 2) / 2,
        dim_c: l * (l - 2) + 2,
        dim_c_d: (1..=l).map(|d| (d, dim_c_d(l, d))).collect(),
        reciprocal_d_for_equality: (lf * lf / 2.0 - 1.5 * lf + 1.0) / (lf - 2.0),
        note: "heuristic: assumes all d measurements give d independent constraints",
    })
}

/// The 6×6 linearization printed for `A₀` (diagonal −3, off-diagonal 1),
/// measurements `R_12`, `R_13`, coordinates `(ξ12, ξ13, ξ14, ξ23, ξ24, ξ34)`.
pub fn printed_linearization() -> Dense<BigRational> {
    let rows: [[i64; 6]; 6] = [
        [1, 0, 0, 0, 0, 0],
        [0, 1, 1, 1, 1, 0],
        [7, 4, 4, 2, 2, 2],
        [0, 1, 0, 0, 0, 0],
        [1, 0, 1, 1, 0, 1],
        [3, 7, 3, 3, 2, 3],
    ];
    Dense::from_fn(6, 6, |r, c| rat(rows[r][c], 1))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankReport {
    pub printed: Dense<f64>,
    pub printed_determinant: f64,
    pub determinant_nonzero: bool,
    /// Jacobian of `A ↦ (⟨e_2, Aⁿ e_1⟩, ⟨e_3, Aⁿ e_1⟩)_{n=1,2,3}` at `A₀`
    /// along symmetric Markovian directions, computed exactly.
    pub recomputed: Dense<f64>,
    pub recomputed_rank: usize,
    pub recomputed_determinant: f64,
    pub recomputed_matches_printed: bool,
}

/// Jacobian at `A₀` in the direction of each symmetric pair perturbation
/// `E_ab + E_ba − E_aa − E_bb`.
pub fn linearization_at_a0() -> Dense<BigRational> {
    let a0 = Dense::from_fn(4, 4, |r, c| if r == c { rat(-3, 1) } else { rat(1, 1) });
    let dirs: Vec<Dense<BigRational>> = Pair::all(4)
        .map(|p| {
            let mut d = Dense::zeros(4, 4);
            d[(p.lo(), p.hi())] = rat(1, 1);
            d[(p.hi(), p.lo())] = rat(1, 1);
            d[(p.lo(), p.lo())] = rat(-1, 1);
            d[(p.hi(), p.hi())] = rat(-1, 1);
            d
        })
        .collect();
    let powers: Vec<Dense<BigRational>> = (0..3).map(|k| a0.pow(k)).collect();
    let mut jac = Dense::zeros(6, 6);
    for (col, d) in dirs.iter().enumerate() {
        for n in 1..=3 {
            // d(Aⁿ) = Σ_k A^k D A^{n−1−k}
            let mut dn = Dense::<BigRational>::zeros(4, 4);
            for k in 0..n {
                dn = dn.add(&powers[k].matmul(d).matmul(&powers[n - 1 - k]));
            }
            jac[(n - 1, col)] = dn[(1, 0)].clone();
            jac[(n + 2, col)] = dn[(2, 0)].clone();
        }
    }
    jac
}

pub fn nonreciprocal_rank_check() -> RankReport {
    let printed = printed_linearization();
    let det = printed.det();
    let jac = linearization_at_a0();
    let jac_det = jac.det();
    RankReport {
        printed: printed.to_f64(),
        printed_determinant: crate::numerics::dense::rat_to_f64(&det),
        determinant_nonzero: !det.is_zero(),
        recomputed: jac.to_f64(),
        recomputed_rank: jac.rank(),
        recomputed_determinant: crate::numerics::dense::rat_to_f64(&jac_det),
        recomputed_matches_printed: jac == printed,
    }
}
