//! Mixed derivatives of `Δ_n(A + Σ ε_e D_e)` with respect to every `ε_e`.

use crate::numerics::dense::{Dense, Scalar};
use crate::numerics::unit;

/// Weights and states of a pairwise `Δ_n`.
#[derive(Debug)]
pub struct DeltaPair<'a, T> {
    pub n_i: &'a T,
    pub n_j: &'a T,
    pub i: usize,
    pub j: usize,
}

impl<T> Clone for DeltaPair<'_, T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for DeltaPair<'_, T> {}

fn delta<T: Scalar>(a: &Dense<T>, pair: DeltaPair<'_, T>, n: usize) -> T {
    let dim = a.dim();
    let mut x = unit::<T>(dim, pair.i);
    let mut y = unit::<T>(dim, pair.j);
    for _ in 0..n {
        x = a.mul_vec(&x);
        y = a.mul_vec(&y);
    }
    pair.n_i.clone() * x[pair.j].clone() - pair.n_j.clone() * y[pair.i].clone()
}

/// `Δ_n(A + Σ ε_e D_e)`.
pub fn delta_along<T: Scalar>(
    a: &Dense<T>,
    ds: &[Dense<T>],
    eps: &[T],
    pair: DeltaPair<'_, T>,
    n: usize,
) -> T {
    let mut m = a.clone();
    for (d, e) in ds.iter().zip(eps) {
        m = m.add(&d.scale(e));
    }
    delta(&m, pair, n)
}

/// `∂^k Δ_n / ∂ε_1 ⋯ ∂ε_k` at `ε = 0`, exactly: powers are taken in the ring
/// of polynomials in `ε_1..ε_k` truncated by `ε_e² = 0`, each entry stored as
/// `2^k` coefficients indexed by subsets, and the coefficient of the full
/// monomial is read off.
pub fn mixed_derivative<T: Scalar>(
    a: &Dense<T>,
    ds: &[Dense<T>],
    pair: DeltaPair<'_, T>,
    n: usize,
) -> T {
    let full = (1usize << ds.len()) - 1;
    let start = |s: usize| {
        let mut v = vec![vec![T::zero(); full + 1]; a.dim()];
        v[s][0] = T::one();
        v
    };
    let (mut x, mut y) = (start(pair.i), start(pair.j));
    for _ in 0..n {
        x = step(a, ds, &x);
        y = step(a, ds, &y);
    }
    pair.n_i.clone() * x[pair.j][full].clone() - pair.n_j.clone() * y[pair.i][full].clone()
}

fn step<T: Scalar>(a: &Dense<T>, ds: &[Dense<T>], v: &[Vec<T>]) -> Vec<Vec<T>> {
    let dim = a.dim();
    let size = v[0].len();
    let mut out = vec![vec![T::zero(); size]; dim];
    for r in 0..dim {
        for c in 0..dim {
            let base = &a[(r, c)];
            if !base.is_zero() {
                for s in 0..size {
                    if !v[c][s].is_zero() {
                        out[r][s] = out[r][s].clone() + base.clone() * v[c][s].clone();
                    }
                }
            }
            for (e, d) in ds.iter().enumerate() {
                let w = &d[(r, c)];
                if w.is_zero() {
                    continue;
                }
                let bit = 1 << e;
                for s in (0..size).filter(|s| s & bit == 0) {
                    if !v[c][s].is_zero() {
                        out[r][s | bit] = out[r][s | bit].clone() + w.clone() * v[c][s].clone();
                    }
                }
            }
        }
    }
    out
}

/// Central mixed difference over all `2^k` sign patterns at step `h`,
/// Richardson-extrapolated with step `h/2`: `(4 D(h/2) − D(h)) / 3`.
pub fn fd_mixed_derivative<T: Scalar>(
    a: &Dense<T>,
    ds: &[Dense<T>],
    pair: DeltaPair<'_, T>,
    n: usize,
    h: T,
) -> T {
    let two = T::one() + T::one();
    let coarse = central(a, ds, pair, n, h.clone());
    let fine = central(a, ds, pair, n, h / two.clone());
    let four = two.clone() * two;
    let three = four.clone() - T::one();
    (four * fine - coarse) / three
}

fn central<T: Scalar>(a: &Dense<T>, ds: &[Dense<T>], pair: DeltaPair<'_, T>, n: usize, h: T) -> T {
    let k = ds.len();
    let mut acc = T::zero();
    for signs in 0..(1usize << k) {
        let mut negative = false;
        let eps: Vec<T> = (0..k)
            .map(|e| {
                if signs >> e & 1 == 1 {
                    negative = !negative;
                    -h.clone()
                } else {
                    h.clone()
                }
            })
            .collect();
        let f = delta_along(a, ds, &eps, pair, n);
        acc = if negative { acc - f } else { acc + f };
    }
    let mut denom = T::one();
    for _ in 0..k {
        denom = denom * (h.clone() + h.clone());
    }
    acc / denom
}
