//! Numerical tolerances shared across the crate.

/// Absolute per-column residual allowed for float-constructed generators.
pub const TAU_MARKOV: f64 = 1e-12;
/// Relative detailed-balance residual threshold.
pub const TAU_DB: f64 = 1e-9;
/// Floor for the denominator of relative residuals.
pub const EPS_FLOOR: f64 = 1e-300;
/// Steady-state residual, relative to `‖A‖_∞`.
pub const TAU_SS: f64 = 1e-12;
/// Allowed deviation of `‖N‖₁` from one.
pub const TAU_NORM: f64 = 1e-12;
/// Poisson tail mass dropped by uniformization.
pub const TAU_EXP: f64 = 1e-12;
/// Column-sum deviation allowed for a propagator.
pub const TAU_PROP: f64 = 1e-10;
/// Relative threshold on `Δ_n`, scaled by `N_i ‖A‖_∞ⁿ`.
pub const TAU_PDB: f64 = 1e-9;
/// Relative spread allowed for the response ratio `R_ij / R_ji`.
pub const TAU_RATIO: f64 = 1e-7;
/// Default largest matrix power accepted by `matrix_power_apply`.
pub const N_MAX: usize = 64;
/// Default largest uniformization truncation order.
pub const K_MAX: usize = 1_000_000;
