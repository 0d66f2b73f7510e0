use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::{half_width, stream, JumpTable, Walker, MIN_SAMPLES};
use crate::error::{Error, Result};
use crate::netmodel::Generator;

/// Estimates from one realization cut into regeneration cycles.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegenerativeEstimate {
    pub pair: (usize, usize),
    pub t1: f64,
    pub t2: f64,
    pub cycles: usize,
    pub r_ij_t1: f64,
    pub r_ij_t2: f64,
    pub r_ji_t1: f64,
    pub r_ji_t2: f64,
    /// 95% half-widths in the order of the four estimates.
    pub half_widths: [f64; 4],
    /// z statistic of `log(R_ij(t1)/R_ji(t1)) − log(R_ij(t2)/R_ji(t2))`.
    pub z: Option<f64>,
    /// Two-sided p-value of the ratio test; `None` if an estimate is 0.
    pub ratio_test_p: Option<f64>,
    /// Per-cycle indicators `(X_{t1} = j, X_{t2} = j)` of the cycles rooted at `i`.
    #[serde(skip)]
    pub i_cycles: Vec<(bool, bool)>,
    /// Per-cycle indicators `(X_{t1} = i, X_{t2} = i)` of the cycles rooted at `j`.
    #[serde(skip)]
    pub j_cycles: Vec<(bool, bool)>,
}

/// Single-realization protocol: starting in `i`, record whether the process
/// sits in `j` at `t1` and `t2` after the cycle start, then wait for the
/// first entrance into `i` (or restart at once if already there). After
/// `cycles` such cycles, wait for `j` and repeat with the roles swapped.
pub fn estimate_response_regenerative(
    gen: &Generator,
    i: usize,
    j: usize,
    t1: f64,
    t2: f64,
    cycles: usize,
    seed: u64,
) -> Result<RegenerativeEstimate> {
    gen.check_index(i)?;
    gen.check_index(j)?;
    if i == j {
        return Err(Error::SameState(i));
    }
    if !(t1 > 0.0 && t2 > t1 && t2.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 0 < t1 < t2, got {t1}, {t2}")));
    }
    if cycles < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_SAMPLES} cycles required, got {cycles}"
        )));
    }
    let table = JumpTable::new(gen);
    let mut w = Walker::new(&table, stream(seed, 0), i);
    let mut start = 0.0;
    let i_cycles = run_cycles(&mut w, &mut start, i, j, t1, t2, cycles)?;
    let j_cycles = run_cycles(&mut w, &mut start, j, i, t1, t2, cycles)?;

    let mean = |v: &[(bool, bool)], second: bool| {
        v.iter().filter(|c| if second { c.1 } else { c.0 }).count() as f64 / v.len() as f64
    };
    let (a1, a2) = (mean(&i_cycles, false), mean(&i_cycles, true));
    let (b1, b2) = (mean(&j_cycles, false), mean(&j_cycles, true));
    let (z, p) = match (log_ratio_var(&i_cycles), log_ratio_var(&j_cycles)) {
        (Some(va), Some(vb)) if va + vb > 0.0 => {
            let d = (a1.ln() - a2.ln()) - (b1.ln() - b2.ln());
            let z = d / (va + vb).sqrt();
            let normal = Normal::standard();
            (Some(z), Some(2.0 * normal.sf(z.abs())))
        }
        _ => (None, None),
    };
    Ok(RegenerativeEstimate {
        pair: (i, j),
        t1,
        t2,
        cycles,
        r_ij_t1: a1,
        r_ij_t2: a2,
        r_ji_t1: b1,
        r_ji_t2: b2,
        half_widths: [a1, a2, b1, b2].map(|p| half_width(p, cycles)),
        z,
        ratio_test_p: p,
        i_cycles,
        j_cycles,
    })
}

/// Delta-method variance of `log p̂₁ − log p̂₂` from paired indicators.
fn log_ratio_var(c: &[(bool, bool)]) -> Option<f64> {
    let n = c.len() as f64;
    let p1 = c.iter().filter(|x| x.0).count() as f64 / n;
    let p2 = c.iter().filter(|x| x.1).count() as f64 / n;
    let p12 = c.iter().filter(|x| x.0 && x.1).count() as f64 / n;
    if p1 == 0.0 || p2 == 0.0 {
        return None;
    }
    let var = (p1 * (1.0 - p1) / (p1 * p1) + p2 * (1.0 - p2) / (p2 * p2)
        - 2.0 * (p12 - p1 * p2) / (p1 * p2))
        / n;
    Some(var.max(0.0))
}

fn run_cycles(
    w: &mut Walker<'_>,
    start: &mut f64,
    root: usize,
    target: usize,
    t1: f64,
    t2: f64,
    cycles: usize,
) -> Result<Vec<(bool, bool)>> {
    // Regenerate at the first entrance into `root`.
    if w.state_at(*start)? != root {
        while w.state != root {
            w.jump()?;
        }
        *start = w.entered;
    }
    let mut out = Vec::with_capacity(cycles);
    for _ in 0..cycles {
        let x1 = w.state_at(*start + t1)? == target;
        let x2 = w.state_at(*start + t2)? == target;
        out.push((x1, x2));
        let end = *start + t2;
        if w.state == root {
            *start = end;
        } else {
            while w.state != root {
                w.jump()?;
            }
            *start = w.entered;
        }
    }
    Ok(out)
}
