mod common;

use common::*;
use dbnet::netgen::{random_free, random_two_connected};
use dbnet::numerics::{propagate, steady_state};
use dbnet::stochastic::{
    estimate_response_iid, estimate_response_regenerative, simulate, Z95,
};
use dbnet::Error;
use rand::Rng;

fn exact(gen: &dbnet::Generator, i: usize, j: usize, t: f64) -> f64 {
    propagate(gen, t).unwrap().response(i, j)
}

#[test]
fn two_state_occupation() {
    let (a, b) = (1.0f64, 2.0f64);
    let gen = int_generator(&[&[-1, 2], &[1, -2]]);
    let horizon = 2000.0;
    let sigma = (2.0 * a * b / ((a + b) * (a + b) * (a + b) * horizon)).sqrt();
    for seed in 0..5 {
        let path = simulate(&gen, 0, horizon, seed).unwrap();
        let occ = path.occupation(2);
        assert!((occ[0] + occ[1] - horizon).abs() < 1e-9);
        let frac = occ[0] / horizon;
        assert!((frac - b / (a + b)).abs() < 3.0 * sigma, "seed {seed}: {frac}");
    }
}

#[test]
fn trajectories_are_reproducible() {
    let gen = example4();
    let a = simulate(&gen, 0, 50.0, 7).unwrap();
    assert_eq!(a, simulate(&gen, 0, 50.0, 7).unwrap());
    assert_ne!(a, simulate(&gen, 0, 50.0, 8).unwrap());
    for w in a.states.windows(2) {
        assert_ne!(w[0], w[1]);
        assert!(gen.matrix()[(w[1], w[0])] > 0.0);
    }
    assert!(a.jump_times.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(a.state_at(0.0), 0);
}

#[test]
fn absorbing_state_is_reported() {
    let gen = load("absorbing.json").generator();
    assert!(matches!(simulate(&gen, 0, 1e4, 1), Err(Error::Absorbing { state: 2, .. })));
    assert!(matches!(
        estimate_response_iid(&gen, 0, 1, &[1e4], 100, 1, 1),
        Err(Error::Absorbing { .. })
    ));
    assert!(simulate(&example4(), 0, -1.0, 1).is_err());
}

#[test]
fn iid_response_coverage() {
    let gen = example4();
    let times = [0.0, 0.1, 0.3, 0.6, 1.0, 1.5, 2.5, 4.0];
    let truth: Vec<f64> = times.iter().map(|&t| exact(&gen, 0, 1, t)).collect();
    let (mut covered, mut total) = (0, 0);
    for seed in 0..40 {
        let est = estimate_response_iid(&gen, 0, 1, &times, 2000, seed, 0).unwrap();
        assert_eq!(est.estimates[0], 0.0);
        for k in 1..times.len() {
            total += 1;
            covered += usize::from(est.covers(k, truth[k]));
        }
    }
    let rate = covered as f64 / total as f64;
    assert!(rate >= 0.9, "coverage {rate}");
}

#[test]
fn iid_is_worker_independent_and_order_free() {
    let gen = remark5();
    let a = estimate_response_iid(&gen, 0, 4, &[0.5, 2.0, 1.0], 500, 3, 1).unwrap();
    let b = estimate_response_iid(&gen, 0, 4, &[0.5, 2.0, 1.0], 500, 3, 8).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_csv(), b.to_csv());
    assert!(a.to_csv().starts_with("t,estimate,half_width,samples\n"));
    assert!(estimate_response_iid(&gen, 0, 4, &[1.0], 10, 3, 1).is_err());
}

#[test]
fn db_ratio_within_combined_interval() {
    let gen = load("db_tree.json").generator();
    let n = steady_state(&gen).unwrap();
    let t = [1.0];
    let fwd = estimate_response_iid(&gen, 0, 1, &t, 20_000, 1, 0).unwrap();
    let back = estimate_response_iid(&gen, 1, 0, &t, 20_000, 2, 0).unwrap();
    let gap = (n.values[0] * fwd.estimates[0] - n.values[1] * back.estimates[0]).abs();
    let bound = n.values[0] * fwd.half_widths[0] + n.values[1] * back.half_widths[0];
    assert!(gap <= bound, "{gap} > {bound}");
}

#[test]
fn regenerative_accepts_pdb() {
    let gen = example4();
    let passes = (0..40)
        .filter(|&seed| {
            let r = estimate_response_regenerative(&gen, 0, 1, 0.5, 1.5, 2000, seed).unwrap();
            r.ratio_test_p.unwrap() > 0.01
        })
        .count();
    assert!(passes >= 38, "{passes}/40");
}

#[test]
fn regenerative_rejects_circulation() {
    let gen = load("cycle3_circulating.json").generator();
    let (t1, t2) = (0.2, 1.0);
    let effect = |t: f64| (exact(&gen, 0, 1, t) / exact(&gen, 1, 0, t)).ln();
    let d = effect(t1) - effect(t2);
    // Per-cycle variance of the log-ratio contrast is O(1/R); size for z ≈ 6.
    let r_min = [t1, t2]
        .iter()
        .flat_map(|&t| [exact(&gen, 0, 1, t), exact(&gen, 1, 0, t)])
        .fold(1.0, f64::min);
    let cycles = ((6.0 / d.abs()).powi(2) * 4.0 / r_min).ceil().max(500.0) as usize;
    let r = estimate_response_regenerative(&gen, 0, 1, t1, t2, cycles, 4).unwrap();
    assert!(r.ratio_test_p.unwrap() < 0.01, "p = {:?} with {cycles} cycles", r.ratio_test_p);
}

#[test]
fn regenerative_agrees_with_exact_and_iid() {
    let gen = example4();
    let r = estimate_response_regenerative(&gen, 0, 2, 0.5, 1.5, 5000, 9).unwrap();
    let values = [r.r_ij_t1, r.r_ij_t2, r.r_ji_t1, r.r_ji_t2];
    let truth = [exact(&gen, 0, 2, 0.5), exact(&gen, 0, 2, 1.5), exact(&gen, 2, 0, 0.5), exact(&gen, 2, 0, 1.5)];
    for k in 0..4 {
        assert!((values[k] - truth[k]).abs() <= 4.0 / Z95 * r.half_widths[k], "{k}");
    }
    let iid = estimate_response_iid(&gen, 0, 2, &[0.5], 5000, 9, 0).unwrap();
    let combined = (r.half_widths[0].powi(2) + iid.half_widths[0].powi(2)).sqrt();
    assert!((iid.estimates[0] - r.r_ij_t1).abs() <= 4.0 / Z95 * combined);
}

#[test]
fn regenerative_cycles_are_uncorrelated() {
    let gen = remark5();
    let cycles = 5000;
    let r = estimate_response_regenerative(&gen, 0, 1, 0.3, 1.0, cycles, 21).unwrap();
    for series in [&r.i_cycles, &r.j_cycles] {
        let x: Vec<f64> = series.iter().map(|c| f64::from(u8::from(c.0))).collect();
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let var: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
        let cov: f64 = x.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
        let rho = cov / var;
        assert!(rho.abs() < 3.0 / (cycles as f64).sqrt(), "rho = {rho}");
    }
}

#[test]
fn error_shrinks_like_inverse_root() {
    let gen = example4();
    let truth = exact(&gen, 0, 1, 1.0);
    let sizes = [250usize, 1000, 4000, 16_000];
    let rms: Vec<f64> = sizes
        .iter()
        .map(|&n| {
            let sq: f64 = (0..20)
                .map(|seed| {
                    let e = estimate_response_iid(&gen, 0, 1, &[1.0], n, 100 + seed, 0).unwrap();
                    (e.estimates[0] - truth).powi(2)
                })
                .sum();
            (sq / 20.0).sqrt()
        })
        .collect();
    let xs: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = rms.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!((-0.65..=-0.35).contains(&slope), "slope {slope}");
}

#[test]
fn random_network_coverage() {
    let times = [0.2, 0.7, 1.5, 3.0];
    let (mut covered, mut total) = (0, 0);
    for seed in 0..20u64 {
        let mut r = rng(1000 + seed);
        let l = r.random_range(3..=6);
        let g = random_two_connected(&mut r, l, 0.4);
        let gen = random_free(&mut r, &g);
        let est = estimate_response_iid(&gen, 0, 1, &times, 4000, seed, 0).unwrap();
        for (k, &t) in times.iter().enumerate() {
            total += 1;
            covered += usize::from(est.covers(k, exact(&gen, 0, 1, t)));
        }
    }
    let rate = covered as f64 / total as f64;
    assert!(rate >= 0.9, "coverage {rate}");
}
