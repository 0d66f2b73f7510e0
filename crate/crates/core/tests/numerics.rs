mod common;

use common::*;
use dbnet::netgen::{complete_graph, random_db, random_free, random_two_connected};
use dbnet::numerics::dense::{rat, Dense};
use dbnet::numerics::{
    matrix_power_apply, matrix_power_apply_exact, propagate, steady_state, steady_state_exact,
    unit, unit_exact,
};
use dbnet::tol::TAU_PROP;
use dbnet::{Error, Generator};
use proptest::prelude::*;

#[test]
fn sample_steady_states_are_exact() {
    let n4 = steady_state_exact(&example4()).unwrap();
    assert_eq!(n4.exact.unwrap(), rationals(&[(1, 4), (1, 4), (3, 10), (1, 5)]));
    let n5 = steady_state_exact(&remark5()).unwrap();
    assert_eq!(n5.exact.unwrap(), rationals(&[(5, 24), (5, 24), (6, 24), (4, 24), (4, 24)]));
    let f = steady_state(&example4()).unwrap();
    for (a, b) in f.values.iter().zip([0.25, 0.25, 0.3, 0.2]) {
        assert!((a - b).abs() < 1e-14);
    }
}

#[test]
fn symmetric_generators_have_uniform_steady_state() {
    let g = int_generator(&[&[-3, 1, 2], &[1, -1, 0], &[2, 0, -2]]);
    let n = steady_state_exact(&g).unwrap();
    assert_eq!(n.exact.unwrap(), vec![rat(1, 3); 3]);
}

#[test]
fn zeroth_power_is_identity() {
    let v = vec![0.1, 0.2, 0.3, 0.4];
    assert_eq!(matrix_power_apply(&example4(), 0, &v).unwrap(), v);
}

#[test]
fn propagator_at_zero_is_identity() {
    assert_eq!(propagate(&example4(), 0.0).unwrap().matrix, Dense::identity(4));
}

#[test]
fn two_state_closed_form() {
    let g = Generator::from_matrix(Dense::from_rows(&[vec![-1.0, 1.0], vec![1.0, -1.0]])).unwrap();
    let p = propagate(&g, 1.0).unwrap();
    let e = (-2.0f64).exp();
    let expected = Dense::from_rows(&[vec![(1.0 + e) / 2.0, (1.0 - e) / 2.0], vec![(1.0 - e) / 2.0, (1.0 + e) / 2.0]]);
    let err = p.matrix.sub(&expected).max_abs();
    assert!(err < 1e-11, "{err:e}");
}

#[test]
fn long_times_reach_the_steady_state() {
    let gen = example4();
    let n = steady_state(&gen).unwrap();
    let p = propagate(&gen, 40.0).unwrap();
    for c in 0..4 {
        for r in 0..4 {
            assert!((p.matrix[(r, c)] - n.values[r]).abs() < 1e-6);
        }
    }
}

#[test]
fn bad_times_are_rejected() {
    assert!(matches!(propagate(&example4(), -1.0), Err(Error::BadTime(_))));
    assert!(matches!(propagate(&example4(), f64::NAN), Err(Error::BadTime(_))));
}

fn random_gen(seed: u64, l: usize, db: bool) -> Generator {
    let mut r = rng(seed);
    let g = random_two_connected(&mut r, l, 0.5);
    if db {
        random_db(&mut r, &g)
    } else {
        random_free(&mut r, &g)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn semigroup(seed in any::<u64>(), l in 3usize..6, t1 in 0.0f64..10.0, t2 in 0.0f64..10.0) {
        let gen = random_gen(seed, l, seed % 2 == 0);
        let a = propagate(&gen, t1 + t2).unwrap().matrix;
        let b = propagate(&gen, t1).unwrap().matrix.matmul(&propagate(&gen, t2).unwrap().matrix);
        prop_assert!(a.sub(&b).norm_inf() <= 10.0 * TAU_PROP);
    }

    #[test]
    fn propagators_are_column_stochastic(seed in any::<u64>(), l in 3usize..7, t in 0.0f64..20.0) {
        let p = propagate(&random_gen(seed, l, false), t).unwrap().matrix;
        for c in 0..l {
            let col = p.column(c);
            prop_assert!(col.iter().all(|&x| x >= -1e-15));
            prop_assert!((col.iter().sum::<f64>() - 1.0).abs() <= 10.0 * TAU_PROP);
        }
    }

    #[test]
    fn steady_state_is_fixed(seed in any::<u64>(), l in 3usize..7, t in 0.0f64..20.0) {
        let gen = random_gen(seed, l, false);
        let n = steady_state(&gen).unwrap();
        let moved = propagate(&gen, t).unwrap().matrix.mul_vec(&n.values);
        let drift = moved.iter().zip(&n.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(drift <= 10.0 * TAU_PROP);
    }

    #[test]
    fn exact_powers_match_dense_powers(seed in any::<u64>(), l in 2usize..6, n in 0usize..7) {
        let mut r = rng(seed);
        let gen = random_free(&mut r, &complete_graph(l));
        let dense = gen.exact().unwrap().pow(n);
        for i in 0..l {
            let v = matrix_power_apply_exact(&gen, n, &unit_exact(l, i)).unwrap().unwrap();
            prop_assert_eq!(v, dense.column(i));
            let f = matrix_power_apply(&gen, n, &unit(l, i)).unwrap();
            let scale = gen.matrix().norm_inf().powi(n as i32).max(1.0);
            for k in 0..l {
                prop_assert!((f[k] - dbnet::numerics::dense::rat_to_f64(&dense[(k, i)])).abs() <= 1e-12 * scale);
            }
        }
    }
}
