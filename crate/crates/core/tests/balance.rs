mod common;

use common::*;
use dbnet::balance::{
    check_detailed_balance, check_extended_db, closed_response, db_via_trees, open_response,
    spanning_tree_energy, symmetrize,
};
use dbnet::netgen::{
    complete_graph, cycle_graph, random_connected, random_db, random_free, random_two_connected,
    source_sink_network,
};
use dbnet::numerics::dense::{rat, Dense};
use dbnet::numerics::{steady_state, steady_state_exact};
use dbnet::stability::class_preserving_perturbation;
use dbnet::tol::TAU_DB;
use dbnet::{ClassAnnotation, CompartmentSpec, Generator, Network, Pair, Rate};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn example4_fails_at_34() {
    let gen = example4();
    let db = check_detailed_balance(&gen, &steady_state_exact(&gen).unwrap());
    assert!(!db.satisfied);
    assert_eq!(db.worst_pair, Some(pair(3, 4)));
}

#[test]
fn two_states_always_balance() {
    for (a, b) in [(1.0, 2.0), (0.001, 70.0), (5.5, 5.5)] {
        let gen = Generator::from_offdiag(Dense::from_rows(&[vec![0.0, b], vec![a, 0.0]])).unwrap();
        assert!(check_detailed_balance(&gen, &steady_state(&gen).unwrap()).satisfied);
    }
}

#[test]
fn symmetric_generators_balance() {
    let gen = int_generator(&[&[-3, 1, 2], &[1, -1, 0], &[2, 0, -2]]);
    let db = check_detailed_balance(&gen, &steady_state(&gen).unwrap());
    assert!(db.satisfied);
    assert_eq!(db.worst_residual, 0.0);
}

#[test]
fn example4_symmetrization_is_off_at_34() {
    let gen = example4();
    let b = symmetrize(&gen, &steady_state(&gen).unwrap());
    assert!(b.asymmetry > TAU_DB);
    assert_eq!(b.worst_pair, Some(pair(3, 4)));
    let b34 = 2.0 * (0.2f64 / 0.3).sqrt();
    let b43 = (0.3f64 / 0.2).sqrt();
    assert!((b.matrix[(2, 3)] - b34).abs() < 1e-14);
    assert!((b.matrix[(3, 2)] - b43).abs() < 1e-14);
    let (b12, b21) = (b.matrix[(0, 1)], b.matrix[(1, 0)]);
    assert!((b12 - b21).abs() < 1e-15);
    assert!(b.kernel_residual() < 1e-14);
}

#[test]
fn sample_tree_energies() {
    let mu = spanning_tree_energy(&example4(), &[pair(1, 3), pair(1, 2), pair(2, 4)]).unwrap();
    assert_eq!(mu.exact.unwrap(), vec![rat(1, 4); 4]);
    let mu = spanning_tree_energy(&remark5(), &[pair(1, 3), pair(1, 2), pair(2, 4), pair(4, 5)]).unwrap();
    assert_eq!(mu.exact.unwrap(), vec![rat(1, 5); 5]);
}

#[test]
fn tree_networks_have_tree_energy_equal_to_n() {
    let net = load("db_tree.json");
    let gen = net.generator();
    let n = steady_state_exact(&gen).unwrap();
    let tree: Vec<Pair> = dbnet::topology::support_graph(&gen).undirected_edges().iter().copied().collect();
    assert_eq!(spanning_tree_energy(&gen, &tree).unwrap().exact, n.exact);
}

#[test]
fn example4_tree_criterion() {
    let gen = example4();
    let n = steady_state_exact(&gen).unwrap();
    let reference_tree = vec![pair(1, 3), pair(1, 2), pair(2, 4)];
    let r = db_via_trees(&gen, &n, Some(std::slice::from_ref(&reference_tree))).unwrap();
    assert!(!r.equivalent_to_db);
    let mut expected = reference_tree;
    expected.sort();
    assert_eq!(r.mismatching_tree, Some(expected));
    // The default fundamental set also detects the violation.
    assert!(!db_via_trees(&gen, &n, None).unwrap().equivalent_to_db);
}

#[test]
fn db_on_k4_and_c5_passes_every_tree() {
    let mut r = rng(1);
    for g in [complete_graph(4), cycle_graph(5)] {
        let gen = random_db(&mut r, &g);
        let n = steady_state_exact(&gen).unwrap();
        assert!(check_detailed_balance(&gen, &n).satisfied);
        let t = db_via_trees(&gen, &n, None).unwrap();
        assert!(t.equivalent_to_db);
        assert_eq!(t.trees_checked, g.undirected_edges().len() - g.dim() + 2);
    }
}

#[test]
fn one_way_support_is_rejected_by_tree_check() {
    let gen = int_generator(&[&[-1, 0, 1], &[1, -1, 0], &[0, 1, -1]]);
    let n = steady_state(&gen).unwrap();
    assert!(db_via_trees(&gen, &n, None).is_err());
}

#[test]
fn two_state_interior_is_extended_db() {
    let mut net = Network::numbered(4).unwrap();
    for (f, t, r) in [(3, 1, 2), (1, 2, 3), (2, 1, 5), (2, 4, 1), (1, 4, 7)] {
        net.set_rate(f - 1, t - 1, Rate::integer(r)).unwrap();
    }
    net.set_compartments(CompartmentSpec::new(vec![0, 1], vec![2], vec![3])).unwrap();
    assert!(check_extended_db(&net).unwrap().satisfied);
}

#[test]
fn example4_as_interior_is_not_extended_db() {
    let mut net = load("example4.json").with_state("src").with_state("sink");
    net.set_rate(4, 0, Rate::integer(1)).unwrap();
    net.set_rate(3, 5, Rate::integer(1)).unwrap();
    net.set_compartments(CompartmentSpec::new(vec![0, 1, 2, 3], vec![4], vec![5])).unwrap();
    assert!(!check_extended_db(&net).unwrap().satisfied);
}

trait WithState {
    fn with_state(self, label: &str) -> Network;
}

impl WithState for Network {
    fn with_state(self, label: &str) -> Network {
        let mut states = self.states().to_vec();
        states.push(label.to_string());
        let mut out = Network::new(states).unwrap();
        for (&(f, t), r) in self.rates() {
            out.set_rate(f, t, r.clone()).unwrap();
        }
        out
    }
}

#[test]
fn closed_network_reduces_to_db() {
    for name in ["example4.json", "db_tree.json"] {
        let mut net = load(name);
        let gen = net.generator();
        net.set_compartments(CompartmentSpec::new((0..gen.dim()).collect(), vec![], vec![])).unwrap();
        let ext = check_extended_db(&net).unwrap();
        let db = check_detailed_balance(&gen, &steady_state(&gen).unwrap());
        assert_eq!(ext.satisfied, db.satisfied);
        let ts = [0.0, 0.3, 1.0];
        assert_eq!(open_response(&net, 0, 1, &ts).unwrap().values, closed_response(&gen, 0, 1, &ts).unwrap().values);
    }
}

#[test]
fn open_response_starts_at_delta() {
    let net = load("extended_db.json");
    assert_eq!(open_response(&net, 0, 1, &[0.0]).unwrap().values, [0.0]);
    assert_eq!(open_response(&net, 1, 1, &[0.0]).unwrap().values, [1.0]);
    assert!(open_response(&net, 0, 3, &[0.0]).is_err());
}

/// Random symmetric `B` with kernel `v`, then `A = S_v B S_v⁻¹`.
fn from_symmetric_kernel(seed: u64, l: usize) -> (Generator, Vec<f64>) {
    let mut r = rng(seed);
    let v: Vec<f64> = (0..l).map(|_| r.random_range(0.2..2.0)).collect();
    let g = random_two_connected(&mut r, l, 0.5);
    let mut a = Dense::zeros(l, l);
    for p in g.undirected_edges() {
        let b = r.random_range(0.1..5.0);
        a[(p.lo(), p.hi())] = v[p.lo()] * b / v[p.hi()];
        a[(p.hi(), p.lo())] = v[p.hi()] * b / v[p.lo()];
    }
    (Generator::from_offdiag(a).unwrap(), v)
}

fn mixed_generator(seed: u64, l: usize) -> Generator {
    let mut r = rng(seed);
    let g = random_connected(&mut r, l, 0.5);
    if seed.is_multiple_of(2) {
        random_db(&mut r, &g)
    } else {
        random_free(&mut r, &g)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn db_iff_symmetrizable(seed in any::<u64>(), l in 2usize..7) {
        let gen = mixed_generator(seed, l);
        let n = steady_state(&gen).unwrap();
        let db = check_detailed_balance(&gen, &n).satisfied;
        let b = symmetrize(&gen, &n);
        prop_assert_eq!(db, b.is_symmetric());
        prop_assert_eq!(db, b.asymmetry <= TAU_DB);
    }

    #[test]
    fn db_iff_all_trees_agree(seed in any::<u64>(), l in 2usize..7) {
        let gen = mixed_generator(seed, l);
        let n = steady_state_exact(&gen).unwrap();
        let db = check_detailed_balance(&gen, &n).satisfied;
        prop_assert_eq!(db, db_via_trees(&gen, &n, None).unwrap().equivalent_to_db);
    }

    #[test]
    fn symmetric_kernel_construction_is_db(seed in any::<u64>(), l in 2usize..8) {
        let (gen, v) = from_symmetric_kernel(seed, l);
        let n = steady_state(&gen).unwrap();
        prop_assert!(check_detailed_balance(&gen, &n).satisfied);
        let total: f64 = v.iter().map(|x| x * x).sum();
        for k in 0..l {
            prop_assert!((n.values[k] - v[k] * v[k] / total).abs() < 1e-12);
        }
    }

    #[test]
    fn extended_db_ratio_law(seed in any::<u64>(), interior in 2usize..5, sources in 1usize..3, sinks in 1usize..3) {
        let net = source_sink_network(&mut rng(seed), interior, sources, sinks).unwrap();
        let ext = check_extended_db(&net).unwrap();
        prop_assert!(ext.satisfied);
        let ts: Vec<f64> = (-3..=3).map(|k| 10f64.powf(k as f64 / 2.0)).collect();
        let (r12, r21) = (open_response(&net, 0, 1, &ts).unwrap(), open_response(&net, 1, 0, &ts).unwrap());
        for k in 0..ts.len() {
            let d = ext.interior_steady[0] * r12.values[k] - ext.interior_steady[1] * r21.values[k];
            prop_assert!(d.abs() <= 1e-9);
        }
    }
}

/// Non-DB generators stay non-DB under small class-preserving moves.
#[test]
fn non_db_set_is_open() {
    let mut found = 0;
    let mut seed = 0;
    while found < 100 {
        seed += 1;
        let mut r = rng(seed);
        let l = r.random_range(3..7);
        let g = random_two_connected(&mut r, l, 0.4);
        let gen = random_free(&mut r, &g);
        let n = steady_state(&gen).unwrap();
        if check_detailed_balance(&gen, &n).satisfied {
            continue;
        }
        found += 1;
        let a = gen.matrix();
        let min = (0..l)
            .flat_map(|i| (0..l).map(move |k| (i, k)))
            .filter(|&(i, k)| i != k && a[(i, k)] > 0.0)
            .map(|(i, k)| a[(i, k)])
            .fold(f64::INFINITY, f64::min);
        let class = ClassAnnotation::new([], []).unwrap();
        for _ in 0..10 {
            let p = class_preserving_perturbation(&gen, &class, 1e-4 * min, false, &mut r).unwrap();
            let n = steady_state(&p).unwrap();
            assert!(!check_detailed_balance(&p, &n).satisfied, "seed {seed}");
        }
    }
}
