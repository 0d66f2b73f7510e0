mod common;

use common::*;
use dbnet::netmodel::{
    check_class_membership, check_compartments, check_ergodic, parse_network, serialize_network,
    MembershipViolation,
};
use dbnet::numerics::dense::{rat, Dense};
use dbnet::numerics::{steady_state, steady_state_exact};
use dbnet::{ClassAnnotation, CompartmentSpec, Error, Generator, Network, Pair, Rate};
use num_traits::Zero;
use proptest::prelude::*;

#[test]
fn minimal_file() {
    let net = parse_network(
        r#"{"states": ["s1", "s2"], "rates": [{"from": "s1", "to": "s2", "rate": 1}, {"from": "s2", "to": "s1", "rate": 2}]}"#,
    )
    .unwrap();
    assert_eq!(net.dim(), 2);
    assert_eq!(net.rates().len(), 2);
    let gen = net.generator();
    assert_eq!(gen.matrix(), &Dense::from_rows(&[vec![-1.0, 2.0], vec![1.0, -2.0]]));
}

#[test]
fn overlapping_class_sets_are_rejected() {
    let err = parse_network(
        r#"{"states": ["s1", "s2"], "class": {"forbidden": [["s1", "s2"]], "balanced": [["s2", "s1"]]}}"#,
    )
    .unwrap_err();
    assert!(matches!(err, Error::ClassOverlap(..)), "{err}");
}

#[test]
fn syntax_errors_carry_a_position() {
    let err = parse_network("{\n  \"states\": [\"a\", \"b\"\n").unwrap_err();
    match err {
        Error::Syntax { line, .. } => assert!(line >= 2),
        other => panic!("{other}"),
    }
}

#[test]
fn input_errors() {
    let dup = r#"{"states": ["a", "a"]}"#;
    assert!(matches!(parse_network(dup), Err(Error::DuplicateState(_))));
    let neg = r#"{"states": ["a", "b"], "rates": [{"from": "a", "to": "b", "rate": "-1/2"}]}"#;
    assert!(matches!(parse_network(neg), Err(Error::NegativeRate { .. })));
    let unknown = r#"{"states": ["a", "b"], "rates": [{"from": "a", "to": "c", "rate": 1}]}"#;
    assert!(matches!(parse_network(unknown), Err(Error::UnknownState(_))));
    let looped = r#"{"states": ["a", "b"], "rates": [{"from": "a", "to": "a", "rate": 1}]}"#;
    assert!(matches!(parse_network(looped), Err(Error::SelfLoop(_))));
}

#[test]
fn example4_file_matches_the_matrix() {
    let net = load("example4.json");
    assert_eq!(net.rates().len(), 12);
    assert_eq!(net.rate(2, 3).unwrap(), &Rate::integer(1));
    assert_eq!(net.rate(3, 2).unwrap(), &Rate::integer(2));
    let gen = net.generator();
    let diag: Vec<f64> = (0..4).map(|i| gen.matrix()[(i, i)]).collect();
    assert_eq!(diag, [-3.0, -3.0, -3.0, -4.0]);
    assert_eq!(gen.column_residual(), 0.0);
}

#[test]
fn empty_rates_give_zero_non_ergodic_generator() {
    let net = Network::numbered(3).unwrap();
    let gen = net.generator();
    assert_eq!(gen.matrix(), &Dense::zeros(3, 3));
    assert!(!check_ergodic(&gen).ergodic);
    assert!(matches!(steady_state(&gen), Err(Error::NotErgodic(_))));
}

#[test]
fn ergodicity_examples() {
    let two = Generator::from_matrix(Dense::from_rows(&[vec![-1.0, 2.0], vec![1.0, -2.0]])).unwrap();
    assert!(check_ergodic(&two).ergodic);
    let absorbing = Generator::from_matrix(Dense::from_rows(&[vec![0.0, 1.0], vec![0.0, -1.0]])).unwrap();
    let r = check_ergodic(&absorbing);
    assert!(!r.ergodic);
    // state 2 cannot be reached from state 1
    assert_eq!(r.witness, Some((0, 1)));
    assert!(check_ergodic(&remark5()).ergodic);
}

#[test]
fn annotated_class_example_is_a_member() {
    let net = load("stable_class.json");
    let n = steady_state_exact(&net.generator()).unwrap();
    let report = check_class_membership(&net, &n).unwrap();
    assert!(report.member, "{:?}", report.violations);
    let class = net.class().unwrap();
    assert!(class.forbidden.contains(&pair(1, 4)) && class.forbidden.contains(&pair(2, 5)));
    assert_eq!(class.unconstrained(5).into_iter().collect::<Vec<_>>(), [pair(4, 5)]);
}

#[test]
fn rate_on_forbidden_pair_is_named() {
    let mut net = load("stable_class.json");
    net.set_rate(0, 3, Rate::integer(1)).unwrap();
    let n = steady_state(&net.generator()).unwrap();
    let report = check_class_membership(&net, &n).unwrap();
    assert!(!report.member);
    assert!(report
        .violations
        .iter()
        .any(|v| matches!(v, MembershipViolation::ForbiddenRate { pair, .. } if *pair == pair_14())));
}

fn pair_14() -> Pair {
    pair(1, 4)
}

/// With N = (1/4, 1/4, 3/10, 1/5) only (1,2) among the pairs other than
/// (3,4) is balanced; (1,3), (1,4), (2,3), (2,4) are not.
#[test]
fn example4_all_but_34_balanced_is_not_a_member() {
    let mut net = load("example4.json");
    let balanced: Vec<Pair> = Pair::all(4).filter(|p| *p != pair(3, 4)).collect();
    net.set_class(ClassAnnotation::new([], balanced).unwrap()).unwrap();
    let n = steady_state_exact(&net.generator()).unwrap();
    let report = check_class_membership(&net, &n).unwrap();
    assert!(!report.member);
    let mut unbalanced: Vec<Pair> = report
        .violations
        .iter()
        .filter_map(|v| match v {
            MembershipViolation::Unbalanced { pair, .. } => Some(*pair),
            _ => None,
        })
        .collect();
    unbalanced.sort();
    assert_eq!(unbalanced, [pair(1, 3), pair(1, 4), pair(2, 3), pair(2, 4)]);
}

fn chain(extra: Option<(usize, usize)>) -> Network {
    // interior {1,2}, source {3}, sink {4}
    let mut net = Network::numbered(4).unwrap();
    for (f, t) in [(3, 1), (1, 2), (2, 1), (2, 4)].into_iter().chain(extra) {
        net.set_rate(f - 1, t - 1, Rate::integer(1)).unwrap();
    }
    net.set_compartments(CompartmentSpec::new(vec![0, 1], vec![2], vec![3])).unwrap();
    net
}

#[test]
fn compartment_conditions() {
    assert!(check_compartments(&chain(None)).unwrap().passed);

    let back = check_compartments(&chain(Some((4, 1)))).unwrap();
    assert!(!back.passed);
    assert_eq!(back.failed().map(|c| c.name).collect::<Vec<_>>(), ["A[interior,sinks] = 0"]);

    let bypass = check_compartments(&chain(Some((3, 4)))).unwrap();
    assert_eq!(bypass.failed().map(|c| c.name).collect::<Vec<_>>(), ["A[sinks,sources] = 0"]);
}

fn network_strategy() -> impl Strategy<Value = Network> {
    (2usize..6).prop_flat_map(|l| {
        let rates = proptest::collection::vec(proptest::option::of((1i64..20, 1i64..6)), l * l);
        let marks = proptest::collection::vec(0u8..4, l * (l - 1) / 2);
        (Just(l), rates, marks).prop_map(|(l, rates, marks)| {
            let mut net = Network::numbered(l).unwrap();
            for i in 0..l {
                for k in (0..l).filter(|&k| k != i) {
                    if let Some((p, q)) = rates[i * l + k] {
                        net.set_rate(i, k, Rate::new(rat(p, q)).unwrap()).unwrap();
                    }
                }
            }
            let pairs: Vec<Pair> = Pair::all(l).collect();
            let pick = |m: u8| pairs.iter().zip(&marks).filter(move |(_, &x)| x == m).map(|(p, _)| *p);
            if marks.iter().any(|&m| m > 0) {
                net.set_class(ClassAnnotation::new(pick(1), pick(2)).unwrap()).unwrap();
            }
            net
        })
    })
}

fn permuted(net: &Network, perm: &[usize]) -> Network {
    let mut out = Network::numbered(net.dim()).unwrap();
    for (&(f, t), r) in net.rates() {
        out.set_rate(perm[f], perm[t], r.clone()).unwrap();
    }
    out
}

proptest! {
    #[test]
    fn file_round_trip(net in network_strategy()) {
        let text = serialize_network(&net);
        prop_assert_eq!(parse_network(&text).unwrap(), net);
    }

    #[test]
    fn exact_column_sums_vanish(net in network_strategy()) {
        let gen = net.generator();
        let exact = gen.exact().unwrap();
        for c in 0..gen.dim() {
            let sum: num_rational::BigRational = exact.column(c).iter().sum();
            prop_assert!(sum.is_zero());
        }
        prop_assert!(gen.column_residual() <= dbnet::tol::TAU_MARKOV);
    }

    #[test]
    fn ergodicity_ignores_relabeling(net in network_strategy(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..net.dim()).collect();
        perm.shuffle(&mut rng(seed));
        let a = check_ergodic(&net.generator());
        let b = check_ergodic(&permuted(&net, &perm).generator());
        prop_assert_eq!(a.ergodic, b.ergodic);
        prop_assert_eq!(a.scc_count, b.scc_count);
    }

    #[test]
    fn positive_rates_are_ergodic(l in 2usize..7, rates in proptest::collection::vec(1u64..50, 49)) {
        let mut net = Network::numbered(l).unwrap();
        for i in 0..l {
            for k in (0..l).filter(|&k| k != i) {
                net.set_rate(i, k, Rate::integer(rates[i * 7 + k])).unwrap();
            }
        }
        prop_assert!(check_ergodic(&net.generator()).ergodic);
    }
}
