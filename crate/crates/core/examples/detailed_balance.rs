// Detailed balance: direct check, symmetrization and spanning-tree energies.

use dbnet::balance::{check_detailed_balance, db_via_trees, spanning_tree_energy, symmetrize};
use dbnet::netmodel::parse_network;
use dbnet::numerics::steady_state_exact;
use dbnet::{Pair, Result};

const EXAMPLE4: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/example4.json"));
const TREE: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/db_tree.json"));

fn pair(a: usize, b: usize) -> Pair {
    Pair::new(a - 1, b - 1).unwrap()
}

pub fn run_example() -> Result<()> {
    let gen = parse_network(EXAMPLE4)?.generator();
    let n = steady_state_exact(&gen)?;

    let db = check_detailed_balance(&gen, &n);
    let worst = db.worst_pair.unwrap();
    println!(
        "4x4: DB = {}, worst pair ({}, {}) residual {:.3}",
        db.satisfied,
        worst.lo() + 1,
        worst.hi() + 1,
        db.worst_residual
    );
    assert!(!db.satisfied);

    let b = symmetrize(&gen, &n);
    println!("symmetrized asymmetry {:.4}", b.asymmetry);

    // A spanning tree whose energy vector is not N: DB must fail.
    let tree = [pair(1, 3), pair(1, 2), pair(2, 4)];
    let mu = spanning_tree_energy(&gen, &tree)?;
    let mu_exact: Vec<String> = mu.exact.as_ref().unwrap().iter().map(|x| x.to_string()).collect();
    println!("energy of tree {{13, 12, 24}}: ({})", mu_exact.join(", "));
    assert_eq!(mu_exact, ["1/4"; 4]);
    let trees = db_via_trees(&gen, &n, None)?;
    println!(
        "fundamental trees: all energies equal N = {}, first mismatch after {} tree(s)",
        trees.equivalent_to_db, trees.trees_checked
    );

    let tree_net = parse_network(TREE)?.generator();
    let n = steady_state_exact(&tree_net)?;
    let db = check_detailed_balance(&tree_net, &n);
    println!("tree network: DB = {}", db.satisfied);
    assert!(db.satisfied && symmetrize(&tree_net, &n).is_symmetric());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
