// Response functions from simulated trajectories: independent runs and the
// single-realization regenerative protocol.

use dbnet::netmodel::parse_network;
use dbnet::numerics::propagate;
use dbnet::stochastic::{estimate_response_iid, estimate_response_regenerative, simulate};
use dbnet::Result;

const EXAMPLE4: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/example4.json"));
const TREE: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/db_tree.json"));
const CYCLE: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/cycle3_circulating.json"));

pub fn run_example() -> Result<()> {
    let gen = parse_network(EXAMPLE4)?.generator();
    let path = simulate(&gen, 0, 5.0, 1)?;
    println!("trajectory: {} jumps before t = 5", path.jump_times.len());

    let times = [0.5, 1.0, 2.0];
    let est = estimate_response_iid(&gen, 0, 1, &times, 20_000, 42, 0)?;
    for (k, &t) in times.iter().enumerate() {
        let exact = propagate(&gen, t)?.response(0, 1);
        println!(
            "R_12({t}) = {:.4} ± {:.4}   exact {exact:.4}",
            est.estimates[k], est.half_widths[k]
        );
    }
    print!("{}", est.to_csv());

    let tree = parse_network(TREE)?.generator();
    let r = estimate_response_regenerative(&tree, 0, 1, 0.5, 2.0, 20_000, 3)?;
    println!("DB tree: ratio test p = {:.3}", r.ratio_test_p.unwrap());

    let cycle = parse_network(CYCLE)?.generator();
    let r = estimate_response_regenerative(&cycle, 0, 1, 0.2, 1.0, 20_000, 3)?;
    println!("circulating 3-cycle: ratio test p = {:.1e}", r.ratio_test_p.unwrap());
    assert!(r.ratio_test_p.unwrap() < 0.01);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
