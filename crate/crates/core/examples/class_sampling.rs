// Random class-preserving perturbations inside a stability class.

use dbnet::netgen::cut_class_network;
use dbnet::netmodel::parse_network;
use dbnet::stability::{stability_sampling, SamplingConfig};
use dbnet::{ClassAnnotation, Pair, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const EXAMPLE4: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/example4.json"));
const CUT_CLASS: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/cut_class.json"));

pub fn run_example() -> Result<()> {
    let config = SamplingConfig {
        trials: 200,
        seed: 11,
        ..SamplingConfig::default()
    };

    let net = parse_network(CUT_CLASS)?;
    let r = stability_sampling(&net, 0, 1, &config)?;
    println!("cut class file: {} / {} trials broke PDB(1,2)", r.violations, r.trials);
    assert_eq!(r.violations, 0);

    // The 4x4 network in a class that only balances (1,2).
    let mut net = parse_network(EXAMPLE4)?;
    net.set_class(ClassAnnotation::new([], [Pair::new(0, 1).unwrap()])?)?;
    let r = stability_sampling(&net, 0, 1, &config)?;
    println!("4x4 with E_B = {{(1,2)}}: {} / {} trials broke PDB(1,2)", r.violations, r.trials);
    assert!(r.violations > 0);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let c = cut_class_network(&mut rng, 4, 3)?;
    let r = stability_sampling(&c.network, 0, 1, &config)?;
    println!(
        "random cut class ({} states, cut vertex {}): {} violations, max |Δ| {:.1e}",
        c.network.dim(),
        c.cut_vertex + 1,
        r.violations,
        r.max_delta
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
