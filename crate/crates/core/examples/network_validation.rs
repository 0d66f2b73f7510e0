// Parse a network file, build its generator and run the structural checks.
//
// Run with `cargo run --example network_validation`.

use dbnet::netmodel::{check_compartments, check_ergodic, parse_network, serialize_network};
use dbnet::Result;

const EXAMPLE4: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/example4.json"));
const ABSORBING: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/absorbing.json"));
const OPEN: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/extended_db.json"));

pub fn run_example() -> Result<()> {
    let net = parse_network(EXAMPLE4)?;
    let gen = net.generator();
    println!("states: {:?}", net.states());
    for r in 0..gen.dim() {
        println!("  {:?}", gen.matrix().row(r));
    }
    let erg = check_ergodic(&gen);
    println!("ergodic: {} ({} strongly connected component)", erg.ergodic, erg.scc_count);
    assert!(erg.ergodic);

    // The file format round-trips.
    assert_eq!(parse_network(&serialize_network(&net))?, net);

    let stuck = parse_network(ABSORBING)?.generator();
    let erg = check_ergodic(&stuck);
    println!("absorbing file: ergodic = {}, witness = {:?}", erg.ergodic, erg.witness);
    assert!(!erg.ergodic);

    let bad = parse_network(r#"{"states": ["a", "b"], "rates": [{"from": "a", "to": "b", "rate": -1}]}"#);
    println!("negative rate: {}", bad.unwrap_err());

    let open = parse_network(OPEN)?;
    let comp = check_compartments(&open)?;
    for c in &comp.conditions {
        println!("  {:<32} {}", c.name, if c.passed { "ok" } else { "FAILED" });
    }
    assert!(comp.passed);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
