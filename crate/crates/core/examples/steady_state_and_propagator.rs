// Exact steady states and the uniformized matrix exponential.

use dbnet::netmodel::parse_network;
use dbnet::numerics::{propagate, steady_state, steady_state_exact};
use dbnet::Result;

const EXAMPLE4: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/example4.json"));

pub fn run_example() -> Result<()> {
    let gen = parse_network(EXAMPLE4)?.generator();

    let exact = steady_state_exact(&gen)?;
    let shown: Vec<String> = exact.exact.as_ref().unwrap().iter().map(|x| x.to_string()).collect();
    println!("N = ({})", shown.join(", "));
    assert_eq!(shown, ["1/4", "1/4", "3/10", "1/5"]);

    let float = steady_state(&gen)?;
    println!("float solve residual {:.2e}", float.residual);

    println!("{:>6} {:>12} {:>12}", "t", "R_12(t)", "R_21(t)");
    for t in [0.0, 0.1, 0.5, 1.0, 2.0, 5.0] {
        let p = propagate(&gen, t)?;
        println!(
            "{t:>6} {:>12.8} {:>12.8}   tail {:.1e}",
            p.response(0, 1),
            p.response(1, 0),
            p.truncation_bound
        );
    }

    // e^{tA} N = N
    let p = propagate(&gen, 3.0)?;
    let moved = p.matrix.mul_vec(&float.values);
    let drift = moved.iter().zip(&float.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("|e^(3A) N - N| = {drift:.1e}");
    assert!(drift < 1e-12);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
