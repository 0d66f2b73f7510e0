// The Δ_n series, the response-ratio test and the walk-sum oracle.

use dbnet::netmodel::parse_network;
use dbnet::numerics::{matrix_power_apply_exact, steady_state_exact, unit_exact};
use dbnet::pathwise::{check_pdb, response_ratio_test, walk_sum_oracle};
use dbnet::Result;

const EXAMPLE4: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/example4.json"));
const REMARK5: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/remark5.json"));

pub fn run_example() -> Result<()> {
    for (name, text) in [("4x4", EXAMPLE4), ("5x5", REMARK5)] {
        let gen = parse_network(text)?.generator();
        let n = steady_state_exact(&gen)?;
        let pdb = check_pdb(&gen, &n, 0, 1)?;
        let deltas: Vec<String> = pdb.series.exact.as_ref().unwrap().iter().map(|d| d.to_string()).collect();
        println!("{name}: PDB(1,2) = {}, Δ_1..Δ_(L-1) = [{}]", pdb.holds, deltas.join(", "));
        assert!(pdb.holds);

        let ratio = response_ratio_test(&gen, 0, 1, &[0.1, 0.5, 1.0, 2.0, 5.0])?;
        println!(
            "     R_12/R_21 constant: {} (c = {:.6}, N_2/N_1 = {:.6})",
            ratio.constant, ratio.fitted_c, ratio.expected_c
        );
    }

    // ⟨e_2, A³ e_1⟩ as a sum over walks.
    let gen = parse_network(EXAMPLE4)?.generator();
    let walks = walk_sum_oracle(&gen, 0, 1, 3)?;
    let power = matrix_power_apply_exact(&gen, 3, &unit_exact(4, 0))?.expect("rational input");
    println!("walk sum 1 -> 2, length 3: {} over {} walks; A^3 entry {}", walks.value, walks.walks, power[1]);
    assert_eq!(walks.value, power[1]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
