// The perturbation probe: DB-preserving edits along a path through a
// violating edge break pathwise detailed balance.

use dbnet::netmodel::parse_network;
use dbnet::numerics::steady_state_exact;
use dbnet::stability::{instability_probe, ProbeVerdict};
use dbnet::Result;

const EXAMPLE4: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/example4.json"));
const CUT_CLASS: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/cut_class.json"));
const TREE: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/db_tree.json"));

pub fn run_example() -> Result<()> {
    let gen = parse_network(EXAMPLE4)?.generator();
    let n = steady_state_exact(&gen)?;
    let v = instability_probe(&gen, &n, 0, 1)?;
    let w = v.witness.as_ref().unwrap();
    let path: Vec<usize> = w.perturbation.path.vertices.iter().map(|s| s + 1).collect();
    println!("4x4: {:?} via path {path:?}, ε = {:.1e}", v.verdict, w.epsilon);
    println!("     Δ_{} of the perturbed generator = {:.3e}", w.n, w.delta_value);
    let d = v.derivatives.as_ref().unwrap();
    println!(
        "     mixed derivative: exact {:.6}, finite difference {:.6}, closed form {:.6}",
        d.exact, d.finite_difference, d.closed_form
    );
    assert_eq!(v.verdict, ProbeVerdict::Unstable);

    let gen = parse_network(CUT_CLASS)?.generator();
    let n = steady_state_exact(&gen)?;
    let v = instability_probe(&gen, &n, 0, 1)?;
    println!(
        "cut class: {:?}, shielded edges {}, cut vertex {:?}",
        v.verdict,
        v.shielded_edges.len(),
        v.cut_class.as_ref().and_then(|c| c.cut_vertex).map(|x| x + 1)
    );
    assert_eq!(v.verdict, ProbeVerdict::CutShielded);

    let gen = parse_network(TREE)?.generator();
    let n = steady_state_exact(&gen)?;
    println!("tree: {:?}", instability_probe(&gen, &n, 0, 1)?.verdict);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
