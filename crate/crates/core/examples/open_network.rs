// Networks with source and sink compartments: extended detailed balance
// and the interior response functions.

use dbnet::balance::{check_extended_db, open_response};
use dbnet::netmodel::parse_network;
use dbnet::Result;

const OPEN: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/extended_db.json"));

pub fn run_example() -> Result<()> {
    let net = parse_network(OPEN)?;
    let ext = check_extended_db(&net)?;
    println!("interior {:?}: extended DB = {}", ext.interior, ext.satisfied);
    println!("interior steady state {:?}", ext.interior_steady);

    let ts = [0.1, 0.5, 1.0, 2.0, 5.0];
    let r12 = open_response(&net, 0, 1, &ts)?;
    let r21 = open_response(&net, 1, 0, &ts)?;
    let (n1, n2) = (ext.interior_steady[0], ext.interior_steady[1]);
    for k in 0..ts.len() {
        println!(
            "t = {:<4} R_12 = {:.6}  R_21 = {:.6}  N_1 R_12 - N_2 R_21 = {:.1e}",
            ts[k],
            r12.values[k],
            r21.values[k],
            n1 * r12.values[k] - n2 * r21.values[k]
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
