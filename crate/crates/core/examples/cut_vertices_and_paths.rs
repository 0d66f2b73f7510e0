// Cut vertices and simple paths through a prescribed edge.

use dbnet::netmodel::parse_network;
use dbnet::topology::{find_cut_vertices, path_through_edge, support_graph};
use dbnet::{Error, Pair, Result};

const EXAMPLE4: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/example4.json"));
const REMARK5: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/remark5.json"));

pub fn run_example() -> Result<()> {
    let g4 = support_graph(&parse_network(EXAMPLE4)?.generator());
    println!("4x4 cut vertices: {:?}", find_cut_vertices(&g4)?);

    // K4 is 2-connected: every (I, F, edge) triple has a path.
    let mut count = 0;
    for from in 0..4 {
        for to in (0..4).filter(|&t| t != from) {
            for &alpha in g4.undirected_edges() {
                let path = path_through_edge(&g4, from, to, alpha)?;
                path.validate(&g4).expect("certificate");
                count += 1;
            }
        }
    }
    println!("K4: {count} certified paths");
    let p = path_through_edge(&g4, 0, 1, Pair::new(2, 3).unwrap())?;
    println!("1 -> 2 through (3,4): {:?}", p.vertices.iter().map(|v| v + 1).collect::<Vec<_>>());

    let g5 = support_graph(&parse_network(REMARK5)?.generator());
    let cuts = find_cut_vertices(&g5)?;
    println!("5x5 cut vertices: {:?}", cuts.iter().map(|v| v + 1).collect::<Vec<_>>());
    match path_through_edge(&g5, 0, 1, Pair::new(3, 4).unwrap()) {
        Err(Error::NoPath { separator, .. }) => println!("no 1 -> 2 path through (4,5); vertex {} separates", separator + 1),
        other => panic!("expected a separator, got {other:?}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
