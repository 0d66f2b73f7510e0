// Parameter counts behind the measurement heuristics, and the 6×6
// linearization for the 4-state network.

use dbnet::stability::{dimension_report, nonreciprocal_rank_check};
use dbnet::Result;

pub fn run_example() -> Result<()> {
    println!("{:>4} {:>8} {:>8} {:>8} {:>10}", "L", "dim A", "dim B", "dim C", "d for B=C");
    for l in [3, 4, 5, 10, 100] {
        let d = dimension_report(l)?;
        println!("{l:>4} {:>8} {:>8} {:>8} {:>10.2}", d.dim_a, d.dim_b, d.dim_c, d.reciprocal_d_for_equality);
    }
    let rank = nonreciprocal_rank_check();
    println!("printed M: det = {}, nonzero = {}", rank.printed_determinant, rank.determinant_nonzero);
    println!(
        "Jacobian at A0 recomputed: rank {}, matches printed M: {}",
        rank.recomputed_rank, rank.recomputed_matches_printed
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
