#![allow(dead_code)]

use dbnet::netmodel::parse_network;
use dbnet::numerics::dense::{rat, Dense};
use dbnet::{Generator, Network, Pair};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn data(name: &str) -> String {
    let path = format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn data_path(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn load(name: &str) -> Network {
    parse_network(&data(name)).unwrap()
}

pub fn example4() -> Generator {
    load("example4.json").generator()
}

pub fn remark5() -> Generator {
    load("remark5.json").generator()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Pair from 1-based labels.
pub fn pair(a: usize, b: usize) -> Pair {
    Pair::new(a - 1, b - 1).unwrap()
}

pub fn rationals(v: &[(i64, i64)]) -> Vec<BigRational> {
    v.iter().map(|&(p, q)| rat(p, q)).collect()
}

/// Generator from integer rows in the usual row-major layout.
pub fn int_generator(rows: &[&[i64]]) -> Generator {
    let m = Dense::from_fn(rows.len(), rows.len(), |r, c| rat(rows[r][c], 1));
    Generator::from_exact(m).unwrap()
}
