//! Seeded random network families used by the examples and test suites.
//!
//! Rates are small rationals so that every generator carries an exact
//! matrix. All functions draw from the supplied RNG only.

use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::netmodel::{ClassAnnotation, CompartmentSpec, Generator, Network, Pair};
use crate::numerics::dense::{rat, Dense};
use crate::topology::SupportGraph;

/// A rate `p/q` with `p ∈ 1..=12`, `q ∈ 1..=4`.
pub fn random_rate<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    rat(rng.random_range(1..=12), rng.random_range(1..=4))
}

/// A Hamiltonian cycle in random order plus each remaining pair with
/// probability `chord_p`. Always 2-connected for `l ≥ 3`.
pub fn random_two_connected<R: Rng + ?Sized>(rng: &mut R, l: usize, chord_p: f64) -> SupportGraph {
    let mut order: Vec<usize> = (0..l).collect();
    order.shuffle(rng);
    let mut pairs: Vec<Pair> = (0..l)
        .filter_map(|k| Pair::new(order[k], order[(k + 1) % l]))
        .collect();
    for p in Pair::all(l) {
        if !pairs.contains(&p) && rng.random_bool(chord_p) {
            pairs.push(p);
        }
    }
    SupportGraph::from_pairs(l, pairs)
}

/// A random spanning tree plus each remaining pair with probability `extra_p`.
/// Cut vertices are likely for small `extra_p`.
pub fn random_connected<R: Rng + ?Sized>(rng: &mut R, l: usize, extra_p: f64) -> SupportGraph {
    let mut order: Vec<usize> = (0..l).collect();
    order.shuffle(rng);
    let mut pairs = Vec::new();
    for k in 1..l {
        let parent = order[rng.random_range(0..k)];
        pairs.extend(Pair::new(order[k], parent));
    }
    for p in Pair::all(l) {
        if !pairs.contains(&p) && rng.random_bool(extra_p) {
            pairs.push(p);
        }
    }
    SupportGraph::from_pairs(l, pairs)
}

/// The cycle `0 - 1 - … - (l-1) - 0`.
pub fn cycle_graph(l: usize) -> SupportGraph {
    SupportGraph::from_pairs(l, (0..l).filter_map(|k| Pair::new(k, (k + 1) % l)))
}

pub fn complete_graph(l: usize) -> SupportGraph {
    SupportGraph::from_pairs(l, Pair::all(l))
}

/// Random positive weights, one per state.
pub fn random_potential<R: Rng + ?Sized>(rng: &mut R, l: usize) -> Vec<BigRational> {
    (0..l).map(|_| rat(rng.random_range(1..=8), 1)).collect()
}

/// Detailed-balanced rates on the edges of `g`: with potential `μ` and a
/// symmetric weight `w_ab`, the rate `a → b` is `w_ab / μ_a`. The steady
/// state is `μ` normalized.
pub fn db_matrix<R: Rng + ?Sized>(rng: &mut R, g: &SupportGraph, mu: &[BigRational]) -> Dense<BigRational> {
    let mut m = Dense::zeros(g.dim(), g.dim());
    for p in g.undirected_edges() {
        let (a, b) = (p.lo(), p.hi());
        let w = random_rate(rng);
        m[(b, a)] = &w / &mu[a];
        m[(a, b)] = &w / &mu[b];
    }
    m
}

/// Independent random rates on both directions of every edge of `g`.
pub fn free_matrix<R: Rng + ?Sized>(rng: &mut R, g: &SupportGraph) -> Dense<BigRational> {
    let mut m = Dense::zeros(g.dim(), g.dim());
    for p in g.undirected_edges() {
        m[(p.hi(), p.lo())] = random_rate(rng);
        m[(p.lo(), p.hi())] = random_rate(rng);
    }
    m
}

pub fn random_db<R: Rng + ?Sized>(rng: &mut R, g: &SupportGraph) -> Generator {
    let mu = random_potential(rng, g.dim());
    Generator::from_exact_offdiag(db_matrix(rng, g, &mu))
}

pub fn random_free<R: Rng + ?Sized>(rng: &mut R, g: &SupportGraph) -> Generator {
    Generator::from_exact_offdiag(free_matrix(rng, g))
}

/// A detailed-balanced or free generator on the `l`-cycle. A free cycle
/// is almost surely not detailed-balanced.
pub fn random_cycle<R: Rng + ?Sized>(rng: &mut R, l: usize, db: bool) -> Generator {
    let g = cycle_graph(l);
    if db {
        random_db(rng, &g)
    } else {
        random_free(rng, &g)
    }
}

/// A free generator on a 3-cycle whose clockwise rates exceed the
/// counter-clockwise ones by `bias`.
pub fn circulating_triangle(bias: u64) -> Generator {
    let mut m = Dense::zeros(3, 3);
    for k in 0..3 {
        m[((k + 1) % 3, k)] = rat(bias as i64, 1);
        m[(k, (k + 1) % 3)] = rat(1, 1);
    }
    Generator::from_exact_offdiag(m)
}

/// `(A + PAP)/2` for the permutation `P` swapping `i` and `j`. The result
/// commutes with `P`, which forces `N_i = N_j` and `(Aⁿ)_ij = (Aⁿ)_ji`, so
/// pathwise detailed balance holds for `(i, j)` while detailed balance
/// generally fails.
pub fn swap_symmetrize(m: &Dense<BigRational>, i: usize, j: usize) -> Dense<BigRational> {
    let swap = |k: usize| {
        if k == i {
            j
        } else if k == j {
            i
        } else {
            k
        }
    };
    let two = rat(2, 1);
    Dense::from_fn(m.dim(), m.dim(), |r, c| {
        (&m[(r, c)] + &m[(swap(r), swap(c))]) / &two
    })
}

/// Searches for a non-detailed-balanced generator with 2-connected
/// support satisfying pathwise detailed balance for `(i, j)`, by
/// swap-symmetrizing free random generators. Returns the generator and the
/// number of attempts, or `None` after `max_attempts`.
pub fn swap_symmetric_pdb<R: Rng + ?Sized>(
    rng: &mut R,
    l: usize,
    i: usize,
    j: usize,
    max_attempts: usize,
) -> Option<(Generator, usize)> {
    for attempt in 1..=max_attempts {
        let g = random_two_connected(rng, l, 0.4);
        let m = swap_symmetrize(&free_matrix(rng, &g), i, j);
        let gen = Generator::from_exact_offdiag(m);
        let Ok(n) = crate::numerics::steady_state_exact(&gen) else {
            continue;
        };
        if !crate::balance::check_detailed_balance(&gen, &n).satisfied {
            return Some((gen, attempt));
        }
    }
    None
}

/// Two blocks glued at a cut vertex.
#[derive(Clone, Debug)]
pub struct CutClassNetwork {
    pub network: Network,
    /// States of the balanced block, including the cut vertex.
    pub near: Vec<usize>,
    /// States of the free block, including the cut vertex.
    pub far: Vec<usize>,
    pub cut_vertex: usize,
}

/// States `0..near_len` form the near block (the cut vertex is
/// `near_len - 1`), the remaining `far_len` states plus the cut vertex form
/// the far block. Near rates are detailed-balanced; far rates are free.
/// The annotation marks near pairs balanced (edges) or forbidden
/// (non-edges), all cross pairs forbidden and far pairs unconstrained.
pub fn cut_class_network<R: Rng + ?Sized>(
    rng: &mut R,
    near_len: usize,
    far_len: usize,
) -> Result<CutClassNetwork> {
    let x = near_len - 1;
    let l = near_len + far_len;
    let near: Vec<usize> = (0..near_len).collect();
    let far: Vec<usize> = std::iter::once(x).chain(near_len..l).collect();
    let embed = |g: &SupportGraph, idx: &[usize]| -> Vec<Pair> {
        g.undirected_edges()
            .iter()
            .filter_map(|p| Pair::new(idx[p.lo()], idx[p.hi()]))
            .collect()
    };
    let sub = |rng: &mut R, k: usize| {
        if k >= 3 {
            random_two_connected(rng, k, 0.4)
        } else {
            complete_graph(k)
        }
    };
    let near_edges = embed(&sub(rng, near_len), &near);
    let far_edges = embed(&sub(rng, far_len + 1), &far);

    let mu = random_potential(rng, l);
    let mut m = db_matrix(rng, &SupportGraph::from_pairs(l, near_edges.iter().copied()), &mu);
    for p in &far_edges {
        m[(p.hi(), p.lo())] = random_rate(rng);
        m[(p.lo(), p.hi())] = random_rate(rng);
    }
    let mut net = Network::from_matrix(&m)?;
    let forbidden = Pair::all(l).filter(|p| {
        let (a, b) = (p.lo(), p.hi());
        let in_near = a < near_len && b < near_len;
        let in_far = far.contains(&a) && far.contains(&b);
        (in_near && !near_edges.contains(p)) || (!in_near && !in_far)
    });
    net.set_class(ClassAnnotation::new(forbidden, near_edges.iter().copied())?)?;
    Ok(CutClassNetwork {
        network: net,
        near,
        far,
        cut_vertex: x,
    })
}

/// An open network: a detailed-balanced interior `0..interior`, followed by
/// source states feeding the interior and sink states fed by it. Sources
/// and sinks are internally connected by detailed-balanced rates so that
/// the full generator is irreducible within each block.
pub fn source_sink_network<R: Rng + ?Sized>(
    rng: &mut R,
    interior: usize,
    sources: usize,
    sinks: usize,
) -> Result<Network> {
    let l = interior + sources + sinks;
    let mut m: Dense<BigRational> = Dense::zeros(l, l);
    let place = |rng: &mut R, offset: usize, len: usize, m: &mut Dense<BigRational>| {
        if len < 2 {
            return;
        }
        let g = if len >= 3 {
            random_two_connected(rng, len, 0.3)
        } else {
            complete_graph(len)
        };
        let mu = random_potential(rng, len);
        let block = db_matrix(rng, &g, &mu);
        for r in 0..len {
            for c in 0..len {
                m[(offset + r, offset + c)] = block[(r, c)].clone();
            }
        }
    };
    place(rng, 0, interior, &mut m);
    place(rng, interior, sources, &mut m);
    place(rng, interior + sources, sinks, &mut m);
    for s in interior..interior + sources {
        let target = rng.random_range(0..interior);
        m[(target, s)] = random_rate(rng);
    }
    for k in interior + sources..l {
        let from = rng.random_range(0..interior);
        m[(k, from)] = random_rate(rng);
    }
    // Make sure every block boundary carries at least one rate.
    if sinks > 0 && (interior + sources..l).all(|k| (0..interior).all(|i| m[(k, i)].is_zero())) {
        m[(interior + sources, 0)] = random_rate(rng);
    }
    let mut net = Network::from_matrix(&m)?;
    net.set_compartments(CompartmentSpec::new(
        (0..interior).collect(),
        (interior..interior + sources).collect(),
        (interior + sources..l).collect(),
    ))?;
    Ok(net)
}
