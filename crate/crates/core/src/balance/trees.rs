use std::collections::VecDeque;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::netmodel::{Generator, Pair};
use crate::numerics::dense::rat_to_f64;
use crate::numerics::SteadyState;
use crate::tol::TAU_DB;

/// Energy vector of a spanning tree: the positive normalized vector that
/// balances every tree edge.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyVector {
    pub tree: Vec<Pair>,
    pub values: Vec<f64>,
    #[serde(skip)]
    pub exact: Option<Vec<BigRational>>,
}

/// Parent links of `tree` rooted at state 0, in BFS order.
fn orient(dim: usize, tree: &[Pair]) -> Result<Vec<(usize, usize)>> {
    if tree.len() + 1 != dim {
        return Err(Error::NotSpanningTree(format!(
            "{} edges for {dim} states",
            tree.len()
        )));
    }
    let mut adj = vec![Vec::new(); dim];
    for p in tree {
        if p.hi() >= dim {
            return Err(Error::StateOutOfRange { index: p.hi(), dim });
        }
        adj[p.lo()].push(p.hi());
        adj[p.hi()].push(p.lo());
    }
    let mut seen = vec![false; dim];
    seen[0] = true;
    let mut links = Vec::with_capacity(dim - 1);
    let mut queue = VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                links.push((v, w));
                queue.push_back(w);
            }
        }
    }
    if links.len() + 1 != dim {
        return Err(Error::NotSpanningTree("edge set does not reach every state".into()));
    }
    Ok(links)
}

/// Computes `μ` by walking the tree from state 0:
/// `μ_child = μ_parent · A_{child,parent} / A_{parent,child}`.
pub fn spanning_tree_energy(gen: &Generator, tree: &[Pair]) -> Result<EnergyVector> {
    let dim = gen.dim();
    let links = orient(dim, tree)?;
    let a = gen.matrix();
    for &(p, c) in &links {
        if a[(c, p)] <= 0.0 || a[(p, c)] <= 0.0 {
            return Err(Error::OneWayTreeEdge(p, c));
        }
    }
    let mut tree: Vec<Pair> = tree.to_vec();
    tree.sort();
    if let Some(ex) = gen.exact() {
        let mut mu = vec![BigRational::zero(); dim];
        mu[0] = BigRational::from_integer(1.into());
        for &(p, c) in &links {
            mu[c] = &mu[p] * &ex[(c, p)] / &ex[(p, c)];
        }
        let total: BigRational = mu.iter().sum();
        let mu: Vec<BigRational> = mu.into_iter().map(|x| x / &total).collect();
        return Ok(EnergyVector {
            tree,
            values: mu.iter().map(rat_to_f64).collect(),
            exact: Some(mu),
        });
    }
    let mut mu = vec![0.0; dim];
    mu[0] = 1.0;
    for &(p, c) in &links {
        mu[c] = mu[p] * a[(c, p)] / a[(p, c)];
    }
    let total: f64 = mu.iter().sum();
    Ok(EnergyVector {
        tree,
        values: mu.into_iter().map(|x| x / total).collect(),
        exact: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeDbReport {
    pub equivalent_to_db: bool,
    pub mismatching_tree: Option<Vec<Pair>>,
    pub trees_checked: usize,
}

fn support_pairs(gen: &Generator) -> Result<Vec<Pair>> {
    let a = gen.matrix();
    let mut pairs = Vec::new();
    for p in Pair::all(gen.dim()) {
        let (fwd, bwd) = (a[(p.hi(), p.lo())] > 0.0, a[(p.lo(), p.hi())] > 0.0);
        if fwd != bwd {
            let (from, to) = if fwd { (p.lo(), p.hi()) } else { (p.hi(), p.lo()) };
            return Err(Error::AsymmetricSupport(from, to));
        }
        if fwd {
            pairs.push(p);
        }
    }
    Ok(pairs)
}

/// BFS tree from state 0 plus, for each non-tree edge `(u, v)`, the tree
/// obtained by adding it and dropping the first edge on the tree path from
/// `u` to `v`.
pub fn fundamental_trees(gen: &Generator) -> Result<Vec<Vec<Pair>>> {
    let dim = gen.dim();
    let edges = support_pairs(gen)?;
    let mut adj = vec![Vec::new(); dim];
    for p in &edges {
        adj[p.lo()].push(p.hi());
        adj[p.hi()].push(p.lo());
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let mut parent = vec![usize::MAX; dim];
    let mut depth = vec![0usize; dim];
    parent[0] = 0;
    let mut queue = VecDeque::from([0]);
    let mut base = Vec::new();
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if parent[w] == usize::MAX {
                parent[w] = v;
                depth[w] = depth[v] + 1;
                base.push(Pair::new(v, w).expect("distinct"));
                queue.push_back(w);
            }
        }
    }
    if base.len() + 1 != dim {
        return Err(Error::Disconnected);
    }
    let mut trees = vec![base.clone()];
    for e in edges.iter().filter(|e| !base.contains(e)) {
        // The tree path from u to v leaves u through u's parent link unless
        // v is a descendant of u, in which case it enters v from v's parent.
        let (u, v) = (e.lo(), e.hi());
        let drop = if depth[u] >= depth[v] {
            Pair::new(u, parent[u])
        } else {
            Pair::new(v, parent[v])
        }
        .expect("non-root");
        let mut t: Vec<Pair> = base.iter().copied().filter(|&p| p != drop).collect();
        t.push(*e);
        t.sort();
        trees.push(t);
    }
    Ok(trees)
}

/// Compares the energy vector of each tree with `N`.
pub fn db_via_trees(
    gen: &Generator,
    n: &SteadyState,
    trees: Option<&[Vec<Pair>]>,
) -> Result<TreeDbReport> {
    support_pairs(gen)?;
    let owned;
    let trees = match trees {
        Some(t) => t,
        None => {
            owned = fundamental_trees(gen)?;
            &owned
        }
    };
    for (k, tree) in trees.iter().enumerate() {
        let mu = spanning_tree_energy(gen, tree)?;
        let off = mu
            .values
            .iter()
            .zip(&n.values)
            .any(|(m, x)| (m - x).abs() > TAU_DB * x);
        if off {
            return Ok(TreeDbReport {
                equivalent_to_db: false,
                mismatching_tree: Some(mu.tree),
                trees_checked: k + 1,
            });
        }
    }
    Ok(TreeDbReport {
        equivalent_to_db: true,
        mismatching_tree: None,
        trees_checked: trees.len(),
    })
}
