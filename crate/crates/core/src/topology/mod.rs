//! Support graph, cut vertices, and simple paths through a prescribed edge.

mod flow;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::netmodel::{ClassAnnotation, Generator, Pair};

pub use flow::{path_through_edge, PathCertificate};

/// Graph of positive off-diagonal rates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportGraph {
    dim: usize,
    /// `(from, to)` with a positive rate.
    directed: BTreeSet<(usize, usize)>,
    undirected: BTreeSet<Pair>,
    symmetric: bool,
    #[serde(skip)]
    adj: Vec<Vec<usize>>,
}

impl SupportGraph {
    pub fn from_generator(gen: &Generator) -> Self {
        let a = gen.matrix();
        let dim = gen.dim();
        let directed = (0..dim)
            .flat_map(|f| (0..dim).map(move |t| (f, t)))
            .filter(|&(f, t)| f != t && a[(t, f)] > 0.0)
            .collect();
        Self::build(dim, directed)
    }

    /// Symmetric graph with both directions of every listed pair.
    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = Pair>) -> Self {
        let directed = pairs
            .into_iter()
            .flat_map(|p| [(p.lo(), p.hi()), (p.hi(), p.lo())])
            .collect();
        Self::build(dim, directed)
    }

    fn build(dim: usize, directed: BTreeSet<(usize, usize)>) -> Self {
        let undirected: BTreeSet<Pair> = directed
            .iter()
            .filter_map(|&(f, t)| Pair::new(f, t))
            .collect();
        let symmetric = directed.iter().all(|&(f, t)| directed.contains(&(t, f)));
        let mut adj = vec![Vec::new(); dim];
        for p in &undirected {
            adj[p.lo()].push(p.hi());
            adj[p.hi()].push(p.lo());
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Self {
            dim,
            directed,
            undirected,
            symmetric,
            adj,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn directed_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.directed
    }

    pub fn undirected_edges(&self) -> &BTreeSet<Pair> {
        &self.undirected
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        Pair::new(a, b).is_some_and(|p| self.undirected.contains(&p))
    }

    /// Neighbors in the undirected graph, ascending.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Component labels of the undirected graph with `removed` deleted
    /// (deleted vertices get `usize::MAX`).
    pub fn components_without(&self, removed: &[usize]) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.dim];
        let mut next = 0;
        for s in 0..self.dim {
            if removed.contains(&s) || label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in &self.adj[v] {
                    if !removed.contains(&w) && label[w] == usize::MAX {
                        label[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.components_without(&[]).iter().all(|&c| c == 0)
    }

    fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }
}

pub fn support_graph(gen: &Generator) -> SupportGraph {
    SupportGraph::from_generator(gen)
}

/// Articulation points by depth-first low-link.
pub fn find_cut_vertices(g: &SupportGraph) -> Result<BTreeSet<usize>> {
    g.require_connected()?;
    let n = g.dim();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut cuts = BTreeSet::new();
    let mut time = 0;
    // Explicit stack of (vertex, parent, next neighbor position).
    let mut stack = vec![(0usize, usize::MAX, 0usize)];
    disc[0] = 0;
    low[0] = 0;
    let mut root_children = 0;
    while let Some(top) = stack.len().checked_sub(1) {
        let (v, parent, pos) = stack[top];
        if let Some(&w) = g.neighbors(v).get(pos) {
            stack[top].2 += 1;
            if disc[w] == usize::MAX {
                time += 1;
                disc[w] = time;
                low[w] = time;
                if v == 0 {
                    root_children += 1;
                }
                stack.push((w, v, 0));
            } else if w != parent {
                low[v] = low[v].min(disc[w]);
            }
        } else {
            stack.pop();
            if parent != usize::MAX {
                low[parent] = low[parent].min(low[v]);
                if parent != 0 && low[v] >= disc[parent] {
                    cuts.insert(parent);
                }
            }
        }
    }
    if root_children > 1 {
        cuts.insert(0);
    }
    Ok(cuts)
}

/// Reference implementation: delete each vertex and test connectivity.
pub fn cut_vertices_by_deletion(g: &SupportGraph) -> BTreeSet<usize> {
    (0..g.dim())
        .filter(|&v| g.components_without(&[v]).iter().any(|&c| c != usize::MAX && c > 0))
        .collect()
}

/// Whether some cut vertex splits the edges into two parts, one of them
/// entirely in the balanced set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutClassReport {
    pub is_cut_class: bool,
    pub cut_vertex: Option<usize>,
    /// Vertices of the fully balanced part, the cut vertex included.
    pub balanced_side: Option<Vec<usize>>,
}

impl CutClassReport {
    /// True when both states lie on the balanced side.
    pub fn shields(&self, i: usize, j: usize) -> bool {
        self.balanced_side
            .as_ref()
            .is_some_and(|side| side.contains(&i) && side.contains(&j))
    }
}

/// Checks each cut vertex `X` in ascending order. The branches at `X` are
/// the components of the graph minus `X` together with their edges to `X`;
/// the balanced side is the union of the branches whose edges are all in
/// `annotation.balanced`.
pub fn check_stability_class_shape(
    g: &SupportGraph,
    annotation: &ClassAnnotation,
) -> Result<CutClassReport> {
    for x in find_cut_vertices(g)? {
        let report = cut_class_at(g, annotation, x);
        if report.is_cut_class {
            return Ok(report);
        }
    }
    Ok(CutClassReport {
        is_cut_class: false,
        cut_vertex: None,
        balanced_side: None,
    })
}

/// The shape test at one vertex `x` (assumed to be a cut vertex).
pub fn cut_class_at(g: &SupportGraph, annotation: &ClassAnnotation, x: usize) -> CutClassReport {
    let label = g.components_without(&[x]);
    let branches = label.iter().filter(|&&c| c != usize::MAX).max().map_or(0, |m| m + 1);
    let mut balanced = vec![true; branches];
    for e in g.undirected_edges() {
        let branch = if e.lo() == x { label[e.hi()] } else { label[e.lo()] };
        if !annotation.balanced.contains(e) {
            balanced[branch] = false;
        }
    }
    if branches < 2 || !balanced.iter().any(|&b| b) {
        return CutClassReport {
            is_cut_class: false,
            cut_vertex: None,
            balanced_side: None,
        };
    }
    let side = (0..g.dim())
        .filter(|&v| v == x || (label[v] != usize::MAX && balanced[label[v]]))
        .collect();
    CutClassReport {
        is_cut_class: true,
        cut_vertex: Some(x),
        balanced_side: Some(side),
    }
}
