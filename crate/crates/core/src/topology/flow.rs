use std::collections::VecDeque;

use serde::Serialize;

use super::SupportGraph;
use crate::error::{Error, Result};
use crate::netmodel::Pair;

/// A simple path from `from` to `to` that traverses `through_edge`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathCertificate {
    pub from: usize,
    pub to: usize,
    pub through_edge: Pair,
    pub vertices: Vec<usize>,
}

impl PathCertificate {
    /// Consecutive edges, oriented along the path.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.vertices.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Independent check of the certificate against `g`.
    pub fn validate(&self, g: &SupportGraph) -> std::result::Result<(), String> {
        let v = &self.vertices;
        if v.first() != Some(&self.from) || v.last() != Some(&self.to) {
            return Err("endpoints do not match the query".into());
        }
        let mut seen = vec![false; g.dim()];
        for &x in v {
            if x >= g.dim() || std::mem::replace(&mut seen[x], true) {
                return Err(format!("vertex {x} repeated or out of range"));
            }
        }
        let mut hits = 0;
        for (a, b) in self.edges() {
            if !g.has_edge(a, b) {
                return Err(format!("({a}, {b}) is not an edge"));
            }
            if Pair::new(a, b) == Some(self.through_edge) {
                hits += 1;
            }
        }
        if hits != 1 {
            return Err(format!("required edge used {hits} times"));
        }
        Ok(())
    }
}

const INF: i64 = i64::MAX / 4;

struct FlowNet {
    cap: Vec<Vec<i64>>,
    flow: Vec<Vec<i64>>,
}

impl FlowNet {
    fn new(n: usize) -> Self {
        Self {
            cap: vec![vec![0; n]; n],
            flow: vec![vec![0; n]; n],
        }
    }

    fn residual(&self, u: usize, v: usize) -> i64 {
        self.cap[u][v] - self.flow[u][v]
    }

    /// BFS tree of the residual graph; neighbors scanned in index order.
    fn bfs(&self, s: usize) -> Vec<usize> {
        let n = self.cap.len();
        let mut pred = vec![usize::MAX; n];
        pred[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if pred[v] == usize::MAX && self.residual(u, v) > 0 {
                    pred[v] = u;
                    queue.push_back(v);
                }
            }
        }
        pred
    }

    /// Edmonds–Karp, stopping once `limit` units flow.
    fn max_flow(&mut self, s: usize, t: usize, limit: i64) -> i64 {
        let mut total = 0;
        while total < limit {
            let pred = self.bfs(s);
            if pred[t] == usize::MAX {
                break;
            }
            let mut push = limit - total;
            let mut v = t;
            while v != s {
                push = push.min(self.residual(pred[v], v));
                v = pred[v];
            }
            let mut v = t;
            while v != s {
                let u = pred[v];
                self.flow[u][v] += push;
                self.flow[v][u] -= push;
                v = u;
            }
            total += push;
        }
        total
    }

    /// Follows one unit of flow from `s` to `t`, consuming it.
    fn take_path(&mut self, s: usize, t: usize) -> Vec<usize> {
        let mut nodes = vec![s];
        let mut u = s;
        while u != t {
            let v = (0..self.cap.len())
                .find(|&v| self.flow[u][v] > 0)
                .expect("flow is conserved");
            self.flow[u][v] -= 1;
            self.flow[v][u] += 1;
            nodes.push(v);
            u = v;
        }
        nodes
    }
}

/// Finds a simple path `from … P – Q … to` (or with `P`, `Q` swapped) through
/// `alpha = (P, Q)`.
///
/// Two vertex-disjoint paths from the ends of `alpha` to `{from, to}` are
/// found by a unit vertex-capacity max flow on the split-vertex graph with
/// `alpha` subdivided; augmenting paths are searched breadth-first in index
/// order, which fixes the orientation of the certificate. When no path
/// exists the error names a separating vertex, checked by deletion.
pub fn path_through_edge(
    g: &SupportGraph,
    from: usize,
    to: usize,
    alpha: Pair,
) -> Result<PathCertificate> {
    let dim = g.dim();
    for index in [from, to] {
        if index >= dim {
            return Err(Error::StateOutOfRange { index, dim });
        }
    }
    if from == to {
        return Err(Error::SameState(from));
    }
    if !g.undirected_edges().contains(&alpha) {
        return Err(Error::NotAnEdge(alpha.lo(), alpha.hi()));
    }
    g.require_connected()?;
    let (p, q) = (alpha.lo(), alpha.hi());
    let v_in = |v: usize| 2 * v;
    let v_out = |v: usize| 2 * v + 1;
    let source = 2 * dim;
    let sink = 2 * dim + 1;
    let mut net = FlowNet::new(2 * dim + 2);
    for v in 0..dim {
        net.cap[v_in(v)][v_out(v)] = 1;
    }
    for e in g.undirected_edges().iter().filter(|&&e| e != alpha) {
        net.cap[v_out(e.lo())][v_in(e.hi())] = INF;
        net.cap[v_out(e.hi())][v_in(e.lo())] = INF;
    }
    net.cap[source][v_in(p)] = INF;
    net.cap[source][v_in(q)] = INF;
    net.cap[v_out(from)][sink] = INF;
    net.cap[v_out(to)][sink] = INF;

    if net.max_flow(source, sink, 2) < 2 {
        let separator = separator_from_cut(&net, source, dim)
            .filter(|&v| separates(g, v, from, to, alpha))
            .or_else(|| (0..dim).find(|&v| separates(g, v, from, to, alpha)))
            .expect("a unit cut in a connected graph is a separating vertex");
        return Err(Error::NoPath {
            from,
            to,
            p,
            q,
            separator,
        });
    }
    let to_vertices = |nodes: Vec<usize>| {
        let mut out: Vec<usize> = Vec::new();
        for node in &nodes[1..nodes.len() - 1] {
            let v = node / 2;
            if out.last() != Some(&v) {
                out.push(v);
            }
        }
        out
    };
    let first = to_vertices(net.take_path(source, sink));
    let second = to_vertices(net.take_path(source, sink));
    // Each path runs from an end of alpha to one of the query vertices.
    let (mut head, tail) = if *first.last().expect("nonempty") == from {
        (first, second)
    } else {
        (second, first)
    };
    head.reverse();
    head.extend(tail);
    Ok(PathCertificate {
        from,
        to,
        through_edge: alpha,
        vertices: head,
    })
}

fn separator_from_cut(net: &FlowNet, source: usize, dim: usize) -> Option<usize> {
    let reach = net.bfs(source);
    (0..dim).find(|&v| reach[2 * v] != usize::MAX && reach[2 * v + 1] == usize::MAX)
}

/// Whether deleting `v` cuts every remaining end of `alpha` off from every
/// remaining query vertex.
pub(super) fn separates(g: &SupportGraph, v: usize, from: usize, to: usize, alpha: Pair) -> bool {
    let label = g.components_without(&[v]);
    let ends: Vec<usize> = [alpha.lo(), alpha.hi()].into_iter().filter(|&x| x != v).collect();
    let queries: Vec<usize> = [from, to].into_iter().filter(|&x| x != v).collect();
    !ends.is_empty()
        && !queries.is_empty()
        && ends
            .iter()
            .all(|&e| queries.iter().all(|&qv| label[e] != label[qv]))
}
