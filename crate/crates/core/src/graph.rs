//! Weighted undirected graphs: incidence and Laplacian matrices, spectral
//! quantities, and a fundamental cycle basis.
//!
//! Edges are stored with `i < j`. The incidence column of edge `(i, j)` has
//! `+1` at row `i` and `-1` at row `j`, so `B^T x` lists `x_i - x_j` per edge.

use std::collections::{BTreeSet, VecDeque};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold (times the mean edge weight) below which `lambda2` is
/// treated as zero.
pub const CONNECTIVITY_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

/// Connected, simple, positively weighted undirected graph.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl WeightedGraph {
    /// Builds and validates a graph. Endpoints are reordered so that `i < j`;
    /// edge order is kept as given.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n < 2 {
            return Err(Error::InvalidGraph(format!("need at least 2 vertices, got {n}")));
        }
        let mut seen = BTreeSet::new();
        let mut stored = Vec::new();
        for (a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) out of range for n = {n}")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) has non-positive weight {w}")));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((i, j)) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({i}, {j})")));
            }
            stored.push(Edge { i, j, w });
        }

        let mut adjacency = vec![Vec::new(); n];
        for (e, edge) in stored.iter().enumerate() {
            adjacency[edge.i].push((edge.j, e));
            adjacency[edge.j].push((edge.i, e));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        let graph = Self { n, edges: stored, adjacency };
        // Traversal check; the spectral check in `algebraic_connectivity`
        // stays as a second line.
        if graph.bfs_order(0).len() != n {
            return Err(Error::NotConnected { lambda2: 0.0 });
        }
        Ok(graph)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `v` as `(neighbor, edge index)`, sorted by neighbor.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    /// Number of independent cycles, `m - n + 1`.
    pub fn cycle_rank(&self) -> usize {
        self.m() + 1 - self.n
    }

    fn bfs_order(&self, root: usize) -> Vec<usize> {
        let mut visited = vec![false; self.n];
        let mut order = Vec::with_capacity(self.n);
        let mut queue = VecDeque::from([root]);
        visited[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(w, _) in &self.adjacency[v] {
                if !visited[w] {
                    visited[w] = true;
                    queue.push_back(w);
                }
            }
        }
        order
    }

    pub fn incidence_matrix(&self) -> DMatrix<f64> {
        let mut b = DMatrix::zeros(self.n, self.m());
        for (e, edge) in self.edges.iter().enumerate() {
            b[(edge.i, e)] = 1.0;
            b[(edge.j, e)] = -1.0;
        }
        b
    }

    pub fn weights(&self) -> DVector<f64> {
        DVector::from_iterator(self.m(), self.edges.iter().map(|e| e.w))
    }

    /// `L = B diag(w) B^T`, assembled edge by edge.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for edge in &self.edges {
            l[(edge.i, edge.i)] += edge.w;
            l[(edge.j, edge.j)] += edge.w;
            l[(edge.i, edge.j)] -= edge.w;
            l[(edge.j, edge.i)] -= edge.w;
        }
        l
    }

    /// Laplacian eigenvalues in ascending order.
    pub fn laplacian_spectrum(&self) -> Vec<f64> {
        sorted_eigenvalues(self.laplacian())
    }

    /// Second-smallest Laplacian eigenvalue.
    pub fn algebraic_connectivity(&self) -> Result<f64> {
        let lambda2 = self.laplacian_spectrum()[1];
        let mean_w = self.edges.iter().map(|e| e.w).sum::<f64>() / self.m() as f64;
        if lambda2 <= CONNECTIVITY_RTOL * mean_w {
            return Err(Error::NotConnected { lambda2 });
        }
        Ok(lambda2)
    }

    pub fn weighted_degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for edge in &self.edges {
            d[edge.i] += edge.w;
            d[edge.j] += edge.w;
        }
        d
    }

    pub fn max_weighted_degree(&self) -> f64 {
        self.weighted_degrees().into_iter().fold(0.0, f64::max)
    }

    pub fn spanning_tree(&self) -> SpanningTree {
        SpanningTree::bfs(self)
    }

    pub fn cycle_basis(&self) -> CycleBasis {
        CycleBasis::fundamental(self)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1.0)));
        Self::new(n, edges)
    }

    /// Cycle `0 - 1 - ... - (n-1) - 0` with unit weights.
    pub fn ring(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGraph(format!("ring needs at least 3 vertices, got {n}")));
        }
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0)))
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::new(n, (0..n.saturating_sub(1)).map(|i| (i, i + 1, 1.0)))
    }

    /// Star with hub 0.
    pub fn star(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|j| (0, j, 1.0)))
    }

    /// Random connected graph: a random spanning tree (each vertex attaches
    /// to a uniformly chosen earlier vertex) plus every other pair with
    /// probability `extra_edge_prob`. Weights are uniform in `weights`.
    pub fn random_connected<R: Rng + ?Sized>(
        n: usize,
        extra_edge_prob: f64,
        weights: (f64, f64),
        rng: &mut R,
    ) -> Result<Self> {
        let (lo, hi) = weights;
        if !(0.0 < lo && lo <= hi) {
            return Err(Error::InvalidRange(format!("weight range ({lo}, {hi})")));
        }
        let draw_w = |rng: &mut R| if lo == hi { lo } else { rng.random_range(lo..hi) };
        let mut pairs = BTreeSet::new();
        let mut edges = Vec::new();
        for v in 1..n {
            let u = rng.random_range(0..v);
            pairs.insert((u, v));
            edges.push((u, v, draw_w(rng)));
        }
        for i in 0..n {
            for j in i + 1..n {
                if !pairs.contains(&(i, j)) && rng.random_bool(extra_edge_prob.clamp(0.0, 1.0)) {
                    edges.push((i, j, draw_w(rng)));
                }
            }
        }
        Self::new(n, edges)
    }
}

pub(crate) fn sorted_eigenvalues(sym: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Breadth-first spanning tree rooted at vertex 0; neighbors are visited in
/// increasing index order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTree {
    root: usize,
    order: Vec<usize>,
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
    is_tree_edge: Vec<bool>,
}

impl SpanningTree {
    fn bfs(g: &WeightedGraph) -> Self {
        let n = g.n();
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut visited = vec![false; n];
        let mut is_tree_edge = vec![false; g.m()];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([0]);
        visited[0] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(w, e) in g.neighbors(v) {
                if !visited[w] {
                    visited[w] = true;
                    parent[w] = Some((v, e));
                    depth[w] = depth[v] + 1;
                    is_tree_edge[e] = true;
                    queue.push_back(w);
                }
            }
        }
        Self { root: 0, order, parent, depth, is_tree_edge }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Vertices in BFS order, root first.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `(parent vertex, connecting edge)` for every non-root vertex.
    pub fn parent(&self, v: usize) -> Option<(usize, usize)> {
        self.parent[v]
    }

    pub fn is_tree_edge(&self, e: usize) -> bool {
        self.is_tree_edge[e]
    }

    pub fn tree_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.order.iter().filter_map(move |&v| self.parent[v].map(|(_, e)| e))
    }

    /// Vertex potentials `x` with `x_root = 0` and `x_i - x_j = eta_e` on
    /// every tree edge `e = (i, j)`. Non-tree entries of `eta` are ignored.
    pub fn potentials(&self, g: &WeightedGraph, eta: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; g.n()];
        for &v in &self.order[1..] {
            let (p, e) = self.parent[v].expect("non-root vertex has a parent");
            let edge = g.edges()[e];
            x[v] = if edge.i == p { x[p] - eta[e] } else { x[p] + eta[e] };
        }
        x
    }

    /// Tree path from `v` up to (and including) `ancestor`.
    fn path_up(&self, mut v: usize, ancestor: usize) -> Vec<usize> {
        let mut path = vec![v];
        while v != ancestor {
            v = self.parent[v].expect("ancestor lies on the root path").0;
            path.push(v);
        }
        path
    }

    fn lowest_common_ancestor(&self, mut a: usize, mut b: usize) -> usize {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].unwrap().0;
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].unwrap().0;
        }
        while a != b {
            a = self.parent[a].unwrap().0;
            b = self.parent[b].unwrap().0;
        }
        a
    }
}

/// Fundamental cycles of the BFS spanning tree and their signed cycle-edge
/// incidence matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleBasis {
    cycles: Vec<Vec<usize>>,
    cycle_edge: DMatrix<i32>,
    tree: SpanningTree,
}

impl CycleBasis {
    fn fundamental(g: &WeightedGraph) -> Self {
        let tree = SpanningTree::bfs(g);
        let mut cycles = Vec::new();
        for (e, edge) in g.edges().iter().enumerate() {
            if tree.is_tree_edge(e) {
                continue;
            }
            // i -> j along the edge, then back to i through the tree.
            let lca = tree.lowest_common_ancestor(edge.i, edge.j);
            let mut cycle = vec![edge.i];
            cycle.extend(tree.path_up(edge.j, lca));
            let mut back = tree.path_up(edge.i, lca);
            back.pop();
            cycle.extend(back.into_iter().rev());
            cycles.push(cycle);
        }

        let mut cycle_edge = DMatrix::zeros(cycles.len(), g.m());
        for (s, cycle) in cycles.iter().enumerate() {
            for step in cycle.windows(2) {
                let (a, b) = (step[0], step[1]);
                let &(_, e) = g
                    .neighbors(a)
                    .iter()
                    .find(|&&(w, _)| w == b)
                    .expect("consecutive cycle vertices are adjacent");
                cycle_edge[(s, e)] = if a < b { 1 } else { -1 };
            }
        }
        Self { cycles, cycle_edge, tree }
    }

    /// Number of cycles `c`.
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Closed vertex sequences `(i_0, ..., i_l = i_0)`.
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    /// Signed `c x m` cycle-edge incidence matrix.
    pub fn cycle_edge_matrix(&self) -> &DMatrix<i32> {
        &self.cycle_edge
    }

    pub fn cycle_edge_matrix_f64(&self) -> DMatrix<f64> {
        self.cycle_edge.map(f64::from)
    }

    pub fn tree(&self) -> &SpanningTree {
        &self.tree
    }

    /// Length (edge count) of each cycle.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        self.cycles.iter().map(|c| c.len() - 1).collect()
    }
}
