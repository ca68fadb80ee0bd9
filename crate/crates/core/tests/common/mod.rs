//! Reference computations for the integration tests, written against the
//! model definitions only and sharing no code with the library.

#![allow(dead_code)]

use std::collections::VecDeque;
use std::f64::consts::{PI, TAU};

use rand::Rng;

pub type Mat = Vec<Vec<f64>>;

#[derive(Debug, Clone)]
pub struct RefGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl RefGraph {
    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j, 1.0));
            }
        }
        Self { n, edges }
    }

    pub fn ring(n: usize) -> Self {
        Self { n, edges: (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect() }
    }

    /// Two 7-cycles sharing node 0: 0-1-..-6-0 and 0-7-..-12-0.
    pub fn two_rings() -> Self {
        let mut edges = Vec::new();
        for ring in [[0, 1, 2, 3, 4, 5, 6], [0, 7, 8, 9, 10, 11, 12]] {
            for k in 0..7 {
                edges.push((ring[k], ring[(k + 1) % 7], 1.0));
            }
        }
        Self { n: 13, edges }
    }

    pub fn from_library(g: &ksnet::graph::WeightedGraph) -> Self {
        Self { n: g.n(), edges: g.edges().iter().map(|e| (e.i, e.j, e.w)).collect() }
    }

    pub fn to_library(&self) -> ksnet::graph::WeightedGraph {
        ksnet::graph::WeightedGraph::new(self.n, self.edges.iter().copied()).unwrap()
    }

    pub fn adjacency(&self) -> Mat {
        let mut a = zeros(self.n, self.n);
        for &(i, j, w) in &self.edges {
            a[i][j] += w;
            a[j][i] += w;
        }
        a
    }

    pub fn laplacian(&self) -> Mat {
        let a = self.adjacency();
        let mut l = zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                l[i][j] = if i == j { a[i].iter().sum() } else { -a[i][j] };
            }
        }
        l
    }

    pub fn lambda2(&self) -> f64 {
        sym_eigenvalues(&self.laplacian())[1]
    }

    pub fn d_max(&self) -> f64 {
        self.adjacency().iter().map(|r| r.iter().sum::<f64>()).fold(0.0, f64::max)
    }

    fn bfs_parents(&self) -> Vec<(usize, Option<usize>)> {
        let a = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut order = vec![(0, None)];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for w in 0..self.n {
                if a[v][w] > 0.0 && !seen[w] {
                    seen[w] = true;
                    order.push((w, Some(v)));
                    queue.push_back(w);
                }
            }
        }
        assert_eq!(order.len(), self.n, "graph must be connected");
        order
    }

    /// A state with every edge difference in `[-gamma, gamma]` (through
    /// `d_cc`), drawn by random tree increments plus rejection. With `raw`
    /// the raw differences are required to be small and no common phase is
    /// added.
    pub fn sample_cohesive<R: Rng>(&self, gamma: f64, raw: bool, rng: &mut R) -> Vec<f64> {
        let order = self.bfs_parents();
        loop {
            let mut x = vec![0.0; self.n];
            if !raw {
                x[0] = rng.random_range(0.0..TAU);
            }
            for &(v, parent) in &order[1..] {
                x[v] = x[parent.unwrap()] + rng.random_range(-gamma..gamma);
            }
            let ok = self.edges.iter().all(|&(i, j, _)| {
                let d = if raw { x[i] - x[j] } else { dcc(x[i] - x[j]) };
                d.abs() <= gamma
            });
            if ok {
                return x;
            }
        }
    }

    pub fn max_edge_diff(&self, x: &[f64]) -> f64 {
        self.edges.iter().map(|&(i, j, _)| dcc(x[i] - x[j]).abs()).fold(0.0, f64::max)
    }
}

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![0.0; c]; r]
}

/// Representative of `a` in `[-pi, pi)`.
pub fn dcc(a: f64) -> f64 {
    let r = a - TAU * ((a + PI) / TAU).floor();
    if r >= PI {
        r - TAU
    } else {
        r
    }
}

/// Winding number of the closed vertex walk `cycle` (first vertex not repeated).
pub fn winding_raw(cycle: &[usize], x: &[f64]) -> f64 {
    let k = cycle.len();
    (0..k).map(|s| dcc(x[cycle[s]] - x[cycle[(s + 1) % k]])).sum::<f64>() / TAU
}

/// `f_i = omega_i - sum_j a_ij [sin(x_i - x_j - phi) + sin(phi)]`
pub fn field(g: &RefGraph, phi: f64, omega: &[f64], x: &[f64]) -> Vec<f64> {
    let a = g.adjacency();
    (0..g.n)
        .map(|i| omega[i] - (0..g.n).map(|j| a[i][j] * ((x[i] - x[j] - phi).sin() + phi.sin())).sum::<f64>())
        .collect()
}

/// Jacobian of the odd part `-sum a cos(phi) sin(x_i - x_j)`.
pub fn jacobian_odd(g: &RefGraph, phi: f64, x: &[f64]) -> Mat {
    let a = g.adjacency();
    let mut j = zeros(g.n, g.n);
    for r in 0..g.n {
        for c in 0..g.n {
            if r != c {
                let v = a[r][c] * phi.cos() * (x[r] - x[c]).cos();
                j[r][c] = v;
                j[r][r] -= v;
            }
        }
    }
    j
}

/// Jacobian of the even part `-sum a sin(phi) (1 - cos(x_i - x_j))`.
pub fn jacobian_even(g: &RefGraph, phi: f64, x: &[f64]) -> Mat {
    let a = g.adjacency();
    let mut j = zeros(g.n, g.n);
    for r in 0..g.n {
        for c in 0..g.n {
            if r != c {
                let v = a[r][c] * phi.sin() * (x[r] - x[c]).sin();
                j[r][c] = v;
                j[r][r] -= v;
            }
        }
    }
    j
}

pub fn jacobian(g: &RefGraph, phi: f64, x: &[f64]) -> Mat {
    add(&jacobian_odd(g, phi, x), &jacobian_even(g, phi, x))
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(u, v)| u + v).collect()).collect()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn sym_eigenvalues(m: &Mat) -> Vec<f64> {
    let n = m.len();
    let mut a = m.clone();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        let scale: f64 = a.iter().flatten().map(|v| v * v).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (head, tail) = a.split_at_mut(q);
                for (apk, aqk) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                    let (x, y) = (*apk, *aqk);
                    *apk = c * x - s * y;
                    *aqk = s * x + c * y;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Largest eigenvalue of the symmetric part of `j` restricted to the
/// complement of the all-ones vector. The consensus direction is pushed to
/// `-shift` so it cannot win the maximum.
pub fn mu_consensus(j: &Mat) -> f64 {
    let n = j.len();
    let nf = n as f64;
    let sym: Mat = (0..n).map(|r| (0..n).map(|c| 0.5 * (j[r][c] + j[c][r])).collect()).collect();
    let p: Mat = (0..n).map(|r| (0..n).map(|c| if r == c { 1.0 } else { 0.0 } - 1.0 / nf).collect()).collect();
    let shift = 1e4;
    let psp = mul(&mul(&p, &sym), &p);
    let m: Mat = (0..n).map(|r| (0..n).map(|c| psp[r][c] - shift / nf).collect()).collect();
    *sym_eigenvalues(&m).last().unwrap()
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let (r, k, c) = (a.len(), b.len(), b[0].len());
    (0..r).map(|i| (0..c).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect()).collect()
}

pub fn from_dmatrix(m: &nalgebra::DMatrix<f64>) -> Mat {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect()).collect()
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
}

pub fn frobenius(a: &Mat) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

/// Norm of the component orthogonal to the all-ones vector.
pub fn consensus_distance(x: &[f64], y: &[f64]) -> f64 {
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    d.iter().map(|v| (v - mean).powi(2)).sum::<f64>().sqrt()
}

/// `x - y` is a constant plus integer multiples of `2 pi`.
pub fn same_up_to_rotation(x: &[f64], y: &[f64], tol: f64) -> bool {
    let rho = x[0] - y[0];
    x.iter().zip(y).all(|(a, b)| dcc(a - b - rho).abs() <= tol)
}

/// `gamma_bar = arctan(lambda2 / (d_max tan(phi)))`, `pi/2` at `phi = 0`.
pub fn gamma_bar(lambda2: f64, d_max: f64, phi: f64) -> f64 {
    if phi == 0.0 {
        PI / 2.0
    } else {
        (lambda2 / (d_max * phi.tan())).atan()
    }
}

pub fn rate(lambda2: f64, d_max: f64, phi: f64, gamma: f64) -> f64 {
    phi.cos() * gamma.cos() * lambda2 - phi.sin() * gamma.sin() * d_max
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
