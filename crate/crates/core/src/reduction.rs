//! Polytopic coordinates for winding cells.
//!
//! Every `x` in the winding cell `u` has a unique `y in 1^perp` with
//!
//! ```text
//! d_cc(B^T x) = B^T y + 2 pi C^+ u
//! ```
//!
//! and `z = R y in R^(n-1)` lies in the polytope
//! `P_u = { z : |B^T R^T z + 2 pi C^+ u|_inf <= pi }`. The cohesive cell maps
//! injectively into `P_{u,gamma}` (strict `< gamma`), which is convex. On
//! these coordinates the dynamics reads `z' = R F(B^T R^T z + 2 pi C^+ u)`
//! where `F` is the field written over edge differences.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::dynamics::ModelParams;
use crate::error::{check_dim, Error, Result};
use crate::graph::{CycleBasis, WeightedGraph};
use crate::seminorm::ConsensusProjector;
use crate::torus::{edge_diffs, winding_vector, PhaseState, WindingVector};

/// Residual allowed when solving `B^T y = eta`.
pub const PROJECTION_TOL: f64 = 1e-9;

/// A point of the polytope `P_u` together with its cell tag.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState {
    pub z: DVector<f64>,
    pub u: WindingVector,
}

impl Serialize for ReducedState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            z: &'a [f64],
            u: &'a WindingVector,
        }
        Repr { z: self.z.as_slice(), u: &self.u }.serialize(s)
    }
}

/// Precomputed matrices for one graph and cycle basis.
#[derive(Debug, Clone)]
pub struct PolytopeChart {
    graph: WeightedGraph,
    basis: CycleBasis,
    proj: ConsensusProjector,
    incidence_t: DMatrix<f64>,
    cycle_pinv: DMatrix<f64>,
    /// `B^T R^T`
    edge_map: DMatrix<f64>,
}

impl PolytopeChart {
    pub fn new(graph: &WeightedGraph, basis: &CycleBasis) -> Result<Self> {
        check_dim(graph.m(), basis.cycle_edge_matrix().ncols())?;
        let proj = ConsensusProjector::new(graph.n())?;
        let incidence_t = graph.incidence_matrix().transpose();
        // C has full row rank, so C^+ = C^T (C C^T)^-1
        let c = basis.cycle_edge_matrix_f64();
        let gram = (&c * c.transpose())
            .cholesky()
            .ok_or_else(|| Error::InvalidGraph("cycle basis is not independent".into()))?;
        let cycle_pinv = gram.solve(&c).transpose();
        let edge_map = &incidence_t * proj.r().transpose();
        Ok(Self {
            graph: graph.clone(),
            basis: basis.clone(),
            proj,
            incidence_t,
            cycle_pinv,
            edge_map,
        })
    }

    /// Chart for the graph's own fundamental cycle basis.
    pub fn for_graph(graph: &WeightedGraph) -> Result<Self> {
        Self::new(graph, &graph.cycle_basis())
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn basis(&self) -> &CycleBasis {
        &self.basis
    }

    pub fn projector(&self) -> &ConsensusProjector {
        &self.proj
    }

    /// `C^+`, an `m x c` matrix.
    pub fn cycle_pinv(&self) -> &DMatrix<f64> {
        &self.cycle_pinv
    }

    /// Dimension of the reduced space, `n - 1`.
    pub fn dim(&self) -> usize {
        self.graph.n() - 1
    }

    fn check_cell(&self, z: &DVector<f64>, u: &WindingVector) -> Result<()> {
        check_dim(self.dim(), z.len())?;
        check_dim(self.basis.len(), u.len())
    }

    fn cycle_offset(&self, u: &WindingVector) -> DVector<f64> {
        &self.cycle_pinv * u.as_f64() * TAU
    }

    /// `proj_u(x)` with `u` the winding vector of `x`.
    pub fn project(&self, x: &PhaseState) -> Result<ReducedState> {
        let u = winding_vector(&self.basis, x)?;
        let eta = edge_diffs(&self.graph, x)? - self.cycle_offset(&u);
        // eta lies in the range of B^T whenever the cell is consistent, and
        // then tree potentials give the exact solution
        let y = PhaseState::from(self.basis.tree().potentials(&self.graph, eta.as_slice()))
            .centered()
            .into_inner();
        let residual = (&self.incidence_t * &y - &eta).amax();
        if residual > PROJECTION_TOL {
            return Err(Error::InconsistentCell { residual });
        }
        Ok(ReducedState { z: self.proj.r() * y, u })
    }

    /// `B^T R^T z + 2 pi C^+ u`.
    pub fn embed_edge_diffs(&self, z: &DVector<f64>, u: &WindingVector) -> Result<DVector<f64>> {
        self.check_cell(z, u)?;
        Ok(&self.edge_map * z + self.cycle_offset(u))
    }

    /// Strict membership in `P_{u,gamma}`.
    pub fn in_polytope(&self, z: &DVector<f64>, u: &WindingVector, gamma: f64) -> Result<bool> {
        if !(gamma > 0.0 && gamma <= PI) {
            return Err(Error::InvalidRange(format!("gamma = {gamma} outside (0, pi]")));
        }
        Ok(self.embed_edge_diffs(z, u)?.amax() < gamma)
    }

    /// Membership in the closed polytope `P_u` (`<= pi`).
    pub fn in_cell_polytope(&self, z: &DVector<f64>, u: &WindingVector) -> Result<bool> {
        Ok(self.embed_edge_diffs(z, u)?.amax() <= PI)
    }

    fn check_params(&self, p: &ModelParams) -> Result<()> {
        if p.graph() != &self.graph {
            return Err(Error::InvalidGraph("model and chart are built on different graphs".into()));
        }
        Ok(())
    }

    /// `R F(B^T R^T z + 2 pi C^+ u)`.
    pub fn reduced_field(&self, p: &ModelParams, z: &DVector<f64>, u: &WindingVector) -> Result<DVector<f64>> {
        self.check_params(p)?;
        let eta = self.embed_edge_diffs(z, u)?;
        Ok(self.proj.r() * p.field_from_edge_diffs(&eta)?)
    }

    /// `R J_f(x) R^T` for any preimage `x`; the Jacobian only depends on the
    /// edge differences, so it is assembled from them directly.
    pub fn reduced_jacobian(&self, p: &ModelParams, z: &DVector<f64>, u: &WindingVector) -> Result<DMatrix<f64>> {
        self.check_params(p)?;
        let eta = self.embed_edge_diffs(z, u)?;
        self.proj.compress(&p.jacobian_from_edge_diffs(&eta)?)
    }

    /// Draws a point uniformly from `P_{u,gamma}`.
    ///
    /// The tree-edge components of the embedded edge differences are affine
    /// coordinates of `z`, and on `P_{u,gamma}` they range inside
    /// `(-gamma, gamma)`. Sampling that box uniformly and rejecting points
    /// outside the cell is therefore uniform rejection sampling on the
    /// polytope. Returns `None` after `max_attempts` rejections.
    pub fn sample_polytope<R: Rng + ?Sized>(
        &self,
        u: &WindingVector,
        gamma: f64,
        rng: &mut R,
        max_attempts: usize,
    ) -> Result<Option<ReducedState>> {
        if !(gamma > 0.0 && gamma <= PI) {
            return Err(Error::InvalidRange(format!("gamma = {gamma} outside (0, pi]")));
        }
        check_dim(self.basis.len(), u.len())?;
        let tree = self.basis.tree();
        let mut eta = vec![0.0; self.graph.m()];
        for _ in 0..max_attempts {
            for e in tree.tree_edges() {
                eta[e] = rng.random_range(-gamma..gamma);
            }
            let x = PhaseState::from(tree.potentials(&self.graph, &eta));
            if edge_diffs(&self.graph, &x)?.amax() >= gamma || winding_vector(&self.basis, &x)? != *u {
                continue;
            }
            return self.project(&x).map(Some);
        }
        Ok(None)
    }
}
