//! Phase states, counterclockwise differences, winding numbers and
//! cohesiveness predicates.

use std::f64::consts::{PI, TAU};
use std::ops::{Deref, DerefMut};

use nalgebra::DVector;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, Error, Result};
use crate::graph::{CycleBasis, WeightedGraph};

/// Absolute tolerance for winding sums to be a multiple of 2*pi.
pub const WINDING_TOL: f64 = 1e-9;

/// Phases in radians, living in R^n (no wrapping is imposed).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState(DVector<f64>);

impl PhaseState {
    pub fn new(x: DVector<f64>) -> Self {
        Self(x)
    }

    pub fn zeros(n: usize) -> Self {
        Self(DVector::zeros(n))
    }

    pub fn from_slice(x: &[f64]) -> Self {
        Self(DVector::from_column_slice(x))
    }

    /// Equal-gap state on a ring of `n` oscillators whose increasing-index
    /// cycle has winding number `k`.
    pub fn splay(n: usize, k: i64) -> Self {
        Self(DVector::from_fn(n, |i, _| -TAU * k as f64 * i as f64 / n as f64))
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Copy with the mean removed.
    pub fn centered(&self) -> Self {
        let mean = self.0.mean();
        Self(self.0.add_scalar(-mean))
    }
}

impl Deref for PhaseState {
    type Target = DVector<f64>;
    fn deref(&self) -> &DVector<f64> {
        &self.0
    }
}

impl DerefMut for PhaseState {
    fn deref_mut(&mut self) -> &mut DVector<f64> {
        &mut self.0
    }
}

impl From<Vec<f64>> for PhaseState {
    fn from(v: Vec<f64>) -> Self {
        Self(DVector::from_vec(v))
    }
}

impl Serialize for PhaseState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PhaseState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Vec::<f64>::deserialize(d).map(Self::from)
    }
}

/// Integer winding numbers, one per basis cycle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WindingVector(pub Vec<i64>);

impl WindingVector {
    pub fn zeros(c: usize) -> Self {
        Self(vec![0; c])
    }

    pub fn as_f64(&self) -> DVector<f64> {
        DVector::from_iterator(self.0.len(), self.0.iter().map(|&u| u as f64))
    }
}

impl Deref for WindingVector {
    type Target = [i64];
    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for WindingVector {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

impl std::fmt::Display for WindingVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (k, u) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{u}")?;
        }
        write!(f, ")")
    }
}

/// `x1 - x2 + 2*pi*k`, with `k` chosen so the result lies in `[-pi, pi)`.
pub fn ccw_diff(x1: f64, x2: f64) -> f64 {
    let mut r = (x1 - x2 + PI).rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU
    if r >= TAU {
        r -= TAU;
    }
    let d = r - PI;
    if d >= PI {
        -PI
    } else {
        d
    }
}

/// Counterclockwise difference across every edge, in canonical orientation.
pub fn edge_diffs(g: &WeightedGraph, x: &PhaseState) -> Result<DVector<f64>> {
    check_dim(g.n(), x.len())?;
    Ok(DVector::from_iterator(g.m(), g.edges().iter().map(|e| ccw_diff(x[e.i], x[e.j]))))
}

fn integer_winding(sum: f64) -> Result<i64> {
    let q = (sum / TAU).round();
    if (sum - q * TAU).abs() > WINDING_TOL {
        return Err(Error::NonIntegerWinding { sum });
    }
    Ok(q as i64)
}

/// Winding number of `x` along a closed vertex sequence.
pub fn winding_number(cycle: &[usize], x: &PhaseState) -> Result<i64> {
    if let Some(&v) = cycle.iter().find(|&&v| v >= x.len()) {
        return Err(Error::DimensionMismatch { expected: x.len(), found: v + 1 });
    }
    let sum: f64 = cycle.windows(2).map(|s| ccw_diff(x[s[0]], x[s[1]])).sum();
    integer_winding(sum)
}

pub fn winding_vector(basis: &CycleBasis, x: &PhaseState) -> Result<WindingVector> {
    basis
        .cycles()
        .iter()
        .map(|c| winding_number(c, x))
        .collect::<Result<Vec<_>>>()
        .map(WindingVector)
}

/// Same winding vector computed as `C d_cc(B^T x) / (2 pi)`.
pub fn winding_vector_from_edges(basis: &CycleBasis, eta: &DVector<f64>) -> Result<WindingVector> {
    check_dim(basis.cycle_edge_matrix().ncols(), eta.len())?;
    basis
        .cycle_edge_matrix()
        .row_iter()
        .map(|row| integer_winding(row.iter().zip(eta.iter()).map(|(&c, &d)| f64::from(c) * d).sum()))
        .collect::<Result<Vec<_>>>()
        .map(WindingVector)
}

/// Largest `|d_cc(x_i, x_j)|` over all edges.
pub fn max_edge_diff(g: &WeightedGraph, x: &PhaseState) -> Result<f64> {
    Ok(edge_diffs(g, x)?.amax())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if (0.0..=PI).contains(&gamma) {
        Ok(())
    } else {
        Err(Error::InvalidGamma(gamma))
    }
}

/// `|d_cc(x_i, x_j)| <= gamma` on every edge.
pub fn is_cohesive(g: &WeightedGraph, x: &PhaseState, gamma: f64) -> Result<bool> {
    check_gamma(gamma)?;
    Ok(max_edge_diff(g, x)? <= gamma)
}

/// Membership in the gamma-cohesive u-winding cell.
pub fn in_cell(
    g: &WeightedGraph,
    basis: &CycleBasis,
    x: &PhaseState,
    u: &WindingVector,
    gamma: f64,
) -> Result<bool> {
    check_gamma(gamma)?;
    if u.len() != basis.len() {
        return Err(Error::DimensionMismatch { expected: basis.len(), found: u.len() });
    }
    Ok(winding_vector(basis, x)? == *u && is_cohesive(g, x, gamma)?)
}
