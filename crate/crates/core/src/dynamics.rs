//! The Kuramoto-Sakaguchi vector field
//!
//! ```text
//! f_i(x) = omega_i - sum_j a_ij [ sin(x_i - x_j - phi) + sin(phi) ]
//! ```
//!
//! together with its split into an odd (sine) and an even (1 - cosine)
//! coupling part, analytic Jacobians, and a fixed-step RK4 integrator.
//!
//! All evaluations go through per-edge differences `eta_e = x_i - x_j`, so the
//! same code evaluates the field from raw differences or from wrapped ones.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::graph::WeightedGraph;
use crate::torus::PhaseState;

#[derive(Debug, Clone)]
pub struct ModelParams {
    graph: WeightedGraph,
    phi: f64,
    omega: DVector<f64>,
    /// `a_e cos(phi)` per edge
    cos_w: Vec<f64>,
    /// `a_e sin(phi)` per edge
    sin_w: Vec<f64>,
}

impl ModelParams {
    pub fn new(graph: WeightedGraph, phi: f64, omega: DVector<f64>) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&phi) {
            return Err(Error::InvalidRange(format!("frustration phi = {phi} outside [0, pi/2]")));
        }
        check_dim(graph.n(), omega.len())?;
        if omega.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidRange("non-finite natural frequency".into()));
        }
        let (s, c) = phi.sin_cos();
        let cos_w = graph.edges().iter().map(|e| e.w * c).collect();
        let sin_w = graph.edges().iter().map(|e| e.w * s).collect();
        Ok(Self { graph, phi, omega, cos_w, sin_w })
    }

    /// Identical oscillators (`omega = 0`).
    pub fn homogeneous(graph: WeightedGraph, phi: f64) -> Result<Self> {
        let n = graph.n();
        Self::new(graph, phi, DVector::zeros(n))
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn omega(&self) -> &DVector<f64> {
        &self.omega
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Raw differences `x_i - x_j` per edge (`B^T x`).
    pub fn raw_edge_diffs(&self, x: &PhaseState) -> Result<DVector<f64>> {
        check_dim(self.n(), x.len())?;
        Ok(DVector::from_iterator(self.graph.m(), self.graph.edges().iter().map(|e| x[e.i] - x[e.j])))
    }

    /// The field written as a function of edge differences, `F(eta)` with
    /// `f(x) = F(B^T x)`.
    pub fn field_from_edge_diffs(&self, eta: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(self.graph.m(), eta.len())?;
        let sin_phi = self.phi.sin();
        let mut f = self.omega.clone();
        for (e, edge) in self.graph.edges().iter().enumerate() {
            let d = eta[e];
            f[edge.i] -= edge.w * ((d - self.phi).sin() + sin_phi);
            f[edge.j] -= edge.w * ((-d - self.phi).sin() + sin_phi);
        }
        Ok(f)
    }

    /// Odd coupling part `-sum_j c_ij sin(eta)` from edge differences.
    pub fn odd_from_edge_diffs(&self, eta: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(self.graph.m(), eta.len())?;
        let mut f = DVector::zeros(self.n());
        for (e, edge) in self.graph.edges().iter().enumerate() {
            let t = self.cos_w[e] * eta[e].sin();
            f[edge.i] -= t;
            f[edge.j] += t;
        }
        Ok(f)
    }

    /// Even coupling part `-sum_j s_ij (1 - cos(eta))` from edge differences.
    pub fn even_from_edge_diffs(&self, eta: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(self.graph.m(), eta.len())?;
        let mut f = DVector::zeros(self.n());
        for (e, edge) in self.graph.edges().iter().enumerate() {
            let t = self.sin_w[e] * (1.0 - eta[e].cos());
            f[edge.i] -= t;
            f[edge.j] -= t;
        }
        Ok(f)
    }

    pub fn vector_field(&self, x: &PhaseState) -> Result<DVector<f64>> {
        self.field_from_edge_diffs(&self.raw_edge_diffs(x)?)
    }

    pub fn odd_part(&self, x: &PhaseState) -> Result<DVector<f64>> {
        self.odd_from_edge_diffs(&self.raw_edge_diffs(x)?)
    }

    pub fn even_part(&self, x: &PhaseState) -> Result<DVector<f64>> {
        self.even_from_edge_diffs(&self.raw_edge_diffs(x)?)
    }

    /// Jacobian of the odd part: symmetric, off-diagonal `c_ij cos(x_i - x_j)`.
    pub fn jacobian_odd_from_edge_diffs(&self, eta: &DVector<f64>) -> Result<DMatrix<f64>> {
        check_dim(self.graph.m(), eta.len())?;
        let n = self.n();
        let mut j = DMatrix::zeros(n, n);
        for (e, edge) in self.graph.edges().iter().enumerate() {
            let t = self.cos_w[e] * eta[e].cos();
            j[(edge.i, edge.j)] += t;
            j[(edge.j, edge.i)] += t;
            j[(edge.i, edge.i)] -= t;
            j[(edge.j, edge.j)] -= t;
        }
        Ok(j)
    }

    /// Jacobian of the even part: off-diagonal `s_ij sin(x_i - x_j)`
    /// (antisymmetric), diagonal `-sum_k s_ik sin(x_i - x_k)`.
    pub fn jacobian_even_from_edge_diffs(&self, eta: &DVector<f64>) -> Result<DMatrix<f64>> {
        check_dim(self.graph.m(), eta.len())?;
        let n = self.n();
        let mut j = DMatrix::zeros(n, n);
        for (e, edge) in self.graph.edges().iter().enumerate() {
            let t = self.sin_w[e] * eta[e].sin();
            j[(edge.i, edge.j)] += t;
            j[(edge.j, edge.i)] -= t;
            j[(edge.i, edge.i)] -= t;
            j[(edge.j, edge.j)] += t;
        }
        Ok(j)
    }

    pub fn jacobian_from_edge_diffs(&self, eta: &DVector<f64>) -> Result<DMatrix<f64>> {
        Ok(self.jacobian_odd_from_edge_diffs(eta)? + self.jacobian_even_from_edge_diffs(eta)?)
    }

    pub fn jacobian_odd(&self, x: &PhaseState) -> Result<DMatrix<f64>> {
        self.jacobian_odd_from_edge_diffs(&self.raw_edge_diffs(x)?)
    }

    pub fn jacobian_even(&self, x: &PhaseState) -> Result<DMatrix<f64>> {
        self.jacobian_even_from_edge_diffs(&self.raw_edge_diffs(x)?)
    }

    pub fn jacobian(&self, x: &PhaseState) -> Result<DMatrix<f64>> {
        self.jacobian_from_edge_diffs(&self.raw_edge_diffs(x)?)
    }

    /// `(omega_s, residual)` where `omega_s` is the mean of `f(x)` and the
    /// residual is `|f(x) - omega_s 1|_2`; zero exactly at synchronous states.
    pub fn sync_residual(&self, x: &PhaseState) -> Result<(f64, f64)> {
        let f = self.vector_field(x)?;
        let omega_s = f.mean();
        Ok((omega_s, f.add_scalar(-omega_s).norm()))
    }

    /// Suggested integration step, `1e-3 / d_max`.
    pub fn default_step(&self) -> f64 {
        1e-3 / self.graph.max_weighted_degree()
    }

    pub fn integrate(&self, x0: &PhaseState, dt: f64, t_end: f64) -> Result<Trajectory> {
        integrate_rk4(x0, dt, t_end, |x| self.vector_field(x))
    }
}

/// Uniformly sampled solution of an ODE.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
    pub step: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &PhaseState {
        self.states.last().expect("trajectory holds the initial state")
    }
}

/// One classical RK4 step for `dx/dt = field(x)`.
pub fn rk4_step<F>(x: &DVector<f64>, dt: f64, mut field: F) -> Result<DVector<f64>>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    let k1 = field(x)?;
    let k2 = field(&(x + &k1 * (0.5 * dt)))?;
    let k3 = field(&(x + &k2 * (0.5 * dt)))?;
    let k4 = field(&(x + &k3 * dt))?;
    Ok(x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0))
}

/// Classical fixed-step RK4 with `times[k] = k * dt`. When `dt` does not
/// divide `t_end` the last step is shortened so the trajectory ends at
/// `t_end`.
pub fn integrate_rk4<F>(x0: &PhaseState, dt: f64, t_end: f64, mut field: F) -> Result<Trajectory>
where
    F: FnMut(&PhaseState) -> Result<DVector<f64>>,
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidRange(format!("time step dt = {dt} must be positive")));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidRange(format!("horizon t = {t_end} must be positive")));
    }
    if !x0.is_finite() {
        return Err(Error::NonFiniteState { time: 0.0 });
    }
    // a remainder below 1e-9 dt counts as rounding noise
    let steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(x0.clone());
    let mut x = x0.clone();
    for k in 1..=steps {
        let t = if k == steps { t_end } else { k as f64 * dt };
        let h = t - times[k - 1];
        x = PhaseState::new(rk4_step(&x, h, |y| field(&PhaseState::new(y.clone())))?);
        if !x.is_finite() {
            return Err(Error::NonFiniteState { time: t });
        }
        times.push(t);
        states.push(x.clone());
    }
    Ok(Trajectory { times, states, step: dt })
}
