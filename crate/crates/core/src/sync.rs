//! Synchronous states per winding cell.
//!
//! A synchronous state is a fixed point of the reduced field `f~(z)`. Inside
//! a certified cell `P_{u,gamma}` (with `gamma < gamma_bar`) there is at most
//! one, up to rigid rotation. [`find_sync`] looks for it with damped Newton
//! and [`uniqueness_check`] runs many starts and groups what it finds.

use std::f64::consts::{PI, TAU};

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::certificate::GraphConstants;
use crate::dynamics::ModelParams;
use crate::error::{check_dim, Error, Result};
use crate::graph::CycleBasis;
use crate::reduction::{PolytopeChart, ReducedState};
use crate::torus::{ccw_diff, PhaseState, WindingVector};

/// Synchrony residual required of a lifted fixed point.
pub const LIFTED_TOL: f64 = 1e-8;
/// Tolerance on the `2 pi` multiples in [`same_sync`].
pub const SAME_SYNC_TOL: f64 = 1e-7;
/// Rejection budget per start in [`uniqueness_check`].
pub const SAMPLE_ATTEMPTS: usize = 10_000_000;
const LIFT_TOL: f64 = 1e-8;
const ARMIJO: f64 = 1e-4;

/// A preimage of `(z, u)` with mean zero.
///
/// Tree edges carry the embedded differences exactly, starting from 0 at the
/// root. Every non-tree edge is then checked against the embedding modulo
/// `2 pi`. `project(lift(z, u)) == (z, u)` whenever `z` lies in `P_u`.
pub fn lift(chart: &PolytopeChart, z: &DVector<f64>, u: &WindingVector) -> Result<PhaseState> {
    let g = chart.graph();
    let eta = chart.embed_edge_diffs(z, u)?;
    let tree = chart.basis().tree();
    let x = tree.potentials(g, eta.as_slice());
    for (e, edge) in g.edges().iter().enumerate() {
        if tree.is_tree_edge(e) {
            continue;
        }
        let mismatch = ccw_diff(x[edge.i] - x[edge.j], eta[e]).abs();
        if mismatch > LIFT_TOL {
            return Err(Error::CycleInconsistent { edge: e, mismatch });
        }
    }
    Ok(PhaseState::from(x).centered())
}

/// True when `x - y = rho 1 + 2 pi l` for some real `rho` and integer `l`.
pub fn same_sync(x: &PhaseState, y: &PhaseState) -> Result<bool> {
    check_dim(x.len(), y.len())?;
    if x.is_empty() {
        return Ok(true);
    }
    let rho = x[0] - y[0];
    Ok(x.iter().zip(y.iter()).all(|(a, b)| {
        let v = a - b - rho;
        (v - TAU * (v / TAU).round()).abs() <= SAME_SYNC_TOL
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NewtonOptions {
    /// Convergence threshold on `|f~(z)|_2`.
    pub tol: f64,
    pub max_iter: usize,
    /// Step halvings allowed per iteration before giving up.
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 100, max_halvings: 30 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SyncResult {
    pub found: bool,
    /// Final iterate, also when the search stalled.
    pub z_star: ReducedState,
    /// Mean-zero lift of `z_star`.
    pub x_star: PhaseState,
    pub omega_s: f64,
    /// `|f~(z_star)|_2`
    pub residual: f64,
    /// `|f(x_star) - omega_s 1|_2`
    pub lifted_residual: f64,
    /// `z_star` in `P_{u,gamma}`
    pub in_cell: bool,
    pub iterations: usize,
}

fn check_gamma(p: &ModelParams, gamma: f64) -> Result<()> {
    let gamma_bar = GraphConstants::of(p.graph())?.gamma_bar(p.phi())?;
    if !(gamma > 0.0 && gamma < gamma_bar) {
        return Err(Error::InvalidRange(format!("gamma = {gamma} outside (0, {gamma_bar})")));
    }
    Ok(())
}

/// Damped Newton on `f~(z) = 0` from `z0`.
///
/// Each step is halved until `|f~|` drops by the Armijo factor. Iterates may
/// leave the polytope; only the final point's membership is reported in
/// `in_cell`. When no halving helps, the result comes back with
/// `found = false`.
pub fn find_sync(
    p: &ModelParams,
    chart: &PolytopeChart,
    gamma: f64,
    z0: &ReducedState,
    opts: &NewtonOptions,
) -> Result<SyncResult> {
    check_gamma(p, gamma)?;
    let u = &z0.u;
    if !chart.in_polytope(&z0.z, u, gamma)? {
        return Err(Error::InvalidRange(format!("initial point is not in the polytope of cell {u}")));
    }
    let mut z = z0.z.clone();
    let mut r = chart.reduced_field(p, &z, u)?;
    let mut norm = r.norm();
    let mut iterations = 0;
    let mut stalled = false;
    while norm > opts.tol {
        if iterations == opts.max_iter {
            return Err(Error::MaxIterations { iterations, residual: norm });
        }
        iterations += 1;
        let j = chart.reduced_jacobian(p, &z, u)?;
        let dz = j
            .lu()
            .solve(&(-&r))
            .filter(|d| d.iter().all(|v| v.is_finite()))
            .ok_or(Error::SingularJacobian { iteration: iterations })?;
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial = &z + &dz * t;
            let rt = chart.reduced_field(p, &trial, u)?;
            let nt = rt.norm();
            if nt <= (1.0 - ARMIJO * t) * norm {
                accepted = Some((trial, rt, nt));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((zn, rn, nn)) => {
                z = zn;
                r = rn;
                norm = nn;
            }
            None => {
                stalled = true;
                break;
            }
        }
    }
    let x_star = lift(chart, &z, u)?;
    let (omega_s, lifted_residual) = p.sync_residual(&x_star)?;
    let in_cell = chart.in_polytope(&z, u, gamma)?;
    Ok(SyncResult {
        found: !stalled && lifted_residual <= LIFTED_TOL,
        z_star: ReducedState { z, u: u.clone() },
        x_star,
        omega_s,
        residual: norm,
        lifted_residual,
        in_cell,
        iterations,
    })
}

/// One `same_sync` class of converged in-cell results.
#[derive(Debug, Clone, Serialize)]
pub struct SyncClass {
    pub representative: PhaseState,
    pub omega_s: f64,
    pub residual: f64,
    pub lifted_residual: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniquenessReport {
    pub u: WindingVector,
    pub gamma: f64,
    pub n_starts: usize,
    pub seed: u64,
    /// Converged with the fixed point inside `P_{u,gamma}`.
    pub converged_in_cell: usize,
    /// Converged to a fixed point outside `P_{u,gamma}`.
    pub escaped: usize,
    /// Line search could not reduce the residual.
    pub stalled: usize,
    /// Solver errors: singular Jacobian or iteration cap.
    pub diverged: usize,
    /// Starts that could not be drawn because the cell looks empty.
    pub unsampled: usize,
    pub classes: Vec<SyncClass>,
    pub failures: Vec<String>,
    /// At most one class inside the cell.
    pub unique: bool,
}

impl UniquenessReport {
    pub fn representative(&self) -> Option<&PhaseState> {
        self.classes.first().map(|c| &c.representative)
    }
}

/// Multistart search for synchronous states in cell `u`.
///
/// Starts are drawn uniformly from `P_{u,gamma}` up front with a generator
/// seeded by `seed`, so the report is deterministic and independent of the
/// thread count. Solver errors are counted, never raised.
pub fn uniqueness_check(
    p: &ModelParams,
    chart: &PolytopeChart,
    u: &WindingVector,
    gamma: f64,
    n_starts: usize,
    seed: u64,
    opts: &NewtonOptions,
) -> Result<UniquenessReport> {
    check_gamma(p, gamma)?;
    check_dim(chart.basis().len(), u.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = Vec::with_capacity(n_starts);
    for _ in 0..n_starts {
        match chart.sample_polytope(u, gamma, &mut rng, SAMPLE_ATTEMPTS)? {
            Some(z0) => starts.push(z0),
            None => break,
        }
    }
    let outcomes: Vec<Result<SyncResult>> =
        starts.par_iter().map(|z0| find_sync(p, chart, gamma, z0, opts)).collect();

    let mut report = UniquenessReport {
        u: u.clone(),
        gamma,
        n_starts,
        seed,
        converged_in_cell: 0,
        escaped: 0,
        stalled: 0,
        diverged: 0,
        unsampled: n_starts - starts.len(),
        classes: Vec::new(),
        failures: Vec::new(),
        unique: true,
    };
    for outcome in outcomes {
        let res = match outcome {
            Ok(res) => res,
            Err(e) => {
                report.diverged += 1;
                report.failures.push(e.to_string());
                continue;
            }
        };
        if !res.found {
            report.stalled += 1;
            continue;
        }
        if !res.in_cell {
            report.escaped += 1;
            continue;
        }
        report.converged_in_cell += 1;
        let mut matched = false;
        for class in &mut report.classes {
            if same_sync(&class.representative, &res.x_star)? {
                class.count += 1;
                matched = true;
                break;
            }
        }
        if !matched {
            report.classes.push(SyncClass {
                representative: res.x_star,
                omega_s: res.omega_s,
                residual: res.residual,
                lifted_residual: res.lifted_residual,
                count: 1,
            });
        }
    }
    report.unique = report.classes.len() <= 1;
    Ok(report)
}

/// Winding vectors allowed by the cohesiveness cap `|u_s| <= l_s gamma / (2 pi)`
/// where `l_s` is the length of basis cycle `s`. Some of them may still be
/// empty cells. `gamma` is clamped to `[0, pi]`.
pub fn enumerate_feasible_windings(basis: &CycleBasis, gamma: f64) -> Vec<WindingVector> {
    let gamma = gamma.clamp(0.0, PI);
    let bounds: Vec<i64> =
        basis.cycle_lengths().iter().map(|&l| (l as f64 * gamma / TAU).floor() as i64).collect();
    let mut out = vec![Vec::with_capacity(bounds.len())];
    for b in bounds {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<i64>| {
                (-b..=b).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(WindingVector).collect()
}
