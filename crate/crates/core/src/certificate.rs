//! Closed-form semicontraction certificates.
//!
//! On the gamma-cohesive set the odd Jacobian satisfies
//! `mu(J_o) <= -cos(phi) cos(gamma) lambda2` and the even Jacobian
//! `mu(J_e) <= sin(phi) sin(gamma) d_max`. Their sum is negative exactly when
//! `gamma < gamma_bar = arctan(lambda2 / (d_max tan(phi)))`, with contraction
//! rate `c(gamma) = cos(phi) cos(gamma) lambda2 - sin(phi) sin(gamma) d_max`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::ModelParams;
use crate::error::{check_dim, Error, Result};
use crate::graph::{CycleBasis, SpanningTree, WeightedGraph};
use crate::seminorm::{log_seminorm, ConsensusProjector};
use crate::torus::{ccw_diff, is_cohesive, max_edge_diff, winding_vector, PhaseState, WindingVector};

/// Slack allowed when comparing computed log-seminorms against bounds.
pub const BOUND_TOL: f64 = 1e-9;

fn check_angle(name: &str, v: f64) -> Result<()> {
    if (0.0..=FRAC_PI_2).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidRange(format!("{name} = {v} outside [0, pi/2]")))
    }
}

/// The two graph constants entering the certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphConstants {
    pub lambda2: f64,
    pub d_max: f64,
}

impl GraphConstants {
    pub fn of(g: &WeightedGraph) -> Result<Self> {
        Ok(Self { lambda2: g.algebraic_connectivity()?, d_max: g.max_weighted_degree() })
    }

    /// `lambda2 / d_max`.
    pub fn ratio(&self) -> f64 {
        self.lambda2 / self.d_max
    }

    /// Bound on the log-seminorm of the odd Jacobian over `Delta(gamma)`.
    pub fn odd_bound(&self, phi: f64, gamma: f64) -> Result<f64> {
        check_angle("phi", phi)?;
        check_angle("gamma", gamma)?;
        Ok(-phi.cos() * gamma.cos() * self.lambda2)
    }

    /// Bound on the log-seminorm of the even Jacobian over `Delta(gamma)`.
    pub fn even_bound(&self, phi: f64, gamma: f64) -> Result<f64> {
        check_angle("phi", phi)?;
        check_angle("gamma", gamma)?;
        Ok(phi.sin() * gamma.sin() * self.d_max)
    }

    /// Cohesiveness threshold; `pi/2` in the unfrustrated limit `phi = 0`.
    pub fn gamma_bar(&self, phi: f64) -> Result<f64> {
        check_angle("phi", phi)?;
        if phi == 0.0 {
            return Ok(FRAC_PI_2);
        }
        Ok((self.lambda2 / (self.d_max * phi.tan())).atan())
    }

    /// `c(gamma)`; only defined (positive) below `gamma_bar`.
    pub fn contraction_rate(&self, phi: f64, gamma: f64) -> Result<f64> {
        let gamma_bar = self.gamma_bar(phi)?;
        check_angle("gamma", gamma)?;
        if gamma >= gamma_bar {
            return Err(Error::InvalidRange(format!(
                "gamma = {gamma} is not below gamma_bar = {gamma_bar}; no contraction rate"
            )));
        }
        Ok(self.rate_difference(phi, gamma))
    }

    fn rate_difference(&self, phi: f64, gamma: f64) -> f64 {
        phi.cos() * gamma.cos() * self.lambda2 - phi.sin() * gamma.sin() * self.d_max
    }

    /// The rate written through `gamma_bar - gamma`:
    /// `cos(phi) cos(gamma) tan(gb - g) (d^2 tan^2(phi) + l2^2) / (d tan(phi) + l2 tan(gb - g))`.
    /// Algebraically equal to [`Self::contraction_rate`].
    pub fn contraction_rate_closed_form(&self, phi: f64, gamma: f64) -> Result<f64> {
        let gamma_bar = self.gamma_bar(phi)?;
        check_angle("gamma", gamma)?;
        let t = (gamma_bar - gamma).tan();
        let b = self.d_max * phi.tan();
        let l2 = self.lambda2;
        Ok(phi.cos() * gamma.cos() * t * (b * b + l2 * l2) / (b + l2 * t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Semicontracting,
    NotCertified,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub gamma_bar: f64,
    pub gamma: f64,
    pub odd_bound: f64,
    pub even_bound: f64,
    /// `-(odd_bound + even_bound)`; positive iff certified.
    pub rate_c: f64,
    pub lambda2: f64,
    pub d_max: f64,
    pub phi: f64,
    pub verdict: Verdict,
    /// `phi = 0`, where `gamma_bar = pi/2` is the limiting value.
    pub limit_case: bool,
}

/// Certificate at `gamma` (default `0.9 * gamma_bar`).
pub fn certify(g: &WeightedGraph, phi: f64, gamma: Option<f64>) -> Result<CertificateReport> {
    let k = GraphConstants::of(g)?;
    let gamma_bar = k.gamma_bar(phi)?;
    let gamma = gamma.unwrap_or(0.9 * gamma_bar);
    let odd_bound = k.odd_bound(phi, gamma)?;
    let even_bound = k.even_bound(phi, gamma)?;
    Ok(CertificateReport {
        gamma_bar,
        gamma,
        odd_bound,
        even_bound,
        rate_c: -(odd_bound + even_bound),
        lambda2: k.lambda2,
        d_max: k.d_max,
        phi,
        verdict: if gamma < gamma_bar { Verdict::Semicontracting } else { Verdict::NotCertified },
        limit_case: phi == 0.0,
    })
}

/// Computed log-seminorms at one state next to their closed-form bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointwiseCheck {
    pub mu_odd: f64,
    pub mu_even: f64,
    pub mu_total: f64,
    pub odd_bound: f64,
    pub even_bound: f64,
    /// Largest diagonal entry of the even Jacobian, an intermediate bound on `mu_even`.
    pub max_even_diagonal: f64,
    pub all_bounds_hold: bool,
}

pub fn verify_pointwise(
    p: &ModelParams,
    proj: &ConsensusProjector,
    k: &GraphConstants,
    x: &PhaseState,
    gamma: f64,
) -> Result<PointwiseCheck> {
    check_angle("gamma", gamma)?;
    if !is_cohesive(p.graph(), x, gamma)? {
        return Err(Error::NotCohesive { max_diff: max_edge_diff(p.graph(), x)?, gamma });
    }
    let jo = p.jacobian_odd(x)?;
    let je = p.jacobian_even(x)?;
    let mu_odd = log_seminorm(proj, &jo)?;
    let mu_even = log_seminorm(proj, &je)?;
    let mu_total = log_seminorm(proj, &(&jo + &je))?;
    let odd_bound = k.odd_bound(p.phi(), gamma)?;
    let even_bound = k.even_bound(p.phi(), gamma)?;
    let max_even_diagonal = je.diagonal().max();
    let all_bounds_hold = mu_odd <= odd_bound + BOUND_TOL
        && mu_even <= even_bound + BOUND_TOL
        && mu_total <= odd_bound + even_bound + BOUND_TOL;
    Ok(PointwiseCheck { mu_odd, mu_even, mu_total, odd_bound, even_bound, max_even_diagonal, all_bounds_hold })
}

/// Draws a gamma-cohesive state: tree-edge differences uniform in
/// `[-gamma, gamma]`, propagated down the spanning tree, accepted when every
/// non-tree edge is also within `gamma`. A uniform common phase is added.
/// Returns `None` after `max_attempts` rejections.
pub fn sample_cohesive_state<R: Rng + ?Sized>(
    g: &WeightedGraph,
    tree: &SpanningTree,
    gamma: f64,
    rng: &mut R,
    max_attempts: usize,
) -> Option<PhaseState> {
    let mut eta = vec![0.0; g.m()];
    for _ in 0..max_attempts {
        for e in tree.tree_edges() {
            eta[e] = if gamma > 0.0 { rng.random_range(-gamma..=gamma) } else { 0.0 };
        }
        let x = tree.potentials(g, &eta);
        let ok = g
            .edges()
            .iter()
            .enumerate()
            .all(|(e, edge)| tree.is_tree_edge(e) || ccw_diff(x[edge.i], x[edge.j]).abs() <= gamma);
        if ok {
            let shift = rng.random_range(0.0..std::f64::consts::TAU);
            return Some(PhaseState::from(x.into_iter().map(|v| v + shift).collect::<Vec<_>>()));
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsRow {
    pub ratio: f64,
    pub phi: f64,
    pub gamma_bar: f64,
}

/// `gamma_bar = arctan(ratio / tan(phi))` for every `(ratio, phi)` pair,
/// grouped by ratio.
pub fn bounds_curve(ratios: &[f64], phi_grid: &[f64]) -> Result<Vec<BoundsRow>> {
    if let Some(r) = ratios.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(Error::InvalidRange(format!("ratio {r} must be positive")));
    }
    if let Some(phi) = phi_grid.iter().find(|&&p| !(p > 0.0 && p <= FRAC_PI_2)) {
        return Err(Error::InvalidRange(format!("phi = {phi} outside (0, pi/2]")));
    }
    Ok(ratios
        .iter()
        .flat_map(|&ratio| {
            phi_grid.iter().map(move |&phi| BoundsRow { ratio, phi, gamma_bar: (ratio / phi.tan()).atan() })
        })
        .collect())
}

/// `steps` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps)
            .map(|k| if k + 1 == steps { hi } else { lo + (hi - lo) * k as f64 / (steps - 1) as f64 })
            .collect(),
    }
}

/// A planar slice `origin + s dir1 + t dir2` of the state space.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceSpec {
    pub origin: PhaseState,
    pub dir1: DVector<f64>,
    pub dir2: DVector<f64>,
    pub s_range: (f64, f64),
    pub t_range: (f64, f64),
    pub resolution: (usize, usize),
}

impl SliceSpec {
    /// Slice along two coordinate axes through `origin`.
    pub fn axes(origin: PhaseState, a: usize, b: usize, range: (f64, f64), resolution: usize) -> Self {
        let n = origin.len();
        let unit = |k: usize| DVector::from_fn(n, |i, _| if i == k { 1.0 } else { 0.0 });
        Self { dir1: unit(a), dir2: unit(b), origin, s_range: range, t_range: range, resolution: (resolution, resolution) }
    }

    fn validate(&self, n: usize) -> Result<()> {
        check_dim(n, self.origin.len())?;
        check_dim(n, self.dir1.len())?;
        check_dim(n, self.dir2.len())?;
        let (ns, nt) = self.resolution;
        if ns == 0 || nt == 0 {
            return Err(Error::InvalidRange("scan resolution must be positive".into()));
        }
        let ranges = [self.s_range.0, self.s_range.1, self.t_range.0, self.t_range.1];
        if ranges.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidRange("scan range must be finite".into()));
        }
        let (a, b, c) = (self.dir1.dot(&self.dir1), self.dir2.dot(&self.dir2), self.dir1.dot(&self.dir2));
        if a * b - c * c <= 1e-12 * a * b || a == 0.0 || b == 0.0 {
            return Err(Error::InvalidRange("scan directions are linearly dependent".into()));
        }
        Ok(())
    }

    pub fn s_values(&self) -> Vec<f64> {
        linspace(self.s_range.0, self.s_range.1, self.resolution.0)
    }

    pub fn t_values(&self) -> Vec<f64> {
        linspace(self.t_range.0, self.t_range.1, self.resolution.1)
    }

    pub fn point(&self, s: f64, t: f64) -> PhaseState {
        PhaseState::new(&*self.origin + &self.dir1 * s + &self.dir2 * t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub s: f64,
    pub t: f64,
    pub mu: f64,
    pub winding: WindingVector,
    pub cohesive: bool,
}

/// Log-seminorm of the Jacobian, winding vector and `gamma_bar`-cohesiveness
/// over a slice grid. Points are stored row-major with `s` as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    pub spec: SliceSpec,
    pub gamma_bar: f64,
    pub points: Vec<ScanPoint>,
}

impl ScanGrid {
    pub fn at(&self, si: usize, ti: usize) -> &ScanPoint {
        &self.points[si * self.spec.resolution.1 + ti]
    }

    pub fn shape(&self) -> (usize, usize) {
        self.spec.resolution
    }
}

/// Evaluates the slice. Every grid point, cohesive or not, gets a value;
/// points are independent and evaluated in parallel.
pub fn scan_slice(p: &ModelParams, basis: &CycleBasis, spec: SliceSpec) -> Result<ScanGrid> {
    let g = p.graph();
    spec.validate(g.n())?;
    let proj = ConsensusProjector::new(g.n())?;
    let gamma_bar = GraphConstants::of(g)?.gamma_bar(p.phi())?;
    let (s_vals, t_vals) = (spec.s_values(), spec.t_values());
    let nt = t_vals.len();
    let points = (0..s_vals.len() * nt)
        .into_par_iter()
        .map(|idx| {
            let (s, t) = (s_vals[idx / nt], t_vals[idx % nt]);
            let x = spec.point(s, t);
            Ok(ScanPoint {
                s,
                t,
                mu: log_seminorm(&proj, &p.jacobian(&x)?)?,
                winding: winding_vector(basis, &x)?,
                cohesive: is_cohesive(g, &x, gamma_bar)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanGrid { spec, gamma_bar, points })
}
