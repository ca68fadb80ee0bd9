//! Consensus projection and the `(l2, Pi_n)` seminorm.
//!
//! `R` is the `(n-1) x n` Helmert matrix: row `k` (for `k = 1..n-1`) is
//! `(1, ..., 1, -k, 0, ..., 0) / sqrt(k (k + 1))` with `k` leading ones. Its
//! rows are an orthonormal basis of `1^perp`, so `R^+ = R^T` and
//! `Pi_n = R^T R = I - 11^T / n`.
//!
//! The logarithmic seminorm is available through three independent routes:
//! the eigenvalue formula ([`log_seminorm`]), the matrix-inequality
//! characterisation ([`log_seminorm_lmi_check`]), and the one-sided limit
//! definition ([`log_seminorm_limit_estimate`]).

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{check_dim, Error, Result};
use crate::graph::sorted_eigenvalues;

/// Tolerance for the semidefiniteness test of the matrix-inequality route.
pub const LMI_TOL: f64 = 1e-9;
/// Tolerance for `A 1 in span(1)`.
pub const KERNEL_TOL: f64 = 1e-9;
/// Default step sizes for the limit estimate.
pub const LIMIT_STEPS: [f64; 3] = [1e-2, 1e-3, 1e-4];

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusProjector {
    r: DMatrix<f64>,
    pi: DMatrix<f64>,
}

impl ConsensusProjector {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        let mut r = DMatrix::zeros(n - 1, n);
        for k in 1..n {
            let scale = 1.0 / ((k * (k + 1)) as f64).sqrt();
            for col in 0..k {
                r[(k - 1, col)] = scale;
            }
            r[(k - 1, k)] = -(k as f64) * scale;
        }
        let pi = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - 1.0 / n as f64);
        Ok(Self { r, pi })
    }

    /// Uses a caller-supplied orthonormal basis of `1^perp` (rows of `r`).
    pub fn from_basis(r: DMatrix<f64>) -> Result<Self> {
        let n = r.ncols();
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        check_dim(n - 1, r.nrows())?;
        let gram_err = (&r * r.transpose() - DMatrix::identity(n - 1, n - 1)).amax();
        let kernel_err = (&r * DVector::from_element(n, 1.0)).amax();
        if gram_err > 1e-10 || kernel_err > 1e-10 {
            return Err(Error::InvalidRange("rows are not an orthonormal basis of 1^perp".into()));
        }
        let pi = r.transpose() * &r;
        Ok(Self { r, pi })
    }

    pub fn n(&self) -> usize {
        self.r.ncols()
    }

    pub fn r(&self) -> &DMatrix<f64> {
        &self.r
    }

    pub fn pi(&self) -> &DMatrix<f64> {
        &self.pi
    }

    /// `R A R^T`.
    pub fn compress(&self, a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check_square(a)?;
        Ok(&self.r * a * self.r.transpose())
    }

    fn check_square(&self, a: &DMatrix<f64>) -> Result<()> {
        check_dim(self.n(), a.nrows())?;
        check_dim(self.n(), a.ncols())
    }
}

/// `|R x|_2`.
pub fn consensus_seminorm(proj: &ConsensusProjector, x: &DVector<f64>) -> Result<f64> {
    check_dim(proj.n(), x.len())?;
    Ok((proj.r() * x).norm())
}

/// Largest eigenvalue of a symmetric matrix.
pub fn lambda_max(sym: DMatrix<f64>) -> f64 {
    SymmetricEigen::new(sym).eigenvalues.max()
}

fn symmetric_part(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// `lambda_max(R (A + A^T)/2 R^T)`.
pub fn log_seminorm(proj: &ConsensusProjector, a: &DMatrix<f64>) -> Result<f64> {
    Ok(lambda_max(proj.compress(&symmetric_part(a))?))
}

/// `true` iff `Pi A + A^T Pi <= 2 b Pi` on `1^perp`, i.e. `b` is feasible in
/// the matrix-inequality characterisation. The smallest such `b` is the
/// logarithmic seminorm.
pub fn log_seminorm_lmi_check(proj: &ConsensusProjector, a: &DMatrix<f64>, b: f64) -> Result<bool> {
    proj.check_square(a)?;
    let pi = proj.pi();
    let gap = pi * (2.0 * b) - pi * a - a.transpose() * pi;
    let compressed = proj.compress(&gap)?;
    Ok(sorted_eigenvalues(symmetric_part(&compressed))[0] >= -LMI_TOL)
}

/// `(|R (I + hA) R^T|_2 - 1) / h`, the difference quotient whose limit
/// `h -> 0+` defines the logarithmic seminorm.
pub fn log_seminorm_limit_estimate(proj: &ConsensusProjector, a: &DMatrix<f64>, h: f64) -> Result<f64> {
    proj.check_square(a)?;
    if h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidRange(format!("step h = {h} must be positive")));
    }
    let leak = (proj.pi() * (a * DVector::from_element(proj.n(), 1.0))).norm();
    if leak > KERNEL_TOL {
        return Err(Error::KernelNotInvariant(leak));
    }
    let n = proj.n();
    let m = proj.compress(&(DMatrix::identity(n, n) + a * h))?;
    let norm = m.singular_values().max();
    Ok((norm - 1.0) / h)
}

/// Richardson extrapolation of the limit estimate over step sizes decreasing
/// by a factor of ten (e.g. [`LIMIT_STEPS`]); the quotient is first order in
/// `h`.
pub fn log_seminorm_limit_extrapolated(proj: &ConsensusProjector, a: &DMatrix<f64>, steps: &[f64]) -> Result<f64> {
    let mut table = steps
        .iter()
        .map(|&h| log_seminorm_limit_estimate(proj, a, h))
        .collect::<Result<Vec<_>>>()?;
    if table.is_empty() {
        return Err(Error::InvalidRange("no step sizes".into()));
    }
    let mut factor = 10.0;
    while table.len() > 1 {
        table = table.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
        factor *= 10.0;
    }
    Ok(table[0])
}
