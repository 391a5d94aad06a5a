//! Reeb-field volume on Gorenstein toric cones.
//!
//! For `ξ` inside the Reeb cone and a simplicial decomposition of the
//! moment cone into cells `σ` with generators `u_1, …, u_n`,
//!
//! ```text
//! Vol(ξ) = Σ_σ |det U_σ| / ∏_i ⟨u_i, ξ⟩,
//! ```
//!
//! which is `n!` times the Euclidean volume of `{y ∈ C* : ⟨y, ξ⟩ ≤ 1}`.
//! Global constants relating this to the Riemannian volume of the link
//! are dropped. `Vol` is homogeneous of degree `−n` and `log Vol` is
//! convex on the charge slice `ξ_1 = n`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::polytope::MomentCone;

pub const DEFAULT_TOL: f64 = 1e-10;
const MAX_ITERATIONS: usize = 300;
const BARRIER_START: f64 = 1e-2;
const BARRIER_END: f64 = 1e-12;
const ARMIJO_SLOPE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReebVector {
    pub xi: Vec<f64>,
    /// `ξ_1 − (m+1)`.
    pub slice_residual: f64,
}

impl ReebVector {
    pub fn new(cone: &MomentCone, xi: Vec<f64>) -> Self {
        let slice_residual = xi.first().copied().unwrap_or(f64::NAN) - cone.dim() as f64;
        Self { xi, slice_residual }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReebVolumeResult {
    pub xi_star: ReebVector,
    pub volume: f64,
    /// `|∇_slice Vol| / Vol` at `ξ*`.
    pub gradient_norm: f64,
    pub hessian_min_eigenvalue: f64,
    pub iterations: usize,
}

struct Derivatives {
    value: f64,
    gradient: DVector<f64>,
    hessian: DMatrix<f64>,
}

fn derivatives(cone: &MomentCone, xi: &[f64], order: usize) -> Result<Derivatives> {
    cone.check_interior(xi)?;
    let n = cone.dim();
    let pair = cone.pairings(xi);
    let rays: Vec<DVector<f64>> = cone
        .dual_rays()
        .iter()
        .map(|u| DVector::from_iterator(n, u.iter().map(|&x| x as f64)))
        .collect();
    let mut value = 0.0;
    let mut gradient = DVector::zeros(n);
    let mut hessian = DMatrix::zeros(n, n);
    for cell in cone.decomposition() {
        let term = cell.det as f64 / cell.rays.iter().map(|&i| pair[i]).product::<f64>();
        value += term;
        if order >= 1 {
            let w: DVector<f64> = cell.rays.iter().map(|&i| &rays[i] / pair[i]).sum();
            gradient -= &w * term;
            if order >= 2 {
                let mut h = &w * w.transpose();
                for &i in &cell.rays {
                    h += &rays[i] * rays[i].transpose() / (pair[i] * pair[i]);
                }
                hessian += h * term;
            }
        }
    }
    Ok(Derivatives { value, gradient, hessian })
}

pub fn reeb_volume(cone: &MomentCone, xi: &[f64]) -> Result<f64> {
    Ok(derivatives(cone, xi, 0)?.value)
}

pub fn reeb_volume_gradient(cone: &MomentCone, xi: &[f64]) -> Result<Vec<f64>> {
    Ok(derivatives(cone, xi, 1)?.gradient.iter().copied().collect())
}

pub fn reeb_volume_hessian(cone: &MomentCone, xi: &[f64]) -> Result<Vec<Vec<f64>>> {
    Ok(linalg::to_rows(&derivatives(cone, xi, 2)?.hessian))
}

/// `⟨∇Vol(ξ), Y⟩` for a slice-tangent direction `Y` (first coordinate 0).
pub fn sasaki_futaki(cone: &MomentCone, xi: &[f64], y: &[f64]) -> Result<f64> {
    if y.len() != cone.dim() {
        return Err(Error::DimensionMismatch {
            index: 0,
            expected: cone.dim(),
            got: y.len(),
        });
    }
    if y[0].abs() > 1e-12 * linalg::norm(y) {
        return Err(Error::NotSliceTangent(y[0]));
    }
    Ok(linalg::dot(&reeb_volume_gradient(cone, xi)?, y))
}

fn lift(cone: &MomentCone, z: &DVector<f64>) -> Vec<f64> {
    std::iter::once(cone.dim() as f64).chain(z.iter().copied()).collect()
}

/// Barrier objective `log Vol − μ Σ log⟨u_ρ, ξ⟩` on the slice with its
/// slice gradient and Hessian.
fn objective(cone: &MomentCone, z: &DVector<f64>, mu: f64, order: usize) -> Result<(f64, DVector<f64>, DMatrix<f64>, Derivatives)> {
    let xi = lift(cone, z);
    let d = derivatives(cone, &xi, order)?;
    let k = z.len();
    let pair = cone.pairings(&xi);
    let mut value = d.value.ln() - mu * pair.iter().map(|s| s.ln()).sum::<f64>();
    if !value.is_finite() {
        value = f64::INFINITY;
    }
    let mut g = DVector::zeros(k);
    let mut h = DMatrix::zeros(k, k);
    if order >= 1 {
        let gs = d.gradient.rows(1, k).into_owned() / d.value;
        g = gs.clone();
        if order >= 2 {
            h = d.hessian.view((1, 1), (k, k)).into_owned() / d.value - &gs * gs.transpose();
        }
        for (u, s) in cone.dual_rays().iter().zip(&pair) {
            let us = DVector::from_iterator(k, u[1..].iter().map(|&x| x as f64));
            g -= &us * (mu / s);
            if order >= 2 {
                h += &us * us.transpose() * (mu / (s * s));
            }
        }
    }
    Ok((value, g, h, d))
}

/// Minimizes `Vol` over the slice `ξ_1 = m+1` from the slice centre.
pub fn minimize_reeb_volume(cone: &MomentCone, tol: f64) -> Result<ReebVolumeResult> {
    minimize_reeb_volume_from(cone, &cone.slice_center(), tol)
}

/// Damped Newton on `log Vol` with a logarithmic barrier on the dual-ray
/// constraints, driven to zero before the final unbarriered steps.
pub fn minimize_reeb_volume_from(cone: &MomentCone, start: &[f64], tol: f64) -> Result<ReebVolumeResult> {
    let n = cone.dim();
    if start.len() != n {
        return Err(Error::DimensionMismatch { index: 0, expected: n, got: start.len() });
    }
    let mut z = DVector::from_column_slice(&start[1..]);
    cone.check_interior(&lift(cone, &z))?;
    let mut mu = BARRIER_START;
    let mut iterations = 0;
    loop {
        let (f, g, h, d) = objective(cone, &z, mu, 2)?;
        let rel = d.gradient.rows(1, n - 1).norm() / d.value;
        if mu == 0.0 && rel <= tol {
            let eig = linalg::sym_eigenvalues(&d.hessian.view((1, 1), (n - 1, n - 1)).into_owned());
            return Ok(ReebVolumeResult {
                xi_star: ReebVector::new(cone, lift(cone, &z)),
                volume: d.value,
                gradient_norm: rel,
                hessian_min_eigenvalue: eig[0],
                iterations,
            });
        }
        if mu > 0.0 && g.norm() <= 1e-3 * mu.sqrt() {
            mu = if mu * 0.1 < BARRIER_END { 0.0 } else { mu * 0.1 };
            continue;
        }
        if iterations == MAX_ITERATIONS {
            return Err(Error::NoConvergence { iterations, residual: rel });
        }
        iterations += 1;
        let step = match h.clone().cholesky() {
            Some(ch) => ch.solve(&(-&g)),
            None => -&g,
        };
        let slope = g.dot(&step);
        let resolvable = -slope > 1e3 * f64::EPSILON * f.abs().max(1.0);
        let mut t = 1.0;
        loop {
            let trial = &z + &step * t;
            let inside = cone.check_interior(&lift(cone, &trial)).is_ok();
            if inside {
                let ft = objective(cone, &trial, mu, 0)?.0;
                if !resolvable || ft <= f + ARMIJO_SLOPE * t * slope {
                    z = trial;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-14 {
                return Err(Error::NoConvergence { iterations, residual: rel });
            }
        }
    }
}
