//! The normalized Einstein-Hilbert functional on moment polytopes.
//!
//! For an affine function `f = ⟨K, y⟩ + a` positive on an `m`-dimensional
//! polytope Δ,
//!
//! ```text
//! EH(K, a) = 4π / (m!)^{1/m} · ∫_{∂Δ} f^{-(2m-2)} dσ / (∫_Δ f^{-2m} dμ)^{(m-1)/m}
//! ```
//!
//! with `dσ` the lattice boundary measure. `EH` is homogeneous of degree
//! zero in `x = (K, a)`, so critical points are projective classes and
//! are searched for on the unit sphere.

mod critical;
mod families;
mod ode;
mod quartic;

pub use critical::{find_critical_points, landscape, CriticalPoint, CriticalPointReport, LandscapeSample, Signature};
pub use families::{closed_form_critical, family_polytope, Family};
pub use ode::{solve_product_ode, OdeSolution};
pub use quartic::{quartic, quartic_roots};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::polytope::Polytope;
use crate::quadrature::{boundary_moments, polytope_moments, AffineFunction, Kernel};

/// `EH` and its derivatives with respect to `x = (K, a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EhDerivatives {
    pub value: f64,
    pub gradient: Vec<f64>,
    /// Empty unless requested.
    pub hessian: Vec<Vec<f64>>,
}

fn check_dim(p: &Polytope, x: &[f64]) -> Result<()> {
    if x.len() != p.dim() + 1 {
        return Err(Error::DimensionMismatch {
            index: 0,
            expected: p.dim() + 1,
            got: x.len(),
        });
    }
    Ok(())
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn prefactor(m: usize) -> f64 {
    4.0 * PI / factorial(m).powf(1.0 / m as f64)
}

/// Value, gradient and Hessian of `I = ∫ f^{-k}` over interior or boundary.
struct PowerIntegral {
    value: f64,
    gradient: Vec<f64>,
    hessian: Vec<Vec<f64>>,
}

fn power_integral(p: &Polytope, f: &AffineFunction, k: u32, boundary: bool, order: usize) -> Result<PowerIntegral> {
    let mo = |kernel, ord| {
        if boundary {
            boundary_moments(p, f, kernel, ord)
        } else {
            polytope_moments(p, f, kernel, ord)
        }
    };
    let kf = k as f64;
    let value = mo(Kernel::InvPower(k), 0)?.value;
    let gradient = if order >= 1 {
        // ∂_p ∫ f^{-k} = −k ∫ ŷ_p f^{-k-1}
        mo(Kernel::InvPower(k + 1), 1)?.first.iter().map(|v| -kf * v).collect()
    } else {
        Vec::new()
    };
    let hessian = if order >= 2 {
        // ∂_p ∂_q ∫ f^{-k} = k(k+1) ∫ ŷ_p ŷ_q f^{-k-2}
        mo(Kernel::InvPower(k + 2), 2)?
            .second
            .iter()
            .map(|row| row.iter().map(|v| kf * (kf + 1.0) * v).collect())
            .collect()
    } else {
        Vec::new()
    };
    Ok(PowerIntegral { value, gradient, hessian })
}

/// `EH` with derivatives up to `order` (0, 1 or 2).
pub fn eh_derivatives(p: &Polytope, x: &[f64], order: usize) -> Result<EhDerivatives> {
    check_dim(p, x)?;
    let m = p.dim();
    if m < 2 {
        return Err(Error::OutOfRange("the Einstein-Hilbert functional needs dim ≥ 2".into()));
    }
    let f = AffineFunction::from_homogeneous(x);
    let b = power_integral(p, &f, (2 * m - 2) as u32, true, order)?;
    let a = power_integral(p, &f, (2 * m) as u32, false, order)?;
    let expo = (m - 1) as f64 / m as f64;
    let value = prefactor(m) * b.value / a.value.powf(expo);
    let n = m + 1;
    let mut gradient = Vec::new();
    let mut hessian = Vec::new();
    if order >= 1 {
        // L = log EH, ∇L = ∇B/B − e ∇A/A.
        let dl: Vec<f64> = (0..n)
            .map(|i| b.gradient[i] / b.value - expo * a.gradient[i] / a.value)
            .collect();
        gradient = dl.iter().map(|d| value * d).collect();
        if order >= 2 {
            hessian = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let ddl = b.hessian[i][j] / b.value
                                - b.gradient[i] * b.gradient[j] / (b.value * b.value)
                                - expo
                                    * (a.hessian[i][j] / a.value
                                        - a.gradient[i] * a.gradient[j] / (a.value * a.value));
                            value * (dl[i] * dl[j] + ddl)
                        })
                        .collect()
                })
                .collect();
        }
    }
    Ok(EhDerivatives { value, gradient, hessian })
}

/// `EH(K, a)` for `x = (K, a)`.
pub fn eh_value(p: &Polytope, x: &[f64]) -> Result<f64> {
    Ok(eh_derivatives(p, x, 0)?.value)
}

/// Full gradient of `EH` in `(K, a)`.
pub fn eh_gradient(p: &Polytope, x: &[f64]) -> Result<Vec<f64>> {
    Ok(eh_derivatives(p, x, 1)?.gradient)
}

pub fn eh_hessian(p: &Polytope, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    Ok(eh_derivatives(p, x, 2)?.hessian)
}

/// True when `f_{K,a} > 0` at every vertex of `p`.
pub fn is_admissible(p: &Polytope, x: &[f64]) -> bool {
    let f = AffineFunction::from_homogeneous(x);
    x.len() == p.dim() + 1 && p.vertices_f64().iter().all(|v| f.eval(v) > 0.0)
}

/// Unit-norm representative of the class of `x` with `f > 0` on `p`,
/// or `None` when neither sign is admissible.
pub fn normalize_class(p: &Polytope, x: &[f64]) -> Option<Vec<f64>> {
    let n = crate::linalg::norm(x);
    if !(n > 0.0) {
        return None;
    }
    let unit: Vec<f64> = x.iter().map(|v| v / n).collect();
    if is_admissible(p, &unit) {
        return Some(unit);
    }
    let flipped: Vec<f64> = unit.iter().map(|v| -v).collect();
    is_admissible(p, &flipped).then_some(flipped)
}
