//! Toric Kähler-Ricci soliton fields.
//!
//! On a moment polytope Δ containing the origin in its interior, the
//! potential `W(c) = ∫_Δ e^{⟨c,y⟩} dy` is smooth, strictly convex and
//! proper. Its unique critical point `c*` is the soliton vector field:
//! `∫_Δ y_i e^{⟨c*,y⟩} dy = 0` for every `i`. The gradient of `W`
//! restricted to torus directions is the toric Futaki-type invariant.
//!
//! `W` omits any `c`-independent normalization constant.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, norm};
use crate::polytope::Polytope;
use crate::quadrature::{polytope_moments, AffineFunction, Kernel, Moments};

pub const DEFAULT_TOL: f64 = 1e-10;
const MAX_ITERATIONS: usize = 200;
const ARMIJO_SLOPE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolitonField {
    pub c: Vec<f64>,
    pub potential_value: f64,
    /// `|∇W(c)| / W(c)`.
    pub gradient_norm: f64,
    pub hessian_condition: f64,
    pub iterations: usize,
}

fn moments(p: &Polytope, c: &[f64], order: usize) -> Result<Moments> {
    p.check_origin_interior()?;
    if c.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            index: 0,
            expected: p.dim(),
            got: c.len(),
        });
    }
    polytope_moments(p, &AffineFunction::linear(c), Kernel::Exp, order)
}

/// `W(c) = ∫_Δ e^{⟨c,y⟩} dy`.
pub fn soliton_potential(p: &Polytope, c: &[f64]) -> Result<f64> {
    Ok(moments(p, c, 0)?.value)
}

/// `∂W/∂c_i = ∫_Δ y_i e^{⟨c,y⟩} dy`.
pub fn soliton_gradient(p: &Polytope, c: &[f64]) -> Result<Vec<f64>> {
    let mo = moments(p, c, 1)?;
    Ok(mo.first[..p.dim()].to_vec())
}

/// `∂²W/∂c_i∂c_j = ∫_Δ y_i y_j e^{⟨c,y⟩} dy`.
pub fn soliton_hessian(p: &Polytope, c: &[f64]) -> Result<Vec<Vec<f64>>> {
    let m = p.dim();
    let mo = moments(p, c, 2)?;
    Ok(mo.second[..m].iter().map(|row| row[..m].to_vec()).collect())
}

/// Directional derivative `⟨∇W(c), v⟩`: the toric Futaki invariant of the
/// torus direction `v` with respect to the soliton weight `c`.
pub fn toric_futaki(p: &Polytope, c: &[f64], v: &[f64]) -> Result<f64> {
    let g = soliton_gradient(p, c)?;
    if v.len() != g.len() {
        return Err(Error::DimensionMismatch {
            index: 0,
            expected: g.len(),
            got: v.len(),
        });
    }
    Ok(linalg::dot(&g, v))
}

/// Newton iteration with Armijo backtracking from `c = 0`.
pub fn solve_soliton_field(p: &Polytope, tol: f64) -> Result<SolitonField> {
    solve_soliton_field_from(p, &vec![0.0; p.dim()], tol)
}

pub fn solve_soliton_field_from(p: &Polytope, start: &[f64], tol: f64) -> Result<SolitonField> {
    let m = p.dim();
    let mut c = start.to_vec();
    let mut mo = moments(p, &c, 2)?;
    for iteration in 0..=MAX_ITERATIONS {
        let w = mo.value;
        let g = DVector::from_column_slice(&mo.first[..m]);
        let h = DMatrix::from_fn(m, m, |i, j| mo.second[i][j]);
        let rel = g.norm() / w;
        if rel <= tol {
            let ev = linalg::sym_eigenvalues(&h);
            return Ok(SolitonField {
                c,
                potential_value: w,
                gradient_norm: rel,
                hessian_condition: ev[m - 1] / ev[0],
                iterations: iteration,
            });
        }
        if iteration == MAX_ITERATIONS {
            break;
        }
        let step = match h.clone().cholesky() {
            Some(ch) => ch.solve(&(-&g)),
            None => -&g / w,
        };
        let slope = g.dot(&step);
        // Once the predicted decrease is below the rounding level of W the
        // Armijo test is meaningless; take the full Newton step.
        let resolvable = -slope > 1e3 * f64::EPSILON * w;
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = c.iter().zip(step.iter()).map(|(x, d)| x + t * d).collect();
            let trial_mo = moments(p, &trial, 2)?;
            if !resolvable || trial_mo.value <= w + ARMIJO_SLOPE * t * slope || t < 1e-12 {
                c = trial;
                mo = trial_mo;
                break;
            }
            t *= 0.5;
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        residual: norm(&mo.first[..m]) / mo.value,
    })
}

/// Solves from each start point; order of the output matches `starts`.
pub fn multistart(p: &Polytope, starts: &[Vec<f64>], tol: f64) -> Vec<Result<SolitonField>> {
    crate::par::map(starts, |s| solve_soliton_field_from(p, s, tol))
}
