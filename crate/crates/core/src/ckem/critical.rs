//! Multistart search for critical points of `EH` on the unit sphere.
//!
//! Starts are drawn uniformly on the sphere in coordinates centred at the
//! vertex centroid and scaled by the vertex radius, so the start
//! distribution does not change when the polygon is translated or
//! rescaled. Each draw is replaced by its admissible sign (rejected when
//! neither sign is admissible). Each start
//! runs a Levenberg–Marquardt-damped Newton iteration on the tangent-space
//! gradient, with the merit `|∇ log EH|`; because `EH` is homogeneous of
//! degree zero the gradient is always tangent to the sphere.
//!
//! Lattice automorphisms of the polygon act linearly on classes and
//! preserve `EH`. A converged point lying close to the fixed subspace of
//! some of them is projected onto that subspace and polished there, where
//! a critical point that is degenerate in the full sphere (a bifurcation
//! point) is usually not. Two converged points joined by a segment along
//! which the gradient stays below tolerance are reported once.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{eh_derivatives, eh_value, is_admissible, normalize_class};
use crate::error::{Error, Result};
use crate::linalg::{self, dot, norm};
use crate::polytope::Polytope;

/// Stop when `|∇ log EH|` falls below this.
const GRADIENT_TOL: f64 = 1e-11;
const MAX_ITERATIONS: usize = 120;
const MAX_STEP: f64 = 0.5;
/// Classes closer than this angle (radians) are merged.
pub const DEDUP_ANGLE: f64 = 1e-6;
/// Slice eigenvalues below this fraction of `|H|` are treated as zero.
pub const DEGENERACY: f64 = 1e-7;
const SAMPLE_BUDGET: usize = 1000;
/// Points within this angle of a fixed subspace are tried there.
const SNAP_ANGLE: f64 = 1e-3;
/// Largest separation at which the segment test can merge two points.
const MERGE_REACH: f64 = 1e-2;
const SEGMENT_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    Minimum,
    Maximum,
    Saddle,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPoint {
    /// Unit vector `(K, a)` with `f_{K,a} > 0` on the polytope.
    pub representative: Vec<f64>,
    pub value: f64,
    /// `|∇ EH| / EH` at the representative.
    pub gradient_norm: f64,
    pub hessian_signature: Signature,
    /// Eigenvalues of the Hessian restricted to the tangent space, ascending.
    pub slice_eigenvalues: Vec<f64>,
    pub basin_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPointReport {
    pub points: Vec<CriticalPoint>,
    pub starts_used: usize,
    /// Converged starts that landed on an already-found class.
    pub duplicates_merged: usize,
    pub not_converged: usize,
}

/// Orthonormal basis of the tangent space `x^⊥` as matrix columns.
fn tangent_basis(x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| x[i].abs().total_cmp(&x[j].abs()));
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(n - 1);
    let xv = DVector::from_column_slice(x);
    for &i in &order {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v -= &xv * xv[i];
        for c in &cols {
            let proj = c.dot(&v);
            v -= c * proj;
        }
        let len = v.norm();
        if len > 0.3 {
            cols.push(v / len);
        }
        if cols.len() == n - 1 {
            break;
        }
    }
    DMatrix::from_columns(&cols)
}

/// Orthonormal basis of `x^⊥ ∩ span(q)`, `x` assumed to lie in `span(q)`.
fn tangent_basis_in(x: &[f64], q: &DMatrix<f64>) -> DMatrix<f64> {
    let xv = DVector::from_column_slice(x);
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for j in 0..q.ncols() {
        let mut v = q.column(j) - &xv * xv.dot(&q.column(j));
        for c in &cols {
            let proj = c.dot(&v);
            v -= c * proj;
        }
        let len = v.norm();
        if len > 1e-6 {
            cols.push(v / len);
        }
    }
    DMatrix::from_columns(&cols)
}

fn retract(x: &[f64], basis: &DMatrix<f64>, v: &DVector<f64>) -> Vec<f64> {
    let moved = DVector::from_column_slice(x) + basis * v;
    let len = moved.norm();
    moved.iter().map(|c| c / len).collect()
}

struct Local {
    value: f64,
    merit: f64,
    grad_t: DVector<f64>,
    hess_t: DMatrix<f64>,
    hess_norm: f64,
}

fn local(p: &Polytope, x: &[f64], basis: &DMatrix<f64>) -> Result<Local> {
    let d = eh_derivatives(p, x, 2)?;
    let g = DVector::from_column_slice(&d.gradient);
    let h = linalg::matrix(&d.hessian);
    Ok(Local {
        value: d.value,
        merit: g.norm() / d.value,
        grad_t: basis.transpose() * &g,
        hess_t: basis.transpose() * &h * basis,
        hess_norm: h.norm(),
    })
}

fn merit(p: &Polytope, x: &[f64]) -> Option<f64> {
    if !is_admissible(p, x) {
        return None;
    }
    let d = eh_derivatives(p, x, 1).ok()?;
    let m = norm(&d.gradient) / d.value;
    m.is_finite().then_some(m)
}

/// Runs the damped Newton iteration from `x`, within `span(subspace)`
/// when given; returns the converged unit point.
fn descend(p: &Polytope, start: &[f64], subspace: Option<&DMatrix<f64>>) -> Result<Option<Vec<f64>>> {
    let mut x = start.to_vec();
    let mut lambda = 0.0;
    for _ in 0..MAX_ITERATIONS {
        let basis = match subspace {
            Some(q) => tangent_basis_in(&x, q),
            None => tangent_basis(&x),
        };
        let here = local(p, &x, &basis)?;
        if here.merit <= GRADIENT_TOL {
            return Ok(Some(x));
        }
        let scale = here.hess_norm.max(f64::MIN_POSITIVE);
        let mut accepted = false;
        for _ in 0..30 {
            // (H² + λ|H|² I) v = −H g; λ = 0 is the Newton step.
            let h = &here.hess_t;
            let lhs = h * h + DMatrix::identity(h.nrows(), h.ncols()) * (lambda * scale * scale);
            let rhs = -(h * &here.grad_t);
            let mut v = linalg::sym_solve(&lhs, &rhs, 1e-14);
            let len = v.norm();
            if len > MAX_STEP {
                v *= MAX_STEP / len;
            }
            let trial = retract(&x, &basis, &v);
            if let Some(mt) = merit(p, &trial) {
                if mt < here.merit {
                    x = trial;
                    lambda = if lambda < 1e-12 { 0.0 } else { lambda * 0.1 };
                    accepted = true;
                    break;
                }
            }
            lambda = if lambda == 0.0 { 1e-6 } else { lambda * 10.0 };
        }
        if !accepted {
            return Ok(None);
        }
    }
    Ok(None)
}

/// Linear action of each non-trivial automorphism `y ↦ Ay + t` on classes:
/// `f ∘ g` has coefficients `(Aᵀ K, ⟨K, t⟩ + a)`.
fn class_actions(p: &Polytope) -> Result<Vec<DMatrix<f64>>> {
    Ok(p.automorphisms()?
        .into_iter()
        .filter(|g| !g.is_identity())
        .map(|g| {
            DMatrix::from_fn(3, 3, |i, j| match (i, j) {
                (2, 2) => 1.0,
                (2, j) => crate::polytope::exact::to_f64(&g.translation[j]),
                (_, 2) => 0.0,
                (i, j) => g.linear[j][i] as f64,
            })
        })
        .collect())
}

/// Whether `|∇ log EH|` stays below tolerance along the chord from `a` to `b`.
fn joined(p: &Polytope, a: &[f64], b: &[f64]) -> bool {
    (1..=SEGMENT_SAMPLES).all(|k| {
        let s = k as f64 / (SEGMENT_SAMPLES + 1) as f64;
        let w: Vec<f64> = a.iter().zip(b).map(|(x, y)| (1.0 - s) * x + s * y).collect();
        let len = norm(&w);
        let w: Vec<f64> = w.iter().map(|c| c / len).collect();
        merit(p, &w).is_some_and(|m| m <= GRADIENT_TOL)
    })
}

/// Moves a converged point onto the common fixed subspace of the
/// automorphisms that nearly fix it, if a critical point there is joined
/// to it.
fn snap(p: &Polytope, x: &[f64], actions: &[DMatrix<f64>]) -> Result<Option<Vec<f64>>> {
    let xv = DVector::from_column_slice(x);
    let near: Vec<&DMatrix<f64>> = actions
        .iter()
        .filter(|m| {
            let y = *m * &xv;
            let y: Vec<f64> = (&y / y.norm()).iter().copied().collect();
            angle(x, &y) < SNAP_ANGLE
        })
        .collect();
    if near.is_empty() {
        return Ok(None);
    }
    // Fixed subspace: kernel of the stacked (M − I).
    let mut gram = DMatrix::<f64>::zeros(3, 3);
    for m in &near {
        let d = *m - DMatrix::<f64>::identity(3, 3);
        gram += d.transpose() * &d;
    }
    let eig = gram.symmetric_eigen();
    let kernel: Vec<DVector<f64>> = (0..3)
        .filter(|&i| eig.eigenvalues[i].abs() < 1e-9)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    if kernel.is_empty() {
        return Ok(None);
    }
    let q = DMatrix::from_columns(&kernel);
    let projected: Vec<f64> = (&q * (q.transpose() * &xv)).iter().copied().collect();
    let Some(z) = normalize_class(p, &projected) else {
        return Ok(None);
    };
    let z = if q.ncols() > 1 {
        match descend(p, &z, Some(&q))? {
            Some(z) => z,
            None => return Ok(None),
        }
    } else {
        z
    };
    let converged = merit(p, &z).is_some_and(|m| m <= GRADIENT_TOL);
    Ok((converged && joined(p, x, &z)).then_some(z))
}

fn classify(eigs: &[f64], hess_norm: f64) -> Signature {
    let tol = DEGENERACY * hess_norm;
    if eigs.iter().any(|l| l.abs() <= tol) {
        Signature::Degenerate
    } else if eigs.iter().all(|&l| l > 0.0) {
        Signature::Minimum
    } else if eigs.iter().all(|&l| l < 0.0) {
        Signature::Maximum
    } else {
        Signature::Saddle
    }
}

fn angle(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    2.0 * (0.5 * norm(&diff)).min(1.0).asin()
}

/// A uniformly distributed unit vector.
fn sphere_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let len = norm(&v);
        if len > 1e-3 && len <= 1.0 {
            return v.iter().map(|c| c / len).collect();
        }
    }
}

/// Admissible unit start points, drawn deterministically from `seed`.
pub fn admissible_starts(p: &Polytope, n_starts: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = p.dim();
    let verts = p.vertices_f64();
    let center: Vec<f64> = (0..m)
        .map(|i| verts.iter().map(|v| v[i]).sum::<f64>() / verts.len() as f64)
        .collect();
    let radius = verts
        .iter()
        .map(|v| norm(&v.iter().zip(&center).map(|(a, b)| a - b).collect::<Vec<_>>()))
        .fold(0.0, f64::max);
    let mut starts = Vec::with_capacity(n_starts);
    let mut draws = 0;
    while starts.len() < n_starts && draws < SAMPLE_BUDGET * n_starts.max(1) {
        draws += 1;
        // f = ⟨K', (y − center)/radius⟩ + a'.
        let local = sphere_point(&mut rng, m + 1);
        let k: Vec<f64> = local[..m].iter().map(|c| c / radius).collect();
        let a = local[m] - dot(&k, &center);
        let x: Vec<f64> = k.into_iter().chain(std::iter::once(a)).collect();
        if let Some(x) = normalize_class(p, &x) {
            starts.push(x);
        }
    }
    if starts.is_empty() && n_starts > 0 {
        return Err(Error::Internal("no admissible start directions sampled".into()));
    }
    Ok(starts)
}

/// All critical classes of `EH` on a polygon reachable from `n_starts`
/// seeded starts.
pub fn find_critical_points(p: &Polytope, n_starts: usize, seed: u64) -> Result<CriticalPointReport> {
    if p.dim() != 2 {
        return Err(Error::OutOfRange(format!(
            "critical point search supports polygons only (dim = {})",
            p.dim()
        )));
    }
    let starts = admissible_starts(p, n_starts, seed)?;
    let actions = class_actions(p)?;
    let outcomes = crate::par::map(&starts, |s| -> Result<Option<(Vec<f64>, bool)>> {
        let Some(x) = descend(p, s, None)? else {
            return Ok(None);
        };
        Ok(Some(match snap(p, &x, &actions)? {
            Some(z) => (z, true),
            None => (x, false),
        }))
    });
    // (point, snapped to a fixed subspace, basin count)
    let mut found: Vec<(Vec<f64>, bool, usize)> = Vec::new();
    let mut not_converged = 0;
    let mut duplicates = 0;
    for outcome in outcomes {
        let Some((x, snapped)) = outcome? else {
            not_converged += 1;
            continue;
        };
        let same = found.iter().position(|(y, _, _)| angle(&x, y) < DEDUP_ANGLE).or_else(|| {
            found
                .iter()
                .position(|(y, _, _)| angle(&x, y) < MERGE_REACH && joined(p, &x, y))
        });
        match same {
            Some(i) => {
                let entry = &mut found[i];
                entry.2 += 1;
                if snapped && !entry.1 {
                    entry.0 = x;
                    entry.1 = true;
                }
                duplicates += 1;
            }
            None => found.push((x, snapped, 1)),
        }
    }
    let mut points = Vec::with_capacity(found.len());
    for (x, _, basin_count) in found {
        // Exact zeros from projection may carry a sign.
        let x: Vec<f64> = x.into_iter().map(|c| c + 0.0).collect();
        let basis = tangent_basis(&x);
        let here = local(p, &x, &basis)?;
        let eigs = linalg::sym_eigenvalues(&here.hess_t);
        points.push(CriticalPoint {
            hessian_signature: classify(&eigs, here.hess_norm),
            representative: x,
            value: here.value,
            gradient_norm: here.merit,
            slice_eigenvalues: eigs,
            basin_count,
        });
    }
    points.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then_with(|| a.representative.iter().zip(&b.representative).fold(std::cmp::Ordering::Equal, |o, (x, y)| o.then(x.total_cmp(y))))
    });
    Ok(CriticalPointReport {
        points,
        starts_used: starts.len(),
        duplicates_merged: duplicates,
        not_converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LandscapeSample {
    pub theta: f64,
    pub phi: f64,
    pub value: f64,
}

/// `EH` on a `grid × grid` cell-centred `(θ, φ)` grid over the sphere,
/// `x = (sin θ cos φ, sin θ sin φ, cos θ)`, keeping admissible points only.
pub fn landscape(p: &Polytope, grid: usize) -> Result<Vec<LandscapeSample>> {
    if p.dim() != 2 {
        return Err(Error::OutOfRange("landscape needs a polygon".into()));
    }
    let rows: Vec<usize> = (0..grid).collect();
    let per_row = crate::par::map(&rows, |&i| -> Result<Vec<LandscapeSample>> {
        let theta = std::f64::consts::PI * (i as f64 + 0.5) / grid as f64;
        let mut out = Vec::new();
        for j in 0..grid {
            let phi = std::f64::consts::TAU * (j as f64 + 0.5) / grid as f64;
            let x = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            if is_admissible(p, &x) {
                out.push(LandscapeSample { theta, phi, value: eh_value(p, &x)? });
            }
        }
        Ok(out)
    });
    let mut all = Vec::new();
    for row in per_row {
        all.extend(row?);
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tangent_basis_is_orthonormal() {
        for x in [[0.0, 0.0, 1.0], [0.6, 0.0, 0.8], [0.48, 0.6, 0.64]] {
            let b = tangent_basis(&x);
            let xv = DVector::from_column_slice(&x);
            assert!((b.transpose() * &b - DMatrix::<f64>::identity(2, 2)).norm() < 1e-14);
            assert!((b.transpose() * xv).norm() < 1e-14);
        }
    }

    #[test]
    fn projective_plane_has_one_class() {
        let p = Polytope::from_int_vertices(2, &[vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        let r = find_critical_points(&p, 40, 1).unwrap();
        assert_eq!(r.points.len(), 1, "{r:?}");
        let x = &r.points[0].representative;
        assert!(angle(x, &[0.0, 0.0, 1.0]) < 1e-8, "{x:?}");
        assert!(r.points[0].gradient_norm < 1e-10);
    }
}
