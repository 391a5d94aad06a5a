//! The product-construction ODE
//!
//! ```text
//! t² Ψ'' − 2(2m−1) t Ψ' + 2m(2m−1) Ψ = c t² − d
//! ```
//!
//! on `(a, a+1)` with `Ψ(a) = Ψ(a+1) = 0`, `Ψ'(a) = 2`, `Ψ'(a+1) = −2`
//! and `Ψ > 0` inside. The homogeneous equation has the Euler solutions
//! `t^{2m−1}` and `t^{2m}`, so every solution is
//! `Ψ = A t² + B + C₁ t^{2m−1} + C₂ t^{2m}` with
//! `A = c / (2(2m−3)(m−1))` and `B = −d / (2m(2m−1))`.

use serde::Serialize;

use crate::error::{Error, Result};

const INTERIOR_SAMPLES: usize = 1000;
const NEWTON_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeResiduals {
    /// `|Ψ(a)| + |Ψ(a+1)|`.
    pub values: f64,
    /// `|Ψ'(a) − 2| + |Ψ'(a+1) + 2|`.
    pub slopes: f64,
    /// Largest relative ODE residual over the interior samples.
    pub equation: f64,
    /// Smallest `Ψ` over the interior samples.
    pub min_interior: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeSolution {
    pub m: usize,
    pub c: f64,
    pub a: f64,
    pub d: f64,
    /// `(A, B, C₁, C₂)`.
    pub coefficients: [f64; 4],
    pub residuals: OdeResiduals,
}

#[derive(Debug, Clone, Copy)]
struct Psi {
    m: usize,
    coef: [f64; 4],
}

impl Psi {
    fn particular(m: usize, c: f64, d: f64) -> (f64, f64) {
        let mf = m as f64;
        (
            c / (2.0 * (2.0 * mf - 3.0) * (mf - 1.0)),
            -d / (2.0 * mf * (2.0 * mf - 1.0)),
        )
    }

    /// The solution through `Ψ(a) = Ψ(a+1) = 0`.
    fn through_endpoints(m: usize, c: f64, a: f64, d: f64) -> Psi {
        let (ca, cb) = Self::particular(m, c, d);
        let p = 2 * m as i32;
        let b = a + 1.0;
        // [a^{p-1} a^p; b^{p-1} b^p] (C₁, C₂) = −(A t² + B) at t = a, b.
        let (m11, m12) = (a.powi(p - 1), a.powi(p));
        let (m21, m22) = (b.powi(p - 1), b.powi(p));
        let (r1, r2) = (-(ca * a * a + cb), -(ca * b * b + cb));
        let det = m11 * m22 - m12 * m21;
        let c1 = (r1 * m22 - m12 * r2) / det;
        let c2 = (m11 * r2 - r1 * m21) / det;
        Psi { m, coef: [ca, cb, c1, c2] }
    }

    fn value(&self, t: f64) -> f64 {
        let p = 2 * self.m as i32;
        let [a, b, c1, c2] = self.coef;
        a * t * t + b + c1 * t.powi(p - 1) + c2 * t.powi(p)
    }

    fn slope(&self, t: f64) -> f64 {
        let p = 2 * self.m as i32;
        let pf = p as f64;
        let [a, _, c1, c2] = self.coef;
        2.0 * a * t + (pf - 1.0) * c1 * t.powi(p - 2) + pf * c2 * t.powi(p - 1)
    }

    fn curvature(&self, t: f64) -> f64 {
        let p = 2 * self.m as i32;
        let pf = p as f64;
        let [a, _, c1, c2] = self.coef;
        2.0 * a + (pf - 1.0) * (pf - 2.0) * c1 * t.powi(p - 3) + pf * (pf - 1.0) * c2 * t.powi(p - 2)
    }
}

fn boundary_residual(m: usize, c: f64, a: f64, d: f64) -> [f64; 2] {
    let psi = Psi::through_endpoints(m, c, a, d);
    [psi.slope(a) - 2.0, psi.slope(a + 1.0) + 2.0]
}

fn residual_norm(r: [f64; 2]) -> f64 {
    r[0].hypot(r[1])
}

/// Damped Newton on `(a, d)` with a central-difference Jacobian, kept in
/// the open quadrant `a, d > 0`.
fn newton(m: usize, c: f64, mut a: f64, mut d: f64, tol: f64) -> Option<(f64, f64)> {
    let mut r = boundary_residual(m, c, a, d);
    for _ in 0..NEWTON_ITERATIONS {
        let norm = residual_norm(r);
        if !norm.is_finite() {
            return None;
        }
        if norm <= tol {
            return Some((a, d));
        }
        let ha = 1e-7 * a.max(1e-3);
        let hd = 1e-7 * d.max(1e-3);
        let ra_p = boundary_residual(m, c, a + ha, d);
        let ra_m = boundary_residual(m, c, a - ha, d);
        let rd_p = boundary_residual(m, c, a, d + hd);
        let rd_m = boundary_residual(m, c, a, d - hd);
        let j = [
            [(ra_p[0] - ra_m[0]) / (2.0 * ha), (rd_p[0] - rd_m[0]) / (2.0 * hd)],
            [(ra_p[1] - ra_m[1]) / (2.0 * ha), (rd_p[1] - rd_m[1]) / (2.0 * hd)],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let da = -(r[0] * j[1][1] - j[0][1] * r[1]) / det;
        let dd = -(j[0][0] * r[1] - r[0] * j[1][0]) / det;
        let mut t = 1.0;
        loop {
            let (na, nd) = (a + t * da, d + t * dd);
            if na > 0.0 && nd > 0.0 {
                let nr = boundary_residual(m, c, na, nd);
                if residual_norm(nr) < norm {
                    a = na;
                    d = nd;
                    r = nr;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-10 {
                return None;
            }
        }
    }
    (residual_norm(r) <= tol).then_some((a, d))
}

fn logspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (l, h) = (lo.ln(), hi.ln());
    (0..n).map(move |i| (l + (h - l) * i as f64 / (n - 1) as f64).exp())
}

fn assemble(m: usize, c: f64, a: f64, d: f64) -> OdeSolution {
    let psi = Psi::through_endpoints(m, c, a, d);
    let b = a + 1.0;
    let mf = m as f64;
    let mut equation = 0.0f64;
    let mut min_interior = f64::INFINITY;
    for i in 1..=INTERIOR_SAMPLES {
        let t = a + i as f64 / (INTERIOR_SAMPLES + 1) as f64;
        let terms = [
            t * t * psi.curvature(t),
            -2.0 * (2.0 * mf - 1.0) * t * psi.slope(t),
            2.0 * mf * (2.0 * mf - 1.0) * psi.value(t),
            -(c * t * t - d),
        ];
        let scale: f64 = terms.iter().map(|x| x.abs()).sum();
        equation = equation.max(terms.iter().sum::<f64>().abs() / scale);
        min_interior = min_interior.min(psi.value(t));
    }
    OdeSolution {
        m,
        c,
        a,
        d,
        coefficients: psi.coef,
        residuals: OdeResiduals {
            values: psi.value(a).abs() + psi.value(b).abs(),
            slopes: (psi.slope(a) - 2.0).abs() + (psi.slope(b) + 2.0).abs(),
            equation,
            min_interior,
        },
    }
}

/// Finds `a, d > 0` and the solution `Ψ` satisfying the boundary
/// conditions with `Ψ > 0` on `(a, a+1)`. Returns the root with the
/// smallest `a` when several are found.
pub fn solve_product_ode(m: usize, c: f64, tol: f64) -> Result<OdeSolution> {
    if m < 2 {
        return Err(Error::OutOfRange(format!("m = {m} must be at least 2")));
    }
    if !c.is_finite() {
        return Err(Error::OutOfRange("c must be finite".into()));
    }
    let mut best: Option<OdeSolution> = None;
    for a0 in logspace(1e-2, 1e2, 25) {
        for d0 in logspace(1e-1, 1e5, 25) {
            let Some((a, d)) = newton(m, c, a0, d0, tol) else { continue };
            let sol = assemble(m, c, a, d);
            if !(sol.residuals.min_interior > 0.0) {
                continue;
            }
            if best.as_ref().map_or(true, |b| a < b.a - 1e-9 * b.a) {
                best = Some(sol);
            }
        }
    }
    best.ok_or_else(|| {
        Error::NoAdmissibleRoot(format!(
            "no (a, d) with a, d > 0 and Ψ > 0 found for m = {m}, c = {c} (a solution is only expected for c > {})",
            8 * m - 8
        ))
    })
}
