//! Exact integration of `g(f(y))` over simplices and polytopes.
//!
//! For an `r`-simplex σ with vertex values `l_i = f(v_i)`,
//!
//! ```text
//! ∫_σ g(f) = r! · mass(σ) · [l_0, …, l_r] G,    G^(r) = g,
//! ```
//!
//! and repeating node `l_j` once more weights the integrand by the
//! barycentric coordinate `λ_j`. Moments such as `∫ y_i g(f)` reduce to
//! these weighted integrals. When the divided-difference table loses
//! more than six digits to cancellation the integral is recomputed by
//! adaptive cubature.

pub mod adaptive;
pub mod divdiff;

use serde::{Deserialize, Serialize};

pub use adaptive::{integrate_barycentric, numeric_fallback};
pub use divdiff::{divided_difference, Antiderivative, Smooth};

use crate::error::{Error, Result};
use crate::polytope::{Polytope, Simplex};

/// Relative error estimate above which the cubature rescue path runs
/// (six digits lost from double precision).
const RESCUE_THRESHOLD: f64 = 1e6 * f64::EPSILON;
const RESCUE_TOL: f64 = 1e-12;

/// `y ↦ ⟨gradient, y⟩ + constant`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineFunction {
    pub gradient: Vec<f64>,
    pub constant: f64,
}

impl AffineFunction {
    pub fn new(gradient: Vec<f64>, constant: f64) -> Self {
        Self { gradient, constant }
    }

    /// Linear function `⟨c, y⟩`.
    pub fn linear(c: &[f64]) -> Self {
        Self::new(c.to_vec(), 0.0)
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        Self::new(vec![0.0; dim], value)
    }

    /// From homogeneous coordinates `(K_1, …, K_m, a)`.
    pub fn from_homogeneous(x: &[f64]) -> Self {
        let (a, k) = x.split_last().expect("homogeneous vector is nonempty");
        Self::new(k.to_vec(), *a)
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        self.gradient.iter().zip(y).map(|(g, v)| g * v).sum::<f64>() + self.constant
    }
}

/// Integrand kernels `g` composed with an affine function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kernel {
    Exp,
    /// `t^{-k}`, defined for `t > 0`.
    InvPower(u32),
    /// `t^s`.
    Monomial(u32),
}

impl Kernel {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Kernel::Exp => t.exp(),
            Kernel::InvPower(k) => t.powi(-(k as i32)),
            Kernel::Monomial(s) => t.powi(s as i32),
        }
    }

    pub fn antiderivative(self, order: usize) -> Antiderivative {
        Antiderivative { kernel: self, order }
    }

    pub fn requires_positive(&self) -> bool {
        matches!(self, Kernel::InvPower(_))
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `∫_σ (∏_{j ∈ extra} λ_j) g(f)`, with `extra` listing barycentric
/// indices (repeats allowed).
pub fn integrate_simplex_weighted(
    simplex: &Simplex,
    f: &AffineFunction,
    g: Kernel,
    extra: &[usize],
) -> Result<f64> {
    let r = simplex.order();
    let values: Vec<f64> = simplex.points().iter().map(|p| f.eval(p)).collect();
    if g.requires_positive() {
        if let Some((vertex, &value)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::NotPositive { vertex, value });
        }
    }
    let mut nodes = values.clone();
    nodes.extend(extra.iter().map(|&j| values[j]));
    let anti = g.antiderivative(nodes.len() - 1);
    let (dd, err) = divdiff::divided_difference_with_error(&anti, &nodes)?;

    // α! for the multiplicities of the extra barycentric indices.
    let mut counts = vec![0usize; r + 1];
    for &j in extra {
        counts[j] += 1;
    }
    let multiplicity: f64 = counts.iter().map(|&c| factorial(c)).product();
    let scale = factorial(r) * simplex.weight_f64() * multiplicity;
    let value = scale * dd;

    if err > RESCUE_THRESHOLD * dd.abs() {
        let integrand = |lambda: &[f64], y: &[f64]| {
            let w: f64 = extra.iter().map(|&j| lambda[j]).product();
            w * g.eval(f.eval(y))
        };
        if let Ok(v) = integrate_barycentric(simplex, integrand, RESCUE_TOL) {
            return Ok(v);
        }
    }
    Ok(value)
}

/// `∫_σ g(f)` by the Hermite–Genocchi identity.
pub fn integrate_simplex(simplex: &Simplex, f: &AffineFunction, g: Kernel) -> Result<f64> {
    integrate_simplex_weighted(simplex, f, g, &[])
}

fn check_positive(p: &Polytope, f: &AffineFunction, g: Kernel) -> Result<()> {
    if !g.requires_positive() {
        return Ok(());
    }
    match p
        .vertices_f64()
        .iter()
        .map(|v| f.eval(v))
        .enumerate()
        .find(|(_, v)| !(*v > 0.0))
    {
        None => Ok(()),
        Some((vertex, value)) => Err(Error::NotPositive { vertex, value }),
    }
}

/// `∫_Δ g(f) dμ`.
pub fn integrate_polytope(p: &Polytope, f: &AffineFunction, g: Kernel) -> Result<f64> {
    check_positive(p, f, g)?;
    p.triangulate().iter().map(|s| integrate_simplex(s, f, g)).sum()
}

/// `∫_{∂Δ} g(f) dσ` with the lattice boundary measure.
pub fn integrate_boundary(p: &Polytope, f: &AffineFunction, g: Kernel) -> Result<f64> {
    check_positive(p, f, g)?;
    p.boundary_pieces()
        .iter()
        .map(|s| integrate_simplex(s, f, g))
        .sum()
}

/// `∫_Δ y_i e^{⟨c, y⟩} dy`.
pub fn integrate_weighted_exp(p: &Polytope, c: &[f64], i: usize) -> Result<f64> {
    let f = AffineFunction::linear(c);
    let mut total = 0.0;
    for s in p.triangulate() {
        for (j, v) in s.points().iter().enumerate() {
            if v[i] != 0.0 {
                total += v[i] * integrate_simplex_weighted(s, &f, Kernel::Exp, &[j])?;
            }
        }
    }
    Ok(total)
}

/// Integrals of `g(f)` against the homogeneous coordinates `ŷ = (y, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    /// `∫ g(f)`.
    pub value: f64,
    /// `∫ ŷ_p g(f)`, length `m + 1`.
    pub first: Vec<f64>,
    /// `∫ ŷ_p ŷ_q g(f)`, `(m + 1) × (m + 1)`; empty unless requested.
    pub second: Vec<Vec<f64>>,
}

/// Moments of order up to `order` (0, 1 or 2) over a list of simplices.
pub fn moments(pieces: &[Simplex], f: &AffineFunction, g: Kernel, order: usize) -> Result<Moments> {
    let m = f.gradient.len();
    let mut out = Moments {
        value: 0.0,
        first: vec![0.0; m + 1],
        second: if order >= 2 { vec![vec![0.0; m + 1]; m + 1] } else { Vec::new() },
    };
    for s in pieces {
        let hom: Vec<Vec<f64>> = s
            .points()
            .iter()
            .map(|p| p.iter().copied().chain(std::iter::once(1.0)).collect())
            .collect();
        let n = hom.len();
        out.value += integrate_simplex(s, f, g)?;
        if order >= 1 {
            for (j, vj) in hom.iter().enumerate() {
                let w = integrate_simplex_weighted(s, f, g, &[j])?;
                for p in 0..=m {
                    out.first[p] += vj[p] * w;
                }
            }
        }
        if order >= 2 {
            for a in 0..n {
                for b in a..n {
                    let w = integrate_simplex_weighted(s, f, g, &[a, b])?;
                    for p in 0..=m {
                        for q in 0..=m {
                            let coef = if a == b {
                                hom[a][p] * hom[a][q]
                            } else {
                                hom[a][p] * hom[b][q] + hom[b][p] * hom[a][q]
                            };
                            out.second[p][q] += coef * w;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// [`moments`] over the interior of `p`, with the positivity check
/// reported against the polytope's vertices.
pub fn polytope_moments(p: &Polytope, f: &AffineFunction, g: Kernel, order: usize) -> Result<Moments> {
    check_positive(p, f, g)?;
    moments(p.triangulate(), f, g, order)
}

/// [`moments`] over the boundary of `p` with the lattice measure.
pub fn boundary_moments(p: &Polytope, f: &AffineFunction, g: Kernel, order: usize) -> Result<Moments> {
    check_positive(p, f, g)?;
    moments(p.boundary_pieces(), f, g, order)
}
