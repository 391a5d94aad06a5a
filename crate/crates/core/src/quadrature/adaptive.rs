//! Adaptive cubature on simplices by longest-edge bisection.
//!
//! Each region is integrated with the Grundmann–Möller rules of degree 9
//! and 7; their difference is the local error estimate. The region with
//! the largest estimate is bisected until the summed estimate drops
//! below the relative tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::polytope::Simplex;

const MAX_REGIONS: usize = 400_000;

/// A cubature rule on the standard simplex: weights sum to one, points
/// are barycentric.
#[derive(Debug, Clone)]
pub struct SimplexRule {
    pub weights: Vec<f64>,
    pub points: Vec<Vec<f64>>,
}

fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        compositions(total - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

/// Grundmann–Möller rule of degree `2s + 1` on the `n`-simplex.
pub fn grundmann_moller(n: usize, s: usize) -> SimplexRule {
    let d = 2 * s + 1;
    let fact = |k: usize| (1..=k).fold(1.0f64, |acc, j| acc * j as f64);
    let mut weights = Vec::new();
    let mut points = Vec::new();
    for i in 0..=s {
        let denom = (d + n - 2 * i) as f64;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        // Weight relative to the simplex volume 1/n!.
        let w = sign * 2f64.powi(-(2 * s as i32)) * denom.powi(d as i32) / (fact(i) * fact(d + n - i))
            * fact(n);
        let mut betas = Vec::new();
        compositions(s - i, n + 1, &mut Vec::new(), &mut betas);
        for beta in betas {
            points.push(beta.iter().map(|&b| (2 * b + 1) as f64 / denom).collect());
            weights.push(w);
        }
    }
    SimplexRule { weights, points }
}

struct Region {
    /// Barycentric coordinates (w.r.t. the original simplex) of the vertices.
    vertices: Vec<Vec<f64>>,
    fraction: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Region {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Region {}
impl PartialOrd for Region {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Region {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

struct Integrator<'a, F> {
    simplex: &'a Simplex,
    integrand: F,
    fine: SimplexRule,
    coarse: SimplexRule,
}

impl<F: Fn(&[f64], &[f64]) -> f64> Integrator<'_, F> {
    fn eval_rule(&self, rule: &SimplexRule, vertices: &[Vec<f64>]) -> f64 {
        let order = vertices.len();
        let ambient = self.simplex.ambient_dim();
        let pts = self.simplex.points();
        let mut bary = vec![0.0; order];
        let mut y = vec![0.0; ambient];
        let mut sum = 0.0;
        for (w, nu) in rule.weights.iter().zip(&rule.points) {
            bary.iter_mut().for_each(|b| *b = 0.0);
            for (k, vert) in vertices.iter().enumerate() {
                for (b, &v) in bary.iter_mut().zip(vert) {
                    *b += nu[k] * v;
                }
            }
            y.iter_mut().for_each(|c| *c = 0.0);
            for (b, p) in bary.iter().zip(pts) {
                for (c, &pc) in y.iter_mut().zip(p) {
                    *c += b * pc;
                }
            }
            sum += w * (self.integrand)(&bary, &y);
        }
        sum
    }

    fn region(&self, vertices: Vec<Vec<f64>>, fraction: f64) -> Region {
        let scale = self.simplex.weight_f64() * fraction;
        let fine = self.eval_rule(&self.fine, &vertices) * scale;
        let coarse = self.eval_rule(&self.coarse, &vertices) * scale;
        Region {
            vertices,
            fraction,
            value: fine,
            error: (fine - coarse).abs(),
        }
    }

    fn physical_len_sq(&self, a: &[f64], b: &[f64]) -> f64 {
        let pts = self.simplex.points();
        (0..self.simplex.ambient_dim())
            .map(|c| {
                let d: f64 = a.iter().zip(b).zip(pts).map(|((x, y), p)| (x - y) * p[c]).sum();
                d * d
            })
            .sum()
    }

    fn split(&self, r: Region) -> [Region; 2] {
        let n = r.vertices.len();
        let (mut bi, mut bj, mut best) = (0, 1, -1.0);
        for i in 0..n {
            for j in i + 1..n {
                let l = self.physical_len_sq(&r.vertices[i], &r.vertices[j]);
                if l > best {
                    (bi, bj, best) = (i, j, l);
                }
            }
        }
        let mid: Vec<f64> = r.vertices[bi]
            .iter()
            .zip(&r.vertices[bj])
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        let mut left = r.vertices.clone();
        left[bj] = mid.clone();
        let mut right = r.vertices;
        right[bi] = mid;
        let half = 0.5 * r.fraction;
        [self.region(left, half), self.region(right, half)]
    }
}

/// Integrates `integrand(λ, y)` over the simplex, where `λ` are the
/// barycentric coordinates of the physical point `y`. The measure is the
/// simplex weight (volume or lattice mass).
pub fn integrate_barycentric<F>(simplex: &Simplex, integrand: F, tol: f64) -> Result<f64>
where
    F: Fn(&[f64], &[f64]) -> f64,
{
    let order = simplex.order();
    if order == 0 {
        return Ok(simplex.weight_f64() * integrand(&[1.0], &simplex.points()[0]));
    }
    let integrator = Integrator {
        simplex,
        integrand,
        fine: grundmann_moller(order, 4),
        coarse: grundmann_moller(order, 3),
    };
    let identity: Vec<Vec<f64>> = (0..=order)
        .map(|i| (0..=order).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut heap = BinaryHeap::new();
    let root = integrator.region(identity, 1.0);
    let mut total = root.value;
    let mut total_err = root.error;
    heap.push(root);
    let mut regions = 1;
    while total_err > tol * total.abs() && total_err > f64::MIN_POSITIVE {
        if regions >= MAX_REGIONS {
            return Err(Error::QuadratureBudget {
                estimate: total_err / total.abs(),
                target: tol,
            });
        }
        let worst = heap.pop().expect("heap holds every live region");
        total -= worst.value;
        total_err -= worst.error;
        for child in integrator.split(worst) {
            total += child.value;
            total_err += child.error;
            heap.push(child);
        }
        regions += 1;
        if regions % 1024 == 0 {
            // Re-sum to shed accumulated cancellation in the running totals.
            total = heap.iter().map(|r| r.value).sum();
            total_err = heap.iter().map(|r| r.error).sum();
        }
    }
    Ok(heap.iter().map(|r| r.value).sum())
}

/// Adaptive simplex-subdivision quadrature of `integrand(y)` to relative
/// tolerance `tol`.
pub fn numeric_fallback<F>(simplex: &Simplex, integrand: F, tol: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    integrate_barycentric(simplex, |_, y| integrand(y), tol)
}
