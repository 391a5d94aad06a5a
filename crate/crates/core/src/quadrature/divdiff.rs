//! Divided differences of kernel antiderivatives.
//!
//! Widely separated nodes go through the usual recursive table. Node
//! groups that are close compared with the function's radius of
//! convergence are also evaluated from a Taylor expansion about their mean,
//! `[y_0..y_n]G = Σ_k G^(k)(c)/k! · h_{k-n}(y - c)`, with `h_d` the
//! complete homogeneous symmetric polynomials, and whichever of the two
//! carries the smaller error bound is kept. Groups with spread below
//! `CONFLUENCE * (1 + max|node|)` always use the expansion; exact repeats
//! are the special case `G^(n)(c)/n!`.

use super::Kernel;
use crate::error::{Error, Result};

/// Relative spread below which nodes are treated as one cluster.
pub const CONFLUENCE: f64 = 1e-7;

const TAYLOR_TERMS: usize = 48;

/// Node groups with spread below this fraction of the radius of
/// convergence also try the Taylor path.
const TAYLOR_REACH: f64 = 0.3;

/// A scalar function with derivatives of every order.
pub trait Smooth {
    fn derivative(&self, n: usize, t: f64) -> f64;

    /// Rejects nodes outside the function's domain.
    fn check_node(&self, _t: f64) -> Result<()> {
        Ok(())
    }

    /// Radius of convergence of the Taylor series about `t`.
    fn radius(&self, _t: f64) -> f64 {
        f64::INFINITY
    }
}

/// The `order`-fold antiderivative of a kernel, up to a polynomial of
/// degree below `order` (which every divided difference of that order
/// annihilates).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Antiderivative {
    pub kernel: Kernel,
    pub order: usize,
}

fn falling(p: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, j| acc * (p - j as f64))
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn harmonic(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

impl Smooth for Antiderivative {
    fn derivative(&self, n: usize, t: f64) -> f64 {
        let r = self.order;
        match self.kernel {
            Kernel::Exp => t.exp(),
            Kernel::Monomial(s) => {
                let deg = s as usize + r;
                if n > deg {
                    0.0
                } else {
                    factorial(s as usize) / factorial(deg - n) * t.powi((deg - n) as i32)
                }
            }
            Kernel::InvPower(k) => {
                let k = k as usize;
                if k > r {
                    // G = C t^p with p = r - k < 0.
                    let p = r as f64 - k as f64;
                    let c: f64 = (1..=r).map(|j| 1.0 / (j as f64 - k as f64)).product();
                    c * falling(p, n) * t.powi(r as i32 - k as i32 - n as i32)
                } else {
                    // G = C t^q ln t with q = r - k ≥ 0.
                    let q = r - k;
                    let sign = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
                    let c = sign / (factorial(k - 1) * factorial(q));
                    if n <= q {
                        c * factorial(q) / factorial(q - n)
                            * t.powi((q - n) as i32)
                            * (t.ln() + harmonic(q) - harmonic(q - n))
                    } else {
                        let sign = if (n - q - 1) % 2 == 0 { 1.0 } else { -1.0 };
                        c * sign * factorial(q) * factorial(n - q - 1) * t.powi(q as i32 - n as i32)
                    }
                }
            }
        }
    }

    fn check_node(&self, t: f64) -> Result<()> {
        match self.kernel {
            Kernel::InvPower(_) if !(t > 0.0) => Err(Error::NotPositive { vertex: 0, value: t }),
            _ if !t.is_finite() => Err(Error::Internal(format!("non-finite node {t}"))),
            _ => Ok(()),
        }
    }

    fn radius(&self, t: f64) -> f64 {
        match self.kernel {
            Kernel::InvPower(_) => t.abs(),
            _ => f64::INFINITY,
        }
    }
}

/// `[nodes]G` together with a running bound on its absolute rounding error.
pub fn divided_difference_with_error(g: &impl Smooth, nodes: &[f64]) -> Result<(f64, f64)> {
    if nodes.is_empty() {
        return Err(Error::Internal("divided difference of no nodes".into()));
    }
    for &t in nodes {
        g.check_node(t)?;
    }
    let mut x = nodes.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len();
    let scale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let threshold = CONFLUENCE * scale;

    // table[i] holds [x_i .. x_{i+len}] for the current length.
    let mut value: Vec<f64> = x.iter().map(|&t| g.derivative(0, t)).collect();
    let mut error: Vec<f64> = value.iter().map(|v| f64::EPSILON * v.abs()).collect();
    for len in 1..n {
        for i in 0..n - len {
            let j = i + len;
            let spread = x[j] - x[i];
            if spread <= threshold {
                let (v, e) = taylor(g, &x[i..=j]);
                value[i] = v;
                error[i] = e;
                continue;
            }
            let a = value[i];
            let b = value[i + 1];
            value[i] = (b - a) / spread;
            error[i] = (error[i] + error[i + 1] + f64::EPSILON * (a.abs() + b.abs())) / spread
                + f64::EPSILON * value[i].abs();
            let center = 0.5 * (x[i] + x[j]);
            if spread <= TAYLOR_REACH * g.radius(center) && error[i] > 1e3 * f64::EPSILON * value[i].abs() {
                let (v, e) = taylor(g, &x[i..=j]);
                if e < error[i] {
                    value[i] = v;
                    error[i] = e;
                }
            }
        }
    }
    Ok((value[0], error[0]))
}

/// Divided difference `[l_0, …, l_r]G`.
pub fn divided_difference(g: &impl Smooth, nodes: &[f64]) -> Result<f64> {
    divided_difference_with_error(g, nodes).map(|(v, _)| v)
}

fn taylor(g: &impl Smooth, nodes: &[f64]) -> (f64, f64) {
    let order = nodes.len() - 1;
    let center = nodes.iter().sum::<f64>() / nodes.len() as f64;
    let z: Vec<f64> = nodes.iter().map(|y| y - center).collect();
    if z.iter().all(|&d| d == 0.0) {
        let v = g.derivative(order, center) / factorial(order);
        return (v, f64::EPSILON * v.abs());
    }
    // h[d] = complete homogeneous symmetric polynomial of degree d in z.
    let mut h = vec![0.0; TAYLOR_TERMS];
    h[0] = 1.0;
    for &zi in &z {
        for d in 1..TAYLOR_TERMS {
            h[d] += zi * h[d - 1];
        }
    }
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut tail = f64::INFINITY;
    for d in 0..TAYLOR_TERMS {
        let k = order + d;
        let term = g.derivative(k, center) / factorial(k) * h[d];
        sum += term;
        abs_sum += term.abs();
        // Odd-degree terms can vanish by symmetry; judge two at a time.
        tail = term.abs() + prev;
        if d > 1 && tail <= f64::EPSILON * sum.abs() * 1e-3 {
            break;
        }
        prev = term.abs();
    }
    (sum, f64::EPSILON * abs_sum + tail)
}
