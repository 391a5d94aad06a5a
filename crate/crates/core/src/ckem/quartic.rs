//! Real roots of `F(p) = p⁴ − 4p³ + 16p² − 16p + 4` in `(0, 1)`.
//!
//! Roots are isolated exactly with a Sturm sequence over the rationals and
//! then polished by Newton's method in double precision.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::polytope::exact::{rat, to_f64, Rational};

/// Coefficients, constant term first.
type Poly = Vec<Rational>;

const COEFFS: [i64; 5] = [4, -16, 16, -4, 1];

/// `F(p)`.
pub fn quartic(p: f64) -> f64 {
    COEFFS.iter().rev().fold(0.0, |acc, &c| acc * p + c as f64)
}

fn quartic_derivative(p: f64) -> f64 {
    COEFFS
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (i, &c)| acc * p + (i as i64 * c) as f64)
}

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn eval(p: &Poly, x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

fn derivative(p: &Poly) -> Poly {
    trim(p.iter().enumerate().skip(1).map(|(i, c)| c * rat(i as i64)).collect())
}

fn remainder(a: &Poly, b: &Poly) -> Poly {
    let mut r = a.clone();
    let lead = b.last().expect("nonzero divisor");
    while r.len() >= b.len() && !(r.len() == 1 && r[0].is_zero()) {
        let shift = r.len() - b.len();
        let q = r.last().unwrap() / lead;
        for (i, c) in b.iter().enumerate() {
            r[i + shift] -= &q * c;
        }
        r.pop();
        r = trim(r);
        if r.is_empty() {
            r.push(Rational::zero());
        }
    }
    r
}

fn sturm_chain(p: &Poly) -> Vec<Poly> {
    let mut chain = vec![p.clone(), derivative(p)];
    loop {
        let n = chain.len();
        let r = remainder(&chain[n - 2], &chain[n - 1]);
        if r.iter().all(Zero::is_zero) {
            break;
        }
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    chain
}

fn sign_changes(chain: &[Poly], x: &Rational) -> usize {
    let signs: Vec<bool> = chain
        .iter()
        .map(|p| eval(p, x))
        .filter(|v| !v.is_zero())
        .map(|v| v.is_positive())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn isolate(chain: &[Poly], lo: Rational, hi: Rational, out: &mut Vec<(Rational, Rational)>) {
    let count = sign_changes(chain, &lo) - sign_changes(chain, &hi);
    match count {
        0 => {}
        1 => out.push((lo, hi)),
        _ => {
            let mid = (&lo + &hi) / rat(2);
            isolate(chain, lo, mid.clone(), out);
            isolate(chain, mid, hi, out);
        }
    }
}

/// The two real roots `0 < α < β < 1` of `F`.
pub fn quartic_roots() -> Result<(f64, f64)> {
    let poly: Poly = COEFFS.iter().map(|&c| rat(c)).collect();
    let chain = sturm_chain(&poly);
    let mut intervals = Vec::new();
    isolate(&chain, rat(0), rat(1), &mut intervals);
    if intervals.len() != 2 {
        return Err(Error::Internal(format!("expected two roots in (0,1), found {}", intervals.len())));
    }
    let mut roots = Vec::with_capacity(2);
    for (mut lo, mut hi) in intervals {
        // Shrink exactly until the bracket is narrow, then polish.
        while to_f64(&(&hi - &lo)) > 1e-6 {
            let mid = (&lo + &hi) / rat(2);
            if eval(&poly, &mid).is_zero() {
                lo = mid.clone();
                hi = mid;
                break;
            }
            if eval(&poly, &lo).is_positive() == eval(&poly, &mid).is_positive() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (a, b) = (to_f64(&lo), to_f64(&hi));
        let mut x = 0.5 * (a + b);
        for _ in 0..50 {
            let step = quartic(x) / quartic_derivative(x);
            x = (x - step).clamp(a, b);
            if step.abs() <= 1e-16 * x.abs() {
                break;
            }
        }
        roots.push(x);
    }
    Ok((roots[0], roots[1]))
}
