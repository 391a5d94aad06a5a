//! Closed-form critical points for two one-parameter polygon families.
//!
//! * `Product`: the rectangle `[0, p] × [0, 1]`.
//! * `Blowup`: the trapezoid `conv{(0,0), (p,0), (p,1−p), (0,1)}`, `0 < p < 1`.

use serde::{Deserialize, Serialize};

use super::{normalize_class, quartic_roots};
use crate::error::{Error, Result};
use crate::polytope::exact::{from_f64, rat, Rational};
use crate::polytope::Polytope;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Product,
    Blowup,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "product" => Ok(Family::Product),
            "blowup" => Ok(Family::Blowup),
            other => Err(Error::OutOfRange(format!("unknown family {other:?} (product|blowup)"))),
        }
    }
}

fn check_range(family: Family, p: f64) -> Result<()> {
    let ok = match family {
        Family::Product => p > 0.0 && p.is_finite(),
        Family::Blowup => p > 0.0 && p < 1.0,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("p = {p} outside the {family:?} family's range")))
    }
}

/// The family member at parameter `p`, with `p` converted exactly.
pub fn family_polytope(family: Family, p: f64) -> Result<Polytope> {
    check_range(family, p)?;
    let q: Rational = from_f64(p).ok_or_else(|| Error::OutOfRange("non-finite p".into()))?;
    let (zero, one) = (rat(0), rat(1));
    let vertices = match family {
        Family::Product => vec![
            vec![zero.clone(), zero.clone()],
            vec![q.clone(), zero.clone()],
            vec![q.clone(), one.clone()],
            vec![zero, one],
        ],
        Family::Blowup => vec![
            vec![zero.clone(), zero.clone()],
            vec![q.clone(), zero.clone()],
            vec![q.clone(), &one - &q],
            vec![zero, one],
        ],
    };
    let name = match family {
        Family::Product => format!("product p={p}"),
        Family::Blowup => format!("blowup p={p}"),
    };
    Ok(Polytope::build(2, vertices, None, None)?.with_name(name))
}

/// The printed closed-form critical points at `p`, each as an admissible
/// unit representative `(K₁, K₂, a)`.
pub fn closed_form_critical(family: Family, p: f64) -> Result<Vec<Vec<f64>>> {
    check_range(family, p)?;
    let mut raw: Vec<[f64; 3]> = Vec::new();
    match family {
        Family::Product => {
            raw.push([0.0, 0.0, 1.0]);
            if p > 2.0 {
                let s = p.powf(1.5) / (p - 2.0).sqrt();
                raw.push([1.0, 0.0, 0.5 * (s - p)]);
                raw.push([-1.0, 0.0, 0.5 * (s + p)]);
            }
        }
        Family::Blowup => {
            let r = (1.0 - p).sqrt();
            raw.push([1.0, 0.0, p * (1.0 - r) / (2.0 * r + p - 2.0)]);
            if p > 8.0 / 9.0 {
                let s = (9.0 * p * p - 8.0 * p).sqrt();
                for sign in [1.0, -1.0] {
                    let t = sign * s;
                    raw.push([-1.0, 0.0, p * (3.0 * p + t) / (2.0 * (p + t))]);
                }
            }
            let (alpha, _) = quartic_roots()?;
            if p < alpha {
                let f = super::quartic(p);
                let sf = f.sqrt();
                for sign in [1.0, -1.0] {
                    raw.push([
                        p * p - 4.0 * p + 2.0 + sign * sf,
                        sign * 2.0 * sf,
                        p * p + 2.0 * p - 2.0 - sign * sf,
                    ]);
                }
            }
        }
    }
    let poly = family_polytope(family, p)?;
    raw.iter()
        .map(|x| {
            normalize_class(&poly, x).ok_or_else(|| {
                Error::Internal(format!("closed-form point {x:?} is not admissible at p = {p}"))
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ckem::eh_gradient;
    use crate::linalg::norm;

    fn assert_critical(family: Family, p: f64, expected: usize) {
        let poly = family_polytope(family, p).unwrap();
        let pts = closed_form_critical(family, p).unwrap();
        assert_eq!(pts.len(), expected, "{family:?} p={p}");
        for x in pts {
            let g = eh_gradient(&poly, &x).unwrap();
            let v = super::super::eh_value(&poly, &x).unwrap();
            assert!(norm(&g) / v < 1e-10, "{family:?} p={p} x={x:?} |g|={}", norm(&g));
        }
    }

    #[test]
    fn product_points_are_critical() {
        assert_critical(Family::Product, 1.5, 1);
        assert_critical(Family::Product, 3.0, 3);
        assert_critical(Family::Product, 7.25, 3);
    }

    #[test]
    fn product_decimals() {
        let pts = closed_form_critical(Family::Product, 3.0).unwrap();
        let ratio = |x: &Vec<f64>| x[2] / x[0];
        assert!((ratio(&pts[1]) - 1.098_076_211_353_316).abs() < 1e-12);
        assert!((ratio(&pts[2]) + 4.098_076_211_353_316).abs() < 1e-12);
    }

    #[test]
    fn blowup_points_are_critical() {
        assert_critical(Family::Blowup, 0.5, 1);
        assert_critical(Family::Blowup, 0.8, 1);
        assert_critical(Family::Blowup, 0.9, 3);
        assert_critical(Family::Blowup, 0.95, 3);
        let (alpha, _) = quartic_roots().unwrap();
        assert_critical(Family::Blowup, alpha / 2.0, 3);
    }

    #[test]
    fn out_of_range() {
        assert!(closed_form_critical(Family::Blowup, 1.2).is_err());
        assert!(closed_form_critical(Family::Product, -1.0).is_err());
    }
}
