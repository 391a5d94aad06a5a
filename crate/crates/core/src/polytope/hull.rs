//! Exact convex hulls in dimensions one and two.

use num_traits::{Signed, Zero};

use super::exact::{primitive_direction, Point, Rational};
use super::Facet;
use crate::error::{Error, Result};

pub(super) fn hull_1d(points: &[Point]) -> Result<(Vec<Point>, Vec<Facet>)> {
    let lo = points.iter().map(|p| &p[0]).min().ok_or(Error::LowerDimensional)?;
    let hi = points.iter().map(|p| &p[0]).max().ok_or(Error::LowerDimensional)?;
    if lo == hi {
        return Err(Error::LowerDimensional);
    }
    let vertices = vec![vec![lo.clone()], vec![hi.clone()]];
    let facets = vec![Facet::new(vec![1], -lo.clone()), Facet::new(vec![-1], hi.clone())];
    Ok((vertices, facets))
}

fn cross(o: &Point, a: &Point, b: &Point) -> Rational {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

/// Monotone chain; returns the strictly convex hull in counter-clockwise
/// order together with one facet per edge.
pub(super) fn hull_2d(points: &[Point]) -> Result<(Vec<Point>, Vec<Facet>)> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::LowerDimensional);
    }
    let mut lower: Vec<Point> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Point> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    let hull = lower;
    if hull.len() < 3 {
        return Err(Error::LowerDimensional);
    }

    let n = hull.len();
    let mut facets = Vec::with_capacity(n);
    for i in 0..n {
        let p = &hull[i];
        let q = &hull[(i + 1) % n];
        // Inward normal of a counter-clockwise edge p -> q.
        let dir = vec![-(&q[1] - &p[1]), &q[0] - &p[0]];
        debug_assert!(!dir.iter().all(Zero::is_zero));
        let normal = primitive_direction(&dir).ok_or(Error::NonIntegerNormal { facet: i })?;
        let offset = -super::exact::dot_int(&normal, p);
        facets.push(Facet::new(normal, offset));
    }
    Ok((hull, facets))
}
