//! Affine symmetries of polygons.

use num_traits::Zero;

use super::exact::{inverse, rat, sub, Point, Rational};
use super::Polytope;
use crate::error::{Error, Result};

/// `y ↦ A y + t` with `A ∈ GL(m, ℤ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    pub linear: Vec<Vec<i64>>,
    pub translation: Point,
}

impl AffineMap {
    pub fn apply(&self, y: &[Rational]) -> Point {
        self.linear
            .iter()
            .zip(&self.translation)
            .map(|(row, t)| row.iter().zip(y).fold(t.clone(), |acc, (&a, x)| acc + rat(a) * x))
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.translation.iter().all(Zero::is_zero)
            && self
                .linear
                .iter()
                .enumerate()
                .all(|(i, row)| row.iter().enumerate().all(|(j, &a)| a == i64::from(i == j)))
    }
}

impl Polytope {
    /// Vertex indices in boundary order, walked along the edges.
    fn cyclic_vertex_order(&self) -> Vec<usize> {
        let n = self.vertices.len();
        let mut neighbours = vec![Vec::new(); n];
        for edge in &self.incidence {
            if let [a, b] = edge[..] {
                neighbours[a].push(b);
                neighbours[b].push(a);
            }
        }
        let mut order = vec![0];
        let mut prev = usize::MAX;
        while order.len() < n {
            let here = *order.last().unwrap();
            let Some(&next) = neighbours[here].iter().find(|&&v| v != prev && !order.contains(&v)) else {
                break;
            };
            prev = here;
            order.push(next);
        }
        order
    }

    /// Every map `y ↦ A y + t` with `A` unimodular taking the polygon onto
    /// itself, identity included. The translation may be any rational
    /// vector: lattice measures only see `A`.
    pub fn automorphisms(&self) -> Result<Vec<AffineMap>> {
        if self.dim != 2 {
            return Err(Error::OutOfRange(format!("automorphisms are computed for polygons only (dim = {})", self.dim)));
        }
        let order = self.cyclic_vertex_order();
        let n = order.len();
        if n != self.vertices.len() {
            return Err(Error::Internal("polygon boundary is not a single cycle".into()));
        }
        let v = |k: usize| &self.vertices[order[k % n]];
        let e1 = sub(v(1), v(0));
        let e2 = sub(v(n - 1), v(0));
        // Columns e1, e2; A maps them to the images' edge vectors.
        let basis_inv = inverse(&[vec![e1[0].clone(), e2[0].clone()], vec![e1[1].clone(), e2[1].clone()]])
            .ok_or(Error::LowerDimensional)?;
        let mut maps = Vec::new();
        for j in 0..n {
            for forward in [true, false] {
                let w = |k: usize| if forward { v(j + k) } else { v(j + n * k - k) };
                let f1 = sub(w(1), w(0));
                let f2 = sub(w(n - 1), w(0));
                let mut linear = vec![vec![0i64; 2]; 2];
                let mut integral = true;
                for r in 0..2 {
                    for c in 0..2 {
                        let entry = &f1[r] * &basis_inv[0][c] + &f2[r] * &basis_inv[1][c];
                        if entry.is_integer() {
                            linear[r][c] = entry.to_integer().try_into().unwrap_or(i64::MAX);
                        } else {
                            integral = false;
                        }
                    }
                }
                let det = linear[0][0] as i128 * linear[1][1] as i128 - linear[0][1] as i128 * linear[1][0] as i128;
                if !integral || det.abs() != 1 {
                    continue;
                }
                let mut map = AffineMap { linear, translation: vec![Rational::zero(), Rational::zero()] };
                let moved = map.apply(v(0));
                map.translation = sub(w(0), &moved);
                if (0..n).all(|k| &map.apply(v(k)) == w(k)) {
                    maps.push(map);
                }
            }
        }
        debug_assert!(maps.iter().any(AffineMap::is_identity));
        Ok(maps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(vertices: &[Vec<i64>]) -> usize {
        Polytope::from_int_vertices(2, vertices).unwrap().automorphisms().unwrap().len()
    }

    #[test]
    fn group_orders() {
        // The standard simplex has the full S3 of lattice symmetries.
        assert_eq!(count(&[vec![0, 0], vec![1, 0], vec![0, 1]]), 6);
        assert_eq!(count(&[vec![-1, -1], vec![1, -1], vec![1, 1], vec![-1, 1]]), 8);
        // Rectangle 2 × 1: only the two reflections and the half turn.
        assert_eq!(count(&[vec![0, 0], vec![2, 0], vec![2, 1], vec![0, 1]]), 4);
        assert_eq!(count(&[vec![1, 0], vec![1, 1], vec![0, 1], vec![-1, 0], vec![-1, -1], vec![0, -1]]), 12);
        assert_eq!(count(&[vec![0, 0], vec![3, 0], vec![2, 2], vec![0, 1]]), 1);
    }

    #[test]
    fn maps_preserve_the_vertex_set() {
        let p = Polytope::from_int_vertices(2, &[vec![-1, 0], vec![0, -1], vec![2, -1], vec![-1, 2]]).unwrap();
        let maps = p.automorphisms().unwrap();
        assert_eq!(maps.len(), 2);
        for m in maps {
            for v in p.vertices() {
                assert!(p.vertices().contains(&m.apply(v)));
            }
        }
    }

    #[test]
    fn rational_translations_are_allowed() {
        let p = Polytope::from_f64_vertices(2, &[vec![0.0, 0.0], vec![0.5, 0.0], vec![0.5, 0.5], vec![0.0, 1.0]]).unwrap();
        let maps = p.automorphisms().unwrap();
        // (y1, y2) -> (y1, 1 - y1 - y2) swaps the two short edges at y1 = 1/2.
        let flip = AffineMap { linear: vec![vec![1, 0], vec![-1, -1]], translation: vec![rat(0), rat(1)] };
        assert_eq!(maps.len(), 2);
        assert!(maps.contains(&flip));
    }
}
