//! Convex lattice polytopes and polyhedral moment cones.
//!
//! A [`Polytope`] keeps both representations: vertices and facets
//! `⟨u_F, y⟩ + λ_F ≥ 0` with primitive inward normals `u_F`. All
//! incidence and validation decisions are made in exact rational
//! arithmetic. Floating-point copies of the vertices and of a cached
//! triangulation feed the quadrature and the solvers.
//!
//! The boundary measure on a facet `F` is the lattice measure
//! `dσ = dA_euclid / |u_F|`, so that `dμ = dσ ∧ d⟨u_F, ·⟩`.

mod cone;
pub mod exact;
mod hull;
mod symmetry;

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

pub use cone::{MomentCone, SimplicialCone};
pub use exact::{Point, Rational};
pub use symmetry::AffineMap;

use crate::error::{Error, Result};
use exact::{
    affine_dim, centroid, det, det_int, dot_int, from_f64, gcd_all, point_to_f64, primitive_direction,
    rat, rank, sub, to_f64,
};

/// A facet inequality `⟨normal, y⟩ + offset ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: Rational,
}

impl Facet {
    pub fn new(normal: Vec<i64>, offset: Rational) -> Self {
        Self { normal, offset }
    }

    pub fn eval(&self, y: &[Rational]) -> Rational {
        dot_int(&self.normal, y) + &self.offset
    }

    pub fn normal_f64(&self) -> Vec<f64> {
        self.normal.iter().map(|&x| x as f64).collect()
    }

    pub fn norm_sq(&self) -> i64 {
        self.normal.iter().map(|x| x * x).sum()
    }
}

/// A simplex with a nonnegative mass.
///
/// Interior pieces carry their Lebesgue volume; boundary pieces carry
/// their lattice (dσ) measure. The order of the simplex is one less
/// than its number of vertices and may be smaller than the ambient
/// dimension.
#[derive(Debug, Clone)]
pub struct Simplex {
    vertices: Vec<Point>,
    weight: Rational,
    points: Vec<Vec<f64>>,
    weight_f64: f64,
}

impl Simplex {
    /// Builds a simplex, checking affine independence and `weight > 0`.
    pub fn new(vertices: Vec<Point>, weight: Rational) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::LowerDimensional);
        }
        let ambient = vertices[0].len();
        for (i, v) in vertices.iter().enumerate() {
            if v.len() != ambient {
                return Err(Error::DimensionMismatch {
                    index: i,
                    expected: ambient,
                    got: v.len(),
                });
            }
        }
        let refs: Vec<&Point> = vertices.iter().collect();
        if affine_dim(&refs) != Some(vertices.len() - 1) || !weight.is_positive() {
            return Err(Error::LowerDimensional);
        }
        Ok(Self::new_unchecked(vertices, weight))
    }

    /// Builds a simplex from double-precision data (converted exactly).
    pub fn from_f64(points: &[Vec<f64>], weight: f64) -> Result<Self> {
        let conv = |x: f64| from_f64(x).ok_or(Error::Internal("non-finite coordinate".into()));
        let vertices = points
            .iter()
            .map(|p| p.iter().map(|&x| conv(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(vertices, conv(weight)?)
    }

    /// Full-dimensional simplex weighted by its Lebesgue volume.
    pub fn with_volume(vertices: Vec<Point>) -> Result<Self> {
        let weight = simplex_volume(&vertices);
        Self::new(vertices, weight)
    }

    fn new_unchecked(vertices: Vec<Point>, weight: Rational) -> Self {
        let points = vertices.iter().map(|p| point_to_f64(p)).collect();
        let weight_f64 = to_f64(&weight);
        Self {
            vertices,
            weight,
            points,
            weight_f64,
        }
    }

    /// Simplex order `r` (number of vertices minus one).
    pub fn order(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weight_f64(&self) -> f64 {
        self.weight_f64
    }
}

fn factorial(n: usize) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * rat(k))
}

/// Lebesgue volume of a full-dimensional simplex.
fn simplex_volume(vertices: &[Point]) -> Rational {
    let rows: Vec<Point> = vertices[1..].iter().map(|v| sub(v, &vertices[0])).collect();
    det(&rows).abs() / factorial(rows.len())
}

/// Lattice measure of an (m−1)-simplex lying in a facet with primitive normal `u`.
fn lattice_facet_volume(vertices: &[Point], normal: &[i64]) -> Rational {
    let m = normal.len();
    let mut rows: Vec<Point> = vertices[1..].iter().map(|v| sub(v, &vertices[0])).collect();
    rows.push(normal.iter().map(|&x| rat(x)).collect());
    let norm_sq: i64 = normal.iter().map(|x| x * x).sum();
    det(&rows).abs() / (factorial(m - 1) * rat(norm_sq))
}

/// Convex lattice polytope with consistent V- and H-representations.
#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    name: Option<String>,
    vertices: Vec<Point>,
    facets: Vec<Facet>,
    incidence: Vec<Vec<usize>>,
    vertices_f64: Vec<Vec<f64>>,
    interior: Vec<Simplex>,
    boundary: Vec<Simplex>,
}

/// Per-vertex outcome of the Delzant (smoothness) check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexCheck {
    pub vertex: usize,
    pub facets: Vec<usize>,
    pub simple: bool,
    /// Determinant of the saturating normals; absent at non-simple vertices.
    pub determinant: Option<String>,
    pub unimodular: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelzantReport {
    pub is_delzant: bool,
    pub vertices: Vec<VertexCheck>,
    pub offending: Vec<usize>,
}

impl Polytope {
    /// Builds a polytope from vertices and, optionally, facets and incidence.
    ///
    /// In dimensions 1 and 2 the facets may be omitted and are computed
    /// from the convex hull; the vertex list is then replaced by the
    /// hull's extreme points in counter-clockwise order. In higher
    /// dimensions facets must be supplied; incidence is recomputed by
    /// saturation and, when supplied, compared against it.
    pub fn build(
        dim: usize,
        vertices: Vec<Point>,
        facets: Option<Vec<Facet>>,
        incidence: Option<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    index: i,
                    expected: dim,
                    got: v.len(),
                });
            }
        }
        let (vertices, facets) = match facets {
            Some(f) => (vertices, f),
            None => match dim {
                1 => hull::hull_1d(&vertices)?,
                2 => hull::hull_2d(&vertices)?,
                _ => return Err(Error::MissingFacets { dim }),
            },
        };
        for (k, f) in facets.iter().enumerate() {
            if f.normal.len() != dim {
                return Err(Error::DimensionMismatch {
                    index: k,
                    expected: dim,
                    got: f.normal.len(),
                });
            }
            let g = gcd_all(&f.normal);
            if g == 0 {
                return Err(Error::NonIntegerNormal { facet: k });
            }
            if g != 1 {
                return Err(Error::NonPrimitiveNormal { facet: k, gcd: g });
            }
        }
        let refs: Vec<&Point> = vertices.iter().collect();
        if vertices.len() <= dim || affine_dim(&refs) != Some(dim) {
            return Err(Error::LowerDimensional);
        }

        let mut computed: Vec<Vec<usize>> = vec![Vec::new(); facets.len()];
        for (vi, v) in vertices.iter().enumerate() {
            for (fi, f) in facets.iter().enumerate() {
                let value = f.eval(v);
                if value.is_negative() {
                    return Err(Error::VertexViolatesFacet { vertex: vi, facet: fi });
                }
                if value.is_zero() {
                    computed[fi].push(vi);
                }
            }
        }
        if let Some(given) = incidence {
            if given.len() != facets.len() {
                return Err(Error::IncidenceMismatch {
                    facet: given.len().min(facets.len()),
                });
            }
            for (fi, (g, c)) in given.iter().zip(&computed).enumerate() {
                let g: BTreeSet<usize> = g.iter().copied().collect();
                let c: BTreeSet<usize> = c.iter().copied().collect();
                if g != c {
                    return Err(Error::IncidenceMismatch { facet: fi });
                }
            }
        }
        for (fi, inc) in computed.iter().enumerate() {
            let pts: Vec<&Point> = inc.iter().map(|&i| &vertices[i]).collect();
            if affine_dim(&pts) != Some(dim - 1) {
                return Err(Error::DegenerateFacet { facet: fi });
            }
        }
        for vi in 0..vertices.len() {
            let normals: Vec<Point> = computed
                .iter()
                .enumerate()
                .filter(|(_, inc)| inc.contains(&vi))
                .map(|(fi, _)| facets[fi].normal.iter().map(|&x| rat(x)).collect())
                .collect();
            if rank(&normals) < dim {
                return Err(Error::NotAVertex { vertex: vi });
            }
        }
        let mut poly = Self {
            dim,
            name: None,
            vertices_f64: vertices.iter().map(|v| point_to_f64(v)).collect(),
            vertices,
            facets,
            incidence: computed,
            interior: Vec::new(),
            boundary: Vec::new(),
        };
        poly.interior = poly.compute_triangulation();
        poly.boundary = poly.compute_boundary_pieces();
        if !poly.boundary_closes() {
            return Err(Error::Unbounded);
        }
        Ok(poly)
    }

    /// Convenience constructor from integer vertices (facets computed; dim ≤ 2).
    pub fn from_int_vertices(dim: usize, vertices: &[Vec<i64>]) -> Result<Self> {
        let verts = vertices
            .iter()
            .map(|v| v.iter().map(|&x| rat(x)).collect())
            .collect();
        Self::build(dim, verts, None, None)
    }

    /// Convenience constructor from double vertices, converted exactly.
    pub fn from_f64_vertices(dim: usize, vertices: &[Vec<f64>]) -> Result<Self> {
        let verts = vertices
            .iter()
            .map(|v| {
                v.iter()
                    .map(|&x| from_f64(x).ok_or(Error::Internal("non-finite coordinate".into())))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::build(dim, verts, None, None)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertices_f64(&self) -> &[Vec<f64>] {
        &self.vertices_f64
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn incidence(&self) -> &[Vec<usize>] {
        &self.incidence
    }

    /// Centroid-fan triangulation; weights are Lebesgue volumes.
    pub fn triangulate(&self) -> &[Simplex] {
        &self.interior
    }

    /// Triangulation of the boundary; weights are lattice (dσ) measures.
    pub fn boundary_pieces(&self) -> &[Simplex] {
        &self.boundary
    }

    pub fn volume(&self) -> Rational {
        self.interior
            .iter()
            .fold(Rational::zero(), |acc, s| acc + s.weight())
    }

    pub fn boundary_measure(&self) -> Rational {
        self.boundary
            .iter()
            .fold(Rational::zero(), |acc, s| acc + s.weight())
    }

    /// Ok when the origin lies strictly inside; otherwise the first facet
    /// whose offset is not positive.
    pub fn check_origin_interior(&self) -> Result<()> {
        match self.facets.iter().position(|f| !f.offset.is_positive()) {
            None => Ok(()),
            Some(k) => Err(Error::NotProper {
                facet: k,
                offset: self.facets[k].offset.to_string(),
            }),
        }
    }

    /// Whether the facet normals at every vertex form a lattice basis.
    pub fn validate_delzant(&self) -> DelzantReport {
        let mut checks = Vec::with_capacity(self.vertices.len());
        let mut offending = Vec::new();
        for vi in 0..self.vertices.len() {
            let facets: Vec<usize> = (0..self.facets.len())
                .filter(|&fi| self.incidence[fi].contains(&vi))
                .collect();
            let simple = facets.len() == self.dim;
            let (determinant, unimodular) = if simple {
                let rows: Vec<Vec<i64>> = facets.iter().map(|&fi| self.facets[fi].normal.clone()).collect();
                let d = det_int(&rows);
                let unimodular = d.abs().is_one();
                (Some(d.to_string()), unimodular)
            } else {
                (None, false)
            };
            if !unimodular {
                offending.push(vi);
            }
            checks.push(VertexCheck {
                vertex: vi,
                facets,
                simple,
                determinant,
                unimodular,
            });
        }
        DelzantReport {
            is_delzant: offending.is_empty(),
            vertices: checks,
            offending,
        }
    }

    /// Integer vertices and every facet at lattice distance one from the origin.
    pub fn validate_reflexive(&self) -> bool {
        self.vertices.iter().all(|v| exact::is_integral(v))
            && self.facets.iter().all(|f| f.offset.is_one())
    }

    /// Image under `y ↦ A y + t`, with facets transformed by `A^{-T}`.
    pub fn transform(&self, a: &[Vec<i64>], t: &[Rational]) -> Result<Self> {
        let m = self.dim;
        if a.len() != m || a.iter().any(|r| r.len() != m) || t.len() != m {
            return Err(Error::DimensionMismatch {
                index: 0,
                expected: m,
                got: a.len(),
            });
        }
        let a_rat: Vec<Point> = a.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
        let inv = exact::inverse(&a_rat).ok_or(Error::LowerDimensional)?;
        let vertices: Vec<Point> = self
            .vertices
            .iter()
            .map(|v| {
                (0..m)
                    .map(|i| exact::dot(&a_rat[i], v) + &t[i])
                    .collect()
            })
            .collect();
        let mut facets = Vec::with_capacity(self.facets.len());
        for (k, f) in self.facets.iter().enumerate() {
            // u' = A^{-T} u, λ' = λ − ⟨u', t⟩, then rescaled to a primitive normal.
            let u: Point = (0..m)
                .map(|j| {
                    (0..m).fold(Rational::zero(), |acc, i| acc + &inv[i][j] * rat(f.normal[i]))
                })
                .collect();
            let prim = primitive_direction(&u).ok_or(Error::NonIntegerNormal { facet: k })?;
            let idx = prim.iter().position(|&x| x != 0).unwrap_or(0);
            let scale = rat(prim[idx]) / &u[idx];
            let offset = (&f.offset - exact::dot(&u, t)) * scale;
            facets.push(Facet::new(prim, offset));
        }
        let mut out = Self::build(m, vertices, Some(facets), Some(self.incidence.clone()))?;
        out.name = self.name.clone();
        Ok(out)
    }

    /// Lattice Minkowski relation `Σ_F σ(F) u_F = 0`. Together with the
    /// vertex-rank check it rejects facet lists that leave the H-region
    /// unbounded or larger than the hull of the vertices.
    fn boundary_closes(&self) -> bool {
        let mut total = vec![Rational::zero(); self.dim];
        let mut per_facet = vec![Rational::zero(); self.facets.len()];
        for (fi, inc) in self.incidence.iter().enumerate() {
            for pts in self.face_fan(inc, self.dim - 1) {
                per_facet[fi] += lattice_facet_volume(&pts, &self.facets[fi].normal);
            }
        }
        for (f, mass) in self.facets.iter().zip(&per_facet) {
            for (t, &u) in total.iter_mut().zip(&f.normal) {
                *t += mass * rat(u);
            }
        }
        total.iter().all(Zero::is_zero)
    }

    fn compute_triangulation(&self) -> Vec<Simplex> {
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        self.face_fan(&all, self.dim)
            .into_iter()
            .filter_map(|pts| {
                let w = simplex_volume(&pts);
                w.is_positive().then(|| Simplex::new_unchecked(pts, w))
            })
            .collect()
    }

    fn compute_boundary_pieces(&self) -> Vec<Simplex> {
        let mut out = Vec::new();
        for (fi, inc) in self.incidence.iter().enumerate() {
            for pts in self.face_fan(inc, self.dim - 1) {
                let w = lattice_facet_volume(&pts, &self.facets[fi].normal);
                if w.is_positive() {
                    out.push(Simplex::new_unchecked(pts, w));
                }
            }
        }
        out
    }

    /// Triangulates the face spanned by `face` (of dimension `k`) by coning
    /// its vertex centroid over a triangulation of each of its facets.
    fn face_fan(&self, face: &[usize], k: usize) -> Vec<Vec<Point>> {
        if k == 0 {
            return vec![vec![self.vertices[face[0]].clone()]];
        }
        let pts: Vec<&Point> = face.iter().map(|&i| &self.vertices[i]).collect();
        if pts.len() == k + 1 {
            return vec![pts.into_iter().cloned().collect()];
        }
        let apex = centroid(&pts);
        let mut subfaces: Vec<Vec<usize>> = Vec::new();
        for inc in &self.incidence {
            let sub: Vec<usize> = face.iter().copied().filter(|i| inc.contains(i)).collect();
            if sub.is_empty() || subfaces.contains(&sub) {
                continue;
            }
            let sub_pts: Vec<&Point> = sub.iter().map(|&i| &self.vertices[i]).collect();
            if affine_dim(&sub_pts) == Some(k - 1) {
                subfaces.push(sub);
            }
        }
        let mut out = Vec::new();
        for sub in subfaces {
            for mut simplex in self.face_fan(&sub, k - 1) {
                simplex.insert(0, apex.clone());
                out.push(simplex);
            }
        }
        out
    }
}
