//! Gorenstein toric cones: fan rays `(1, w_a)` and the dual moment cone.

use serde::Serialize;

use super::exact::{det_int, gcd_all, rat, rank};
use crate::error::{Error, Result};

/// A simplicial subcone of the moment cone, given by indices into the
/// dual rays and the absolute determinant of its generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimplicialCone {
    pub rays: Vec<usize>,
    pub det: i64,
}

/// Cone over a toric diagram together with its dual (moment) cone
/// `C* = {y : ⟨y, v_a⟩ ≥ 0}` and a simplicial decomposition of `C*`.
#[derive(Debug, Clone, Serialize)]
pub struct MomentCone {
    dim: usize,
    fan_rays: Vec<Vec<i64>>,
    dual_rays: Vec<Vec<i64>>,
    decomposition: Vec<SimplicialCone>,
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cross3(a: &[i64], b: &[i64]) -> Vec<i64> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn abs_det(rows: &[Vec<i64>]) -> Result<i64> {
    use num_traits::{Signed, ToPrimitive};
    det_int(rows)
        .abs()
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::InvalidCone("determinant overflows i64".into()))
}

fn check_fan_rays(fan_rays: &[Vec<i64>]) -> Result<usize> {
    let dim = fan_rays.first().map(Vec::len).unwrap_or(0);
    if dim < 2 {
        return Err(Error::InvalidCone("need at least two coordinates".into()));
    }
    if fan_rays.len() < dim {
        return Err(Error::InvalidCone(format!(
            "{} rays cannot span a {dim}-dimensional cone",
            fan_rays.len()
        )));
    }
    for (i, v) in fan_rays.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                index: i,
                expected: dim,
                got: v.len(),
            });
        }
        if v[0] != 1 {
            return Err(Error::InvalidCone(format!(
                "fan ray {i} has first coordinate {}, expected 1",
                v[0]
            )));
        }
    }
    let rows: Vec<Vec<_>> = fan_rays
        .iter()
        .map(|v| v.iter().map(|&x| rat(x)).collect())
        .collect();
    if rank(&rows) < dim {
        return Err(Error::InvalidCone("fan rays do not span a full-dimensional cone".into()));
    }
    Ok(dim)
}

impl MomentCone {
    /// Builds the cone from fan rays listed in cyclic order around a
    /// convex lattice polygon (ambient dimension 3). Dual rays are the
    /// inward cross products of adjacent fan rays; the dual cone is
    /// decomposed by fanning from the first dual ray.
    pub fn new(fan_rays: Vec<Vec<i64>>) -> Result<Self> {
        let dim = check_fan_rays(&fan_rays)?;
        if dim != 3 {
            return Err(Error::InvalidCone(format!(
                "automatic dual rays need ambient dimension 3 (got {dim}); supply dual rays and a decomposition"
            )));
        }
        let n = fan_rays.len();
        let mut orientation = 0i64;
        for a in 0..n {
            let p = &fan_rays[a];
            let q = &fan_rays[(a + 1) % n];
            let r = &fan_rays[(a + 2) % n];
            let turn = (q[1] - p[1]) * (r[2] - q[2]) - (q[2] - p[2]) * (r[1] - q[1]);
            if turn == 0 {
                return Err(Error::InvalidCone(format!(
                    "fan ray {} is not a vertex of the toric diagram",
                    (a + 1) % n
                )));
            }
            if orientation == 0 {
                orientation = turn.signum();
            } else if turn.signum() != orientation {
                return Err(Error::InvalidCone(
                    "toric diagram is not convex or rays are not in cyclic order".into(),
                ));
            }
        }
        // Winding number one: the edge directions turn through exactly 2π.
        let mut angle = 0.0f64;
        for a in 0..n {
            let p = &fan_rays[a];
            let q = &fan_rays[(a + 1) % n];
            let r = &fan_rays[(a + 2) % n];
            let e1 = ((q[1] - p[1]) as f64, (q[2] - p[2]) as f64);
            let e2 = ((r[1] - q[1]) as f64, (r[2] - q[2]) as f64);
            angle += (e1.0 * e2.1 - e1.1 * e2.0).atan2(e1.0 * e2.0 + e1.1 * e2.1);
        }
        if (angle.abs() - std::f64::consts::TAU).abs() > 1e-6 {
            return Err(Error::InvalidCone("toric diagram winds more than once".into()));
        }

        let mut dual_rays = Vec::with_capacity(n);
        for a in 0..n {
            let mut u = cross3(&fan_rays[a], &fan_rays[(a + 1) % n]);
            let g = gcd_all(&u);
            u.iter_mut().for_each(|x| *x /= g);
            if fan_rays.iter().any(|v| dot(&u, v) < 0) {
                u.iter_mut().for_each(|x| *x = -*x);
            }
            debug_assert!(fan_rays.iter().all(|v| dot(&u, v) >= 0));
            dual_rays.push(u);
        }
        let mut cone = Self {
            dim,
            fan_rays,
            dual_rays,
            decomposition: Vec::new(),
        };
        cone.decomposition = cone.decomposition_from(0)?;
        Ok(cone)
    }

    /// Builds a cone of any dimension from user-supplied dual rays and a
    /// simplicial decomposition of the moment cone (indices into `dual_rays`).
    pub fn with_dual_data(
        fan_rays: Vec<Vec<i64>>,
        dual_rays: Vec<Vec<i64>>,
        decomposition: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let dim = check_fan_rays(&fan_rays)?;
        for (k, u) in dual_rays.iter().enumerate() {
            if u.len() != dim {
                return Err(Error::DimensionMismatch {
                    index: k,
                    expected: dim,
                    got: u.len(),
                });
            }
            if gcd_all(u) != 1 {
                return Err(Error::InvalidCone(format!("dual ray {k} is not primitive")));
            }
            if let Some(a) = fan_rays.iter().position(|v| dot(u, v) < 0) {
                return Err(Error::InvalidCone(format!(
                    "dual ray {k} pairs negatively with fan ray {a}"
                )));
            }
            let saturated: Vec<Vec<_>> = fan_rays
                .iter()
                .filter(|v| dot(u, v) == 0)
                .map(|v| v.iter().map(|&x| rat(x)).collect())
                .collect();
            if rank(&saturated) != dim - 1 {
                return Err(Error::InvalidCone(format!("dual ray {k} is not an extreme ray")));
            }
        }
        let mut cells = Vec::with_capacity(decomposition.len());
        for (k, idx) in decomposition.into_iter().enumerate() {
            if idx.len() != dim || idx.iter().any(|&i| i >= dual_rays.len()) {
                return Err(Error::InvalidCone(format!("decomposition cell {k} is malformed")));
            }
            let rows: Vec<Vec<i64>> = idx.iter().map(|&i| dual_rays[i].clone()).collect();
            let det = abs_det(&rows)?;
            if det == 0 {
                return Err(Error::InvalidCone(format!("decomposition cell {k} is degenerate")));
            }
            cells.push(SimplicialCone { rays: idx, det });
        }
        if cells.is_empty() {
            return Err(Error::InvalidCone("empty decomposition".into()));
        }
        Ok(Self {
            dim,
            fan_rays,
            dual_rays,
            decomposition: cells,
        })
    }

    /// Fan decomposition of a three-dimensional moment cone from dual ray `apex`.
    pub fn decomposition_from(&self, apex: usize) -> Result<Vec<SimplicialCone>> {
        let n = self.dual_rays.len();
        if self.dim != 3 || apex >= n {
            return Err(Error::InvalidCone("fan decomposition needs a 3-dimensional cone".into()));
        }
        let mut cells = Vec::with_capacity(n - 2);
        for k in 1..n - 1 {
            let i = (apex + k) % n;
            let j = (apex + k + 1) % n;
            let rows = vec![
                self.dual_rays[apex].clone(),
                self.dual_rays[i].clone(),
                self.dual_rays[j].clone(),
            ];
            cells.push(SimplicialCone {
                rays: vec![apex, i, j],
                det: abs_det(&rows)?,
            });
        }
        Ok(cells)
    }

    /// Ambient dimension `m + 1`; also the charge fixed on the Reeb slice.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fan_rays(&self) -> &[Vec<i64>] {
        &self.fan_rays
    }

    pub fn dual_rays(&self) -> &[Vec<i64>] {
        &self.dual_rays
    }

    pub fn decomposition(&self) -> &[SimplicialCone] {
        &self.decomposition
    }

    /// Replaces the decomposition, e.g. with [`Self::decomposition_from`].
    pub fn with_decomposition(mut self, cells: Vec<SimplicialCone>) -> Self {
        self.decomposition = cells;
        self
    }

    /// `⟨u_ρ, ξ⟩` for every dual ray.
    pub fn pairings(&self, xi: &[f64]) -> Vec<f64> {
        self.dual_rays
            .iter()
            .map(|u| u.iter().zip(xi).map(|(&a, b)| a as f64 * b).sum())
            .collect()
    }

    /// Ok iff `ξ` pairs strictly positively with every dual ray.
    pub fn check_interior(&self, xi: &[f64]) -> Result<()> {
        if xi.len() != self.dim {
            return Err(Error::DimensionMismatch {
                index: 0,
                expected: self.dim,
                got: xi.len(),
            });
        }
        match self
            .pairings(xi)
            .into_iter()
            .enumerate()
            .find(|(_, v)| !(*v > 0.0))
        {
            None => Ok(()),
            Some((ray, value)) => Err(Error::OutsideReebCone { ray, value }),
        }
    }

    /// Slice point `(m+1) · mean(v_a)`, strictly inside the Reeb cone.
    pub fn slice_center(&self) -> Vec<f64> {
        let n = self.fan_rays.len() as f64;
        let scale = self.dim as f64;
        (0..self.dim)
            .map(|k| scale * self.fan_rays.iter().map(|v| v[k] as f64).sum::<f64>() / n)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_space_cone() {
        let c = MomentCone::new(vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 0, 1]]).unwrap();
        assert_eq!(c.dual_rays(), &[vec![0, 0, 1], vec![1, -1, -1], vec![0, 1, 0]]);
        assert_eq!(c.decomposition(), &[SimplicialCone { rays: vec![0, 1, 2], det: 1 }]);
    }

    #[test]
    fn conifold_cone() {
        let c = MomentCone::new(vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 1, 1], vec![1, 0, 1]]).unwrap();
        assert_eq!(
            c.dual_rays(),
            &[vec![0, 0, 1], vec![1, -1, 0], vec![1, 0, -1], vec![0, 1, 0]]
        );
        let dets: Vec<i64> = c.decomposition().iter().map(|s| s.det).collect();
        assert_eq!(dets, vec![1, 1]);
        for u in c.dual_rays() {
            for v in c.fan_rays() {
                assert!(dot(u, v) >= 0);
            }
        }
    }

    #[test]
    fn clockwise_diagram_is_accepted() {
        let c = MomentCone::new(vec![vec![1, 0, 0], vec![1, 0, 1], vec![1, 1, 0]]).unwrap();
        assert_eq!(c.dual_rays().len(), 3);
        assert!(c.check_interior(&[3.0, 1.0, 1.0]).is_ok());
    }

    #[test]
    fn rejects_bad_rays() {
        assert!(matches!(
            MomentCone::new(vec![vec![2, 0, 0], vec![1, 1, 0], vec![1, 0, 1]]),
            Err(Error::InvalidCone(_))
        ));
        // Square diagram listed out of cyclic order.
        assert!(matches!(
            MomentCone::new(vec![vec![1, 0, 0], vec![1, 1, 1], vec![1, 1, 0], vec![1, 0, 1]]),
            Err(Error::InvalidCone(_))
        ));
        // Collinear middle ray.
        assert!(matches!(
            MomentCone::new(vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 2, 0], vec![1, 0, 1]]),
            Err(Error::InvalidCone(_))
        ));
    }

    #[test]
    fn interior_test_uses_dual_rays() {
        let c = MomentCone::new(vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 1, 1], vec![1, 0, 1]]).unwrap();
        assert!(c.check_interior(&[3.0, 1.5, 1.5]).is_ok());
        assert!(matches!(
            c.check_interior(&[3.0, 3.0, 1.0]),
            Err(Error::OutsideReebCone { ray: 1, .. })
        ));
        assert_eq!(c.slice_center(), vec![3.0, 1.5, 1.5]);
    }

    #[test]
    fn user_supplied_dual_data() {
        // C^4 as a Gorenstein cone: fan rays (1,0,0,0),(1,1,0,0),(1,0,1,0),(1,0,0,1).
        let fan = vec![vec![1, 0, 0, 0], vec![1, 1, 0, 0], vec![1, 0, 1, 0], vec![1, 0, 0, 1]];
        let dual = vec![vec![1, -1, -1, -1], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]];
        let c = MomentCone::with_dual_data(fan.clone(), dual.clone(), vec![vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(c.decomposition()[0].det, 1);
        let mut bad = dual;
        bad[1] = vec![0, 2, 0, 0];
        assert!(MomentCone::with_dual_data(fan, bad, vec![vec![0, 1, 2, 3]]).is_err());
    }
}
