//! Reeb volume: closed forms, derivative identities and the minimizer.

use cvl_core::linalg::{dot, norm, sym_eigenvalues, matrix};
use cvl_core::polytope::MomentCone;
use cvl_core::sasaki::{
    minimize_reeb_volume, minimize_reeb_volume_from, reeb_volume, reeb_volume_gradient, reeb_volume_hessian,
    sasaki_futaki, DEFAULT_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn conifold() -> MomentCone {
    MomentCone::new(vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 1, 1], vec![1, 0, 1]]).unwrap()
}

/// Cone over the hexagon (the del Pezzo surface of degree six).
fn hexagon() -> MomentCone {
    MomentCone::new(vec![
        vec![1, 1, 0],
        vec![1, 1, 1],
        vec![1, 0, 1],
        vec![1, -1, 0],
        vec![1, -1, -1],
        vec![1, 0, -1],
    ])
    .unwrap()
}

/// Cone over a lopsided pentagon with no lattice symmetry.
fn pentagon() -> MomentCone {
    MomentCone::new(vec![vec![1, 0, 0], vec![1, 2, 0], vec![1, 2, 1], vec![1, 1, 2], vec![1, 0, 1]]).unwrap()
}

fn cones() -> Vec<MomentCone> {
    vec![conifold(), hexagon(), pentagon()]
}

fn random_slice_point(cone: &MomentCone, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = cone.dim() as f64;
    loop {
        let xi = vec![n, rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)];
        if cone.pairings(&xi).iter().all(|&s| s > 0.05) {
            return xi;
        }
    }
}

#[test]
fn homogeneity_and_euler_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for cone in cones() {
        for _ in 0..30 {
            let xi = random_slice_point(&cone, &mut rng);
            let v = reeb_volume(&cone, &xi).unwrap();
            for t in [0.5, 2.0] {
                let xs: Vec<f64> = xi.iter().map(|c| c * t).collect();
                let vs = reeb_volume(&cone, &xs).unwrap();
                assert!((vs - t.powi(-3) * v).abs() < 1e-13 * vs);
            }
            let g = reeb_volume_gradient(&cone, &xi).unwrap();
            assert!((dot(&g, &xi) + 3.0 * v).abs() < 1e-10 * v);
        }
    }
}

#[test]
fn derivatives_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for cone in cones() {
        for _ in 0..30 {
            let xi = random_slice_point(&cone, &mut rng);
            let g = reeb_volume_gradient(&cone, &xi).unwrap();
            let h = reeb_volume_hessian(&cone, &xi).unwrap();
            let step = 1e-6 * norm(&xi);
            for i in 0..3 {
                let (mut xp, mut xm) = (xi.clone(), xi.clone());
                xp[i] += step;
                xm[i] -= step;
                let fd = (reeb_volume(&cone, &xp).unwrap() - reeb_volume(&cone, &xm).unwrap()) / (2.0 * step);
                assert!((fd - g[i]).abs() < 1e-7 * norm(&g), "{fd} vs {}", g[i]);
                let gp = reeb_volume_gradient(&cone, &xp).unwrap();
                let gm = reeb_volume_gradient(&cone, &xm).unwrap();
                let hn = matrix(&h).norm();
                for j in 0..3 {
                    let fd = (gp[j] - gm[j]) / (2.0 * step);
                    assert!((fd - h[i][j]).abs() < 1e-7 * hn);
                }
            }
        }
    }
}

#[test]
fn slice_hessian_is_positive_definite() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cone = conifold();
    for _ in 0..100 {
        let xi = random_slice_point(&cone, &mut rng);
        let h = reeb_volume_hessian(&cone, &xi).unwrap();
        let slice = matrix(&[vec![h[1][1], h[1][2]], vec![h[2][1], h[2][2]]]);
        assert!(sym_eigenvalues(&slice)[0] > 0.0);
    }
}

#[test]
fn decomposition_does_not_matter() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for cone in cones() {
        let n = cone.dual_rays().len();
        for apex in 1..n {
            let other = cone.clone().with_decomposition(cone.decomposition_from(apex).unwrap());
            for _ in 0..10 {
                let xi = random_slice_point(&cone, &mut rng);
                let a = reeb_volume(&cone, &xi).unwrap();
                let b = reeb_volume(&other, &xi).unwrap();
                assert!((a - b).abs() < 1e-12 * a);
            }
        }
    }
}

/// Largest margin `ε` (halving from 1) at which `Vol(path(ε)) > 1e6`.
fn blowup_margin(cone: &MomentCone, path: impl Fn(f64) -> [f64; 3]) -> Option<f64> {
    let mut margin = 1.0f64;
    while margin > 1e-12 {
        if reeb_volume(cone, &path(margin)).unwrap() > 1e6 {
            return Some(margin);
        }
        margin *= 0.5;
    }
    None
}

#[test]
fn volume_blows_up_at_the_boundary() {
    let cone = conifold();
    // Towards a corner of the slice polygon two pairings vanish together,
    // so Vol grows like ε⁻².
    let corner = blowup_margin(&cone, |e| [3.0, e, e]).unwrap();
    assert!(corner >= 1e-6, "corner margin {corner}");
    // Towards the middle of an edge only one pairing vanishes and Vol
    // grows like ε⁻¹ with Vol·ε → 3/(1.5·1.5·3) = 4/9.
    for e in [1e-4, 1e-6, 1e-8] {
        let v = reeb_volume(&cone, &[3.0, e, 1.5]).unwrap();
        assert!((v * e - 4.0 / 9.0).abs() < 1e-3, "{}", v * e);
    }
    assert!(blowup_margin(&cone, |e| [3.0, e, 1.5]).is_some());
}

#[test]
fn multistart_agrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for cone in cones() {
        let reference = minimize_reeb_volume(&cone, DEFAULT_TOL).unwrap();
        for _ in 0..10 {
            let start = random_slice_point(&cone, &mut rng);
            let r = minimize_reeb_volume_from(&cone, &start, DEFAULT_TOL).unwrap();
            let d: Vec<f64> = r.xi_star.xi.iter().zip(&reference.xi_star.xi).map(|(a, b)| a - b).collect();
            assert!(norm(&d) < 1e-8);
            assert!(r.hessian_min_eigenvalue > 0.0);
        }
        for dir in [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
            let fut = sasaki_futaki(&cone, &reference.xi_star.xi, &dir).unwrap();
            assert!(fut.abs() < 1e-9 * reference.volume);
        }
    }
}

#[test]
fn hexagon_minimum_is_the_centre() {
    // The hexagon is centrally symmetric, so ξ* = (3, 0, 0).
    let r = minimize_reeb_volume(&hexagon(), DEFAULT_TOL).unwrap();
    assert!(r.xi_star.xi[1].abs() < 1e-10 && r.xi_star.xi[2].abs() < 1e-10);
}

#[test]
fn lattice_automorphisms_move_the_minimizer() {
    // Automorphisms fixing the first coordinate: (1, w) ↦ (1, B w + b).
    let cone = pentagon();
    let base = minimize_reeb_volume(&cone, DEFAULT_TOL).unwrap().xi_star.xi;
    let maps: [[[i64; 3]; 3]; 3] = [
        [[1, 0, 0], [1, 1, 1], [0, 0, 1]],
        [[1, 0, 0], [0, 0, 1], [-2, 1, 0]],
        [[1, 0, 0], [3, -1, 0], [-1, 1, 1]],
    ];
    for a in maps {
        let rays: Vec<Vec<i64>> = cone
            .fan_rays()
            .iter()
            .map(|v| (0..3).map(|i| (0..3).map(|j| a[i][j] * v[j]).sum()).collect())
            .collect();
        let moved = MomentCone::new(rays).unwrap();
        let xi = minimize_reeb_volume(&moved, DEFAULT_TOL).unwrap().xi_star.xi;
        for i in 0..3 {
            let expected: f64 = (0..3).map(|j| a[i][j] as f64 * base[j]).sum();
            assert!((xi[i] - expected).abs() < 1e-8, "{a:?}: {xi:?}");
        }
    }
}

#[test]
fn conifold_futaki_is_antisymmetric_under_swap() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cone = conifold();
    for _ in 0..50 {
        let xi = random_slice_point(&cone, &mut rng);
        let swapped = [xi[0], xi[2], xi[1]];
        let a = sasaki_futaki(&cone, &xi, &[0.0, 1.0, -1.0]).unwrap();
        let b = sasaki_futaki(&cone, &swapped, &[0.0, 1.0, -1.0]).unwrap();
        assert!((a + b).abs() < 1e-12 * (1.0 + a.abs()));
    }
}

#[test]
fn four_dimensional_cone_with_supplied_dual_data() {
    let cone = MomentCone::with_dual_data(
        vec![vec![1, 0, 0, 0], vec![1, 1, 0, 0], vec![1, 0, 1, 0], vec![1, 0, 0, 1]],
        vec![vec![1, -1, -1, -1], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
        vec![vec![0, 1, 2, 3]],
    )
    .unwrap();
    let r = minimize_reeb_volume(&cone, DEFAULT_TOL).unwrap();
    for c in &r.xi_star.xi[1..] {
        assert!((c - 1.0).abs() < 1e-10);
    }
    assert!((r.volume - 1.0).abs() < 1e-12);
}
