//! Small dense helpers over nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub fn matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(n, m, |i, j| rows[i][j])
}

pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = 0.5 * (m + m.transpose());
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Solves the symmetric system `m x = b` through its eigendecomposition,
/// flooring eigenvalues of magnitude below `floor · max|λ|`.
pub fn sym_solve(m: &DMatrix<f64>, b: &DVector<f64>, floor: f64) -> DVector<f64> {
    let sym = 0.5 * (m + m.transpose());
    let eig = SymmetricEigen::new(sym);
    let max = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let cut = floor * max.max(f64::MIN_POSITIVE);
    let coeffs = eig.eigenvectors.transpose() * b;
    let scaled = DVector::from_iterator(
        coeffs.len(),
        coeffs.iter().zip(eig.eigenvalues.iter()).map(|(c, &l)| {
            let l = if l.abs() < cut { cut.copysign(if l == 0.0 { 1.0 } else { l }) } else { l };
            c / l
        }),
    );
    eig.eigenvectors * scaled
}
