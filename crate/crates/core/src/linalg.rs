//! Small dense linear-algebra helpers on top of nalgebra.

use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::{Error, Result};

/// Number of singular values above `tol * sigma_max * max(rows, cols)`.
pub fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.iter().copied().fold(0.0_f64, f64::max);
    if smax == 0.0 || !smax.is_finite() {
        return 0;
    }
    let cutoff = tol * smax * m.nrows().max(m.ncols()) as f64;
    sv.iter().filter(|&&s| s > cutoff).count()
}

/// Rank of the submatrix formed by `rows` (in the given order).
pub fn rank_of_rows(m: &DMatrix<f64>, rows: &[usize], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    numerical_rank(&m.select_rows(rows.iter()), tol)
}

/// Copy of `m` with every nonzero row scaled to unit Euclidean norm.
pub fn unit_rows(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for mut row in out.row_iter_mut() {
        let n = row.norm();
        if n > 0.0 {
            row /= n;
        }
    }
    out
}

/// Orthonormal basis (as rows) of the row space of `m`, using `rank` leading
/// right singular vectors.
pub fn row_space_basis(m: &DMatrix<f64>, rank: usize) -> DMatrix<f64> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let picked: Vec<usize> = order.into_iter().take(rank).collect();
    v_t.select_rows(picked.iter())
}

/// Polar factor `P (P^t P)^{-1/2}` of a tall full-column-rank matrix.
pub fn polar_factor(p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let svd = p.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0_f64, f64::max);
    let smin = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    if !(smin > 0.0) || smin <= f64::EPSILON * smax * p.nrows() as f64 {
        return Err(Error::RankDeficient);
    }
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    Ok(u * v_t)
}

/// Orthogonal projection onto the column space, `P (P^t P)^{-1} P^t`,
/// computed as `U U^t` from a thin SVD.
pub fn column_projection(p: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    if numerical_rank(p, tol) < p.ncols() {
        return Err(Error::RankDeficient);
    }
    let u = p.clone().svd(true, false).u.expect("u requested");
    Ok(&u * u.transpose())
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}
