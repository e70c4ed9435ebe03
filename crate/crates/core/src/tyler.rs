//! Tyler standardization and the projection-matrix embedding.
//!
//! A Tyler standardized representative `P` has orthonormal columns and every
//! row of squared length `(d+1)/k`. It is unique up to row signs and an
//! orthogonal right factor; passing to `P P^t` removes the orthogonal part, so
//! shapes are compared through their projection matrices with the row signs
//! quotiented out by exhaustive search.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::constraints::{constraint_flats, ConstraintReport};
use crate::linalg::{column_projection, max_abs, polar_factor, rank_of_rows};
use crate::model::Configuration;
use crate::{Error, Options, Result};

pub const DEFAULT_STANDARDIZE_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;
/// Iterations of the plain scheme before the first Newton attempt, and the
/// spacing of later attempts.
const NEWTON_AFTER: usize = 100;
const NEWTON_EVERY: usize = 1_000;
const NEWTON_STEPS: usize = 80;
/// Tolerance used when checking that a matrix is already standardized.
pub const STANDARDIZED_CHECK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct TylerStandardization {
    pub matrix: DMatrix<f64>,
    pub projection: DMatrix<f64>,
    /// `max(column_residual, row_residual)`.
    pub residual: f64,
    /// `max |P^t P - Id|`.
    pub column_residual: f64,
    /// `max_i |P_i P_i^t - (d+1)/k|`.
    pub row_residual: f64,
    pub iterations: usize,
}

impl TylerStandardization {
    pub fn k(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn d(&self) -> usize {
        self.matrix.ncols() - 1
    }
}

fn residuals(p: &DMatrix<f64>, target: f64) -> (f64, f64) {
    let n = p.ncols();
    let col = max_abs(&(p.transpose() * p - DMatrix::identity(n, n)));
    let row = p
        .row_iter()
        .map(|r| (r.norm_squared() - target).abs())
        .fold(0.0_f64, f64::max);
    (col, row)
}

/// Alternates column whitening `P <- P (P^t P)^{-1/2}` with rescaling every
/// row to squared length `(d+1)/k` until both constraints hold within `tol`.
pub fn tyler_standardize(c: &Configuration, tol: f64, max_iter: usize) -> Result<TylerStandardization> {
    let (d, k) = (c.d(), c.k());
    let target = (d + 1) as f64 / k as f64;
    let row_len = libm::sqrt(target);
    let mut p = c.matrix().clone();
    let mut iterations = 0;
    let mut accelerate: Option<bool> = None;
    loop {
        let (col, row) = residuals(&p, target);
        if col <= tol && row <= tol {
            let projection = &p * p.transpose();
            return Ok(TylerStandardization {
                matrix: p,
                projection,
                residual: col.max(row),
                column_residual: col,
                row_residual: row,
                iterations,
            });
        }
        if iterations == max_iter {
            return Err(Error::NotStandardizable {
                residual: col.max(row),
                iterations,
            });
        }
        let due = iterations >= NEWTON_AFTER && (iterations - NEWTON_AFTER).is_multiple_of(NEWTON_EVERY);
        // Newton also makes progress towards the boundary of non-standardizable
        // inputs, so it only runs where a standardization is known to exist.
        if due
            && *accelerate.get_or_insert_with(|| {
                !matches!(is_standardizable(c, &Options::default()), Ok(Standardizability::No) | Err(_))
            })
        {
            if let Some(q) = newton_rescale(&p, target) {
                let (qc, qr) = residuals(&q, target);
                if qc.max(qr) < col.max(row) {
                    p = q;
                    iterations += 1;
                    continue;
                }
            }
        }
        for (i, mut r) in p.row_iter_mut().enumerate() {
            let n = r.norm();
            if !(n > 1e-300) || !n.is_finite() {
                return Err(Error::ZeroRow(i));
            }
            r *= row_len / n;
        }
        p = match polar_factor(&p) {
            Ok(q) => q,
            Err(_) => {
                return Err(Error::NotStandardizable {
                    residual: f64::INFINITY,
                    iterations,
                })
            }
        };
        iterations += 1;
    }
}

/// Row weights `w = exp(t)` with `sum_i w_i u_i u_i^t` whitening to equal
/// leverages, found by damped Newton on the convex potential
/// `log det(sum_i e^{t_i} u_i u_i^t) - c sum_i t_i`. Its stationary points
/// are exactly the fixed points of the alternating scheme.
fn newton_rescale(p: &DMatrix<f64>, c: f64) -> Option<DMatrix<f64>> {
    let (k, n) = p.shape();
    let mut u = p.clone();
    let mut t = vec![0.0; k];
    for (i, mut r) in u.row_iter_mut().enumerate() {
        let norm = r.norm();
        if !(norm > 0.0) {
            return None;
        }
        t[i] = 2.0 * libm::log(norm);
        r /= norm;
    }
    let weighted = |t: &[f64]| {
        let mut x = u.clone();
        for (i, mut r) in x.row_iter_mut().enumerate() {
            r *= libm::exp(0.5 * t[i]);
        }
        x
    };
    let potential = |t: &[f64]| -> Option<f64> {
        let x = weighted(t);
        let chol = (x.transpose() * &x).cholesky()?;
        let logdet: f64 = (0..n).map(|i| 2.0 * libm::log(chol.l_dirty()[(i, i)])).sum();
        Some(logdet - c * t.iter().sum::<f64>())
    };
    for _ in 0..NEWTON_STEPS {
        let x = weighted(&t);
        let minv = (x.transpose() * &x).cholesky()?.inverse();
        let lev_matrix = &x * minv * x.transpose();
        let g: Vec<f64> = (0..k).map(|i| lev_matrix[(i, i)] - c).collect();
        if g.iter().all(|v| v.abs() <= 1e-14) {
            break;
        }
        let mut h = -lev_matrix.component_mul(&lev_matrix);
        for i in 0..k {
            h[(i, i)] += lev_matrix[(i, i)];
        }
        let rhs = DMatrix::from_iterator(k, 1, g.iter().map(|v| -v));
        let svd = h.svd(true, true);
        let smax = svd.singular_values.max();
        let step = svd.solve(&rhs, 1e-12 * smax).ok()?;
        let slope: f64 = g.iter().zip(step.iter()).map(|(a, b)| a * b).sum();
        if !(slope < 0.0) {
            break;
        }
        let f0 = potential(&t)?;
        let mut alpha = 1.0;
        loop {
            let trial: Vec<f64> = t.iter().zip(step.iter()).map(|(a, b)| a + alpha * b).collect();
            if let Some(f) = potential(&trial) {
                if f <= f0 + 1e-4 * alpha * slope {
                    t = trial;
                    break;
                }
            }
            alpha *= 0.5;
            if alpha < 1e-12 {
                return None;
            }
        }
        let mean = t.iter().sum::<f64>() / k as f64;
        t.iter_mut().for_each(|v| *v -= mean);
        if t.iter().any(|v| v.abs() > 600.0) {
            return None;
        }
    }
    polar_factor(&weighted(&t)).ok()
}

/// `P (P^t P)^{-1} P^t`.
pub fn projection_matrix(p: &DMatrix<f64>, opts: &Options<'_>) -> Result<DMatrix<f64>> {
    column_projection(p, opts.rank_tol)
}

/// Result of quotienting the row-sign action.
#[derive(Debug, Clone, PartialEq)]
pub struct SignAlignment {
    pub distance: f64,
    /// Optimal `s` with `s[0] = +1`, minimizing `|S P_a S - P_b|_F`.
    pub signs: Vec<i8>,
}

/// Frobenius distance between projections, minimized over row signs.
pub fn shape_distance(
    a: &TylerStandardization,
    b: &TylerStandardization,
    opts: &Options<'_>,
) -> Result<SignAlignment> {
    if a.matrix.shape() != b.matrix.shape() {
        return Err(Error::DimensionMismatch(format!(
            "standardizations of shape {:?} and {:?}",
            a.matrix.shape(),
            b.matrix.shape()
        )));
    }
    projection_distance(&a.projection, &b.projection, opts)
}

/// Sign-quotiented distance between two `k x k` projection matrices.
///
/// `|S A S - B|_F^2 = |A|^2 + |B|^2 - 2 s^t (A o B) s`, so the search
/// maximizes the quadratic form over `2^(k-1)` sign vectors, visited in Gray
/// code order with `O(k)` updates per step.
pub fn projection_distance(a: &DMatrix<f64>, b: &DMatrix<f64>, opts: &Options<'_>) -> Result<SignAlignment> {
    let k = a.nrows();
    if a.shape() != b.shape() || !a.is_square() {
        return Err(Error::DimensionMismatch("projections must be square and of equal size".into()));
    }
    if k > opts.search_cap {
        return Err(Error::InstanceTooLarge(format!(
            "sign search over k = {k} landmarks exceeds cap {}",
            opts.search_cap
        )));
    }
    let m = a.component_mul(b);
    let mut s = vec![1.0_f64; k];
    let mut g: Vec<f64> = (0..k).map(|i| m.row(i).sum()).collect();
    let mut q: f64 = g.iter().sum();
    let mut best = (q, s.clone());
    let steps: u64 = 1u64 << (k.saturating_sub(1));
    for t in 1..steps {
        if t & 0xffff == 0 {
            opts.check_cancel()?;
        }
        let i = t.trailing_zeros() as usize + 1;
        let si = s[i];
        q -= 4.0 * si * (g[i] - m[(i, i)] * si);
        for (j, gj) in g.iter_mut().enumerate() {
            *gj -= 2.0 * si * m[(j, i)];
        }
        s[i] = -si;
        if q > best.0 {
            best = (q, s.clone());
        }
    }
    let signs = best.1;
    let mut diff = a.clone();
    for i in 0..k {
        for j in 0..k {
            diff[(i, j)] = signs[i] * signs[j] * a[(i, j)] - b[(i, j)];
        }
    }
    Ok(SignAlignment {
        distance: diff.norm(),
        signs: signs.iter().map(|&x| if x > 0.0 { 1 } else { -1 }).collect(),
    })
}

/// Closed-form derivative of `D -> proj(D P)` at `D = Id` along the `i`-th
/// diagonal direction: `E P + P E - 2 P E P` with `E = e_i e_i^t`,
/// `P = P_hat P_hat^t`.
pub fn diagonal_action_derivative(p_hat: &DMatrix<f64>, i: usize) -> Result<DMatrix<f64>> {
    let (k, n) = p_hat.shape();
    if i >= k {
        return Err(Error::DimensionMismatch(format!("landmark {i} out of range for k = {k}")));
    }
    let col = max_abs(&(p_hat.transpose() * p_hat - DMatrix::identity(n, n)));
    if col > STANDARDIZED_CHECK_TOL {
        return Err(Error::NotStandardized(col));
    }
    let proj = p_hat * p_hat.transpose();
    let pi = proj.column(i).into_owned();
    let mut out = -2.0 * &pi * pi.transpose();
    for j in 0..k {
        out[(i, j)] += proj[(i, j)];
        out[(j, i)] += proj[(j, i)];
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Standardizability {
    TylerRegular,
    /// Every constraint meets the Tyler bound or sits in an exactly balanced
    /// split `|I| (d+1) = j k` whose complement spans `d + 1 - j`.
    BalancedSplittable { indices: Vec<usize>, dim: usize },
    No,
}

pub fn is_standardizable(c: &Configuration, opts: &Options<'_>) -> Result<Standardizability> {
    let report = constraint_flats(c, opts)?;
    Ok(classify(c, &report, opts))
}

pub(crate) fn classify(c: &Configuration, report: &ConstraintReport, opts: &Options<'_>) -> Standardizability {
    let (d, k) = (c.d(), c.k());
    let unit = c.unit_rows();
    let mut witness = None;
    for (j, f) in report.iter() {
        let lhs = f.len() * (d + 1);
        let rhs = j * k;
        if lhs < rhs {
            continue;
        }
        if lhs > rhs {
            return Standardizability::No;
        }
        let rest: Vec<usize> = (0..k).filter(|i| !f.contains(*i)).collect();
        if rank_of_rows(&unit, &rest, opts.rank_tol) > d + 1 - j {
            return Standardizability::No;
        }
        witness.get_or_insert((f.indices.clone(), j));
    }
    match witness {
        None => Standardizability::TylerRegular,
        Some((indices, dim)) => Standardizability::BalancedSplittable { indices, dim },
    }
}
