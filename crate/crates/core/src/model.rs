//! Configurations of landmarks in real projective space, projective points,
//! and the diagonal-times-linear group acting on them.
//!
//! A configuration of `k` landmarks in `RP^d` is stored as a dense
//! `k x (d+1)` matrix whose rows are homogeneous coordinates. Two matrices
//! describe the same projective shape when they differ by `D * P * B` with
//! `D` nonsingular diagonal and `B` nonsingular.

use alloc::format;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::linalg;
use crate::{Error, Options, Result};

/// `k` landmarks in `RP^d`, every row nonzero.
///
/// Shape-space routines assume `k >= d + 3`; a bare frame (`k = d + 2`) is
/// also representable so that it can be analyzed on its own.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    matrix: DMatrix<f64>,
}

impl Configuration {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let (k, cols) = matrix.shape();
        if cols < 2 {
            return Err(Error::InvariantViolation(format!(
                "need at least 2 homogeneous coordinates, got {cols}"
            )));
        }
        let d = cols - 1;
        if k < d + 2 {
            return Err(Error::InvariantViolation(format!(
                "k = {k} landmarks but at least d + 2 = {} are required",
                d + 2
            )));
        }
        if let Some(bad) = matrix.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvariantViolation(format!(
                "non-finite entry in landmark {}",
                bad % k + 1
            )));
        }
        for (i, row) in matrix.row_iter().enumerate() {
            if row.norm() == 0.0 {
                return Err(Error::InvariantViolation(format!("landmark {} is the zero vector", i + 1)));
            }
        }
        Ok(Configuration { matrix })
    }

    /// Build from row vectors; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row {} has {} entries, expected {cols}",
                i + 1,
                rows[i].len()
            )));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(DMatrix::from_row_slice(rows.len(), cols, &flat))
    }

    /// Projective dimension.
    pub fn d(&self) -> usize {
        self.matrix.ncols() - 1
    }

    /// Number of landmarks.
    pub fn k(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Landmark `i` (0-based) as a row vector.
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.matrix.row(i).iter().copied().collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.k()).map(|i| self.row(i)).collect()
    }

    /// The matrix with rows rescaled to unit length. Every rank decision is
    /// made on this form so that landmark scaling never shifts the cutoff.
    pub fn unit_rows(&self) -> DMatrix<f64> {
        linalg::unit_rows(&self.matrix)
    }

    /// Reorder landmarks: row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.k())?;
        Self::new(self.matrix.select_rows(perm.iter()))
    }
}

pub(crate) fn check_permutation(perm: &[usize], k: usize) -> Result<()> {
    let mut seen = alloc::vec![false; k];
    if perm.len() != k {
        return Err(Error::DimensionMismatch(format!("permutation of length {} for {k} landmarks", perm.len())));
    }
    for &p in perm {
        if p >= k || seen[p] {
            return Err(Error::InvariantViolation(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// A point of `RP^d` in canonical form: unit norm, first nonzero coordinate
/// positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint {
    coords: Vec<f64>,
}

impl ProjectivePoint {
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// `|<u, v>|`, the cosine of the angle between the two lines.
    pub fn alignment(&self, other: &ProjectivePoint) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum::<f64>().abs()
    }
}

pub fn canonicalize_point(v: &[f64]) -> Result<ProjectivePoint> {
    let norm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    let first = v.iter().copied().find(|x| *x != 0.0).unwrap_or(1.0);
    let scale = if first < 0.0 { -norm } else { norm };
    Ok(ProjectivePoint {
        coords: v.iter().map(|x| x / scale).collect(),
    })
}

/// Group element `(D, B)` acting by `P -> D P B`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    row_scales: Vec<f64>,
    right_matrix: DMatrix<f64>,
}

impl GroupElement {
    pub fn new(row_scales: Vec<f64>, right_matrix: DMatrix<f64>) -> Result<Self> {
        if let Some(i) = row_scales.iter().position(|s| *s == 0.0 || !s.is_finite()) {
            return Err(Error::InvariantViolation(format!("row scale {} is zero or non-finite", i + 1)));
        }
        if !right_matrix.is_square() {
            return Err(Error::DimensionMismatch("right matrix must be square".into()));
        }
        if linalg::numerical_rank(&right_matrix, crate::DEFAULT_RANK_TOL) < right_matrix.nrows() {
            return Err(Error::InvariantViolation("right matrix is singular".into()));
        }
        Ok(GroupElement {
            row_scales,
            right_matrix,
        })
    }

    pub fn identity(d: usize, k: usize) -> Self {
        GroupElement {
            row_scales: alloc::vec![1.0; k],
            right_matrix: DMatrix::identity(d + 1, d + 1),
        }
    }

    pub fn row_scales(&self) -> &[f64] {
        &self.row_scales
    }

    pub fn right_matrix(&self) -> &DMatrix<f64> {
        &self.right_matrix
    }

    /// `after ∘ self`: acting with the result equals acting with `self`, then `after`.
    pub fn then(&self, after: &GroupElement) -> Result<GroupElement> {
        if self.row_scales.len() != after.row_scales.len() || self.right_matrix.shape() != after.right_matrix.shape() {
            return Err(Error::DimensionMismatch("group elements of different sizes".into()));
        }
        Ok(GroupElement {
            row_scales: self.row_scales.iter().zip(&after.row_scales).map(|(a, b)| a * b).collect(),
            right_matrix: &self.right_matrix * &after.right_matrix,
        })
    }
}

pub fn act(g: &GroupElement, c: &Configuration) -> Result<Configuration> {
    if g.row_scales.len() != c.k() || g.right_matrix.nrows() != c.d() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "group element for k = {}, d = {} applied to k = {}, d = {}",
            g.row_scales.len(),
            g.right_matrix.nrows() as isize - 1,
            c.k(),
            c.d()
        )));
    }
    let mut m = c.matrix() * &g.right_matrix;
    for (i, mut row) in m.row_iter_mut().enumerate() {
        row *= g.row_scales[i];
    }
    Configuration::new(m)
}

pub fn configuration_rank(c: &Configuration, opts: &Options<'_>) -> usize {
    linalg::numerical_rank(&c.unit_rows(), opts.rank_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn canonical_points() {
        assert_eq!(canonicalize_point(&[0.0, -2.0]).unwrap().coords(), &[0.0, 1.0]);
        let p = canonicalize_point(&[3.0, 4.0]).unwrap();
        assert!((p.coords()[0] - 0.6).abs() < 1e-15 && (p.coords()[1] - 0.8).abs() < 1e-15);
        let p = canonicalize_point(&[-1.0, -1.0, 0.0]).unwrap();
        let h = core::f64::consts::FRAC_1_SQRT_2;
        assert!((p.coords()[0] - h).abs() < 1e-15 && (p.coords()[1] - h).abs() < 1e-15);
        assert_eq!(p.coords()[2], 0.0);
        assert_eq!(canonicalize_point(&[0.0, 0.0]), Err(Error::ZeroVector));
    }

    #[test]
    fn configuration_invariants() {
        assert!(matches!(
            Configuration::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 1.0]]),
            Err(Error::InvariantViolation(_))
        ));
        assert!(matches!(
            Configuration::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![1.0, 1.0, 1.0]]),
            Err(Error::InvariantViolation(_))
        ));
        assert!(matches!(
            Configuration::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0, 2.0]]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn ranks() {
        let opts = Options::default();
        let c = Configuration::from_rows(&[vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(configuration_rank(&c, &opts), 2);
        let same = Configuration::from_rows(&vec![vec![1.0, 2.0, 3.0]; 6]).unwrap();
        assert_eq!(configuration_rank(&same, &opts), 1);
    }

    #[test]
    fn identity_and_scalar_action() {
        let c = Configuration::from_rows(&[vec![1.0, 2.0], vec![0.5, 0.0], vec![3.0, 1.0], vec![-1.0, 1.0]]).unwrap();
        assert_eq!(act(&GroupElement::identity(1, 4), &c).unwrap(), c);
        let g = GroupElement::new(vec![2.0; 4], DMatrix::identity(2, 2)).unwrap();
        assert_eq!(act(&g, &c).unwrap().matrix(), &(c.matrix() * 2.0));
        let wrong = GroupElement::identity(2, 4);
        assert!(matches!(act(&wrong, &c), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn rejects_singular_group_elements() {
        assert!(GroupElement::new(vec![1.0, 0.0], DMatrix::identity(2, 2)).is_err());
        let sing = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(GroupElement::new(vec![1.0, 1.0], sing).is_err());
    }
}
