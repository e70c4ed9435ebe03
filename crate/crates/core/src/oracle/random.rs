//! Seeded configuration generators.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::constraints::is_general_position;
use crate::model::{canonicalize_point, Configuration, GroupElement};
use crate::{Error, Options, Result};

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Uniform point on the unit sphere of `R^n`, canonicalized.
fn sphere_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        if let Ok(p) = canonicalize_point(&gaussian(rng, n)) {
            return p.coords().to_vec();
        }
    }
}

pub fn random_general_position(d: usize, k: usize, seed: u64) -> Result<Configuration> {
    let mut rng = rng(seed);
    let opts = Options::default();
    loop {
        let rows: Vec<Vec<f64>> = (0..k).map(|_| sphere_point(&mut rng, d + 1)).collect();
        let c = Configuration::from_rows(&rows)?;
        if is_general_position(&c, &opts)? {
            return Ok(c);
        }
    }
}

/// Landmarks in `indices` drawn inside a random `dim`-dimensional linear
/// subspace, everything else generic.
pub fn random_with_constraint(d: usize, k: usize, indices: &[usize], dim: usize, seed: u64) -> Result<Configuration> {
    random_with_constraints(d, k, &[(indices.to_vec(), dim)], seed)
}

/// Several planted constraints on pairwise disjoint index sets, each sampled
/// in its own random subspace.
pub fn random_with_constraints(d: usize, k: usize, constraints: &[(Vec<usize>, usize)], seed: u64) -> Result<Configuration> {
    let mut owner: Vec<Option<usize>> = vec![None; k];
    for (ci, (indices, dim)) in constraints.iter().enumerate() {
        if *dim < 1 || *dim > d {
            return Err(Error::InfeasibleConstraint(format!("dimension {dim} outside 1..={d}")));
        }
        if indices.len() <= *dim {
            return Err(Error::InfeasibleConstraint(format!(
                "{} landmarks in a rank-{dim} subspace is a trivial constraint",
                indices.len()
            )));
        }
        for &i in indices {
            if i >= k {
                return Err(Error::InfeasibleConstraint(format!("landmark {i} out of range for k = {k}")));
            }
            if owner[i].replace(ci).is_some() {
                return Err(Error::InfeasibleConstraint(format!("landmark {i} planted twice")));
            }
        }
    }
    let mut rng = rng(seed);
    let bases: Vec<DMatrix<f64>> = constraints
        .iter()
        .map(|(_, dim)| DMatrix::from_vec(*dim, d + 1, gaussian(&mut rng, dim * (d + 1))))
        .collect();
    let mut rows = Vec::with_capacity(k);
    for own in owner {
        let row = match own {
            None => sphere_point(&mut rng, d + 1),
            Some(ci) => loop {
                let coeffs = DMatrix::from_vec(1, bases[ci].nrows(), gaussian(&mut rng, bases[ci].nrows()));
                let v = coeffs * &bases[ci];
                if let Ok(p) = canonicalize_point(v.as_slice()) {
                    break p.coords().to_vec();
                }
            },
        };
        rows.push(row);
    }
    Configuration::from_rows(&rows)
}

/// Random `(D, B)` with row scales of magnitude in `[0.5, 2]` and a
/// well-conditioned `B = 2 Id + G / sqrt(d+1)`.
pub fn random_group_element(d: usize, k: usize, seed: u64) -> GroupElement {
    let mut rng = rng(seed);
    let scales = (0..k)
        .map(|_| {
            let m: f64 = rng.random_range(0.5..2.0);
            if rng.random_bool(0.5) {
                -m
            } else {
                m
            }
        })
        .collect();
    let n = d + 1;
    let g = DMatrix::from_vec(n, n, gaussian(&mut rng, n * n)) / libm::sqrt(n as f64);
    let b = DMatrix::identity(n, n) * 2.0 + g;
    GroupElement::new(scales, b).unwrap_or_else(|_| GroupElement::identity(d, k))
}

/// Uniformly random permutation of `0..k`.
pub fn random_permutation(k: usize, seed: u64) -> Vec<usize> {
    let mut rng = rng(seed);
    let mut p: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        let j = rng.random_range(0..=i);
        p.swap(i, j);
    }
    p
}
