//! Constructive witnesses for the topology of projective shape space: blur
//! sequences of splittable shapes, non-separable pairs of free shapes with a
//! common approximating sequence, and seeded generators.

mod blocks;
mod random;

pub use blocks::{merge_sequence, merge_term, nonhausdorff_witness, BlockPair, Speeds};
pub use random::{
    random_general_position, random_group_element, random_permutation, random_with_constraint,
    random_with_constraints,
};

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

use crate::constraints::{constraint_flats, splittable_from_report, ConstraintReport};
use crate::linalg::{max_abs, row_space_basis};
use crate::model::Configuration;
use crate::{Error, Options, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    Blur,
    Merge,
}

/// One element of a sequence: the representatives emitted for parameter `n`
/// and their max-norm distances to the corresponding limits.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceTerm {
    pub n: u64,
    pub representatives: Vec<Configuration>,
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSequence {
    pub kind: SequenceKind,
    pub description: String,
    pub terms: Vec<SequenceTerm>,
    pub limits: Vec<Configuration>,
    /// For blur sequences, a representative of the single shape shared by
    /// every term.
    pub fixed_shape: Option<Configuration>,
}

impl ShapeSequence {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

pub(crate) fn check_term_count(n_terms: usize) -> Result<()> {
    if n_terms == 0 {
        return Err(Error::InvariantViolation("a sequence needs at least one term".into()));
    }
    Ok(())
}

/// Limit representative together with the entries that the perturbation
/// block occupies.
struct BlurForm {
    limit: DMatrix<f64>,
    rows: Vec<usize>,
    cols: Vec<usize>,
    description: String,
}

fn rank_deficient_form(c: &Configuration, rank: usize) -> BlurForm {
    let (k, n) = (c.k(), c.d() + 1);
    let basis = row_space_basis(c.matrix(), n).transpose();
    let mut limit = c.matrix() * basis;
    for i in 0..k {
        for col in rank..n {
            limit[(i, col)] = 0.0;
        }
    }
    BlurForm {
        limit,
        rows: (0..k).collect(),
        cols: vec![n - 1],
        description: format!("rank {rank} < {n}: (P1, z) diag(1, ..., 1, 1/n)"),
    }
}

fn split_form(c: &Configuration, indices: &[usize], dim: usize) -> Result<BlurForm> {
    let (k, n) = (c.k(), c.d() + 1);
    let mut side: Vec<usize> = indices.to_vec();
    let mut other: Vec<usize> = (0..k).filter(|i| !indices.contains(i)).collect();
    let mut j = dim;
    if j >= other.len() {
        core::mem::swap(&mut side, &mut other);
        j = n - j;
    }
    let u = row_space_basis(&c.matrix().select_rows(side.iter()), j);
    let w = row_space_basis(&c.matrix().select_rows(other.iter()), n - j);
    let mut m = DMatrix::zeros(n, n);
    m.rows_mut(0, j).copy_from(&u);
    m.rows_mut(j, n - j).copy_from(&w);
    let b = m.try_inverse().ok_or(Error::SingularBase)?;
    let mut limit = c.matrix() * b;
    for &i in &side {
        for col in j..n {
            limit[(i, col)] = 0.0;
        }
    }
    for &i in &other {
        for col in 0..j {
            limit[(i, col)] = 0.0;
        }
    }
    let description = format!(
        "split into {} landmarks spanning {j} and {} spanning {}: Z/n below P1",
        side.len(),
        other.len(),
        n - j
    );
    Ok(BlurForm { limit, rows: other, cols: (0..j).collect(), description })
}

fn perturbation(form: &BlurForm, z: &[f64]) -> DMatrix<f64> {
    let mut e = DMatrix::zeros(form.limit.nrows(), form.limit.ncols());
    let mut it = z.iter();
    for &r in &form.rows {
        for &c in &form.cols {
            e[(r, c)] = *it.next().expect("one value per block entry");
        }
    }
    e
}

const Z_ATTEMPTS: u64 = 16;

/// The sequence from the proof that splittable shapes are blurry. Every term
/// has the same shape, strictly less constrained than `c`, and the terms
/// converge to a representative of `c` at rate `1/n`.
pub fn blur_sequence(c: &Configuration, n_terms: usize, opts: &Options<'_>) -> Result<ShapeSequence> {
    check_term_count(n_terms)?;
    let report = constraint_flats(c, opts)?;
    let witness = splittable_from_report(c, &report, opts)?.ok_or(Error::NotSplittable)?;
    let form = if witness.rank_deficient {
        rank_deficient_form(c, report.rank())
    } else {
        split_form(c, &witness.indices, witness.dim)?
    };
    let size = form.rows.len() * form.cols.len();

    let mut chosen: Option<(DMatrix<f64>, ConstraintReport)> = None;
    for attempt in 0..Z_ATTEMPTS {
        opts.check_cancel()?;
        let z: Vec<f64> = if attempt == 0 {
            vec![1.0; size]
        } else {
            let mut rng = random::rng(attempt);
            (0..size).map(|_| StandardNormal.sample(&mut rng)).collect()
        };
        let e = perturbation(&form, &z);
        let fixed = Configuration::new(&form.limit + &e)?;
        let fixed_report = constraint_flats(&fixed, opts)?;
        if fixed_report.is_strictly_weaker_than(&report) {
            chosen = Some((e, fixed_report));
            break;
        }
    }
    let (e, fixed_report) = chosen.ok_or_else(|| {
        Error::InvariantViolation("no perturbation block breaks a constraint of the input".into())
    })?;

    let scale = max_abs(&e);
    let mut terms = Vec::with_capacity(n_terms);
    for n in 1..=n_terms as u64 {
        let term = Configuration::new(&form.limit + &e / n as f64)?;
        if constraint_flats(&term, opts)? != fixed_report {
            return Err(Error::InvariantViolation(format!("blur term {n} changed its constraints")));
        }
        terms.push(SequenceTerm { n, representatives: vec![term], residuals: vec![scale / n as f64] });
    }
    Ok(ShapeSequence {
        kind: SequenceKind::Blur,
        description: form.description,
        terms,
        limits: vec![Configuration::new(form.limit.clone())?],
        fixed_shape: Some(Configuration::new(form.limit + e)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{double_pair, concurrent_lines, single_pair};

    #[test]
    fn double_pair_blurs_to_single_pair() {
        let opts = Options::default();
        let seq = blur_sequence(&double_pair(), 5, &opts).unwrap();
        let single = constraint_flats(&single_pair(), &opts).unwrap();
        let term = constraint_flats(&seq.terms[0].representatives[0], &opts).unwrap();
        assert_eq!(term.flats(1).len(), 1);
        assert_eq!(term.flats(1)[0].len(), 2);
        assert_eq!(single.flats(1).len(), 1);
        let limit = &seq.limits[0];
        for w in seq.terms.windows(2) {
            assert!(w[1].residuals[0] < w[0].residuals[0]);
        }
        for t in &seq.terms {
            let diff = max_abs(&(t.representatives[0].matrix() - limit.matrix()));
            assert!((diff - t.residuals[0]).abs() < 1e-15);
        }
    }

    #[test]
    fn rank_deficient_input_uses_extra_column() {
        let c = Configuration::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![1.0, 1.0, 0.0],
            vec![1.0, 2.0, 0.0],
            vec![2.0, 1.0, 0.0],
        ])
        .unwrap();
        let opts = Options::default();
        let seq = blur_sequence(&c, 3, &opts).unwrap();
        let fixed = seq.fixed_shape.as_ref().unwrap();
        assert_eq!(constraint_flats(fixed, &opts).unwrap().rank(), 3);
        assert!(seq.description.starts_with("rank 2"));
    }

    #[test]
    fn free_input_is_rejected() {
        assert_eq!(blur_sequence(&concurrent_lines(), 3, &Options::default()), Err(Error::NotSplittable));
    }
}
