//! Projective subspace constraints and the classifications derived from them.
//!
//! The full collection of constraints `(I, j)` of a configuration is
//! exponentially large, so it is summarized by its flats: for each level `j`
//! the inclusion-maximal index sets whose landmarks span a subspace of rank at
//! most `j`. Every constraint is a subset of some flat at its level.
//!
//! Indices are 0-based throughout the library.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;
use itertools::Itertools;

use crate::linalg::{numerical_rank, rank_of_rows};
use crate::model::{check_permutation, Configuration};
use crate::numbers::SubspaceNumbers;
use crate::{Error, Options, Result};

/// A closed index set together with the exact rank of its landmarks.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Flat {
    pub indices: Vec<usize>,
    pub rank: usize,
}

impl Flat {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    fn is_subset_of(&self, other: &Flat) -> bool {
        self.indices.iter().all(|i| other.contains(*i))
    }
}

/// Flats of a configuration, level by level.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport {
    d: usize,
    k: usize,
    rank: usize,
    /// `levels[j - 1]`: non-trivial maximal sets with rank `<= j`.
    levels: Vec<Vec<Flat>>,
    /// Every closed set of rank `1..=min(d, rank)`, trivial ones included.
    closed: Vec<Flat>,
}

impl ConstraintReport {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Rank of the whole configuration.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Non-trivial flats at level `j` (`1 <= j <= d`), sorted.
    pub fn flats(&self, j: usize) -> &[Flat] {
        assert!((1..=self.d).contains(&j), "level {j} outside 1..={}", self.d);
        &self.levels[j - 1]
    }

    /// Iterate `(j, flat)` over all non-trivial flats.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &Flat)> {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(j, fl)| fl.iter().map(move |f| (j + 1, f)))
    }

    /// Every closed index set (the span closure of an independent subset),
    /// including trivial ones.
    pub fn closed_sets(&self) -> &[Flat] {
        &self.closed
    }

    pub fn has_nontrivial(&self) -> bool {
        self.levels.iter().any(|l| !l.is_empty())
    }

    /// Report for the configuration with rows reordered by `perm`
    /// (row `i` of the new configuration is row `perm[i]` of the old).
    pub fn permuted(&self, perm: &[usize]) -> Result<ConstraintReport> {
        check_permutation(perm, self.k)?;
        let mut inverse = alloc::vec![0; self.k];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let map = |f: &Flat| {
            let mut indices: Vec<usize> = f.indices.iter().map(|&i| inverse[i]).collect();
            indices.sort_unstable();
            Flat { indices, rank: f.rank }
        };
        let sort = |mut v: Vec<Flat>| {
            v.sort();
            v
        };
        Ok(ConstraintReport {
            d: self.d,
            k: self.k,
            rank: self.rank,
            levels: self.levels.iter().map(|l| sort(l.iter().map(map).collect())).collect(),
            closed: sort(self.closed.iter().map(map).collect()),
        })
    }

    /// `|I| <= n_j` for every constraint `(I, j)`.
    pub fn satisfies(&self, n: &SubspaceNumbers) -> Result<bool> {
        if n.d() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "subspace numbers of length {} for d = {}",
                n.d(),
                self.d
            )));
        }
        Ok(self.iter().all(|(j, f)| f.len() <= n.get(j)))
    }

    /// Every constraint of `self` is also a constraint of `other`.
    pub fn is_contained_in(&self, other: &ConstraintReport) -> bool {
        self.d == other.d
            && self.k == other.k
            && self.iter().all(|(j, f)| other.flats(j).iter().any(|g| f.is_subset_of(g)))
    }

    /// Constraints form a strict subset of those of `other`.
    pub fn is_strictly_weaker_than(&self, other: &ConstraintReport) -> bool {
        self.is_contained_in(other) && self.levels != other.levels
    }

    /// Strict Tyler bound `|I| (d+1) < j k` on every non-trivial flat.
    pub fn is_tyler_regular(&self) -> bool {
        self.iter().all(|(j, f)| f.len() * (self.d + 1) < j * self.k)
    }
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn reduce_to_maximal(mut sets: Vec<Flat>) -> Vec<Flat> {
    // larger sets first so that a set is only compared with possible supersets
    sets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let mut kept: Vec<Flat> = Vec::new();
    for s in sets {
        if !kept.iter().any(|m| s.is_subset_of(m)) {
            kept.push(s);
        }
    }
    kept.sort();
    kept
}

pub fn constraint_flats(c: &Configuration, opts: &Options<'_>) -> Result<ConstraintReport> {
    let (d, k) = (c.d(), c.k());
    let unit = c.unit_rows();
    let tol = opts.rank_tol;
    let rank = numerical_rank(&unit, tol);
    let top = d.min(rank);

    let work: u128 = (1..=top).map(|j| binomial(k, j)).sum();
    if work > opts.search_budget() {
        return Err(Error::InstanceTooLarge(format!(
            "{work} candidate spanning subsets for k = {k}, d = {d}"
        )));
    }

    let mut closed: Vec<Flat> = Vec::new();
    for j in 1..=top {
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut level_closed: Vec<Flat> = Vec::new();
        for s in (0..k).combinations(j) {
            opts.check_cancel()?;
            // an independent subset of a known rank-j closure spans that closure
            if level_closed.iter().any(|f| s.iter().all(|i| f.contains(*i))) {
                continue;
            }
            if rank_of_rows(&unit, &s, tol) != j {
                continue;
            }
            let mut rows = s.clone();
            rows.push(0);
            let indices: Vec<usize> = (0..k)
                .filter(|&i| {
                    if s.contains(&i) {
                        return true;
                    }
                    rows[j] = i;
                    rank_of_rows(&unit, &rows, tol) == j
                })
                .collect();
            if found.insert(indices.clone()) {
                level_closed.push(Flat { indices, rank: j });
            }
        }
        closed.extend(level_closed);
    }
    closed.sort();

    let levels = (1..=d)
        .map(|j| {
            let candidates: Vec<Flat> = closed.iter().filter(|f| f.rank <= j).cloned().collect();
            reduce_to_maximal(candidates).into_iter().filter(|f| f.len() > j).collect()
        })
        .collect();

    Ok(ConstraintReport {
        d,
        k,
        rank,
        levels,
        closed,
    })
}

pub fn is_general_position(c: &Configuration, opts: &Options<'_>) -> Result<bool> {
    Ok(!constraint_flats(c, opts)?.has_nontrivial())
}

/// A bipartition `I, I^c` with `rank(P_I) + rank(P_{I^c}) <= d + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitWitness {
    pub indices: Vec<usize>,
    /// Rank of the landmarks in `indices` (the `j` of the constraint `(I, j)`).
    pub dim: usize,
    pub complement_rank: usize,
    /// Set when the whole configuration is rank deficient; `indices` is then `{0}`.
    pub rank_deficient: bool,
}

impl SplitWitness {
    pub fn complement(&self, k: usize) -> Vec<usize> {
        (0..k).filter(|i| !self.indices.contains(i)).collect()
    }
}

pub fn is_splittable(c: &Configuration, opts: &Options<'_>) -> Result<Option<SplitWitness>> {
    let report = constraint_flats(c, opts)?;
    splittable_from_report(c, &report, opts)
}

pub(crate) fn splittable_from_report(
    c: &Configuration,
    report: &ConstraintReport,
    opts: &Options<'_>,
) -> Result<Option<SplitWitness>> {
    let (d, k) = (c.d(), c.k());
    let unit = c.unit_rows();
    if report.rank() < d + 1 {
        let rest: Vec<usize> = (1..k).collect();
        return Ok(Some(SplitWitness {
            indices: alloc::vec![0],
            dim: 1,
            complement_rank: rank_of_rows(&unit, &rest, opts.rank_tol),
            rank_deficient: true,
        }));
    }
    // For a full-rank split, both sides are closed sets, so the closures
    // enumerated with the flats are the only candidates.
    let mut candidates: Vec<&Flat> = report.closed_sets().iter().filter(|f| f.len() < k).collect();
    candidates.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.indices.cmp(&b.indices)));
    for f in candidates {
        opts.check_cancel()?;
        let rest: Vec<usize> = (0..k).filter(|i| !f.contains(*i)).collect();
        let rest_rank = rank_of_rows(&unit, &rest, opts.rank_tol);
        if f.rank + rest_rank <= d + 1 {
            return Ok(Some(SplitWitness {
                indices: f.indices.clone(),
                dim: f.rank,
                complement_rank: rest_rank,
                rank_deficient: false,
            }));
        }
    }
    Ok(None)
}

pub fn is_free(c: &Configuration, opts: &Options<'_>) -> Result<bool> {
    Ok(is_splittable(c, opts)?.is_none())
}

pub fn is_tyler_regular(c: &Configuration, opts: &Options<'_>) -> Result<bool> {
    Ok(constraint_flats(c, opts)?.is_tyler_regular())
}

pub fn satisfies_subspace_numbers(c: &Configuration, n: &SubspaceNumbers, opts: &Options<'_>) -> Result<bool> {
    if n.d() != c.d() {
        return Err(Error::DimensionMismatch(format!("subspace numbers of length {} for d = {}", n.d(), c.d())));
    }
    constraint_flats(c, opts)?.satisfies(n)
}

/// Rank of the rows `rows` of the unit-row form of `c`.
pub fn subset_rank(c: &Configuration, rows: &[usize], opts: &Options<'_>) -> usize {
    rank_of_rows(&c.unit_rows(), rows, opts.rank_tol)
}
