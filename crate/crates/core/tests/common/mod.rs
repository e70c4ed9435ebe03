//! Independent reference implementations shared by the integration suites.
#![allow(dead_code)]

use nalgebra::DMatrix;
use projshape_core::{Configuration, DEFAULT_RANK_TOL};

/// Rows scaled to unit length.
pub fn unit(c: &Configuration) -> DMatrix<f64> {
    let mut m = c.matrix().clone();
    for mut r in m.row_iter_mut() {
        let n = r.norm();
        r /= n;
    }
    m
}

/// Rank by Gaussian elimination with full pivoting on the selected rows.
pub fn elimination_rank(m: &DMatrix<f64>, rows: &[usize]) -> usize {
    let mut a = m.select_rows(rows.iter());
    let (r, c) = a.shape();
    let scale = a.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    let cutoff = DEFAULT_RANK_TOL * scale * r.max(c) as f64 * 10.0;
    let mut rank = 0;
    for _ in 0..r.min(c) {
        let mut best = (0.0, 0, 0);
        for i in rank..r {
            for j in rank..c {
                if a[(i, j)].abs() > best.0 {
                    best = (a[(i, j)].abs(), i, j);
                }
            }
        }
        if best.0 <= cutoff {
            break;
        }
        a.swap_rows(rank, best.1);
        a.swap_columns(rank, best.2);
        for i in rank + 1..r {
            let f = a[(i, rank)] / a[(rank, rank)];
            for j in rank..c {
                let v = a[(rank, j)];
                a[(i, j)] -= f * v;
            }
        }
        rank += 1;
    }
    rank
}

/// Flats by exhaustive enumeration: for each level `j`, the inclusion-maximal
/// subsets of rank at most `j` with more than `j` elements. Indices 0-based.
pub fn brute_force_flats(c: &Configuration) -> Vec<Vec<Vec<usize>>> {
    let (d, k) = (c.d(), c.k());
    let u = unit(c);
    let ranks: Vec<usize> = (0..1u32 << k)
        .map(|mask| {
            let rows: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
            if rows.is_empty() {
                0
            } else {
                elimination_rank(&u, &rows)
            }
        })
        .collect();
    (1..=d)
        .map(|j| {
            let mut out: Vec<Vec<usize>> = (0..1u32 << k)
                .filter(|&mask| {
                    ranks[mask as usize] <= j
                        && mask.count_ones() as usize > j
                        && (0..k).all(|i| mask >> i & 1 == 1 || ranks[(mask | 1 << i) as usize] > j)
                })
                .map(|mask| (0..k).filter(|i| mask >> i & 1 == 1).collect())
                .collect();
            out.sort();
            out
        })
        .collect()
}

/// `P (P^t P)^{-1} P^t` through an explicit inverse.
pub fn projection_by_inverse(p: &DMatrix<f64>) -> DMatrix<f64> {
    let g = (p.transpose() * p).try_inverse().expect("full column rank");
    p * g * p.transpose()
}

/// Sign-quotiented distance by plain enumeration of all `2^k` sign vectors.
pub fn distance_by_enumeration(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let k = a.nrows();
    let mut best = f64::INFINITY;
    for mask in 0..1u32 << k {
        let s: Vec<f64> = (0..k).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
        let mut acc = 0.0;
        for i in 0..k {
            for j in 0..k {
                let x = s[i] * s[j] * a[(i, j)] - b[(i, j)];
                acc += x * x;
            }
        }
        best = best.min(acc.sqrt());
    }
    best
}

/// Hausdorff condition `n_j + n_{d+1-j} < k`, restated.
pub fn hausdorff(n: &[usize], k: usize) -> bool {
    let d = n.len();
    (0..d).all(|j| n[j] + n[d - 1 - j] < k)
}

/// Whether `n` is maximal among all strictly increasing Hausdorff sequences,
/// by exhaustive comparison.
pub fn maximal_by_search(n: &[usize], k: usize) -> bool {
    let d = n.len();
    let mut found = false;
    let mut cur = vec![0usize; d];
    fn rec(pos: usize, lo: usize, cur: &mut Vec<usize>, n: &[usize], k: usize, found: &mut bool) {
        if *found {
            return;
        }
        if pos == cur.len() {
            if cur.as_slice() != n && cur.iter().zip(n).all(|(a, b)| a >= b) && hausdorff(cur, k) {
                *found = true;
            }
            return;
        }
        for v in lo.max(n[pos])..k {
            cur[pos] = v;
            rec(pos + 1, v + 1, cur, n, k, found);
        }
    }
    rec(0, 1, &mut cur, n, k, &mut found);
    !found
}

/// `t_j = ceil(j k / (d+1)) - 1`.
pub fn tyler_formula(d: usize, k: usize) -> Vec<usize> {
    (1..=d).map(|j| (j * k).div_ceil(d + 1) - 1).collect()
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Relabels a 1-based flat list to 0-based.
pub fn zero_based(sets: &[&[usize]]) -> Vec<Vec<usize>> {
    sets.iter().map(|s| s.iter().map(|i| i - 1).collect()).collect()
}

/// Seeded instance with `0..=2` planted constraints on disjoint index sets,
/// `1 <= d <= max_d`, `d + 3 <= k <= max_k`.
pub fn planted_instance(seed: u64, max_d: usize, max_k: usize) -> Configuration {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let d = rng.random_range(1..=max_d.min(max_k - 3));
    let k = rng.random_range(d + 3..=max_k);
    let perm = projshape_core::oracle::random_permutation(k, seed);
    let mut used = 0;
    let mut planted = Vec::new();
    for _ in 0..rng.random_range(0..=2) {
        let j = rng.random_range(1..=d);
        let room = k - used;
        if room < j + 1 {
            break;
        }
        let size = rng.random_range(j + 1..=room.min(j + 3));
        let mut set: Vec<usize> = perm[used..used + size].to_vec();
        set.sort_unstable();
        used += size;
        planted.push((set, j));
    }
    projshape_core::oracle::random_with_constraints(d, k, &planted, seed).expect("feasible plan")
}
