//! Projective subspace numbers: per-dimension caps on how many landmarks a
//! subspace may carry, and the Hausdorff / maximality criteria on them.

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Strictly increasing `(n_1, ..., n_d)` with `n_1 >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubspaceNumbers(Vec<usize>);

impl SubspaceNumbers {
    pub fn new(n: Vec<usize>) -> Result<Self> {
        if n.is_empty() {
            return Err(Error::InvalidSubspaceNumbers("empty vector".into()));
        }
        if n[0] < 1 {
            return Err(Error::InvalidSubspaceNumbers("n_1 must be at least 1".into()));
        }
        if let Some(w) = n.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSubspaceNumbers(format!(
                "not strictly increasing at positions {} and {}",
                w + 1,
                w + 2
            )));
        }
        Ok(SubspaceNumbers(n))
    }

    pub fn d(&self) -> usize {
        self.0.len()
    }

    /// `n_j`, 1-based.
    pub fn get(&self, j: usize) -> usize {
        self.0[j - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

fn check_dims(d: usize, k: usize) -> Result<()> {
    if d < 1 || k < d + 3 {
        return Err(Error::InvariantViolation(format!("need d >= 1 and k >= d + 3, got d = {d}, k = {k}")));
    }
    Ok(())
}

/// `t_j = ceil(j k / (d+1)) - 1`.
pub fn tyler_numbers(d: usize, k: usize) -> Result<SubspaceNumbers> {
    check_dims(d, k)?;
    let t = (1..=d).map(|j| (j * k).div_ceil(d + 1) - 1).collect();
    SubspaceNumbers::new(t)
}

/// Levels `j` with `n_j + n_{d+1-j} >= k`.
pub fn hausdorff_violations(n: &SubspaceNumbers, k: usize) -> Vec<usize> {
    let d = n.d();
    (1..=d).filter(|&j| n.get(j) + n.get(d + 1 - j) >= k).collect()
}

pub fn is_hausdorff_numbers(n: &SubspaceNumbers, k: usize) -> bool {
    hausdorff_violations(n, k).is_empty()
}

/// No strictly larger vector of subspace numbers still passes the Hausdorff
/// criterion.
///
/// The criterion only gets harder as entries grow, and any admissible `m > n`
/// dominates the admissible single increment at the last index where it
/// differs from `n`, so probing single increments is enough.
pub fn is_maximal_numbers(n: &SubspaceNumbers, k: usize) -> Result<bool> {
    if !is_hausdorff_numbers(n, k) {
        return Err(Error::NotHausdorffInput);
    }
    let d = n.d();
    for j in 0..d {
        let mut m = n.as_slice().to_vec();
        m[j] += 1;
        if j + 1 < d && m[j] >= m[j + 1] {
            continue;
        }
        let m = SubspaceNumbers(m);
        if is_hausdorff_numbers(&m, k) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Closed-form maximality of the Tyler numbers: `gcd(k, d+1)` is 1 or 2.
pub fn tyler_maximal_gcd(d: usize, k: usize) -> bool {
    matches!(gcd(k, d + 1), 1 | 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn n(v: &[usize]) -> SubspaceNumbers {
        SubspaceNumbers::new(v.to_vec()).unwrap()
    }

    #[test]
    fn tyler_number_examples() {
        assert_eq!(tyler_numbers(2, 6).unwrap(), n(&[1, 3]));
        assert_eq!(tyler_numbers(1, 4).unwrap(), n(&[1]));
        assert_eq!(tyler_numbers(3, 7).unwrap(), n(&[1, 3, 5]));
        assert!(tyler_numbers(2, 4).is_err());
    }

    #[test]
    fn rejects_non_increasing() {
        assert!(SubspaceNumbers::new(vec![2, 2]).is_err());
        assert!(SubspaceNumbers::new(vec![0, 2]).is_err());
        assert!(SubspaceNumbers::new(vec![]).is_err());
    }

    #[test]
    fn hausdorff_examples() {
        assert!(is_hausdorff_numbers(&n(&[1, 3]), 6));
        assert!(!is_hausdorff_numbers(&n(&[2, 4]), 6));
        assert_eq!(hausdorff_violations(&n(&[2, 4]), 6), vec![1, 2]);
        assert!(is_hausdorff_numbers(&n(&[1]), 4));
    }

    #[test]
    fn maximality_examples() {
        assert!(!is_maximal_numbers(&n(&[1, 3]), 6).unwrap());
        assert!(is_maximal_numbers(&n(&[1]), 4).unwrap());
        // general position numbers are not maximal once k > d + 3
        for d in 1..5 {
            let g = n(&(1..=d).collect::<Vec<_>>());
            assert!(!is_maximal_numbers(&g, d + 4).unwrap());
        }
        assert_eq!(is_maximal_numbers(&n(&[2, 4]), 6), Err(Error::NotHausdorffInput));
    }

    #[test]
    fn gcd_examples() {
        assert!(!tyler_maximal_gcd(2, 6));
        assert!(tyler_maximal_gcd(3, 6));
        assert!(tyler_maximal_gcd(4, 7));
    }
}
