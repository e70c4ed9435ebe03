//! Worked configurations used throughout the documentation and tests.

use alloc::vec;
use alloc::vec::Vec;

use crate::model::Configuration;

fn build(rows: Vec<Vec<f64>>) -> Configuration {
    Configuration::from_rows(&rows).expect("fixture is a valid configuration")
}

/// Seven landmarks in `RP^3` on three concurrent, non-coplanar lines through
/// landmark 1. Free, but contains no frame.
pub fn concurrent_lines() -> Configuration {
    build(vec![
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
        vec![1.0, 1.0, 0.0, 0.0],
        vec![1.0, 0.0, 1.0, 0.0],
        vec![1.0, 0.0, 0.0, 1.0],
    ])
}

/// The standard frame of `RP^3`.
pub fn standard_frame() -> Configuration {
    build(vec![
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
        vec![1.0, 1.0, 1.0, 1.0],
    ])
}

/// `d = 1, k = 4` with `p1 = p2` and `p3 = p4`.
pub fn double_pair() -> Configuration {
    build(vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 1.0]])
}

/// `d = 1, k = 4` with only `p1 = p2`.
pub fn single_pair() -> Configuration {
    build(vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]])
}

/// `d = 1, k = 4` with `p1 = p2 = p3`.
pub fn triple_coincidence() -> Configuration {
    build(vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]])
}

/// The three Tyler standardizable double pair coincidences for `d = 1, k = 4`,
/// already in standardized form.
pub fn balanced_double_pairs() -> [Configuration; 3] {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let (a, b) = (vec![h, 0.0], vec![0.0, h]);
    [
        build(vec![a.clone(), a.clone(), b.clone(), b.clone()]),
        build(vec![a.clone(), b.clone(), a.clone(), b.clone()]),
        build(vec![a.clone(), b.clone(), b.clone(), a]),
    ]
}
