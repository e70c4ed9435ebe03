//! Pairs of distinct shapes in simultaneous block form that no pair of
//! neighborhoods separates, and the common sequence approaching both.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use super::{check_term_count, SequenceKind, SequenceTerm, ShapeSequence};
use crate::linalg::max_abs;
use crate::model::Configuration;
use crate::{Error, Result};

/// Relative size below which a block counts as zero.
const ZERO_BLOCK_TOL: f64 = 1e-12;
/// Relative tolerance for `Q_rs = D_r P_rs B_s`.
const FACTOR_TOL: f64 = 1e-9;

/// `p` and `q` partitioned into `l x m` blocks. Where both blocks are
/// nonzero, `Q_rs = D_r P_rs B_s` with `D_r = diag(row_factors[r])` and
/// `B_s = col_factors[s]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPair {
    pub p_matrix: DMatrix<f64>,
    pub q_matrix: DMatrix<f64>,
    pub block_rows: Vec<usize>,
    pub block_cols: Vec<usize>,
    pub row_factors: Vec<Vec<f64>>,
    pub col_factors: Vec<DMatrix<f64>>,
}

/// Exponents `d_r`, `b_s` of the scalings `n^{d_r} D_r` and `n^{-b_s} B_s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Speeds {
    pub rows: Vec<u32>,
    pub cols: Vec<u32>,
}

fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len() + 1);
    let mut acc = 0;
    out.push(0);
    for s in sizes {
        acc += s;
        out.push(acc);
    }
    out
}

fn invalid(msg: String) -> Error {
    Error::InvalidBlockPair(msg)
}

fn int_pow(base: f64, exp: i64) -> f64 {
    let mut acc = 1.0;
    for _ in 0..exp.unsigned_abs() {
        acc *= base;
    }
    if exp < 0 {
        1.0 / acc
    } else {
        acc
    }
}

impl BlockPair {
    pub fn l(&self) -> usize {
        self.block_rows.len()
    }

    pub fn m(&self) -> usize {
        self.block_cols.len()
    }

    pub fn p(&self) -> Result<Configuration> {
        Configuration::new(self.p_matrix.clone())
    }

    pub fn q(&self) -> Result<Configuration> {
        Configuration::new(self.q_matrix.clone())
    }

    fn block(&self, mat: &DMatrix<f64>, r: usize, s: usize) -> DMatrix<f64> {
        let (ro, co) = (offsets(&self.block_rows), offsets(&self.block_cols));
        mat.view((ro[r], co[s]), (self.block_rows[r], self.block_cols[s])).into_owned()
    }

    pub fn p_block(&self, r: usize, s: usize) -> DMatrix<f64> {
        self.block(&self.p_matrix, r, s)
    }

    pub fn q_block(&self, r: usize, s: usize) -> DMatrix<f64> {
        self.block(&self.q_matrix, r, s)
    }

    fn scale(&self) -> f64 {
        max_abs(&self.p_matrix).max(max_abs(&self.q_matrix))
    }

    /// `(P_rs != 0, Q_rs != 0)` for every block.
    pub fn pattern(&self) -> Vec<Vec<(bool, bool)>> {
        let cut = ZERO_BLOCK_TOL * self.scale();
        (0..self.l())
            .map(|r| {
                (0..self.m())
                    .map(|s| (max_abs(&self.p_block(r, s)) > cut, max_abs(&self.q_block(r, s)) > cut))
                    .collect()
            })
            .collect()
    }

    fn d_factor(&self, r: usize) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.row_factors[r].clone()))
    }

    fn d_factor_inv(&self, r: usize) -> DMatrix<f64> {
        let inv: Vec<f64> = self.row_factors[r].iter().map(|x| 1.0 / x).collect();
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(inv))
    }

    fn b_factor_inv(&self, s: usize) -> DMatrix<f64> {
        self.col_factors[s].clone().try_inverse().expect("validated factor")
    }

    /// Largest entry over all `D_r P_rs B_s` and `D_r^{-1} Q_rs B_s^{-1}`.
    pub fn max_block_norm(&self) -> f64 {
        let mut out = 0.0_f64;
        for r in 0..self.l() {
            for s in 0..self.m() {
                let dp = self.d_factor(r) * self.p_block(r, s) * &self.col_factors[s];
                let dq = self.d_factor_inv(r) * self.q_block(r, s) * self.b_factor_inv(s);
                out = out.max(max_abs(&dp)).max(max_abs(&dq));
            }
        }
        out
    }

    fn validate_shapes(&self) -> Result<()> {
        let (k, n) = self.p_matrix.shape();
        if self.q_matrix.shape() != (k, n) {
            return Err(invalid(format!("p is {k}x{n} but q is {:?}", self.q_matrix.shape())));
        }
        if self.block_rows.iter().sum::<usize>() != k || self.block_rows.contains(&0) {
            return Err(invalid(format!("row blocks {:?} do not partition {k} rows", self.block_rows)));
        }
        if self.block_cols.iter().sum::<usize>() != n || self.block_cols.contains(&0) {
            return Err(invalid(format!("column blocks {:?} do not partition {n} columns", self.block_cols)));
        }
        if self.row_factors.len() != self.l()
            || self.row_factors.iter().zip(&self.block_rows).any(|(f, &s)| f.len() != s)
        {
            return Err(invalid("row factors do not match the row blocks".into()));
        }
        if self.row_factors.iter().flatten().any(|x| !x.is_finite() || *x == 0.0) {
            return Err(invalid("row factors must be finite and nonzero".into()));
        }
        if self.col_factors.len() != self.m()
            || self.col_factors.iter().zip(&self.block_cols).any(|(f, &s)| f.shape() != (s, s))
        {
            return Err(invalid("column factors do not match the column blocks".into()));
        }
        if self.col_factors.iter().any(|f| f.clone().try_inverse().is_none()) {
            return Err(invalid("column factors must be nonsingular".into()));
        }
        Ok(())
    }

    /// Checks the structural conditions (i) to (iv) and that both members
    /// are full-rank configurations.
    pub fn validate(&self) -> Result<()> {
        self.validate_shapes()?;
        let (l, m) = (self.l(), self.m());
        if l < 2 || m < 2 {
            return Err(invalid(format!("(i): need l, m > 1, got l = {l}, m = {m}")));
        }
        for mat in [&self.p_matrix, &self.q_matrix] {
            let c = Configuration::new(mat.clone())?;
            if crate::linalg::numerical_rank(&c.unit_rows(), crate::DEFAULT_RANK_TOL) < c.d() + 1 {
                return Err(invalid("both members must have full rank".into()));
            }
        }
        let pat = self.pattern();
        let scale = self.scale();
        for r in 0..l {
            for s in 0..m {
                let (pn, qn) = pat[r][s];
                if pn && qn {
                    let mapped = self.d_factor(r) * self.p_block(r, s) * &self.col_factors[s];
                    if max_abs(&(mapped - self.q_block(r, s))) > FACTOR_TOL * scale {
                        return Err(invalid(format!("(ii): Q_{r}{s} != D_{r} P_{r}{s} B_{s}")));
                    }
                }
                if pn {
                    let hit = (0..=r).any(|a| (s..m).any(|b| (a, b) != (r, s) && pat[a][b].1));
                    if hit {
                        return Err(invalid(format!("(iii): P block ({r}, {s}) must vanish")));
                    }
                }
                if qn {
                    let hit = (r..l).any(|a| (0..=s).any(|b| (a, b) != (r, s) && pat[a][b].0));
                    if hit {
                        return Err(invalid(format!("(iv): Q block ({r}, {s}) must vanish")));
                    }
                }
            }
        }
        for (r, s) in [(0, 0), (l - 1, m - 1)] {
            if pat[r][s] != (true, true) {
                return Err(invalid(format!("corner block ({r}, {s}) must be nonzero in both")));
            }
        }
        Ok(())
    }

    /// Smallest nonnegative integer speeds with `d_r`, `b_s` strictly
    /// increasing, `d_r = b_s` on blocks nonzero in both, `d_r < b_s` on
    /// blocks nonzero only in `p` and `d_r > b_s` on blocks nonzero only in
    /// `q`.
    pub fn speeds(&self) -> Result<Speeds> {
        let (l, m) = (self.l(), self.m());
        let mut edges: Vec<(usize, usize, i64)> = Vec::new();
        for r in 1..l {
            edges.push((r - 1, r, 1));
        }
        for s in 1..m {
            edges.push((l + s - 1, l + s, 1));
        }
        for (r, row) in self.pattern().into_iter().enumerate() {
            for (s, cell) in row.into_iter().enumerate() {
                match cell {
                    (true, true) => {
                        edges.push((r, l + s, 0));
                        edges.push((l + s, r, 0));
                    }
                    (true, false) => edges.push((r, l + s, 1)),
                    (false, true) => edges.push((l + s, r, 1)),
                    (false, false) => {}
                }
            }
        }
        // longest paths from a virtual source at 0; a positive cycle means
        // the ordering constraints are contradictory
        let v = l + m;
        let mut x = vec![0_i64; v];
        for round in 0..=v {
            let mut changed = false;
            for &(a, b, w) in &edges {
                if x[a] + w > x[b] {
                    x[b] = x[a] + w;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            if round == v {
                return Err(invalid("speed constraints are contradictory".into()));
            }
        }
        Ok(Speeds {
            rows: x[..l].iter().map(|&e| e as u32).collect(),
            cols: x[l..].iter().map(|&e| e as u32).collect(),
        })
    }
}

/// The pair `P = (1; Id; e_{d+1})`, `Q = (e_1; e_1; e_2 .. e_{d+1}; 1)` of
/// frame-containing shapes, padded to `k` landmarks by repeating the last
/// row of each.
pub fn nonhausdorff_witness(d: usize, k: usize) -> Result<BlockPair> {
    if d < 1 || k < d + 3 {
        return Err(Error::DimensionMismatch(format!("a witness needs d >= 1 and k >= d + 3, got d = {d}, k = {k}")));
    }
    let n = d + 1;
    let mut p = DMatrix::zeros(k, n);
    let mut q = DMatrix::zeros(k, n);
    for c in 0..n {
        p[(0, c)] = 1.0;
        p[(c + 1, c)] = 1.0;
        q[(c + 1, c)] = 1.0;
    }
    q[(0, 0)] = 1.0;
    for i in d + 2..k {
        p[(i, d)] = 1.0;
        for c in 0..n {
            q[(i, c)] = 1.0;
        }
    }
    let mut block_rows = vec![2];
    block_rows.extend(core::iter::repeat_n(1, d - 1));
    block_rows.push(k - d - 1);
    let block_cols = vec![1; n];
    let pair = BlockPair {
        p_matrix: p,
        q_matrix: q,
        row_factors: block_rows.iter().map(|&s| vec![1.0; s]).collect(),
        col_factors: vec![DMatrix::identity(1, 1); n],
        block_rows,
        block_cols,
    };
    pair.validate()?;
    Ok(pair)
}

fn merge_term_with(pair: &BlockPair, speeds: &Speeds, n: u64) -> Result<SequenceTerm> {
    let (ro, co) = (offsets(&pair.block_rows), offsets(&pair.block_cols));
    let pat = pair.pattern();
    let nf = n as f64;
    let mut a = DMatrix::zeros(pair.p_matrix.nrows(), pair.p_matrix.ncols());
    let mut qa = a.clone();
    for r in 0..pair.l() {
        for s in 0..pair.m() {
            let e = speeds.cols[s] as i64 - speeds.rows[r] as i64;
            let block = if pat[r][s].0 {
                pair.p_block(r, s)
            } else {
                pair.d_factor_inv(r) * pair.q_block(r, s) * pair.b_factor_inv(s) * int_pow(nf, e)
            };
            let mapped = pair.d_factor(r) * &block * &pair.col_factors[s] * int_pow(nf, -e);
            let (h, w) = (pair.block_rows[r], pair.block_cols[s]);
            a.view_mut((ro[r], co[s]), (h, w)).copy_from(&block);
            qa.view_mut((ro[r], co[s]), (h, w)).copy_from(&mapped);
        }
    }
    let residuals = vec![max_abs(&(&a - &pair.p_matrix)), max_abs(&(&qa - &pair.q_matrix))];
    Ok(SequenceTerm { n, representatives: vec![Configuration::new(a)?, Configuration::new(qa)?], residuals })
}

/// The configuration `A(n)` near `p` and its transform `D(n) A(n) B(n)` near
/// `q`; both represent the same shape.
pub fn merge_term(pair: &BlockPair, n: u64) -> Result<SequenceTerm> {
    pair.validate()?;
    if n == 0 {
        return Err(Error::InvariantViolation("merge terms start at n = 1".into()));
    }
    merge_term_with(pair, &pair.speeds()?, n)
}

pub fn merge_sequence(pair: &BlockPair, n_terms: usize) -> Result<ShapeSequence> {
    check_term_count(n_terms)?;
    pair.validate()?;
    let speeds = pair.speeds()?;
    let terms = (1..=n_terms as u64).map(|n| merge_term_with(pair, &speeds, n)).collect::<Result<Vec<_>>>()?;
    Ok(ShapeSequence {
        kind: SequenceKind::Merge,
        description: format!("A(n) with speeds d = {:?}, b = {:?}", speeds.rows, speeds.cols),
        terms,
        limits: vec![pair.p()?, pair.q()?],
        fixed_shape: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{find_frame, shape_equal};
    use crate::Options;

    #[test]
    fn smallest_witness_matches_displayed_matrices() {
        let w = nonhausdorff_witness(1, 4).unwrap();
        let p = DMatrix::from_row_slice(4, 2, &[1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0]);
        let q = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        assert_eq!(w.p_matrix, p);
        assert_eq!(w.q_matrix, q);
        assert_eq!(w.block_rows, vec![2, 2]);
        assert_eq!(w.speeds().unwrap(), Speeds { rows: vec![0, 1], cols: vec![0, 1] });
    }

    #[test]
    fn witnesses_are_valid_frames() {
        let opts = Options::default();
        for d in 1..=4 {
            for k in d + 3..d + 6 {
                let w = nonhausdorff_witness(d, k).unwrap();
                let (p, q) = (w.p().unwrap(), w.q().unwrap());
                assert!(find_frame(&p, &opts).unwrap().is_some());
                assert!(find_frame(&q, &opts).unwrap().is_some());
                assert!(!shape_equal(&p, &q, 1e-8, &opts).unwrap());
                let sp = w.speeds().unwrap();
                assert_eq!(sp.rows, (0..d as u32 + 1).collect::<Vec<_>>());
                assert_eq!(sp.cols, sp.rows);
            }
        }
    }

    #[test]
    fn merge_representatives_share_a_shape() {
        let opts = Options::default();
        let w = nonhausdorff_witness(2, 5).unwrap();
        let bound = w.max_block_norm();
        for n in [10, 100, 1000] {
            let t = merge_term(&w, n).unwrap();
            assert!(shape_equal(&t.representatives[0], &t.representatives[1], 1e-8, &opts).unwrap());
            for r in &t.residuals {
                assert!(*r <= bound / n as f64 + 1e-15);
            }
        }
    }

    #[test]
    fn broken_zero_pattern_is_rejected() {
        let mut w = nonhausdorff_witness(1, 4).unwrap();
        w.p_matrix[(2, 0)] = 0.5;
        assert!(matches!(w.validate(), Err(Error::InvalidBlockPair(_))));
        assert!(matches!(merge_sequence(&w, 3), Err(Error::InvalidBlockPair(_))));
    }

    #[test]
    fn single_blocks_are_rejected() {
        let mut w = nonhausdorff_witness(1, 4).unwrap();
        w.block_rows = vec![4];
        w.row_factors = vec![vec![1.0; 4]];
        assert!(matches!(w.validate(), Err(Error::InvalidBlockPair(_))));
    }
}
