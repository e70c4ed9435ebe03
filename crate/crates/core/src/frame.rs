//! Frames, pseudo-frames and the chart coordinates they induce.
//!
//! Given `d + 1` landmarks in general position (the *base*), a configuration
//! is brought to graph form `[Id; P_*]` with `P_* = P_1 P_0^{-1}`. The columns
//! of `P_*` are the vertices of an edge-coloured graph: landmark `l` outside
//! the base joins vertices `a` and `b` whenever both `P_*[l, a]` and
//! `P_*[l, b]` are nonzero. A configuration is free exactly when this graph is
//! connected, and any spanning tree of it (a pseudo-frame) yields a chart.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use itertools::Itertools;
use nalgebra::{DMatrix, RowDVector};

use crate::linalg::{numerical_rank, rank_of_rows};
use crate::model::{canonicalize_point, Configuration, ProjectivePoint};
use crate::{Error, Options, Result};

/// An edge between base columns `a < b`, coloured by landmark `color`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColoredEdge {
    pub a: usize,
    pub b: usize,
    pub color: usize,
}

impl ColoredEdge {
    pub fn new(a: usize, b: usize, color: usize) -> Self {
        ColoredEdge {
            a: a.min(b),
            b: a.max(b),
            color,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    /// Base landmarks; vertex `v` is the column belonging to `base[v]`.
    pub base: Vec<usize>,
    /// Sorted by `(a, b, color)`.
    pub edges: Vec<ColoredEdge>,
}

impl ColoredGraph {
    pub fn vertex_count(&self) -> usize {
        self.base.len()
    }

    pub fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.vertex_count());
        for e in &self.edges {
            uf.union(e.a, e.b);
        }
        uf.components() == 1
    }
}

/// `P_*` together with the landmark index of each of its rows.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphForm {
    pub base: Vec<usize>,
    /// Landmarks outside the base, in increasing order; row `r` of `matrix`
    /// belongs to `others[r]`.
    pub others: Vec<usize>,
    pub matrix: DMatrix<f64>,
    nonzero_cutoff: f64,
}

impl GraphForm {
    fn row_of(&self, landmark: usize) -> Option<usize> {
        self.others.binary_search(&landmark).ok()
    }

    /// Whether `P_*[row, col]` counts as nonzero: above the rank tolerance
    /// relative to the row norm.
    pub fn is_nonzero(&self, row: usize, col: usize) -> bool {
        let norm = self.matrix.row(row).norm();
        self.matrix[(row, col)].abs() > self.nonzero_cutoff * norm
    }

    fn support(&self, row: usize) -> Vec<usize> {
        (0..self.matrix.ncols()).filter(|&c| self.is_nonzero(row, c)).collect()
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }

    pub(crate) fn components(&mut self) -> usize {
        (0..self.parent.len()).filter(|&x| self.find(x) == x).count()
    }
}

fn check_indices(idx: &[usize], k: usize) -> Result<()> {
    if let Some(bad) = idx.iter().find(|&&i| i >= k) {
        return Err(Error::DimensionMismatch(format!("landmark index {bad} out of range for k = {k}")));
    }
    Ok(())
}

pub fn normalize_to_graph_form(c: &Configuration, base: &[usize], opts: &Options<'_>) -> Result<GraphForm> {
    let (d, k) = (c.d(), c.k());
    if base.len() != d + 1 {
        return Err(Error::DimensionMismatch(format!("base of size {} for d = {d}", base.len())));
    }
    check_indices(base, k)?;
    if rank_of_rows(&c.unit_rows(), base, opts.rank_tol) < d + 1 {
        return Err(Error::SingularBase);
    }
    let p0 = c.matrix().select_rows(base.iter());
    let others: Vec<usize> = (0..k).filter(|i| !base.contains(i)).collect();
    let p1 = c.matrix().select_rows(others.iter());
    // P_* P_0 = P_1  <=>  P_0^t P_*^t = P_1^t
    let star_t = p0
        .transpose()
        .lu()
        .solve(&p1.transpose())
        .ok_or(Error::SingularBase)?;
    Ok(GraphForm {
        base: base.to_vec(),
        others,
        matrix: star_t.transpose(),
        nonzero_cutoff: opts.rank_tol * k.max(d + 1) as f64,
    })
}

fn graph_from_form(form: &GraphForm) -> ColoredGraph {
    let mut edges = Vec::new();
    for (row, &color) in form.others.iter().enumerate() {
        for pair in form.support(row).into_iter().combinations(2) {
            edges.push(ColoredEdge::new(pair[0], pair[1], color));
        }
    }
    edges.sort();
    ColoredGraph {
        base: form.base.clone(),
        edges,
    }
}

pub fn graph_of(c: &Configuration, base: &[usize], opts: &Options<'_>) -> Result<ColoredGraph> {
    Ok(graph_from_form(&normalize_to_graph_form(c, base, opts)?))
}

fn ensure_budget(count: u128, what: &str, opts: &Options<'_>) -> Result<()> {
    if count > opts.search_budget() {
        return Err(Error::InstanceTooLarge(format!("{count} candidate {what}")));
    }
    Ok(())
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    (0..r.min(n - r)).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Lexicographically smallest set of `d + 1` landmarks spanning `R^{d+1}`.
pub fn first_general_position_base(c: &Configuration, opts: &Options<'_>) -> Result<Option<Vec<usize>>> {
    let (d, k) = (c.d(), c.k());
    let unit = c.unit_rows();
    if numerical_rank(&unit, opts.rank_tol) < d + 1 {
        return Ok(None);
    }
    ensure_budget(binomial(k, d + 1), "bases", opts)?;
    for s in (0..k).combinations(d + 1) {
        opts.check_cancel()?;
        if rank_of_rows(&unit, &s, opts.rank_tol) == d + 1 {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

pub fn is_free_via_graph(c: &Configuration, opts: &Options<'_>) -> Result<bool> {
    match first_general_position_base(c, opts)? {
        Some(base) => Ok(graph_of(c, &base, opts)?.is_connected()),
        None => Ok(false),
    }
}

fn is_frame(unit: &DMatrix<f64>, idx: &[usize], tol: f64) -> bool {
    idx.iter()
        .copied()
        .combinations(idx.len() - 1)
        .all(|s| rank_of_rows(unit, &s, tol) == idx.len() - 1)
}

/// Lexicographically smallest `d + 2` landmarks in general position.
pub fn find_frame(c: &Configuration, opts: &Options<'_>) -> Result<Option<Vec<usize>>> {
    let (d, k) = (c.d(), c.k());
    let unit = c.unit_rows();
    if numerical_rank(&unit, opts.rank_tol) < d + 1 {
        return Ok(None);
    }
    ensure_budget(binomial(k, d + 2), "frames", opts)?;
    for s in (0..k).combinations(d + 2) {
        opts.check_cancel()?;
        if is_frame(&unit, &s, opts.rank_tol) {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// `d + 1` base landmarks plus a spanning tree of their graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoFrame {
    pub base: Vec<usize>,
    pub tree: Vec<ColoredEdge>,
}

impl PseudoFrame {
    /// Colours used by the tree, increasing.
    pub fn colors(&self) -> Vec<usize> {
        self.tree.iter().map(|e| e.color).sorted().dedup().collect()
    }

    /// `|E_l|`.
    pub fn edges_with_color(&self, color: usize) -> usize {
        self.tree.iter().filter(|e| e.color == color).count()
    }

    /// `#E`, the number of distinct colours.
    pub fn color_count(&self) -> usize {
        self.colors().len()
    }

    /// The single colour of a uni-coloured tree, if it is one.
    pub fn uniform_color(&self) -> Option<usize> {
        match self.colors().as_slice() {
            [l] => Some(*l),
            _ => None,
        }
    }

    fn validate(&self, d: usize, k: usize) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidPseudoFrame(m.into()));
        if self.base.len() != d + 1 || self.base.iter().sorted().dedup().count() != d + 1 {
            return bad("base must hold d + 1 distinct landmarks");
        }
        check_indices(&self.base, k)?;
        if self.tree.len() != d {
            return bad("a spanning tree on d + 1 vertices has d edges");
        }
        let mut uf = UnionFind::new(d + 1);
        for e in &self.tree {
            if e.a >= e.b || e.b > d {
                return bad("edge endpoints must be distinct base columns");
            }
            if e.color >= k || self.base.contains(&e.color) {
                return bad("edge colours must be landmarks outside the base");
            }
            if !uf.union(e.a, e.b) {
                return bad("tree contains a cycle");
            }
        }
        // every colour class must itself be connected, otherwise the tree
        // entries cannot all be scaled to one
        for l in self.colors() {
            let mut uf = UnionFind::new(d + 1);
            let mut touched = Vec::new();
            for e in self.tree.iter().filter(|e| e.color == l) {
                uf.union(e.a, e.b);
                touched.extend([e.a, e.b]);
            }
            let roots = touched.iter().map(|&v| uf.find(v)).sorted().dedup().count();
            if roots != 1 {
                return bad("edges of one colour must form a connected subtree");
            }
        }
        Ok(())
    }
}

/// Breadth-first spanning tree from column 0. At each vertex the colours are
/// scanned in increasing order and a colour claims every still unvisited
/// column it touches, so each colour class is a star.
fn spanning_tree(form: &GraphForm) -> Option<Vec<ColoredEdge>> {
    let n = form.matrix.ncols();
    let mut visited = vec![false; n];
    let mut queue = alloc::collections::VecDeque::from([0usize]);
    visited[0] = true;
    let mut tree = Vec::new();
    while let Some(v) = queue.pop_front() {
        for (row, &color) in form.others.iter().enumerate() {
            if !form.is_nonzero(row, v) {
                continue;
            }
            for w in form.support(row) {
                if !visited[w] {
                    visited[w] = true;
                    tree.push(ColoredEdge::new(v, w, color));
                    queue.push_back(w);
                }
            }
        }
    }
    visited.iter().all(|&x| x).then(|| {
        tree.sort_by_key(|e| (e.color, e.a, e.b));
        tree
    })
}

/// A pseudo-frame of a free configuration, chosen deterministically; `None`
/// when the configuration is not free.
pub fn find_pseudo_frame(c: &Configuration, opts: &Options<'_>) -> Result<Option<PseudoFrame>> {
    let Some(base) = first_general_position_base(c, opts)? else {
        return Ok(None);
    };
    let form = normalize_to_graph_form(c, &base, opts)?;
    Ok(spanning_tree(&form).map(|tree| PseudoFrame { base, tree }))
}

/// Maps the frame `frame` to the standard frame (unit vectors followed by the
/// all-ones row) and returns the remaining landmarks, in increasing index
/// order, as canonical projective points.
pub fn frame_coordinates(c: &Configuration, frame: &[usize], opts: &Options<'_>) -> Result<Vec<ProjectivePoint>> {
    let (d, k) = (c.d(), c.k());
    if frame.len() != d + 2 || frame.iter().sorted().dedup().count() != d + 2 {
        return Err(Error::NotAFrame);
    }
    check_indices(frame, k)?;
    if !is_frame(&c.unit_rows(), frame, opts.rank_tol) {
        return Err(Error::NotAFrame);
    }
    let f0 = c.matrix().select_rows(frame[..=d].iter());
    let inv = f0.try_inverse().ok_or(Error::NotAFrame)?;
    let unit_point: RowDVector<f64> = c.matrix().row(frame[d + 1]) * &inv;
    let mut b = inv;
    for (mut col, lambda) in b.column_iter_mut().zip(unit_point.iter()) {
        col /= *lambda;
    }
    (0..k)
        .filter(|i| !frame.contains(i))
        .map(|i| {
            let row = c.matrix().row(i) * &b;
            canonicalize_point(row.as_slice())
        })
        .collect()
}

/// Configuration with the standard frame at the positions `frame` and the
/// given points everywhere else, in increasing index order.
pub fn from_frame_coordinates(frame: &[usize], points: &[ProjectivePoint]) -> Result<Configuration> {
    let d = frame.len().checked_sub(2).ok_or(Error::NotAFrame)?;
    let k = d + 2 + points.len();
    check_indices(frame, k)?;
    let mut rows = vec![Vec::new(); k];
    for (v, &idx) in frame[..=d].iter().enumerate() {
        let mut e = vec![0.0; d + 1];
        e[v] = 1.0;
        rows[idx] = e;
    }
    rows[frame[d + 1]] = vec![1.0; d + 1];
    let mut pts = points.iter();
    for row in rows.iter_mut().filter(|r| r.is_empty()) {
        let p = pts.next().ok_or(Error::NotAFrame)?;
        if p.coords().len() != d + 1 {
            return Err(Error::DimensionMismatch("point of wrong dimension".into()));
        }
        *row = p.coords().to_vec();
    }
    Configuration::from_rows(&rows)
}

/// Normalized row of a landmark used by the tree: the entries outside the
/// columns its colour touches (those are scaled to exactly one).
#[derive(Debug, Clone, PartialEq)]
pub struct TreeRow {
    pub color: usize,
    pub values: Vec<f64>,
}

/// Coordinates of a shape in the chart of a pseudo-frame: a product of
/// `k - d - 1 - #E` copies of `RP^d` and one `R^{d - |E_l|}` per colour.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    pub free_landmarks: Vec<usize>,
    pub free_points: Vec<ProjectivePoint>,
    pub tree_rows: Vec<TreeRow>,
}

impl ChartPoint {
    pub fn dimension(&self, d: usize) -> usize {
        d * self.free_points.len() + self.tree_rows.iter().map(|r| r.values.len()).sum::<usize>()
    }
}

pub fn pseudo_frame_coordinates(c: &Configuration, pf: &PseudoFrame, opts: &Options<'_>) -> Result<ChartPoint> {
    let (d, k) = (c.d(), c.k());
    pf.validate(d, k)?;
    let form = normalize_to_graph_form(c, &pf.base, opts)?;
    let colors = pf.colors();

    let mut touched: Vec<Vec<usize>> = Vec::with_capacity(colors.len());
    for &l in &colors {
        let row = form.row_of(l).expect("colour outside base");
        let cols: Vec<usize> = pf
            .tree
            .iter()
            .filter(|e| e.color == l)
            .flat_map(|e| [e.a, e.b])
            .sorted()
            .dedup()
            .collect();
        if let Some(&col) = cols.iter().find(|&&col| !form.is_nonzero(row, col)) {
            return Err(Error::PseudoFrameAbsent(format!(
                "entry of landmark {l} at base column {col} vanishes"
            )));
        }
        touched.push(cols);
    }

    // Solve r_l * P_*[l, v] * s_v = 1 on the tree, with s_0 = 1. The bipartite
    // column/colour incidence is a tree, so propagation reaches everything
    // exactly once.
    let mut col_scale: Vec<Option<f64>> = vec![None; d + 1];
    let mut row_scale: Vec<Option<f64>> = vec![None; colors.len()];
    col_scale[0] = Some(1.0);
    let mut progress = true;
    while progress {
        progress = false;
        for (ci, &l) in colors.iter().enumerate() {
            let row = form.row_of(l).expect("colour outside base");
            if row_scale[ci].is_none() {
                if let Some(&v) = touched[ci].iter().find(|&&v| col_scale[v].is_some()) {
                    row_scale[ci] = Some(1.0 / (form.matrix[(row, v)] * col_scale[v].unwrap()));
                    progress = true;
                }
            }
            if let Some(r) = row_scale[ci] {
                for &v in &touched[ci] {
                    if col_scale[v].is_none() {
                        col_scale[v] = Some(1.0 / (form.matrix[(row, v)] * r));
                        progress = true;
                    }
                }
            }
        }
    }
    let col_scale: Vec<f64> = col_scale.into_iter().map(|s| s.expect("tree spans all columns")).collect();

    let scaled_row = |row: usize| -> Vec<f64> {
        (0..=d).map(|v| form.matrix[(row, v)] * col_scale[v]).collect()
    };

    let tree_rows = colors
        .iter()
        .enumerate()
        .map(|(ci, &l)| {
            let r = row_scale[ci].unwrap();
            let full = scaled_row(form.row_of(l).unwrap());
            TreeRow {
                color: l,
                values: (0..=d).filter(|v| !touched[ci].contains(v)).map(|v| full[v] * r).collect(),
            }
        })
        .collect();

    let mut free_landmarks = Vec::new();
    let mut free_points = Vec::new();
    for (row, &l) in form.others.iter().enumerate() {
        if colors.contains(&l) {
            continue;
        }
        free_landmarks.push(l);
        free_points.push(canonicalize_point(&scaled_row(row))?);
    }

    let chart = ChartPoint {
        free_landmarks,
        free_points,
        tree_rows,
    };
    assert_eq!(chart.dimension(d), d * (k - d - 2), "chart dimension identity");
    Ok(chart)
}

/// Default tolerance for chart comparisons.
pub const DEFAULT_COMPARE_TOL: f64 = 1e-8;

/// Decides `[a] = [b]` for a free `a` by comparing chart coordinates in the
/// canonical pseudo-frame of `a`.
pub fn shape_equal(a: &Configuration, b: &Configuration, tol: f64, opts: &Options<'_>) -> Result<bool> {
    if a.d() != b.d() || a.k() != b.k() {
        return Err(Error::DimensionMismatch(format!(
            "shapes with (d, k) = ({}, {}) and ({}, {})",
            a.d(),
            a.k(),
            b.d(),
            b.k()
        )));
    }
    let pf = find_pseudo_frame(a, opts)?.ok_or(Error::NotFree)?;
    let ca = pseudo_frame_coordinates(a, &pf, opts)?;
    let cb = match pseudo_frame_coordinates(b, &pf, opts) {
        Ok(cb) => cb,
        Err(Error::SingularBase) | Err(Error::PseudoFrameAbsent(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    let rows_match = ca.tree_rows.iter().zip(&cb.tree_rows).all(|(x, y)| {
        x.values
            .iter()
            .zip(&y.values)
            .all(|(u, v)| (u - v).abs() <= tol * 1.0_f64.max(u.abs()).max(v.abs()))
    });
    let points_match = ca
        .free_points
        .iter()
        .zip(&cb.free_points)
        .all(|(u, v)| u.alignment(v) >= 1.0 - tol);
    Ok(rows_match && points_match)
}
