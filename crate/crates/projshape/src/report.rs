//! Serializable reports. Landmark indices and graph vertices are 1-based in
//! every report.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use projshape_core::frame::{find_pseudo_frame, first_general_position_base, graph_of};
use projshape_core::numbers::{gcd, hausdorff_violations};
use projshape_core::oracle::{SequenceKind, ShapeSequence};
use projshape_core::tyler::{SignAlignment, Standardizability, TylerStandardization};
use projshape_core::{
    constraint_flats, find_frame, is_hausdorff_numbers, is_maximal_numbers, is_standardizable, is_splittable,
    pseudo_frame_coordinates, tyler_numbers, BlockPair, ColoredGraph, Configuration, ConstraintReport, Error,
    Options, PseudoFrame, SubspaceNumbers,
};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::format::matrix_rows;

pub const SCHEMA_VERSION: u32 = 1;

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

/// SHA-256 over `d`, `k` and the bit patterns of the entries in row-major
/// order, so JSON and CSV copies of a configuration share a digest.
pub fn configuration_digest(c: &Configuration) -> String {
    let mut h = Sha256::new();
    h.update((c.d() as u64).to_le_bytes());
    h.update((c.k() as u64).to_le_bytes());
    for row in c.rows() {
        for x in row {
            h.update(x.to_bits().to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct FlatEntry {
    pub indices: Vec<usize>,
    pub rank: usize,
}

/// `{"1": [{"indices": [...], "rank": r}], ...}`, one key per level.
pub type FlatsByLevel = BTreeMap<String, Vec<FlatEntry>>;

pub fn flats_by_level(report: &ConstraintReport) -> FlatsByLevel {
    (1..=report.d())
        .map(|j| {
            let flats = report
                .flats(j)
                .iter()
                .map(|f| FlatEntry { indices: one_based(&f.indices), rank: f.rank })
                .collect();
            (j.to_string(), flats)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct FlatsReport {
    pub schema_version: u32,
    pub flats: FlatsByLevel,
}

impl From<&ConstraintReport> for FlatsReport {
    fn from(r: &ConstraintReport) -> Self {
        FlatsReport { schema_version: SCHEMA_VERSION, flats: flats_by_level(r) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct EdgeEntry {
    pub a: usize,
    pub b: usize,
    pub color: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct GraphReport {
    /// Base landmarks; vertex `v` is the column of `base[v - 1]`.
    pub base: Vec<usize>,
    pub edges: Vec<EdgeEntry>,
    pub connected: bool,
}

impl From<&ColoredGraph> for GraphReport {
    fn from(g: &ColoredGraph) -> Self {
        GraphReport {
            base: one_based(&g.base),
            edges: g.edges.iter().map(|e| EdgeEntry { a: e.a + 1, b: e.b + 1, color: e.color + 1 }).collect(),
            connected: g.is_connected(),
        }
    }
}

impl GraphReport {
    /// Graphviz rendering; vertices are named by their base landmark.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for (v, l) in self.base.iter().enumerate() {
            let _ = writeln!(out, "  v{} [label=\"{l}\"];", v + 1);
        }
        for e in &self.edges {
            let _ = writeln!(out, "  v{} -- v{} [label=\"{}\"];", e.a, e.b, e.color);
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct PseudoFrameReport {
    pub base: Vec<usize>,
    pub tree: Vec<EdgeEntry>,
    pub colors: Vec<usize>,
}

impl From<&PseudoFrame> for PseudoFrameReport {
    fn from(pf: &PseudoFrame) -> Self {
        PseudoFrameReport {
            base: one_based(&pf.base),
            tree: pf.tree.iter().map(|e| EdgeEntry { a: e.a + 1, b: e.b + 1, color: e.color + 1 }).collect(),
            colors: one_based(&pf.colors()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct TreeRowEntry {
    pub color: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ChartReport {
    pub dimension: usize,
    pub free_landmarks: Vec<usize>,
    pub free_points: Vec<Vec<f64>>,
    pub tree_rows: Vec<TreeRowEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct SplitEntry {
    pub indices: Vec<usize>,
    pub complement: Vec<usize>,
    pub dim: usize,
    pub complement_rank: usize,
    pub rank_deficient: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum StandardizableClass {
    TylerRegular,
    BalancedSplittable,
    No,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct StandardizableEntry {
    pub class: StandardizableClass,
    /// The balanced split `(I, j)` for the balanced case.
    pub indices: Option<Vec<usize>>,
    pub dim: Option<usize>,
}

impl From<&Standardizability> for StandardizableEntry {
    fn from(s: &Standardizability) -> Self {
        match s {
            Standardizability::TylerRegular => {
                StandardizableEntry { class: StandardizableClass::TylerRegular, indices: None, dim: None }
            }
            Standardizability::BalancedSplittable { indices, dim } => StandardizableEntry {
                class: StandardizableClass::BalancedSplittable,
                indices: Some(one_based(indices)),
                dim: Some(*dim),
            },
            Standardizability::No => StandardizableEntry { class: StandardizableClass::No, indices: None, dim: None },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct SubspaceNumberCheck {
    pub n: Vec<usize>,
    pub satisfied: bool,
    pub hausdorff: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub input_digest: String,
    pub d: usize,
    pub k: usize,
    pub rank: usize,
    pub flats: FlatsByLevel,
    pub general_position: bool,
    pub splittable: bool,
    pub split_witness: Option<SplitEntry>,
    pub free: bool,
    pub tyler_regular: bool,
    pub standardizable: StandardizableEntry,
    pub frame: Option<Vec<usize>>,
    pub graph: Option<GraphReport>,
    pub pseudo_frame: Option<PseudoFrameReport>,
    pub chart: Option<ChartReport>,
    pub subspace_numbers: Option<SubspaceNumberCheck>,
}

fn inconsistent(what: &str) -> Error {
    Error::InvariantViolation(format!("inconsistent classification: {what}"))
}

pub fn analyze(
    c: &Configuration,
    sn: Option<&SubspaceNumbers>,
    opts: &Options<'_>,
) -> Result<AnalysisReport, Error> {
    let report = constraint_flats(c, opts)?;
    let split = is_splittable(c, opts)?;
    let free = split.is_none();
    let frame = find_frame(c, opts)?;
    let graph = match first_general_position_base(c, opts)? {
        Some(base) => Some(graph_of(c, &base, opts)?),
        None => None,
    };
    let pf = find_pseudo_frame(c, opts)?;
    let chart = match &pf {
        Some(pf) => {
            let chart = pseudo_frame_coordinates(c, pf, opts)?;
            Some(ChartReport {
                dimension: chart.dimension(c.d()),
                free_landmarks: one_based(&chart.free_landmarks),
                free_points: chart.free_points.iter().map(|p| p.coords().to_vec()).collect(),
                tree_rows: chart
                    .tree_rows
                    .iter()
                    .map(|r| TreeRowEntry { color: r.color + 1, values: r.values.clone() })
                    .collect(),
            })
        }
        None => None,
    };
    let standardizable = is_standardizable(c, opts)?;
    let tyler_regular = report.is_tyler_regular();

    if graph.as_ref().is_some_and(|g| g.is_connected() != free) {
        return Err(inconsistent("graph connectivity disagrees with splittability"));
    }
    if pf.is_some() != free {
        return Err(inconsistent("pseudo-frame existence disagrees with freeness"));
    }
    if frame.is_some() && !free {
        return Err(inconsistent("a frame in a splittable configuration"));
    }
    if tyler_regular != (standardizable == Standardizability::TylerRegular) {
        return Err(inconsistent("Tyler regularity"));
    }
    if let Some(ch) = &chart {
        if ch.dimension != c.d() * (c.k() - c.d() - 2) {
            return Err(inconsistent("chart dimension"));
        }
    }

    let subspace_numbers = match sn {
        Some(n) => {
            if n.d() != c.d() {
                return Err(Error::DimensionMismatch(format!("{} subspace numbers for d = {}", n.d(), c.d())));
            }
            Some(SubspaceNumberCheck {
                n: n.as_slice().to_vec(),
                satisfied: report.satisfies(n)?,
                hausdorff: is_hausdorff_numbers(n, c.k()),
            })
        }
        None => None,
    };

    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        input_digest: configuration_digest(c),
        d: c.d(),
        k: c.k(),
        rank: report.rank(),
        flats: flats_by_level(&report),
        general_position: !report.has_nontrivial(),
        splittable: !free,
        split_witness: split.map(|w| SplitEntry {
            complement: one_based(&w.complement(c.k())),
            indices: one_based(&w.indices),
            dim: w.dim,
            complement_rank: w.complement_rank,
            rank_deficient: w.rank_deficient,
        }),
        free,
        tyler_regular,
        standardizable: (&standardizable).into(),
        frame: frame.map(|f| one_based(&f)),
        graph: graph.as_ref().map(GraphReport::from),
        pseudo_frame: pf.as_ref().map(PseudoFrameReport::from),
        chart,
        subspace_numbers,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct StandardizationReport {
    pub schema_version: u32,
    pub d: usize,
    pub k: usize,
    pub matrix: Vec<Vec<f64>>,
    pub projection: Vec<Vec<f64>>,
    pub residual: f64,
    pub column_residual: f64,
    pub row_residual: f64,
    pub iterations: usize,
}

impl From<&TylerStandardization> for StandardizationReport {
    fn from(s: &TylerStandardization) -> Self {
        StandardizationReport {
            schema_version: SCHEMA_VERSION,
            d: s.d(),
            k: s.k(),
            matrix: matrix_rows(&s.matrix),
            projection: matrix_rows(&s.projection),
            residual: s.residual,
            column_residual: s.column_residual,
            row_residual: s.row_residual,
            iterations: s.iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct StandardizationSummary {
    pub class: StandardizableClass,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct DistanceReport {
    pub schema_version: u32,
    pub distance: f64,
    /// Row signs applied to the first projection.
    pub signs: Vec<i8>,
    /// False when an input is only balanced splittable; the value is then
    /// not a distance between separated shapes.
    pub metric_regime: bool,
    pub a: StandardizationSummary,
    pub b: StandardizationSummary,
}

impl DistanceReport {
    pub fn new(
        alignment: &SignAlignment,
        a: (&TylerStandardization, &Standardizability),
        b: (&TylerStandardization, &Standardizability),
    ) -> Self {
        let summary = |(s, class): (&TylerStandardization, &Standardizability)| StandardizationSummary {
            class: StandardizableEntry::from(class).class,
            residual: s.residual,
            iterations: s.iterations,
        };
        DistanceReport {
            schema_version: SCHEMA_VERSION,
            distance: alignment.distance,
            signs: alignment.signs.clone(),
            metric_regime: *a.1 == Standardizability::TylerRegular && *b.1 == Standardizability::TylerRegular,
            a: summary(a),
            b: summary(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SequenceTermEntry {
    pub n: u64,
    pub representatives: Vec<Vec<Vec<f64>>>,
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SequenceReport {
    pub schema_version: u32,
    pub kind: String,
    pub description: String,
    pub limits: Vec<Vec<Vec<f64>>>,
    pub fixed_shape: Option<Vec<Vec<f64>>>,
    pub terms: Vec<SequenceTermEntry>,
}

impl From<&ShapeSequence> for SequenceReport {
    fn from(s: &ShapeSequence) -> Self {
        SequenceReport {
            schema_version: SCHEMA_VERSION,
            kind: match s.kind {
                SequenceKind::Blur => "blur".into(),
                SequenceKind::Merge => "merge".into(),
            },
            description: s.description.clone(),
            limits: s.limits.iter().map(Configuration::rows).collect(),
            fixed_shape: s.fixed_shape.as_ref().map(Configuration::rows),
            terms: s
                .terms
                .iter()
                .map(|t| SequenceTermEntry {
                    n: t.n,
                    representatives: t.representatives.iter().map(Configuration::rows).collect(),
                    residuals: t.residuals.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SpeedsEntry {
    pub rows: Vec<u32>,
    pub cols: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct BlockPairReport {
    pub schema_version: u32,
    pub d: usize,
    pub k: usize,
    pub p: Vec<Vec<f64>>,
    pub q: Vec<Vec<f64>>,
    pub block_rows: Vec<usize>,
    pub block_cols: Vec<usize>,
    pub row_factors: Vec<Vec<f64>>,
    pub col_factors: Vec<Vec<Vec<f64>>>,
    pub speeds: SpeedsEntry,
    pub max_block_norm: f64,
    pub p_free: bool,
    pub q_free: bool,
    pub shape_equal: bool,
}

impl BlockPairReport {
    pub fn new(pair: &BlockPair, opts: &Options<'_>) -> Result<Self, Error> {
        let (p, q) = (pair.p()?, pair.q()?);
        let speeds = pair.speeds()?;
        Ok(BlockPairReport {
            schema_version: SCHEMA_VERSION,
            d: p.d(),
            k: p.k(),
            p: matrix_rows(&pair.p_matrix),
            q: matrix_rows(&pair.q_matrix),
            block_rows: pair.block_rows.clone(),
            block_cols: pair.block_cols.clone(),
            row_factors: pair.row_factors.clone(),
            col_factors: pair.col_factors.iter().map(matrix_rows).collect(),
            speeds: SpeedsEntry { rows: speeds.rows, cols: speeds.cols },
            max_block_norm: pair.max_block_norm(),
            p_free: projshape_core::is_free(&p, opts)?,
            q_free: projshape_core::is_free(&q, opts)?,
            shape_equal: projshape_core::shape_equal(&p, &q, projshape_core::frame::DEFAULT_COMPARE_TOL, opts)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct TylerNumbersReport {
    pub schema_version: u32,
    pub d: usize,
    pub k: usize,
    pub t: Vec<usize>,
    pub hausdorff: bool,
    pub maximal: bool,
    pub gcd: usize,
}

pub fn tyler_numbers_report(d: usize, k: usize) -> Result<TylerNumbersReport, Error> {
    let t = tyler_numbers(d, k)?;
    Ok(TylerNumbersReport {
        schema_version: SCHEMA_VERSION,
        d,
        k,
        hausdorff: is_hausdorff_numbers(&t, k),
        maximal: is_maximal_numbers(&t, k)?,
        t: t.as_slice().to_vec(),
        gcd: gcd(k, d + 1),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct SubspaceNumbersReport {
    pub schema_version: u32,
    pub d: usize,
    pub k: usize,
    pub n: Vec<usize>,
    pub hausdorff: bool,
    /// Largest failing level, if any.
    pub violating_j: Option<usize>,
    pub violations: Vec<usize>,
    /// Only defined for Hausdorff numbers.
    pub maximal: Option<bool>,
}

pub fn subspace_numbers_report(k: usize, n: &SubspaceNumbers) -> Result<SubspaceNumbersReport, Error> {
    let violations = hausdorff_violations(n, k);
    let hausdorff = violations.is_empty();
    Ok(SubspaceNumbersReport {
        schema_version: SCHEMA_VERSION,
        d: n.d(),
        k,
        n: n.as_slice().to_vec(),
        hausdorff,
        violating_j: violations.last().copied(),
        maximal: if hausdorff { Some(is_maximal_numbers(n, k)?) } else { None },
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct GeneratedConfiguration {
    pub schema_version: u32,
    pub d: usize,
    pub k: usize,
    pub seed: u64,
    /// Planted constraints as `(indices, rank)`.
    pub constraints: Vec<(Vec<usize>, usize)>,
    pub matrix: Vec<Vec<f64>>,
}

/// JSON Schemas of every document the command line writes, keyed by a
/// stable file stem.
pub fn schemas() -> Vec<(&'static str, schemars::Schema)> {
    vec![
        ("configuration", schemars::schema_for!(crate::format::ConfigurationFile)),
        ("analysis", schemars::schema_for!(AnalysisReport)),
        ("standardization", schemars::schema_for!(StandardizationReport)),
        ("distance", schemars::schema_for!(DistanceReport)),
        ("tyler-numbers", schemars::schema_for!(TylerNumbersReport)),
        ("subspace-numbers", schemars::schema_for!(SubspaceNumbersReport)),
        ("block-pair", schemars::schema_for!(BlockPairReport)),
        ("sequence", schemars::schema_for!(SequenceReport)),
        ("generated", schemars::schema_for!(GeneratedConfiguration)),
    ]
}
