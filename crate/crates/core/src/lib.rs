//! Computational tools for projective shape space.
//!
//! A configuration of `k` landmarks in `RP^d` is a `k x (d+1)` matrix `P`;
//! its projective shape is the orbit `{D P B}` under nonsingular diagonal `D`
//! and nonsingular `B`. This crate decides the combinatorial and topological
//! properties of such shapes (subspace constraints, splittability, freeness,
//! Tyler regularity, frames and pseudo-frames), builds chart coordinates,
//! performs Tyler standardization, and constructs explicit sequences that
//! exhibit blur and non-Hausdorff behaviour.
//!
//! The crate is `no_std` and needs only `alloc`. File formats and the command
//! line front end live in the `projshape` crate.
//!
//! Landmark indices are 0-based in this crate.
#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod options;

pub mod constraints;
pub mod fixtures;
pub mod frame;
pub mod linalg;
pub mod model;
pub mod numbers;
pub mod oracle;
pub mod tyler;

pub use constraints::{
    constraint_flats, is_free, is_general_position, is_splittable, is_tyler_regular, satisfies_subspace_numbers,
    ConstraintReport, Flat, SplitWitness,
};
pub use error::{Error, Result};
pub use model::{act, canonicalize_point, configuration_rank, Configuration, GroupElement, ProjectivePoint};
pub use numbers::{
    is_hausdorff_numbers, is_maximal_numbers, tyler_maximal_gcd, tyler_numbers, SubspaceNumbers,
};
pub use options::{Options, DEFAULT_RANK_TOL, DEFAULT_SEARCH_CAP};
pub use frame::{
    find_frame, find_pseudo_frame, frame_coordinates, graph_of, pseudo_frame_coordinates, shape_equal, ChartPoint,
    ColoredEdge, ColoredGraph, PseudoFrame,
};
pub use oracle::{blur_sequence, merge_sequence, nonhausdorff_witness, BlockPair, ShapeSequence};
pub use tyler::{
    diagonal_action_derivative, is_standardizable, shape_distance, tyler_standardize, SignAlignment,
    Standardizability, TylerStandardization,
};
