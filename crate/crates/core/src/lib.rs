//! Stable matchings on hypergraphic preference systems.
//!
//! A hypergraphic preference system is a hypergraph together with, for every
//! vertex, a strict preference order over the hyperedges containing it. A
//! matching (a set of pairwise disjoint hyperedges) is *stable* when no
//! hyperedge is a blocking coalition: every hyperedge contains a vertex whose
//! weakly-preferred matched mass already sums to one.
//!
//! The crate provides two solvers plus the machinery to check their work:
//!
//! * [`scarf_core`] — a generic Scarf-lemma pivoting engine over exact
//!   rational arithmetic. It alternates cardinal (simplex-like) and ordinal
//!   pivots until the bases coincide, yielding a fractional stable matching
//!   on any valid instance.
//! * [`ffl`] — a specialized engine for *arborescence* instances (hypergraphs
//!   whose incidence matrix is the network matrix of a rooted directed tree).
//!   Its first-forward-arc-leaving pivot rule terminates in at most `n`
//!   iterations and never touches rational arithmetic, giving `O(n·m)` total
//!   work and an integral stable matching.
//! * [`instance`], [`blocks`], [`network`] — the domain model: preference
//!   systems and their underlying networks, the block-partitioned constraint
//!   and ordinal matrices the engines pivot on, and the tree combinatorics
//!   that replace linear algebra on network matrices.
//! * [`verify`] — independent ground-truth checkers: stability reports,
//!   a brute-force enumeration oracle, and exact polytope membership and
//!   extreme-point tests, including a built-in instance whose fractional
//!   relaxation has a non-integral vertex.

pub mod blocks;
pub mod ffl;
pub mod instance;
pub mod linalg;
pub mod network;
pub mod scarf_core;
pub mod verify;

pub use blocks::{build_block_system, build_blocks, BlockSystem, OrdinalView};
pub use instance::{
    build_arb_instance, depth_first_relabel, interval_instance, parse_instance, random_instance,
    serialize_instance, ArbInstance, Arborescence, PreferenceSystem,
};
pub use ffl::{
    check_nice_basis, run_ffl, run_ffl_with, separator_of, FflOptions, FflOutcome, VerifyLevel,
};
pub use network::{
    basis_tree, classify_pivot, inverse_identity_check, representation_vector, tree_path,
    BasisTree, MarkedPath,
};
pub use scarf_core::{is_ordinal_basis, run_scarf, PivotRule, ScarfTrace};
pub use verify::{
    brute_force_stable_matchings, builtin_counterexample, is_stable_matching, Matching,
    RationalPoint,
};
