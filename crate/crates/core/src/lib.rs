//! Finite combinatorics of graded trees.
//!
//! The crate works with prefix-closed sets of finite sequences over
//! per-level alphabets, either uniform or accelerating (level n offers
//! n + 1 letters). On top of this it builds:
//!
//! * classification of trees by splitting width ([`classify`]),
//! * letter-map pullbacks of trees ([`pullback`]),
//! * extraction of narrow subtrees from function families ([`extraction`]),
//! * predictors and their translation to and from trees ([`prediction`]),
//! * stepwise pruning of accelerating conditions ([`prune`]),
//! * consolidation of product conditions coordinate by coordinate
//!   ([`consolidate`]),
//! * slaloms of decided names ([`slalom`]),
//! * exact minimum covers of function spaces ([`covers`]).
//!
//! Everything is exhaustive and budgeted: searches either return an exact
//! answer with a certificate or fail with the budget that ran out. The
//! crate is `no_std` with `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod classify;
pub mod condition;
pub mod consolidate;
pub mod covers;
pub mod domain;
pub mod error;
pub mod extraction;
pub mod name;
pub mod prediction;
pub mod prune;
pub mod pullback;
pub mod seq;
pub mod skeleton;
pub mod slalom;
pub mod tree;

pub use classify::{classify, TreeClass, TreeClassReport};
pub use condition::{avoid_tree, build_minimal_accelerating, Condition};
pub use consolidate::{
    consolidate_step, graft, verify_consolidates, ConsolidationReport, ConsolidationState,
    Coordinate, CoordinateKind, ProductCondition, ProductName, RefinementOrderSpec,
};
pub use covers::{
    compose_covers, greedy_cover_predictors, greedy_cover_trees, min_cover_predictors,
    min_cover_trees, monotonicity_report, predictor_family_covers, tree_family_covers,
    CoverCertificate, CoverFamily, CoverInstance, CoverMode, MonotonicityRow,
};
pub use domain::{Grading, TreeDomain};
pub use error::{Error, HypothesisViolation, Result};
pub use extraction::{
    check_grouped_hypothesis, extract_2tree, extract_grouped, n_bound, n_bound_base,
    restriction_closure, ExtractionResult, FunctionFamily,
};
pub use name::{DecidedName, LabelRule, LabelSource};
pub use prediction::{
    find_evader, predictor_to_trees, predicts, tree_to_predictor, PredictionVerdict, Predictor,
};
pub use prune::{prune_to_cover, PruneResult};
pub use pullback::{pullback, LetterMap};
pub use seq::Seq;
pub use skeleton::Skeleton;
pub use slalom::slalom_of_decided;
pub use tree::{
    split_level, FiniteTree, GradedTree, TreeRep, TreeView, EXPLICIT_NODE_BUDGET,
};
