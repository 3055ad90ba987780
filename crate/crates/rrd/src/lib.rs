//! Restricted rotation distance between rooted ordered full binary trees.
//!
//! A *full* (0-or-2-children) binary tree of size `n` has `n` internal nodes
//! and `n + 1` leaves, and is written as a preorder bitstring: `1` for an
//! internal node, `0` for a leaf. Rotations restricted to the root and the
//! right child of the root induce a metric on same-size trees — the
//! restricted rotation distance — which this crate computes exactly in linear
//! time by classifying internal nodes into seven types and summing weights
//! over in-order-matched node pairs of the reduced tree pair.
//!
//! The crate also provides:
//!
//! * general rotations and the four restricted moves (`x0`, `x0i`, `x1`, `x1i`),
//! * tree-pair reduction (removal of common sibling-leaf pairs),
//! * uniform random tree generation via Rémy's growth procedure with
//!   deterministic, splittable seeding,
//! * an exhaustive brute-force oracle (restricted rotation graph + BFS) used
//!   to verify the metric on small sizes,
//! * a batch experiment harness producing per-pair records, bucketed
//!   aggregates, histograms, linear fits, and deviation statistics, with CSV
//!   and SVG output.
//!
//! All values are immutable after construction and every operation is a pure
//! function, so the whole API is safe for unrestricted concurrent use.

pub mod experiments;
pub mod metric;
pub mod oracle;
pub mod random;
pub mod report;
pub mod stats;
pub mod transform;
pub mod tree;
