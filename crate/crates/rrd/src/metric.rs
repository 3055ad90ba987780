//! Exact restricted rotation distance via node-type weights.
//!
//! Every internal node of a tree falls into one of seven classes determined
//! by its position relative to the left arm (the chain of left children from
//! the root), the right arm (the chain of right children), and the in-order
//! sequence. For a *reduced* pair of trees, the distance is the sum, over
//! in-order-matched node pairs, of a fixed 6×6 weight table — no search is
//! involved, so the distance of trees with hundreds of thousands of nodes is
//! computed in linear time.

use std::fmt;

use crate::transform::{reduce_pair, ReducedTreePair, TreePair};
use crate::tree::Tree;

/// Node classification used by the weight method.
///
/// With nodes numbered in in-order:
/// * `L0` — the node with in-order index 0 (always the deepest left-arm node,
///   or the root when the left arm is trivial).
/// * `LL` — any other node on the left arm.
/// * `I0` / `IR` — interior nodes (on neither arm), split by whether their
///   right child is a leaf (`I0`) or internal (`IR`).
/// * `RI` — a right-arm node whose in-order successor is interior.
/// * `RNI` — a right-arm node that is not `RI` but is followed (in in-order)
///   by some interior node.
/// * `R0` — a right-arm node with no interior node after it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FordhamType {
    L0,
    LL,
    I0,
    IR,
    RI,
    RNI,
    R0,
}

impl FordhamType {
    /// All types that can occur at in-order index ≥ 1, in weight-table order.
    pub const NON_L0: [FordhamType; 6] = [
        FordhamType::R0,
        FordhamType::RNI,
        FordhamType::RI,
        FordhamType::LL,
        FordhamType::I0,
        FordhamType::IR,
    ];

    /// Row/column of this type in the weight table; `None` for `L0`, which
    /// only ever pairs with itself at weight 0.
    pub fn table_index(self) -> Option<usize> {
        match self {
            FordhamType::L0 => None,
            FordhamType::R0 => Some(0),
            FordhamType::RNI => Some(1),
            FordhamType::RI => Some(2),
            FordhamType::LL => Some(3),
            FordhamType::I0 => Some(4),
            FordhamType::IR => Some(5),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FordhamType::L0 => "L0",
            FordhamType::LL => "LL",
            FordhamType::I0 => "I0",
            FordhamType::IR => "IR",
            FordhamType::RI => "RI",
            FordhamType::RNI => "RNI",
            FordhamType::R0 => "R0",
        }
    }
}

impl fmt::Display for FordhamType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The symmetric per-node-pair cost table over [`FordhamType::NON_L0`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightTable {
    entries: [[u8; 6]; 6],
}

impl WeightTable {
    /// The table realizing the exact restricted rotation distance.
    pub fn standard() -> WeightTable {
        WeightTable {
            // Rows and columns ordered R0, RNI, RI, LL, I0, IR.
            entries: [
                [0, 2, 2, 1, 1, 3],
                [2, 2, 2, 1, 1, 3],
                [2, 2, 2, 1, 3, 3],
                [1, 1, 1, 2, 2, 2],
                [1, 1, 3, 2, 2, 4],
                [3, 3, 3, 2, 4, 4],
            ],
        }
    }

    /// Cost of an in-order-matched node pair.
    ///
    /// # Panics
    ///
    /// If exactly one side is `L0`. Classifications pair index 0 with
    /// index 0, and `L0` occurs only there, so matched classifications never
    /// trigger this.
    pub fn weight(&self, a: FordhamType, b: FordhamType) -> u64 {
        match (a.table_index(), b.table_index()) {
            (Some(i), Some(j)) => u64::from(self.entries[i][j]),
            (None, None) => 0,
            _ => panic!("L0 can only be paired with L0 (got {a} vs {b})"),
        }
    }
}

/// Classifies every internal node of `tree`, in in-order. The result has
/// exactly `tree.size()` entries; entry 0 is always [`FordhamType::L0`].
/// Runs in linear time.
pub fn classify(tree: &Tree) -> Vec<FordhamType> {
    let n = tree.size();
    if n == 0 {
        return Vec::new();
    }
    let shape = tree.shape();
    let ends = tree.subtree_ends();
    let inorder = tree.inorder_positions(&ends);

    let mut on_left_arm = vec![false; shape.len()];
    let mut p = 0;
    while shape[p] == b'1' {
        on_left_arm[p] = true;
        p += 1;
    }

    let mut on_right_arm = vec![false; shape.len()];
    let mut p = 0;
    loop {
        let right = ends[p + 1];
        if shape[right] != b'1' {
            break;
        }
        on_right_arm[right] = true;
        p = right;
    }

    let interior =
        |pos: usize| shape[pos] == b'1' && !on_left_arm[pos] && !on_right_arm[pos];

    debug_assert!(on_left_arm[inorder[0]]);

    let mut types = vec![FordhamType::L0; n];
    let mut any_interior_later = false;
    for k in (0..n).rev() {
        let pos = inorder[k];
        types[k] = if k == 0 {
            FordhamType::L0
        } else if on_left_arm[pos] {
            FordhamType::LL
        } else if interior(pos) {
            if shape[ends[pos + 1]] == b'1' {
                FordhamType::IR
            } else {
                FordhamType::I0
            }
        } else if k + 1 < n && interior(inorder[k + 1]) {
            FordhamType::RI
        } else if any_interior_later {
            FordhamType::RNI
        } else {
            FordhamType::R0
        };
        if interior(pos) {
            any_interior_later = true;
        }
    }
    types
}

/// Outcome of a distance computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceResult {
    /// The restricted rotation distance.
    pub distance: u64,
    /// Size of the reduced pair the distance was measured on.
    pub reduced_size: usize,
    /// In-order-matched type pairs of the reduced trees.
    pub type_pairs: Vec<(FordhamType, FordhamType)>,
}

/// Restricted rotation distance between the trees of `pair`. The pair is
/// reduced first; the distance of the original pair equals the distance of
/// the reduced pair.
pub fn rrd(pair: &TreePair) -> DistanceResult {
    rrd_reduced(&reduce_pair(pair))
}

/// Restricted rotation distance of an already-reduced pair.
pub fn rrd_reduced(pair: &ReducedTreePair) -> DistanceResult {
    let table = WeightTable::standard();
    let a = classify(pair.s());
    let b = classify(pair.t());
    debug_assert_eq!(a.len(), b.len());
    let type_pairs: Vec<(FordhamType, FordhamType)> =
        a.into_iter().zip(b).collect();
    let distance = type_pairs.iter().map(|&(x, y)| table.weight(x, y)).sum();
    DistanceResult {
        distance,
        reduced_size: pair.size(),
        type_pairs,
    }
}
