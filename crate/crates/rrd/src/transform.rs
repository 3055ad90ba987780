//! General rotations, the four restricted moves, and tree-pair reduction.
//!
//! A left rotation at an internal node rewrites the encoding substring
//! `1x1yz` to `11xyz`, where `x`, `y`, `z` are subtree encodings; a right
//! rotation is the inverse substitution. Both preserve the size and the
//! left-to-right leaf order. The restricted moves are rotations at the root
//! (`x0` right, `x0i` left) and at the right child of the root (`x1` right,
//! `x1i` left).

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::tree::{Address, AddressError, Tree};

/// Rotation direction at a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Left,
    Right,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Left => "left",
            Direction::Right => "right",
        })
    }
}

/// One of the four restricted moves. `RightAtRoot` and `LeftAtRoot` are
/// mutually inverse, as are the right-child pair. `x1` is the right rotation
/// at the right child of the root, by analogy with `x0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    RightAtRoot,
    LeftAtRoot,
    RightAtRightChild,
    LeftAtRightChild,
}

impl Move {
    pub const ALL: [Move; 4] = [
        Move::RightAtRoot,
        Move::LeftAtRoot,
        Move::RightAtRightChild,
        Move::LeftAtRightChild,
    ];

    pub fn inverse(self) -> Move {
        match self {
            Move::RightAtRoot => Move::LeftAtRoot,
            Move::LeftAtRoot => Move::RightAtRoot,
            Move::RightAtRightChild => Move::LeftAtRightChild,
            Move::LeftAtRightChild => Move::RightAtRightChild,
        }
    }

    /// The generator label used by the CLI and CSV files.
    pub fn label(self) -> &'static str {
        match self {
            Move::RightAtRoot => "x0",
            Move::LeftAtRoot => "x0i",
            Move::RightAtRightChild => "x1",
            Move::LeftAtRightChild => "x1i",
        }
    }

    pub fn from_label(label: &str) -> Option<Move> {
        Move::ALL.into_iter().find(|m| m.label() == label)
    }

    pub fn direction(self) -> Direction {
        match self {
            Move::RightAtRoot | Move::RightAtRightChild => Direction::Right,
            Move::LeftAtRoot | Move::LeftAtRightChild => Direction::Left,
        }
    }

    /// Address the move rotates at: the root or the right child of the root.
    pub fn address(self) -> Address {
        match self {
            Move::RightAtRoot | Move::LeftAtRoot => Address::root(),
            Move::RightAtRightChild | Move::LeftAtRightChild => Address::from_bits(vec![true]),
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum TransformError {
    #[error("trees have different sizes ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },
    #[error("rotation node not found: {0}")]
    BadNode(#[from] AddressError),
    #[error("cannot rotate {direction} here: the required child is a leaf")]
    RotationInapplicable { direction: Direction },
    #[error("move {mv} is not applicable to this tree")]
    MoveInapplicable { mv: Move },
    #[error("tree pair is not reduced: leaves {leaf_index} and {} are siblings in both trees", .leaf_index + 1)]
    NotReduced { leaf_index: usize },
}

/// Rotates in place at preorder position `p`, which must hold an internal
/// node whose relevant child is internal. `ends` are the subtree ends of the
/// *current* shape.
fn rotate_at_pos(
    shape: &mut [u8],
    ends: &[usize],
    p: usize,
    direction: Direction,
) -> Result<(), TransformError> {
    match direction {
        Direction::Left => {
            // 1 x 1 y z  ->  1 1 x y z: the right child's leading '1' moves
            // to the front of x.
            let rc = ends[p + 1];
            if shape[rc] == b'0' {
                return Err(TransformError::RotationInapplicable { direction });
            }
            shape[p + 1..=rc].rotate_right(1);
        }
        Direction::Right => {
            // 1 1 x y z  ->  1 x 1 y z: the left child's leading '1' moves
            // past x.
            if shape[p + 1] == b'0' {
                return Err(TransformError::RotationInapplicable { direction });
            }
            let x_end = ends[p + 2];
            shape[p + 1..x_end].rotate_left(1);
        }
    }
    Ok(())
}

/// The standard rotation at the internal node addressed by `at`. A left
/// rotation requires the node's right child to be internal, a right rotation
/// its left child. All other nodes are unchanged; size and the left-to-right
/// leaf sequence are preserved.
pub fn rotate(t: &Tree, at: &Address, direction: Direction) -> Result<Tree, TransformError> {
    let p = t.resolve_pos(at)?;
    let ends = t.subtree_ends();
    let mut out = t.clone();
    rotate_at_pos(out.shape_mut(), &ends, p, direction)?;
    Ok(out)
}

/// The restricted moves applicable to `t`, in the fixed order of
/// [`Move::ALL`].
pub fn applicable_moves(t: &Tree) -> Vec<Move> {
    let s = t.shape();
    if t.is_leaf() {
        return Vec::new();
    }
    let ends = t.subtree_ends();
    let mut moves = Vec::new();
    if s[1] == b'1' {
        moves.push(Move::RightAtRoot);
    }
    let rc = ends[1];
    if s[rc] == b'1' {
        moves.push(Move::LeftAtRoot);
        if s[rc + 1] == b'1' {
            moves.push(Move::RightAtRightChild);
        }
        if s[ends[rc + 1]] == b'1' {
            moves.push(Move::LeftAtRightChild);
        }
    }
    moves
}

/// Applies one restricted move.
pub fn apply_move(t: &Tree, mv: Move) -> Result<Tree, TransformError> {
    rotate(t, &mv.address(), mv.direction())
        .map_err(|_| TransformError::MoveInapplicable { mv })
}

/// Two trees of the same size. The size constraint is enforced at
/// construction, so operations on a pair never re-check it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreePair {
    s: Tree,
    t: Tree,
}

impl TreePair {
    pub fn new(s: Tree, t: Tree) -> Result<TreePair, TransformError> {
        if s.size() != t.size() {
            return Err(TransformError::SizeMismatch {
                left: s.size(),
                right: t.size(),
            });
        }
        Ok(TreePair { s, t })
    }

    pub fn s(&self) -> &Tree {
        &self.s
    }

    pub fn t(&self) -> &Tree {
        &self.t
    }

    pub fn size(&self) -> usize {
        self.s.size()
    }

    /// The pair with the two trees swapped.
    pub fn swapped(&self) -> TreePair {
        TreePair {
            s: self.t.clone(),
            t: self.s.clone(),
        }
    }

    /// Leaf indices `i` such that leaves `i` and `i + 1` are sibling children
    /// of one node in *both* trees, in increasing order.
    pub fn common_sibling_leaf_pairs(&self) -> Vec<usize> {
        let a = self.s.sibling_leaf_pairs();
        let b = self.t.sibling_leaf_pairs();
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }

    pub fn is_reduced(&self) -> bool {
        self.common_sibling_leaf_pairs().is_empty()
    }
}

/// A tree pair with no common sibling-leaf pair left, remembering the size it
/// was reduced from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReducedTreePair {
    s: Tree,
    t: Tree,
    original_size: usize,
}

impl ReducedTreePair {
    pub fn s(&self) -> &Tree {
        &self.s
    }

    pub fn t(&self) -> &Tree {
        &self.t
    }

    pub fn size(&self) -> usize {
        self.s.size()
    }

    pub fn original_size(&self) -> usize {
        self.original_size
    }

    pub fn as_pair(&self) -> TreePair {
        TreePair {
            s: self.s.clone(),
            t: self.t.clone(),
        }
    }
}

/// Strict conversion: accepts only pairs that are already reduced.
impl TryFrom<TreePair> for ReducedTreePair {
    type Error = TransformError;

    fn try_from(pair: TreePair) -> Result<ReducedTreePair, TransformError> {
        match pair.common_sibling_leaf_pairs().first() {
            Some(&leaf_index) => Err(TransformError::NotReduced { leaf_index }),
            None => Ok(ReducedTreePair {
                original_size: pair.size(),
                s: pair.s,
                t: pair.t,
            }),
        }
    }
}

/// Per-tree bookkeeping for the reduction worklist.
struct ReduceSide {
    shape: Vec<u8>,
    ends: Vec<usize>,
    parent: Vec<usize>,
    /// Current node position represented by each live leaf slot.
    node: Vec<usize>,
    /// Internal nodes that have become leaves through merging.
    now_leaf: Vec<bool>,
}

impl ReduceSide {
    fn new(tree: &Tree) -> ReduceSide {
        let shape = tree.shape().to_vec();
        let ends = tree.subtree_ends();
        let mut parent = vec![usize::MAX; shape.len()];
        let mut node = Vec::with_capacity(tree.leaf_count());
        for p in 0..shape.len() {
            if shape[p] == b'1' {
                parent[p + 1] = p;
                parent[ends[p + 1]] = p;
            } else {
                node.push(p);
            }
        }
        let now_leaf = vec![false; shape.len()];
        ReduceSide {
            shape,
            ends,
            parent,
            node,
            now_leaf,
        }
    }

    /// Do the current occupants of slots `i` and `j` share a parent?
    fn siblings(&self, i: usize, j: usize) -> bool {
        self.parent[self.node[i]] == self.parent[self.node[j]]
    }

    /// Replace slot `i`'s node by its parent, which becomes a leaf.
    fn merge_into_parent(&mut self, i: usize) {
        let p = self.parent[self.node[i]];
        self.now_leaf[p] = true;
        self.node[i] = p;
    }

    /// Serialize the tree with merged subtrees collapsed to leaves.
    fn to_tree(&self, reduced_size: usize) -> Tree {
        let mut out = Vec::with_capacity(2 * reduced_size + 1);
        let mut stack = vec![0usize];
        while let Some(p) = stack.pop() {
            if self.shape[p] == b'0' || self.now_leaf[p] {
                out.push(b'0');
            } else {
                out.push(b'1');
                stack.push(self.ends[p + 1]);
                stack.push(p + 1);
            }
        }
        Tree::from_raw(out)
    }
}

/// Repeatedly removes common sibling-leaf pairs — lowest current leaf index
/// first — replacing the parent node by a leaf in both trees, until none
/// remain. Identical trees reduce to the empty pair. Reduction is confluent,
/// so the scan order affects only the intermediate steps, never the result.
pub fn reduce_pair(pair: &TreePair) -> ReducedTreePair {
    let n = pair.size();
    if n == 0 {
        return ReducedTreePair {
            s: Tree::leaf(),
            t: Tree::leaf(),
            original_size: 0,
        };
    }

    let mut a = ReduceSide::new(pair.s());
    let mut b = ReduceSide::new(pair.t());

    // Doubly linked list over leaf slots 0..=n; slot order is current
    // left-to-right leaf order, so the smallest live slot in the candidate
    // set is also the lowest current leaf index.
    const NONE: usize = usize::MAX;
    let slots = n + 1;
    let mut next: Vec<usize> = (1..=slots).map(|i| if i < slots { i } else { NONE }).collect();
    let mut prev: Vec<usize> = (0..slots).map(|i| i.checked_sub(1).unwrap_or(NONE)).collect();
    let mut live = vec![true; slots];

    let reducible = |a: &ReduceSide, b: &ReduceSide, i: usize, j: usize| -> bool {
        a.siblings(i, j) && b.siblings(i, j)
    };

    let mut candidates: BTreeSet<usize> = (0..n)
        .filter(|&i| reducible(&a, &b, i, i + 1))
        .collect();

    let mut merges = 0usize;
    while let Some(&i) = candidates.iter().next() {
        candidates.remove(&i);
        if !live[i] {
            continue;
        }
        let j = next[i];
        if j == NONE || !reducible(&a, &b, i, j) {
            continue;
        }

        a.merge_into_parent(i);
        b.merge_into_parent(i);
        live[j] = false;
        next[i] = next[j];
        if next[j] != NONE {
            prev[next[j]] = i;
        }
        merges += 1;

        // The merge can only create or destroy reducibility at the two
        // adjacencies touching slot i.
        if prev[i] != NONE && reducible(&a, &b, prev[i], i) {
            candidates.insert(prev[i]);
        }
        if next[i] != NONE && reducible(&a, &b, i, next[i]) {
            candidates.insert(i);
        }
    }

    let reduced_size = n - merges;
    ReducedTreePair {
        s: a.to_tree(reduced_size),
        t: b.to_tree(reduced_size),
        original_size: n,
    }
}
