//! Canonical representation of rooted ordered full binary trees.
//!
//! Trees are stored as their preorder bitstring: byte `b'1'` for an internal
//! node followed by its left and right subtrees, byte `b'0'` for a leaf. A
//! tree of size `n` (internal nodes) serializes to exactly `2n + 1` bytes
//! with `n` ones and `n + 1` zeros, and every proper prefix contains at most
//! as many zeros as ones. Equality, hashing, and ordering are all by this
//! encoding, which gives a total order and stable map keys.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Validation failure for a preorder bitstring, reporting the earliest
/// offending byte position.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum ParseError {
    /// A byte other than `'0'` or `'1'` appeared.
    #[error("invalid character {found:?} at position {position}: encodings use only '0' and '1'")]
    InvalidChar { position: usize, found: char },
    /// The string ended while at least one subtree was still open, i.e. the
    /// totals are wrong (zeros must outnumber ones by exactly one).
    #[error("encoding ends at position {position} while a subtree is still open")]
    UnexpectedEnd { position: usize },
    /// The tree was already complete before the string ended, i.e. a proper
    /// prefix already contained more zeros than ones.
    #[error("trailing input at position {position}: the tree is already complete")]
    TrailingInput { position: usize },
}

/// Failure to follow a binary address down a tree.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum AddressError {
    /// The walk reached a leaf before consuming the whole address.
    #[error("address step {depth} descends into a leaf")]
    Unresolvable { depth: usize },
    /// The address resolves, but to a leaf rather than an internal node.
    #[error("address resolves to a leaf, not an internal node")]
    NotInternal,
}

/// Invalid character in a textual binary address.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("invalid address character {found:?} at position {position}: addresses use only '0' and '1'")]
pub struct AddressParseError {
    pub position: usize,
    pub found: char,
}

fn validate_shape(bytes: &[u8]) -> Result<(), ParseError> {
    let mut open: usize = 1;
    for (position, &b) in bytes.iter().enumerate() {
        if open == 0 {
            return Err(ParseError::TrailingInput { position });
        }
        match b {
            b'1' => open += 1,
            b'0' => open -= 1,
            other => {
                return Err(ParseError::InvalidChar {
                    position,
                    found: other as char,
                })
            }
        }
    }
    if open > 0 {
        return Err(ParseError::UnexpectedEnd {
            position: bytes.len(),
        });
    }
    Ok(())
}

/// A validated preorder bitstring. This is the interchange format used by the
/// CLI, the CSV files, and the oracle dumps: ASCII `'0'`/`'1'`, no whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Encoding(String);

impl Encoding {
    /// Validates `text` as a preorder bitstring.
    pub fn new(text: impl Into<String>) -> Result<Encoding, ParseError> {
        let text = text.into();
        validate_shape(text.as_bytes())?;
        Ok(Encoding(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn to_tree(&self) -> Tree {
        Tree {
            shape: self.0.as_bytes().to_vec(),
        }
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Encoding {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Encoding::new(s)
    }
}

impl From<&Tree> for Encoding {
    fn from(t: &Tree) -> Encoding {
        t.encoding()
    }
}

/// Which side of its parent each step of a root path takes: `false` = left,
/// `true` = right. The empty address is the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Address {
    bits: Vec<bool>,
}

impl Address {
    /// The empty address, i.e. the root.
    pub fn root() -> Address {
        Address::default()
    }

    pub fn from_bits(bits: Vec<bool>) -> Address {
        Address { bits }
    }

    /// Parses a textual address: `'0'` = left step, `'1'` = right step, empty
    /// string = root.
    pub fn parse(text: &str) -> Result<Address, AddressParseError> {
        let mut bits = Vec::with_capacity(text.len());
        for (position, ch) in text.chars().enumerate() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                found => return Err(AddressParseError { position, found }),
            }
        }
        Ok(Address { bits })
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn depth(&self) -> usize {
        self.bits.len()
    }

    pub fn is_root(&self) -> bool {
        self.bits.is_empty()
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &bit in &self.bits {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Positional category of an internal node, determined by its address:
/// all-0s (root included) is a left node, all-1s and nonempty is a right
/// node, anything mixed is interior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeCategory {
    Left,
    Right,
    Interior,
}

impl NodeCategory {
    /// Category of the node at `address`, by the address rule alone.
    pub fn of(address: &Address) -> NodeCategory {
        if address.bits.iter().all(|&b| !b) {
            NodeCategory::Left
        } else if address.bits.iter().all(|&b| b) {
            NodeCategory::Right
        } else {
            NodeCategory::Interior
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NodeCategory::Left => "left",
            NodeCategory::Right => "right",
            NodeCategory::Interior => "interior",
        }
    }
}

impl fmt::Display for NodeCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A reference to an internal node: its root path plus its rank in the
/// in-order traversal restricted to internal nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeRef {
    pub address: Address,
    pub inorder_index: usize,
}

/// A rooted ordered full binary tree, stored as its preorder bitstring.
///
/// Every internal node has exactly two children; leaves are implicitly
/// numbered left to right starting from 0 (the numbering is never stored, so
/// renumbering after a reduction is a no-op).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree {
    shape: Vec<u8>,
}

impl Tree {
    /// The empty tree: a single leaf, encoding `"0"`.
    pub fn leaf() -> Tree {
        Tree { shape: vec![b'0'] }
    }

    /// An internal node with the given subtrees.
    pub fn node(left: Tree, right: Tree) -> Tree {
        let mut shape = Vec::with_capacity(1 + left.shape.len() + right.shape.len());
        shape.push(b'1');
        shape.extend_from_slice(&left.shape);
        shape.extend_from_slice(&right.shape);
        Tree { shape }
    }

    /// Parses a preorder bitstring, reporting the earliest violating index on
    /// malformed input.
    pub fn parse(text: &str) -> Result<Tree, ParseError> {
        validate_shape(text.as_bytes())?;
        Ok(Tree {
            shape: text.as_bytes().to_vec(),
        })
    }

    /// Builds a tree from raw shape bytes that are already known to be valid.
    pub(crate) fn from_raw(shape: Vec<u8>) -> Tree {
        debug_assert!(validate_shape(&shape).is_ok());
        Tree { shape }
    }

    pub(crate) fn shape(&self) -> &[u8] {
        &self.shape
    }

    pub(crate) fn shape_mut(&mut self) -> &mut [u8] {
        &mut self.shape
    }

    /// Number of internal nodes.
    pub fn size(&self) -> usize {
        (self.shape.len() - 1) / 2
    }

    pub fn leaf_count(&self) -> usize {
        self.size() + 1
    }

    pub fn is_leaf(&self) -> bool {
        self.shape.len() == 1
    }

    /// The preorder bitstring; `parse` of it returns an equal tree.
    pub fn encoding(&self) -> Encoding {
        Encoding(String::from_utf8(self.shape.clone()).expect("shape bytes are ASCII"))
    }

    /// One-past-the-end position of the subtree rooted at each position.
    ///
    /// `ends[p]` is the index just past the subtree whose root sits at byte
    /// `p` of the encoding, so the subtree occupies `p..ends[p]`.
    pub(crate) fn subtree_ends(&self) -> Vec<usize> {
        let s = &self.shape;
        let mut ends = vec![0usize; s.len()];
        for p in (0..s.len()).rev() {
            ends[p] = if s[p] == b'0' { p + 1 } else { ends[ends[p + 1]] };
        }
        ends
    }

    /// Preorder position of the node at `address`.
    pub(crate) fn resolve_pos(&self, address: &Address) -> Result<usize, AddressError> {
        let ends = self.subtree_ends();
        let mut pos = 0usize;
        for (depth, &bit) in address.bits.iter().enumerate() {
            if self.shape[pos] == b'0' {
                return Err(AddressError::Unresolvable { depth });
            }
            pos = if bit { ends[pos + 1] } else { pos + 1 };
        }
        if self.shape[pos] == b'0' {
            return Err(AddressError::NotInternal);
        }
        Ok(pos)
    }

    /// Category of the internal node at `address`, validating that the
    /// address resolves to an internal node of this tree.
    pub fn node_category(&self, address: &Address) -> Result<NodeCategory, AddressError> {
        self.resolve_pos(address)?;
        Ok(NodeCategory::of(address))
    }

    /// Positions of the internal nodes in in-order (left subtree, node, right
    /// subtree). Index 0 is the deepest node on the left arm.
    pub(crate) fn inorder_positions(&self, ends: &[usize]) -> Vec<usize> {
        let s = &self.shape;
        let mut order = Vec::with_capacity(self.size());
        let mut stack: Vec<usize> = Vec::new();
        let mut pos = 0usize;
        loop {
            if s[pos] == b'1' {
                stack.push(pos);
                pos += 1;
            } else {
                match stack.pop() {
                    Some(p) => {
                        order.push(p);
                        pos = ends[p + 1];
                    }
                    None => break,
                }
            }
        }
        order
    }

    /// The internal nodes in in-order, each with its address and in-order
    /// index. Suited to inspection and small trees; the distance computation
    /// itself never materializes addresses.
    pub fn inorder_internal_nodes(&self) -> Vec<NodeRef> {
        let s = &self.shape;
        let ends = self.subtree_ends();
        let order = self.inorder_positions(&ends);

        // Parent position and child side for every node position.
        let mut parent = vec![usize::MAX; s.len()];
        let mut from_right = vec![false; s.len()];
        for (q, &byte) in s.iter().enumerate() {
            if byte == b'1' {
                let lc = q + 1;
                let rc = ends[lc];
                parent[lc] = q;
                parent[rc] = q;
                from_right[rc] = true;
            }
        }

        order
            .into_iter()
            .enumerate()
            .map(|(inorder_index, p)| {
                let mut bits = Vec::new();
                let mut cur = p;
                while parent[cur] != usize::MAX {
                    bits.push(from_right[cur]);
                    cur = parent[cur];
                }
                bits.reverse();
                NodeRef {
                    address: Address::from_bits(bits),
                    inorder_index,
                }
            })
            .collect()
    }

    /// Leaf indices `i` such that leaves `i` and `i + 1` are the two children
    /// of one internal node, in increasing order.
    pub fn sibling_leaf_pairs(&self) -> Vec<usize> {
        let s = &self.shape;
        let mut pairs = Vec::new();
        let mut zeros = 0usize;
        for p in 0..s.len() {
            if s[p] == b'1' {
                if s[p + 1] == b'0' && s[p + 2] == b'0' {
                    pairs.push(zeros);
                }
            } else {
                zeros += 1;
            }
        }
        pairs
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree({})", self.encoding())
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.encoding())
    }
}

impl FromStr for Tree {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tree::parse(s)
    }
}

/// One-past-the-end of the subtree starting at `start` in a shape slice.
pub(crate) fn scan_subtree_end(shape: &[u8], start: usize) -> usize {
    let mut open = 1usize;
    let mut q = start;
    while open > 0 {
        open = open - 1 + if shape[q] == b'1' { 2 } else { 0 };
        q += 1;
    }
    q
}
