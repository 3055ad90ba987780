//! Exhaustive enumeration, the restricted rotation graph RRG(n), BFS
//! distances, and verification harnesses for the weight-based metric.
//!
//! RRG(n) has one vertex per size-`n` tree and an edge between two trees that
//! differ by a single rotation at the root or at the right child of the root.
//! BFS distance in this graph is the ground truth the fast metric is checked
//! against.

use std::collections::VecDeque;

use thiserror::Error;

use crate::metric::rrd;
use crate::transform::{applicable_moves, apply_move, TreePair};
use crate::tree::{Encoding, Tree};

/// Largest size accepted for exhaustive work (C₁₂ = 208,012 vertices).
pub const MAX_ENUMERATION_SIZE: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("size {n} is outside the supported range {min}..={max}")]
    SizeOutOfRange { n: usize, min: usize, max: usize },
    #[error("trees have different sizes ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },
}

fn check_range(n: usize, min: usize, max: usize) -> Result<(), OracleError> {
    if n < min || n > max {
        Err(OracleError::SizeOutOfRange { n, min, max })
    } else {
        Ok(())
    }
}

/// All C_n trees of size `n`, sorted by encoding.
pub fn enumerate_trees(n: usize) -> Result<Vec<Tree>, OracleError> {
    check_range(n, 0, MAX_ENUMERATION_SIZE)?;
    let mut by_size: Vec<Vec<Vec<u8>>> = vec![vec![b"0".to_vec()]];
    for k in 1..=n {
        let mut shapes = Vec::new();
        for left in 0..k {
            let right = k - 1 - left;
            for l in &by_size[left] {
                for r in &by_size[right] {
                    let mut s = Vec::with_capacity(2 * k + 1);
                    s.push(b'1');
                    s.extend_from_slice(l);
                    s.extend_from_slice(r);
                    shapes.push(s);
                }
            }
        }
        by_size.push(shapes);
    }
    let mut trees: Vec<Tree> = by_size
        .swap_remove(n)
        .into_iter()
        .map(Tree::from_raw)
        .collect();
    trees.sort();
    Ok(trees)
}

/// The restricted rotation graph on all size-`n` trees.
#[derive(Debug, Clone)]
pub struct RrgGraph {
    n: usize,
    vertices: Vec<Tree>,
    adjacency: Vec<Vec<u32>>,
}

/// Builds RRG(n): vertices in sorted encoding order, adjacency via the four
/// restricted moves. The graph is symmetric (every move has an inverse move)
/// with maximum degree 4.
pub fn build_rrg(n: usize) -> Result<RrgGraph, OracleError> {
    check_range(n, 1, MAX_ENUMERATION_SIZE)?;
    let vertices = enumerate_trees(n)?;
    let mut adjacency = vec![Vec::new(); vertices.len()];
    for (i, v) in vertices.iter().enumerate() {
        for mv in applicable_moves(v) {
            let w = apply_move(v, mv).expect("applicable move");
            let j = vertices
                .binary_search(&w)
                .expect("moves stay within the size class");
            adjacency[i].push(j as u32);
        }
        adjacency[i].sort_unstable();
        debug_assert!(adjacency[i].windows(2).all(|w| w[0] != w[1]));
    }
    Ok(RrgGraph {
        n,
        vertices,
        adjacency,
    })
}

impl RrgGraph {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Tree] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, vertex: usize) -> &[u32] {
        &self.adjacency[vertex]
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn index_of(&self, tree: &Tree) -> Option<usize> {
        self.vertices.binary_search(tree).ok()
    }

    /// All edges as index pairs `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (i, nbrs) in self.adjacency.iter().enumerate() {
            for &j in nbrs {
                if (i as u32) < j {
                    out.push((i as u32, j));
                }
            }
        }
        out
    }

    /// BFS distances from `source` to every vertex; `u32::MAX` marks
    /// unreachable vertices (which do not occur — the graph is connected).
    pub fn bfs_distances(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertices.len()];
        dist[source] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let next = dist[v] + 1;
            for &w in &self.adjacency[v] {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = next;
                    queue.push_back(w as usize);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.bfs_distances(0).iter().all(|&d| d != u32::MAX)
    }
}

/// BFS distance between two same-size trees in RRG of their size. Size 0 is
/// trivially distance 0.
pub fn oracle_distance(s: &Tree, t: &Tree) -> Result<u64, OracleError> {
    if s.size() != t.size() {
        return Err(OracleError::SizeMismatch {
            left: s.size(),
            right: t.size(),
        });
    }
    if s.size() == 0 {
        return Ok(0);
    }
    let graph = build_rrg(s.size())?;
    let si = graph.index_of(s).expect("vertex present");
    let ti = graph.index_of(t).expect("vertex present");
    Ok(u64::from(graph.bfs_distances(si)[ti]))
}

/// Result of checking the weight-based distance against BFS over every
/// ordered pair of size-`n` trees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub n: usize,
    pub pairs_checked: u64,
    /// Ordered pairs where the two distances disagreed (expected empty).
    pub mismatches: Vec<(Encoding, Encoding)>,
}

/// Compares the weight-based distance with BFS on all C_n² ordered pairs,
/// including unreduced ones (so the auto-reduction step is exercised too).
pub fn verify_fordham(n: usize) -> Result<VerifyReport, OracleError> {
    check_range(n, 2, 7)?;
    let graph = build_rrg(n)?;
    let count = graph.vertex_count();
    let mut pairs_checked = 0u64;
    let mut mismatches = Vec::new();
    for i in 0..count {
        let dist = graph.bfs_distances(i);
        for (j, &expected) in dist.iter().enumerate() {
            pairs_checked += 1;
            let pair = TreePair::new(
                graph.vertices[i].clone(),
                graph.vertices[j].clone(),
            )
            .expect("equal sizes");
            if rrd(&pair).distance != u64::from(expected) {
                mismatches.push((
                    graph.vertices[i].encoding(),
                    graph.vertices[j].encoding(),
                ));
            }
        }
    }
    Ok(VerifyReport {
        n,
        pairs_checked,
        mismatches,
    })
}

/// Observed extremes of BFS distance over all reduced ordered pairs of
/// size exactly `n`, with first witnesses in sorted scan order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremalReport {
    pub n: usize,
    pub min_distance: u64,
    pub max_distance: u64,
    pub min_witness: (Encoding, Encoding),
    pub max_witness: (Encoding, Encoding),
}

impl ExtremalReport {
    /// The nominal linear lower bound `n − 1` quoted for reduced pairs.
    pub fn nominal_lower_bound(&self) -> u64 {
        (self.n - 1) as u64
    }

    /// The nominal linear upper bound `4n − 8` (for `n ≥ 3`).
    pub fn nominal_upper_bound(&self) -> u64 {
        (4 * self.n - 8) as u64
    }

    pub fn attains_nominal_lower(&self) -> bool {
        self.min_distance == self.nominal_lower_bound()
    }

    pub fn attains_nominal_upper(&self) -> bool {
        self.max_distance == self.nominal_upper_bound()
    }
}

/// Scans every reduced ordered pair of size `n` and reports the extreme BFS
/// distances. Runtime grows with C_n² — instant for `n ≤ 8`, seconds at
/// `n = 10`, and unreasonable at the enumeration limit.
pub fn extremal_distances(n: usize) -> Result<ExtremalReport, OracleError> {
    check_range(n, 3, MAX_ENUMERATION_SIZE)?;
    let graph = build_rrg(n)?;
    let count = graph.vertex_count();
    // A pair is reduced iff the trees share no sibling-leaf-pair index;
    // n ≤ 12 leaf-pair indices fit in a bitmask.
    let masks: Vec<u32> = graph
        .vertices
        .iter()
        .map(|v| {
            v.sibling_leaf_pairs()
                .into_iter()
                .fold(0u32, |m, i| m | 1 << i)
        })
        .collect();
    let mut min = u64::MAX;
    let mut max = 0u64;
    let mut min_at = (0usize, 0usize);
    let mut max_at = (0usize, 0usize);
    for i in 0..count {
        let dist = graph.bfs_distances(i);
        for j in 0..count {
            if masks[i] & masks[j] != 0 {
                continue;
            }
            let d = u64::from(dist[j]);
            if d < min {
                min = d;
                min_at = (i, j);
            }
            if d > max {
                max = d;
                max_at = (i, j);
            }
        }
    }
    assert!(min != u64::MAX, "reduced pairs exist for n ≥ 2");
    Ok(ExtremalReport {
        n,
        min_distance: min,
        max_distance: max,
        min_witness: (
            graph.vertices[min_at.0].encoding(),
            graph.vertices[min_at.1].encoding(),
        ),
        max_witness: (
            graph.vertices[max_at.0].encoding(),
            graph.vertices[max_at.1].encoding(),
        ),
    })
}
