//! Uniform random tree generation with deterministic, splittable seeding.
//!
//! Trees are grown by repeated leaf insertion: a tree with `k` internal nodes
//! has `2k + 1` nodes in total, and inserting a new leaf above a uniformly
//! chosen node on a uniformly chosen side yields, after `n` steps, a uniform
//! sample over all C_n shapes of size `n`. The classical leaf-labeled
//! formulation is collapsed to shapes; uniformity over shapes is preserved.
//!
//! All randomness comes from an explicit 64-bit mixing generator (the
//! SplitMix64 sequence), so results are bit-exact across platforms, thread
//! counts, and call orders. Independent streams are obtained by deriving
//! per-item seeds, never by sharing a generator.

use crate::transform::TreePair;
use crate::tree::{scan_subtree_end, Tree};

/// Golden-ratio increment of the SplitMix64 sequence.
pub const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 output mixer: a bijective 64-bit finalizer with full
/// avalanche.
pub fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    z
}

/// A splittable seed: a master value plus a stream index. Derived per-item
/// seeds are a pure function of `(master, stream_index)`, so any work item
/// can be regenerated in isolation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed {
    pub master: u64,
    pub stream_index: u64,
}

impl Seed {
    pub fn new(master: u64) -> Seed {
        Seed {
            master,
            stream_index: 0,
        }
    }

    /// The `index`-th child stream of this seed. Folds the current stream
    /// index into the master so that chained derivations
    /// `seed.derive(i).derive(j)` stay independent across distinct `(i, j)`.
    pub fn derive(self, index: u64) -> Seed {
        derive_seed(self, index)
    }
}

/// See [`Seed::derive`].
pub fn derive_seed(seed: Seed, index: u64) -> Seed {
    Seed {
        master: mix64(seed.master ^ GOLDEN.wrapping_mul(seed.stream_index)),
        stream_index: index,
    }
}

/// SplitMix64 generator: `state` advances by [`GOLDEN`] and each output is
/// `mix64(state)`.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn from_seed(seed: Seed) -> SplitMix64 {
        SplitMix64 {
            state: mix64(seed.master ^ GOLDEN.wrapping_mul(seed.stream_index)),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform draw in `[0, bound)` by widening multiplication with
    /// rejection, which is exactly unbiased for every bound.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        let mut x = self.next_u64();
        let mut m = u128::from(x) * u128::from(bound);
        let mut low = m as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                x = self.next_u64();
                m = u128::from(x) * u128::from(bound);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }
}

/// Per-sample configuration for batch generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleConfig {
    /// Tree size (internal node count), ≥ 0.
    pub size: usize,
    /// Number of trees or pairs to draw.
    pub count: usize,
    pub seed: Seed,
}

/// Draws one uniform tree of size `n`.
///
/// At step `k` (0-based) the current tree occupies `2k + 1` encoding
/// positions, each of which is one node in preorder. A single uniform draw
/// `v` in `[0, 4k + 1]` selects node rank `v >> 1` and side `v & 1` (0 puts
/// the new leaf on the left). The chosen node becomes the other child of a
/// fresh internal node.
pub fn sample_tree(n: usize, seed: Seed) -> Tree {
    let mut rng = SplitMix64::from_seed(seed);
    let mut shape = Vec::with_capacity(2 * n + 1);
    shape.push(b'0');
    for k in 0..n {
        let v = rng.next_below(4 * k as u64 + 2);
        let u = (v >> 1) as usize;
        let len = shape.len();
        shape.resize(len + 2, 0);
        if v & 1 == 0 {
            // New leaf on the left: subtree at u becomes `1 0 <old>`.
            shape.copy_within(u..len, u + 2);
            shape[u] = b'1';
            shape[u + 1] = b'0';
        } else {
            // New leaf on the right: subtree at u becomes `1 <old> 0`.
            let end = scan_subtree_end(&shape[..len], u);
            shape.copy_within(end..len, end + 2);
            shape.copy_within(u..end, u + 1);
            shape[u] = b'1';
            shape[end + 1] = b'0';
        }
    }
    Tree::from_raw(shape)
}

/// Draws a pair of independent uniform trees of size `n`, from the two child
/// streams `seed.derive(0)` and `seed.derive(1)`.
pub fn sample_pair(n: usize, seed: Seed) -> TreePair {
    let s = sample_tree(n, seed.derive(0));
    let t = sample_tree(n, seed.derive(1));
    TreePair::new(s, t).expect("equal-size draws")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{HashMap, HashSet};

    #[test]
    fn trivial_sizes() {
        for master in 0..20u64 {
            let seed = Seed::new(master);
            assert_eq!(sample_tree(0, seed).encoding().as_str(), "0");
            assert_eq!(sample_tree(1, seed).encoding().as_str(), "100");
        }
        let pair = sample_pair(0, Seed::new(5));
        assert_eq!(pair.s().encoding().as_str(), "0");
        assert_eq!(pair.t().encoding().as_str(), "0");
    }

    #[test]
    fn sampling_is_deterministic() {
        let seed = Seed::new(0xDEAD_BEEF).derive(17);
        let a = sample_tree(200, seed);
        let b = sample_tree(200, seed);
        assert_eq!(a, b);
        let p = sample_pair(50, seed);
        let q = sample_pair(50, seed);
        assert_eq!(p.s(), q.s());
        assert_eq!(p.t(), q.t());
        // The two sides of a pair come from different streams.
        assert_ne!(p.s(), p.t());
    }

    #[test]
    fn sampled_trees_are_valid() {
        for i in 0..200u64 {
            let n = (i % 64) as usize;
            let tree = sample_tree(n, Seed::new(3).derive(i));
            assert_eq!(tree.size(), n);
            let round = Tree::parse(tree.encoding().as_str()).unwrap();
            assert_eq!(round, tree);
        }
    }

    #[test]
    fn derive_is_pure_and_collision_free() {
        let base = Seed::new(42);
        assert_eq!(base.derive(7), base.derive(7));
        let mut seen = HashSet::new();
        for i in 0..1_000_000u64 {
            assert!(seen.insert(base.derive(i)), "collision at {i}");
        }
    }

    #[test]
    fn chained_derivations_differ() {
        let s = Seed::new(1);
        let mut seen = HashSet::new();
        for i in 0..300u64 {
            for j in 0..10u64 {
                let d = s.derive(i).derive(j);
                let g = SplitMix64::from_seed(d).next_u64();
                assert!(seen.insert(g), "first output repeats at ({i}, {j})");
            }
        }
    }

    #[test]
    fn generator_outputs_change_with_stream_index() {
        let a = SplitMix64::from_seed(Seed {
            master: 9,
            stream_index: 0,
        })
        .next_u64();
        let b = SplitMix64::from_seed(Seed {
            master: 9,
            stream_index: 1,
        })
        .next_u64();
        assert_ne!(a, b);
    }

    #[test]
    fn mixer_is_bijective_on_samples() {
        // mix64 is invertible, so distinct inputs give distinct outputs.
        let mut seen = HashSet::new();
        for i in 0..100_000u64 {
            assert!(seen.insert(mix64(i.wrapping_mul(GOLDEN))));
        }
    }

    #[test]
    fn next_below_is_in_range_and_covers() {
        let mut rng = SplitMix64::from_seed(Seed::new(8));
        let mut seen = [false; 7];
        for _ in 0..1000 {
            let v = rng.next_below(7);
            assert!(v < 7);
            seen[v as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    /// Chi-square uniformity over all shapes of the given size.
    fn shape_chi_square(n: usize, samples_per_shape: usize, master: u64) -> (f64, usize) {
        let shapes = crate::oracle::enumerate_trees(n).unwrap();
        let total = shapes.len() * samples_per_shape;
        let mut counts: HashMap<Tree, u64> = HashMap::new();
        let seed = Seed::new(master);
        for i in 0..total as u64 {
            *counts.entry(sample_tree(n, seed.derive(i))).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), shapes.len(), "every shape should occur");
        let expected = samples_per_shape as f64;
        let stat = shapes
            .iter()
            .map(|s| {
                let observed = *counts.get(s).unwrap_or(&0) as f64;
                (observed - expected).powi(2) / expected
            })
            .sum();
        (stat, shapes.len() - 1)
    }

    #[test]
    fn uniform_over_size_three_shapes() {
        let (stat, df) = shape_chi_square(3, 10_000, 101);
        let critical = crate::stats::chi_square_critical(df, 0.001);
        assert!(stat < critical, "chi-square {stat:.2} ≥ {critical:.2} (df {df})");
    }

    #[test]
    fn uniform_over_size_four_shapes() {
        let (stat, df) = shape_chi_square(4, 10_000, 202);
        let critical = crate::stats::chi_square_critical(df, 0.001);
        assert!(stat < critical, "chi-square {stat:.2} ≥ {critical:.2} (df {df})");
    }

    #[test]
    fn uniform_over_size_five_shapes() {
        let (stat, df) = shape_chi_square(5, 10_000, 303);
        let critical = crate::stats::chi_square_critical(df, 0.001);
        assert!(stat < critical, "chi-square {stat:.2} ≥ {critical:.2} (df {df})");
    }

    #[test]
    fn reduced_sizes_of_large_pairs_concentrate() {
        // Pairs of raw size 1000 reduce to around 92.8% of their size.
        use crate::transform::reduce_pair;
        let seed = Seed::new(2024);
        let mut sum = 0u64;
        let mut min = usize::MAX;
        let mut max = 0usize;
        let count = 1400u64;
        for i in 0..count {
            let reduced = reduce_pair(&sample_pair(1000, seed.derive(i)));
            sum += reduced.size() as u64;
            min = min.min(reduced.size());
            max = max.max(reduced.size());
        }
        let mean = sum as f64 / count as f64;
        assert!((925.0..=931.0).contains(&mean), "mean reduced size {mean}");
        assert!(min >= 880, "min reduced size {min}");
        assert!(max <= 975, "max reduced size {max}");
    }
}
