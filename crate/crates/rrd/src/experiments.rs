//! Batch Monte Carlo harness: per-pair records, bucketed aggregates,
//! distance histograms at fixed reduced size, linear fits, and deviation
//! statistics.
//!
//! Every work item is keyed by a stream index and derives its own seed, so a
//! batch is reproducible pair-by-pair and the output is identical for any
//! degree of parallelism.

use rayon::prelude::*;
use thiserror::Error;

use crate::metric::rrd;
use crate::random::{sample_pair, Seed, SplitMix64};
use crate::stats::sample_stats;

/// One generated, reduced, and measured tree pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairRecord {
    pub stream_index: u64,
    /// Size the pair was generated at.
    pub raw_size: u32,
    /// Size after removing common sibling leaf pairs.
    pub reduced_size: u32,
    /// Restricted rotation distance.
    pub distance: u64,
}

impl PairRecord {
    /// distance / raw size.
    pub fn ratio_raw(&self) -> f64 {
        self.distance as f64 / f64::from(self.raw_size)
    }

    /// distance / reduced size; `None` when the pair reduced away entirely.
    pub fn ratio_reduced(&self) -> Option<f64> {
        if self.reduced_size == 0 {
            None
        } else {
            Some(self.distance as f64 / f64::from(self.reduced_size))
        }
    }

    /// reduced size / raw size.
    pub fn reduced_fraction(&self) -> f64 {
        f64::from(self.reduced_size) / f64::from(self.raw_size)
    }
}

/// Inclusive size range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeRange {
    pub lo: u32,
    pub hi: u32,
}

impl SizeRange {
    pub fn new(lo: u32, hi: u32) -> SizeRange {
        SizeRange { lo, hi }
    }

    pub fn contains(&self, size: u32) -> bool {
        self.lo <= size && size <= self.hi
    }
}

/// Where raw sizes come from: an explicit list (one batch per entry) or
/// ranges sampled log-uniformly per pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SizeSource {
    List(Vec<u32>),
    /// Each pair draws its size from its range with probability
    /// proportional to 1/size, so every size scale inside a wide range
    /// carries the same weight.
    Ranges(Vec<SizeRange>),
}

impl SizeSource {
    fn entries(&self) -> usize {
        match self {
            SizeSource::List(sizes) => sizes.len(),
            SizeSource::Ranges(ranges) => ranges.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchConfig {
    pub sizes: SizeSource,
    /// Pairs generated per list entry / per range.
    pub count_per_size: usize,
    pub seed: Seed,
}

/// Draws a size in `[range.lo, range.hi]` with probability proportional to
/// 1/size, by uniform proposal and exact integer rejection: a proposal `n`
/// is kept with probability `lo / n`.
fn draw_log_uniform(range: SizeRange, rng: &mut SplitMix64) -> u32 {
    let width = u64::from(range.hi - range.lo) + 1;
    loop {
        let candidate = range.lo + rng.next_below(width) as u32;
        if rng.next_below(u64::from(candidate)) < u64::from(range.lo) {
            return candidate;
        }
    }
}

fn batch_record(config: &BatchConfig, index: u64) -> PairRecord {
    let item_seed = config.seed.derive(index);
    let entry = (index / config.count_per_size as u64) as usize;
    let raw_size = match &config.sizes {
        SizeSource::List(sizes) => sizes[entry],
        SizeSource::Ranges(ranges) => {
            let mut rng = SplitMix64::from_seed(item_seed.derive(2));
            draw_log_uniform(ranges[entry], &mut rng)
        }
    };
    let pair = sample_pair(raw_size as usize, item_seed);
    let result = rrd(&pair);
    let record = PairRecord {
        stream_index: index,
        raw_size,
        reduced_size: result.reduced_size as u32,
        distance: result.distance,
    };
    debug_assert!(record.reduced_size <= record.raw_size);
    debug_assert_eq!(record.distance == 0, record.reduced_size == 0);
    if record.reduced_size >= 3 {
        let n = u64::from(record.reduced_size);
        debug_assert!(record.distance >= n - 2, "{record:?}");
        debug_assert!(record.distance <= 4 * n - 8, "{record:?}");
    }
    record
}

/// Generates, reduces, and measures pairs for every `(size entry, index)`
/// combination. Records come back in stream-index order: entry 0's pairs
/// first, each entry contributing `count_per_size` consecutive indices.
///
/// # Panics
///
/// If the configuration is empty, a count is zero, a size is zero, or a
/// range is inverted.
pub fn run_batch(config: &BatchConfig) -> Vec<PairRecord> {
    assert!(config.count_per_size >= 1, "count_per_size must be ≥ 1");
    assert!(config.sizes.entries() >= 1, "no sizes requested");
    match &config.sizes {
        SizeSource::List(sizes) => {
            assert!(sizes.iter().all(|&s| s >= 1), "sizes must be ≥ 1")
        }
        SizeSource::Ranges(ranges) => assert!(
            ranges.iter().all(|r| 1 <= r.lo && r.lo <= r.hi),
            "ranges must be non-empty with lo ≥ 1"
        ),
    }
    let total = config.sizes.entries() as u64 * config.count_per_size as u64;
    (0..total)
        .into_par_iter()
        .map(|index| batch_record(config, index))
        .collect()
}

/// Aggregation key: the generated size (Table-2 style) or the reduced size
/// (Table-3 style, records with reduced size 0 excluded).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeMode {
    Raw,
    Reduced,
}

/// One aggregate row. Statistics are `None` for empty buckets.
#[derive(Debug, Clone, PartialEq)]
pub struct BucketRow {
    pub range_lo: u32,
    pub range_hi: u32,
    pub count: u64,
    pub avg_reduced_fraction: Option<f64>,
    /// Mean of distance/raw-size (Raw mode) or distance/reduced-size
    /// (Reduced mode).
    pub avg_ratio: Option<f64>,
    pub sd_ratio: Option<f64>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error("bucket {index} is inverted, overlapping, or out of order")]
    OverlappingBuckets { index: usize },
    #[error("need at least two points with distinct sizes to fit a line")]
    DegenerateFit,
    #[error(
        "generation budget of {budget} pairs exhausted with {kept} of {needed} kept"
    )]
    BudgetExhausted { budget: u64, kept: u64, needed: u64 },
    #[error("no records matched the selection")]
    EmptySelection,
}

/// Checks that buckets are individually non-empty, sorted, and disjoint.
pub fn validate_buckets(buckets: &[SizeRange]) -> Result<(), ExperimentError> {
    for (index, bucket) in buckets.iter().enumerate() {
        let ordered = bucket.lo <= bucket.hi
            && (index == 0 || buckets[index - 1].hi < bucket.lo);
        if !ordered {
            return Err(ExperimentError::OverlappingBuckets { index });
        }
    }
    Ok(())
}

/// Buckets sorted records by raw or reduced size and computes per-bucket
/// count, mean reduced fraction, mean ratio, and ratio standard deviation.
/// Buckets must be sorted and disjoint. Records outside every bucket are
/// ignored; in Reduced mode fully-reduced records (size 0) are excluded.
pub fn aggregate(
    records: &[PairRecord],
    buckets: &[SizeRange],
    mode: SizeMode,
) -> Result<Vec<BucketRow>, ExperimentError> {
    validate_buckets(buckets)?;
    let mut fractions: Vec<Vec<f64>> = vec![Vec::new(); buckets.len()];
    let mut ratios: Vec<Vec<f64>> = vec![Vec::new(); buckets.len()];
    for record in records {
        let (key, ratio) = match mode {
            SizeMode::Raw => (record.raw_size, record.ratio_raw()),
            SizeMode::Reduced => match record.ratio_reduced() {
                Some(ratio) => (record.reduced_size, ratio),
                None => continue,
            },
        };
        let slot = buckets.partition_point(|b| b.hi < key);
        if slot < buckets.len() && buckets[slot].contains(key) {
            fractions[slot].push(record.reduced_fraction());
            ratios[slot].push(ratio);
        }
    }
    Ok(buckets
        .iter()
        .zip(fractions.iter().zip(&ratios))
        .map(|(bucket, (fracs, rats))| {
            let frac_stats = sample_stats(fracs);
            let ratio_stats = sample_stats(rats);
            BucketRow {
                range_lo: bucket.lo,
                range_hi: bucket.hi,
                count: rats.len() as u64,
                avg_reduced_fraction: frac_stats.map(|s| s.mean),
                avg_ratio: ratio_stats.map(|s| s.mean),
                sd_ratio: ratio_stats.map(|s| s.sd),
            }
        })
        .collect())
}

/// The 30 size ranges used by the published distribution tables: decades to
/// 99, centuries to 999, quarter-thousands to 3499, then 3500–3999 and
/// 4000–4500.
pub fn paper_buckets() -> Vec<SizeRange> {
    let mut buckets = Vec::with_capacity(30);
    for lo in (10..100).step_by(10) {
        buckets.push(SizeRange::new(lo, lo + 9));
    }
    for lo in (100..1000).step_by(100) {
        buckets.push(SizeRange::new(lo, lo + 99));
    }
    for lo in (1000..3500).step_by(250) {
        buckets.push(SizeRange::new(lo, lo + 249));
    }
    buckets.push(SizeRange::new(3500, 3999));
    buckets.push(SizeRange::new(4000, 4500));
    buckets
}

/// Distance histogram over pairs of one exact reduced size.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub target_reduced_size: u32,
    pub bin_width: u64,
    /// `(bin lower edge, count)`, contiguous from the smallest to the
    /// largest observed distance.
    pub bins: Vec<(u64, u64)>,
    pub sample_mean: f64,
    pub sample_sd: f64,
    pub sample_skewness: f64,
    pub sample_count: u64,
}

fn histogram_of(
    distances: &[u64],
    target_reduced_size: u32,
    bin_width: u64,
) -> Histogram {
    assert!(bin_width >= 1);
    assert!(!distances.is_empty());
    let lo = distances.iter().min().unwrap() / bin_width * bin_width;
    let hi = distances.iter().max().unwrap() / bin_width * bin_width;
    let mut bins: Vec<(u64, u64)> = (lo..=hi)
        .step_by(bin_width as usize)
        .map(|edge| (edge, 0))
        .collect();
    for &d in distances {
        bins[((d - lo) / bin_width) as usize].1 += 1;
    }
    let values: Vec<f64> = distances.iter().map(|&d| d as f64).collect();
    let stats = sample_stats(&values).expect("nonempty");
    Histogram {
        target_reduced_size,
        bin_width,
        bins,
        sample_mean: stats.mean,
        sample_sd: stats.sd,
        sample_skewness: stats.skewness,
        sample_count: distances.len() as u64,
    }
}

/// Histogram of the distances of the records whose reduced size equals
/// `target`, at bin width 1.
pub fn histogram_from_records(
    records: &[PairRecord],
    target: u32,
) -> Result<Histogram, ExperimentError> {
    let distances: Vec<u64> = records
        .iter()
        .filter(|r| r.reduced_size == target)
        .map(|r| r.distance)
        .collect();
    if distances.is_empty() {
        return Err(ExperimentError::EmptySelection);
    }
    Ok(histogram_of(&distances, target, 1))
}

/// Raw generation size whose reduced size is centered on `target`: pairs
/// reduce to about 92.8% of their generated size on average.
pub fn raw_size_for_reduced_target(target: u32) -> u32 {
    (f64::from(target) / 0.928).round() as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HistogramConfig {
    /// Reduced size to condition on, ≥ 1.
    pub target_reduced_size: u32,
    /// Number of matching pairs to keep.
    pub min_count: u64,
    pub seed: Seed,
    /// Maximum number of pairs to generate while filtering.
    pub budget: u64,
    pub bin_width: u64,
    /// Generation size; defaults to [`raw_size_for_reduced_target`].
    pub raw_size: Option<u32>,
}

impl HistogramConfig {
    pub fn new(target_reduced_size: u32, min_count: u64, seed: Seed) -> HistogramConfig {
        HistogramConfig {
            target_reduced_size,
            min_count,
            seed,
            budget: min_count.saturating_mul(400).saturating_add(10_000),
            bin_width: 1,
            raw_size: None,
        }
    }
}

/// Generates pairs at a fixed raw size and keeps exactly the first
/// `min_count` (in stream-index order) whose reduced size hits the target.
/// The kept set depends only on the configuration, never on chunking or
/// thread count.
pub fn histogram_for_reduced_size(
    config: &HistogramConfig,
) -> Result<Histogram, ExperimentError> {
    assert!(config.target_reduced_size >= 1);
    assert!(config.min_count >= 1);
    let raw_size = config
        .raw_size
        .unwrap_or_else(|| raw_size_for_reduced_target(config.target_reduced_size));
    let needed = config.min_count as usize;
    let mut kept: Vec<u64> = Vec::with_capacity(needed);
    let mut next_index = 0u64;
    const CHUNK: u64 = 8192;
    while kept.len() < needed && next_index < config.budget {
        let hi = (next_index + CHUNK).min(config.budget);
        let mut hits: Vec<u64> = (next_index..hi)
            .into_par_iter()
            .filter_map(|index| {
                let result = rrd(&sample_pair(
                    raw_size as usize,
                    config.seed.derive(index),
                ));
                (result.reduced_size as u32 == config.target_reduced_size)
                    .then_some(result.distance)
            })
            .collect();
        hits.truncate(needed - kept.len());
        kept.extend(hits);
        next_index = hi;
    }
    if kept.len() < needed {
        return Err(ExperimentError::BudgetExhausted {
            budget: config.budget,
            kept: kept.len() as u64,
            needed: config.min_count,
        });
    }
    Ok(histogram_of(
        &kept,
        config.target_reduced_size,
        config.bin_width,
    ))
}

/// Ordinary least squares line with the worst relative residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// max over points of |y − (slope·x + intercept)| / y, skipping y = 0.
    pub max_relative_residual: f64,
}

impl FitResult {
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Least-squares fit of `y = slope·x + intercept` over the points.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<FitResult, ExperimentError> {
    if points.len() < 2 {
        return Err(ExperimentError::DegenerateFit);
    }
    let n = points.len() as f64;
    let x_mean = points.iter().map(|p| p.0).sum::<f64>() / n;
    let y_mean = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in points {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    if sxx == 0.0 {
        return Err(ExperimentError::DegenerateFit);
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let max_relative_residual = points
        .iter()
        .filter(|&&(_, y)| y != 0.0)
        .map(|&(x, y)| ((y - (slope * x + intercept)) / y).abs())
        .fold(0.0, f64::max);
    Ok(FitResult {
        slope,
        intercept,
        max_relative_residual,
    })
}

/// `(size, distance)` points for fitting, keyed per `mode`, restricted to
/// sizes in `[min_size, max_size]`. Reduced mode skips fully-reduced
/// records.
pub fn fit_points(
    records: &[PairRecord],
    mode: SizeMode,
    min_size: u32,
    max_size: u32,
) -> Vec<(f64, f64)> {
    records
        .iter()
        .filter_map(|r| {
            let size = match mode {
                SizeMode::Raw => r.raw_size,
                SizeMode::Reduced => {
                    if r.reduced_size == 0 {
                        return None;
                    }
                    r.reduced_size
                }
            };
            (min_size <= size && size <= max_size)
                .then_some((f64::from(size), r.distance as f64))
        })
        .collect()
}

/// How far observed distances sit from a fitted line.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub total: u64,
    /// For each requested threshold, the fraction of records whose relative
    /// deviation strictly exceeds it.
    pub fraction_beyond: Vec<(f64, f64)>,
    pub max_relative_deviation: f64,
}

/// Per-record relative deviation |distance − predicted| / predicted against
/// the fitted line, with `mode` choosing which size feeds the prediction.
/// Reduced mode skips fully-reduced records.
pub fn deviation_report(
    records: &[PairRecord],
    fit: &FitResult,
    mode: SizeMode,
    thresholds: &[f64],
) -> Result<DeviationReport, ExperimentError> {
    let mut deviations = Vec::with_capacity(records.len());
    for r in records {
        let size = match mode {
            SizeMode::Raw => f64::from(r.raw_size),
            SizeMode::Reduced => {
                if r.reduced_size == 0 {
                    continue;
                }
                f64::from(r.reduced_size)
            }
        };
        let predicted = fit.predict(size);
        deviations.push(((r.distance as f64) - predicted).abs() / predicted);
    }
    if deviations.is_empty() {
        return Err(ExperimentError::EmptySelection);
    }
    let total = deviations.len() as u64;
    let fraction_beyond = thresholds
        .iter()
        .map(|&t| {
            let beyond = deviations.iter().filter(|&&d| d > t).count();
            (t, beyond as f64 / total as f64)
        })
        .collect();
    let max_relative_deviation = deviations.iter().copied().fold(0.0, f64::max);
    Ok(DeviationReport {
        total,
        fraction_beyond,
        max_relative_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed() -> Seed {
        Seed::new(99)
    }

    #[test]
    fn single_tiny_batch_entry() {
        let config = BatchConfig {
            sizes: SizeSource::List(vec![2]),
            count_per_size: 1,
            seed: seed(),
        };
        let records = run_batch(&config);
        assert_eq!(records.len(), 1);
        let r = records[0];
        assert_eq!(r.stream_index, 0);
        assert_eq!(r.raw_size, 2);
        assert!(r.distance <= 1);
        assert_eq!(r.distance == 0, r.reduced_size == 0);
    }

    #[test]
    fn batches_are_deterministic_and_ordered() {
        let config = BatchConfig {
            sizes: SizeSource::Ranges(vec![
                SizeRange::new(5, 30),
                SizeRange::new(40, 60),
            ]),
            count_per_size: 50,
            seed: seed(),
        };
        let a = run_batch(&config);
        let b = run_batch(&config);
        assert_eq!(a, b);
        assert_eq!(a.len(), 100);
        for (i, r) in a.iter().enumerate() {
            assert_eq!(r.stream_index, i as u64);
            let range = if i < 50 { (5, 30) } else { (40, 60) };
            assert!(range.0 <= r.raw_size && r.raw_size <= range.1, "{r:?}");
        }
        // Uniform draws should spread across the range.
        let distinct: std::collections::HashSet<u32> =
            a[..50].iter().map(|r| r.raw_size).collect();
        assert!(distinct.len() > 10);
    }

    #[test]
    fn range_sizes_are_log_uniform() {
        // Draws inside a range weight size n proportionally to 1/n.
        let config = BatchConfig {
            sizes: SizeSource::Ranges(vec![SizeRange::new(10, 19)]),
            count_per_size: 20_000,
            seed: seed(),
        };
        let records = run_batch(&config);
        let mut counts = [0u64; 10];
        for r in &records {
            counts[(r.raw_size - 10) as usize] += 1;
        }
        let harmonic: f64 = (10..=19).map(|n| 1.0 / n as f64).sum();
        let expected: Vec<f64> = (10..=19)
            .map(|n| 20_000.0 / n as f64 / harmonic)
            .collect();
        let statistic = crate::stats::chi_square_statistic(&counts, &expected);
        let critical = crate::stats::chi_square_critical(9, 0.001);
        assert!(statistic < critical, "{statistic} vs {critical}");
    }

    #[test]
    fn list_batches_use_exact_sizes() {
        let config = BatchConfig {
            sizes: SizeSource::List(vec![7, 20]),
            count_per_size: 30,
            seed: seed(),
        };
        let records = run_batch(&config);
        assert!(records[..30].iter().all(|r| r.raw_size == 7));
        assert!(records[30..].iter().all(|r| r.raw_size == 20));
    }

    fn fake(stream_index: u64, raw: u32, reduced: u32, distance: u64) -> PairRecord {
        PairRecord {
            stream_index,
            raw_size: raw,
            reduced_size: reduced,
            distance,
        }
    }

    #[test]
    fn aggregate_by_raw_and_reduced_size() {
        let records = vec![
            fake(0, 10, 9, 20),
            fake(1, 12, 0, 0),
            fake(2, 25, 22, 70),
            fake(3, 14, 11, 30),
        ];
        let buckets = vec![SizeRange::new(10, 19), SizeRange::new(20, 29)];

        let raw = aggregate(&records, &buckets, SizeMode::Raw).unwrap();
        assert_eq!(raw[0].count, 3);
        assert_eq!(raw[1].count, 1);
        let mean0 = (20.0 / 10.0 + 0.0 / 12.0 + 30.0 / 14.0) / 3.0;
        assert!((raw[0].avg_ratio.unwrap() - mean0).abs() < 1e-12);
        let frac0 = (9.0 / 10.0 + 0.0 / 12.0 + 11.0 / 14.0) / 3.0;
        assert!((raw[0].avg_reduced_fraction.unwrap() - frac0).abs() < 1e-12);

        // Reduced mode drops the fully-reduced record and rekeys the rest;
        // reduced size 9 now falls below the first bucket and is ignored.
        let reduced = aggregate(&records, &buckets, SizeMode::Reduced).unwrap();
        assert_eq!(reduced[0].count, 1);
        assert_eq!(reduced[1].count, 1);
        assert!((reduced[0].avg_ratio.unwrap() - 30.0 / 11.0).abs() < 1e-12);
        assert!((reduced[1].avg_ratio.unwrap() - 70.0 / 22.0).abs() < 1e-12);

        // Records outside all buckets are ignored.
        let narrow = aggregate(&records, &[SizeRange::new(20, 29)], SizeMode::Raw).unwrap();
        assert_eq!(narrow[0].count, 1);
    }

    #[test]
    fn aggregate_flags_empty_buckets() {
        let rows = aggregate(&[], &[SizeRange::new(1, 5)], SizeMode::Raw).unwrap();
        assert_eq!(rows[0].count, 0);
        assert_eq!(rows[0].avg_ratio, None);
        assert_eq!(rows[0].avg_reduced_fraction, None);
        assert_eq!(rows[0].sd_ratio, None);
    }

    #[test]
    fn aggregate_rejects_bad_buckets() {
        let records = [fake(0, 10, 9, 20)];
        for buckets in [
            vec![SizeRange::new(10, 19), SizeRange::new(15, 25)],
            vec![SizeRange::new(20, 29), SizeRange::new(10, 19)],
            vec![SizeRange::new(19, 10)],
        ] {
            assert!(matches!(
                aggregate(&records, &buckets, SizeMode::Raw),
                Err(ExperimentError::OverlappingBuckets { .. })
            ));
        }
    }

    #[test]
    fn paper_buckets_are_valid_and_complete() {
        let buckets = paper_buckets();
        assert_eq!(buckets.len(), 30);
        assert_eq!(buckets[0], SizeRange::new(10, 19));
        assert_eq!(buckets[9], SizeRange::new(100, 199));
        assert_eq!(buckets[18], SizeRange::new(1000, 1249));
        assert_eq!(buckets[28], SizeRange::new(3500, 3999));
        assert_eq!(buckets[29], SizeRange::new(4000, 4500));
        validate_buckets(&buckets).unwrap();
    }

    #[test]
    fn histogram_from_records_selects_target() {
        let records = vec![
            fake(0, 10, 6, 11),
            fake(1, 10, 6, 13),
            fake(2, 10, 7, 15),
            fake(3, 10, 6, 11),
        ];
        let hist = histogram_from_records(&records, 6).unwrap();
        assert_eq!(hist.sample_count, 3);
        assert_eq!(hist.bins, vec![(11, 2), (12, 0), (13, 1)]);
        assert!((hist.sample_mean - 35.0 / 3.0).abs() < 1e-12);
        assert_eq!(
            hist.bins.iter().map(|b| b.1).sum::<u64>(),
            hist.sample_count
        );
        assert!(matches!(
            histogram_from_records(&records, 9),
            Err(ExperimentError::EmptySelection)
        ));
    }

    #[test]
    fn raw_size_targets() {
        assert_eq!(raw_size_for_reduced_target(19), 20);
        assert_eq!(raw_size_for_reduced_target(120), 129);
        assert_eq!(raw_size_for_reduced_target(714), 769);
    }

    #[test]
    fn on_the_fly_histogram_is_deterministic() {
        let config = HistogramConfig::new(6, 40, seed());
        let a = histogram_for_reduced_size(&config).unwrap();
        let b = histogram_for_reduced_size(&config).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.sample_count, 40);
        assert_eq!(a.target_reduced_size, 6);
        assert_eq!(a.bins.iter().map(|b| b.1).sum::<u64>(), 40);
    }

    #[test]
    fn histogram_budget_is_enforced() {
        let mut config = HistogramConfig::new(6, 1000, seed());
        config.budget = 50;
        assert!(matches!(
            histogram_for_reduced_size(&config),
            Err(ExperimentError::BudgetExhausted { budget: 50, .. })
        ));
    }

    #[test]
    fn collinear_fit_is_exact() {
        let points: Vec<(f64, f64)> =
            (1..20).map(|k| (k as f64, 2.0 * k as f64 + 1.0)).collect();
        let fit = linear_fit(&points).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!(fit.max_relative_residual < 1e-12);
    }

    #[test]
    fn degenerate_fits_are_rejected() {
        assert!(matches!(
            linear_fit(&[(1.0, 2.0)]),
            Err(ExperimentError::DegenerateFit)
        ));
        assert!(matches!(
            linear_fit(&[(3.0, 1.0), (3.0, 9.0), (3.0, 4.0)]),
            Err(ExperimentError::DegenerateFit)
        ));
    }

    #[test]
    fn fit_residuals_are_orthogonal() {
        // Least-squares optimality: residuals sum to zero and are
        // uncorrelated with x.
        let points: Vec<(f64, f64)> = (0..200)
            .map(|k| {
                let x = 10.0 + k as f64;
                let wiggle = ((k * 2654435761u64 % 1000) as f64) / 500.0 - 1.0;
                (x, 3.5 * x - 16.0 + wiggle * 5.0)
            })
            .collect();
        let fit = linear_fit(&points).unwrap();
        let mut sum_r = 0.0;
        let mut sum_rx = 0.0;
        let mut scale = 0.0;
        for &(x, y) in &points {
            let r = y - fit.predict(x);
            sum_r += r;
            sum_rx += r * x;
            scale += y.abs() + x * y.abs();
        }
        assert!(sum_r.abs() <= 1e-9 * scale);
        assert!(sum_rx.abs() <= 1e-9 * scale);
    }

    #[test]
    fn fit_points_filter_by_mode_and_span() {
        let records = vec![
            fake(0, 10, 9, 20),
            fake(1, 50, 0, 0),
            fake(2, 50, 45, 150),
            fake(3, 200, 190, 700),
        ];
        let reduced = fit_points(&records, SizeMode::Reduced, 10, 100);
        assert_eq!(reduced, vec![(45.0, 150.0)]);
        let raw = fit_points(&records, SizeMode::Raw, 10, 100);
        assert_eq!(raw, vec![(10.0, 20.0), (50.0, 0.0), (50.0, 150.0)]);
    }

    #[test]
    fn deviations_against_a_perfect_line() {
        let fit = FitResult {
            slope: 3.0,
            intercept: -1.0,
            max_relative_residual: 0.0,
        };
        let records = vec![fake(0, 10, 7, 20), fake(1, 10, 9, 26)];
        let report =
            deviation_report(&records, &fit, SizeMode::Reduced, &[0.01, 0.03]).unwrap();
        assert_eq!(report.total, 2);
        assert_eq!(report.fraction_beyond, vec![(0.01, 0.0), (0.03, 0.0)]);
        assert_eq!(report.max_relative_deviation, 0.0);

        // One record 10% off.
        let skewed = vec![fake(0, 10, 7, 22), fake(1, 10, 9, 26)];
        let report =
            deviation_report(&skewed, &fit, SizeMode::Reduced, &[0.01, 0.3]).unwrap();
        assert_eq!(report.fraction_beyond[0], (0.01, 0.5));
        assert_eq!(report.fraction_beyond[1], (0.3, 0.0));
        assert!((report.max_relative_deviation - 0.1).abs() < 1e-12);
    }
}
