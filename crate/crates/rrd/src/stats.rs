//! Small statistical helpers: summary statistics and chi-square tests.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Summary statistics of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator); 0 for singletons.
    pub sd: f64,
    /// Moment skewness g₁; 0 when the sample has no spread.
    pub skewness: f64,
}

/// Two-pass mean / standard deviation / skewness. Returns `None` for an
/// empty slice.
pub fn sample_stats(values: &[f64]) -> Option<SampleStats> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    for &v in values {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    let sd = if values.len() < 2 {
        0.0
    } else {
        (m2 / (n - 1.0)).sqrt()
    };
    let skewness = if m2 == 0.0 {
        0.0
    } else {
        (m3 / n) / (m2 / n).powf(1.5)
    };
    Some(SampleStats {
        count: values.len(),
        mean,
        sd,
        skewness,
    })
}

/// Pearson's chi-square statistic Σ (observed − expected)² / expected.
///
/// # Panics
///
/// If the slices have different lengths or an expected count is not
/// positive.
pub fn chi_square_statistic(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            assert!(e > 0.0, "expected counts must be positive");
            let d = o as f64 - e;
            d * d / e
        })
        .sum()
}

/// Chi-square statistic against the uniform distribution over the observed
/// categories, with its degrees of freedom.
pub fn uniform_chi_square(observed: &[u64]) -> (f64, usize) {
    assert!(observed.len() >= 2, "need at least two categories");
    let total: u64 = observed.iter().sum();
    let expected = vec![total as f64 / observed.len() as f64; observed.len()];
    (
        chi_square_statistic(observed, &expected),
        observed.len() - 1,
    )
}

/// Upper critical value: the chi-square quantile with `df` degrees of
/// freedom at the given significance level (e.g. 0.001).
pub fn chi_square_critical(df: usize, significance: f64) -> f64 {
    assert!(df >= 1);
    assert!((0.0..1.0).contains(&significance) && significance > 0.0);
    ChiSquared::new(df as f64)
        .expect("valid degrees of freedom")
        .inverse_cdf(1.0 - significance)
}
