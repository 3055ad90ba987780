//! CSV and SVG output for experiment results, plus a reader for the
//! per-pair CSV so saved runs can be re-fit later.

use std::io::{self, BufRead, BufReader, Read, Write};

use thiserror::Error;

use crate::experiments::{BucketRow, Histogram, PairRecord};

pub const PAIR_CSV_HEADER: &str =
    "stream_index,raw_size,reduced_size,distance,ratio_raw,ratio_reduced";
pub const BUCKET_CSV_HEADER: &str =
    "range_lo,range_hi,count,avg_reduced_fraction,avg_ratio,sd_ratio";
pub const HISTOGRAM_CSV_HEADER: &str = "bin_lo,count";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn parse_error(line: usize, message: impl Into<String>) -> ReportError {
    ReportError::Parse {
        line,
        message: message.into(),
    }
}

/// Writes one row per record under [`PAIR_CSV_HEADER`]. Ratios carry six
/// decimals; an undefined reduced ratio becomes an empty field.
pub fn write_pair_records_csv(
    out: &mut impl Write,
    records: &[PairRecord],
) -> io::Result<()> {
    writeln!(out, "{PAIR_CSV_HEADER}")?;
    for r in records {
        let reduced_ratio = match r.ratio_reduced() {
            Some(ratio) => format!("{ratio:.6}"),
            None => String::new(),
        };
        writeln!(
            out,
            "{},{},{},{},{:.6},{}",
            r.stream_index,
            r.raw_size,
            r.reduced_size,
            r.distance,
            r.ratio_raw(),
            reduced_ratio
        )?;
    }
    Ok(())
}

/// Reads a per-pair CSV back into records. The ratio columns are derived
/// data, so only the four integer columns are parsed.
pub fn read_pair_records_csv(input: impl Read) -> Result<Vec<PairRecord>, ReportError> {
    let reader = BufReader::new(input);
    let mut records = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        let number = index + 1;
        if index == 0 {
            if line.trim_end() != PAIR_CSV_HEADER {
                return Err(parse_error(
                    number,
                    format!("expected header {PAIR_CSV_HEADER:?}"),
                ));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(parse_error(
                number,
                format!("expected 6 fields, found {}", fields.len()),
            ));
        }
        let int = |field: &str, name: &str| {
            field.trim().parse::<u64>().map_err(|e| {
                parse_error(number, format!("bad {name} {field:?}: {e}"))
            })
        };
        records.push(PairRecord {
            stream_index: int(fields[0], "stream_index")?,
            raw_size: int(fields[1], "raw_size")? as u32,
            reduced_size: int(fields[2], "reduced_size")? as u32,
            distance: int(fields[3], "distance")?,
        });
    }
    Ok(records)
}

/// Writes one row per bucket under [`BUCKET_CSV_HEADER`]. Statistics of
/// empty buckets become empty fields.
pub fn write_bucket_rows_csv(
    out: &mut impl Write,
    rows: &[BucketRow],
) -> io::Result<()> {
    writeln!(out, "{BUCKET_CSV_HEADER}")?;
    let opt = |value: Option<f64>| match value {
        Some(v) => format!("{v:.6}"),
        None => String::new(),
    };
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            row.range_lo,
            row.range_hi,
            row.count,
            opt(row.avg_reduced_fraction),
            opt(row.avg_ratio),
            opt(row.sd_ratio)
        )?;
    }
    Ok(())
}

/// Writes `bin_lo,count` rows followed by a comment line carrying the
/// sample summary: `# n=<target> mean=<m> sd=<s> count=<c>`.
pub fn write_histogram_csv(
    out: &mut impl Write,
    histogram: &Histogram,
) -> io::Result<()> {
    writeln!(out, "{HISTOGRAM_CSV_HEADER}")?;
    for &(bin_lo, count) in &histogram.bins {
        writeln!(out, "{bin_lo},{count}")?;
    }
    writeln!(
        out,
        "# n={} mean={:.4} sd={:.4} count={}",
        histogram.target_reduced_size,
        histogram.sample_mean,
        histogram.sample_sd,
        histogram.sample_count
    )
}

fn normal_density(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
}

/// Renders the histogram as an SVG bar chart with the matching normal
/// density (same mean, standard deviation, and mass) drawn on top.
pub fn render_histogram_svg(histogram: &Histogram) -> String {
    const WIDTH: f64 = 800.0;
    const HEIGHT: f64 = 500.0;
    const MARGIN: f64 = 50.0;
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;

    let bins = &histogram.bins;
    let bin_width = histogram.bin_width as f64;
    let x_lo = bins.first().map_or(0.0, |b| b.0 as f64);
    let x_hi = bins.last().map_or(1.0, |b| b.0 as f64) + bin_width;
    let x_span = (x_hi - x_lo).max(1.0);
    let expected = |x: f64| {
        histogram.sample_count as f64
            * bin_width
            * normal_density(x, histogram.sample_mean, histogram.sample_sd)
    };
    let max_count = bins
        .iter()
        .map(|b| b.1 as f64)
        .fold(expected(histogram.sample_mean), f64::max)
        .max(1.0);

    let to_x = |x: f64| MARGIN + (x - x_lo) / x_span * plot_w;
    let to_y = |count: f64| MARGIN + plot_h - count / max_count * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"16\">distance distribution at reduced size {} \
         (mean {:.2}, sd {:.2}, {} samples)</text>\n",
        WIDTH / 2.0,
        MARGIN / 2.0 + 5.0,
        histogram.target_reduced_size,
        histogram.sample_mean,
        histogram.sample_sd,
        histogram.sample_count
    ));
    // Axes.
    svg.push_str(&format!(
        "  <line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n  \
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        t = MARGIN,
        b = MARGIN + plot_h,
        r = MARGIN + plot_w
    ));
    // Bars.
    for &(bin_lo, count) in bins {
        if count == 0 {
            continue;
        }
        let x = to_x(bin_lo as f64);
        let y = to_y(count as f64);
        let w = bin_width / x_span * plot_w;
        let h = MARGIN + plot_h - y;
        svg.push_str(&format!(
            "  <rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" \
             fill=\"steelblue\" fill-opacity=\"0.7\"/>\n"
        ));
    }
    // Matching normal curve, sampled densely across the span.
    let mut path = String::from("  <polyline fill=\"none\" stroke=\"crimson\" stroke-width=\"2\" points=\"");
    const CURVE_POINTS: usize = 256;
    for i in 0..=CURVE_POINTS {
        let x = x_lo + x_span * i as f64 / CURVE_POINTS as f64;
        // Center the curve on bin midpoints so it overlays the bars.
        let y = to_y(expected(x)).clamp(MARGIN, MARGIN + plot_h);
        path.push_str(&format!("{:.2},{:.2} ", to_x(x - bin_width / 2.0) + bin_width / x_span * plot_w, y));
    }
    path.push_str("\"/>\n");
    svg.push_str(&path);
    // X-axis end labels.
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"12\">{}</text>\n",
        to_x(x_lo),
        MARGIN + plot_h + 20.0,
        x_lo
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"12\">{}</text>\n",
        to_x(x_hi),
        MARGIN + plot_h + 20.0,
        x_hi
    ));
    svg.push_str("</svg>\n");
    svg
}
