//! Observables computed from hit records: binned received signals, the
//! interference-to-total-received ratio (ITR), hit-location hemispheres, and
//! the search for the enzyme radius that minimizes ITR.

use crate::engine::{Hit, HitRecordSet, Scenario};
use crate::error::{Error, Result};
use crate::geometry::Point3;

#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedSignal {
    /// `bins + 1` edges tiling `(0, t_end]`.
    pub bin_edges: Vec<f64>,
    pub mean_counts: Vec<f64>,
    pub std_counts: Vec<f64>,
}

impl ReceivedSignal {
    pub fn bins(&self) -> usize {
        self.mean_counts.len()
    }

    pub fn total_mean(&self) -> f64 {
        self.mean_counts.iter().sum()
    }
}

/// Index of the half-open bin `(i w, (i+1) w]` holding time `t`.
fn bin_index(t: f64, width: f64, bins: usize) -> usize {
    let scaled = t / width;
    let idx = (scaled - 1e-9 * scaled.abs().max(1.0)).ceil() as isize - 1;
    idx.clamp(0, bins as isize - 1) as usize
}

/// Histogram every replication's hits into bins of `bin_width` over
/// `(0, t_end]` and summarize each bin across replications.
pub fn bin_signal(records: &[HitRecordSet], bin_width: f64, t_end: f64) -> Result<ReceivedSignal> {
    if !(bin_width > 0.0) || !(t_end > 0.0) {
        return Err(Error::Domain(format!(
            "binning needs positive width and end time, got width={bin_width}, t_end={t_end}"
        )));
    }
    let bins = crate::engine::step_count(t_end, bin_width).max(1) as usize;
    let bin_edges: Vec<f64> = (0..=bins)
        .map(|i| (i as f64 * bin_width).min(t_end))
        .collect();
    let per_rep: Vec<Vec<f64>> = records
        .iter()
        .map(|rec| {
            let mut counts = vec![0.0; bins];
            for hit in &rec.hits {
                counts[bin_index(hit.time, bin_width, bins)] += 1.0;
            }
            counts
        })
        .collect();
    let mut mean_counts = vec![0.0; bins];
    let mut std_counts = vec![0.0; bins];
    for b in 0..bins {
        let column: Vec<f64> = per_rep.iter().map(|c| c[b]).collect();
        let (mean, std) = mean_std(&column);
        mean_counts[b] = mean;
        std_counts[b] = std;
    }
    Ok(ReceivedSignal {
        bin_edges,
        mean_counts,
        std_counts,
    })
}

/// Mean and sample standard deviation; zero spread for fewer than two values.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Fraction of the first emission's received molecules that arrive later
/// than `t_s` after that emission, counting arrivals up to `t_end`.
pub fn itr(record: &HitRecordSet, t_s: f64, t_end: f64) -> Result<f64> {
    if !(t_s <= t_end) {
        return Err(Error::Domain(format!("ITR needs t_s <= t_end, got {t_s} > {t_end}")));
    }
    let Some(&start) = record.emission_times.first() else {
        return Err(Error::UndefinedMetric("ITR undefined: nothing was emitted".into()));
    };
    let mut total = 0usize;
    let mut within = 0usize;
    for hit in record.hits.iter().filter(|h| h.emission == 0) {
        let age = hit.time - start;
        if age <= t_end {
            total += 1;
            if age <= t_s {
                within += 1;
            }
        }
    }
    if total == 0 {
        return Err(Error::UndefinedMetric(format!(
            "ITR undefined: no molecules received by t_end={t_end} (replication {})",
            record.replication_id
        )));
    }
    Ok((total - within) as f64 / total as f64)
}

/// Split hits into the half facing the transmitter and the half behind the
/// receiver. `axis` points from the transmitter toward the receiver; a hit is
/// in the back hemisphere when its offset from `rx_center` has a positive
/// component along `axis`.
pub fn hemisphere_fractions<'a>(
    hits: impl IntoIterator<Item = &'a Hit>,
    rx_center: Point3,
    axis: Point3,
) -> Result<(f64, f64)> {
    let mut front = 0usize;
    let mut back = 0usize;
    for hit in hits {
        if (hit.position - rx_center).dot(axis) > 0.0 {
            back += 1;
        } else {
            front += 1;
        }
    }
    let total = front + back;
    if total == 0 {
        return Err(Error::UndefinedMetric("hemisphere fractions need at least one hit".into()));
    }
    Ok((front as f64 / total as f64, back as f64 / total as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ItrResult {
    pub scenario: Scenario,
    pub d: f64,
    pub r_enz: f64,
    pub t_s: f64,
    pub half_life: f64,
    pub itr_mean: f64,
    pub itr_std: f64,
    pub replications: usize,
}

impl ItrResult {
    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        self.itr_std / (self.replications as f64).sqrt()
    }
}

/// Combine per-replication results for one configuration into mean and
/// sample standard deviation. The key fields are taken from the first entry.
pub fn aggregate(results: &[ItrResult]) -> Result<ItrResult> {
    let first = results
        .first()
        .ok_or_else(|| Error::UndefinedMetric("cannot aggregate zero replications".into()))?;
    let values: Vec<f64> = results.iter().map(|r| r.itr_mean).collect();
    let (mean, std) = mean_std(&values);
    Ok(ItrResult {
        itr_mean: mean,
        itr_std: std,
        replications: results.len(),
        ..first.clone()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub grid: Vec<ItrResult>,
    pub r_enz_star: f64,
    pub itr_min: f64,
}

/// Grid point with the lowest mean ITR; ties go to the smaller radius.
pub fn find_optimal_renz(grid: &[ItrResult]) -> Result<SweepResult> {
    let best = grid
        .iter()
        .reduce(|best, r| {
            if r.itr_mean < best.itr_mean || (r.itr_mean == best.itr_mean && r.r_enz < best.r_enz) {
                r
            } else {
                best
            }
        })
        .ok_or_else(|| Error::UndefinedMetric("optimal radius needs a nonempty grid".into()))?;
    Ok(SweepResult {
        grid: grid.to_vec(),
        r_enz_star: best.r_enz,
        itr_min: best.itr_mean,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Ordinary least squares line through `(d, r_enz*)` points.
pub fn fit_renz_star_vs_distance(points: &[(f64, f64)]) -> Result<LineFit> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return Err(Error::Fit("need at least two points".into()));
    }
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("all distances are equal".into()));
    }
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    Ok(LineFit {
        slope,
        intercept: mean_y - slope * mean_x,
    })
}
