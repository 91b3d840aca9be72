//! CSV tables. Numbers are written with 9 significant digits in `%.9g` style
//! so that files are byte-stable across runs and platforms.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::analytic::AnalyticRow;
use crate::engine::{HitRecordSet, Scenario};
use crate::error::{Error, Result};
use crate::metrics::{ItrResult, LineFit, ReceivedSignal};

pub const SIGNAL_HEADER: &str = "bin_start_s,bin_end_s,mean_count,std_count";
pub const ITR_HEADER: &str = "scenario,d_um,r_enz_um,t_s_s,half_life_s,itr_mean,itr_std,replications";
pub const HITS_HEADER: &str = "replication,hit_time_s,x_um,y_um,z_um";
pub const OPTIMUM_HEADER: &str = "d_um,t_s_s,r_enz_star_um,itr_min";
pub const FIT_HEADER: &str = "scenario,half_life_s,t_s_s,slope,intercept,points";
pub const VOLUME_HEADER: &str =
    "scenario,d_um,r_enz_um,enzyme_radius_um,overlap_volume_um3,enzyme_volume_um3,reference_volume_um3,effective_half_life_s";
pub const ANALYTIC_HEADER: &str = "time_s,hit_rate_per_s,hit_cdf,hit_rate_enzyme_per_s,hit_cdf_enzyme";

/// Format like C's `%.9g`.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_fraction(&format!("{x:.decimals$}")).to_string()
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimumRow {
    pub scenario: Scenario,
    pub half_life: f64,
    pub d: f64,
    pub t_s: f64,
    pub r_enz_star: f64,
    pub itr_min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitRow {
    pub scenario: Scenario,
    pub half_life: f64,
    pub t_s: f64,
    pub fit: LineFit,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeRow {
    pub scenario: Scenario,
    pub d: f64,
    pub r_enz: f64,
    pub enzyme_radius: f64,
    pub overlap_volume: f64,
    pub enzyme_volume: f64,
    pub reference_volume: f64,
    pub effective_half_life: f64,
}

/// Everything an experiment can write. `None` tables are skipped; empty
/// tables produce header-only files.
#[derive(Debug, Default)]
pub struct Tables<'a> {
    pub signal: Option<&'a ReceivedSignal>,
    pub itr: Option<&'a [ItrResult]>,
    pub hits: Option<&'a [HitRecordSet]>,
    pub optimum: Option<&'a [OptimumRow]>,
    pub fits: Option<&'a [FitRow]>,
    pub volumes: Option<&'a [VolumeRow]>,
    pub analytic: Option<&'a [AnalyticRow]>,
}

fn csv<T>(header: &str, rows: &[T], mut row: impl FnMut(&T, &mut String)) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(header);
    out.push('\n');
    for r in rows {
        row(r, &mut out);
        out.push('\n');
    }
    out
}

fn fields(out: &mut String, values: &[&dyn std::fmt::Display]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v}");
    }
}

pub fn signal_csv(signal: &ReceivedSignal) -> String {
    let rows: Vec<usize> = (0..signal.bins()).collect();
    csv(SIGNAL_HEADER, &rows, |&i, out| {
        fields(
            out,
            &[
                &fmt_num(signal.bin_edges[i]),
                &fmt_num(signal.bin_edges[i + 1]),
                &fmt_num(signal.mean_counts[i]),
                &fmt_num(signal.std_counts[i]),
            ],
        )
    })
}

/// Rows in canonical order: scenario, d, r_enz, t_s, half-life.
pub fn itr_csv(rows: &[ItrResult]) -> String {
    let mut sorted = rows.to_vec();
    sorted.sort_by(|a, b| {
        a.scenario
            .cmp(&b.scenario)
            .then(a.d.total_cmp(&b.d))
            .then(a.r_enz.total_cmp(&b.r_enz))
            .then(a.t_s.total_cmp(&b.t_s))
            .then(a.half_life.total_cmp(&b.half_life))
    });
    csv(ITR_HEADER, &sorted, |r, out| {
        fields(
            out,
            &[
                &r.scenario,
                &fmt_num(r.d),
                &fmt_num(r.r_enz),
                &fmt_num(r.t_s),
                &fmt_num(r.half_life),
                &fmt_num(r.itr_mean),
                &fmt_num(r.itr_std),
                &r.replications,
            ],
        )
    })
}

/// Hits ordered by replication, then in recorded order.
pub fn hits_csv(records: &[HitRecordSet]) -> String {
    let mut sorted: Vec<&HitRecordSet> = records.iter().collect();
    sorted.sort_by_key(|r| r.replication_id);
    let rows: Vec<(u32, &crate::engine::Hit)> = sorted
        .iter()
        .flat_map(|r| r.hits.iter().map(move |h| (r.replication_id, h)))
        .collect();
    csv(HITS_HEADER, &rows, |(id, h), out| {
        fields(
            out,
            &[
                id,
                &fmt_num(h.time),
                &fmt_num(h.position.x),
                &fmt_num(h.position.y),
                &fmt_num(h.position.z),
            ],
        )
    })
}

/// Rows in canonical order: scenario, half-life, d, t_s.
pub fn optimum_csv(rows: &[OptimumRow]) -> String {
    let mut sorted = rows.to_vec();
    sorted.sort_by(|a, b| {
        a.scenario
            .cmp(&b.scenario)
            .then(a.half_life.total_cmp(&b.half_life))
            .then(a.d.total_cmp(&b.d))
            .then(a.t_s.total_cmp(&b.t_s))
    });
    csv(OPTIMUM_HEADER, &sorted, |r, out| {
        fields(
            out,
            &[&fmt_num(r.d), &fmt_num(r.t_s), &fmt_num(r.r_enz_star), &fmt_num(r.itr_min)],
        )
    })
}

pub fn fit_csv(rows: &[FitRow]) -> String {
    csv(FIT_HEADER, rows, |r, out| {
        fields(
            out,
            &[
                &r.scenario,
                &fmt_num(r.half_life),
                &fmt_num(r.t_s),
                &fmt_num(r.fit.slope),
                &fmt_num(r.fit.intercept),
                &r.points,
            ],
        )
    })
}

pub fn volume_csv(rows: &[VolumeRow]) -> String {
    csv(VOLUME_HEADER, rows, |r, out| {
        fields(
            out,
            &[
                &r.scenario,
                &fmt_num(r.d),
                &fmt_num(r.r_enz),
                &fmt_num(r.enzyme_radius),
                &fmt_num(r.overlap_volume),
                &fmt_num(r.enzyme_volume),
                &fmt_num(r.reference_volume),
                &fmt_num(r.effective_half_life),
            ],
        )
    })
}

pub fn analytic_csv(rows: &[AnalyticRow]) -> String {
    csv(ANALYTIC_HEADER, rows, |r, out| {
        fields(
            out,
            &[
                &fmt_num(r.t),
                &fmt_num(r.rate),
                &fmt_num(r.cdf),
                &fmt_num(r.rate_enzyme),
                &fmt_num(r.cdf_enzyme),
            ],
        )
    })
}

fn write(dir: &Path, name: &str, contents: String, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

/// Write the present tables into `dir` (created if missing) and return the
/// paths written.
pub fn emit_tables(dir: &Path, tables: &Tables<'_>) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    if let Some(signal) = tables.signal {
        write(dir, "signal.csv", signal_csv(signal), &mut written)?;
    }
    if let Some(rows) = tables.itr {
        write(dir, "itr.csv", itr_csv(rows), &mut written)?;
    }
    if let Some(records) = tables.hits {
        write(dir, "hits.csv", hits_csv(records), &mut written)?;
    }
    if let Some(rows) = tables.optimum {
        write(dir, "optimum.csv", optimum_csv(rows), &mut written)?;
    }
    if let Some(rows) = tables.fits {
        write(dir, "fit.csv", fit_csv(rows), &mut written)?;
    }
    if let Some(rows) = tables.volumes {
        write(dir, "volumes.csv", volume_csv(rows), &mut written)?;
    }
    if let Some(rows) = tables.analytic {
        write(dir, "analytic.csv", analytic_csv(rows), &mut written)?;
    }
    Ok(written)
}
