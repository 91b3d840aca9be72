//! Orchestration of plans: single simulations, ITR sweeps, and the optimal
//! radius search. Work fans out over a bounded pool; results are merged by
//! key so the output never depends on scheduling.

use rayon::prelude::*;

use super::config::ExperimentPlan;
use super::output::{FitRow, OptimumRow, VolumeRow};
use super::seed_derivation;
use crate::engine::{build_scenario, with_pool, HitRecordSet, Scenario, SimulationConfig};
use crate::error::Result;
use crate::geometry::overlap_volume;
use crate::metrics::{self, ItrResult, ReceivedSignal};

impl ExperimentPlan {
    /// Configuration for one sweep point with the plan-wide everywhere radius.
    pub fn point_config(&self, scenario: Scenario, d: f64, r_enz: f64, half_life: f64) -> SimulationConfig {
        SimulationConfig {
            scenario,
            d,
            r_enz,
            unit_half_life: half_life,
            everywhere_radius: Some(self.everywhere_radius()),
            ..self.base.clone()
        }
    }
}

#[derive(Debug)]
pub struct SimulateOutput {
    pub records: Vec<HitRecordSet>,
    pub signal: ReceivedSignal,
    /// ITR of the first emission for every symbol period in the plan.
    pub itr: Vec<ItrResult>,
}

/// Run the plan's base configuration with its full emission schedule.
pub fn simulate(plan: &ExperimentPlan) -> Result<SimulateOutput> {
    plan.validate()?;
    let cfg = plan.point_config(plan.base.scenario, plan.base.d, plan.base.r_enz, plan.base.unit_half_life);
    let built = build_scenario(&cfg)?;
    let records = built.run_replications(cfg.replications, cfg.master_seed, plan.threads);
    let signal = metrics::bin_signal(&records, cfg.bin_width, cfg.t_end)?;
    let mut itr = Vec::new();
    if !built.emission_steps.is_empty() {
        for &t_s in &plan.symbol_periods {
            itr.push(itr_over(&records, &cfg, t_s)?);
        }
    }
    Ok(SimulateOutput {
        records,
        signal,
        itr,
    })
}

fn itr_over(records: &[HitRecordSet], cfg: &SimulationConfig, t_s: f64) -> Result<ItrResult> {
    let per_rep = records
        .iter()
        .map(|rec| {
            Ok(ItrResult {
                scenario: cfg.scenario,
                d: cfg.d,
                r_enz: cfg.r_enz,
                t_s,
                half_life: cfg.unit_half_life,
                itr_mean: metrics::itr(rec, t_s, cfg.t_end)?,
                itr_std: 0.0,
                replications: 1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    metrics::aggregate(&per_rep)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct SimKey {
    scenario: Scenario,
    d: f64,
    r_enz: f64,
    half_life: f64,
}

/// Distinct simulations needed by the plan. Scenarios that ignore an axis
/// (no enzymes, or the fixed everywhere region) run once for its first value.
fn simulation_keys(plan: &ExperimentPlan) -> Vec<SimKey> {
    let mut keys = Vec::new();
    for &scenario in &plan.scenarios {
        let radii: &[f64] = match scenario {
            Scenario::NonePt | Scenario::NoneSt | Scenario::EverywherePt | Scenario::EverywhereSt => {
                &plan.r_enz[..1]
            }
            _ => &plan.r_enz,
        };
        let half_lives: &[f64] = if scenario.has_enzymes() {
            &plan.half_lives
        } else {
            &plan.half_lives[..1]
        };
        for &half_life in half_lives {
            for &d in &plan.distances {
                for &r_enz in radii {
                    keys.push(SimKey {
                        scenario,
                        d,
                        r_enz,
                        half_life,
                    });
                }
            }
        }
    }
    keys
}

/// ITR over the full plan grid. Every point is simulated with a single
/// impulse at t = 0 and all symbol periods are evaluated on the same hits.
pub fn run_sweep(plan: &ExperimentPlan) -> Result<Vec<ItrResult>> {
    plan.validate()?;
    let keys = simulation_keys(plan);
    let built = keys
        .iter()
        .map(|k| {
            let cfg = SimulationConfig {
                bits: Some(vec![true]),
                ..plan.point_config(k.scenario, k.d, k.r_enz, k.half_life)
            };
            build_scenario(&cfg).map(|b| (cfg, b))
        })
        .collect::<Result<Vec<_>>>()?;
    let replications = plan.base.replications;
    let jobs: Vec<(usize, usize)> = (0..keys.len())
        .flat_map(|k| (0..replications).map(move |r| (k, r)))
        .collect();
    let per_job: Vec<Result<Vec<f64>>> = with_pool(plan.threads, || {
        jobs.par_iter()
            .map(|&(k, rep)| {
                let (cfg, scenario) = &built[k];
                let record = scenario.run_replication(rep as u32, seed_derivation(cfg.master_seed, rep as u64));
                plan.symbol_periods
                    .iter()
                    .map(|&t_s| metrics::itr(&record, t_s, cfg.t_end))
                    .collect()
            })
            .collect()
    });
    let per_job = per_job.into_iter().collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (k, key) in keys.iter().enumerate() {
        let reps = &per_job[k * replications..(k + 1) * replications];
        for (ti, &t_s) in plan.symbol_periods.iter().enumerate() {
            let values: Vec<f64> = reps.iter().map(|v| v[ti]).collect();
            let (mean, std) = metrics::mean_std(&values);
            let expand_r: &[f64] = if matches!(key.scenario, Scenario::NonePt | Scenario::NoneSt | Scenario::EverywherePt | Scenario::EverywhereSt) {
                &plan.r_enz
            } else {
                std::slice::from_ref(&key.r_enz)
            };
            let expand_h: &[f64] = if key.scenario.has_enzymes() {
                std::slice::from_ref(&key.half_life)
            } else {
                &plan.half_lives
            };
            for &r_enz in expand_r {
                for &half_life in expand_h {
                    rows.push(ItrResult {
                        scenario: key.scenario,
                        d: key.d,
                        r_enz,
                        t_s,
                        half_life,
                        itr_mean: mean,
                        itr_std: std,
                        replications,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Best radius for every (scenario, half-life, d, t_s) group in `rows`.
pub fn optimum_rows(rows: &[ItrResult]) -> Result<Vec<OptimumRow>> {
    let mut groups: Vec<(Scenario, f64, f64, f64)> = rows
        .iter()
        .map(|r| (r.scenario, r.half_life, r.d, r.t_s))
        .collect();
    groups.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.total_cmp(&b.2))
            .then(a.3.total_cmp(&b.3))
    });
    groups.dedup();
    groups
        .into_iter()
        .map(|(scenario, half_life, d, t_s)| {
            let mut grid: Vec<ItrResult> = rows
                .iter()
                .filter(|r| r.scenario == scenario && r.half_life == half_life && r.d == d && r.t_s == t_s)
                .cloned()
                .collect();
            grid.sort_by(|a, b| a.r_enz.total_cmp(&b.r_enz));
            let best = metrics::find_optimal_renz(&grid)?;
            Ok(OptimumRow {
                scenario,
                half_life,
                d,
                t_s,
                r_enz_star: best.r_enz_star,
                itr_min: best.itr_min,
            })
        })
        .collect()
}

/// Line fit of r_enz* against d for every (scenario, half-life, t_s) group
/// that spans at least two distances.
pub fn fit_rows(optima: &[OptimumRow]) -> Result<Vec<FitRow>> {
    let mut groups: Vec<(Scenario, f64, f64)> = optima.iter().map(|o| (o.scenario, o.half_life, o.t_s)).collect();
    groups.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
    groups.dedup();
    let mut fits = Vec::new();
    for (scenario, half_life, t_s) in groups {
        let points: Vec<(f64, f64)> = optima
            .iter()
            .filter(|o| o.scenario == scenario && o.half_life == half_life && o.t_s == t_s)
            .map(|o| (o.d, o.r_enz_star))
            .collect();
        if points.iter().any(|p| p.0 != points[0].0) {
            fits.push(FitRow {
                scenario,
                half_life,
                t_s,
                fit: metrics::fit_renz_star_vs_distance(&points)?,
                points: points.len(),
            });
        }
    }
    Ok(fits)
}

/// Enzyme volumes and effective half-lives for every enzymatic plan point.
pub fn volume_rows(plan: &ExperimentPlan) -> Result<Vec<VolumeRow>> {
    let mut rows = Vec::new();
    for key in simulation_keys(plan) {
        if !key.scenario.has_enzymes() {
            continue;
        }
        let built = build_scenario(&plan.point_config(key.scenario, key.d, key.r_enz, key.half_life))?;
        let (Some(region), Some(k)) = (built.geometry.enzyme, built.kinetics) else {
            continue;
        };
        rows.push(VolumeRow {
            scenario: key.scenario,
            d: key.d,
            r_enz: key.r_enz,
            enzyme_radius: region.outer_radius,
            overlap_volume: overlap_volume(&built.geometry),
            enzyme_volume: k.region_volume,
            reference_volume: k.reference_volume,
            effective_half_life: k.effective_half_life,
        });
    }
    Ok(rows)
}
