//! Configuration files, seeding, experiment orchestration and CSV output.

mod config;
mod output;
mod run;
mod seed;

pub use config::{default_r_enz_grid, parse_config, render, ExperimentPlan, KEYS};
pub use output::{
    analytic_csv, emit_tables, fit_csv, fmt_num, hits_csv, itr_csv, optimum_csv, signal_csv, volume_csv,
    FitRow, OptimumRow, Tables, VolumeRow, ANALYTIC_HEADER, FIT_HEADER, HITS_HEADER, ITR_HEADER,
    OPTIMUM_HEADER, SIGNAL_HEADER, VOLUME_HEADER,
};
pub use run::{fit_rows, optimum_rows, run_sweep, simulate, volume_rows, SimulateOutput};
pub use seed::{mix64, seed_derivation};
