use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mcvd_enzyme::analytic::{self, ChannelParams};
use mcvd_enzyme::cli_io::{self, ExperimentPlan, Tables};
use mcvd_enzyme::engine::Scenario;
use mcvd_enzyme::{Error, Result};

/// Limited-enzyme molecular communication channel simulator.
#[derive(Parser, Debug)]
#[command(name = "mcvd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Experiment file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides `out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed; overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Replications; overrides `replications` in the config.
    #[arg(long)]
    reps: Option<usize>,
    /// Worker threads; overrides `threads` in the config (0 = all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enzyme region volumes and effective half-lives for every plan point.
    Geometry(Common),
    /// Point-Tx hitting density and CDF, with and without degradation.
    Analytic {
        #[command(flatten)]
        common: Common,
        /// Degradation rate in 1/s for the enzyme columns.
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
        /// Number of evenly spaced times in (0, t_end].
        #[arg(long, default_value_t = 400)]
        points: usize,
    },
    /// Run the base configuration with its emission schedule.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Also write every absorption event to hits.csv.
        #[arg(long)]
        dump_hits: bool,
    },
    /// ITR over the plan grid.
    Sweep(Common),
    /// ITR sweep plus the optimal enzyme radius per configuration and line fits.
    Optimum(Common),
}

fn load_plan(common: &Common, required: bool) -> Result<ExperimentPlan> {
    let mut plan = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            cli_io::parse_config(&text)?
        }
        None if required => {
            return Err(Error::Config {
                key: "--config".into(),
                line: None,
                message: "this subcommand needs an experiment file".into(),
            })
        }
        None => ExperimentPlan::new(vec![Scenario::StArx, Scenario::StAtx, Scenario::PtArx, Scenario::PtAtx]),
    };
    if let Some(out) = &common.out {
        plan.output_dir = out.clone();
    }
    if let Some(seed) = common.seed {
        plan.base.master_seed = seed;
    }
    if let Some(reps) = common.reps {
        plan.base.replications = reps;
    }
    if let Some(threads) = common.threads {
        plan.threads = threads;
    }
    plan.validate()?;
    Ok(plan)
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn emit(dir: &Path, tables: &Tables<'_>) -> Result<()> {
    report(&cli_io::emit_tables(dir, tables)?);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Geometry(common) => {
            let plan = load_plan(&common, false)?;
            let rows = cli_io::volume_rows(&plan)?;
            emit(&plan.output_dir, &Tables { volumes: Some(&rows), ..Tables::default() })
        }
        Command::Analytic { common, lambda, points } => {
            let plan = load_plan(&common, false)?;
            let params = ChannelParams::new(plan.base.d, plan.base.r_r, plan.base.diffusion, lambda)?;
            let rows = analytic::tabulate(&params, plan.base.t_end, points)?;
            emit(&plan.output_dir, &Tables { analytic: Some(&rows), ..Tables::default() })
        }
        Command::Simulate { common, dump_hits } => {
            let plan = load_plan(&common, true)?;
            let out = cli_io::simulate(&plan)?;
            emit(
                &plan.output_dir,
                &Tables {
                    signal: Some(&out.signal),
                    itr: Some(&out.itr),
                    hits: dump_hits.then_some(out.records.as_slice()),
                    ..Tables::default()
                },
            )
        }
        Command::Sweep(common) => {
            let plan = load_plan(&common, true)?;
            let rows = cli_io::run_sweep(&plan)?;
            emit(&plan.output_dir, &Tables { itr: Some(&rows), ..Tables::default() })
        }
        Command::Optimum(common) => {
            let plan = load_plan(&common, true)?;
            let rows = cli_io::run_sweep(&plan)?;
            let optima = cli_io::optimum_rows(&rows)?;
            let fits = cli_io::fit_rows(&optima)?;
            for f in &fits {
                println!(
                    "{} half_life={} t_s={}: slope={} intercept={}",
                    f.scenario,
                    cli_io::fmt_num(f.half_life),
                    cli_io::fmt_num(f.t_s),
                    cli_io::fmt_num(f.fit.slope),
                    cli_io::fmt_num(f.fit.intercept)
                );
            }
            emit(
                &plan.output_dir,
                &Tables {
                    itr: Some(&rows),
                    optimum: Some(&optima),
                    fits: Some(&fits),
                    ..Tables::default()
                },
            )
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let message = err.to_string().replace('\n', " ");
            eprintln!("error[{}]: {message}", err.category());
            ExitCode::from(2)
        }
    }
}
