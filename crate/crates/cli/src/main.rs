mod cache;
mod cases;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

/// Traveling fronts, entire solutions and stability experiments for
/// u_t = u_xx + f(u). Exit status: 0 when every check passes, 1 when a
/// check fails, 2 on configuration or solver errors.
#[derive(Parser)]
#[command(name = "rdlab", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// TOML run configuration (flags override its keys). A run's
    /// manifest.toml is itself a valid configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: $RDLAB_OUT/<command>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// cubic:0.3, quartic:0.4,2, fisher, poly:c0,c1,... or [c0, c1, ...].
    #[arg(long)]
    reaction: Option<String>,
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    halfwidth: Option<f64>,
    #[arg(long)]
    dx: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// dirichlet_envelope | neumann
    #[arg(long)]
    boundary: Option<String>,
    /// compact | central
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<f64>>,
    #[arg(long)]
    t_end: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct Experiment {
    /// front | constant | diverging | sandwich | lower-bound
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    /// Number of seeds per delta in a sweep.
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    half_widths: Option<Vec<f64>>,
    /// forward | reflected | both
    #[arg(long)]
    orientation: Option<String>,
    /// far-above | all-above | far-below | all-below | all
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long)]
    margin: Option<f64>,
    #[arg(long)]
    half_width: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    start: Option<f64>,
    #[arg(long)]
    span: Option<f64>,
    /// u3 | u10 | u01 | u11
    #[arg(long)]
    variant: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve for the traveling front and report eigenvalues and tail constants.
    Front {
        #[command(flatten)]
        common: Common,
        /// Requested speed (monostable terms only; defaults to c_min).
        #[arg(long)]
        speed: Option<f64>,
    },
    /// Evolve initial data and write snapshots.
    Evolve {
        #[command(flatten)]
        common: Common,
        /// front | bump:h,L | constant:v
        #[arg(long)]
        init: Option<String>,
    },
    /// Construct the entire solution of the reaction's case and check it.
    Entire {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        variant: Option<String>,
    },
    /// Run one stability experiment.
    Stability {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exp: Experiment,
    },
    /// Run a parameter sweep of front or diverging-pair experiments in parallel.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exp: Experiment,
    },
    /// Summarize the report and check files under a run directory.
    Report { dir: PathBuf },
}

fn overrides(c: &Common) -> RunConfig {
    let mut o = RunConfig { reaction: c.reaction.clone(), case: c.case.clone(), seed: c.seed, ..Default::default() };
    o.grid.domain_halfwidth = c.halfwidth;
    o.grid.dx = c.dx;
    o.grid.dt = c.dt;
    o.grid.boundary = c.boundary.clone();
    o.grid.scheme = c.scheme.clone();
    o.horizon.n_list = c.n_list.clone();
    o.horizon.t_end = c.t_end;
    o
}

fn with_experiment(mut o: RunConfig, e: &Experiment) -> RunConfig {
    let x = &mut o.experiment;
    x.kind = e.experiment.clone();
    x.delta = e.delta;
    x.deltas = e.deltas.clone();
    x.seeds = e.seeds;
    x.half_widths = e.half_widths.clone();
    x.orientation = e.orientation.clone();
    x.pattern = e.pattern.clone();
    x.margin = e.margin;
    x.half_width = e.half_width;
    x.start = e.start;
    x.span = e.span;
    x.variant = e.variant.clone();
    o
}

fn load(c: &Common, over: RunConfig) -> rdlab::Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.overlay(&over);
    Ok(cfg)
}

fn run(cli: Cli) -> rdlab::Result<bool> {
    match cli.cmd {
        Cmd::Front { common, speed } => {
            let mut o = overrides(&common);
            o.experiment.speed = speed;
            commands::cmd_front(&load(&common, o)?, common.out.as_deref())
        }
        Cmd::Evolve { common, init } => {
            let mut o = overrides(&common);
            o.experiment.init = init;
            commands::cmd_evolve(&load(&common, o)?, common.out.as_deref())
        }
        Cmd::Entire { common, variant } => {
            let mut o = overrides(&common);
            o.experiment.variant = variant;
            commands::cmd_entire(&load(&common, o)?, common.out.as_deref())
        }
        Cmd::Stability { common, exp } => {
            let o = with_experiment(overrides(&common), &exp);
            commands::cmd_stability(&load(&common, o)?, common.out.as_deref())
        }
        Cmd::Sweep { common, exp } => {
            let o = with_experiment(overrides(&common), &exp);
            commands::cmd_sweep(&load(&common, o)?, common.out.as_deref())
        }
        Cmd::Report { dir } => commands::cmd_report(&dir),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
