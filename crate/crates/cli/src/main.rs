//! `phasespace` command line: run trajectory ensembles, sweep pulse
//! durations, cross-check against the master-equation oracle, and
//! replot result CSVs.

use clap::{Args, Parser, Subcommand, ValueEnum};
use phasespace::compare::oracle_compare;
use phasespace::config::{parse_config, ConfigError, ReprSelect, RunConfig};
use phasespace::ensemble::{run_ensemble, witness_table, EnsembleConfig};
use phasespace::report::{
    self, witness_csv, CsvRow, ReprStats, RunManifest,
};
use phasespace::svg::{line_chart, palette, Series};
use phasespace::{dump, exit_code};
use phasespace_core::oracle::FockConfig;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "phasespace",
    version,
    about = "Monte Carlo phase-space simulator for pulsed cavity optomechanics"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the configured ensemble and write CSV, manifest, figures
    /// and accumulator dumps.
    Run(RunArgs),
    /// Re-run the configured instance over a range of pulse durations,
    /// one checkpoint at each pulse end.
    Sweep(SweepArgs),
    /// Compare intracavity moments of both stochastic methods against
    /// the dense master-equation integrator.
    OracleCompare(RunArgs),
    /// Re-emit figures from an existing witness CSV.
    Plot(PlotArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to a run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Override the master seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: PHASESPACE_THREADS, then all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Override the representation selection from the config.
    #[arg(long, value_enum)]
    representation: Option<ReprArg>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: RunArgs,
    /// Number of pulse durations to sample.
    #[arg(long, default_value_t = 6)]
    points: usize,
    /// Shortest pulse, as a fraction of the configured duration.
    #[arg(long, default_value_t = 0.25)]
    tau_min: f64,
    /// Longest pulse, as a fraction of the configured duration.
    #[arg(long, default_value_t = 1.0)]
    tau_max: f64,
}

#[derive(Args)]
struct PlotArgs {
    /// Witness CSV produced by `run` or `sweep`.
    #[arg(long)]
    csv: PathBuf,
    /// Output directory for the figures.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReprArg {
    Pp,
    Wigner,
    Both,
}

impl From<ReprArg> for ReprSelect {
    fn from(r: ReprArg) -> ReprSelect {
        match r {
            ReprArg::Pp => ReprSelect::Pp,
            ReprArg::Wigner => ReprSelect::Wigner,
            ReprArg::Both => ReprSelect::Both,
        }
    }
}

enum CliError {
    Config(String),
    Engine(phasespace_core::Error),
    Io(std::io::Error),
    Data(String),
    Stats(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Data(_) => 2,
            CliError::Engine(e) => exit_code(e),
            CliError::Io(_) => 1,
            CliError::Stats(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Data(m) | CliError::Stats(m) => write!(f, "{m}"),
            CliError::Engine(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> CliError {
        CliError::Config(e.to_string())
    }
}

impl From<phasespace_core::Error> for CliError {
    fn from(e: phasespace_core::Error) -> CliError {
        CliError::Engine(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Io(e)
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Sweep(args) => cmd_sweep(args),
        Cmd::OracleCompare(args) => cmd_oracle_compare(args),
        Cmd::Plot(args) => cmd_plot(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.code());
    }
}

fn load_config(args: &RunArgs) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.config.display())))?;
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(repr) = args.representation {
        cfg.representation = repr.into();
    }
    Ok(cfg)
}

/// Build a dedicated pool when a thread count was requested (flag
/// first, then PHASESPACE_THREADS); otherwise use the rayon default.
fn thread_pool(requested: Option<usize>) -> Result<Option<rayon::ThreadPool>, CliError> {
    let n = match requested {
        Some(n) => Some(n),
        None => match std::env::var("PHASESPACE_THREADS") {
            Ok(s) => Some(s.parse().map_err(|_| {
                CliError::Config(format!("PHASESPACE_THREADS=`{s}` is not a thread count"))
            })?),
            Err(_) => None,
        },
    };
    match n {
        Some(0) => Err(CliError::Config("thread count must be positive".into())),
        Some(n) => Ok(Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(e.to_string()))?,
        )),
        None => Ok(None),
    }
}

fn with_pool<T: Send>(
    pool: &Option<rayon::ThreadPool>,
    f: impl FnOnce() -> T + Send,
) -> T {
    match pool {
        Some(p) => p.install(f),
        None => f(),
    }
}

fn write_figures(rows: &[CsvRow], out: &Path) -> Result<(), CliError> {
    let groups = report::by_representation(rows);
    let figures: [(&str, &str, fn(&CsvRow) -> (f64, f64)); 3] = [
        ("delta_ent.svg", "Optical-mechanical entanglement", |r| (r.delta_ent, r.delta_ent_err)),
        ("steering_m_given_c.svg", "Mirror steered by the pulse", |r| (r.e_m_c, r.e_m_c_err)),
        ("steering_c_given_m.svg", "Pulse steered by the mirror", |r| (r.e_c_m, r.e_c_m_err)),
    ];
    for (file, title, pick) in figures {
        let series: Vec<Series> = groups
            .iter()
            .enumerate()
            .map(|(i, (label, rows))| Series {
                label: label.clone(),
                color: palette(i),
                points: rows
                    .iter()
                    .map(|r| {
                        let (y, e) = pick(r);
                        (r.r, y, e)
                    })
                    .collect(),
            })
            .collect();
        let svg = line_chart(title, "squeeze parameter r", "witness value", &series, true);
        fs::write(out.join(file), svg)?;
    }
    Ok(())
}

fn run_one(
    cfg: &RunConfig,
    pool: &Option<rayon::ThreadPool>,
    manifest: &mut RunManifest,
    rows: &mut Vec<CsvRow>,
    dump_dir: Option<&Path>,
) -> Result<(), CliError> {
    let (params, env) = cfg.working()?;
    let integrator = cfg.integrator(env.tau());
    for repr in cfg.representation.representations() {
        let ecfg = EnsembleConfig {
            n_traj: cfg.n_traj,
            n_batches: cfg.n_batches,
            master_seed: cfg.seed,
            representation: repr,
            integrator: integrator.clone(),
        };
        let result = with_pool(pool, || run_ensemble(&ecfg, &params, &env))?;
        let reports = witness_table(&result, &params, &env, &integrator)?;
        rows.extend(reports.iter().map(CsvRow::from_report));
        if let Some(dir) = dump_dir {
            fs::write(
                dir.join(format!("accumulators_{}.bin", repr.label())),
                dump::encode(&result),
            )?;
        }
        manifest.ensembles.push(ReprStats {
            representation: repr.label().to_string(),
            n_traj: result.n_traj,
            diverged: result.diverged,
            wall_time_s: result.wall_time.as_secs_f64(),
        });
    }
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let cfg = load_config(&args)?;
    let pool = thread_pool(args.threads)?;
    fs::create_dir_all(&args.out)?;
    let mut manifest = RunManifest::new(cfg.seed, cfg.hash());
    let mut rows = Vec::new();
    run_one(&cfg, &pool, &mut manifest, &mut rows, Some(&args.out))?;
    fs::write(args.out.join("witnesses.csv"), witness_csv(&rows))?;
    let json = serde_json::to_string_pretty(&manifest)
        .expect("manifest serialization cannot fail");
    fs::write(args.out.join("manifest.json"), json + "\n")?;
    write_figures(&rows, &args.out)?;
    for stats in &manifest.ensembles {
        println!(
            "{}: {} trajectories, {} diverged, {:.1} s",
            stats.representation, stats.n_traj, stats.diverged, stats.wall_time_s
        );
    }
    println!("results written to {}", args.out.display());
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    if args.points < 2 {
        return Err(CliError::Config("sweep needs at least 2 points".into()));
    }
    if !(args.tau_min > 0.0 && args.tau_max >= args.tau_min) {
        return Err(CliError::Config("require 0 < tau-min <= tau-max".into()));
    }
    let base = load_config(&args.common)?;
    let pool = thread_pool(args.common.threads)?;
    fs::create_dir_all(&args.common.out)?;
    let mut manifest = RunManifest::new(base.seed, base.hash());
    let mut rows = Vec::new();
    for i in 0..args.points {
        let f = args.tau_min
            + (args.tau_max - args.tau_min) * i as f64 / (args.points - 1) as f64;
        let mut cfg = base.clone();
        cfg.tau *= f;
        if let phasespace::config::PulseShape::Gaussian { center, width } = &mut cfg.shape {
            *center *= f;
            *width *= f;
        }
        cfg.n_checkpoints = 1;
        run_one(&cfg, &pool, &mut manifest, &mut rows, None)?;
    }
    // Checkpoints arrive grouped by duration; sort by representation
    // then r so each plotted curve is monotone in r.
    rows.sort_by(|a, b| {
        (a.representation.as_str(), a.r)
            .partial_cmp(&(b.representation.as_str(), b.r))
            .expect("witness r is finite")
    });
    fs::write(args.common.out.join("sweep.csv"), witness_csv(&rows))?;
    let json = serde_json::to_string_pretty(&manifest)
        .expect("manifest serialization cannot fail");
    fs::write(args.common.out.join("manifest.json"), json + "\n")?;
    write_figures(&rows, &args.common.out)?;
    println!("sweep results written to {}", args.common.out.display());
    Ok(())
}

fn cmd_oracle_compare(args: RunArgs) -> Result<(), CliError> {
    let cfg = load_config(&args)?;
    let Some(oracle) = cfg.oracle else {
        return Err(CliError::Config(
            "oracle-compare needs an [oracle] section (dim_a, dim_b, dt)".into(),
        ));
    };
    let pool = thread_pool(args.threads)?;
    let (params, env) = cfg.working()?;
    let integrator = cfg.integrator(env.tau());
    let fock = FockConfig { dim_a: oracle.dim_a, dim_b: oracle.dim_b, dt: oracle.dt };
    let outcome = with_pool(&pool, || {
        oracle_compare(&params, &env, &integrator, &fock, cfg.n_traj, cfg.n_batches, cfg.seed)
    })?;
    fs::create_dir_all(&args.out)?;
    fs::write(args.out.join("oracle_compare.csv"), report::comparison_csv(&outcome.rows))?;
    println!("{:<14} {:>12} {:>12} {:>10} {:>12} {:>10} {:>8}",
        "moment", "oracle", "positive-P", "pp err", "wigner", "wig err", "z");
    for row in &outcome.rows {
        println!(
            "{:<14} {:>12.6} {:>12.6} {:>10.2e} {:>12.6} {:>10.2e} {:>8.2}",
            row.moment, row.me_value, row.pp_value, row.pp_err,
            row.wigner_value, row.wigner_err, row.z_score
        );
    }
    if outcome.max_pp_z > 4.0 {
        return Err(CliError::Stats(format!(
            "positive-P deviates from the oracle by {:.2} standard errors (limit 4)",
            outcome.max_pp_z
        )));
    }
    println!("all positive-P z-scores below 4 (max {:.2})", outcome.max_pp_z);
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.csv)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.csv.display())))?;
    let rows = report::parse_witness_csv(&text).map_err(CliError::Data)?;
    fs::create_dir_all(&args.out)?;
    write_figures(&rows, &args.out)?;
    println!("figures written to {}", args.out.display());
    Ok(())
}
