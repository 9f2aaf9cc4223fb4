//! Command-line front end for the `tempnet` binary.
//!
//! Exit codes: 0 success, 1 bad configuration or arguments, 2 capacity
//! limit hit, 3 internal invariant violation. clap's own exit code for
//! usage errors is 2, which collides with the capacity code, so parsing
//! goes through `try_parse` and usage errors are remapped to 1.

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::sweeps::{self, CoordinateSystem};
use crate::config::{self, FileConfig, Overlay};
use crate::error::{Error, Result};
use crate::io::{self, CurveSample};
use crate::manifest::Emitter;
use crate::model;
use crate::sim::run_simulation;

#[derive(Parser, Debug)]
#[command(
    name = "tempnet",
    version,
    about = "Growth trade-off analytics and activity-driven network simulation"
)]
struct Cli {
    #[command(flatten)]
    shared: SharedArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SharedArgs {
    /// TOML configuration file; explicit flags override its values
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Directory output files are written into
    #[arg(
        long,
        global = true,
        env = "TEMPNET_OUT_DIR",
        default_value = ".",
        value_name = "DIR"
    )]
    out_dir: PathBuf,
    /// Node count [default: 100]
    #[arg(long, global = true, value_name = "N")]
    n_nodes: Option<usize>,
    /// Links created per step
    #[arg(long, global = true, value_name = "M")]
    m: Option<u32>,
    /// Links present before the first step [default: 0]
    #[arg(long, global = true, value_name = "M0")]
    m0: Option<u64>,
    /// Initial activity per node
    #[arg(long, global = true, value_name = "K0")]
    k0: Option<f64>,
    /// Observation start time [default: 1]
    #[arg(long, global = true, value_name = "T0")]
    t0: Option<f64>,
    /// Maintenance cost rate
    #[arg(long, global = true, value_name = "ALPHA")]
    alpha: Option<f64>,
    /// Ensemble size [default: 1]
    #[arg(long, global = true, value_name = "RUNS")]
    runs: Option<u32>,
    /// Seed deriving every run's RNG stream [default: 0]
    #[arg(long, global = true, value_name = "SEED")]
    master_seed: Option<u64>,
    /// Steps per run [default: 1000]
    #[arg(long, global = true, value_name = "STEPS")]
    steps: Option<u64>,
    /// Record every n-th step [default: 1]
    #[arg(long, global = true, value_name = "N")]
    record_every: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample the value, cost, and net curves over a time range
    Curves {
        /// First sampled time [default: t0]
        #[arg(long, value_name = "T")]
        t_start: Option<f64>,
        /// Last sampled time [default: 1000*t0]
        #[arg(long, value_name = "T")]
        t_end: Option<f64>,
        /// Number of samples
        #[arg(long, default_value_t = 200, value_name = "N")]
        points: usize,
        /// Space samples evenly in log t instead of linearly
        #[arg(long)]
        log_spacing: bool,
    },
    /// Print the long-run scenario for the given parameters
    Classify {
        /// Relative half-width of the boundary band around alpha = 3m
        #[arg(long, default_value_t = model::BOUNDARY_REL_TOL, value_name = "TOL")]
        tol: f64,
    },
    /// Run the simulation ensemble and write per-run activity series
    Simulate {
        /// Recorded cells per run above which output switches to the
        /// binary dump (with a CSV sample alongside)
        #[arg(long, default_value_t = 10_000_000, value_name = "CELLS")]
        binary_threshold: u64,
    },
    /// Map the cross-over time over the (k0, m) plane and extract contours
    Sweep {
        #[arg(long, default_value_t = 0.0, value_name = "K0")]
        k0_min: f64,
        #[arg(long, default_value_t = 2000.0, value_name = "K0")]
        k0_max: f64,
        #[arg(long, default_value_t = 1001, value_name = "N")]
        k0_points: usize,
        #[arg(long, default_value_t = 1, value_name = "M")]
        m_min: u32,
        #[arg(long, default_value_t = 20, value_name = "M")]
        m_max: u32,
        /// Comma-separated cross-over levels to contour
        #[arg(long, default_value = "600,1200,1800,2400", value_name = "LIST")]
        levels: String,
    },
    /// Map the characteristic time or the scenario over a normalized plane
    Phase {
        #[arg(long, value_enum, default_value_t = QuantityArg::Tchar)]
        quantity: QuantityArg,
        /// Normalized coordinates; the scenario map is per-m only
        #[arg(long, value_enum, default_value_t = CoordsArg::PerM)]
        coords: CoordsArg,
        /// Lower end of the x axis [default: 0]
        #[arg(long, value_name = "X")]
        x_min: Option<f64>,
        /// Upper end of the x axis [default: 10]
        #[arg(long, value_name = "X")]
        x_max: Option<f64>,
        #[arg(long, default_value_t = 101, value_name = "N")]
        x_points: usize,
        /// Lower end of the y axis [default: 0, or 0.01 per-k0]
        #[arg(long, value_name = "Y")]
        y_min: Option<f64>,
        /// Upper end of the y axis [default: 100, or 1 per-k0]
        #[arg(long, value_name = "Y")]
        y_max: Option<f64>,
        #[arg(long, default_value_t = 101, value_name = "N")]
        y_points: usize,
        /// Relative half-width of the boundary band (scenario maps)
        #[arg(long, default_value_t = model::BOUNDARY_REL_TOL, value_name = "TOL")]
        tol: f64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum QuantityArg {
    Tchar,
    Scenario,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum CoordsArg {
    PerM,
    PerK0,
}

impl CoordsArg {
    fn system(self) -> CoordinateSystem {
        match self {
            CoordsArg::PerM => CoordinateSystem::PerM,
            CoordsArg::PerK0 => CoordinateSystem::PerK0,
        }
    }

    fn slug(self) -> &'static str {
        match self {
            CoordsArg::PerM => "per_m",
            CoordsArg::PerK0 => "per_k0",
        }
    }
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if ok { 0 } else { 1 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn overlay_from(shared: &SharedArgs) -> Overlay {
    Overlay {
        n_nodes: shared.n_nodes,
        m: shared.m,
        m0: shared.m0,
        k0: shared.k0,
        t0: shared.t0,
        alpha: shared.alpha,
        runs: shared.runs,
        master_seed: shared.master_seed,
        steps: shared.steps,
        record_every: shared.record_every,
    }
}

fn load_file(shared: &SharedArgs) -> Result<FileConfig> {
    match &shared.config {
        Some(path) => {
            let source = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("config {}: {e}", path.display())))?;
            config::parse_file(&source)
        }
        None => Ok(FileConfig::default()),
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let argv: Vec<String> = std::env::args().collect();
    let file = load_file(&cli.shared)?;
    let flags = overlay_from(&cli.shared);
    let out_dir = cli.shared.out_dir.clone();
    match cli.command {
        Command::Curves {
            t_start,
            t_end,
            points,
            log_spacing,
        } => cmd_curves(&out_dir, argv, &file, &flags, t_start, t_end, points, log_spacing),
        Command::Classify { tol } => cmd_classify(&file, &flags, tol),
        Command::Simulate { binary_threshold } => {
            cmd_simulate(&out_dir, argv, &file, &flags, binary_threshold)
        }
        Command::Sweep {
            k0_min,
            k0_max,
            k0_points,
            m_min,
            m_max,
            levels,
        } => cmd_sweep(
            &out_dir,
            argv,
            &file,
            &flags,
            (k0_min, k0_max),
            k0_points,
            (m_min, m_max),
            &levels,
        ),
        Command::Phase {
            quantity,
            coords,
            x_min,
            x_max,
            x_points,
            y_min,
            y_max,
            y_points,
            tol,
        } => cmd_phase(
            &out_dir, argv, quantity, coords, x_min, x_max, x_points, y_min, y_max, y_points, tol,
        ),
    }
}

fn sample_times(t_start: f64, t_end: f64, points: usize, log_spacing: bool) -> Result<Vec<f64>> {
    if !t_start.is_finite() || !t_end.is_finite() || t_start < 0.0 {
        return Err(Error::Config(format!(
            "curve range must be finite and non-negative, got [{t_start}, {t_end}]"
        )));
    }
    if t_end <= t_start {
        return Err(Error::Config(format!(
            "t-end must exceed t-start, got [{t_start}, {t_end}]"
        )));
    }
    if points < 2 {
        return Err(Error::Config(format!("points: need at least 2, got {points}")));
    }
    if log_spacing && t_start <= 0.0 {
        return Err(Error::Config(
            "log spacing needs t-start > 0".to_string(),
        ));
    }
    let n = points;
    let mut ts = Vec::with_capacity(n);
    if log_spacing {
        let (la, lb) = (t_start.ln(), t_end.ln());
        for i in 0..n {
            ts.push((la + (lb - la) * i as f64 / (n - 1) as f64).exp());
        }
    } else {
        for i in 0..n {
            ts.push(t_start + (t_end - t_start) * i as f64 / (n - 1) as f64);
        }
    }
    ts[0] = t_start;
    ts[n - 1] = t_end;
    Ok(ts)
}

#[allow(clippy::too_many_arguments)]
fn cmd_curves(
    out_dir: &Path,
    argv: Vec<String>,
    file: &FileConfig,
    flags: &Overlay,
    t_start: Option<f64>,
    t_end: Option<f64>,
    points: usize,
    log_spacing: bool,
) -> Result<()> {
    let (params, _) = config::resolve(file, flags)?;
    let t_start = t_start.unwrap_or(params.t0);
    let t_end = t_end.unwrap_or(1000.0 * params.t0);
    let ts = sample_times(t_start, t_end, points, log_spacing)?;
    let c = params.constant_c()?;
    let mut samples = Vec::with_capacity(ts.len());
    for &t in &ts {
        let value = model::value_curve(t, params.m, c)?;
        let cost = model::cost_curve(t, params.m, params.alpha)?;
        samples.push(CurveSample {
            t,
            value,
            cost,
            net: value - cost,
        });
    }
    let mut emitter = Emitter::new(out_dir, "curves", argv, Some(&params), None)?;
    emitter.emit("curves.csv", io::render_curves_csv(&samples).as_bytes())?;
    emitter.finish()?;
    println!(
        "curves: {} samples on [{t_start}, {t_end}], c = {c}",
        samples.len()
    );
    Ok(())
}

fn cmd_classify(file: &FileConfig, flags: &Overlay, tol: f64) -> Result<()> {
    let (params, _) = config::resolve(file, flags)?;
    let classification = model::classify_scenario(&params, tol)?;
    println!("{classification}");
    Ok(())
}

fn cmd_simulate(
    out_dir: &Path,
    argv: Vec<String>,
    file: &FileConfig,
    flags: &Overlay,
    binary_threshold: u64,
) -> Result<()> {
    let (params, ensemble) = config::resolve(file, flags)?;
    let series = run_simulation(&params, &ensemble)?;
    let mut emitter = Emitter::new(out_dir, "simulate", argv, Some(&params), Some(&ensemble))?;
    emitter.emit(
        "config_resolved.toml",
        config::render_config(&params, &ensemble).as_bytes(),
    )?;
    let mut files = 1usize;
    for s in &series {
        let cells = s.times.len() as u64 * s.n_nodes() as u64;
        let stem = format!("run_{:04}", s.run_index);
        if cells > binary_threshold {
            emitter.emit(&format!("{stem}.bin"), &io::render_series_binary(s)?)?;
            emitter.emit(
                &format!("{stem}_sample.csv"),
                io::render_series_sample_csv(s, 1000).as_bytes(),
            )?;
            files += 2;
        } else {
            emitter.emit(&format!("{stem}.csv"), io::render_series_csv(s).as_bytes())?;
            files += 1;
        }
        println!(
            "run {}: {} recorded rows, final mean activity {}",
            s.run_index,
            s.times.len(),
            s.mean_activity.last().copied().unwrap_or(f64::NAN)
        );
    }
    let manifest = emitter.finish()?;
    println!(
        "simulate: wrote {files} data file(s) and {} to {}",
        crate::manifest::MANIFEST_NAME,
        manifest.parent().unwrap_or(out_dir).display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    out_dir: &Path,
    argv: Vec<String>,
    file: &FileConfig,
    flags: &Overlay,
    k0_range: (f64, f64),
    k0_points: usize,
    m_range: (u32, u32),
    levels: &str,
) -> Result<()> {
    let t0 = flags.t0.or(file.t0).unwrap_or(config::DEFAULT_T0);
    let levels = parse_levels(levels)?;
    let grid = sweeps::sweep_crossover(k0_range, k0_points, m_range, t0)?;
    let contours = sweeps::extract_contours(&grid, &levels)?;
    let mut emitter = Emitter::new(out_dir, "sweep", argv, None, None)?;
    emitter.emit("tstar_grid.csv", io::render_phase_grid_csv(&grid).as_bytes())?;
    emitter.emit(
        "tstar_grid.json",
        io::render_phase_grid_json(&grid)?.as_bytes(),
    )?;
    emitter.emit(
        "tstar_contours.csv",
        io::render_contours_csv(&contours, &grid.x_label, &grid.y_label).as_bytes(),
    )?;
    emitter.finish()?;
    println!(
        "sweep: {}x{} grid, {} contour vertices across {} level(s)",
        grid.x.len(),
        grid.y.len(),
        contours.len(),
        levels.len()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_phase(
    out_dir: &Path,
    argv: Vec<String>,
    quantity: QuantityArg,
    coords: CoordsArg,
    x_min: Option<f64>,
    x_max: Option<f64>,
    x_points: usize,
    y_min: Option<f64>,
    y_max: Option<f64>,
    y_points: usize,
    tol: f64,
) -> Result<()> {
    let x_range = (x_min.unwrap_or(0.0), x_max.unwrap_or(10.0));
    let y_default = match (quantity, coords) {
        (QuantityArg::Tchar, CoordsArg::PerK0) => (0.01, 1.0),
        _ => (0.0, 100.0),
    };
    let y_range = (y_min.unwrap_or(y_default.0), y_max.unwrap_or(y_default.1));
    match quantity {
        QuantityArg::Tchar => {
            let grid =
                sweeps::sweep_characteristic(coords.system(), x_range, x_points, y_range, y_points)?;
            let mut emitter = Emitter::new(out_dir, "phase", argv, None, None)?;
            let stem = format!("tchar_{}_grid", coords.slug());
            emitter.emit(
                &format!("{stem}.csv"),
                io::render_phase_grid_csv(&grid).as_bytes(),
            )?;
            emitter.emit(
                &format!("{stem}.json"),
                io::render_phase_grid_json(&grid)?.as_bytes(),
            )?;
            emitter.finish()?;
            let defined = grid.values.iter().flatten().count();
            println!(
                "phase: ln t_char on {} over {}x{} cells, {defined} finite",
                coords.slug().replace('_', "-"),
                grid.x.len(),
                grid.y.len()
            );
        }
        QuantityArg::Scenario => {
            if coords == CoordsArg::PerK0 {
                return Err(Error::Config(
                    "scenario maps are defined on the alpha/m, k0/m plane; use --coords per-m"
                        .to_string(),
                ));
            }
            let grid = sweeps::scenario_map(x_range, x_points, y_range, y_points, tol)?;
            let mut emitter = Emitter::new(out_dir, "phase", argv, None, None)?;
            emitter.emit(
                "scenario_grid.csv",
                io::render_scenario_grid_csv(&grid).as_bytes(),
            )?;
            emitter.emit(
                "scenario_grid.json",
                io::render_scenario_grid_json(&grid)?.as_bytes(),
            )?;
            emitter.finish()?;
            println!(
                "phase: scenarios over {}x{} cells",
                grid.x.len(),
                grid.y.len()
            );
        }
    }
    Ok(())
}

fn parse_levels(raw: &str) -> Result<Vec<f64>> {
    let mut levels = Vec::new();
    for part in raw.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        levels.push(part.parse::<f64>().map_err(|_| {
            Error::Config(format!("levels: cannot parse {part:?} as a number"))
        })?);
    }
    if levels.is_empty() {
        return Err(Error::Config("levels: list is empty".to_string()));
    }
    Ok(levels)
}
