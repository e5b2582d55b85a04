//! Command-line front end. Every file written starts with a `#` header
//! holding the toolkit version and the fully resolved configuration.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{linspace, ScenarioConfig};
use crate::diagnostics::{mass_balance_residual, speed_estimate, time_decay_rate};
use crate::dispersion::{analyze, classify_regime, write_k_csv, RegimeKind, RegimeVerdict};
use crate::eigen::{sweep, write_sweep_csv};
use crate::error::{Error, Result};
use crate::front::{minimal_speed_front, solve_front, write_front_csv};
use crate::ivp::{
    make_initial_profile, run, write_diagnostics_csv, write_snapshot_csv, CylinderGrid, RunOptions, Simulator,
};
use crate::output::{num, write_header};

pub const THREADS_ENV: &str = "SHEARFRONT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "shearfront", version, about = "KPP fronts with heat loss in a shear-flow cylinder")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep μ(λ), μ'(λ) and ν(λ) over the [eigen] λ-range.
    Eigen {
        #[arg(long)]
        config: PathBuf,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Tabulate k(λ) and report c*, λ* and the sup condition.
    Dispersion {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Classify an initial decay rate as extinction, blow-off or propagation.
    Classify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        decay: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Integrate the Cauchy problem and record front diagnostics.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// Construct a traveling front on [−a, a] × ω.
    Front {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long)]
        speed: Option<f64>,
        #[arg(long)]
        half_length: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Approximate the minimal-speed front.
        #[arg(long)]
        minimal: bool,
    },
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

/// One-line record for a classification, e.g. `Propagation speed=2.0`.
pub fn verdict_record(v: &RegimeVerdict) -> String {
    match &v.kind {
        RegimeKind::Extinction { rate, blow_off } => match blow_off {
            Some(b) => format!(
                "Extinction rate={:?} blow_off_eta={:?} blow_off_margin={:?} blow_off_drift={:?}",
                rate, b.eta, b.margin, b.drift
            ),
            None => format!("Extinction rate={rate:?}"),
        },
        RegimeKind::BlowOff(b) => format!("BlowOff eta={:?} margin={:?} drift={:?}", b.eta, b.margin, b.drift),
        RegimeKind::Propagation { speed } => format!("Propagation speed={speed:?}"),
        RegimeKind::OpenConjectured { c_star } => format!("OpenConjectured c_star={c_star:?}"),
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn execute(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Eigen { config, output } => {
            let cfg = ScenarioConfig::load(&config)?;
            let model = cfg.model()?;
            let lambdas = linspace(cfg.eigen.lambda_min, cfg.eigen.lambda_max, cfg.eigen.samples);
            let rows = sweep(&model, &lambdas)?;
            let mut out = open_output(&output)?;
            write_header(&mut out, "eigen", &cfg.resolved())?;
            write_sweep_csv(&mut out, &rows)?;
            out.flush()?;
        }
        Command::Dispersion { config, output } => {
            let cfg = ScenarioConfig::load(&config)?;
            let model = cfg.model()?;
            let d = &cfg.dispersion;
            let analysis = analyze(&model, &linspace(d.lambda_min, d.lambda_max, d.samples))?;
            let mut out = open_output(&output)?;
            write_header(&mut out, "dispersion", &cfg.resolved())?;
            write_k_csv(&mut out, &analysis.k_samples)?;
            writeln!(
                out,
                "# summary: mu0={} c_star={} lambda_star={} sup_mu_minus_square={} sup_condition_holds={}",
                num(analysis.mu0),
                crate::output::opt_num(analysis.c_star),
                crate::output::opt_num(analysis.lambda_star),
                num(analysis.sup_value),
                analysis.sup_condition_holds
            )?;
            out.flush()?;
        }
        Command::Classify { config, decay, output } => {
            let mut cfg = ScenarioConfig::load(&config)?;
            if decay.is_some() {
                cfg.classify.decay = decay;
            }
            let lambda = cfg
                .classify
                .decay
                .ok_or_else(|| Error::Config("no decay rate: pass --decay or set [classify] decay".into()))?;
            let model = cfg.model()?;
            let verdict = classify_regime(&model, lambda)?;
            let record = verdict_record(&verdict);
            if output.is_some() {
                let mut out = open_output(&output)?;
                write_header(&mut out, "classify", &cfg.resolved())?;
                writeln!(out, "{record}")?;
                out.flush()?;
            }
            println!("{record}");
        }
        Command::Simulate { config, out_dir, t_end } => {
            let mut cfg = ScenarioConfig::load(&config)?;
            if let Some(t) = t_end {
                cfg.simulate.t_end = t;
            }
            simulate(&cfg, &out_dir)?;
        }
        Command::Front {
            config,
            out_dir,
            speed,
            half_length,
            tol,
            max_iter,
            minimal,
        } => {
            let mut cfg = ScenarioConfig::load(&config)?;
            let f = &mut cfg.front;
            if speed.is_some() {
                f.speed = speed;
            }
            if let Some(a) = half_length {
                f.half_length = a;
            }
            if let Some(t) = tol {
                f.tol = t;
            }
            if let Some(m) = max_iter {
                f.max_iter = m;
            }
            f.minimal |= minimal;
            front(&cfg, &out_dir)?;
        }
    }
    Ok(())
}

fn simulate(cfg: &ScenarioConfig, out_dir: &Path) -> Result<()> {
    let s = &cfg.simulate;
    let model = cfg.model()?;
    let grid = CylinderGrid::new(s.x_min, s.x_max, s.n_x)?;
    let sim = Simulator::for_horizon(&model, &grid, s.t_end, s.dt_max)?;
    let state = make_initial_profile(&grid, &model, &s.initial)?;
    let mut opts = RunOptions::new(s.t_end, s.cadence);
    opts.guard_margin = s.guard_margin;
    opts.decay_window = (s.decay_window[0], s.decay_window[1]);
    let resolved = cfg.resolved();

    let mut snap = create(out_dir, "snapshots.csv")?;
    write_header(&mut snap, "simulate", &resolved)?;
    writeln!(snap, "t,x,y,T,Y")?;
    let outcome = run(&sim, state, &opts, |st, _| {
        write_snapshot_csv(&mut snap, &model, &grid, st, s.snapshot_stride_x, s.snapshot_stride_y, false)?;
        Ok(())
    })?;
    snap.flush()?;

    let mut diag = create(out_dir, "diagnostics.csv")?;
    write_header(&mut diag, "simulate", &resolved)?;
    write_diagnostics_csv(&mut diag, &outcome.rows)?;
    diag.flush()?;

    let track: Vec<(f64, f64)> = outcome
        .rows
        .iter()
        .filter_map(|r| r.front_pos_t.map(|x| (r.t, x)))
        .collect();
    let speed = speed_estimate(&track, s.fit_window).ok();
    let sup: Vec<(f64, f64)> = outcome.rows.iter().map(|r| (r.t, r.sup_t)).collect();
    let t_last = outcome.rows.last().map(|r| r.t).unwrap_or(0.0);
    let gamma = time_decay_rate(&sup[sup.len() / 2..], 0.0, f64::INFINITY).ok();
    let mut line = format!(
        "Simulation t={:?} steps={} dt={:?} speed={} r2={} sup_T_rate={}",
        t_last,
        outcome.steps,
        sim.dt(),
        speed.as_ref().map_or("nan".into(), |t| format!("{:?}", t.speed)),
        speed.as_ref().map_or("nan".into(), |t| format!("{:?}", t.r2)),
        gamma.map_or("nan".into(), |g| format!("{g:?}")),
    );
    if let Some(e) = &outcome.boundary_touched {
        line.push_str(&format!(" partial={}", e.code()));
    }
    println!("{line}");
    Ok(())
}

fn front(cfg: &ScenarioConfig, out_dir: &Path) -> Result<()> {
    let model = cfg.model()?;
    let f = &cfg.front;
    let opts = f.options();
    let solution = if f.minimal {
        minimal_speed_front(&model, &opts)?
    } else {
        let c = f
            .speed
            .ok_or_else(|| Error::Config("no speed: pass --speed or set [front] speed".into()))?;
        solve_front(&model, c, &opts)?
    };
    let mut out = create(out_dir, "front.csv")?;
    write_header(&mut out, "front", &cfg.resolved())?;
    write_front_csv(&mut out, &model, &solution, f.output_stride_x)?;
    out.flush()?;

    let decay = solution
        .right_decay_rate(&model, (f.decay_window[0], f.decay_window[1]))
        .ok();
    let balance = mass_balance_residual(&model, &solution).ok();
    let fmt = |v: Option<f64>| v.map_or("nan".to_string(), |x| format!("{x:?}"));
    println!(
        "Front c={:?} lambda_c={:?} y_inf={:?} residual={:?} iterations={} converged={} decay_right={} mass_balance={}",
        solution.c,
        solution.bounds.lambda_c,
        solution.y_inf,
        solution.residual,
        solution.iterations,
        solution.converged,
        fmt(decay),
        fmt(balance)
    );
    if !solution.converged {
        return Err(Error::NoConvergence {
            c: solution.c,
            iterations: solution.iterations,
            change: solution.change,
        });
    }
    Ok(())
}

/// Runs the command line and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}: {}", e.code(), e);
            match e {
                Error::ConfigNotFound(_) | Error::Config(_) => 2,
                _ => 1,
            }
        }
    }
}
