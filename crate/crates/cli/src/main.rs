mod config;
mod output;

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use log::{debug, info};
use num_complex::Complex64;
use serde_json::json;
use vortex_resolution::equilibria::{self, Family};
use vortex_resolution::integrate::IntegratorConfig;
use vortex_resolution::poincare::{crawl_experiment, rotation_number, section_map};
use vortex_resolution::reduced_dynamics::{self, energy_grid, Bounds};
use vortex_resolution::resolution::{self, UState};
use vortex_resolution::slice::{from_slice, SliceState};
use vortex_resolution::vortex_core::{self, FullState, Trajectory};

use config::RunConfig;
use output::{sink, write_metadata};

#[derive(Parser)]
#[command(
    name = "vortex",
    version,
    about = "Point-vortex relative equilibria and their reduced dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configuration and write every accepted step.
    Simulate(RunArgs),
    /// Integrate, then project each step to shape coordinates.
    Reduce(RunArgs),
    /// Lift a reduced trajectory back to the plane.
    Reconstruct {
        #[arg(long)]
        config: PathBuf,
        /// CSV written by `reduce`.
        #[arg(long)]
        reduced: PathBuf,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Write a relative equilibrium as JSON.
    Req(ReqArgs),
    /// Write a relative equilibrium with its linearized spectrum.
    Linearize(ReqArgs),
    /// Iterate the return map near O.
    Poincare {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        u: f64,
        #[arg(long)]
        iters: usize,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        gamma: f64,
        /// Offset from the fixed point along q; defaults to 2.5e-3 alpha.
        #[arg(long, allow_negative_numbers = true)]
        q: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        p: f64,
        #[arg(long, default_value_t = 1e-12)]
        rel_tol: f64,
        #[arg(long, default_value_t = 1e-14)]
        abs_tol: f64,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Sample the reduced energy on the shape plane.
    Levels {
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, default_value_t = 301)]
        grid: usize,
        #[arg(long, default_value_t = 1.5)]
        extent: f64,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Measure the drift of a translation-perturbed O.
    Crawl {
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 3.0 * PI, allow_negative_numbers = true)]
        gamma: f64,
        /// Defaults to twenty rotation periods.
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    t_end: f64,
    #[arg(long, default_value = "-")]
    out: PathBuf,
}

#[derive(Args)]
struct ReqArgs {
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    gamma: f64,
    #[arg(long, default_value = "-")]
    out: PathBuf,
}

struct Failure {
    code: u8,
    err: anyhow::Error,
}

trait Classify<T> {
    fn usage(self) -> Result<T, Failure>;
    fn runtime(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn usage(self) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            code: 1,
            err: e.into(),
        })
    }

    fn runtime(self) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            code: 2,
            err: e.into(),
        })
    }
}

type Outcome = Result<(), Failure>;

fn init_logging() -> anyhow::Result<()> {
    let level = std::env::var("VORTEX_LOG").unwrap_or_else(|_| "error".into());
    if !matches!(level.as_str(), "error" | "info" | "debug") {
        return Err(anyhow!(
            "VORTEX_LOG must be error, info or debug, not {level:?}"
        ));
    }
    env_logger::Builder::new()
        .parse_filters(&level)
        .format_timestamp(None)
        .init();
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(e) = init_logging() {
        eprintln!("vortex: {e}");
        return ExitCode::from(1);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("vortex: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Simulate(a) => simulate(&a),
        Command::Reduce(a) => reduce(&a),
        Command::Reconstruct {
            config,
            reduced,
            out,
        } => reconstruct(&config, &reduced, &out),
        Command::Req(a) => req(&a, false),
        Command::Linearize(a) => req(&a, true),
        Command::Poincare {
            alpha,
            u,
            iters,
            gamma,
            q,
            p,
            rel_tol,
            abs_tol,
            out,
        } => {
            let cfg = IntegratorConfig::default()
                .with_rel_tol(rel_tol)
                .with_abs_tol(abs_tol);
            poincare(
                alpha,
                u,
                iters,
                gamma,
                (q.unwrap_or(2.5e-3 * alpha), p),
                cfg,
                &out,
            )
        }
        Command::Levels {
            mu,
            gamma,
            grid,
            extent,
            out,
        } => levels(mu, gamma, grid, extent, &out),
        Command::Crawl {
            alpha,
            eps,
            gamma,
            t_end,
            out,
        } => {
            let period = 2.0 * PI * 3.0 * PI * alpha * alpha / gamma.abs();
            crawl(alpha, eps, gamma, t_end.unwrap_or(20.0 * period), &out)
        }
    }
}

fn finish(mut w: Box<dyn Write>, out: &Path) -> Outcome {
    w.flush()
        .with_context(|| format!("writing {}", out.display()))
        .runtime()
}

fn write_rows(w: &mut dyn Write, header: &[String], rows: &[Vec<f64>]) -> anyhow::Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(header)?;
    for row in rows {
        csv.write_record(row.iter().map(|x| x.to_string()))?;
    }
    csv.flush()?;
    Ok(())
}

fn diagnostics(traj: &Trajectory<impl Sized>, k: usize) -> [f64; 4] {
    let m = traj.momentum[k];
    [traj.energy[k], m.mu, m.nu.re, m.nu.im]
}

fn ambient_csv(traj: &Trajectory<FullState>, n_v: usize) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut header = vec!["t".to_string()];
    for k in 0..n_v {
        header.push(format!("x{k}"));
        header.push(format!("y{k}"));
    }
    header.extend(["H", "mu", "nu_re", "nu_im"].map(String::from));
    let rows = traj
        .states
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let mut row = vec![traj.times[k]];
            row.extend(s.z.iter().flat_map(|z| [z.re, z.im]));
            row.extend(diagnostics(traj, k));
            row
        })
        .collect();
    (header, rows)
}

fn run_params(cfg: &RunConfig, command: &str, t_end: f64) -> serde_json::Value {
    json!({ "command": command, "config": cfg, "t_end": t_end })
}

fn simulate_config(a: &RunArgs) -> Result<(RunConfig, Trajectory<FullState>), Failure> {
    let cfg = RunConfig::load(&a.config).usage()?;
    if !a.t_end.is_finite() {
        return Err(anyhow!("t_end must be finite")).usage();
    }
    info!("integrating {} vortices to t = {}", cfg.n_sat + 1, a.t_end);
    let traj = vortex_core::simulate(&cfg.state(), &cfg.strengths(), a.t_end, &cfg.integrator)
        .context("integration failed")
        .runtime()?;
    info!("{} accepted steps", traj.len());
    Ok((cfg, traj))
}

fn simulate(a: &RunArgs) -> Outcome {
    let (cfg, traj) = simulate_config(a)?;
    let (header, rows) = ambient_csv(&traj, cfg.n_sat + 1);
    let mut w = sink(&a.out).runtime()?;
    write_metadata(&mut w, &run_params(&cfg, "simulate", a.t_end), None).runtime()?;
    write_rows(&mut w, &header, &rows).runtime()?;
    finish(w, &a.out)
}

fn reduce(a: &RunArgs) -> Outcome {
    let (cfg, traj) = simulate_config(a)?;
    let reduced = reduced_dynamics::reduce(&traj, &cfg.strengths())
        .context("projection failed")
        .runtime()?;
    let mut header = vec!["t".to_string(), "u0".to_string()];
    for k in 1..=cfg.n_sat {
        header.push(format!("u{k}_re"));
        header.push(format!("u{k}_im"));
    }
    header.extend(["H", "mu", "nu_re", "nu_im"].map(String::from));
    let rows: Vec<Vec<f64>> = reduced
        .states
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let mut row = vec![reduced.times[k], s.u0];
            row.extend(s.u.iter().flat_map(|z| [z.re, z.im]));
            row.extend(diagnostics(&reduced, k));
            row
        })
        .collect();
    let mut w = sink(&a.out).runtime()?;
    write_metadata(&mut w, &run_params(&cfg, "reduce", a.t_end), None).runtime()?;
    write_rows(&mut w, &header, &rows).runtime()?;
    finish(w, &a.out)
}

fn read_reduced(path: &Path, n_sat: usize) -> anyhow::Result<Trajectory<UState>> {
    let mut rd = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let width = 2 * n_sat + 6;
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        energy: Vec::new(),
        momentum: Vec::new(),
    };
    for (line, rec) in rd.records().enumerate() {
        let rec = rec?;
        if rec.len() != width {
            return Err(anyhow!(
                "row {}: {} fields, expected {width} for {n_sat} satellites",
                line + 1,
                rec.len()
            ));
        }
        let x = rec
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .with_context(|| format!("row {}", line + 1))?;
        let u = (0..n_sat)
            .map(|k| Complex64::new(x[2 + 2 * k], x[3 + 2 * k]))
            .collect();
        traj.times.push(x[0]);
        traj.states.push(UState { u0: x[1], u });
        let d = &x[2 + 2 * n_sat..];
        traj.energy.push(d[0]);
        traj.momentum.push(vortex_resolution::se2::Se2Momentum::new(
            d[1],
            Complex64::new(d[2], d[3]),
        ));
    }
    if traj.is_empty() {
        return Err(anyhow!("{} holds no rows", path.display()));
    }
    Ok(traj)
}

fn reconstruct(config: &Path, reduced: &Path, out: &Path) -> Outcome {
    let cfg = RunConfig::load(config).usage()?;
    let c = read_reduced(reduced, cfg.n_sat).usage()?;
    let g = cfg.strengths();
    let g0 = resolution::gauge_of(&cfg.state(), &g)
        .context("initial gauge")
        .runtime()?;
    debug!("initial gauge {g0:?}");
    let lifted = resolution::reconstruct(&c, &g, &g0, &cfg.integrator)
        .context("reconstruction failed")
        .runtime()?;
    let (header, rows) = ambient_csv(&lifted, cfg.n_sat + 1);
    let params = json!({
        "command": "reconstruct",
        "config": cfg,
        "reduced": reduced.display().to_string(),
    });
    let mut w = sink(out).runtime()?;
    write_metadata(&mut w, &params, None).runtime()?;
    write_rows(&mut w, &header, &rows).runtime()?;
    finish(w, out)
}

fn req(a: &ReqArgs, with_spectrum: bool) -> Outcome {
    let family: Family = a.family.parse().usage()?;
    let spec = equilibria::make(family, a.alpha, a.gamma)
        .context("constructing the equilibrium")
        .runtime()?;
    info!("{family:?} with u_e = {}", spec.u_e);
    let doc = if with_spectrum {
        let lin = equilibria::linearize(&spec.z, &spec.strengths(), spec.generator())
            .context("linearizing")
            .runtime()?;
        json!({ "spec": spec, "eigenvalues": lin.eigenvalues })
    } else {
        serde_json::to_value(&spec).runtime()?
    };
    let mut w = sink(&a.out).runtime()?;
    serde_json::to_writer_pretty(&mut w, &doc).runtime()?;
    writeln!(w).runtime()?;
    finish(w, &a.out)
}

fn poincare(
    alpha: f64,
    u: f64,
    iters: usize,
    gamma: f64,
    offset: (f64, f64),
    cfg: IntegratorConfig,
    out: &Path,
) -> Outcome {
    let params = json!({
        "command": "poincare",
        "alpha": alpha,
        "u": u,
        "iters": iters,
        "gamma": gamma,
        "q": offset.0,
        "p": offset.1,
        "integrator": cfg,
    });
    let v0 = from_slice(&SliceState::new(0.0, 0.0, offset.0, offset.1), alpha, u)
        .context("initial offset")
        .runtime()?;
    let sd = section_map(&v0, alpha, gamma, iters, &cfg)
        .context("section map")
        .runtime()?;
    let mut derived = json!({ "center": [sd.center.0, sd.center.1] });
    match rotation_number(&sd) {
        Ok(rho) => {
            info!("rotation number {rho}");
            derived["rotation_number"] = json!(rho);
        }
        Err(e) => debug!("no rotation number: {e}"),
    }
    let mut w = sink(out).runtime()?;
    write_metadata(&mut w, &params, Some(&derived)).runtime()?;
    sd.write_csv(&mut w).runtime()?;
    finish(w, out)
}

fn levels(mu: f64, gamma: f64, grid: usize, extent: f64, out: &Path) -> Outcome {
    let params = json!({
        "command": "levels",
        "mu": mu,
        "gamma": gamma,
        "grid": grid,
        "extent": extent,
    });
    if !(extent > 0.0) {
        return Err(anyhow!("extent must be positive")).usage();
    }
    let g = vortex_core::Strengths::ring(gamma, 3).runtime()?;
    let bounds = Bounds {
        re_min: -extent,
        re_max: extent,
        im_min: -extent,
        im_max: extent,
    };
    let eg = energy_grid(mu, bounds, grid, &g)
        .context("energy grid")
        .runtime()?;
    let derived = json!({
        "collision_loci": eg.collision_loci().len(),
        "critical_points": eg.critical_points(),
    });
    let mut w = sink(out).runtime()?;
    write_metadata(&mut w, &params, Some(&derived)).runtime()?;
    eg.write_csv(&mut w).runtime()?;
    finish(w, out)
}

fn crawl(alpha: f64, eps: f64, gamma: f64, t_end: f64, out: &Path) -> Outcome {
    let params = json!({
        "command": "crawl",
        "alpha": alpha,
        "eps": eps,
        "gamma": gamma,
        "t_end": t_end,
    });
    let r = crawl_experiment(alpha, gamma, eps, t_end, &IntegratorConfig::default())
        .context("crawl experiment")
        .runtime()?;
    let rel = (r.drift - r.predicted).norm() / r.predicted.norm();
    info!("relative drift error {rel}");
    let header = [
        "measured_re",
        "measured_im",
        "predicted_re",
        "predicted_im",
        "relative_error",
    ]
    .map(String::from);
    let row = vec![r.drift.re, r.drift.im, r.predicted.re, r.predicted.im, rel];
    let mut w = sink(out).runtime()?;
    write_metadata(&mut w, &params, None).runtime()?;
    write_rows(&mut w, &header, &[row]).runtime()?;
    finish(w, out)
}
