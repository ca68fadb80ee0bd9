//! The `ksnet` command line.
//!
//! Exit codes: 0 ok, 1 other failure, 2 parse error, 3 disconnected graph,
//! 4 value out of range, 5 non-finite state, 6 two distinct synchronous
//! states found inside one certified cell.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::certificate::{bounds_curve, certify, linspace, scan_slice, GraphConstants, SliceSpec};
use crate::dynamics::{integrate_rk4, ModelParams, Trajectory};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::io::{self as kio, parse_int_list, parse_vector_spec};
use crate::reduction::PolytopeChart;
use crate::seminorm::{consensus_seminorm, ConsensusProjector};
use crate::sync::{uniqueness_check, NewtonOptions};
use crate::torus::{PhaseState, WindingVector};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DISCONNECTED: i32 = 3;
pub const EXIT_RANGE: i32 = 4;
pub const EXIT_NON_FINITE: i32 = 5;
pub const EXIT_UNIQUENESS_ALARM: i32 = 6;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::InvalidGraph(_) => EXIT_PARSE,
        Error::NotConnected { .. } => EXIT_DISCONNECTED,
        Error::InvalidRange(_)
        | Error::InvalidGamma(_)
        | Error::InvalidDimension(_)
        | Error::DimensionMismatch { .. }
        | Error::NotCohesive { .. } => EXIT_RANGE,
        Error::NonFiniteState { .. } => EXIT_NON_FINITE,
        _ => EXIT_OTHER,
    }
}

#[derive(Parser, Debug)]
#[command(name = "ksnet", version, about = "Semicontraction analysis of Kuramoto-Sakaguchi networks")]
pub struct Cli {
    /// Read every angle flag in degrees instead of radians.
    #[arg(long, global = true)]
    pub degrees: bool,
    /// Worker threads for scans and multistart searches (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Size, algebraic connectivity, max weighted degree and cycle count as JSON.
    GraphInfo {
        graph: PathBuf,
    },
    /// Cohesiveness threshold, bounds, rate and verdict as JSON.
    Certify {
        graph: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        phi: f64,
        /// Defaults to 0.9 of the threshold.
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
    },
    /// Log-seminorm of the Jacobian over a planar slice, as CSV.
    Scan(ScanArgs),
    /// Threshold curves over a frustration grid, as CSV.
    Bounds {
        /// Comma list of lambda2 / d_max ratios.
        #[arg(long, default_value = "0.25,0.5,1,2,4")]
        ratios: String,
        #[arg(long, default_value_t = 0.01)]
        phi_min: f64,
        #[arg(long, default_value_t = FRAC_PI_2)]
        phi_max: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Integrates the network and writes the trajectory as CSV.
    Simulate(SimulateArgs),
    /// Multistart search for synchronous states in one winding cell, as JSON.
    Sync(SyncArgs),
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    pub graph: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long, default_value = "zero", allow_hyphen_values = true)]
    pub omega: String,
    #[arg(long, default_value = "zero", allow_hyphen_values = true)]
    pub origin: String,
    /// Two directions separated by `;`, e.g. `e0;e1`.
    #[arg(long, default_value = "e0;e1", allow_hyphen_values = true)]
    pub dirs: String,
    /// `lo,hi` for both axes, or `lo,hi;lo,hi`. Defaults to `[-pi, pi]`.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub res: usize,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    pub graph: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long, default_value = "zero", allow_hyphen_values = true)]
    pub omega: String,
    #[arg(long, default_value = "zero", allow_hyphen_values = true)]
    pub x0: String,
    /// Second initial state; adds a `dist` column with the consensus
    /// seminorm of the difference of the two trajectories.
    #[arg(long, allow_hyphen_values = true)]
    pub pair: Option<String>,
    /// Step size (default `1e-3 / d_max`).
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub t: f64,
    /// Write only every k-th step.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
    /// Append winding-vector columns.
    #[arg(long)]
    pub track_winding: bool,
}

#[derive(Args, Debug)]
pub struct SyncArgs {
    pub graph: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long, default_value = "zero", allow_hyphen_values = true)]
    pub omega: String,
    /// Winding vector, comma separated; all zeros by default.
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<String>,
    /// Defaults to 0.9 of the threshold.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub starts: usize,
}

#[derive(Serialize)]
struct GraphInfo {
    n: usize,
    m: usize,
    lambda2: f64,
    d_max: f64,
    cycle_count: usize,
}

struct Ctx {
    degrees: bool,
    seed: u64,
    out: Option<PathBuf>,
    invocation: String,
}

impl Ctx {
    fn angle(&self, v: f64) -> f64 {
        if self.degrees {
            v.to_radians()
        } else {
            v
        }
    }

    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn write_json<T: Serialize>(&self, value: &T) -> Result<()> {
        let mut w = self.sink()?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Io(e.into()))?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Errors go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let mut words: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    if let Some(prog) = words.first_mut() {
        *prog = prog.rsplit('/').next().unwrap_or_default().to_string();
    }
    let invocation = words.join(" ");
    let ctx = Ctx { degrees: cli.degrees, seed: cli.seed, out: cli.out.clone(), invocation };
    let result = match cli.jobs {
        Some(jobs) => match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(|| dispatch(&ctx, &cli.command)),
            Err(e) => Err(Error::InvalidRange(format!("--jobs: {e}"))),
        },
        None => dispatch(&ctx, &cli.command),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("ksnet: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(ctx: &Ctx, cmd: &Command) -> Result<i32> {
    match cmd {
        Command::GraphInfo { graph } => graph_info(ctx, &kio::read_graph(graph)?),
        Command::Certify { graph, phi, gamma } => {
            let g = kio::read_graph(graph)?;
            ctx.write_json(&certify(&g, ctx.angle(*phi), gamma.map(|v| ctx.angle(v)))?)?;
            Ok(EXIT_OK)
        }
        Command::Scan(a) => scan(ctx, a),
        Command::Bounds { ratios, phi_min, phi_max, steps } => {
            let ratios: Vec<f64> = kio::parse_real_list(ratios)?;
            let grid = linspace(ctx.angle(*phi_min), ctx.angle(*phi_max), *steps);
            let rows = bounds_curve(&ratios, &grid)?;
            let mut w = kio::write_bounds(ctx.sink()?, &ctx.invocation, &rows)?;
            w.flush()?;
            Ok(EXIT_OK)
        }
        Command::Simulate(a) => simulate(ctx, a),
        Command::Sync(a) => sync(ctx, a),
    }
}

fn graph_info(ctx: &Ctx, g: &WeightedGraph) -> Result<i32> {
    let k = GraphConstants::of(g)?;
    ctx.write_json(&GraphInfo { n: g.n(), m: g.m(), lambda2: k.lambda2, d_max: k.d_max, cycle_count: g.cycle_rank() })?;
    Ok(EXIT_OK)
}

fn model(g: WeightedGraph, phi: f64, omega: &str) -> Result<ModelParams> {
    let omega = parse_vector_spec(omega, g.n())?;
    ModelParams::new(g, phi, omega)
}

fn parse_range(spec: &str, degrees: bool) -> Result<((f64, f64), (f64, f64))> {
    let conv = |v: f64| if degrees { v.to_radians() } else { v };
    let pair = |s: &str| -> Result<(f64, f64)> {
        match kio::parse_real_list(s)?.as_slice() {
            [lo, hi] => Ok((conv(*lo), conv(*hi))),
            other => Err(Error::Parse(format!("range needs two numbers, found {}", other.len()))),
        }
    };
    match spec.split_once(';') {
        Some((a, b)) => Ok((pair(a)?, pair(b)?)),
        None => {
            let r = pair(spec)?;
            Ok((r, r))
        }
    }
}

fn scan(ctx: &Ctx, a: &ScanArgs) -> Result<i32> {
    let g = kio::read_graph(&a.graph)?;
    let n = g.n();
    let basis = g.cycle_basis();
    let p = model(g, ctx.angle(a.phi), &a.omega)?;
    let (d1, d2) = a
        .dirs
        .split_once(';')
        .ok_or_else(|| Error::Parse(format!("--dirs needs two directions separated by ';', got {:?}", a.dirs)))?;
    let (s_range, t_range) = match &a.range {
        Some(r) => parse_range(r, ctx.degrees)?,
        None => ((-PI, PI), (-PI, PI)),
    };
    let spec = SliceSpec {
        origin: PhaseState::new(parse_vector_spec(&a.origin, n)?),
        dir1: parse_vector_spec(d1, n)?,
        dir2: parse_vector_spec(d2, n)?,
        s_range,
        t_range,
        resolution: (a.res, a.res),
    };
    let grid = scan_slice(&p, &basis, spec)?;
    let mut w = kio::write_scan_grid(ctx.sink()?, &ctx.invocation, &grid)?;
    w.flush()?;
    Ok(EXIT_OK)
}

fn simulate(ctx: &Ctx, a: &SimulateArgs) -> Result<i32> {
    let g = kio::read_graph(&a.graph)?;
    let n = g.n();
    let basis = g.cycle_basis();
    let p = model(g, ctx.angle(a.phi), &a.omega)?;
    let dt = a.dt.unwrap_or_else(|| p.default_step());
    if a.every == 0 {
        return Err(Error::InvalidRange("--every must be positive".into()));
    }
    let x0 = PhaseState::new(parse_vector_spec(&a.x0, n)?);
    let traj = p.integrate(&x0, dt, a.t)?;
    let pair = match &a.pair {
        Some(spec) => {
            let y0 = PhaseState::new(parse_vector_spec(spec, n)?);
            Some(integrate_rk4(&y0, dt, a.t, |x| p.vector_field(x))?)
        }
        None => None,
    };
    let keep: Vec<usize> = (0..traj.len()).filter(|k| k % a.every == 0 || *k + 1 == traj.len()).collect();
    let thinned = Trajectory {
        times: keep.iter().map(|&k| traj.times[k]).collect(),
        states: keep.iter().map(|&k| traj.states[k].clone()).collect(),
        step: traj.step,
    };
    let mut extra = Vec::new();
    if let Some(other) = &pair {
        let proj = ConsensusProjector::new(n)?;
        let dist = keep
            .iter()
            .map(|&k| consensus_seminorm(&proj, &(&*traj.states[k] - &*other.states[k])))
            .collect::<Result<Vec<f64>>>()?;
        extra.push(("dist", dist));
    }
    let basis = a.track_winding.then_some(&basis);
    let mut w = kio::write_trajectory(ctx.sink()?, &ctx.invocation, &thinned, basis, &extra)?;
    w.flush()?;
    Ok(EXIT_OK)
}

fn sync(ctx: &Ctx, a: &SyncArgs) -> Result<i32> {
    let g = kio::read_graph(&a.graph)?;
    let chart = PolytopeChart::for_graph(&g)?;
    let c = chart.basis().len();
    let phi = ctx.angle(a.phi);
    let gamma = match a.gamma {
        Some(v) => ctx.angle(v),
        None => 0.9 * GraphConstants::of(&g)?.gamma_bar(phi)?,
    };
    let p = model(g, phi, &a.omega)?;
    let u = match &a.u {
        Some(s) => WindingVector(parse_int_list(s)?),
        None => WindingVector::zeros(c),
    };
    if u.len() != c {
        return Err(Error::Parse(format!("--u has {} entries, the cycle basis has {c}", u.len())));
    }
    let report = uniqueness_check(&p, &chart, &u, gamma, a.starts, ctx.seed, &NewtonOptions::default())?;
    ctx.write_json(&report)?;
    Ok(if report.unique { EXIT_OK } else { EXIT_UNIQUENESS_ALARM })
}
