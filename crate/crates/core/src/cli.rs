//! `frenet-rt` command line: plan, bench, serve, drive.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use thiserror::Error;

use crate::bench::{self, BenchError};
use crate::bridge::{self, BridgeError};
use crate::planner::{run_closed_loop, InitError, PlanError, PlannerContext, StepMode, Termination};
use crate::report::{self, Plane};
use crate::scenario::{Scenario, ScenarioError};

#[derive(Debug, Parser)]
#[command(name = "frenet-rt", version, about = "Sampling-based Frenet trajectory planner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plan one cycle, or a closed loop with --loop.
    Plan(PlanArgs),
    /// Timing suites: scaling over sample counts, load interference, per-run boxplots.
    Bench(BenchArgs),
    /// Run the planner behind a TCP endpoint for one driver session.
    Serve(ServeArgs),
    /// Play a scenario closed-loop against a running server.
    Drive(DriveArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StepArg {
    Logical,
    WallClock,
}

impl From<StepArg> for StepMode {
    fn from(s: StepArg) -> Self {
        match s {
            StepArg::Logical => StepMode::Logical,
            StepArg::WallClock => StepMode::WallClock,
        }
    }
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Run closed-loop until the goal, a planner failure or max_cycles.
    #[arg(long = "loop")]
    pub closed_loop: bool,
    /// Also write every candidate (CSV) and SVG plots in the (s,d) and (x,y) planes.
    #[arg(long)]
    pub all_candidates: bool,
    #[arg(long, value_enum, default_value = "logical")]
    pub step_mode: StepArg,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Comma-separated sample counts for the scaling suite.
    #[arg(long, value_delimiter = ',', default_value = "16,32,64,100")]
    pub counts: Vec<usize>,
    /// Recorded iterations per configuration.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub iters: u64,
    /// Independent runs of one configuration instead of the scaling suite.
    #[arg(long)]
    pub boxplot: bool,
    #[arg(long, default_value_t = 4)]
    pub runs: usize,
    /// Sample count for --boxplot and --load-threads.
    #[arg(long, default_value_t = 64)]
    pub count: usize,
    /// Compare against this many busy-spinning background threads.
    #[arg(long)]
    pub load_threads: Option<usize>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub endpoint: String,
    /// Planner settings are taken from this scenario; defaults otherwise.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DriveArgs {
    #[arg(long)]
    pub endpoint: String,
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, value_enum, default_value = "logical")]
    pub step_mode: StepArg,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Scenario(#[from] ScenarioError),
    #[error("PlannerInit: {0}")]
    Init(#[from] InitError),
    #[error("{}", plan_message(.0))]
    Plan(PlanError),
    #[error("{0}")]
    Bench(#[from] BenchError),
    #[error("{0}")]
    Bridge(#[from] BridgeError),
    #[error("LoopTerminated: {0}")]
    Loop(&'static str),
    #[error("IoError: {0}")]
    Io(#[from] std::io::Error),
    #[error("CsvError: {0}")]
    Csv(#[from] csv::Error),
}

fn plan_message(e: &PlanError) -> String {
    match e {
        PlanError::AllInfeasible { total, counts } => {
            format!("AllInfeasible: {total} candidates, {counts}")
        }
        PlanError::OutsideProjectionDomain(t) => format!("OutsideProjectionDomain: {t}"),
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Scenario(_) => 3,
            CliError::Init(_) => 4,
            CliError::Plan(PlanError::AllInfeasible { .. }) => 5,
            CliError::Plan(PlanError::OutsideProjectionDomain(_)) => 6,
            CliError::Loop("AllInfeasible") => 5,
            CliError::Loop(_) => 6,
            CliError::Bench(BenchError::Usage(_)) => 2,
            CliError::Bench(_) => 8,
            CliError::Bridge(_) => 7,
            CliError::Io(_) | CliError::Csv(_) => 9,
        }
    }

    /// The message on one line, as printed before exiting.
    pub fn one_line(&self) -> String {
        self.to_string().replace(['\n', '\r'], " ")
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Plan(a) => cmd_plan(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Serve(a) => cmd_serve(&a),
        Command::Drive(a) => cmd_drive(&a),
    }
}

fn termination_result(t: Termination) -> Result<(), CliError> {
    match t {
        Termination::GoalReached | Termination::MaxCycles => Ok(()),
        other => Err(CliError::Loop(other.label())),
    }
}

pub fn cmd_plan(a: &PlanArgs) -> Result<(), CliError> {
    let scenario = Scenario::load(&a.scenario)?;
    fs::create_dir_all(&a.out)?;
    let mut ctx = PlannerContext::init(&scenario.reference_path, scenario.settings())?;

    if a.closed_loop {
        let trace = run_closed_loop(
            &mut ctx,
            scenario.initial_state,
            &scenario.obstacles,
            &scenario.loop_options(a.step_mode.into()),
        );
        report::write_trace_csv(create(&a.out, "trace.csv")?, &trace.records)?;
        let mut w = csv::Writer::from_writer(create(&a.out, "trajectories.csv")?);
        w.write_record(["cycle", "t", "x", "y", "theta", "v", "a", "kappa", "s", "d"])?;
        for r in &trace.records {
            for p in &r.optimal {
                w.write_record(
                    [r.cycle as f64, p.t, p.x, p.y, p.theta, p.v, p.a, p.kappa, p.s, p.d]
                        .map(|v| v.to_string()),
                )?;
            }
        }
        w.flush()?;
        println!("{} cycles, termination {}", trace.records.len(), trace.termination.label());
        if let Termination::AllInfeasible(counts) = trace.termination {
            println!("violations: {counts}");
        }
        return termination_result(trace.termination);
    }

    // the plan result borrows the context, so keep a copy of the frame for plotting
    let frame = ctx.frame().clone();
    let r = match ctx.plan_cycle(&scenario.initial_state, &scenario.obstacles) {
        Ok(r) => r,
        Err(e) => {
            if let PlanError::AllInfeasible { counts, .. } = &e {
                println!("violations: {counts}");
            }
            return Err(CliError::Plan(e));
        }
    };
    report::write_trajectory_csv(create(&a.out, "optimal.csv")?, &r.optimal.points)?;
    if a.all_candidates {
        report::write_candidates_csv(create(&a.out, "candidates.csv")?, r.candidates, r.optimal_index)?;
        report::write_candidate_points_csv(create(&a.out, "candidate_points.csv")?, r.candidates)?;
        let start = r.cycle as f64 * scenario.sampling.dt;
        for (plane, name) in [(Plane::Frenet, "candidates_sd.svg"), (Plane::Cartesian, "candidates_xy.svg")] {
            let svg = report::candidates_svg(
                plane,
                r.candidates,
                r.optimal_index,
                Some(&frame),
                &scenario.obstacles,
                start,
            );
            fs::write(a.out.join(name), svg)?;
        }
    }
    let feasible = r.candidates.iter().filter(|c| c.is_feasible()).count();
    println!(
        "optimal candidate {} of {} ({} feasible), cost {:.6}",
        r.optimal_index,
        r.candidates.len(),
        feasible,
        r.optimal.costs.map_or(f64::NAN, |c| c.j_sum)
    );
    Ok(())
}

pub fn cmd_bench(a: &BenchArgs) -> Result<(), CliError> {
    let scenario = Scenario::load(&a.scenario)?;
    fs::create_dir_all(&a.out)?;
    let iters = a.iters as usize;

    if a.boxplot {
        let runs = bench::run_boxplot(&scenario, a.count, a.runs, iters)?;
        let records = runs.iter().enumerate().flat_map(|(i, m)| m.records(i).collect::<Vec<_>>());
        bench::write_iterations_csv(&a.out.join("boxplot_iterations.csv"), records)?;
        let boxes: Vec<_> = runs.iter().enumerate().map(|(i, m)| bench::box_stats(i, m)).collect();
        bench::write_box_csv(&a.out.join("boxplot.csv"), &boxes)?;
        for (b, m) in boxes.iter().zip(&runs) {
            println!(
                "run {}: median {:.3} ms, IQR {:.3} ms, jitter {:.3} ms ({:.2}%)",
                b.run_id,
                b.median_s * 1e3,
                (b.q3_s - b.q1_s) * 1e3,
                m.stats.jitter_abs * 1e3,
                m.stats.jitter_pct
            );
        }
        return Ok(());
    }

    if let Some(threads) = a.load_threads {
        let rep = bench::run_load_interference(&scenario, a.count, threads, iters)?;
        bench::write_iterations_csv(&a.out.join("load_iterations.csv"), rep.records())?;
        bench::write_summary_csv(
            &a.out.join("load_summary.csv"),
            &[rep.baseline.clone(), rep.loaded.clone()],
        )?;
        for (label, m) in [("baseline", &rep.baseline), ("loaded", &rep.loaded)] {
            println!(
                "{label}: avg {:.3} ms, max {:.3} ms, jitter {:.3} ms ({:.2}%)",
                m.stats.t_avg * 1e3,
                m.stats.t_max * 1e3,
                m.stats.jitter_abs * 1e3,
                m.stats.jitter_pct
            );
        }
        return Ok(());
    }

    let rep = bench::run_scaling_suite(&scenario, &a.counts, iters)?;
    let records = rep.rows.iter().flat_map(|m| m.records(0).collect::<Vec<_>>());
    bench::write_iterations_csv(&a.out.join("iterations.csv"), records)?;
    bench::write_summary_csv(&a.out.join("summary.csv"), &rep.rows)?;
    bench::write_fit(&mut create(&a.out, "fit.csv")?, &rep.fit)?;
    println!("count  avg_ms    max_ms    jitter_ms  jitter_%  per_traj_ms  ref_per_traj_ms");
    for m in &rep.rows {
        let reference = bench::REFERENCE_BOARD.iter().find(|r| r.0 == m.count).map(|r| format!("{:.2}", r.6));
        println!(
            "{:<6} {:<9.4} {:<9.4} {:<10.4} {:<9.3} {:<12.5} {}",
            m.count,
            m.stats.t_avg * 1e3,
            m.stats.t_max * 1e3,
            m.stats.jitter_abs * 1e3,
            m.stats.jitter_pct,
            m.stats.per_trajectory_avg * 1e3,
            reference.as_deref().unwrap_or("-")
        );
    }
    println!(
        "fit: slope {:.6} ms/trajectory, intercept {:.6} ms, R^2 {:.5}; per-trajectory variation {:.2}%",
        rep.fit.slope * 1e3,
        rep.fit.intercept * 1e3,
        rep.fit.r_squared,
        100.0 * rep.per_trajectory_variation()
    );
    Ok(())
}

pub fn cmd_serve(a: &ServeArgs) -> Result<(), CliError> {
    let settings = match &a.scenario {
        Some(p) => Scenario::load(p)?.settings(),
        None => Default::default(),
    };
    let summary = bridge::serve_planner(&a.endpoint, settings)?;
    info!("served {} cycles ({} failed)", summary.cycles, summary.failures);
    Ok(())
}

pub fn cmd_drive(a: &DriveArgs) -> Result<(), CliError> {
    let scenario = Scenario::load(&a.scenario)?;
    fs::create_dir_all(&a.out)?;
    let rep = bridge::drive_scenario(&a.endpoint, &scenario, &scenario.loop_options(a.step_mode.into()))?;
    report::write_trace_csv(create(&a.out, "trace.csv")?, &rep.trace.records)?;
    let mut w = csv::Writer::from_writer(create(&a.out, "latency.csv")?);
    w.write_record(["cycle", "round_trip_s"])?;
    for (i, d) in rep.latencies.iter().enumerate() {
        w.write_record([i.to_string(), d.as_secs_f64().to_string()])?;
    }
    w.flush()?;
    println!("{} cycles, termination {}", rep.trace.records.len(), rep.trace.termination.label());
    if let Some(e) = rep.error {
        return Err(e.into());
    }
    termination_result(rep.trace.termination)
}
