//! Cycle timing harness: runtime statistics, jitter, scaling over sample
//! counts, background-load interference and per-run distributions.

use std::hint::black_box;
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::planner::{InitError, PlanError, PlannerContext};
use crate::scenario::Scenario;

/// Iterations run and discarded before recording.
pub const WARMUP_ITERATIONS: usize = 10;
/// Minimum iterations accepted by the scaling suite.
pub const MIN_SUITE_ITERATIONS: usize = 30;

/// Reference runtimes (ms) of an embedded RTOS board for 16, 32, 64 and 100
/// trajectories: (count, min, max, avg, jitter, jitter %, avg per trajectory).
/// Its jitter column is the max - min spread.
pub const REFERENCE_BOARD: [(usize, f64, f64, f64, f64, f64, f64); 4] = [
    (16, 287.42, 287.83, 287.67, 0.41, 0.14, 17.98),
    (32, 570.37, 570.68, 570.49, 0.31, 0.05, 17.83),
    (64, 1137.39, 1138.96, 1138.00, 1.57, 0.14, 17.78),
    (100, 1774.45, 1777.48, 1775.22, 3.03, 0.17, 17.75),
];

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("EmptySamples: no timing samples")]
    EmptySamples,
    #[error("UsageError: {0}")]
    Usage(String),
    #[error("PlannerInit: {0}")]
    Init(#[from] InitError),
    #[error("PlanError: {0}")]
    Plan(#[from] PlanError),
    #[error("IoError: {0}")]
    Io(#[from] std::io::Error),
    #[error("CsvError: {0}")]
    Csv(#[from] csv::Error),
}

/// Average time per phase, seconds.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PhaseBreakdown {
    pub generation: f64,
    pub evaluation: f64,
    pub other: f64,
}

/// Runtime statistics of one measurement series, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct TimingStats {
    pub n: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub t_avg: f64,
    /// Largest deviation of a single cycle from the mean.
    pub jitter_abs: f64,
    pub jitter_pct: f64,
    /// `t_max - t_min`.
    pub spread: f64,
    pub per_trajectory_avg: f64,
    pub phase_breakdown: PhaseBreakdown,
}

/// Per-cycle durations as recorded by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CycleSample {
    pub total: Duration,
    pub generate: Duration,
    pub evaluate: Duration,
}

fn nanos(d: Duration) -> u128 {
    d.as_nanos()
}

/// Min, max, mean, jitter and per-trajectory mean of `samples`.
///
/// Sums are accumulated in integer nanoseconds; conversion to seconds
/// happens once at the end.
pub fn compute_stats(samples: &[Duration], sample_count: usize) -> Result<TimingStats, BenchError> {
    if samples.is_empty() {
        return Err(BenchError::EmptySamples);
    }
    if sample_count == 0 {
        return Err(BenchError::Usage("sample_count must be >= 1".into()));
    }
    let n = samples.len();
    let sum: u128 = samples.iter().map(|&d| nanos(d)).sum();
    let min = samples.iter().map(|&d| nanos(d)).min().unwrap_or(0);
    let max = samples.iter().map(|&d| nanos(d)).max().unwrap_or(0);
    // jitter in exact rational form: max |n*T_i - sum| / n
    let dev_scaled = samples.iter().map(|&d| (nanos(d) * n as u128).abs_diff(sum)).max().unwrap_or(0);

    let avg_ns = sum as f64 / n as f64;
    let jitter_ns = dev_scaled as f64 / n as f64;
    Ok(TimingStats {
        n,
        t_min: min as f64 * 1e-9,
        t_max: max as f64 * 1e-9,
        t_avg: avg_ns * 1e-9,
        jitter_abs: jitter_ns * 1e-9,
        jitter_pct: if sum == 0 { 0.0 } else { 100.0 * jitter_ns / avg_ns },
        spread: (max - min) as f64 * 1e-9,
        per_trajectory_avg: avg_ns * 1e-9 / sample_count as f64,
        phase_breakdown: PhaseBreakdown::default(),
    })
}

/// [`compute_stats`] over cycle totals plus the phase averages.
pub fn compute_cycle_stats(samples: &[CycleSample], sample_count: usize) -> Result<TimingStats, BenchError> {
    let totals: Vec<Duration> = samples.iter().map(|s| s.total).collect();
    let mut stats = compute_stats(&totals, sample_count)?;
    let n = samples.len() as f64;
    let gen: u128 = samples.iter().map(|s| nanos(s.generate)).sum();
    let eval: u128 = samples.iter().map(|s| nanos(s.evaluate)).sum();
    let total: u128 = samples.iter().map(|s| nanos(s.total)).sum();
    stats.phase_breakdown = PhaseBreakdown {
        generation: gen as f64 / n * 1e-9,
        evaluation: eval as f64 / n * 1e-9,
        other: total.saturating_sub(gen + eval) as f64 / n * 1e-9,
    };
    Ok(stats)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `y` on `x`.
pub fn linear_fit(points: &[(f64, f64)]) -> LinearFit {
    let n = points.len() as f64;
    if points.len() < 2 {
        return LinearFit { slope: 0.0, intercept: points.first().map_or(0.0, |p| p.1), r_squared: 1.0 };
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx = points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let sxy = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
    let syy = points.iter().map(|p| (p.1 - my).powi(2)).sum::<f64>();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let sse = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    LinearFit { slope, intercept, r_squared }
}

/// One recorded planning cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub run_id: usize,
    pub count: usize,
    pub iteration: usize,
    pub t_total_s: f64,
    pub t_generate_s: f64,
    pub t_evaluate_s: f64,
}

/// Process CPU time, for utilization estimates.
pub fn process_cpu_time() -> Duration {
    let mut ts = libc::timespec { tv_sec: 0, tv_nsec: 0 };
    // SAFETY: `ts` is a valid out-pointer for the duration of the call.
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_PROCESS_CPUTIME_ID, &mut ts) };
    if rc != 0 {
        return Duration::ZERO;
    }
    Duration::new(ts.tv_sec as u64, ts.tv_nsec as u32)
}

/// Result of timing one workload configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub count: usize,
    pub samples: Vec<CycleSample>,
    pub stats: TimingStats,
    /// Process CPU time over wall time during recording, percent. Rows of
    /// one scaling suite share the figure of the whole interleaved run.
    pub cpu_utilization_pct: f64,
}

impl Measurement {
    pub fn records(&self, run_id: usize) -> impl Iterator<Item = IterationRecord> + '_ {
        self.samples.iter().enumerate().map(move |(i, s)| IterationRecord {
            run_id,
            count: self.count,
            iteration: i,
            t_total_s: s.total.as_secs_f64(),
            t_generate_s: s.generate.as_secs_f64(),
            t_evaluate_s: s.evaluate.as_secs_f64(),
        })
    }
}

/// Builds a planner for `scenario` with the sampling grid resized to `count`.
pub fn context_for(scenario: &Scenario, count: usize) -> Result<PlannerContext, BenchError> {
    let mut settings = scenario.settings();
    if count != settings.sampling.sample_count() {
        settings.sampling = settings.sampling.with_total_count(count);
    }
    Ok(PlannerContext::init(&scenario.reference_path, settings)?)
}

/// Times one plan cycle from the scenario's frozen initial state.
fn time_cycle(ctx: &mut PlannerContext, scenario: &Scenario) -> Result<CycleSample, BenchError> {
    ctx.reset_cycle_index(0);
    let start = Instant::now();
    let r = ctx.plan_cycle(&scenario.initial_state, &scenario.obstacles)?;
    let total = start.elapsed();
    black_box(r.optimal_index);
    Ok(CycleSample { total, generate: r.timings.generate, evaluate: r.timings.evaluate })
}

fn warm_up(ctx: &mut PlannerContext, scenario: &Scenario) -> Result<(), BenchError> {
    for _ in 0..WARMUP_ITERATIONS {
        time_cycle(ctx, scenario)?;
    }
    Ok(())
}

fn finish(
    ctx: &PlannerContext,
    samples: Vec<CycleSample>,
    cpu_utilization_pct: f64,
) -> Result<Measurement, BenchError> {
    let count = ctx.settings().sampling.sample_count();
    let stats = compute_cycle_stats(&samples, count)?;
    Ok(Measurement { count, samples, stats, cpu_utilization_pct })
}

/// Process CPU time over wall time since the given start points, percent.
fn utilization(wall: Instant, cpu: Duration) -> f64 {
    let cpu = process_cpu_time().saturating_sub(cpu).as_secs_f64();
    let wall = wall.elapsed().as_secs_f64();
    if wall > 0.0 {
        100.0 * cpu / wall
    } else {
        0.0
    }
}

/// Repeats one plan cycle on the scenario's frozen initial state.
pub fn measure(
    ctx: &mut PlannerContext,
    scenario: &Scenario,
    iterations: usize,
) -> Result<Measurement, BenchError> {
    if iterations == 0 {
        return Err(BenchError::Usage("iterations must be >= 1".into()));
    }
    warm_up(ctx, scenario)?;
    let mut samples = Vec::with_capacity(iterations);
    let (wall, cpu) = (Instant::now(), process_cpu_time());
    for _ in 0..iterations {
        samples.push(time_cycle(ctx, scenario)?);
    }
    let util = utilization(wall, cpu);
    finish(ctx, samples, util)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub rows: Vec<Measurement>,
    /// `t_avg` (seconds) against sample count.
    pub fit: LinearFit,
}

impl ScalingReport {
    /// Relative spread of the per-trajectory average between the smallest
    /// and largest count.
    pub fn per_trajectory_variation(&self) -> f64 {
        let by_count = |pick: fn(usize, usize) -> bool| {
            self.rows.iter().fold(None::<&Measurement>, |acc, m| match acc {
                Some(a) if !pick(m.count, a.count) => Some(a),
                _ => Some(m),
            })
        };
        match (by_count(|a, b| a < b), by_count(|a, b| a > b)) {
            (Some(lo), Some(hi)) => {
                let (a, b) = (lo.stats.per_trajectory_avg, hi.stats.per_trajectory_avg);
                (a - b).abs() / a.min(b)
            }
            _ => 0.0,
        }
    }
}

pub fn run_scaling_suite(
    scenario: &Scenario,
    counts: &[usize],
    iterations: usize,
) -> Result<ScalingReport, BenchError> {
    if counts.is_empty() || counts.contains(&0) {
        return Err(BenchError::Usage("counts must be a nonempty list of positive integers".into()));
    }
    if iterations < MIN_SUITE_ITERATIONS {
        return Err(BenchError::Usage(format!(
            "the scaling suite needs >= {MIN_SUITE_ITERATIONS} iterations"
        )));
    }
    let mut ctxs = counts.iter().map(|&c| context_for(scenario, c)).collect::<Result<Vec<_>, _>>()?;
    for ctx in &mut ctxs {
        warm_up(ctx, scenario)?;
    }
    // round-robin over the counts so that slow phases of the host hit every
    // count alike instead of skewing one block
    let mut samples = vec![Vec::with_capacity(iterations); ctxs.len()];
    let (wall, cpu) = (Instant::now(), process_cpu_time());
    for _ in 0..iterations {
        for (ctx, out) in ctxs.iter_mut().zip(&mut samples) {
            out.push(time_cycle(ctx, scenario)?);
        }
    }
    let util = utilization(wall, cpu);
    let rows =
        ctxs.iter().zip(samples).map(|(ctx, s)| finish(ctx, s, util)).collect::<Result<Vec<_>, _>>()?;
    let fit = linear_fit(&rows.iter().map(|m| (m.count as f64, m.stats.t_avg)).collect::<Vec<_>>());
    Ok(ScalingReport { rows, fit })
}

/// Busy-spinning threads that run until dropped.
pub struct SpinLoad {
    stop: Arc<AtomicBool>,
    handles: Vec<thread::JoinHandle<()>>,
}

impl SpinLoad {
    pub fn start(threads: usize) -> Self {
        let stop = Arc::new(AtomicBool::new(false));
        let handles = (0..threads)
            .map(|_| {
                let stop = Arc::clone(&stop);
                thread::spawn(move || {
                    let mut x = 0u64;
                    while !stop.load(Ordering::Relaxed) {
                        x = black_box(x.wrapping_mul(6364136223846793005).wrapping_add(1));
                    }
                })
            })
            .collect();
        Self { stop, handles }
    }
}

impl Drop for SpinLoad {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::Relaxed);
        for h in self.handles.drain(..) {
            let _ = h.join();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadReport {
    pub load_threads: usize,
    pub baseline: Measurement,
    pub loaded: Measurement,
}

impl LoadReport {
    /// Baseline rows (run 0) followed by loaded rows (run 1).
    pub fn records(&self) -> Vec<IterationRecord> {
        self.baseline.records(0).chain(self.loaded.records(1)).collect()
    }
}

pub fn run_load_interference(
    scenario: &Scenario,
    count: usize,
    load_threads: usize,
    iterations: usize,
) -> Result<LoadReport, BenchError> {
    let mut ctx = context_for(scenario, count)?;
    let baseline = measure(&mut ctx, scenario, iterations)?;
    let loaded = {
        let _load = SpinLoad::start(load_threads);
        measure(&mut ctx, scenario, iterations)?
    };
    Ok(LoadReport { load_threads, baseline, loaded })
}

/// Five-number summary of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxStats {
    pub run_id: usize,
    pub min_s: f64,
    pub q1_s: f64,
    pub median_s: f64,
    pub q3_s: f64,
    pub max_s: f64,
    pub mean_s: f64,
}

/// Linear-interpolated quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn box_stats(run_id: usize, m: &Measurement) -> BoxStats {
    let mut t: Vec<f64> = m.samples.iter().map(|s| s.total.as_secs_f64()).collect();
    t.sort_by(f64::total_cmp);
    BoxStats {
        run_id,
        min_s: t[0],
        q1_s: quantile(&t, 0.25),
        median_s: quantile(&t, 0.5),
        q3_s: quantile(&t, 0.75),
        max_s: t[t.len() - 1],
        mean_s: m.stats.t_avg,
    }
}

/// `runs` independent measurements, each with a fresh planner context.
pub fn run_boxplot(
    scenario: &Scenario,
    count: usize,
    runs: usize,
    iterations: usize,
) -> Result<Vec<Measurement>, BenchError> {
    if runs == 0 {
        return Err(BenchError::Usage("runs must be >= 1".into()));
    }
    (0..runs)
        .map(|_| {
            let mut ctx = context_for(scenario, count)?;
            measure(&mut ctx, scenario, iterations)
        })
        .collect()
}

pub fn write_iterations_csv(
    path: &Path,
    records: impl IntoIterator<Item = IterationRecord>,
) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub const SUMMARY_HEADER: [&str; 8] = [
    "Trajectories",
    "Min. runtime (ms)",
    "Max. runtime (ms)",
    "Avg. runtime (ms)",
    "Jitter (ms)",
    "Jitter (%)",
    "Avg. time / trajectory (ms)",
    "CPU utilization (%)",
];

/// One row per measurement, columns as in [`SUMMARY_HEADER`].
pub fn write_summary_csv(path: &Path, rows: &[Measurement]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for m in rows {
        let s = &m.stats;
        w.write_record([
            m.count.to_string(),
            format!("{:.4}", s.t_min * 1e3),
            format!("{:.4}", s.t_max * 1e3),
            format!("{:.4}", s.t_avg * 1e3),
            format!("{:.4}", s.jitter_abs * 1e3),
            format!("{:.3}", s.jitter_pct),
            format!("{:.5}", s.per_trajectory_avg * 1e3),
            format!("{:.1}", m.cpu_utilization_pct),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_box_csv(path: &Path, stats: &[BoxStats]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path)?;
    for s in stats {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_fit(out: &mut impl Write, fit: &LinearFit) -> std::io::Result<()> {
    writeln!(out, "slope_s_per_trajectory,intercept_s,r_squared")?;
    writeln!(out, "{:.9},{:.9},{:.6}", fit.slope, fit.intercept, fit.r_squared)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(v: &[f64]) -> Vec<Duration> {
        v.iter().map(|&x| Duration::from_secs_f64(x * 1e-3)).collect()
    }

    #[test]
    fn constant_samples_have_no_jitter() {
        let s = compute_stats(&ms(&[10.0, 10.0, 10.0]), 1).unwrap();
        assert_eq!(s.t_avg, 0.01);
        assert_eq!(s.jitter_abs, 0.0);
        assert_eq!(s.jitter_pct, 0.0);
    }

    #[test]
    fn symmetric_spread() {
        let s = compute_stats(&ms(&[9.0, 10.0, 11.0]), 1).unwrap();
        assert!((s.t_avg - 0.010).abs() < 1e-15);
        assert!((s.t_max - 0.011).abs() < 1e-15);
        assert!((s.jitter_abs - 0.001).abs() < 1e-15);
        assert!((s.jitter_pct - 10.0).abs() < 1e-9);
        assert!((s.spread - 0.002).abs() < 1e-15);
    }

    #[test]
    fn empty_samples() {
        assert!(matches!(compute_stats(&[], 1), Err(BenchError::EmptySamples)));
    }

    #[test]
    fn exact_fit() {
        let f = linear_fit(&[(16.0, 1.0), (32.0, 2.0), (64.0, 4.0), (100.0, 6.25)]);
        assert!((f.slope - 1.0 / 16.0).abs() < 1e-12);
        assert!(f.intercept.abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantiles() {
        let d = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&d, 0.5), 3.0);
        assert_eq!(quantile(&d, 0.25), 2.0);
        assert_eq!(quantile(&[1.0, 2.0], 0.5), 1.5);
    }

    #[test]
    fn cpu_clock_advances() {
        let a = process_cpu_time();
        let mut x = 0u64;
        for i in 0..2_000_000u64 {
            x = black_box(x ^ i.wrapping_mul(31));
        }
        black_box(x);
        assert!(process_cpu_time() > a);
    }
}
