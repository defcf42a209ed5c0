//! Monte-Carlo runner and CSV output.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use risac_core::channel::build_channels;
use risac_core::gain_max::solve_gain_max;
use risac_core::rng::child_seed;
use risac_core::scenario::linear_to_db;
use risac_core::solve::{CHANNEL_STREAM, GAIN_MAX_INIT_STREAM, SRE_INIT_STREAM};
use risac_core::{solve_no_ris, solve_sre, Error, Scheme, SeededRng, SolveReport};

use crate::config::{RunConfig, Sweep};
use crate::summary::{summarize, SummaryRow};

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub algorithm: Scheme,
    pub trial: usize,
    pub seed: u64,
    pub sweep_value: f64,
    pub snr_s: f64,
    pub snr_s_db: f64,
    pub snr_c: f64,
    pub rate_bps_hz: f64,
    pub rho_abs: f64,
    pub iterations: usize,
    /// Solve time only; channel generation is excluded.
    pub wall_time_ms: f64,
    pub converged: bool,
    /// False when no beamformer met the user threshold.
    pub feasible: bool,
}

impl ResultRow {
    fn from_report(trial: usize, seed: u64, sweep_value: f64, r: &SolveReport) -> Self {
        Self {
            algorithm: r.scheme,
            trial,
            seed,
            sweep_value,
            snr_s: r.metrics.snr_s,
            snr_s_db: linear_to_db(r.metrics.snr_s),
            snr_c: r.metrics.snr_c,
            rate_bps_hz: r.metrics.rate_bps_hz,
            rho_abs: r.metrics.rho_abs,
            iterations: r.iterations,
            wall_time_ms: r.wall_time.as_secs_f64() * 1e3,
            converged: r.converged,
            feasible: true,
        }
    }

    fn infeasible(algorithm: Scheme, trial: usize, seed: u64, sweep_value: f64) -> Self {
        Self {
            algorithm,
            trial,
            seed,
            sweep_value,
            snr_s: f64::NAN,
            snr_s_db: f64::NAN,
            snr_c: f64::NAN,
            rate_bps_hz: f64::NAN,
            rho_abs: f64::NAN,
            iterations: 0,
            wall_time_ms: f64::NAN,
            converged: false,
            feasible: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("trial {trial}: {source}")]
    Solve {
        trial: usize,
        #[source]
        source: Error,
    },
    #[error("cannot start worker threads: {0}")]
    Threads(String),
}

/// Seed of trial `trial`; depends on nothing else.
pub fn trial_seed(base: u64, trial: usize) -> u64 {
    child_seed(base, trial as u64)
}

/// Solves one scheme on one channel draw. Infeasibility becomes a row;
/// anything else is a bug in the inputs and is returned.
pub fn solve_one(cfg: &RunConfig, scheme: Scheme, trial: usize, sweep_value: f64) -> Result<ResultRow, RunError> {
    let sc = cfg.sweep.apply(&cfg.scenario, sweep_value);
    let seed = trial_seed(cfg.seed, trial);
    let root = SeededRng::new(seed);
    let ch =
        build_channels(&sc, &mut root.child(CHANNEL_STREAM)).map_err(|source| RunError::Solve { trial, source })?;
    let budget = sc.link_budget();
    let report = match scheme {
        Scheme::Sre => solve_sre(&ch, &budget, &cfg.sre, &mut root.child(SRE_INIT_STREAM)),
        Scheme::Benchmark => solve_gain_max(&ch, &budget, &cfg.ao, &mut root.child(GAIN_MAX_INIT_STREAM)),
        Scheme::NoRis => solve_no_ris(&ch, &budget),
    };
    match report {
        Ok(r) => Ok(ResultRow::from_report(trial, seed, sweep_value, &r)),
        Err(Error::Infeasible { .. } | Error::DegenerateSpan) => {
            Ok(ResultRow::infeasible(scheme, trial, seed, sweep_value))
        }
        Err(source) => Err(RunError::Solve { trial, source }),
    }
}

/// Every (scheme, sweep value, trial) combination, sorted by that key.
pub fn run_experiment(cfg: &RunConfig) -> Result<Vec<ResultRow>, RunError> {
    let schemes = cfg.algo.schemes();
    let values = cfg.sweep_values();
    let mut jobs = Vec::with_capacity(schemes.len() * values.len() * cfg.trials);
    for &s in &schemes {
        for (vi, &v) in values.iter().enumerate() {
            for t in 0..cfg.trials {
                jobs.push((s, vi, v, t));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| RunError::Threads(e.to_string()))?;
    let mut rows: Vec<(usize, ResultRow)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(s, vi, v, t)| solve_one(cfg, s, t, v).map(|r| (vi, r)))
            .collect::<Result<_, _>>()
    })?;
    // grid order, not numeric order, so a user-supplied grid keeps its layout
    rows.sort_by(|(va, a), (vb, b)| (a.algorithm, va, a.trial).cmp(&(b.algorithm, vb, b.trial)));
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

/// 17 significant digits, enough to round-trip an `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub const RESULTS_HEADER: [&str; 12] = [
    "algorithm",
    "sweep_value",
    "trial",
    "seed",
    "snr_s",
    "snr_s_db",
    "snr_c",
    "rate_bps_hz",
    "rho_abs",
    "iterations",
    "converged",
    "feasible",
];

/// `results.csv`: everything except timing, which is not reproducible.
pub fn write_results<W: Write>(out: W, rows: &[ResultRow]) -> Result<(), RunError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for r in rows {
        w.write_record([
            r.algorithm.as_str().to_string(),
            fmt_f64(r.sweep_value),
            r.trial.to_string(),
            r.seed.to_string(),
            fmt_f64(r.snr_s),
            fmt_f64(r.snr_s_db),
            fmt_f64(r.snr_c),
            fmt_f64(r.rate_bps_hz),
            fmt_f64(r.rho_abs),
            r.iterations.to_string(),
            r.converged.to_string(),
            r.feasible.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_timing<W: Write>(out: W, rows: &[ResultRow]) -> Result<(), RunError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["algorithm", "sweep_value", "trial", "wall_time_ms"])?;
    for r in rows {
        w.write_record([
            r.algorithm.as_str().to_string(),
            fmt_f64(r.sweep_value),
            r.trial.to_string(),
            fmt_f64(r.wall_time_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary<W: Write>(out: W, rows: &[SummaryRow]) -> Result<(), RunError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "algorithm",
        "sweep_value",
        "rows",
        "used",
        "non_converged",
        "infeasible",
    ];
    let stats = ["mean", "median", "p10", "p90"];
    let fields = ["snr_s", "snr_s_db", "rate_bps_hz", "rho_abs", "wall_time_ms"];
    let names: Vec<String> = fields
        .iter()
        .flat_map(|f| stats.iter().map(move |s| format!("{f}_{s}")))
        .collect();
    header.extend(names.iter().map(String::as_str));
    w.write_record(&header)?;
    for s in rows {
        let mut rec = vec![
            s.algorithm.as_str().to_string(),
            fmt_f64(s.sweep_value),
            s.rows.to_string(),
            s.used.to_string(),
            s.non_converged.to_string(),
            s.infeasible.to_string(),
        ];
        for st in [&s.snr_s, &s.snr_s_db, &s.rate_bps_hz, &s.rho_abs, &s.wall_time_ms] {
            rec.extend([st.mean, st.median, st.p10, st.p90].map(fmt_f64));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Mean SNR_s in dB must not drop as the surface grows. Returns one line per
/// RIS scheme; reported, never enforced.
pub fn monotonicity_report(cfg: &RunConfig, summary: &[SummaryRow]) -> Vec<String> {
    if cfg.sweep != Sweep::RisSize {
        return Vec::new();
    }
    let mut lines = Vec::new();
    for scheme in [Scheme::Sre, Scheme::Benchmark] {
        let mut pts: Vec<(f64, f64)> = summary
            .iter()
            .filter(|s| s.algorithm == scheme && s.used > 0)
            .map(|s| (s.sweep_value, linear_to_db(s.snr_s.mean)))
            .collect();
        if pts.len() < 2 {
            continue;
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let drops: Vec<String> = pts
            .windows(2)
            .filter(|p| p[1].1 < p[0].1)
            .map(|p| format!("M={}->{}: {:.3} dB", p[0].0, p[1].0, p[1].1 - p[0].1))
            .collect();
        lines.push(if drops.is_empty() {
            format!("{scheme}: mean SNR_s non-decreasing in M")
        } else {
            format!("{scheme}: mean SNR_s decreases at {}", drops.join(", "))
        });
    }
    lines
}

fn manifest(cfg: &RunConfig, rows: &[ResultRow], checks: &[String]) -> String {
    let infeasible = rows.iter().filter(|r| !r.feasible).count();
    let mut s = String::new();
    s.push_str(&format!("tool = risac {}\n", env!("CARGO_PKG_VERSION")));
    if let Some(p) = &cfg.scenario_path {
        s.push_str(&format!("config_path = {}\n", p.display()));
    }
    s.push_str(&format!("base_seed = {}\n", cfg.seed));
    s.push_str(&format!("rows = {}\n", rows.len()));
    s.push_str(&format!("infeasible_rows = {infeasible}\n"));
    s.push_str(&format!("sre = {:?}\n", cfg.sre));
    s.push_str(&format!("benchmark = {:?}\n", cfg.ao));
    for c in checks {
        s.push_str(&format!("check = {c}\n"));
    }
    s.push_str("\n# config\n");
    s.push_str(&cfg.echo());
    s
}

/// Writes `results.csv`, `summary.csv`, `timing.csv` and `manifest.txt`.
pub fn write_outputs(dir: &Path, cfg: &RunConfig, rows: &[ResultRow]) -> Result<(), RunError> {
    fs::create_dir_all(dir)?;
    write_results(fs::File::create(dir.join("results.csv"))?, rows)?;
    write_timing(fs::File::create(dir.join("timing.csv"))?, rows)?;
    let summary = summarize(rows).unwrap_or_default();
    write_summary(fs::File::create(dir.join("summary.csv"))?, &summary)?;
    let checks = monotonicity_report(cfg, &summary);
    fs::write(dir.join("manifest.txt"), manifest(cfg, rows, &checks))?;
    Ok(())
}
