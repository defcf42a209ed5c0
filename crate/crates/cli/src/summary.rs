//! Per-(algorithm, sweep value) aggregates over converged rows.

use risac_core::Scheme;

use crate::experiment::ResultRow;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SummaryError {
    #[error("no rows to summarize")]
    EmptyInput,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub median: f64,
    pub p10: f64,
    pub p90: f64,
}

impl Stats {
    const EMPTY: Stats = Stats {
        mean: f64::NAN,
        median: f64::NAN,
        p10: f64::NAN,
        p90: f64::NAN,
    };

    pub fn of(values: &[f64]) -> Stats {
        if values.is_empty() {
            return Stats::EMPTY;
        }
        let mut v = values.to_vec();
        v.sort_by(|a, b| a.total_cmp(b));
        Stats {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            median: percentile(&v, 0.5),
            p10: percentile(&v, 0.1),
            p90: percentile(&v, 0.9),
        }
    }
}

/// Linear interpolation between closest ranks of sorted data.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: Scheme,
    pub sweep_value: f64,
    pub rows: usize,
    /// Rows that entered the statistics (converged ones).
    pub used: usize,
    pub non_converged: usize,
    pub infeasible: usize,
    pub snr_s: Stats,
    pub snr_s_db: Stats,
    pub rate_bps_hz: Stats,
    pub rho_abs: Stats,
    pub wall_time_ms: Stats,
}

/// Groups consecutive rows with the same (algorithm, sweep value), so the
/// input should be in [`crate::experiment::run_experiment`] order.
pub fn summarize(rows: &[ResultRow]) -> Result<Vec<SummaryRow>, SummaryError> {
    if rows.is_empty() {
        return Err(SummaryError::EmptyInput);
    }
    let mut out = Vec::new();
    let mut start = 0;
    while start < rows.len() {
        let key = (rows[start].algorithm, rows[start].sweep_value.to_bits());
        let end = rows[start..]
            .iter()
            .position(|r| (r.algorithm, r.sweep_value.to_bits()) != key)
            .map_or(rows.len(), |k| start + k);
        let group = &rows[start..end];
        let used: Vec<&ResultRow> = group.iter().filter(|r| r.converged).collect();
        let col = |f: fn(&ResultRow) -> f64| Stats::of(&used.iter().map(|r| f(r)).collect::<Vec<_>>());
        out.push(SummaryRow {
            algorithm: key.0,
            sweep_value: rows[start].sweep_value,
            rows: group.len(),
            used: used.len(),
            non_converged: group.len() - used.len(),
            infeasible: group.iter().filter(|r| !r.feasible).count(),
            snr_s: col(|r| r.snr_s),
            snr_s_db: col(|r| r.snr_s_db),
            rate_bps_hz: col(|r| r.rate_bps_hz),
            rho_abs: col(|r| r.rho_abs),
            wall_time_ms: col(|r| r.wall_time_ms),
        });
        start = end;
    }
    Ok(out)
}
