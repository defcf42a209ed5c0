//! Common result type for the three schemes, and the no-RIS baseline.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::beamforming::{optimal_beamformer, Metrics};
use crate::channel::{assemble_h, ChannelSet, EffectiveChannels, PhaseConfig};
use crate::error::{Error, Result};
use crate::linalg::ComplexVector;
use crate::scenario::LinkBudget;

/// RNG stream indices derived from a trial seed.
pub const CHANNEL_STREAM: u64 = 0;
pub const SRE_INIT_STREAM: u64 = 1;
pub const GAIN_MAX_INIT_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    /// Subspace rotation and expansion, then the optimal beamformer.
    Sre,
    /// Alternating channel-gain maximization.
    Benchmark,
    NoRis,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Sre, Scheme::Benchmark, Scheme::NoRis];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Sre => "sre",
            Scheme::Benchmark => "benchmark",
            Scheme::NoRis => "no-ris",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sre" => Ok(Scheme::Sre),
            "benchmark" | "gain-max" => Ok(Scheme::Benchmark),
            "no-ris" | "noris" => Ok(Scheme::NoRis),
            _ => Err(Error::InvalidParameter(format!("unknown scheme `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub scheme: Scheme,
    pub w: ComplexVector,
    /// Final RIS phases; `None` for the no-RIS baseline.
    pub phases: Option<PhaseConfig>,
    pub channels: EffectiveChannels,
    pub metrics: Metrics,
    /// SRE: objective `f(v)` per accepted iterate. Benchmark: exact sensing
    /// SNR after every accepted update.
    pub objective_trace: Vec<f64>,
    /// Benchmark only: communication SNR alongside `objective_trace`.
    pub constraint_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub wall_time: Duration,
}

/// Optimal beamformer on the direct paths only.
pub fn solve_no_ris(ch: &ChannelSet, budget: &LinkBudget) -> Result<SolveReport> {
    let start = Instant::now();
    let h = ch.direct_only();
    let bf = optimal_beamformer(&h.h_t, &h.h_c, budget.tx_power_w, budget.gamma0, budget.noise_c_w)?;
    let metrics = Metrics::evaluate(&h, &bf.w, budget);
    Ok(SolveReport {
        scheme: Scheme::NoRis,
        w: bf.w,
        phases: None,
        channels: h,
        metrics,
        objective_trace: vec![metrics.snr_s],
        constraint_trace: vec![metrics.snr_c],
        iterations: 0,
        converged: true,
        wall_time: start.elapsed(),
    })
}

/// Optimal beamformer for a fixed phase configuration.
pub fn solve_fixed_phases(ch: &ChannelSet, v: &PhaseConfig, budget: &LinkBudget) -> Result<(ComplexVector, Metrics)> {
    let h = assemble_h(ch, v)?;
    let bf = optimal_beamformer(&h.h_t, &h.h_c, budget.tx_power_w, budget.gamma0, budget.noise_c_w)?;
    let m = Metrics::evaluate(&h, &bf.w, budget);
    Ok((bf.w, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::build_channels;
    use crate::rng::SeededRng;
    use crate::scenario::Scenario;

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.as_str().parse::<Scheme>().unwrap(), s);
        }
        assert!("ris".parse::<Scheme>().is_err());
    }

    #[test]
    fn no_ris_matches_disconnected_surface() {
        let sc = Scenario::default();
        let ch = build_channels(&sc, &mut SeededRng::new(3)).unwrap();
        let budget = sc.link_budget();
        let base = solve_no_ris(&ch, &budget).unwrap();
        let (_, m) = solve_fixed_phases(&ch.ris_disconnected(), &PhaseConfig::ones(64), &budget).unwrap();
        assert!((base.metrics.snr_s - m.snr_s).abs() <= 1e-12 * m.snr_s);
        assert!(base.metrics.snr_c >= budget.gamma0 * (1.0 - 1e-9));
    }
}
