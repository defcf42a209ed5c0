//! Channel-gain maximization benchmark.
//!
//! Alternates between the optimal beamformer for fixed phases and closed-form
//! single-element phase updates for a fixed beamformer. For element `m`, with
//! `v_m = e^{j mu}`,
//!
//! ```text
//! SNR_s(mu) ~ (K0 + 2 Re{e^{j mu} a0}) (K1 + 2 Re{e^{j mu} a1})
//! SNR_c(mu) ~  K_c + 2 Re{e^{j mu} a_c}
//! ```
//!
//! For many elements the product of the two small `Re{}` terms is negligible
//! and the objective becomes `g(mu) = K0 K1 + 2 Re{e^{j mu}(K1 a0 + K0 a1)}`,
//! a single sinusoid whose extremes are known in closed form. The user
//! constraint restricts `mu` to an arc where `cos(mu + angle(a_c)) >= C`.
//! Candidates from both are scored with the exact sensing SNR, and the
//! current phase always competes, so every update is an exact ascent step.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use crate::beamforming::{comm_snr, optimal_beamformer, sensing_snr, Metrics, FEASIBILITY_SLACK};
use crate::channel::{
    assemble_h, build_channels, decompose_with_sums, CascadeSums, ChannelSet, EffectiveChannels, PerElementTerms,
    PhaseConfig,
};
use crate::error::{Error, Result};
use crate::linalg::{check_len, dot_h, ComplexVector, C64};
use crate::rng::SeededRng;
use crate::scenario::{LinkBudget, Scenario};
use crate::solve::{Scheme, SolveReport, CHANNEL_STREAM, GAIN_MAX_INIT_STREAM};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoParams {
    pub outer_max: usize,
    /// Relative sensing-SNR change that ends the outer loop.
    pub outer_tol: f64,
    pub inner_max: usize,
    /// Relative sensing-SNR change between sweeps that ends the inner loop.
    pub inner_tol: f64,
}

impl Default for AoParams {
    fn default() -> Self {
        Self {
            outer_max: 30,
            outer_tol: 1e-6,
            inner_max: 20,
            inner_tol: 1e-6,
        }
    }
}

impl AoParams {
    pub fn validate(&self) -> Result<()> {
        if self.outer_max == 0 || self.inner_max == 0 {
            return Err(Error::InvalidParameter("iteration limits must be positive".into()));
        }
        if !(self.outer_tol > 0.0 && self.inner_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Phases of one element that meet the user SNR constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeasibleSet {
    AllFeasible,
    /// Counter-clockwise arc from `lo` to `hi`, both in `[0, 2pi)`.
    Arc {
        lo: f64,
        hi: f64,
    },
    Empty,
}

impl FeasibleSet {
    pub fn contains(&self, mu: f64) -> bool {
        match *self {
            FeasibleSet::AllFeasible => true,
            FeasibleSet::Empty => false,
            FeasibleSet::Arc { lo, hi } => (mu - lo).rem_euclid(TAU) <= (hi - lo).rem_euclid(TAU),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCandidates {
    /// `(argmax g, argmin g)`; `None` when `g` is constant.
    pub mu_unconstrained: Option<(f64, f64)>,
    /// Arc endpoints, when the feasible set is an arc.
    pub mu_boundary: Vec<f64>,
    pub feasibility: FeasibleSet,
}

fn wrap(mu: f64) -> f64 {
    let x = mu.rem_euclid(TAU);
    if x >= TAU {
        0.0
    } else {
        x
    }
}

/// Large-surface approximation of the scaled sensing SNR:
/// `K0 K1 + 2 K1 |a0| cos(mu + nu0) + 2 K0 |a1| cos(mu + nu1)`.
pub fn per_element_objective(t: &PerElementTerms, mu: f64) -> f64 {
    t.k0 * t.k1
        + 2.0 * t.k1 * t.a0.norm() * (mu + t.a0.arg()).cos()
        + 2.0 * t.k0 * t.a1.norm() * (mu + t.a1.arg()).cos()
}

/// Maximizer and minimizer of [`per_element_objective`].
///
/// `g(mu) = K0 K1 + 2 R cos(mu + psi)` with `R e^{j psi} = K1 a0 + K0 a1`, so
/// the maximum sits at `-psi` and the minimum at `pi - psi`.
pub fn stationary_angles(t: &PerElementTerms) -> Result<(f64, f64)> {
    let phasor = t.a0 * t.k1 + t.a1 * t.k0;
    let r = phasor.norm();
    let size = t.k1 * t.a0.norm() + t.k0 * t.a1.norm();
    if r == 0.0 || r <= 1e-14 * size {
        return Err(Error::DegenerateObjective);
    }
    let psi = phasor.arg();
    Ok((wrap(-psi), wrap(PI - psi)))
}

/// Phases where `K_c + 2 |a_c| cos(mu + nu_c) >= gamma0 sigma_c2`.
pub fn feasibility_arc(t: &PerElementTerms, gamma0: f64, sigma_c2: f64) -> FeasibleSet {
    let need = gamma0 * sigma_c2;
    let ac = t.a_c.norm();
    if ac == 0.0 {
        return if t.k_c >= need {
            FeasibleSet::AllFeasible
        } else {
            FeasibleSet::Empty
        };
    }
    let c = (need - t.k_c) / (2.0 * ac);
    if c <= -1.0 {
        FeasibleSet::AllFeasible
    } else if c > 1.0 {
        FeasibleSet::Empty
    } else {
        let half = c.acos();
        let nu = t.a_c.arg();
        FeasibleSet::Arc {
            lo: wrap(-half - nu),
            hi: wrap(half - nu),
        }
    }
}

pub fn phase_candidates(t: &PerElementTerms, gamma0: f64, sigma_c2: f64) -> PhaseCandidates {
    let feasibility = feasibility_arc(t, gamma0, sigma_c2);
    let mu_boundary = match feasibility {
        FeasibleSet::Arc { lo, hi } => vec![hi, lo],
        _ => Vec::new(),
    };
    PhaseCandidates {
        mu_unconstrained: stationary_angles(t).ok(),
        mu_boundary,
        feasibility,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateKind {
    Current,
    Maximizer,
    Minimizer,
    Boundary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementUpdate {
    pub v_m: C64,
    pub kind: CandidateKind,
    /// Exact `||h_r||^2 |h_t^H w|^2` at the chosen phase.
    pub sensing_gain: f64,
    /// Exact `|h_c^H w|^2` at the chosen phase.
    pub comm_power: f64,
    pub feasibility: FeasibleSet,
}

fn score(t: &PerElementTerms, mu: f64, w: &ComplexVector) -> (f64, f64) {
    let h: EffectiveChannels = t.channels_at(mu);
    (sensing_snr(&h.h_t, &h.h_r, w, 1.0), comm_snr(&h.h_c, w, 1.0))
}

/// Best feasible phase for one element among the closed-form candidates and
/// the current phase, scored by the exact sensing SNR.
pub fn choose_phase(t: &PerElementTerms, w: &ComplexVector, gamma0: f64, sigma_c2: f64) -> ElementUpdate {
    let cands = phase_candidates(t, gamma0, sigma_c2);
    let floor = gamma0 * sigma_c2 * (1.0 - FEASIBILITY_SLACK);
    let current = wrap(t.v_m.arg());
    let (s0, c0) = score(t, current, w);
    let mut best = (CandidateKind::Current, current, s0, c0);

    let mut pool: Vec<(CandidateKind, f64)> = Vec::with_capacity(4);
    if let Some((mx, mn)) = cands.mu_unconstrained {
        pool.push((CandidateKind::Maximizer, mx));
        pool.push((CandidateKind::Minimizer, mn));
    }
    pool.extend(cands.mu_boundary.iter().map(|&mu| (CandidateKind::Boundary, mu)));

    for (kind, mu) in pool {
        let (s, c) = score(t, mu, w);
        if c >= floor && s > best.2 {
            best = (kind, mu, s, c);
        }
    }
    let v_m = if best.0 == CandidateKind::Current {
        t.v_m
    } else {
        C64::from_polar(1.0, best.1)
    };
    ElementUpdate {
        v_m,
        kind: best.0,
        sensing_gain: best.2,
        comm_power: best.3,
        feasibility: cands.feasibility,
    }
}

/// Updates `v_m` (0-based `m`) for a fixed beamformer `w`.
pub fn optimize_element(
    ch: &ChannelSet,
    v: &PhaseConfig,
    m: usize,
    w: &ComplexVector,
    gamma0: f64,
    sigma_c2: f64,
) -> Result<ElementUpdate> {
    let t = crate::channel::decompose_element(ch, v, m, w)?;
    Ok(choose_phase(&t, w, gamma0, sigma_c2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AoTrace {
    /// Sensing SNR after every accepted update, starting from the first
    /// beamformer update.
    pub snr_s: Vec<f64>,
    pub snr_c: Vec<f64>,
    pub outer_iterations: usize,
    pub inner_sweeps: usize,
    pub element_updates: usize,
    pub converged: bool,
}

fn channels_from_sums(ch: &ChannelSet, sums: &CascadeSums) -> EffectiveChannels {
    let mix = |alpha: C64, a: &ComplexVector, s: &[C64]| {
        ComplexVector::new(a.iter().zip(s).map(|(a, s)| alpha * (a + s)).collect())
    };
    EffectiveChannels {
        h_t: mix(ch.alpha_t, &ch.a_t, &sums.t),
        h_r: mix(ch.alpha_r, &ch.a_r, &sums.r),
        h_c: mix(C64::new(1.0, 0.0), &ch.h_bu, &sums.c),
    }
}

/// Aligns each element in turn with the user channel to maximize `||h_c||^2`.
fn restore_feasibility(ch: &ChannelSet, v: &mut PhaseConfig, sums: &mut CascadeSums) {
    for m in 0..ch.m_ris() {
        let u = ch.u_c.column(m);
        let old = v.as_slice()[m];
        let tilde: Vec<C64> = ch
            .h_bu
            .iter()
            .zip(&sums.c)
            .zip(u.iter())
            .map(|((a, s), u)| a + s - old * u)
            .collect();
        let coupling = dot_h(&tilde, u.as_slice());
        if coupling.norm() == 0.0 {
            continue;
        }
        v.set_angle(m, -coupling.arg());
        sums.update(ch, m, old, v.as_slice()[m]);
    }
}

/// Alternating optimization from a given starting phase vector.
pub fn run_gain_max_from(
    ch: &ChannelSet,
    budget: &LinkBudget,
    params: &AoParams,
    v0: PhaseConfig,
) -> Result<(ComplexVector, PhaseConfig, AoTrace)> {
    params.validate()?;
    check_len(ch.m_ris(), v0.len())?;
    let p_t = budget.tx_power_w;
    let need = budget.gamma0 * budget.noise_c_w;
    let mut v = v0;
    let mut sums = CascadeSums::new(ch, &v);

    if need > p_t * channels_from_sums(ch, &sums).h_c.norm2() * (1.0 + FEASIBILITY_SLACK) {
        restore_feasibility(ch, &mut v, &mut sums);
    }

    let mut trace = AoTrace {
        snr_s: Vec::new(),
        snr_c: Vec::new(),
        outer_iterations: 0,
        inner_sweeps: 0,
        element_updates: 0,
        converged: false,
    };
    let record = |trace: &mut AoTrace, gain: f64, comm: f64| {
        trace.snr_s.push(gain / budget.noise_s_w);
        trace.snr_c.push(comm / budget.noise_c_w);
    };
    let beamform = |sums: &CascadeSums| -> Result<(ComplexVector, f64, f64)> {
        let h = channels_from_sums(ch, sums);
        let bf = optimal_beamformer(&h.h_t, &h.h_c, p_t, budget.gamma0, budget.noise_c_w)?;
        let gain = sensing_snr(&h.h_t, &h.h_r, &bf.w, 1.0);
        let comm = comm_snr(&h.h_c, &bf.w, 1.0);
        Ok((bf.w, gain, comm))
    };

    let (mut w, mut gain, comm) = beamform(&sums)?;
    record(&mut trace, gain, comm);
    let mut prev_outer = gain;

    for _ in 0..params.outer_max {
        trace.outer_iterations += 1;
        if trace.outer_iterations > 1 {
            let (nw, g, c) = beamform(&sums)?;
            w = nw;
            gain = g;
            record(&mut trace, g, c);
        }

        let mut prev_sweep = gain;
        for _ in 0..params.inner_max {
            trace.inner_sweeps += 1;
            for m in 0..ch.m_ris() {
                let t = decompose_with_sums(ch, &v, &sums, m, &w);
                let up = choose_phase(&t, &w, budget.gamma0, budget.noise_c_w);
                trace.element_updates += 1;
                if up.kind != CandidateKind::Current {
                    let old = v.as_slice()[m];
                    v.set_angle(m, up.v_m.arg());
                    sums.update(ch, m, old, v.as_slice()[m]);
                }
                gain = up.sensing_gain;
                record(&mut trace, up.sensing_gain, up.comm_power);
            }
            let settled = (gain - prev_sweep).abs() <= params.inner_tol * prev_sweep.abs();
            prev_sweep = gain;
            if settled {
                break;
            }
        }

        if (gain - prev_outer).abs() <= params.outer_tol * prev_outer.abs() {
            trace.converged = true;
            break;
        }
        prev_outer = gain;
    }

    // the last sweep moved v after w was chosen
    let (w_final, g, c) = beamform(&sums)?;
    record(&mut trace, g, c);
    Ok((w_final, v, trace))
}

pub fn run_gain_max_on(
    ch: &ChannelSet,
    budget: &LinkBudget,
    params: &AoParams,
    rng: &mut SeededRng,
) -> Result<(ComplexVector, PhaseConfig, AoTrace)> {
    let v0 = PhaseConfig::random(ch.m_ris(), rng);
    run_gain_max_from(ch, budget, params, v0)
}

pub fn solve_gain_max(
    ch: &ChannelSet,
    budget: &LinkBudget,
    params: &AoParams,
    rng: &mut SeededRng,
) -> Result<SolveReport> {
    let start = Instant::now();
    let (w, v, trace) = run_gain_max_on(ch, budget, params, rng)?;
    let h = assemble_h(ch, &v)?;
    let metrics = Metrics::evaluate(&h, &w, budget);
    let wall_time = start.elapsed();
    Ok(SolveReport {
        scheme: Scheme::Benchmark,
        w,
        phases: Some(v),
        channels: h,
        metrics,
        objective_trace: trace.snr_s,
        constraint_trace: trace.snr_c,
        iterations: trace.outer_iterations,
        converged: trace.converged,
        wall_time,
    })
}

/// Builds the scenario's channels from `rng` and runs the benchmark.
pub fn run_gain_max(sc: &Scenario, params: &AoParams, rng: &mut SeededRng) -> Result<SolveReport> {
    let ch = build_channels(sc, &mut rng.child(CHANNEL_STREAM))?;
    solve_gain_max(&ch, &sc.link_budget(), params, &mut rng.child(GAIN_MAX_INIT_STREAM))
}
