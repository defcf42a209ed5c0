//! Subspace rotation and expansion.
//!
//! Picks RIS phases that maximize `||h_r||^2 |h_t^H h_c|^2`, which grows both
//! the channel gains and the alignment between the sensing and communication
//! channels, independently of any beamformer. We minimize
//! `f(v) = -||h_r(v)||^2 |h_t(v)^H h_c(v)|^2` over the torus `|v_m| = 1` by
//! projected gradient descent with Armijo backtracking; the optimal
//! beamformer is computed afterwards on the rotated channels.
//!
//! Gradients are Wirtinger row gradients `g = df/dv` (with `v^*` held fixed),
//! so `f(v + d) = f(v) + 2 Re{g d} + O(|d|^2)` and the steepest-descent
//! direction is `-g^H`.

use std::time::Instant;

use crate::beamforming::{optimal_beamformer, Metrics};
use crate::channel::{assemble_h, build_channels, ChannelSet, PhaseConfig};
use crate::error::{Error, Result};
use crate::linalg::{check_len, dot_h, ComplexVector, C64};
use crate::rng::SeededRng;
use crate::scenario::{LinkBudget, Scenario};
use crate::solve::{Scheme, SolveReport, CHANNEL_STREAM, SRE_INIT_STREAM};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SreParams {
    pub max_iters: usize,
    /// Stop when `|f_k - f_{k-1}| < tol * |f_{k-1}|`.
    pub tol: f64,
    /// Armijo sufficient-decrease constant.
    pub bt_alpha: f64,
    /// Backtracking shrink factor.
    pub bt_beta: f64,
    /// First trial step, as the largest per-element move in radians.
    pub init_step: f64,
}

impl Default for SreParams {
    fn default() -> Self {
        Self {
            max_iters: 500,
            tol: 1e-8,
            bt_alpha: 0.3,
            bt_beta: 0.5,
            init_step: 1.0,
        }
    }
}

impl SreParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.max_iters == 0 {
            return bad("max_iters must be positive");
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return bad("tol must be positive");
        }
        if !(self.bt_alpha > 0.0 && self.bt_alpha < 0.5) {
            return bad("bt_alpha must lie in (0, 0.5)");
        }
        if !(self.bt_beta > 0.0 && self.bt_beta < 1.0) {
            return bad("bt_beta must lie in (0, 1)");
        }
        if self.init_step.is_nan() || self.init_step <= 0.0 {
            return bad("init_step must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SreTrace {
    /// `f` at the initial point followed by every accepted iterate.
    pub objective: Vec<f64>,
    /// Accepted step sizes, one per accepted iterate.
    pub steps: Vec<f64>,
    pub v: PhaseConfig,
    pub converged: bool,
    /// Gradient evaluations performed.
    pub iterations: usize,
}

/// `-||h_r||^2 |h_t^H h_c|^2`.
pub fn sre_objective(ch: &ChannelSet, v: &PhaseConfig) -> Result<f64> {
    let h = assemble_h(ch, v)?;
    let cross = dot_h(h.h_t.as_slice(), h.h_c.as_slice());
    Ok(-h.h_r.norm2() * cross.norm_sqr())
}

/// Row gradient `df/dv` by the product rule over
/// `f0 = -||h_r||^2`, `f1 = h_t^H h_c`, `f2 = h_c^H h_t`:
///
/// ```text
/// grad f  = f0 f1 grad f2 + f1 f2 grad f0 + f2 f0 grad f1
/// grad f0 = -|alpha_r|^2 (a_r^H U_r + v^H U_r^H U_r) = -alpha_r h_r^H U_r
/// grad f1 =  alpha_t^*  (a_t^H U_c + v^H U_t^H U_c) = h_t^H U_c
/// grad f2 =  alpha_t  (h_bu^H U_t + v^H U_c^H U_t) = alpha_t h_c^H U_t
/// ```
pub fn sre_gradient(ch: &ChannelSet, v: &PhaseConfig) -> Result<ComplexVector> {
    check_len(ch.m_ris(), v.len())?;
    let h = assemble_h(ch, v)?;
    let f0 = -h.h_r.norm2();
    let f1 = dot_h(h.h_t.as_slice(), h.h_c.as_slice());
    let f2 = f1.conj();
    let g0 = ch.u_r.hermitian_vecmat(&h.h_r)?.scale(-ch.alpha_r);
    let g1 = ch.u_c.hermitian_vecmat(&h.h_t)?;
    let g2 = ch.u_t.hermitian_vecmat(&h.h_c)?.scale(ch.alpha_t);
    let c2 = f1 * f0;
    let c0 = f1 * f2;
    let c1 = f2 * f0;
    Ok(ComplexVector::new(
        g0.iter()
            .zip(g1.iter())
            .zip(g2.iter())
            .map(|((a, b), c)| c0 * a + c1 * b + c2 * c)
            .collect(),
    ))
}

/// Descent direction `-g^H` with the radial part at each `v_m` removed.
pub fn tangent_descent(grad: &ComplexVector, v: &PhaseConfig) -> Vec<C64> {
    grad.iter()
        .zip(v.as_slice())
        .map(|(g, vm)| {
            let d = -g.conj();
            d - vm * (d * vm.conj()).re
        })
        .collect()
}

/// Norm of the Riemannian gradient on the torus.
pub fn riemannian_grad_norm(grad: &ComplexVector, v: &PhaseConfig) -> f64 {
    tangent_descent(grad, v)
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Projected gradient descent from `v0`.
pub fn run_sre_from(ch: &ChannelSet, params: &SreParams, v0: PhaseConfig) -> Result<(PhaseConfig, SreTrace)> {
    params.validate()?;
    check_len(ch.m_ris(), v0.len())?;
    let mut v = v0;
    let mut f = sre_objective(ch, &v)?;
    let mut trace = SreTrace {
        objective: vec![f],
        steps: Vec::new(),
        v: v.clone(),
        converged: false,
        iterations: 0,
    };

    for _ in 0..params.max_iters {
        trace.iterations += 1;
        let g = sre_gradient(ch, &v)?;
        let dir: Vec<C64> = g.iter().map(|z| -z.conj()).collect();
        let tangent = tangent_descent(&g, &v);
        let tan2: f64 = tangent.iter().map(|z| z.norm_sqr()).sum();
        let biggest = tangent.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if tan2 == 0.0 || biggest <= f64::EPSILON * g.norm() {
            trace.converged = true;
            break;
        }

        let mut step = params.init_step / biggest;
        let min_step = 1e-15 * step;
        let mut accepted = None;
        while step >= min_step {
            let cand = PhaseConfig::project(
                &v.as_slice()
                    .iter()
                    .zip(&dir)
                    .map(|(vm, d)| vm + step * d)
                    .collect::<Vec<_>>(),
            );
            let fc = sre_objective(ch, &cand)?;
            if fc <= f - params.bt_alpha * step * tan2 {
                accepted = Some((cand, fc));
                break;
            }
            step *= params.bt_beta;
        }
        let Some((cand, fc)) = accepted else {
            // no step gives sufficient decrease at working precision
            trace.converged = true;
            break;
        };

        let change = (fc - f).abs();
        let scale = f.abs();
        v = cand;
        f = fc;
        trace.objective.push(f);
        trace.steps.push(step);
        if change < params.tol * scale {
            trace.converged = true;
            break;
        }
    }

    trace.v = v.clone();
    Ok((v, trace))
}

/// Random start, then projected gradient descent.
pub fn run_sre(ch: &ChannelSet, params: &SreParams, rng: &mut SeededRng) -> Result<(PhaseConfig, SreTrace)> {
    let v0 = PhaseConfig::random(ch.m_ris(), rng);
    run_sre_from(ch, params, v0)
}

/// Rotates the channels, then applies the optimal beamformer to them.
pub fn solve_sre(ch: &ChannelSet, budget: &LinkBudget, params: &SreParams, rng: &mut SeededRng) -> Result<SolveReport> {
    let start = Instant::now();
    let (v, trace) = run_sre(ch, params, rng)?;
    let h = assemble_h(ch, &v)?;
    let bf = optimal_beamformer(&h.h_t, &h.h_c, budget.tx_power_w, budget.gamma0, budget.noise_c_w)?;
    let metrics = Metrics::evaluate(&h, &bf.w, budget);
    let wall_time = start.elapsed();
    Ok(SolveReport {
        scheme: Scheme::Sre,
        w: bf.w,
        phases: Some(v),
        channels: h,
        metrics,
        objective_trace: trace.objective,
        constraint_trace: Vec::new(),
        iterations: trace.iterations,
        converged: trace.converged,
        wall_time,
    })
}

/// Builds the scenario's channels from its seed and solves.
pub fn sre_solve_full(sc: &Scenario, params: &SreParams) -> Result<SolveReport> {
    let root = SeededRng::new(sc.seed);
    let ch = build_channels(sc, &mut root.child(CHANNEL_STREAM))?;
    solve_sre(&ch, &sc.link_budget(), params, &mut root.child(SRE_INIT_STREAM))
}
