//! SNR metrics and the optimal single-user ISAC beamformer.
//!
//! For fixed channels the beamformer that maximizes the sensing SNR subject
//! to `SNR_c >= gamma0` and `||w||^2 <= P_t` lies in `span{h_c, h_t}`. When
//! pointing all power at the target already satisfies the user, that is the
//! answer. Otherwise the user gets exactly the power it needs along
//! `u1 = h_c / ||h_c||` and the rest goes to the component of `h_t`
//! orthogonal to `u1`.

use crate::channel::EffectiveChannels;
use crate::error::{Error, Result};
use crate::linalg::{check_len, dot_h, ComplexVector, C64};
use crate::scenario::LinkBudget;

/// Relative slack applied to power and SNR constraints.
pub const FEASIBILITY_SLACK: f64 = 1e-9;

/// Zero-phase convention: `phase(0) = 1`.
fn phase(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        z / r
    }
}

/// `||h_r||^2 |h_t^H w|^2 / sigma_s2`, i.e. `||h_r^* h_t^H w||^2 / sigma_s2`.
pub fn sensing_snr(h_t: &ComplexVector, h_r: &ComplexVector, w: &ComplexVector, sigma_s2: f64) -> f64 {
    debug_assert_eq!(h_t.len(), w.len());
    h_r.norm2() * dot_h(h_t.as_slice(), w.as_slice()).norm_sqr() / sigma_s2
}

/// `|h_c^H w|^2 / sigma_c2`.
pub fn comm_snr(h_c: &ComplexVector, w: &ComplexVector, sigma_c2: f64) -> f64 {
    debug_assert_eq!(h_c.len(), w.len());
    dot_h(h_c.as_slice(), w.as_slice()).norm_sqr() / sigma_c2
}

/// `rho = h_c^H h_t / (||h_c|| ||h_t||)`.
pub fn correlation(h_c: &ComplexVector, h_t: &ComplexVector) -> Result<C64> {
    check_len(h_c.len(), h_t.len())?;
    let den = h_c.norm() * h_t.norm();
    if den == 0.0 {
        return Err(Error::ZeroChannel);
    }
    Ok(dot_h(h_c.as_slice(), h_t.as_slice()) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamformerCase {
    /// All power along `h_t`; the user constraint is slack.
    SensingAligned,
    /// Power split between `u1` and `u2`; the user constraint is active.
    Split,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    pub w: ComplexVector,
    pub power_budget: f64,
    pub case: BeamformerCase,
}

/// Closed-form maximizer of the sensing SNR under the user SNR constraint.
pub fn optimal_beamformer(
    h_t: &ComplexVector,
    h_c: &ComplexVector,
    p_t: f64,
    gamma0: f64,
    sigma_c2: f64,
) -> Result<Beamformer> {
    check_len(h_t.len(), h_c.len())?;
    if p_t.is_nan() || p_t <= 0.0 {
        return Err(Error::InvalidParameter(format!("power budget {p_t} must be positive")));
    }
    let ht2 = h_t.norm2();
    let hc2 = h_c.norm2();
    if ht2 == 0.0 || hc2 == 0.0 {
        return Err(Error::ZeroChannel);
    }
    let required = gamma0 * sigma_c2;
    if required > p_t * hc2 * (1.0 + FEASIBILITY_SLACK) {
        return Err(Error::Infeasible {
            required,
            achievable: p_t * hc2,
        });
    }

    let cross = dot_h(h_c.as_slice(), h_t.as_slice()).norm_sqr();
    if p_t * cross >= required * ht2 * (1.0 - FEASIBILITY_SLACK) {
        return Ok(Beamformer {
            w: h_t.scale(C64::new((p_t / ht2).sqrt(), 0.0)),
            power_budget: p_t,
            case: BeamformerCase::SensingAligned,
        });
    }

    let hc_norm = hc2.sqrt();
    let u1 = h_c.scale(C64::new(1.0 / hc_norm, 0.0));
    let proj = dot_h(u1.as_slice(), h_t.as_slice());
    let rem = h_t.axpy(-proj, &u1)?;
    let rem_norm = rem.norm();
    if rem_norm <= 1e-12 * ht2.sqrt() {
        return Err(Error::DegenerateSpan);
    }
    let u2 = rem.scale(C64::new(1.0 / rem_norm, 0.0));

    let p1 = (required / hc2).min(p_t);
    let x1 = phase(proj) * p1.sqrt();
    let x2 = phase(dot_h(u2.as_slice(), h_t.as_slice())) * (p_t - p1).max(0.0).sqrt();
    Ok(Beamformer {
        w: u1.scale(x1).axpy(x2, &u2)?,
        power_budget: p_t,
        case: BeamformerCase::Split,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub snr_s: f64,
    pub snr_c: f64,
    pub rho_abs: f64,
    pub rate_bps_hz: f64,
}

impl Metrics {
    pub fn evaluate(h: &EffectiveChannels, w: &ComplexVector, budget: &LinkBudget) -> Metrics {
        let snr_c = comm_snr(&h.h_c, w, budget.noise_c_w);
        Metrics {
            snr_s: sensing_snr(&h.h_t, &h.h_r, w, budget.noise_s_w),
            snr_c,
            rho_abs: correlation(&h.h_c, &h.h_t).map_or(0.0, |r| r.norm().min(1.0)),
            rate_bps_hz: (1.0 + snr_c).log2(),
        }
    }
}

/// Channel summaries that determine the optimal-beamformer SNRs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeInputs {
    pub h_t_norm: f64,
    pub h_r_norm: f64,
    pub h_c_norm: f64,
    pub rho_abs: f64,
    pub p_t: f64,
    pub gamma0: f64,
    pub sigma_s2: f64,
    pub sigma_c2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    Strong,
    Weak,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimePrediction {
    pub coupling: Coupling,
    pub snr_s: f64,
    pub snr_c: f64,
}

impl RegimeInputs {
    pub fn from_channels(h: &EffectiveChannels, budget: &LinkBudget) -> Result<Self> {
        Ok(Self {
            h_t_norm: h.h_t.norm(),
            h_r_norm: h.h_r.norm(),
            h_c_norm: h.h_c.norm(),
            rho_abs: correlation(&h.h_c, &h.h_t)?.norm().min(1.0),
            p_t: budget.tx_power_w,
            gamma0: budget.gamma0,
            sigma_s2: budget.noise_s_w,
            sigma_c2: budget.noise_c_w,
        })
    }

    /// `|rho|` above which pointing at the target alone satisfies the user.
    pub fn coupling_threshold(&self) -> f64 {
        (self.gamma0 * self.sigma_c2 / (self.p_t * self.h_c_norm * self.h_c_norm)).sqrt()
    }
}

/// Optimal-beamformer SNRs predicted from `(||h_t||, ||h_c||, |rho|)` alone.
///
/// Weakly coupled: the target amplitude is the sum of the parts reaching it
/// through `u1` (`|rho| ||h_t||`) and through `u2` (`sqrt(1 - |rho|^2) ||h_t||`).
pub fn correlation_regime_prediction(x: &RegimeInputs) -> RegimePrediction {
    let hc2 = x.h_c_norm * x.h_c_norm;
    let ht2 = x.h_t_norm * x.h_t_norm;
    let rho = x.rho_abs.clamp(0.0, 1.0);
    let gain_r = x.h_r_norm * x.h_r_norm / x.sigma_s2;
    let required = x.gamma0 * x.sigma_c2;
    if rho >= 1.0 || x.p_t * hc2 * rho * rho >= required * (1.0 - FEASIBILITY_SLACK) {
        return RegimePrediction {
            coupling: Coupling::Strong,
            snr_s: gain_r * x.p_t * ht2,
            snr_c: x.p_t * hc2 * rho * rho / x.sigma_c2,
        };
    }
    let p1 = (required / hc2).min(x.p_t);
    let amp = p1.sqrt() * rho * x.h_t_norm + (x.p_t - p1).max(0.0).sqrt() * x.h_t_norm * (1.0 - rho * rho).sqrt();
    RegimePrediction {
        coupling: Coupling::Weak,
        snr_s: gain_r * amp * amp,
        snr_c: x.gamma0,
    }
}
