//! Channel synthesis for a BS / RIS / target / user scene.
//!
//! The BS sees the target through a direct path and a path bounced off the
//! RIS. With `v` the RIS phase vector,
//!
//! ```text
//! h_t = alpha_t (a_t + U_t v)      U_t = G_t DIAG(b_tilde)
//! h_r = alpha_r (a_r + U_r v)      U_r = G_r DIAG(b_bar)
//! h_c = h_bu + U_c v               U_c = G_t DIAG(h_ru)
//! ```
//!
//! with `b_tilde = (alpha_g / alpha_t) b` and `b_bar = (alpha_g / alpha_r) b`,
//! so the factored forms above equal `alpha_t a_t + alpha_g G_t DIAG(v) b` and
//! its receive counterpart exactly.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::linalg::{check_len, dot_h, ComplexMatrix, ComplexVector, C64};
use crate::rng::SeededRng;
use crate::scenario::{distance, Point, Scenario};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Half-wavelength ULA response; entry k is `exp(j pi k sin(angle))`.
pub fn steering_vector(n: usize, angle: f64) -> ComplexVector {
    let step = PI * angle.sin();
    ComplexVector::new((0..n).map(|k| C64::from_polar(1.0, step * k as f64)).collect())
}

/// Angle of `point` seen from an array at `origin` whose normal points at
/// `normal` radians, wrapped to (-pi, pi].
pub fn arrival_angle(origin: Point, normal: f64, point: Point) -> f64 {
    let raw = (point[1] - origin[1]).atan2(point[0] - origin[0]) - normal;
    let wrapped = (raw + PI).rem_euclid(TAU) - PI;
    if wrapped <= -PI {
        wrapped + TAU
    } else {
        wrapped
    }
}

/// Free-space one-way amplitude gain `lambda / (4 pi d)`.
pub fn free_space_gain(wavelength: f64, d: f64) -> f64 {
    wavelength / (4.0 * PI * d)
}

/// RIS phase vector `v = diag(Phi)`; every entry has unit modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfig(Vec<C64>);

pub const UNIT_MODULUS_TOL: f64 = 1e-12;

impl PhaseConfig {
    pub fn new(v: Vec<C64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::InvalidParameter("phase vector is empty".into()));
        }
        if let Some((m, z)) = v
            .iter()
            .enumerate()
            .find(|(_, z)| (z.norm() - 1.0).abs() >= UNIT_MODULUS_TOL || z.is_nan())
        {
            return Err(Error::InvalidParameter(format!("phase {m} has modulus {}", z.norm())));
        }
        Ok(Self(v))
    }

    pub fn ones(m: usize) -> Self {
        Self(vec![C64::new(1.0, 0.0); m])
    }

    pub fn from_angles(angles: &[f64]) -> Self {
        Self(angles.iter().map(|&a| C64::from_polar(1.0, a)).collect())
    }

    /// Uniform random phases on `[0, 2pi)`.
    pub fn random(m: usize, rng: &mut SeededRng) -> Self {
        Self(rng.unit_phases(m))
    }

    /// Entrywise `z / |z|`; exact zeros map to 1.
    pub fn project(raw: &[C64]) -> Self {
        Self(raw.iter().map(|&z| project_entry(z)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn to_vector(&self) -> ComplexVector {
        ComplexVector::new(self.0.clone())
    }

    pub fn angle(&self, m: usize) -> f64 {
        self.0[m].arg().rem_euclid(TAU)
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.len()).map(|m| self.angle(m)).collect()
    }

    pub fn set_angle(&mut self, m: usize, mu: f64) {
        self.0[m] = C64::from_polar(1.0, mu);
    }

    pub fn max_modulus_error(&self) -> f64 {
        self.0.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max)
    }
}

pub(crate) fn project_entry(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 || !r.is_finite() {
        C64::new(1.0, 0.0)
    } else if (r - 1.0).abs() < 1e-15 {
        z
    } else {
        z / r
    }
}

/// All channel pieces for one realization, plus the cascades `U_t, U_r, U_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub a_t: ComplexVector,
    pub a_r: ComplexVector,
    pub alpha_t: C64,
    pub alpha_r: C64,
    pub alpha_g: C64,
    /// RIS-to-target steering vector before normalization.
    pub b: ComplexVector,
    pub b_tilde: ComplexVector,
    pub b_bar: ComplexVector,
    pub g_t: ComplexMatrix,
    pub g_r: ComplexMatrix,
    pub h_bu: ComplexVector,
    pub h_ru: ComplexVector,
    pub u_t: ComplexMatrix,
    pub u_r: ComplexMatrix,
    pub u_c: ComplexMatrix,
}

/// Effective channels for one phase configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannels {
    pub h_t: ComplexVector,
    pub h_r: ComplexVector,
    pub h_c: ComplexVector,
}

fn ratio(num: C64, den: C64) -> C64 {
    if den == ZERO {
        ZERO
    } else {
        num / den
    }
}

impl ChannelSet {
    /// Assembles a channel set from its physical pieces. A zero `alpha_t`
    /// (or `alpha_r`) zeroes the matching normalized RIS vector, since the
    /// factored form forces the whole channel to zero anyway.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        a_t: ComplexVector,
        a_r: ComplexVector,
        alpha_t: C64,
        alpha_r: C64,
        alpha_g: C64,
        b: ComplexVector,
        g_t: ComplexMatrix,
        g_r: ComplexMatrix,
        h_bu: ComplexVector,
        h_ru: ComplexVector,
    ) -> Result<Self> {
        let m = b.len();
        check_len(a_t.len(), g_t.rows())?;
        check_len(a_r.len(), g_r.rows())?;
        check_len(m, g_t.cols())?;
        check_len(m, g_r.cols())?;
        check_len(a_t.len(), h_bu.len())?;
        check_len(m, h_ru.len())?;
        let b_tilde = b.scale(ratio(alpha_g, alpha_t));
        let b_bar = b.scale(ratio(alpha_g, alpha_r));
        let u_t = g_t.mul_diag(&b_tilde)?;
        let u_r = g_r.mul_diag(&b_bar)?;
        let u_c = g_t.mul_diag(&h_ru)?;
        Ok(Self {
            a_t,
            a_r,
            alpha_t,
            alpha_r,
            alpha_g,
            b,
            b_tilde,
            b_bar,
            g_t,
            g_r,
            h_bu,
            h_ru,
            u_t,
            u_r,
            u_c,
        })
    }

    pub fn n_tx(&self) -> usize {
        self.a_t.len()
    }

    pub fn n_rx(&self) -> usize {
        self.a_r.len()
    }

    pub fn m_ris(&self) -> usize {
        self.b.len()
    }

    /// Same scene with the RIS removed from every path (`alpha_g = 0`,
    /// `h_ru = 0`).
    pub fn ris_disconnected(&self) -> ChannelSet {
        let m = self.m_ris();
        ChannelSet::from_parts(
            self.a_t.clone(),
            self.a_r.clone(),
            self.alpha_t,
            self.alpha_r,
            ZERO,
            self.b.clone(),
            self.g_t.clone(),
            self.g_r.clone(),
            self.h_bu.clone(),
            ComplexVector::zeros(m),
        )
        .expect("dimensions already validated")
    }

    /// Every path gain multiplied by `c`; all three effective channels scale
    /// by `c`.
    pub fn scaled(&self, c: f64) -> ChannelSet {
        let c = C64::new(c, 0.0);
        ChannelSet::from_parts(
            self.a_t.clone(),
            self.a_r.clone(),
            self.alpha_t * c,
            self.alpha_r * c,
            self.alpha_g * c,
            self.b.clone(),
            self.g_t.clone(),
            self.g_r.clone(),
            self.h_bu.scale(c),
            self.h_ru.scale(c),
        )
        .expect("dimensions already validated")
    }

    /// Channels without any RIS contribution: `alpha_t a_t`, `alpha_r a_r`,
    /// `h_bu`.
    pub fn direct_only(&self) -> EffectiveChannels {
        EffectiveChannels {
            h_t: self.a_t.scale(self.alpha_t),
            h_r: self.a_r.scale(self.alpha_r),
            h_c: self.h_bu.clone(),
        }
    }

    pub fn is_finite(&self) -> bool {
        [&self.a_t, &self.a_r, &self.b_tilde, &self.b_bar, &self.h_bu, &self.h_ru]
            .iter()
            .all(|v| v.is_finite())
            && [&self.u_t, &self.u_r, &self.u_c, &self.g_t, &self.g_r]
                .iter()
                .all(|m| m.is_finite())
            && [self.alpha_t, self.alpha_r, self.alpha_g].iter().all(|z| z.is_finite())
    }
}

/// Synthesizes a channel realization: deterministic line-of-sight geometry
/// for the sensing and BS-RIS links, Rayleigh draws for the two user links.
pub fn build_channels(sc: &Scenario, rng: &mut SeededRng) -> Result<ChannelSet> {
    sc.validate()?;
    let lambda = sc.wavelength();
    let bs_normal = sc.bs_normal_deg.to_radians();
    let ris_normal = sc.ris_normal_deg.to_radians();

    let theta = arrival_angle(sc.bs_pos, bs_normal, sc.target_pos);
    let phi = arrival_angle(sc.ris_pos, ris_normal, sc.target_pos);
    let theta_ris = arrival_angle(sc.bs_pos, bs_normal, sc.ris_pos);
    let phi_bs = arrival_angle(sc.ris_pos, ris_normal, sc.bs_pos);

    let a_t = steering_vector(sc.n_tx, theta);
    let a_r = steering_vector(sc.n_rx, theta);
    let b = steering_vector(sc.m_ris, phi);

    let alpha_t = C64::new(free_space_gain(lambda, distance(sc.bs_pos, sc.target_pos)), 0.0);
    let alpha_r = alpha_t;
    let alpha_g = C64::new(free_space_gain(lambda, distance(sc.ris_pos, sc.target_pos)), 0.0);

    let g_br = C64::new(free_space_gain(lambda, distance(sc.bs_pos, sc.ris_pos)), 0.0);
    let ris_side = steering_vector(sc.m_ris, phi_bs);
    let g_t = ComplexMatrix::outer(&steering_vector(sc.n_tx, theta_ris), &ris_side).scale(g_br);
    let g_r = ComplexMatrix::outer(&steering_vector(sc.n_rx, theta_ris), &ris_side).scale(g_br);

    let g1 = free_space_gain(lambda, 1.0);
    let amp_bu = g1 * distance(sc.bs_pos, sc.ue_pos).powf(-sc.pathloss_exp_bu / 2.0);
    let amp_ru = g1 * distance(sc.ris_pos, sc.ue_pos).powf(-sc.pathloss_exp_ru / 2.0);
    let h_bu = rng.sample_cn01(sc.n_tx).scale(C64::new(amp_bu, 0.0));
    let h_ru = rng.sample_cn01(sc.m_ris).scale(C64::new(amp_ru, 0.0));

    ChannelSet::from_parts(a_t, a_r, alpha_t, alpha_r, alpha_g, b, g_t, g_r, h_bu, h_ru)
}

fn cascade_apply(u: &ComplexMatrix, v: &[C64]) -> Vec<C64> {
    (0..u.rows())
        .map(|i| u.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// `(h_t, h_r, h_c)` from the factored cascade form.
pub fn assemble_h(ch: &ChannelSet, v: &PhaseConfig) -> Result<EffectiveChannels> {
    check_len(ch.m_ris(), v.len())?;
    let v = v.as_slice();
    let st = cascade_apply(&ch.u_t, v);
    let sr = cascade_apply(&ch.u_r, v);
    let sc = cascade_apply(&ch.u_c, v);
    Ok(EffectiveChannels {
        h_t: ComplexVector::new(ch.a_t.iter().zip(&st).map(|(a, s)| ch.alpha_t * (a + s)).collect()),
        h_r: ComplexVector::new(ch.a_r.iter().zip(&sr).map(|(a, s)| ch.alpha_r * (a + s)).collect()),
        h_c: ComplexVector::new(ch.h_bu.iter().zip(&sc).map(|(a, s)| a + s).collect()),
    })
}

/// Reference evaluation of the unfactored model with an explicit diagonal
/// `Phi = DIAG(v)`: `alpha_t a_t + alpha_g G_t Phi b`, etc.
pub fn direct_channels(ch: &ChannelSet, v: &PhaseConfig) -> Result<EffectiveChannels> {
    check_len(ch.m_ris(), v.len())?;
    let phi = ComplexMatrix::diag(&v.to_vector());
    let phi_b = phi.matvec(&ch.b)?;
    let h_t = ch
        .a_t
        .scale(ch.alpha_t)
        .add(&ch.g_t.matvec(&phi_b)?.scale(ch.alpha_g))?;
    let h_r = ch
        .a_r
        .scale(ch.alpha_r)
        .add(&ch.g_r.matvec(&phi_b)?.scale(ch.alpha_g))?;
    let h_c = ch.h_bu.add(&ch.g_t.matmul(&phi)?.matvec(&ch.h_ru)?)?;
    Ok(EffectiveChannels { h_t, h_r, h_c })
}

/// Running sums `U_j v` for the three cascades.
#[derive(Debug, Clone)]
pub(crate) struct CascadeSums {
    pub t: Vec<C64>,
    pub r: Vec<C64>,
    pub c: Vec<C64>,
}

impl CascadeSums {
    pub fn new(ch: &ChannelSet, v: &PhaseConfig) -> Self {
        Self {
            t: cascade_apply(&ch.u_t, v.as_slice()),
            r: cascade_apply(&ch.u_r, v.as_slice()),
            c: cascade_apply(&ch.u_c, v.as_slice()),
        }
    }

    /// Applies `v_m: old -> new` to all three sums.
    pub fn update(&mut self, ch: &ChannelSet, m: usize, old: C64, new: C64) {
        let d = new - old;
        for (i, s) in self.t.iter_mut().enumerate() {
            *s += d * ch.u_t.get(i, m);
        }
        for (i, s) in self.r.iter_mut().enumerate() {
            *s += d * ch.u_r.get(i, m);
        }
        for (i, s) in self.c.iter_mut().enumerate() {
            *s += d * ch.u_c.get(i, m);
        }
    }
}

/// Single-element view of the channels: every channel is
/// `alpha_j (h_tilde_j + v_m u_{j,m})` with `alpha_c = 1`, and the
/// quadratic forms in `v_m` that the sensing and communication SNRs reduce to.
#[derive(Debug, Clone, PartialEq)]
pub struct PerElementTerms {
    pub m: usize,
    /// Current value of `v_m`.
    pub v_m: C64,
    pub alpha_t: C64,
    pub alpha_r: C64,
    pub h_tilde_t: ComplexVector,
    pub h_tilde_r: ComplexVector,
    pub h_tilde_c: ComplexVector,
    pub u_t_m: ComplexVector,
    pub u_r_m: ComplexVector,
    pub u_c_m: ComplexVector,
    /// `||h~_r||^2 + ||u_{r,m}||^2`
    pub k0: f64,
    /// `|h~_t^H w|^2 + |u_{t,m}^H w|^2`
    pub k1: f64,
    /// `|h~_c^H w|^2 + |u_{c,m}^H w|^2`
    pub k_c: f64,
    /// `h~_r^H u_{r,m}`
    pub a0: C64,
    /// `h~_t^H w w^H u_{t,m}`
    pub a1: C64,
    /// `h~_c^H w w^H u_{c,m}`
    pub a_c: C64,
}

impl PerElementTerms {
    /// Channels with `v_m` replaced by `e^{j mu}` and every other phase kept.
    pub fn channels_at(&self, mu: f64) -> EffectiveChannels {
        let vm = C64::from_polar(1.0, mu);
        let combine = |alpha: C64, base: &ComplexVector, u: &ComplexVector| {
            ComplexVector::new(base.iter().zip(u.iter()).map(|(b, u)| alpha * (b + vm * u)).collect())
        };
        EffectiveChannels {
            h_t: combine(self.alpha_t, &self.h_tilde_t, &self.u_t_m),
            h_r: combine(self.alpha_r, &self.h_tilde_r, &self.u_r_m),
            h_c: combine(C64::new(1.0, 0.0), &self.h_tilde_c, &self.u_c_m),
        }
    }

    /// `|h_c^H w|^2` as a function of the phase: `k_c + 2 Re{e^{j mu} a_c}`.
    pub fn comm_power_at(&self, mu: f64) -> f64 {
        self.k_c + 2.0 * (C64::from_polar(1.0, mu) * self.a_c).re
    }
}

pub(crate) fn decompose_with_sums(
    ch: &ChannelSet,
    v: &PhaseConfig,
    sums: &CascadeSums,
    m: usize,
    w: &ComplexVector,
) -> PerElementTerms {
    let vm = v.as_slice()[m];
    let u_t_m = ch.u_t.column(m);
    let u_r_m = ch.u_r.column(m);
    let u_c_m = ch.u_c.column(m);
    let tilde = |direct: &ComplexVector, s: &[C64], u: &ComplexVector| {
        ComplexVector::new(
            direct
                .iter()
                .zip(s)
                .zip(u.iter())
                .map(|((a, s), u)| a + s - vm * u)
                .collect(),
        )
    };
    let h_tilde_t = tilde(&ch.a_t, &sums.t, &u_t_m);
    let h_tilde_r = tilde(&ch.a_r, &sums.r, &u_r_m);
    let h_tilde_c = tilde(&ch.h_bu, &sums.c, &u_c_m);

    let ht_w = dot_h(h_tilde_t.as_slice(), w.as_slice());
    let ut_w = dot_h(u_t_m.as_slice(), w.as_slice());
    let hc_w = dot_h(h_tilde_c.as_slice(), w.as_slice());
    let uc_w = dot_h(u_c_m.as_slice(), w.as_slice());

    PerElementTerms {
        m,
        v_m: vm,
        alpha_t: ch.alpha_t,
        alpha_r: ch.alpha_r,
        k0: h_tilde_r.norm2() + u_r_m.norm2(),
        k1: ht_w.norm_sqr() + ut_w.norm_sqr(),
        k_c: hc_w.norm_sqr() + uc_w.norm_sqr(),
        a0: dot_h(h_tilde_r.as_slice(), u_r_m.as_slice()),
        // h~^H w w^H u = (h~^H w) * conj(u^H w)
        a1: ht_w * ut_w.conj(),
        a_c: hc_w * uc_w.conj(),
        h_tilde_t,
        h_tilde_r,
        h_tilde_c,
        u_t_m,
        u_r_m,
        u_c_m,
    }
}

/// Splits the channels around element `m` (0-based) for beamformer `w`.
pub fn decompose_element(ch: &ChannelSet, v: &PhaseConfig, m: usize, w: &ComplexVector) -> Result<PerElementTerms> {
    if m >= ch.m_ris() {
        return Err(Error::IndexOutOfRange {
            index: m,
            len: ch.m_ris(),
        });
    }
    check_len(ch.m_ris(), v.len())?;
    check_len(ch.n_tx(), w.len())?;
    let sums = CascadeSums::new(ch, v);
    Ok(decompose_with_sums(ch, v, &sums, m, w))
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// Channel set with generic (full-rank, Gaussian) pieces.
    pub fn random_channels(n_tx: usize, n_rx: usize, m: usize, rng: &mut SeededRng) -> ChannelSet {
        let mat = |r: usize, c: usize, rng: &mut SeededRng| ComplexMatrix::from_fn(r, c, |_, _| rng.cn01());
        let a_t = rng.sample_cn01(n_tx);
        let a_r = rng.sample_cn01(n_rx);
        let alpha_t = rng.cn01();
        let alpha_r = rng.cn01();
        let alpha_g = rng.cn01();
        let b = rng.sample_cn01(m);
        let g_t = mat(n_tx, m, rng);
        let g_r = mat(n_rx, m, rng);
        let h_bu = rng.sample_cn01(n_tx);
        let h_ru = rng.sample_cn01(m);
        ChannelSet::from_parts(a_t, a_r, alpha_t, alpha_r, alpha_g, b, g_t, g_r, h_bu, h_ru).unwrap()
    }

    pub fn max_rel_err(a: &ComplexVector, b: &ComplexVector) -> f64 {
        let scale = a.norm().max(b.norm()).max(1e-300);
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm() / scale)
            .fold(0.0, f64::max)
    }
}
