//! Brute-force reference computations. Nothing here calls the optimizers it
//! is used to check; channels are rebuilt from the raw pieces of a
//! `ChannelSet` with plain loops.
#![allow(dead_code)]

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use risac_core::{ChannelSet, ComplexMatrix, ComplexVector, SeededRng};

pub fn dot_h(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm2(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// Channel set with Gaussian pieces, so RIS paths are as strong as direct ones.
pub fn random_channels(n_tx: usize, n_rx: usize, m: usize, rng: &mut SeededRng) -> ChannelSet {
    let mut mat = |r: usize, c: usize| ComplexMatrix::from_fn(r, c, |_, _| rng.cn01());
    let g_t = mat(n_tx, m);
    let g_r = mat(n_rx, m);
    ChannelSet::from_parts(
        rng.sample_cn01(n_tx),
        rng.sample_cn01(n_rx),
        rng.cn01(),
        rng.cn01(),
        rng.cn01(),
        rng.sample_cn01(m),
        g_t,
        g_r,
        rng.sample_cn01(n_tx),
        rng.sample_cn01(m),
    )
    .unwrap()
}

/// `base + G (d .* v)` with `G` read entry by entry.
fn cascade(base: &[C64], scale: C64, g: &ComplexMatrix, d: &ComplexVector, v: &[C64]) -> Vec<C64> {
    (0..g.rows())
        .map(|n| {
            let s: C64 = (0..g.cols()).map(|m| g.get(n, m) * d[m] * v[m]).sum();
            scale * (base[n] + s)
        })
        .collect()
}

/// `(h_t, h_r, h_c)` for an arbitrary (not necessarily unit-modulus) `v`.
pub fn channels(ch: &ChannelSet, v: &[C64]) -> (Vec<C64>, Vec<C64>, Vec<C64>) {
    let one = C64::new(1.0, 0.0);
    let h_t = cascade(ch.a_t.as_slice(), ch.alpha_t, &ch.g_t, &ch.b_tilde, v);
    let h_r = cascade(ch.a_r.as_slice(), ch.alpha_r, &ch.g_r, &ch.b_bar, v);
    let h_c = cascade(ch.h_bu.as_slice(), one, &ch.g_t, &ch.h_ru, v);
    (h_t, h_r, h_c)
}

/// `-||h_r||^2 |h_t^H h_c|^2` off the unit torus as well.
pub fn objective(ch: &ChannelSet, v: &[C64]) -> f64 {
    let (h_t, h_r, h_c) = channels(ch, v);
    -norm2(&h_r) * dot_h(&h_t, &h_c).norm_sqr()
}

/// Central differences over `(Re v_m, Im v_m)`, returned as
/// `[d/dRe v_0, d/dIm v_0, d/dRe v_1, ...]`.
pub fn fd_gradient(ch: &ChannelSet, v: &[C64], step: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * v.len());
    for m in 0..v.len() {
        for dir in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
            let mut vp = v.to_vec();
            let mut vm = v.to_vec();
            vp[m] += dir * step;
            vm[m] -= dir * step;
            out.push((objective(ch, &vp) - objective(ch, &vm)) / (2.0 * step));
        }
    }
    out
}

/// Best `|h_t^H w|^2` over `w = c1 e^{j phi} u1 + c2 u2`, `c1^2 + c2^2 = p_t`,
/// subject to `|h_c^H w|^2 >= gamma0 sigma_c2`. `c1 = sqrt(p_t) cos(theta)`
/// is gridded on the feasible range of `theta` with both ends included, and
/// `phi` on `[0, 2 pi)`, both at spacing `res`. `None` if nothing is feasible.
pub fn beamformer_grid(h_t: &[C64], h_c: &[C64], p_t: f64, gamma0: f64, sigma_c2: f64, res: f64) -> Option<f64> {
    let hc = norm2(h_c).sqrt();
    let u1: Vec<C64> = h_c.iter().map(|z| z / hc).collect();
    let p = dot_h(&u1, h_t);
    let rem: Vec<C64> = h_t.iter().zip(&u1).map(|(t, u)| t - p * u).collect();
    let rn = norm2(&rem).sqrt();
    let u2: Vec<C64> = rem.iter().map(|z| z / rn.max(1e-300)).collect();
    // h_t^H u1 and h_t^H u2
    let a = dot_h(h_t, &u1);
    let b = if rn > 0.0 { dot_h(h_t, &u2) } else { C64::new(0.0, 0.0) };

    let c1_min2 = gamma0 * sigma_c2 / (hc * hc);
    if c1_min2 > p_t * (1.0 + 1e-9) {
        return None;
    }
    let theta_max = (c1_min2 / p_t).min(1.0).sqrt().acos();
    let n_theta = (theta_max / res).ceil().max(1.0) as usize;
    let n_phi = (TAU / res).ceil() as usize;
    let phis: Vec<C64> = (0..n_phi)
        .map(|k| C64::from_polar(1.0, TAU * k as f64 / n_phi as f64))
        .collect();
    let mut best = f64::NEG_INFINITY;
    for i in 0..=n_theta {
        let theta = theta_max * i as f64 / n_theta as f64;
        let c1 = p_t.sqrt() * theta.cos();
        let c2 = p_t.sqrt() * theta.sin();
        if c1 * c1 * hc * hc < gamma0 * sigma_c2 * (1.0 - 1e-9) {
            continue;
        }
        let bc2 = b * c2;
        for e in &phis {
            let g = (a * e * c1 + bc2).norm_sqr();
            if g > best {
                best = g;
            }
        }
    }
    Some(best)
}

/// Exact per-element landscape: for `mu_k = 2 pi k / n`, the sensing gain
/// `||h_r||^2 |h_t^H w|^2` and user power `|h_c^H w|^2` with `v_m = e^{j mu_k}`.
pub struct ElementGrid {
    pub mu: Vec<f64>,
    pub gain: Vec<f64>,
    pub comm: Vec<f64>,
}

pub fn element_grid(ch: &ChannelSet, v: &[C64], m: usize, w: &[C64], n: usize) -> ElementGrid {
    // split each channel into the part without element m and its column
    let mut v0 = v.to_vec();
    v0[m] = C64::new(0.0, 0.0);
    let (t0, r0, c0) = channels(ch, &v0);
    let (t1, r1, c1) = channels(ch, &{
        let mut e = v0.clone();
        e[m] = C64::new(1.0, 0.0);
        e
    });
    let col = |full: &[C64], base: &[C64]| -> Vec<C64> { full.iter().zip(base).map(|(a, b)| a - b).collect() };
    let (dt, dr, dc) = (col(&t1, &t0), col(&r1, &r0), col(&c1, &c0));
    let mut grid = ElementGrid {
        mu: Vec::with_capacity(n),
        gain: Vec::with_capacity(n),
        comm: Vec::with_capacity(n),
    };
    for k in 0..n {
        let mu = TAU * k as f64 / n as f64;
        let e = C64::from_polar(1.0, mu);
        let ht: Vec<C64> = t0.iter().zip(&dt).map(|(a, d)| a + e * d).collect();
        let hr: Vec<C64> = r0.iter().zip(&dr).map(|(a, d)| a + e * d).collect();
        let hc: Vec<C64> = c0.iter().zip(&dc).map(|(a, d)| a + e * d).collect();
        grid.mu.push(mu);
        grid.gain.push(norm2(&hr) * dot_h(&ht, w).norm_sqr());
        grid.comm.push(dot_h(&hc, w).norm_sqr());
    }
    grid
}

/// Angular distance on the circle.
pub fn ang_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Exhaustive search over `(mu_0, mu_1)` on an `n x n` grid for an `M = 2`
/// surface, with `best_w` supplying the beamformer at every point. Returns
/// the best sensing gain `||h_r||^2 |h_t^H w|^2`, or `None` when no point
/// admits a beamformer.
pub fn joint_grid_m2<F>(ch: &ChannelSet, n: usize, mut best_w: F) -> Option<f64>
where
    F: FnMut(&[C64], &[C64]) -> Option<Vec<C64>>,
{
    assert_eq!(ch.m_ris(), 2);
    let mut best: Option<f64> = None;
    for i in 0..n {
        for k in 0..n {
            let v = [
                C64::from_polar(1.0, TAU * i as f64 / n as f64),
                C64::from_polar(1.0, TAU * k as f64 / n as f64),
            ];
            let (h_t, h_r, h_c) = channels(ch, &v);
            if let Some(w) = best_w(&h_t, &h_c) {
                let g = norm2(&h_r) * dot_h(&h_t, &w).norm_sqr();
                best = Some(best.map_or(g, |b: f64| b.max(g)));
            }
        }
    }
    best
}

/// Minimum of the rotation objective over an `M = 2` torus grid of spacing
/// at most `res`.
pub fn objective_grid_m2(ch: &ChannelSet, res: f64) -> f64 {
    assert_eq!(ch.m_ris(), 2);
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let (t0, r0, c0) = channels(ch, &[zero, zero]);
    let (ta, ra, ca) = channels(ch, &[one, zero]);
    let (tb, rb, cb) = channels(ch, &[zero, one]);
    let d = |x: &[C64], y: &[C64]| -> Vec<C64> { x.iter().zip(y).map(|(a, b)| a - b).collect() };
    let (dta, dra, dca) = (d(&ta, &t0), d(&ra, &r0), d(&ca, &c0));
    let (dtb, drb, dcb) = (d(&tb, &t0), d(&rb, &r0), d(&cb, &c0));
    let n = (TAU / res).ceil() as usize;
    let phases: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(1.0, TAU * k as f64 / n as f64))
        .collect();
    let mut best = f64::INFINITY;
    let mut ht = vec![zero; t0.len()];
    let mut hr = vec![zero; r0.len()];
    let mut hc = vec![zero; c0.len()];
    for ea in &phases {
        let ta: Vec<C64> = t0.iter().zip(&dta).map(|(x, y)| x + ea * y).collect();
        let ra: Vec<C64> = r0.iter().zip(&dra).map(|(x, y)| x + ea * y).collect();
        let ca: Vec<C64> = c0.iter().zip(&dca).map(|(x, y)| x + ea * y).collect();
        for eb in &phases {
            for i in 0..ht.len() {
                ht[i] = ta[i] + eb * dtb[i];
                hc[i] = ca[i] + eb * dcb[i];
            }
            for i in 0..hr.len() {
                hr[i] = ra[i] + eb * drb[i];
            }
            let f = -norm2(&hr) * dot_h(&ht, &hc).norm_sqr();
            if f < best {
                best = f;
            }
        }
    }
    best
}

/// Percentile bootstrap: lower `alpha` quantile of the resampled mean of
/// `stat(sample)` over `reps` resamples of the paired indices.
pub fn bootstrap_lower<F>(n: usize, reps: usize, alpha: f64, rng: &mut SeededRng, mut stat: F) -> f64
where
    F: FnMut(&[usize]) -> f64,
{
    let mut draws: Vec<f64> = (0..reps)
        .map(|_| {
            let idx: Vec<usize> = (0..n).map(|_| rng.below(n)).collect();
            stat(&idx)
        })
        .collect();
    draws.sort_by(|a, b| a.total_cmp(b));
    let k = ((alpha * reps as f64).floor() as usize).min(reps - 1);
    draws[k]
}
