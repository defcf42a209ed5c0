//! Scene geometry and RF parameters, plus the flat `key = value` config format.
//!
//! ```text
//! # positions in metres, angles in degrees
//! bs_pos = [0, 0]
//! ris_pos = [30, 30]
//! target_pos = [40, 0]
//! d_bu = 30
//! ue_azimuth_deg = -60
//! m_ris = 64
//! gamma0_db = 10
//! ```
//!
//! Keys are the field names of [`Scenario`]. `bs`, `ris`, `target` and `ue`
//! are accepted as short aliases for the position keys. When `ue_pos` is not
//! given, the user is placed `d_bu` metres from the BS at `ue_azimuth_deg`
//! measured from the BS-to-target direction.

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub bs_pos: Point,
    pub ris_pos: Point,
    pub target_pos: Point,
    pub ue_pos: Point,
    /// Direction of the BS array normal, degrees from +x.
    pub bs_normal_deg: f64,
    /// Direction of the RIS normal, degrees from +x.
    pub ris_normal_deg: f64,
    pub n_tx: usize,
    pub n_rx: usize,
    pub m_ris: usize,
    pub carrier_hz: f64,
    pub tx_power_w: f64,
    pub noise_s_w: f64,
    pub noise_c_w: f64,
    /// Linear communication SNR threshold.
    pub gamma0: f64,
    pub pathloss_exp_bu: f64,
    pub pathloss_exp_ru: f64,
    pub seed: u64,
}

/// Power budget, noise levels and SNR threshold; everything a solver needs
/// besides the channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub tx_power_w: f64,
    pub noise_s_w: f64,
    pub noise_c_w: f64,
    pub gamma0: f64,
}

pub const DEFAULT_D_BU: f64 = 30.0;
pub const DEFAULT_UE_AZIMUTH_DEG: f64 = -60.0;

impl Default for Scenario {
    fn default() -> Self {
        let bs_pos = [0.0, 0.0];
        let target_pos = [40.0, 0.0];
        Self {
            bs_pos,
            ris_pos: [30.0, 30.0],
            target_pos,
            ue_pos: place_ue(bs_pos, target_pos, DEFAULT_D_BU, DEFAULT_UE_AZIMUTH_DEG),
            bs_normal_deg: 0.0,
            ris_normal_deg: -90.0,
            n_tx: 15,
            n_rx: 15,
            m_ris: 64,
            carrier_hz: 3e9,
            tx_power_w: 1.0,
            noise_s_w: 1e-9,
            noise_c_w: 1e-9,
            gamma0: 10.0,
            pathloss_exp_bu: 3.0,
            pathloss_exp_ru: 2.2,
            seed: 0,
        }
    }
}

fn place_ue(bs: Point, target: Point, d_bu: f64, azimuth_deg: f64) -> Point {
    let axis = (target[1] - bs[1]).atan2(target[0] - bs[0]);
    let a = axis + azimuth_deg.to_radians();
    [bs[0] + d_bu * a.cos(), bs[1] + d_bu * a.sin()]
}

pub fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

impl Scenario {
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    pub fn link_budget(&self) -> LinkBudget {
        LinkBudget {
            tx_power_w: self.tx_power_w,
            noise_s_w: self.noise_s_w,
            noise_c_w: self.noise_c_w,
            gamma0: self.gamma0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        for (name, n) in [("n_tx", self.n_tx), ("n_rx", self.n_rx), ("m_ris", self.m_ris)] {
            if n == 0 {
                return bad(format!("{name} must be at least 1"));
            }
        }
        for (name, x) in [
            ("carrier_hz", self.carrier_hz),
            ("tx_power_w", self.tx_power_w),
            ("noise_s_w", self.noise_s_w),
            ("noise_c_w", self.noise_c_w),
            ("gamma0", self.gamma0),
        ] {
            if !(x.is_finite() && x > 0.0) {
                return bad(format!("{name} must be positive and finite, got {x}"));
            }
        }
        for (name, x) in [
            ("pathloss_exp_bu", self.pathloss_exp_bu),
            ("pathloss_exp_ru", self.pathloss_exp_ru),
            ("bs_normal_deg", self.bs_normal_deg),
            ("ris_normal_deg", self.ris_normal_deg),
        ] {
            if !x.is_finite() {
                return bad(format!("{name} must be finite"));
            }
        }
        let pts = [
            ("bs", self.bs_pos),
            ("ris", self.ris_pos),
            ("target", self.target_pos),
            ("ue", self.ue_pos),
        ];
        if pts.iter().any(|(_, p)| !(p[0].is_finite() && p[1].is_finite())) {
            return bad("positions must be finite".into());
        }
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d = distance(pts[i].1, pts[j].1);
                if d < 0.1 {
                    return Err(Error::DegenerateGeometry {
                        a: pts[i].0,
                        b: pts[j].0,
                        distance: d,
                    });
                }
            }
        }
        Ok(())
    }

    /// Parses a full config; unknown keys are an error.
    pub fn from_config_str(text: &str) -> Result<Scenario> {
        let pairs = parse_pairs(text)?;
        let (sc, rest) = Scenario::from_pairs(&pairs)?;
        if let Some((k, _)) = rest.first() {
            return Err(Error::InvalidScenario(format!("unknown key `{k}`")));
        }
        Ok(sc)
    }

    /// Applies every recognised key on top of the defaults and returns the
    /// pairs it did not recognise, in input order.
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<(Scenario, Vec<(String, String)>)> {
        let mut sc = Scenario::default();
        let mut ue_pos = None;
        let mut d_bu = DEFAULT_D_BU;
        let mut ue_azimuth = DEFAULT_UE_AZIMUTH_DEG;
        let mut rest = Vec::new();
        for (key, value) in pairs {
            match key.as_str() {
                "bs_pos" | "bs" => sc.bs_pos = parse_point(key, value)?,
                "ris_pos" | "ris" => sc.ris_pos = parse_point(key, value)?,
                "target_pos" | "target" => sc.target_pos = parse_point(key, value)?,
                "ue_pos" | "ue" => ue_pos = Some(parse_point(key, value)?),
                "d_bu" => d_bu = parse_num(key, value)?,
                "ue_azimuth_deg" => ue_azimuth = parse_num(key, value)?,
                "bs_normal_deg" => sc.bs_normal_deg = parse_num(key, value)?,
                "ris_normal_deg" => sc.ris_normal_deg = parse_num(key, value)?,
                "n_tx" => sc.n_tx = parse_num(key, value)?,
                "n_rx" => sc.n_rx = parse_num(key, value)?,
                "m_ris" => sc.m_ris = parse_num(key, value)?,
                "carrier_hz" => sc.carrier_hz = parse_num(key, value)?,
                "tx_power_w" => sc.tx_power_w = parse_num(key, value)?,
                "noise_s_w" => sc.noise_s_w = parse_num(key, value)?,
                "noise_c_w" => sc.noise_c_w = parse_num(key, value)?,
                "gamma0" => sc.gamma0 = parse_num(key, value)?,
                "gamma0_db" => sc.gamma0 = db_to_linear(parse_num(key, value)?),
                "pathloss_exp_bu" => sc.pathloss_exp_bu = parse_num(key, value)?,
                "pathloss_exp_ru" => sc.pathloss_exp_ru = parse_num(key, value)?,
                "seed" => sc.seed = parse_num(key, value)?,
                _ => rest.push((key.clone(), value.clone())),
            }
        }
        sc.ue_pos = ue_pos.unwrap_or_else(|| place_ue(sc.bs_pos, sc.target_pos, d_bu, ue_azimuth));
        sc.validate()?;
        Ok((sc, rest))
    }

    /// Canonical config text; parses back to an identical scenario.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let pt = |p: Point| format!("[{:?}, {:?}]", p[0], p[1]);
        let _ = writeln!(s, "bs_pos = {}", pt(self.bs_pos));
        let _ = writeln!(s, "ris_pos = {}", pt(self.ris_pos));
        let _ = writeln!(s, "target_pos = {}", pt(self.target_pos));
        let _ = writeln!(s, "ue_pos = {}", pt(self.ue_pos));
        let _ = writeln!(s, "bs_normal_deg = {:?}", self.bs_normal_deg);
        let _ = writeln!(s, "ris_normal_deg = {:?}", self.ris_normal_deg);
        let _ = writeln!(s, "n_tx = {}", self.n_tx);
        let _ = writeln!(s, "n_rx = {}", self.n_rx);
        let _ = writeln!(s, "m_ris = {}", self.m_ris);
        let _ = writeln!(s, "carrier_hz = {:?}", self.carrier_hz);
        let _ = writeln!(s, "tx_power_w = {:?}", self.tx_power_w);
        let _ = writeln!(s, "noise_s_w = {:?}", self.noise_s_w);
        let _ = writeln!(s, "noise_c_w = {:?}", self.noise_c_w);
        let _ = writeln!(s, "gamma0 = {:?}", self.gamma0);
        let _ = writeln!(s, "pathloss_exp_bu = {:?}", self.pathloss_exp_bu);
        let _ = writeln!(s, "pathloss_exp_ru = {:?}", self.pathloss_exp_ru);
        let _ = writeln!(s, "seed = {}", self.seed);
        s
    }
}

/// Splits `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::InvalidScenario(format!(
                "line {}: expected `key = value`",
                lineno + 1
            )));
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(Error::InvalidScenario(format!("line {}: empty key", lineno + 1)));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidScenario(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_point(key: &str, value: &str) -> Result<Point> {
    let inner = value.trim().trim_start_matches('[').trim_end_matches(']');
    let parts: Vec<&str> = inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
        .collect();
    match parts.as_slice() {
        [x, y] => Ok([parse_num(key, x)?, parse_num(key, y)?]),
        _ => Err(Error::InvalidScenario(format!(
            "`{key}`: expected two coordinates, got `{value}`"
        ))),
    }
}
