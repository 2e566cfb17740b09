//! Propagation: LoS probability, terrestrial and platform path loss,
//! shadowing, Rician fading and composition of the large-scale gain.

use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::LinkGeometry;
use crate::scenario::{db_to_linear, ScenarioConfig, SPEED_OF_LIGHT};

/// Elevation grid of the dense-urban NTN tables, degrees.
pub const NTN_TABLE_ELEVATIONS_DEG: [f64; 9] = [10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0];
/// Dense-urban LoS probability, percent.
pub const NTN_DU_LOS_PERCENT: [f64; 9] = [28.2, 33.1, 39.8, 46.8, 53.7, 61.2, 73.8, 82.0, 98.1];
/// Dense-urban S-band clutter loss for NLoS links, dB.
pub const NTN_DU_CLUTTER_DB: [f64; 9] = [34.3, 30.9, 29.0, 27.7, 26.8, 26.2, 25.8, 25.5, 25.5];
/// Dense-urban S-band shadowing standard deviation, LoS, dB.
pub const NTN_DU_SF_LOS_DB: [f64; 9] = [3.5, 3.4, 2.9, 3.0, 3.1, 2.7, 2.5, 2.3, 1.2];
/// Dense-urban S-band shadowing standard deviation, NLoS, dB.
pub const NTN_DU_SF_NLOS_DB: [f64; 9] = [15.5, 13.9, 12.4, 11.7, 10.6, 10.5, 10.1, 9.2, 9.2];
/// Dense-urban Rician K of LoS links, dB.
pub const NTN_DU_K_DB: [f64; 9] = [4.4, 9.0, 9.3, 7.9, 7.4, 7.0, 6.9, 6.5, 6.8];

/// Platform altitude below which the street-canyon LoS model replaces the
/// elevation table.
pub const STREET_MODEL_MAX_ALTITUDE_M: f64 = 8_000.0;

/// Linear interpolation over the 10..90 degree NTN grid, clamped at both ends.
pub fn ntn_table(table: &[f64; 9], elevation_deg: f64) -> f64 {
    let x = elevation_deg.clamp(10.0, 90.0);
    let i = (((x - 10.0) / 10.0).floor() as usize).min(7);
    let t = (x - NTN_TABLE_ELEVATIONS_DEG[i]) / 10.0;
    table[i] + t * (table[i + 1] - table[i])
}

/// Built-area statistics for the street-canyon LoS model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LosGeometryParams {
    pub building_w_m: f64,
    pub street_s_m: f64,
    /// Rayleigh scale of building heights.
    pub height_scale_m: f64,
    pub h_ue_m: f64,
}

impl LosGeometryParams {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        Self {
            building_w_m: cfg.building_w_m,
            street_s_m: cfg.street_s_m,
            height_scale_m: cfg.building_height_scale_m,
            h_ue_m: cfg.h_ue_m,
        }
    }

    /// Outdoor area per building block: two street strips plus a crossroad.
    pub fn area(&self) -> f64 {
        2.0 * self.street_s_m * self.building_w_m + self.street_s_m * self.street_s_m
    }

    /// Weights of (each street region, crossroad region).
    pub fn region_weights(&self) -> (f64, f64) {
        let street = self.street_s_m * self.building_w_m / self.area();
        // Complement rather than S²/A so that 2·street + crossroad == 1.
        (street, 1.0 - 2.0 * street)
    }

    fn key(&self) -> [u64; 4] {
        [
            self.building_w_m.to_bits(),
            self.street_s_m.to_bits(),
            self.height_scale_m.to_bits(),
            self.h_ue_m.to_bits(),
        ]
    }
}

/// Region LoS probabilities at one elevation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionLos {
    /// Street running along `y`, between building columns.
    pub p_r1: f64,
    /// Street running along `x`, between building rows.
    pub p_r2: f64,
    /// Crossroad.
    pub p_r3: f64,
}

const STREET_POSITIONS: usize = 12;
const STREET_AZIMUTHS: usize = 48;
/// Rays stop once they clear this many height scales.
const CLEARANCE_SCALES: f64 = 6.0;

/// Parameter intervals `[r0, r1]` along a ray for which one coordinate lies
/// inside a building footprint `[kP, kP + W]`.
fn footprint_intervals(p0: f64, d: f64, pitch: f64, w: f64, r_max: f64, out: &mut Vec<(f64, f64)>) {
    out.clear();
    if d.abs() < 1e-12 {
        if p0.rem_euclid(pitch) < w {
            out.push((0.0, r_max));
        }
        return;
    }
    let end = p0 + d * r_max;
    let (lo, hi) = if p0 < end { (p0, end) } else { (end, p0) };
    let k0 = (lo / pitch).floor() as i64;
    let k1 = (hi / pitch).floor() as i64;
    let mut push = |k: i64| {
        let a = (k as f64 * pitch - p0) / d;
        let b = (k as f64 * pitch + w - p0) / d;
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let (a, b) = (a.max(0.0), b.min(r_max));
        if b > a {
            out.push((a, b));
        }
    };
    if d > 0.0 {
        (k0..=k1).for_each(&mut push);
    } else {
        (k0..=k1).rev().for_each(&mut push);
    }
}

/// Probability that a ray from a street-level UE clears every building it
/// crosses, with i.i.d. Rayleigh building heights.
pub fn ray_los_probability(
    params: &LosGeometryParams,
    x0: f64,
    y0: f64,
    elevation_deg: f64,
    azimuth_rad: f64,
    scratch: &mut (Vec<(f64, f64)>, Vec<(f64, f64)>),
) -> f64 {
    if elevation_deg >= 90.0 {
        return 1.0;
    }
    if elevation_deg <= 0.0 {
        return 0.0;
    }
    let w = params.building_w_m;
    let pitch = w + params.street_s_m;
    let gamma = params.height_scale_m;
    let t = elevation_deg.to_radians().tan();
    let r_max = ((CLEARANCE_SCALES * gamma - params.h_ue_m).max(0.0)) / t;
    let (dx, dy) = (azimuth_rad.cos(), azimuth_rad.sin());
    let (ix, iy) = scratch;
    footprint_intervals(x0, dx, pitch, w, r_max, ix);
    footprint_intervals(y0, dy, pitch, w, r_max, iy);
    let inv = 1.0 / (2.0 * gamma * gamma);
    let mut p = 1.0;
    let (mut i, mut j) = (0, 0);
    while i < ix.len() && j < iy.len() {
        let lo = ix[i].0.max(iy[j].0);
        let hi = ix[i].1.min(iy[j].1);
        if hi > lo {
            let h = params.h_ue_m + lo * t;
            p *= 1.0 - (-h * h * inv).exp();
        }
        if ix[i].1 < iy[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    p
}

/// Region-averaged LoS probabilities by midpoint quadrature over UE
/// positions and ray azimuths.
pub fn region_los(params: &LosGeometryParams, elevation_deg: f64) -> RegionLos {
    let w = params.building_w_m;
    let s = params.street_s_m;
    let mut scratch = (Vec::new(), Vec::new());
    let mut region = |x_of: &dyn Fn(f64) -> f64, y_of: &dyn Fn(f64) -> f64| {
        let mut acc = 0.0;
        for a in 0..STREET_POSITIONS {
            let fa = (a as f64 + 0.5) / STREET_POSITIONS as f64;
            for b in 0..STREET_POSITIONS {
                let fb = (b as f64 + 0.5) / STREET_POSITIONS as f64;
                for k in 0..STREET_AZIMUTHS {
                    let az = (k as f64 + 0.5) / STREET_AZIMUTHS as f64 * std::f64::consts::TAU;
                    acc += ray_los_probability(params, x_of(fa), y_of(fb), elevation_deg, az, &mut scratch);
                }
            }
        }
        acc / (STREET_POSITIONS * STREET_POSITIONS * STREET_AZIMUTHS) as f64
    };
    let p_r1 = region(&|f| w + s * f, &|f| w * f);
    let p_r2 = region(&|f| w * f, &|f| w + s * f);
    let p_r3 = region(&|f| w + s * f, &|f| w + s * f);
    RegionLos { p_r1, p_r2, p_r3 }
}

/// Street-canyon LoS probability tabulated on a 1 degree elevation grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StreetLosTable {
    pub params: LosGeometryParams,
    /// Probability at 0, 1, ..., 90 degrees.
    pub values: Vec<f64>,
}

impl StreetLosTable {
    pub fn build(params: LosGeometryParams) -> Self {
        let (w_street, w_cross) = params.region_weights();
        let mut values: Vec<f64> = (0..=90)
            .map(|e| {
                let r = region_los(&params, e as f64);
                w_street * (r.p_r1 + r.p_r2) + w_cross * r.p_r3
            })
            .collect();
        // Quadrature ripple near 1 can break monotonicity by ~1e-12.
        for i in 1..values.len() {
            values[i] = values[i].max(values[i - 1]).min(1.0);
        }
        Self { params, values }
    }

    /// Shared instance for a parameter set, built once per process.
    pub fn shared(params: LosGeometryParams) -> Arc<Self> {
        static CACHE: OnceLock<Mutex<Vec<([u64; 4], Arc<StreetLosTable>)>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
        let key = params.key();
        if let Some((_, t)) = cache.lock().unwrap().iter().find(|(k, _)| *k == key) {
            return Arc::clone(t);
        }
        let table = Arc::new(Self::build(params));
        let mut guard = cache.lock().unwrap();
        if let Some((_, t)) = guard.iter().find(|(k, _)| *k == key) {
            return Arc::clone(t);
        }
        guard.push((key, Arc::clone(&table)));
        table
    }

    pub fn probability(&self, elevation_deg: f64) -> f64 {
        let x = elevation_deg.clamp(0.0, 90.0);
        let i = (x.floor() as usize).min(89);
        let t = x - i as f64;
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }
}

/// UMa LoS probability for UEs up to 13 m.
pub fn uma_los_probability(d2d_m: f64) -> f64 {
    if d2d_m <= 18.0 {
        1.0
    } else {
        18.0 / d2d_m + (-d2d_m / 63.0).exp() * (1.0 - 18.0 / d2d_m)
    }
}

#[derive(Debug, Clone)]
pub enum LosModel {
    TerrestrialUma,
    NtnTable,
    NtnStreet(Arc<StreetLosTable>),
}

impl LosModel {
    pub fn for_config(cfg: &ScenarioConfig) -> Self {
        if cfg.deployment_kind.is_terrestrial() {
            Self::TerrestrialUma
        } else if cfg.h_ntn_m < STREET_MODEL_MAX_ALTITUDE_M {
            Self::NtnStreet(StreetLosTable::shared(LosGeometryParams::from_config(cfg)))
        } else {
            Self::NtnTable
        }
    }

    pub fn probability(&self, link: &LinkGeometry) -> Result<f64> {
        match self {
            Self::TerrestrialUma => Ok(uma_los_probability(link.d2d_m)),
            Self::NtnTable | Self::NtnStreet(_) => {
                if !(link.elevation_deg > 0.0) {
                    return Err(Error::Domain(format!("elevation {} deg", link.elevation_deg)));
                }
                Ok(match self {
                    Self::NtnStreet(t) => t.probability(link.elevation_deg),
                    _ => ntn_table(&NTN_DU_LOS_PERCENT, link.elevation_deg) / 100.0,
                })
            }
        }
    }
}

/// Platform LoS probability at an elevation: street-canyon model below
/// 8 km, dense-urban table above.
pub fn los_probability(elevation_deg: f64, h_tx_m: f64, params: &LosGeometryParams) -> Result<f64> {
    if !(elevation_deg > 0.0 && elevation_deg <= 90.0) {
        return Err(Error::Domain(format!("elevation {elevation_deg} deg outside (0, 90]")));
    }
    if h_tx_m < STREET_MODEL_MAX_ALTITUDE_M {
        Ok(StreetLosTable::shared(*params).probability(elevation_deg))
    } else {
        Ok(ntn_table(&NTN_DU_LOS_PERCENT, elevation_deg) / 100.0)
    }
}

/// UMa path loss in dB.
pub fn tn_pathloss(link: &LinkGeometry, los: bool, f_hz: f64, h_bs_m: f64, h_ue_m: f64) -> Result<f64> {
    if link.d2d_m > 5_000.0 {
        return Err(Error::ModelRange(format!("UMa d2d = {:.1} m > 5000 m", link.d2d_m)));
    }
    let f_ghz = f_hz / 1e9;
    let dh = h_bs_m - h_ue_m;
    let d2d = link.d2d_m.max(10.0);
    let d3d = (d2d * d2d + dh * dh).sqrt();
    let d_bp = 4.0 * (h_bs_m - 1.0) * (h_ue_m - 1.0) * f_hz / SPEED_OF_LIGHT;
    let pl_los = if d2d <= d_bp {
        28.0 + 22.0 * d3d.log10() + 20.0 * f_ghz.log10()
    } else {
        28.0 + 40.0 * d3d.log10() + 20.0 * f_ghz.log10() - 9.0 * (d_bp * d_bp + dh * dh).log10()
    };
    if los {
        return Ok(pl_los);
    }
    let pl_nlos = 13.54 + 39.08 * d3d.log10() + 20.0 * f_ghz.log10() - 0.6 * (h_ue_m - 1.5);
    Ok(pl_los.max(pl_nlos))
}

pub fn fspl_db(d3d_m: f64, f_hz: f64) -> f64 {
    20.0 * (4.0 * std::f64::consts::PI * d3d_m * f_hz / SPEED_OF_LIGHT).log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NtnPathlossBreakdown {
    pub fspl_db: f64,
    pub clutter_db: f64,
    pub gaseous_db: f64,
    pub rain_db: f64,
    pub cloud_db: f64,
    pub scintillation_db: f64,
}

impl NtnPathlossBreakdown {
    pub fn total_db(&self) -> f64 {
        self.fspl_db + self.clutter_db + self.gaseous_db + self.rain_db + self.cloud_db + self.scintillation_db
    }
}

pub fn ntn_pathloss(link: &LinkGeometry, los: bool, f_hz: f64, cfg: &ScenarioConfig) -> NtnPathlossBreakdown {
    NtnPathlossBreakdown {
        fspl_db: fspl_db(link.d3d_m, f_hz),
        clutter_db: if los { 0.0 } else { ntn_table(&NTN_DU_CLUTTER_DB, link.elevation_deg) },
        gaseous_db: cfg.gaseous_db,
        rain_db: cfg.rain_db,
        cloud_db: cfg.cloud_db,
        scintillation_db: cfg.scintillation_db,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShadowingRegime {
    TerrestrialUma,
    Ntn { elevation_deg: f64 },
    Fixed { sigma_db: f64 },
}

impl ShadowingRegime {
    pub fn sigma_db(&self, los: bool) -> f64 {
        match *self {
            Self::TerrestrialUma => {
                if los {
                    4.0
                } else {
                    6.0
                }
            }
            Self::Ntn { elevation_deg } => {
                ntn_table(if los { &NTN_DU_SF_LOS_DB } else { &NTN_DU_SF_NLOS_DB }, elevation_deg)
            }
            Self::Fixed { sigma_db } => sigma_db,
        }
    }
}

/// Zero-mean log-normal shadowing in dB.
pub fn shadowing_sample<R: Rng + ?Sized>(rng: &mut R, los: bool, regime: ShadowingRegime) -> f64 {
    let sigma = regime.sigma_db(los);
    let z: f64 = StandardNormal.sample(rng);
    sigma * z
}

/// Per-PRB Rician channel of one link, kept as its specular and diffuse
/// parts: `h_k = los + diffuse[k]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FadingState {
    pub k_factor_linear: f64,
    /// `a·e^{jφ}`, shared by every PRB.
    pub los: Complex64,
    /// `b·n_k`.
    pub diffuse: Vec<Complex64>,
}

impl FadingState {
    pub fn n_prb(&self) -> usize {
        self.diffuse.len()
    }

    #[inline]
    pub fn coefficient(&self, k: usize) -> Complex64 {
        self.los + self.diffuse[k]
    }

    pub fn coefficients(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.diffuse.iter().map(move |d| self.los + d)
    }
}

/// LoS and diffuse amplitude weights for a K factor.
pub fn rician_weights(k_factor_linear: f64) -> (f64, f64) {
    if k_factor_linear.is_infinite() {
        (1.0, 0.0)
    } else {
        let k = k_factor_linear.max(0.0);
        ((k / (1.0 + k)).sqrt(), (1.0 / (1.0 + k)).sqrt())
    }
}

#[inline]
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn rician_fade<R: Rng + ?Sized>(rng: &mut R, k_factor_linear: f64, n_prb: usize) -> FadingState {
    let mut state = FadingState {
        diffuse: Vec::with_capacity(n_prb),
        ..FadingState::default()
    };
    rician_fade_into(rng, k_factor_linear, n_prb, &mut state);
    state
}

/// [`rician_fade`] into an existing state, reusing its allocation.
pub fn rician_fade_into<R: Rng + ?Sized>(rng: &mut R, k_factor_linear: f64, n_prb: usize, state: &mut FadingState) {
    let phase = rng.random::<f64>() * std::f64::consts::TAU;
    let (a, b) = rician_weights(k_factor_linear);
    state.k_factor_linear = k_factor_linear;
    state.los = Complex64::from_polar(a, phase);
    state.diffuse.clear();
    state.diffuse.extend((0..n_prb).map(|_| complex_normal(rng) * b));
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LargeScaleState {
    pub los: bool,
    /// Probability weight of the LoS branch: 0 or 1 when drawn, the LoS
    /// probability in expectation mode.
    pub los_weight: f64,
    pub pathloss_db: f64,
    pub shadowing_db: f64,
    pub antenna_gain_dbi: f64,
    /// ρ, linear.
    pub pathloss_gain: f64,
    /// τ, linear.
    pub shadowing_gain: f64,
    /// g, linear.
    pub antenna_gain: f64,
    /// β = ρ·τ·g.
    pub beta: f64,
    /// Rician K of the link.
    pub k_factor_linear: f64,
}

impl LargeScaleState {
    pub fn new(los: bool, pathloss_db: f64, shadowing_db: f64, antenna_gain_dbi: f64, k_factor_linear: f64) -> Self {
        let pathloss_gain = db_to_linear(-pathloss_db);
        let shadowing_gain = db_to_linear(shadowing_db);
        let antenna_gain = db_to_linear(antenna_gain_dbi);
        Self {
            los,
            los_weight: if los { 1.0 } else { 0.0 },
            pathloss_db,
            shadowing_db,
            antenna_gain_dbi,
            pathloss_gain,
            shadowing_gain,
            antenna_gain,
            beta: pathloss_gain * shadowing_gain * antenna_gain,
            k_factor_linear,
        }
    }

    /// Probability-weighted mixture of a LoS and an NLoS state. The K factor
    /// keeps the specular fraction of the mean power.
    pub fn expectation(p_los: f64, los: &LargeScaleState, nlos: &LargeScaleState) -> Self {
        let beta = p_los * los.beta + (1.0 - p_los) * nlos.beta;
        let (a, _) = rician_weights(los.k_factor_linear);
        let specular = p_los * los.beta * a * a / beta;
        let k_factor_linear = if specular >= 1.0 { f64::INFINITY } else { specular / (1.0 - specular) };
        let pathloss_gain = p_los * los.pathloss_gain * los.shadowing_gain + (1.0 - p_los) * nlos.pathloss_gain * nlos.shadowing_gain;
        Self {
            los: p_los >= 0.5,
            los_weight: p_los,
            pathloss_db: -10.0 * pathloss_gain.log10(),
            shadowing_db: 0.0,
            antenna_gain_dbi: los.antenna_gain_dbi,
            pathloss_gain,
            shadowing_gain: 1.0,
            antenna_gain: los.antenna_gain,
            beta,
            k_factor_linear,
        }
    }
}

/// β = 10^((−PL + SF + G)/10).
pub fn compose_large_scale(pathloss_db: f64, shadowing_db: f64, antenna_gain_dbi: f64) -> f64 {
    db_to_linear(-pathloss_db + shadowing_db + antenna_gain_dbi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;
    use crate::rng::{substream, Stream};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params() -> LosGeometryParams {
        LosGeometryParams::from_config(&ScenarioConfig::default())
    }

    fn link(d2d: f64, dh: f64) -> LinkGeometry {
        LinkGeometry::between(Vec3::new(0.0, 0.0, dh), Vec3::new(1.0, 0.0, 0.0), Vec3::new(d2d, 0.0, 0.0)).unwrap()
    }

    #[test]
    fn region_weights_sum_to_one() {
        let p = params();
        assert_relative_eq!(p.area(), 1664.65, epsilon = 1e-9);
        let (ws, wc) = p.region_weights();
        assert_relative_eq!(ws, 689.52 / 1664.65, max_relative = 1e-12);
        assert_relative_eq!(wc, 285.61 / 1664.65, max_relative = 1e-12);
        assert_relative_eq!(wc, 0.1716, epsilon = 1e-4);
        assert_eq!((2.0 * p.street_s_m * p.building_w_m + p.street_s_m * p.street_s_m) / p.area(), 1.0);
    }

    #[test]
    fn street_table_shape() {
        let t = StreetLosTable::shared(params());
        assert!((t.probability(90.0) - 1.0).abs() <= 0.01);
        assert!(t.probability(60.0) >= t.probability(30.0));
        for w in t.values.windows(2) {
            assert!(w[1] >= w[0]);
        }
        for v in &t.values {
            assert!((0.0..=1.0).contains(v));
        }
        assert!(t.probability(30.0) > 0.1 && t.probability(30.0) < 0.35);
    }

    #[test]
    fn street_region_ordering() {
        // A crossroad sees more sky than a street at moderate elevation.
        let r = region_los(&params(), 45.0);
        assert!(r.p_r3 > r.p_r1);
        assert_relative_eq!(r.p_r1, r.p_r2, epsilon = 1e-9);
    }

    #[test]
    fn single_building_ray() {
        // Ray along +x from the middle of a street: first building spans
        // x in [W+P, W+P+W] ... enter at r = P - (x0 - 0) with x0 in street.
        let p = params();
        let pitch = p.building_w_m + p.street_s_m;
        let x0 = p.building_w_m + 0.5 * p.street_s_m;
        let y0 = 0.5 * p.building_w_m;
        let mut scratch = (Vec::new(), Vec::new());
        let el = 40.0f64;
        let got = ray_los_probability(&p, x0, y0, el, 0.0, &mut scratch);
        let t = el.to_radians().tan();
        let r_max = (6.0 * p.height_scale_m - p.h_ue_m) / t;
        let mut oracle = 1.0;
        let mut k = 1.0;
        loop {
            let entry = k * pitch - x0;
            if entry >= r_max {
                break;
            }
            let h = p.h_ue_m + entry * t;
            oracle *= 1.0 - (-h * h / (2.0 * p.height_scale_m.powi(2))).exp();
            k += 1.0;
        }
        assert_relative_eq!(got, oracle, max_relative = 1e-12);
    }

    #[test]
    fn ntn_table_lookup() {
        assert_eq!(ntn_table(&NTN_DU_LOS_PERCENT, 10.0), 28.2);
        assert_eq!(ntn_table(&NTN_DU_LOS_PERCENT, 90.0), 98.1);
        assert_relative_eq!(ntn_table(&NTN_DU_LOS_PERCENT, 35.0), (39.8 + 46.8) / 2.0, epsilon = 1e-12);
        assert_eq!(ntn_table(&NTN_DU_LOS_PERCENT, 3.0), 28.2);
    }

    #[test]
    fn ntn_tables_integrity() {
        for w in NTN_DU_LOS_PERCENT.windows(2) {
            assert!(w[1] > w[0]);
        }
        for w in NTN_DU_CLUTTER_DB.windows(2) {
            assert!(w[1] <= w[0]);
        }
        for w in NTN_DU_SF_NLOS_DB.windows(2) {
            assert!(w[1] <= w[0]);
        }
        for (l, n) in NTN_DU_SF_LOS_DB.iter().zip(NTN_DU_SF_NLOS_DB) {
            assert!(*l < n);
        }
        let sum: f64 = NTN_DU_LOS_PERCENT.iter().sum();
        assert_relative_eq!(sum, 516.7, epsilon = 1e-9);
        let sum: f64 = NTN_DU_CLUTTER_DB.iter().sum();
        assert_relative_eq!(sum, 251.7, epsilon = 1e-9);
    }

    #[test]
    fn los_probability_domain() {
        assert!(matches!(los_probability(0.0, 5_000.0, &params()), Err(Error::Domain(_))));
        assert_relative_eq!(los_probability(90.0, 12_000.0, &params()).unwrap(), 0.981, epsilon = 1e-12);
    }

    /// Link whose slant distance is `d3d` under a 25 m mast.
    fn uma_link(d3d: f64) -> LinkGeometry {
        let dh = 23.5;
        link((d3d * d3d - dh * dh).sqrt(), dh)
    }

    #[test]
    fn uma_examples() {
        let l = uma_link(100.0);
        let pl = tn_pathloss(&l, true, 3.5e9, 25.0, 1.5).unwrap();
        assert_relative_eq!(pl, 28.0 + 22.0 * 2.0 + 20.0 * 3.5f64.log10(), max_relative = 1e-12);
        assert_relative_eq!(pl, 82.9, epsilon = 0.05);
        assert!(tn_pathloss(&l, false, 3.5e9, 25.0, 1.5).unwrap() >= pl);
        assert!(matches!(tn_pathloss(&link(5_001.0, 23.5), true, 2e9, 25.0, 1.5), Err(Error::ModelRange(_))));
    }

    #[test]
    fn uma_los_slope() {
        let pa = tn_pathloss(&uma_link(120.0), true, 3.5e9, 25.0, 1.5).unwrap();
        let pb = tn_pathloss(&uma_link(240.0), true, 3.5e9, 25.0, 1.5).unwrap();
        assert_relative_eq!(pb - pa, 22.0 * 2f64.log10(), epsilon = 1e-9);
    }

    #[test]
    fn uma_los_probability_values() {
        assert_eq!(uma_los_probability(10.0), 1.0);
        let d = 200.0f64;
        assert_relative_eq!(uma_los_probability(d), 18.0 / d + (-d / 63.0).exp() * (1.0 - 18.0 / d), max_relative = 1e-15);
    }

    #[test]
    fn fspl_examples() {
        assert_relative_eq!(fspl_db(8_001.7, 3.5e9), 121.39, epsilon = 0.005);
        assert_relative_eq!(fspl_db(2_000.0, 3.5e9) - fspl_db(1_000.0, 3.5e9), 20.0 * 2f64.log10(), epsilon = 1e-9);
    }

    #[test]
    fn ntn_breakdown() {
        let cfg = ScenarioConfig::default();
        let l = link(500.0, 8_000.0);
        let b = ntn_pathloss(&l, true, 3.5e9, &cfg);
        assert_eq!(b.clutter_db, 0.0);
        assert_eq!(b.rain_db, 0.0);
        assert_eq!(b.cloud_db, 0.0);
        assert_relative_eq!(b.total_db(), b.fspl_db + b.clutter_db + b.gaseous_db + b.scintillation_db, epsilon = 1e-12);
        let n = ntn_pathloss(&l, false, 3.5e9, &cfg);
        assert!(n.clutter_db > 25.0);
    }

    #[test]
    fn compose_examples() {
        assert_relative_eq!(compose_large_scale(100.0, 0.0, 0.0), 1e-10, max_relative = 1e-12);
        assert_relative_eq!(compose_large_scale(121.39, 0.0, 43.93), 10f64.powf(-7.746), max_relative = 1e-12);
        assert_relative_eq!(10f64.powf(-7.746), 1.7947e-8, max_relative = 1e-4);
        let s = LargeScaleState::new(true, 90.0, 3.0, 10.0, 1.0);
        assert_eq!(s.beta, s.pathloss_gain * s.shadowing_gain * s.antenna_gain);
    }

    #[test]
    fn shadowing_moments() {
        let mut rng = substream(11, Stream::LargeScale, 0, 0, 0);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| shadowing_sample(&mut rng, true, ShadowingRegime::TerrestrialUma)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let std = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        assert!(mean.abs() < 0.05, "{mean}");
        assert!((std - 4.0).abs() / 4.0 < 0.02, "{std}");
        assert_eq!(shadowing_sample(&mut rng, false, ShadowingRegime::Fixed { sigma_db: 0.0 }), 0.0);
    }

    #[test]
    fn rician_pure_los() {
        let mut rng = substream(1, Stream::Fading, 0, 0, 0);
        let f = rician_fade(&mut rng, f64::INFINITY, 50);
        for h in f.coefficients() {
            assert_relative_eq!(h.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rician_normalization() {
        for k in [0.0, 1.0, 10.0, 100.0] {
            let mut rng = substream(2, Stream::Fading, 0, k as u64, 0);
            let f = rician_fade(&mut rng, k, 100_000);
            let m = f.coefficients().map(|h| h.norm_sqr()).sum::<f64>() / 1e5;
            assert!((m - 1.0).abs() < 0.02, "K={k}: {m}");
        }
    }

    #[test]
    fn rayleigh_power_is_exponential() {
        let mut rng = substream(3, Stream::Fading, 0, 0, 0);
        let f = rician_fade(&mut rng, 0.0, 100_000);
        let below_median = f.coefficients().filter(|h| h.norm_sqr() < std::f64::consts::LN_2).count();
        assert!((below_median as f64 / 1e5 - 0.5).abs() < 0.01);
    }

    #[test]
    fn expectation_mixture() {
        let l = LargeScaleState::new(true, 100.0, 0.0, 0.0, 10.0);
        let n = LargeScaleState::new(false, 110.0, 0.0, 0.0, 0.0);
        let e = LargeScaleState::expectation(0.5, &l, &n);
        assert_relative_eq!(e.beta, 0.5 * 1e-10 + 0.5 * 1e-11, max_relative = 1e-12);
        let spec = 0.5 * 1e-10 * 10.0 / 11.0;
        assert_relative_eq!(e.k_factor_linear, spec / (e.beta - spec), max_relative = 1e-12);
        let all = LargeScaleState::expectation(1.0, &l, &n);
        assert_relative_eq!(all.k_factor_linear, 10.0, max_relative = 1e-9);
    }

    proptest! {
        #[test]
        fn ntn_pathloss_increasing(d in 1_000.0f64..30_000.0, step in 1.0f64..1_000.0, los: bool) {
            let cfg = ScenarioConfig::default();
            let mut a = link(500.0, 8_000.0);
            let mut b = a;
            a.d3d_m = d;
            b.d3d_m = d + step;
            prop_assert!(ntn_pathloss(&b, los, 3.5e9, &cfg).total_db() > ntn_pathloss(&a, los, 3.5e9, &cfg).total_db());
        }

        #[test]
        fn street_probability_bounded_monotone(e1 in 0.1f64..90.0, e2 in 0.1f64..90.0) {
            let t = StreetLosTable::shared(params());
            let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
            prop_assert!(t.probability(lo) <= t.probability(hi));
            prop_assert!((0.0..=1.0).contains(&t.probability(lo)));
        }

        #[test]
        fn table_probability_monotone(e1 in 0.1f64..90.0, e2 in 0.1f64..90.0) {
            let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
            prop_assert!(ntn_table(&NTN_DU_LOS_PERCENT, lo) <= ntn_table(&NTN_DU_LOS_PERCENT, hi));
        }

        #[test]
        fn uma_probability_bounded(d in 0.0f64..5_000.0) {
            let p = uma_los_probability(d);
            prop_assert!((0.0..=1.0).contains(&p));
        }

        #[test]
        fn compose_is_multiplicative(a in -50.0f64..200.0, b in -50.0f64..200.0) {
            let lhs = compose_large_scale(a + b, 0.0, 0.0);
            let rhs = compose_large_scale(a, 0.0, 0.0) * compose_large_scale(b, 0.0, 0.0);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(f64::MIN_POSITIVE));
        }
    }
}
