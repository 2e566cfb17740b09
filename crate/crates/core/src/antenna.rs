//! Antenna gain models: the platform's circular-aperture reflector and the
//! terrestrial sector panel built from 3GPP-style elements.

use serde::Serialize;

use crate::geometry::Vec3;
use crate::scenario::{ScenarioConfig, Steering};

/// First zero of J1.
pub const J1_FIRST_ZERO: f64 = 3.831_705_970_207_512;
/// Argument at which (2·J1(x)/x)² falls to one half.
pub const J1_HALF_POWER_ARG: f64 = 1.616_338;
/// Floor applied to every pattern relative to its peak, dB.
pub const PATTERN_FLOOR_DB: f64 = -60.0;

const PATTERN_FLOOR_LIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReflectorAntenna {
    pub radius_wavelengths: f64,
    pub efficiency: f64,
    pub peak_gain_dbi: f64,
    pub ka: f64,
    pub hpbw_deg: f64,
}

impl ReflectorAntenna {
    pub fn new(radius_wavelengths: f64, efficiency: f64) -> Self {
        let ka = 2.0 * std::f64::consts::PI * radius_wavelengths;
        Self {
            radius_wavelengths,
            efficiency,
            peak_gain_dbi: 10.0 * (efficiency * ka * ka).log10(),
            ka,
            hpbw_deg: 2.0 * (J1_HALF_POWER_ARG / ka).min(1.0).asin().to_degrees(),
        }
    }

    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        Self::new(cfg.aperture_radius_wavelengths, cfg.aperture_efficiency)
    }

    /// Pattern relative to peak, linear, floored.
    pub fn normalized_linear(&self, offboresight_deg: f64) -> f64 {
        let theta = offboresight_deg.abs().to_radians();
        if theta >= std::f64::consts::FRAC_PI_2 {
            return PATTERN_FLOOR_LIN;
        }
        let x = self.ka * theta.sin();
        if x < 1e-9 {
            return 1.0;
        }
        let a = 2.0 * libm::j1(x) / x;
        (a * a).max(PATTERN_FLOOR_LIN)
    }

    pub fn peak_linear(&self) -> f64 {
        self.efficiency * self.ka * self.ka
    }

    pub fn gain_linear(&self, offboresight_deg: f64) -> f64 {
        self.peak_linear() * self.normalized_linear(offboresight_deg)
    }

    pub fn gain_dbi(&self, offboresight_deg: f64) -> f64 {
        self.peak_gain_dbi + 10.0 * self.normalized_linear(offboresight_deg).log10()
    }

    /// Angle of the first pattern null.
    pub fn first_null_deg(&self) -> f64 {
        (J1_FIRST_ZERO / self.ka).min(1.0).asin().to_degrees()
    }
}

pub fn reflector_gain(ant: &ReflectorAntenna, offboresight_deg: f64) -> f64 {
    ant.gain_dbi(offboresight_deg)
}

/// Parameters of the terrestrial element envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElementPattern {
    pub hpbw_deg: f64,
    pub side_attenuation_db: f64,
    pub peak_gain_dbi: f64,
}

impl Default for ElementPattern {
    fn default() -> Self {
        Self {
            hpbw_deg: 65.0,
            side_attenuation_db: 30.0,
            peak_gain_dbi: 8.0,
        }
    }
}

impl ElementPattern {
    /// Gain at local zenith angle `theta_deg` and azimuth `phi_deg`.
    pub fn gain_dbi(&self, theta_deg: f64, phi_deg: f64) -> f64 {
        let phi = (phi_deg + 180.0).rem_euclid(360.0) - 180.0;
        let a_v = -(12.0 * ((theta_deg - 90.0) / self.hpbw_deg).powi(2)).min(self.side_attenuation_db);
        let a_h = -(12.0 * (phi / self.hpbw_deg).powi(2)).min(self.side_attenuation_db);
        self.peak_gain_dbi - (-(a_v + a_h)).min(self.side_attenuation_db)
    }
}

pub fn tn_element_gain(pattern: &ElementPattern, theta_deg: f64, phi_deg: f64) -> f64 {
    pattern.gain_dbi(theta_deg, phi_deg)
}

/// Local spherical angles of a global direction for a panel facing
/// `azimuth_deg` and tilted `downtilt_deg` below the horizon.
///
/// Returns `(theta, phi)` in degrees: zenith angle from the panel's vertical
/// axis and azimuth from its broadside.
pub fn to_local(direction: Vec3, azimuth_deg: f64, downtilt_deg: f64) -> (f64, f64) {
    let (sa, ca) = azimuth_deg.to_radians().sin_cos();
    let x1 = direction.x * ca + direction.y * sa;
    let y1 = -direction.x * sa + direction.y * ca;
    let z1 = direction.z;
    let (st, ct) = downtilt_deg.to_radians().sin_cos();
    let x2 = x1 * ct - z1 * st;
    let z2 = x1 * st + z1 * ct;
    let n = (x2 * x2 + y1 * y1 + z2 * z2).sqrt();
    let theta = (z2 / n).clamp(-1.0, 1.0).acos().to_degrees();
    let phi = y1.atan2(x2).to_degrees();
    (theta, phi)
}

/// |Σ_{m<n} e^{j m p}|², the squared Dirichlet kernel.
#[inline]
fn dirichlet_sq(n: usize, p: f64) -> f64 {
    let half = 0.5 * p;
    let s = half.sin();
    if s.abs() < 1e-9 {
        return (n * n) as f64;
    }
    let num = (n as f64 * half).sin();
    (num * num) / (s * s)
}

/// Power array factor of a half-wavelength uniform planar array in the local
/// y-z plane, steered to `steer` and evaluated at `eval`, both `(theta, phi)`
/// in degrees. Ranges over `[0, rows·cols]`.
pub fn array_factor(rows: usize, cols: usize, steer: (f64, f64), eval: (f64, f64)) -> f64 {
    let (ts, ps) = (steer.0.to_radians(), steer.1.to_radians());
    let (te, pe) = (eval.0.to_radians(), eval.1.to_radians());
    let dv = te.cos() - ts.cos();
    let du = te.sin() * pe.sin() - ts.sin() * ps.sin();
    let pi = std::f64::consts::PI;
    dirichlet_sq(rows, pi * dv) * dirichlet_sq(cols, pi * du) / (rows * cols) as f64
}

/// Precomputed array-phase coordinates of one direction, so that array
/// factors between many direction pairs avoid trigonometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayCoords {
    pub u: f64,
    pub v: f64,
}

impl ArrayCoords {
    pub fn new(theta_deg: f64, phi_deg: f64) -> Self {
        let (t, p) = (theta_deg.to_radians(), phi_deg.to_radians());
        Self {
            u: t.sin() * p.sin(),
            v: t.cos(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorAntenna {
    pub element: ElementPattern,
    pub rows: usize,
    pub cols: usize,
    pub steering: Steering,
    pub downtilt_deg: f64,
}

impl SectorAntenna {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        Self {
            element: ElementPattern::default(),
            rows: cfg.tn_array_rows,
            cols: cfg.tn_array_cols,
            steering: cfg.tn_steering,
            downtilt_deg: cfg.tn_downtilt_deg,
        }
    }

    pub fn n_elements(&self) -> usize {
        self.rows * self.cols
    }

    /// Floored array factor between precomputed coordinates.
    #[inline]
    pub fn array_factor_coords(&self, steer: ArrayCoords, eval: ArrayCoords) -> f64 {
        let pi = std::f64::consts::PI;
        let af = dirichlet_sq(self.rows, pi * (eval.v - steer.v)) * dirichlet_sq(self.cols, pi * (eval.u - steer.u))
            / self.n_elements() as f64;
        af.max(self.n_elements() as f64 * PATTERN_FLOOR_LIN)
    }

    /// Gain entering the large-scale term and association. A fixed panel
    /// includes its broadside array factor; a steered array contributes only
    /// the element here and its array gain per scheduled beam.
    pub fn large_scale_gain_dbi(&self, theta_deg: f64, phi_deg: f64) -> f64 {
        let element = self.element.gain_dbi(theta_deg, phi_deg);
        match self.steering {
            Steering::Fixed => {
                let af = self.array_factor_coords(ArrayCoords::new(90.0, 0.0), ArrayCoords::new(theta_deg, phi_deg));
                element + 10.0 * af.log10()
            }
            Steering::PerUe => element,
        }
    }

    /// Element plus array gain with the beam steered to `serving` and
    /// evaluated at `eval`, both local `(theta, phi)` in degrees.
    pub fn beam_gain_dbi(&self, serving: (f64, f64), eval: (f64, f64)) -> f64 {
        let af = self.array_factor_coords(ArrayCoords::new(serving.0, serving.1), ArrayCoords::new(eval.0, eval.1));
        self.element.gain_dbi(eval.0, eval.1) + 10.0 * af.log10()
    }
}

/// Gain of a sector panel facing `azimuth_deg` whose beam serves the global
/// direction `serving_direction`, evaluated toward `eval_direction`.
pub fn tn_beam_gain(ant: &SectorAntenna, azimuth_deg: f64, serving_direction: Vec3, eval_direction: Vec3) -> f64 {
    let s = to_local(serving_direction, azimuth_deg, ant.downtilt_deg);
    let e = to_local(eval_direction, azimuth_deg, ant.downtilt_deg);
    ant.beam_gain_dbi(s, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn reflector_peak_and_null() {
        let ant = ReflectorAntenna::new(25.0, 1.0);
        assert_eq!(ant.gain_dbi(0.0), ant.peak_gain_dbi);
        assert_relative_eq!(ant.peak_gain_dbi, 43.93, epsilon = 0.011);
        let oracle_null = (3.8317 / (2.0 * std::f64::consts::PI * 25.0)).asin().to_degrees();
        assert_relative_eq!(ant.first_null_deg(), oracle_null, max_relative = 1e-3);
        assert_relative_eq!(ant.first_null_deg(), 1.398, epsilon = 5e-4);
        assert_relative_eq!(ant.gain_dbi(ant.first_null_deg()), ant.peak_gain_dbi + PATTERN_FLOOR_DB, epsilon = 1e-9);
    }

    #[test]
    fn reflector_half_power() {
        for r in [5.0, 10.0, 25.0, 50.0] {
            let ant = ReflectorAntenna::new(r, 1.0);
            assert_relative_eq!(ant.gain_dbi(ant.hpbw_deg / 2.0) - ant.peak_gain_dbi, -3.0103, epsilon = 0.01);
            let rule = 58.9 / (2.0 * r);
            assert!((ant.hpbw_deg - rule).abs() / rule < 0.02, "r={r}");
        }
        assert_relative_eq!(ReflectorAntenna::new(10.0, 1.0).hpbw_deg, 2.948, epsilon = 5e-4);
    }

    #[test]
    fn element_examples() {
        let p = ElementPattern::default();
        assert_eq!(p.gain_dbi(90.0, 0.0), 8.0);
        assert_relative_eq!(p.gain_dbi(90.0, 65.0), -4.0, epsilon = 1e-12);
        assert_relative_eq!(p.gain_dbi(90.0, 180.0), -22.0, epsilon = 1e-12);
    }

    #[test]
    fn beam_gain_examples() {
        let cfg = ScenarioConfig::for_kind(crate::scenario::DeploymentKind::Tn5g);
        let ant = SectorAntenna::from_config(&cfg);
        let d = (90.0, 0.0);
        assert_relative_eq!(ant.beam_gain_dbi(d, d), 8.0 + 10.0 * 64f64.log10(), epsilon = 1e-9);
        // First horizontal null of an 8-element row steered at broadside.
        let null_phi = (2.0f64 / 8.0).asin().to_degrees();
        let g = ant.beam_gain_dbi(d, (90.0, null_phi));
        assert!(g < 8.0 + 18.06 + PATTERN_FLOOR_DB + 1.0);

        let single = SectorAntenna { rows: 1, cols: 1, ..ant };
        for (t, p) in [(90.0, 0.0), (70.0, 30.0), (120.0, -100.0)] {
            assert_relative_eq!(single.beam_gain_dbi((80.0, 10.0), (t, p)), ant.element.gain_dbi(t, p), epsilon = 1e-12);
        }
    }

    #[test]
    fn fixed_column_peak() {
        let cfg = ScenarioConfig::for_kind(crate::scenario::DeploymentKind::Tn4g);
        let ant = SectorAntenna::from_config(&cfg);
        assert_relative_eq!(ant.large_scale_gain_dbi(90.0, 0.0), 8.0 + 10.0 * 8f64.log10(), epsilon = 1e-12);
    }

    #[test]
    fn local_frame() {
        // Boresight of a panel tilted 12 degrees down.
        let t = 12f64.to_radians();
        let az = 150f64.to_radians();
        let b = Vec3::new(az.cos() * t.cos(), az.sin() * t.cos(), -t.sin());
        let (theta, phi) = to_local(b, 150.0, 12.0);
        assert_relative_eq!(theta, 90.0, epsilon = 1e-9);
        assert_relative_eq!(phi, 0.0, epsilon = 1e-9);
        let (theta, _) = to_local(Vec3::new(0.0, 0.0, 1.0), 0.0, 0.0);
        assert_relative_eq!(theta, 0.0, epsilon = 1e-9);
        let (_, phi) = to_local(Vec3::new(0.0, 1.0, 0.0), 0.0, 0.0);
        assert_relative_eq!(phi, 90.0, epsilon = 1e-9);
    }

    fn explicit_af(rows: usize, cols: usize, steer: (f64, f64), eval: (f64, f64)) -> f64 {
        let c = |t: f64, p: f64| {
            let (t, p) = (t.to_radians(), p.to_radians());
            (t.sin() * p.sin(), t.cos())
        };
        let (us, vs) = c(steer.0, steer.1);
        let (ue, ve) = c(eval.0, eval.1);
        let (mut re, mut im) = (0.0, 0.0);
        for m in 0..rows {
            for n in 0..cols {
                let ph = std::f64::consts::PI * (n as f64 * (ue - us) + m as f64 * (ve - vs));
                re += ph.cos();
                im += ph.sin();
            }
        }
        (re * re + im * im) / (rows * cols) as f64
    }

    proptest! {
        #[test]
        fn reflector_even_and_bounded(r in 5.0f64..50.0, th in 0.0f64..90.0) {
            let ant = ReflectorAntenna::new(r, 1.0);
            prop_assert!(ant.gain_dbi(th) <= ant.peak_gain_dbi + 1e-12);
            prop_assert_eq!(ant.gain_dbi(th), ant.gain_dbi(-th));
        }

        #[test]
        fn reflector_main_lobe_monotone(r in 5.0f64..50.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let ant = ReflectorAntenna::new(r, 1.0);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let n = ant.first_null_deg();
            prop_assert!(ant.gain_dbi(lo * n) >= ant.gain_dbi(hi * n) - 1e-9);
        }

        #[test]
        fn hpbw_shrinks_with_aperture(a in 5.0f64..50.0, d in 0.01f64..10.0) {
            prop_assert!(ReflectorAntenna::new(a + d, 1.0).hpbw_deg < ReflectorAntenna::new(a, 1.0).hpbw_deg);
        }

        #[test]
        fn element_symmetric(theta in 0.0f64..180.0, phi in 0.0f64..180.0) {
            let p = ElementPattern::default();
            prop_assert!((p.gain_dbi(theta, phi) - p.gain_dbi(theta, -phi)).abs() < 1e-12);
            prop_assert!((p.gain_dbi(theta, phi) - p.gain_dbi(180.0 - theta, phi)).abs() < 1e-12);
        }

        #[test]
        fn array_factor_matches_element_sum(
            rows in 1usize..9, cols in 1usize..9,
            ts in 30.0f64..150.0, ps in -80.0f64..80.0,
            te in 0.0f64..180.0, pe in -180.0f64..180.0,
        ) {
            let af = array_factor(rows, cols, (ts, ps), (te, pe));
            let oracle = explicit_af(rows, cols, (ts, ps), (te, pe));
            prop_assert!((af - oracle).abs() <= 1e-9 * (rows * cols) as f64);
            prop_assert!(af <= (rows * cols) as f64 + 1e-9);
        }

        #[test]
        fn steered_beam_peaks_at_target(
            ts in 40.0f64..140.0, ps in -70.0f64..70.0,
            te in 0.0f64..180.0, pe in -180.0f64..180.0,
        ) {
            let ant = SectorAntenna {
                element: ElementPattern::default(),
                rows: 8,
                cols: 8,
                steering: Steering::PerUe,
                downtilt_deg: 12.0,
            };
            let peak = ant.beam_gain_dbi((ts, ps), (ts, ps));
            prop_assert!(peak >= ant.beam_gain_dbi((ts, ps), (te, pe)) - 1e-9 || ant.element.gain_dbi(te, pe) > ant.element.gain_dbi(ts, ps));
            prop_assert!(peak <= 8.0 + 10.0 * 64f64.log10() + 1e-9);
        }
    }
}
