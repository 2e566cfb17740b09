//! Scenario configuration, validation and the radio constants derived from it.
//!
//! A [`ScenarioConfig`] describes one deployment: terrestrial 4G, terrestrial
//! 5G, or 5G base stations carried by high-altitude platforms. Every field is
//! exposed so that quantities the reference study leaves open (transmit power,
//! noise figure, antenna panels) can be changed from a config file.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Thermal noise density at 290 K, dBm/Hz.
pub const THERMAL_NOISE_DBM_HZ: f64 = -174.0;

/// Sites in the two-ring hexagonal layout.
pub const N_SITES: usize = 19;
/// Sectors per site.
pub const SECTORS_PER_SITE: usize = 3;
/// Cells in the layout.
pub const N_CELLS: usize = N_SITES * SECTORS_PER_SITE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeploymentKind {
    #[serde(rename = "TN4G")]
    Tn4g,
    #[serde(rename = "TN5G")]
    Tn5g,
    #[serde(rename = "NTN5G")]
    Ntn5g,
}

impl DeploymentKind {
    pub const ALL: [DeploymentKind; 3] = [Self::Tn4g, Self::Tn5g, Self::Ntn5g];

    pub fn is_terrestrial(self) -> bool {
        !matches!(self, Self::Ntn5g)
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Tn4g => "TN4G",
            Self::Tn5g => "TN5G",
            Self::Ntn5g => "NTN5G",
        }
    }
}

impl std::fmt::Display for DeploymentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// How a terrestrial sector panel forms its beam.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Steering {
    /// Passive panel: the array factor is fixed at broadside and folded into
    /// the large-scale antenna gain.
    Fixed,
    /// Digital array: one beam steered at each scheduled UE.
    PerUe,
}

/// Whether the LoS state of a link is drawn or replaced by its expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LosMode {
    Draw,
    Expectation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub deployment_kind: DeploymentKind,
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub isd_m: f64,
    pub h_tn_m: f64,
    pub h_ntn_m: f64,
    pub h_ue_m: f64,
    pub n_ue: usize,
    pub aperture_radius_wavelengths: f64,
    pub building_w_m: f64,
    pub street_s_m: f64,
    pub tx_power_dbm: f64,
    pub ue_noise_figure_db: f64,
    pub aperture_efficiency: f64,
    pub n_drops: usize,
    pub rng_seed: u64,

    /// Rayleigh scale of building heights for the street-canyon LoS model.
    pub building_height_scale_m: f64,
    pub los_mode: LosMode,
    pub gaseous_db: f64,
    pub rain_db: f64,
    pub cloud_db: f64,
    pub scintillation_db: f64,
    /// Rician K of terrestrial LoS links.
    pub tn_los_k_db: f64,
    /// Mechanical downtilt of terrestrial panels.
    pub tn_downtilt_deg: f64,
    pub tn_array_rows: usize,
    pub tn_array_cols: usize,
    pub tn_steering: Steering,
    pub shadowing_enabled: bool,
    /// When false every UE hears only its serving cell.
    pub interference_enabled: bool,
}

impl ScenarioConfig {
    /// Defaults for one deployment type.
    pub fn for_kind(kind: DeploymentKind) -> Self {
        let (carrier_hz, bandwidth_hz, tx_power_dbm) = match kind {
            DeploymentKind::Tn4g => (2.0e9, 20.0e6, 46.0),
            DeploymentKind::Tn5g => (3.5e9, 100.0e6, 49.0),
            DeploymentKind::Ntn5g => (3.5e9, 100.0e6, 43.0),
        };
        let (tn_array_rows, tn_array_cols, tn_steering) = match kind {
            DeploymentKind::Tn5g => (8, 8, Steering::PerUe),
            _ => (8, 1, Steering::Fixed),
        };
        Self {
            deployment_kind: kind,
            carrier_hz,
            bandwidth_hz,
            isd_m: 500.0,
            h_tn_m: 25.0,
            h_ntn_m: 8_000.0,
            h_ue_m: 1.5,
            n_ue: 570,
            aperture_radius_wavelengths: 25.0,
            building_w_m: 40.8,
            street_s_m: 16.9,
            tx_power_dbm,
            ue_noise_figure_db: 7.0,
            aperture_efficiency: 1.0,
            n_drops: 20,
            rng_seed: 1,
            building_height_scale_m: 20.0,
            los_mode: LosMode::Draw,
            gaseous_db: 0.1,
            rain_db: 0.0,
            cloud_db: 0.0,
            scintillation_db: 0.0,
            tn_los_k_db: 9.0,
            tn_downtilt_deg: 12.0,
            tn_array_rows,
            tn_array_cols,
            tn_steering,
            shadowing_enabled: true,
            interference_enabled: true,
        }
    }

    /// NTN defaults at a given platform altitude and aperture radius.
    pub fn ntn(h_ntn_m: f64, aperture_radius_wavelengths: f64) -> Self {
        Self {
            h_ntn_m,
            aperture_radius_wavelengths,
            ..Self::for_kind(DeploymentKind::Ntn5g)
        }
    }

    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    /// Reflector aperture radius in meters.
    pub fn aperture_radius_m(&self) -> f64 {
        self.aperture_radius_wavelengths * self.wavelength_m()
    }

    pub fn validate(self) -> Result<ValidatedConfig> {
        fn positive(field: &'static str, value: f64) -> Result<()> {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(Error::Range {
                    field,
                    value,
                    expected: "finite and > 0",
                })
            }
        }
        fn non_negative(field: &'static str, value: f64) -> Result<()> {
            if value.is_finite() && value >= 0.0 {
                Ok(())
            } else {
                Err(Error::Range {
                    field,
                    value,
                    expected: "finite and >= 0",
                })
            }
        }

        positive("carrier_hz", self.carrier_hz)?;
        positive("bandwidth_hz", self.bandwidth_hz)?;
        positive("isd_m", self.isd_m)?;
        positive("h_tn_m", self.h_tn_m)?;
        positive("h_ue_m", self.h_ue_m)?;
        positive("building_w_m", self.building_w_m)?;
        positive("street_s_m", self.street_s_m)?;
        positive("building_height_scale_m", self.building_height_scale_m)?;
        for (field, value) in [
            ("gaseous_db", self.gaseous_db),
            ("rain_db", self.rain_db),
            ("cloud_db", self.cloud_db),
            ("scintillation_db", self.scintillation_db),
            ("tn_downtilt_deg", self.tn_downtilt_deg),
        ] {
            non_negative(field, value)?;
        }
        for (field, value) in [
            ("tx_power_dbm", self.tx_power_dbm),
            ("ue_noise_figure_db", self.ue_noise_figure_db),
            ("tn_los_k_db", self.tn_los_k_db),
        ] {
            if !value.is_finite() {
                return Err(Error::Range {
                    field,
                    value,
                    expected: "finite",
                });
            }
        }
        if self.n_ue == 0 {
            return Err(Error::Range {
                field: "n_ue",
                value: 0.0,
                expected: "> 0",
            });
        }
        if self.n_drops == 0 {
            return Err(Error::Range {
                field: "n_drops",
                value: 0.0,
                expected: "> 0",
            });
        }
        if !self.n_ue.is_multiple_of(N_CELLS) {
            return Err(Error::Consistency(format!(
                "n_ue = {} is not divisible by the {N_CELLS} cells",
                self.n_ue
            )));
        }
        if self.tn_downtilt_deg >= 90.0 {
            return Err(Error::Range {
                field: "tn_downtilt_deg",
                value: self.tn_downtilt_deg,
                expected: "< 90",
            });
        }
        if self.tn_array_rows == 0 || self.tn_array_cols == 0 {
            return Err(Error::Range {
                field: "tn_array_rows",
                value: (self.tn_array_rows.min(self.tn_array_cols)) as f64,
                expected: "rows and cols >= 1",
            });
        }

        if self.deployment_kind == DeploymentKind::Ntn5g {
            if !(1_000.0..=20_000.0).contains(&self.h_ntn_m) {
                return Err(Error::Range {
                    field: "h_ntn_m",
                    value: self.h_ntn_m,
                    expected: "within [1000, 20000] m",
                });
            }
            if !(5.0..=50.0).contains(&self.aperture_radius_wavelengths) {
                return Err(Error::Range {
                    field: "aperture_radius_wavelengths",
                    value: self.aperture_radius_wavelengths,
                    expected: "within [5, 50]",
                });
            }
            if !(self.aperture_efficiency > 0.0 && self.aperture_efficiency <= 1.0) {
                return Err(Error::Range {
                    field: "aperture_efficiency",
                    value: self.aperture_efficiency,
                    expected: "within (0, 1]",
                });
            }
        }

        let radio = RadioConstants::derive(&self);
        if radio.n_prb as f64 * radio.prb_bandwidth_hz > self.bandwidth_hz * (1.0 + 1e-12) {
            return Err(Error::Consistency(format!(
                "{} PRBs of {} Hz exceed the {} Hz bandwidth",
                radio.n_prb, radio.prb_bandwidth_hz, self.bandwidth_hz
            )));
        }
        Ok(ValidatedConfig { cfg: self, radio })
    }
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self::for_kind(DeploymentKind::Ntn5g)
    }
}

/// A configuration whose invariants have been checked.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedConfig {
    cfg: ScenarioConfig,
    radio: RadioConstants,
}

impl ValidatedConfig {
    pub fn radio(&self) -> &RadioConstants {
        &self.radio
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn into_inner(self) -> ScenarioConfig {
        self.cfg
    }
}

impl Deref for ValidatedConfig {
    type Target = ScenarioConfig;

    fn deref(&self) -> &ScenarioConfig {
        &self.cfg
    }
}

/// Convenience wrapper matching the free-function form used by the CLI.
pub fn validate_config(cfg: ScenarioConfig) -> Result<ValidatedConfig> {
    cfg.validate()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadioConstants {
    pub n_prb: usize,
    pub prb_bandwidth_hz: f64,
    pub noise_per_prb_dbm: f64,
    pub wavelength_m: f64,
    pub n_layers: usize,
}

impl RadioConstants {
    fn derive(cfg: &ScenarioConfig) -> Self {
        // 4G: 15 kHz numerology, 5G: 30 kHz numerology.
        let (n_prb, prb_bandwidth_hz) = match cfg.deployment_kind {
            DeploymentKind::Tn4g => (100, 180e3),
            DeploymentKind::Tn5g | DeploymentKind::Ntn5g => (273, 360e3),
        };
        Self {
            n_prb,
            prb_bandwidth_hz,
            noise_per_prb_dbm: noise_power_dbm(prb_bandwidth_hz, cfg.ue_noise_figure_db),
            wavelength_m: cfg.wavelength_m(),
            n_layers: 1,
        }
    }

    pub fn noise_per_prb_mw(&self) -> f64 {
        db_to_linear(self.noise_per_prb_dbm)
    }

    pub fn usable_bandwidth_hz(&self) -> f64 {
        self.n_prb as f64 * self.prb_bandwidth_hz
    }
}

pub fn derive_radio_constants(cfg: &ValidatedConfig) -> RadioConstants {
    cfg.radio.clone()
}

/// Thermal noise plus receiver noise figure over `bandwidth_hz`.
pub fn noise_power_dbm(bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    THERMAL_NOISE_DBM_HZ + 10.0 * bandwidth_hz.log10() + noise_figure_db
}

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}
