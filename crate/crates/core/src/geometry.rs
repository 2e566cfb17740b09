//! Hexagonal site layout, sector geometry, UE drops and per-link distances.
//!
//! Coordinates are meters in a ground-fixed frame with the central site at the
//! origin and `z` pointing up. Azimuths are measured counter-clockwise from
//! the `x` axis.

use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{substream, Stream};
use crate::scenario::{ValidatedConfig, N_CELLS, N_SITES, SECTORS_PER_SITE};

/// Boresight azimuths of the three sectors of every site.
pub const SECTOR_AZIMUTHS_DEG: [f64; SECTORS_PER_SITE] = [30.0, 150.0, 270.0];

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn horizontal_norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn unit(self) -> Vec3 {
        self * (1.0 / self.norm())
    }

    /// Unit vector on the ground plane at `azimuth_deg`.
    pub fn from_azimuth(azimuth_deg: f64) -> Vec3 {
        let (s, c) = azimuth_deg.to_radians().sin_cos();
        Vec3::new(c, s, 0.0)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Ground positions of the 19 sites: the center, six at one ISD, twelve on
/// the second ring.
pub fn hex_sites(isd_m: f64) -> Vec<[f64; 2]> {
    let mut sites = Vec::with_capacity(N_SITES);
    sites.push([0.0, 0.0]);
    for k in 0..6 {
        let d = Vec3::from_azimuth(30.0 + 60.0 * k as f64) * isd_m;
        sites.push([d.x, d.y]);
    }
    for k in 0..6 {
        let d = Vec3::from_azimuth(30.0 + 60.0 * k as f64) * (2.0 * isd_m);
        sites.push([d.x, d.y]);
        let d = Vec3::from_azimuth(60.0 + 60.0 * k as f64) * (3f64.sqrt() * isd_m);
        sites.push([d.x, d.y]);
    }
    sites
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellGeometry {
    pub cell_index: usize,
    pub site_index: usize,
    pub azimuth_deg: f64,
    /// Reflector tilt away from nadir; `None` for terrestrial cells.
    pub tilt_from_vertical_deg: Option<f64>,
    /// Panel downtilt below the horizon; `None` for platform cells.
    pub mechanical_downtilt_deg: Option<f64>,
    /// Where the boresight ray meets the ground.
    pub boresight_ground_point: [f64; 2],
    pub tx_height_m: f64,
    /// Transmitter position.
    pub tx: Vec3,
    /// Unit boresight direction.
    pub boresight: Vec3,
    /// Center of the hexagonal sector region UEs are dropped in.
    pub region_center: [f64; 2],
    /// Circumradius of the sector region.
    pub region_radius_m: f64,
}

impl CellGeometry {
    /// Whether a ground point lies in this sector's hexagonal region.
    ///
    /// The region is a hexagon of circumradius ISD/3 with one vertex at the
    /// site, so the three sectors of a site tile the site's cell.
    pub fn region_contains(&self, x: f64, y: f64) -> bool {
        let dx = x - self.region_center[0];
        let dy = y - self.region_center[1];
        let apothem = self.region_radius_m * 3f64.sqrt() / 2.0;
        (0..6).all(|k| {
            let n = Vec3::from_azimuth(self.azimuth_deg + 30.0 + 60.0 * k as f64);
            dx * n.x + dy * n.y <= apothem + 1e-9
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UePosition {
    pub x: f64,
    pub y: f64,
    pub h: f64,
    /// Cell whose region the UE was dropped in (not necessarily its server).
    pub region_cell: usize,
}

impl UePosition {
    pub fn position(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.h)
    }
}

/// Sites and cells, independent of any UE drop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Layout {
    pub sites: Vec<[f64; 2]>,
    pub cells: Vec<CellGeometry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deployment {
    pub sites: Vec<[f64; 2]>,
    pub cells: Vec<CellGeometry>,
    pub ues: Vec<UePosition>,
}

/// Reflector tilt away from nadir that points the boresight at the sector
/// center, ISD/3 from the site nadir.
pub fn compute_tilt(isd_m: f64, h_ntn_m: f64) -> Result<f64> {
    if !(h_ntn_m > 0.0) {
        return Err(Error::Domain(format!("platform height must be > 0, got {h_ntn_m}")));
    }
    Ok((isd_m / (3.0 * h_ntn_m)).atan().to_degrees())
}

/// Half-power footprint radius on the ground below a nadir-adjacent beam.
pub fn footprint_radius(h_ntn_m: f64, hpbw_deg: f64) -> f64 {
    h_ntn_m * (hpbw_deg.to_radians() / 2.0).tan()
}

impl Layout {
    pub fn new(cfg: &ValidatedConfig) -> Self {
        let isd = cfg.isd_m;
        let sites = hex_sites(isd);
        let terrestrial = cfg.deployment_kind.is_terrestrial();
        let region_radius_m = isd / 3.0;
        let mut cells = Vec::with_capacity(N_CELLS);
        for (site_index, site) in sites.iter().enumerate() {
            for (s, &az) in SECTOR_AZIMUTHS_DEG.iter().enumerate() {
                let dir = Vec3::from_azimuth(az);
                let region_center = [site[0] + dir.x * region_radius_m, site[1] + dir.y * region_radius_m];
                let cell_index = site_index * SECTORS_PER_SITE + s;
                let cell = if terrestrial {
                    let tx = Vec3::new(site[0], site[1], cfg.h_tn_m);
                    let t = cfg.tn_downtilt_deg.to_radians();
                    let boresight = Vec3::new(dir.x * t.cos(), dir.y * t.cos(), -t.sin());
                    let reach = if t > 0.0 { (cfg.h_tn_m - cfg.h_ue_m) / t.tan() } else { f64::INFINITY };
                    CellGeometry {
                        cell_index,
                        site_index,
                        azimuth_deg: az,
                        tilt_from_vertical_deg: None,
                        mechanical_downtilt_deg: Some(cfg.tn_downtilt_deg),
                        boresight_ground_point: [site[0] + dir.x * reach, site[1] + dir.y * reach],
                        tx_height_m: cfg.h_tn_m,
                        tx,
                        boresight,
                        region_center,
                        region_radius_m,
                    }
                } else {
                    let tx = Vec3::new(site[0], site[1], cfg.h_ntn_m);
                    let ground = Vec3::new(region_center[0], region_center[1], 0.0);
                    let alpha = compute_tilt(isd, cfg.h_ntn_m).expect("validated altitude");
                    CellGeometry {
                        cell_index,
                        site_index,
                        azimuth_deg: az,
                        tilt_from_vertical_deg: Some(alpha),
                        mechanical_downtilt_deg: None,
                        boresight_ground_point: region_center,
                        tx_height_m: cfg.h_ntn_m,
                        tx,
                        boresight: (ground - tx).unit(),
                        region_center,
                        region_radius_m,
                    }
                };
                cells.push(cell);
            }
        }
        Self { sites, cells }
    }

    /// Drops `n_ue / 57` UEs uniformly in every sector region.
    pub fn drop_ues(&self, cfg: &ValidatedConfig, drop_index: u64) -> Vec<UePosition> {
        let per_cell = cfg.n_ue / self.cells.len();
        let mut ues = Vec::with_capacity(cfg.n_ue);
        for cell in &self.cells {
            let mut rng = substream(cfg.rng_seed, Stream::UeDrop, drop_index, cell.cell_index as u64, 0);
            let r = cell.region_radius_m;
            let mut placed = 0;
            while placed < per_cell {
                let x = cell.region_center[0] + rng.random_range(-r..r);
                let y = cell.region_center[1] + rng.random_range(-r..r);
                if cell.region_contains(x, y) {
                    ues.push(UePosition {
                        x,
                        y,
                        h: cfg.h_ue_m,
                        region_cell: cell.cell_index,
                    });
                    placed += 1;
                }
            }
        }
        ues
    }

    pub fn with_ues(&self, ues: Vec<UePosition>) -> Deployment {
        Deployment {
            sites: self.sites.clone(),
            cells: self.cells.clone(),
            ues,
        }
    }
}

/// Full deployment for one drop.
pub fn build_hex_layout(cfg: &ValidatedConfig, drop_index: u64) -> Deployment {
    let layout = Layout::new(cfg);
    let ues = layout.drop_ues(cfg, drop_index);
    layout.with_ues(ues)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkGeometry {
    pub d2d_m: f64,
    pub d3d_m: f64,
    /// Angle above the UE's horizontal plane at which the transmitter is seen.
    pub elevation_deg: f64,
    /// Angle between the cell boresight and the direction to the UE.
    pub offboresight_deg: f64,
    /// Unit vector from transmitter to UE.
    pub direction: Vec3,
}

impl LinkGeometry {
    pub fn between(tx: Vec3, boresight: Vec3, ue: Vec3) -> Result<Self> {
        let v = ue - tx;
        let d3d_m = v.norm();
        if d3d_m == 0.0 {
            return Err(Error::DegenerateLink);
        }
        let d2d_m = v.horizontal_norm();
        let direction = v * (1.0 / d3d_m);
        let elevation_deg = (tx.z - ue.z).atan2(d2d_m).to_degrees();
        let offboresight_deg = direction.dot(boresight).clamp(-1.0, 1.0).acos().to_degrees();
        Ok(Self {
            d2d_m,
            d3d_m,
            elevation_deg,
            offboresight_deg,
            direction,
        })
    }
}

pub fn link_geometry(cell: &CellGeometry, ue: &UePosition) -> Result<LinkGeometry> {
    LinkGeometry::between(cell.tx, cell.boresight, ue.position())
}
