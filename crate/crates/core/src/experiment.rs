//! Monte Carlo drops, the altitude × aperture sweep, statistics and
//! interference heatmaps.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::antenna::{to_local, ArrayCoords, ReflectorAntenna, SectorAntenna};
use crate::channel::{
    ntn_pathloss, ntn_table, rician_fade_into, tn_pathloss, FadingState, LargeScaleState, LosModel,
    ShadowingRegime, NTN_DU_K_DB,
};
use crate::error::{Error, Result};
use crate::geometry::{link_geometry, CellGeometry, Layout, LinkGeometry, UePosition};
use crate::link::{associate, compute_rsrp, effective_sinr, sinr_per_prb, ue_rate, AssociationMap, BeamGain, CellLink, UeResult};
use crate::rng::{substream, Stream};
use crate::scenario::{db_to_linear, linear_to_db, LosMode, ScenarioConfig, Steering, ValidatedConfig, SECTORS_PER_SITE};

/// Everything about one drop that precedes fast fading.
#[derive(Debug, Clone)]
pub struct DropState {
    pub drop_index: u64,
    pub ues: Vec<UePosition>,
    /// Row-major `n_ue × n_cells`.
    pub large: Vec<LargeScaleState>,
    /// Local array coordinates per link; empty unless beams are steered.
    pub coords: Vec<ArrayCoords>,
    pub assoc: AssociationMap,
    /// Per cell and PRB, the position in the cell's served list of the UE
    /// its beam points at. Empty for silent cells.
    pub beam_targets: Vec<Vec<u16>>,
}

impl DropState {
    pub fn n_cells(&self) -> usize {
        self.assoc.n_cells
    }

    pub fn link(&self, ue: usize, cell: usize) -> &LargeScaleState {
        &self.large[ue * self.n_cells() + cell]
    }

    pub fn is_active(&self, cell: usize) -> bool {
        !self.assoc.served[cell].is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DropResult {
    pub drop_index: u64,
    pub ues: Vec<UeResult>,
    pub positions: Vec<UePosition>,
    pub cell_load: Vec<usize>,
}

/// Per-receiver working buffers.
#[derive(Debug, Default)]
struct Scratch {
    fading: Vec<FadingState>,
    beam: Vec<Vec<f64>>,
    member_af: Vec<f64>,
    sinr: Vec<f64>,
}

impl Scratch {
    fn new(n_cells: usize, n_prb: usize) -> Self {
        Self {
            fading: (0..n_cells)
                .map(|_| FadingState {
                    diffuse: Vec::with_capacity(n_prb),
                    ..FadingState::default()
                })
                .collect(),
            beam: vec![Vec::with_capacity(n_prb); n_cells],
            member_af: Vec::new(),
            sinr: Vec::with_capacity(n_prb),
        }
    }
}

/// Outcome of evaluating one receiver against a drop.
#[derive(Debug, Clone)]
pub struct ReceiverOutcome {
    pub serving: usize,
    pub per_prb_sinr: Vec<f64>,
    pub eff_sinr: f64,
    /// Mean over PRBs of the received serving power, mW.
    pub useful_mw: f64,
    /// Mean over PRBs of the summed interfering power, mW.
    pub interference_mw: f64,
}

/// A configured deployment ready to run drops.
#[derive(Debug, Clone)]
pub struct Simulator {
    cfg: ValidatedConfig,
    layout: Layout,
    los: LosModel,
    reflector: ReflectorAntenna,
    sector: SectorAntenna,
    prb_power_dbm: f64,
}

impl Simulator {
    pub fn new(cfg: ValidatedConfig) -> Self {
        let layout = Layout::new(&cfg);
        let los = LosModel::for_config(&cfg);
        let reflector = ReflectorAntenna::from_config(&cfg);
        let sector = SectorAntenna::from_config(&cfg);
        let prb_power_dbm = cfg.tx_power_dbm - 10.0 * (cfg.radio().n_prb as f64).log10();
        Self {
            cfg,
            layout,
            los,
            reflector,
            sector,
            prb_power_dbm,
        }
    }

    pub fn config(&self) -> &ValidatedConfig {
        &self.cfg
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn reflector(&self) -> &ReflectorAntenna {
        &self.reflector
    }

    pub fn prb_power_dbm(&self) -> f64 {
        self.prb_power_dbm
    }

    fn steered(&self) -> bool {
        self.cfg.deployment_kind.is_terrestrial() && self.sector.steering == Steering::PerUe
    }

    /// Local `(theta, phi)` of a link at a terrestrial panel.
    fn panel_angles(&self, cell: &CellGeometry, lg: &LinkGeometry) -> (f64, f64) {
        to_local(lg.direction, cell.azimuth_deg, self.sector.downtilt_deg)
    }

    fn branch(&self, cell: &CellGeometry, lg: &LinkGeometry, los: bool, z: f64, gain_dbi: f64) -> Result<LargeScaleState> {
        let cfg = &self.cfg;
        let (pl, regime, k_db) = if cfg.deployment_kind.is_terrestrial() {
            let pl = tn_pathloss(lg, los, cfg.carrier_hz, cell.tx_height_m, cfg.h_ue_m)?;
            (pl, ShadowingRegime::TerrestrialUma, cfg.tn_los_k_db)
        } else {
            let pl = ntn_pathloss(lg, los, cfg.carrier_hz, cfg).total_db();
            let regime = ShadowingRegime::Ntn { elevation_deg: lg.elevation_deg };
            (pl, regime, ntn_table(&NTN_DU_K_DB, lg.elevation_deg))
        };
        let sf = if cfg.shadowing_enabled { regime.sigma_db(los) * z } else { 0.0 };
        let k = if los { db_to_linear(k_db) } else { 0.0 };
        Ok(LargeScaleState::new(los, pl, sf, gain_dbi, k))
    }

    /// Large-scale state of one link given its LoS uniform `u` and standard
    /// normal shadowing variate `z`, plus the link's array coordinates.
    pub fn link_state(&self, cell: &CellGeometry, rx: &UePosition, u: f64, z: f64) -> Result<(LargeScaleState, ArrayCoords)> {
        let lg = link_geometry(cell, rx)?;
        let (gain_dbi, coords) = if self.cfg.deployment_kind.is_terrestrial() {
            let (t, p) = self.panel_angles(cell, &lg);
            (self.sector.large_scale_gain_dbi(t, p), ArrayCoords::new(t, p))
        } else {
            (self.reflector.gain_dbi(lg.offboresight_deg), ArrayCoords { u: 0.0, v: 0.0 })
        };
        let p_los = self.los.probability(&lg)?;
        let state = match self.cfg.los_mode {
            LosMode::Draw => self.branch(cell, &lg, u < p_los, z, gain_dbi)?,
            LosMode::Expectation => {
                let l = self.branch(cell, &lg, true, z, gain_dbi)?;
                let n = self.branch(cell, &lg, false, z, gain_dbi)?;
                LargeScaleState::expectation(p_los, &l, &n)
            }
        };
        Ok((state, coords))
    }

    /// Large-scale states from one receiver to every cell. LoS and
    /// shadowing variates are drawn per site and shared by its sectors.
    fn receiver_links(&self, rx: &UePosition, stream: Stream, drop: u64, key: u64) -> Result<(Vec<LargeScaleState>, Vec<ArrayCoords>)> {
        let n = self.layout.cells.len();
        let mut large = Vec::with_capacity(n);
        let mut coords = Vec::with_capacity(n);
        for site in 0..self.layout.sites.len() {
            let mut rng = substream(self.cfg.rng_seed, stream, drop, key, site as u64);
            let u: f64 = rng.random();
            let z: f64 = StandardNormal.sample(&mut rng);
            for cell in &self.layout.cells[site * SECTORS_PER_SITE..(site + 1) * SECTORS_PER_SITE] {
                let (s, c) = self.link_state(cell, rx, u, z)?;
                large.push(s);
                coords.push(c);
            }
        }
        Ok((large, coords))
    }

    fn rsrp_row<'a>(&'a self, large: &'a [LargeScaleState]) -> impl Iterator<Item = f64> + 'a {
        large.iter().map(move |s| compute_rsrp(self.prb_power_dbm, s.beta))
    }

    /// Drops UEs, draws large-scale states, associates and picks the beam
    /// each interfering cell points on every PRB.
    pub fn prepare_drop(&self, drop_index: u64) -> Result<DropState> {
        let ues = self.layout.drop_ues(&self.cfg, drop_index);
        let rows: Vec<_> = ues
            .par_iter()
            .enumerate()
            .map(|(i, ue)| self.receiver_links(ue, Stream::LargeScale, drop_index, i as u64))
            .collect::<Result<_>>()?;
        let steered = self.steered();
        let mut large = Vec::with_capacity(ues.len() * self.layout.cells.len());
        let mut coords = Vec::new();
        for (l, c) in rows {
            large.extend(l);
            if steered {
                coords.extend(c);
            }
        }
        let n_cells = self.layout.cells.len();
        let rsrp: Vec<f64> = large.chunks_exact(n_cells).flat_map(|row| self.rsrp_row(row)).collect();
        let assoc = associate(rsrp, n_cells)?;
        let n_prb = self.cfg.radio().n_prb;
        let beam_targets = (0..n_cells)
            .map(|c| {
                let load = assoc.served[c].len();
                if !steered || load == 0 {
                    return Vec::new();
                }
                let mut rng = substream(self.cfg.rng_seed, Stream::Beams, drop_index, c as u64, 0);
                (0..n_prb).map(|_| rng.random_range(0..load) as u16).collect()
            })
            .collect();
        Ok(DropState {
            drop_index,
            ues,
            large,
            coords,
            assoc,
            beam_targets,
        })
    }

    /// Per-PRB SINR and mean powers for a receiver whose large-scale links
    /// are `large` and which is served by `serving`. Its serving beam points
    /// at itself; other cells point at their own scheduled UEs.
    #[allow(clippy::too_many_arguments)]
    fn evaluate_receiver(
        &self,
        state: &DropState,
        large: &[LargeScaleState],
        coords: &[ArrayCoords],
        serving: usize,
        fading_stream: Stream,
        key: u64,
        scratch: &mut Scratch,
        with_powers: bool,
    ) -> Result<ReceiverOutcome> {
        let cfg = &self.cfg;
        let n_prb = cfg.radio().n_prb;
        let n_cells = state.n_cells();
        let steered = self.steered();
        let p_mw = db_to_linear(self.prb_power_dbm);
        let transmits = |c: usize| c == serving || (cfg.interference_enabled && state.is_active(c));

        for c in 0..n_cells {
            if !transmits(c) {
                continue;
            }
            let mut rng = substream(cfg.rng_seed, fading_stream, state.drop_index, key, c as u64);
            rician_fade_into(&mut rng, large[c].k_factor_linear, n_prb, &mut scratch.fading[c]);
            if steered && c != serving {
                let members = &state.assoc.served[c];
                scratch.member_af.clear();
                scratch
                    .member_af
                    .extend(members.iter().map(|&t| self.sector.array_factor_coords(state.coords[t * n_cells + c], coords[c])));
                let buf = &mut scratch.beam[c];
                buf.clear();
                buf.extend(state.beam_targets[c].iter().map(|&m| scratch.member_af[m as usize]));
            }
        }

        let serving_gain = if steered {
            self.sector.array_factor_coords(coords[serving], coords[serving])
        } else {
            1.0
        };
        let links: Vec<Option<CellLink<'_>>> = (0..n_cells)
            .map(|c| {
                transmits(c).then(|| CellLink {
                    beta: large[c].beta,
                    prb_power_mw: p_mw,
                    fading: &scratch.fading[c],
                    beam: match (steered, c == serving) {
                        (false, _) => BeamGain::None,
                        (true, true) => BeamGain::Uniform(serving_gain),
                        (true, false) => BeamGain::PerPrb(&scratch.beam[c]),
                    },
                })
            })
            .collect();

        let noise = cfg.radio().noise_per_prb_mw();
        sinr_per_prb(serving, &links, noise, &mut scratch.sinr)?;
        let eff_sinr = effective_sinr(&scratch.sinr)?;
        let (mut useful_mw, mut interference_mw) = (0.0, 0.0);
        if with_powers {
            for (c, l) in links.iter().enumerate() {
                if let Some(l) = l {
                    let p: f64 = (0..n_prb).map(|k| l.power_mw(k)).sum::<f64>() / n_prb as f64;
                    if c == serving {
                        useful_mw = p;
                    } else {
                        interference_mw += p;
                    }
                }
            }
        }
        Ok(ReceiverOutcome {
            serving,
            per_prb_sinr: scratch.sinr.clone(),
            eff_sinr,
            useful_mw,
            interference_mw,
        })
    }

    fn scratch(&self) -> Scratch {
        Scratch::new(self.layout.cells.len(), self.cfg.radio().n_prb)
    }

    /// Fast fading, SINR and rate for every UE of a prepared drop.
    pub fn evaluate_drop(&self, state: &DropState) -> Result<DropResult> {
        let n_cells = state.n_cells();
        let radio = self.cfg.radio();
        let ues: Vec<UeResult> = (0..state.ues.len())
            .into_par_iter()
            .map_init(
                || self.scratch(),
                |scratch, u| {
                    let serving = state.assoc.serving[u];
                    let row = u * n_cells..(u + 1) * n_cells;
                    let coords = if state.coords.is_empty() { &[][..] } else { &state.coords[row.clone()] };
                    let out = self.evaluate_receiver(state, &state.large[row], coords, serving, Stream::Fading, u as u64, scratch, false)?;
                    let rate_bps = ue_rate(state.assoc.load(serving), out.eff_sinr, radio);
                    Ok(UeResult {
                        ue: u,
                        serving_cell: serving,
                        per_prb_sinr: out.per_prb_sinr,
                        eff_sinr: out.eff_sinr,
                        rate_bps,
                        se_bps_hz: rate_bps / self.cfg.bandwidth_hz,
                    })
                },
            )
            .collect::<Result<_>>()?;
        Ok(DropResult {
            drop_index: state.drop_index,
            ues,
            positions: state.ues.clone(),
            cell_load: state.assoc.served.iter().map(Vec::len).collect(),
        })
    }

    pub fn run_drop(&self, drop_index: u64) -> Result<DropResult> {
        let state = self.prepare_drop(drop_index)?;
        self.evaluate_drop(&state)
    }

    /// All `n_drops` drops of the configuration, in drop order.
    pub fn run(&self) -> Result<Vec<DropResult>> {
        (0..self.cfg.n_drops as u64).map(|d| self.run_drop(d)).collect()
    }

    /// Evaluates a probe receiver at a ground point against a prepared
    /// drop. The probe does not change any cell's load.
    pub fn probe(&self, state: &DropState, x: f64, y: f64, probe_key: u64) -> Result<ReceiverOutcome> {
        let rx = UePosition {
            x,
            y,
            h: self.cfg.h_ue_m,
            region_cell: usize::MAX,
        };
        let (large, coords) = self.receiver_links(&rx, Stream::Probe, state.drop_index, probe_key)?;
        let rsrp: Vec<f64> = self.rsrp_row(&large).collect();
        let serving = associate(rsrp, large.len())?.serving[0];
        let coords = if self.steered() { coords } else { Vec::new() };
        let mut scratch = self.scratch();
        self.evaluate_receiver(state, &large, &coords, serving, Stream::ProbeFading, probe_key, &mut scratch, true)
    }
}

/// Runs one drop of a configuration from scratch.
pub fn run_drop(cfg: &ValidatedConfig, drop_index: u64) -> Result<DropResult> {
    Simulator::new(cfg.clone()).run_drop(drop_index)
}

/// Linear-interpolation percentile of sorted data, `q` in percent.
pub fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q / 100.0 * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let j = (i + 1).min(sorted.len() - 1);
    sorted[i] + (pos - i as f64) * (sorted[j] - sorted[i])
}

fn sorted(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub n_samples: usize,
    pub mean_sinr_db: f64,
    pub median_sinr_db: f64,
    pub p5_sinr_db: f64,
    pub mean_tput_mbps: f64,
    pub median_tput_mbps: f64,
    pub p5_tput_mbps: f64,
    pub mean_se_bpshz: f64,
    pub median_se_bpshz: f64,
}

/// Pooled statistics over UEs of all drops.
pub fn aggregate_stats<'a>(results: impl IntoIterator<Item = &'a UeResult>) -> Result<AggregateStats> {
    let results: Vec<&UeResult> = results.into_iter().collect();
    if results.is_empty() {
        return Err(Error::EmptyInput("UE results"));
    }
    let sinr = sorted(results.iter().map(|r| r.eff_sinr_db()));
    let tput = sorted(results.iter().map(|r| r.rate_mbps()));
    let se = sorted(results.iter().map(|r| r.se_bps_hz));
    Ok(AggregateStats {
        n_samples: results.len(),
        mean_sinr_db: mean(&sinr),
        median_sinr_db: percentile_sorted(&sinr, 50.0),
        p5_sinr_db: percentile_sorted(&sinr, 5.0),
        mean_tput_mbps: mean(&tput),
        median_tput_mbps: percentile_sorted(&tput, 50.0),
        p5_tput_mbps: percentile_sorted(&tput, 5.0),
        mean_se_bpshz: mean(&se),
        median_se_bpshz: percentile_sorted(&se, 50.0),
    })
}

pub fn aggregate_drops(drops: &[DropResult]) -> Result<AggregateStats> {
    aggregate_stats(drops.iter().flat_map(|d| &d.ues))
}

/// Altitudes 1..20 km.
pub fn default_altitudes_m() -> Vec<f64> {
    (1..=20).map(|k| k as f64 * 1_000.0).collect()
}

/// Apertures 5..50 wavelengths.
pub fn default_apertures_wl() -> Vec<f64> {
    (1..=10).map(|k| k as f64 * 5.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub altitude_m: f64,
    pub aperture_wl: f64,
    pub stats: AggregateStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub altitudes_m: Vec<f64>,
    pub apertures_wavelengths: Vec<f64>,
    /// Altitude-major.
    pub points: Vec<SweepPoint>,
}

impl SweepGrid {
    pub fn point(&self, ai: usize, ri: usize) -> &SweepPoint {
        &self.points[ai * self.apertures_wavelengths.len() + ri]
    }

    /// Aperture maximizing mean throughput at each altitude.
    pub fn best_apertures(&self) -> Vec<(f64, SweepPoint)> {
        self.altitudes_m
            .iter()
            .enumerate()
            .map(|(ai, &h)| {
                let best = (0..self.apertures_wavelengths.len())
                    .map(|ri| *self.point(ai, ri))
                    .fold(None::<SweepPoint>, |acc, p| match acc {
                        Some(b) if b.stats.mean_tput_mbps >= p.stats.mean_tput_mbps => Some(b),
                        _ => Some(p),
                    })
                    .expect("non-empty aperture grid");
                (h, best)
            })
            .collect()
    }
}

/// Evaluates one sweep point.
pub fn sweep_point(base: &ScenarioConfig, altitude_m: f64, aperture_wl: f64) -> Result<SweepPoint> {
    let cfg = ScenarioConfig {
        h_ntn_m: altitude_m,
        aperture_radius_wavelengths: aperture_wl,
        ..base.clone()
    }
    .validate()?;
    let sim = Simulator::new(cfg);
    let drops = sim.run()?;
    Ok(SweepPoint {
        altitude_m,
        aperture_wl,
        stats: aggregate_drops(&drops)?,
    })
}

/// Runs the grid in altitude-major order. `done` supplies points already
/// computed by an earlier, interrupted run; `sink` sees every point in grid
/// order as soon as it is available.
pub fn run_sweep_with(
    base: &ScenarioConfig,
    altitudes_m: &[f64],
    apertures_wl: &[f64],
    done: &[SweepPoint],
    mut sink: impl FnMut(&SweepPoint) -> Result<()>,
) -> Result<SweepGrid> {
    if base.deployment_kind.is_terrestrial() {
        return Err(Error::Consistency("the sweep needs an NTN5G configuration".into()));
    }
    let mut points = Vec::with_capacity(altitudes_m.len() * apertures_wl.len());
    for &h in altitudes_m {
        for &r in apertures_wl {
            let p = match done.iter().find(|p| p.altitude_m == h && p.aperture_wl == r) {
                Some(p) => *p,
                None => sweep_point(base, h, r)?,
            };
            sink(&p)?;
            points.push(p);
        }
    }
    Ok(SweepGrid {
        altitudes_m: altitudes_m.to_vec(),
        apertures_wavelengths: apertures_wl.to_vec(),
        points,
    })
}

pub fn run_sweep(base: &ScenarioConfig, altitudes_m: &[f64], apertures_wl: &[f64]) -> Result<SweepGrid> {
    run_sweep_with(base, altitudes_m, apertures_wl, &[], |_| Ok(()))
}

/// Default pixel budget of a heatmap.
pub const HEATMAP_PIXEL_BUDGET: usize = 250_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatmapPixel {
    pub x_m: f64,
    pub y_m: f64,
    /// Drop-averaged effective SINR, dB.
    pub sinr_db: f64,
    /// Drop-averaged serving power per PRB, dBm.
    pub useful_dbm: f64,
    /// Drop-averaged summed interference per PRB, dBm.
    pub interference_dbm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapGrid {
    pub resolution_m: f64,
    pub extent_m: f64,
    pub center: [f64; 2],
    /// Pixels per side.
    pub side: usize,
    /// Row-major, `y` outer.
    pub pixels: Vec<HeatmapPixel>,
}

impl HeatmapGrid {
    pub fn at(&self, ix: usize, iy: usize) -> &HeatmapPixel {
        &self.pixels[iy * self.side + ix]
    }

    /// Index of the pixel nearest a ground point.
    pub fn nearest(&self, x: f64, y: f64) -> (usize, usize) {
        let o = self.center[0] - self.extent_m / 2.0;
        let p = self.center[1] - self.extent_m / 2.0;
        let clamp = |v: f64| (v.floor().max(0.0) as usize).min(self.side - 1);
        (clamp((x - o) / self.resolution_m), clamp((y - p) / self.resolution_m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatmapSpec {
    pub resolution_m: f64,
    pub extent_m: f64,
    pub center: [f64; 2],
    pub pixel_budget: usize,
}

impl HeatmapSpec {
    /// Square of side 4·ISD/3 around the central site.
    pub fn around_center(cfg: &ScenarioConfig, resolution_m: f64) -> Self {
        Self {
            resolution_m,
            extent_m: 4.0 * cfg.isd_m / 3.0,
            center: [0.0, 0.0],
            pixel_budget: HEATMAP_PIXEL_BUDGET,
        }
    }

    pub fn side(&self) -> usize {
        (self.extent_m / self.resolution_m).ceil() as usize
    }
}

/// Probe-UE heatmap averaged over the configuration's drops.
pub fn sample_heatmap(sim: &Simulator, spec: &HeatmapSpec) -> Result<HeatmapGrid> {
    if !(spec.resolution_m > 0.0 && spec.extent_m > 0.0) {
        return Err(Error::Range {
            field: "resolution_m",
            value: spec.resolution_m,
            expected: "> 0",
        });
    }
    let side = spec.side();
    let pixels = side * side;
    if pixels > spec.pixel_budget {
        return Err(Error::Resolution {
            pixels,
            budget: spec.pixel_budget,
        });
    }
    let drops: Vec<DropState> = (0..sim.config().n_drops as u64)
        .map(|d| sim.prepare_drop(d))
        .collect::<Result<_>>()?;
    let x0 = spec.center[0] - spec.extent_m / 2.0;
    let y0 = spec.center[1] - spec.extent_m / 2.0;
    let pixels = (0..pixels)
        .into_par_iter()
        .map(|i| {
            let x = x0 + ((i % side) as f64 + 0.5) * spec.resolution_m;
            let y = y0 + ((i / side) as f64 + 0.5) * spec.resolution_m;
            let (mut sinr_db, mut useful, mut interference) = (0.0, 0.0, 0.0);
            for state in &drops {
                let o = sim.probe(state, x, y, i as u64)?;
                sinr_db += linear_to_db(o.eff_sinr);
                useful += o.useful_mw;
                interference += o.interference_mw;
            }
            let n = drops.len() as f64;
            Ok(HeatmapPixel {
                x_m: x,
                y_m: y,
                sinr_db: sinr_db / n,
                useful_dbm: linear_to_db(useful / n),
                interference_dbm: linear_to_db(interference / n),
            })
        })
        .collect::<Result<_>>()?;
    Ok(HeatmapGrid {
        resolution_m: spec.resolution_m,
        extent_m: spec.extent_m,
        center: spec.center,
        side,
        pixels,
    })
}

/// Statistics of the three deployments side by side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub rows: Vec<(crate::scenario::DeploymentKind, AggregateStats)>,
}

pub fn compare(configs: &[ValidatedConfig]) -> Result<Comparison> {
    let rows = configs
        .iter()
        .map(|cfg| {
            let drops = Simulator::new(cfg.clone()).run()?;
            Ok((cfg.deployment_kind, aggregate_drops(&drops)?))
        })
        .collect::<Result<_>>()?;
    Ok(Comparison { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::DeploymentKind;
    use approx::assert_relative_eq;

    fn small(kind: DeploymentKind) -> ValidatedConfig {
        ScenarioConfig {
            n_drops: 2,
            ..ScenarioConfig::for_kind(kind)
        }
        .validate()
        .unwrap()
    }

    #[test]
    fn percentile_examples() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_relative_eq!(percentile_sorted(&v, 50.0), 50.5, epsilon = 1e-12);
        assert_relative_eq!(percentile_sorted(&v, 5.0), 5.95, epsilon = 1e-12);
        assert_eq!(percentile_sorted(&[4.2], 5.0), 4.2);
    }

    #[test]
    fn aggregate_single_and_empty() {
        let r = UeResult {
            ue: 0,
            serving_cell: 0,
            per_prb_sinr: vec![],
            eff_sinr: 3.0,
            rate_bps: 24e6,
            se_bps_hz: 0.24,
        };
        let s = aggregate_stats([&r]).unwrap();
        assert_eq!(s.mean_tput_mbps, 24.0);
        assert_eq!(s.median_tput_mbps, 24.0);
        assert_eq!(s.p5_tput_mbps, 24.0);
        assert_eq!(s.mean_se_bpshz, 0.24);
        assert!(matches!(aggregate_stats(std::iter::empty()), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn drop_is_deterministic() {
        let sim = Simulator::new(small(DeploymentKind::Ntn5g));
        let a = sim.run_drop(1).unwrap();
        let b = sim.run_drop(1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.ues.len(), 570);
        assert!(a.ues.iter().all(|u| u.rate_bps.is_finite() && u.rate_bps >= 0.0));
        assert_eq!(a.cell_load.iter().sum::<usize>(), 570);
    }

    #[test]
    fn no_interference_gives_snr() {
        let cfg = ScenarioConfig {
            interference_enabled: false,
            ..small(DeploymentKind::Ntn5g).into_inner()
        }
        .validate()
        .unwrap();
        let sim = Simulator::new(cfg);
        let state = sim.prepare_drop(0).unwrap();
        let d = sim.evaluate_drop(&state).unwrap();
        let noise = sim.config().radio().noise_per_prb_mw();
        let p = db_to_linear(sim.prb_power_dbm());
        for u in d.ues.iter().take(40) {
            let beta = state.link(u.ue, u.serving_cell).beta;
            let mut rng = substream(sim.config().rng_seed, Stream::Fading, 0, u.ue as u64, u.serving_cell as u64);
            let f = crate::channel::rician_fade(&mut rng, state.link(u.ue, u.serving_cell).k_factor_linear, 273);
            let snr: Vec<f64> = f.coefficients().map(|h| beta * p * h.norm_sqr() / noise).collect();
            assert_relative_eq!(u.eff_sinr, effective_sinr(&snr).unwrap(), max_relative = 1e-12);
        }
    }

    #[test]
    fn tn_drops_run() {
        for kind in [DeploymentKind::Tn4g, DeploymentKind::Tn5g] {
            let sim = Simulator::new(small(kind));
            let d = sim.run_drop(0).unwrap();
            assert_eq!(d.ues.len(), 570);
            assert!(d.ues.iter().all(|u| u.eff_sinr.is_finite() && u.eff_sinr > 0.0));
        }
    }

    #[test]
    fn boresight_ue_served_by_its_sector() {
        let cfg = ScenarioConfig {
            shadowing_enabled: false,
            los_mode: LosMode::Expectation,
            ..small(DeploymentKind::Ntn5g).into_inner()
        }
        .validate()
        .unwrap();
        let sim = Simulator::new(cfg);
        for cell in &sim.layout().cells {
            let rx = UePosition {
                x: cell.boresight_ground_point[0],
                y: cell.boresight_ground_point[1],
                h: 1.5,
                region_cell: cell.cell_index,
            };
            let rsrp: Vec<f64> = sim
                .layout()
                .cells
                .iter()
                .map(|c| compute_rsrp(sim.prb_power_dbm(), sim.link_state(c, &rx, 0.5, 0.0).unwrap().0.beta))
                .collect();
            assert_eq!(associate(rsrp, 57).unwrap().serving[0], cell.cell_index);
        }
    }

    #[test]
    fn heatmap_budget() {
        let sim = Simulator::new(small(DeploymentKind::Ntn5g));
        let spec = HeatmapSpec {
            pixel_budget: 100,
            ..HeatmapSpec::around_center(sim.config(), 10.0)
        };
        assert!(matches!(sample_heatmap(&sim, &spec), Err(Error::Resolution { .. })));
        assert_eq!(HeatmapSpec::around_center(sim.config(), 10.0).side(), 67);
    }
}
