//! Cell association, per-PRB SINR, effective-SINR mapping and user rate.

use serde::Serialize;

use crate::channel::FadingState;
use crate::error::{Error, Result};
use crate::scenario::{linear_to_db, RadioConstants};

/// RSRP of one link: per-PRB transmit power plus the large-scale gain.
pub fn compute_rsrp(prb_power_dbm: f64, beta: f64) -> f64 {
    prb_power_dbm + linear_to_db(beta)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssociationMap {
    pub n_cells: usize,
    pub serving: Vec<usize>,
    /// Row-major `n_ue × n_cells`.
    pub rsrp_dbm: Vec<f64>,
    /// UEs served by each cell, in UE order.
    pub served: Vec<Vec<usize>>,
}

impl AssociationMap {
    pub fn n_ue(&self) -> usize {
        self.serving.len()
    }

    pub fn load(&self, cell: usize) -> usize {
        self.served[cell].len()
    }

    pub fn rsrp(&self, ue: usize, cell: usize) -> f64 {
        self.rsrp_dbm[ue * self.n_cells + cell]
    }
}

/// Strongest-RSRP association; ties go to the lowest cell index.
pub fn associate(rsrp_dbm: Vec<f64>, n_cells: usize) -> Result<AssociationMap> {
    if n_cells == 0 || rsrp_dbm.is_empty() {
        return Err(Error::EmptyInput("RSRP matrix"));
    }
    if !rsrp_dbm.len().is_multiple_of(n_cells) {
        return Err(Error::Consistency(format!(
            "RSRP matrix of {} entries is not a multiple of {n_cells} cells",
            rsrp_dbm.len()
        )));
    }
    let mut served = vec![Vec::new(); n_cells];
    let serving: Vec<usize> = rsrp_dbm
        .chunks_exact(n_cells)
        .enumerate()
        .map(|(u, row)| {
            let mut best = 0;
            for (c, &v) in row.iter().enumerate().skip(1) {
                if v > row[best] {
                    best = c;
                }
            }
            served[best].push(u);
            best
        })
        .collect();
    Ok(AssociationMap {
        n_cells,
        serving,
        rsrp_dbm,
        served,
    })
}

/// Extra gain a beam puts on the specular path of a link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeamGain<'a> {
    None,
    Uniform(f64),
    PerPrb(&'a [f64]),
}

/// Everything needed to evaluate one cell's received power at one UE.
#[derive(Debug, Clone, Copy)]
pub struct CellLink<'a> {
    pub beta: f64,
    pub prb_power_mw: f64,
    pub fading: &'a FadingState,
    pub beam: BeamGain<'a>,
}

impl CellLink<'_> {
    /// β·|h_k·w|²·p on PRB `k`, in mW.
    #[inline]
    pub fn power_mw(&self, k: usize) -> f64 {
        let f = self.fading;
        let hw = match self.beam {
            BeamGain::None => f.coefficient(k),
            BeamGain::Uniform(g) => f.los * g.sqrt() + f.diffuse[k],
            BeamGain::PerPrb(g) => f.los * g[k].sqrt() + f.diffuse[k],
        };
        self.beta * self.prb_power_mw * hw.norm_sqr()
    }
}

/// Per-PRB SINR of a UE served by `serving`. `links[c]` is `None` for a
/// cell that does not transmit.
pub fn sinr_per_prb(serving: usize, links: &[Option<CellLink<'_>>], noise_mw: f64, out: &mut Vec<f64>) -> Result<()> {
    let s = links
        .get(serving)
        .copied()
        .flatten()
        .ok_or_else(|| Error::Consistency(format!("serving cell {serving} has no link")))?;
    let n_prb = s.fading.n_prb();
    out.clear();
    out.resize(n_prb, noise_mw);
    for (c, link) in links.iter().enumerate() {
        if c == serving {
            continue;
        }
        if let Some(l) = link {
            for (k, acc) in out.iter_mut().enumerate() {
                *acc += l.power_mw(k);
            }
        }
    }
    for (k, acc) in out.iter_mut().enumerate() {
        *acc = s.power_mw(k) / *acc;
    }
    Ok(())
}

/// Terrestrial SINR: serving and interfering beams enter through
/// [`BeamGain`].
pub fn sinr_tn_per_prb(serving: usize, links: &[Option<CellLink<'_>>], noise_mw: f64) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    sinr_per_prb(serving, links, noise_mw, &mut out)?;
    Ok(out)
}

/// Platform SINR: the reflector is a single antenna, so links carry no
/// beam gain beyond β.
pub fn sinr_ntn_per_prb(serving: usize, links: &[Option<CellLink<'_>>], noise_mw: f64) -> Result<Vec<f64>> {
    if links.iter().flatten().any(|l| l.beam != BeamGain::None) {
        return Err(Error::Consistency("platform links carry no precoder".into()));
    }
    sinr_tn_per_prb(serving, links, noise_mw)
}

/// Capacity-based effective SINR: 2^{mean log2(1+γ_k)} − 1.
pub fn effective_sinr(per_prb_sinrs: &[f64]) -> Result<f64> {
    if per_prb_sinrs.is_empty() {
        return Err(Error::EmptyInput("per-PRB SINR"));
    }
    let mean = per_prb_sinrs.iter().map(|g| g.ln_1p()).sum::<f64>() / per_prb_sinrs.len() as f64;
    Ok(mean.exp_m1())
}

/// Round-robin, full-buffer rate of a UE sharing its cell with
/// `n_served − 1` others.
pub fn ue_rate(n_served: usize, eff_sinr: f64, radio: &RadioConstants) -> f64 {
    radio.n_prb as f64 * radio.prb_bandwidth_hz / n_served as f64 * (radio.n_layers as f64) * eff_sinr.ln_1p()
        / std::f64::consts::LN_2
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UeResult {
    pub ue: usize,
    pub serving_cell: usize,
    #[serde(skip)]
    pub per_prb_sinr: Vec<f64>,
    pub eff_sinr: f64,
    pub rate_bps: f64,
    pub se_bps_hz: f64,
}

impl UeResult {
    pub fn eff_sinr_db(&self) -> f64 {
        linear_to_db(self.eff_sinr)
    }

    pub fn rate_mbps(&self) -> f64 {
        self.rate_bps / 1e6
    }
}
