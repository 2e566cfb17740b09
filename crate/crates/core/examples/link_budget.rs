//! Link budget of one UE towards every cell of its site: geometry, path
//! loss, antenna gain and the resulting RSRP and SNR.

use skylink::antenna::ReflectorAntenna;
use skylink::channel::{compose_large_scale, ntn_pathloss};
use skylink::geometry::{build_hex_layout, link_geometry};
use skylink::link::compute_rsrp;
use skylink::scenario::{noise_power_dbm, ScenarioConfig};

fn main() -> skylink::Result<()> {
    let cfg = ScenarioConfig::ntn(8_000.0, 25.0).validate()?;
    let dep = build_hex_layout(&cfg, 0);
    let ant = ReflectorAntenna::from_config(&cfg);
    let p_prb = cfg.tx_power_dbm - 10.0 * (cfg.radio().n_prb as f64).log10();
    let noise = noise_power_dbm(cfg.radio().prb_bandwidth_hz, cfg.ue_noise_figure_db);
    let ue = &dep.ues[0];
    println!("UE at ({:.1}, {:.1}) in cell {}", ue.x, ue.y, ue.region_cell);
    println!("{:>4} {:>8} {:>8} {:>8} {:>8} {:>9} {:>7}", "cell", "el deg", "off deg", "PL dB", "G dBi", "RSRP dBm", "SNR dB");
    for cell in dep.cells.iter().filter(|c| c.site_index == 0) {
        let link = link_geometry(cell, ue)?;
        let pl = ntn_pathloss(&link, true, cfg.carrier_hz, &cfg).total_db();
        let g = ant.gain_dbi(link.offboresight_deg);
        let rsrp = compute_rsrp(p_prb, compose_large_scale(pl, 0.0, g));
        println!(
            "{:>4} {:>8.2} {:>8.2} {:>8.2} {:>8.2} {:>9.2} {:>7.2}",
            cell.cell_index,
            link.elevation_deg,
            link.offboresight_deg,
            pl,
            g,
            rsrp,
            rsrp - noise
        );
    }
    Ok(())
}
