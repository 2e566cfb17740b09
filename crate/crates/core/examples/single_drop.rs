//! One drop of the default HAPS deployment: association, load and the
//! per-UE effective SINR distribution.

use skylink::prelude::*;

fn main() -> Result<()> {
    let cfg = ScenarioConfig::ntn(8_000.0, 25.0).validate()?;
    println!(
        "NTN5G at {} km, r = {} wl: {} PRBs, noise {:.1} dBm/PRB",
        cfg.h_ntn_m / 1e3,
        cfg.aperture_radius_wavelengths,
        cfg.radio().n_prb,
        cfg.radio().noise_per_prb_dbm
    );
    let sim = Simulator::new(cfg);
    let drop = sim.run_drop(0)?;

    let loads: Vec<usize> = drop.cell_load.clone();
    let busiest = loads.iter().max().copied().unwrap_or(0);
    let silent = loads.iter().filter(|&&n| n == 0).count();
    println!("cell load: max {busiest}, silent cells {silent}");

    let stats = aggregate_stats(&drop.ues)?;
    println!(
        "SINR mean {:.2} dB, median {:.2} dB, p5 {:.2} dB",
        stats.mean_sinr_db, stats.median_sinr_db, stats.p5_sinr_db
    );
    println!(
        "throughput mean {:.2} Mbps, median {:.2} Mbps, p5 {:.2} Mbps",
        stats.mean_tput_mbps, stats.median_tput_mbps, stats.p5_tput_mbps
    );
    for u in drop.ues.iter().take(5) {
        println!("  ue {:>3} -> cell {:>2}: {:>6.2} dB, {:>6.2} Mbps", u.ue, u.serving_cell, u.eff_sinr_db(), u.rate_mbps());
    }
    Ok(())
}
