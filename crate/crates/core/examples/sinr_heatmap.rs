//! Drop-averaged SINR map around the central site, rendered as text.

use skylink::prelude::*;

fn main() -> Result<()> {
    let cfg = ScenarioConfig {
        n_drops: 2,
        los_mode: LosMode::Expectation,
        shadowing_enabled: false,
        ..ScenarioConfig::ntn(8_000.0, 25.0)
    }
    .validate()?;
    let spec = HeatmapSpec::around_center(&cfg, 25.0);
    let grid = sample_heatmap(&Simulator::new(cfg), &spec)?;

    let shades = [' ', '.', ':', '-', '=', '+', '*', '#', '%', '@'];
    for iy in (0..grid.side).rev() {
        let row: String = (0..grid.side)
            .map(|ix| {
                let s = grid.at(ix, iy).sinr_db;
                let k = ((s + 5.0) / 2.5).clamp(0.0, 9.0) as usize;
                shades[k]
            })
            .collect();
        println!("{row}");
    }
    let (ix, iy) = grid.nearest(0.0, 0.0);
    println!("SINR at the mast: {:.2} dB", grid.at(ix, iy).sinr_db);
    Ok(())
}
