//! A coarse altitude × aperture sweep and the best aperture per altitude.
//!
//! The full grid is 20 altitudes by 10 apertures; this example samples a
//! corner of it with two drops per point.

use skylink::prelude::*;

fn main() -> Result<()> {
    let base = ScenarioConfig {
        n_drops: 2,
        ..ScenarioConfig::default()
    };
    let altitudes = [2_000.0, 8_000.0, 16_000.0];
    let apertures = [10.0, 25.0, 40.0];
    let grid = run_sweep(&base, &altitudes, &apertures)?;

    print!("{:>8}", "h \\ r");
    for r in apertures {
        print!("{r:>9.0}");
    }
    println!();
    for (ai, h) in altitudes.iter().enumerate() {
        print!("{:>6.0} m", h);
        for ri in 0..apertures.len() {
            print!("{:>9.2}", grid.point(ai, ri).stats.mean_tput_mbps);
        }
        println!();
    }
    for (h, best) in grid.best_apertures() {
        let tilt = compute_tilt(base.isd_m, h)?;
        println!(
            "h = {:>5.0} m (tilt {:.2} deg): best r = {} wl at {:.2} Mbps",
            h, tilt, best.aperture_wl, best.stats.mean_tput_mbps
        );
    }
    Ok(())
}
