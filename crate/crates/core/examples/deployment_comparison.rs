//! Terrestrial 4G, terrestrial 5G and HAPS 5G under the same drops.

use skylink::prelude::*;

fn main() -> Result<()> {
    let configs = DeploymentKind::ALL
        .iter()
        .map(|&k| {
            ScenarioConfig {
                n_drops: 2,
                ..ScenarioConfig::for_kind(k)
            }
            .validate()
        })
        .collect::<Result<Vec<_>>>()?;
    let cmp = compare(&configs)?;
    println!("{:>6} {:>10} {:>12} {:>10} {:>10}", "kind", "SINR dB", "median Mbps", "p5 Mbps", "median SE");
    for (kind, s) in &cmp.rows {
        println!(
            "{:>6} {:>10.2} {:>12.2} {:>10.2} {:>10.3}",
            kind.label(),
            s.median_sinr_db,
            s.median_tput_mbps,
            s.p5_tput_mbps,
            s.median_se_bpshz
        );
    }
    Ok(())
}
