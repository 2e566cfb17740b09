//! Reflector peak gain, beamwidth and footprint across apertures, and the
//! terrestrial sector panel.

use skylink::antenna::{ElementPattern, ReflectorAntenna, SectorAntenna};
use skylink::geometry::footprint_radius;
use skylink::scenario::{DeploymentKind, ScenarioConfig};

fn main() {
    println!("{:>5} {:>9} {:>9} {:>10} {:>13}", "r/wl", "peak dBi", "HPBW deg", "null deg", "footprint m");
    for r in [5.0, 10.0, 25.0, 50.0] {
        let a = ReflectorAntenna::new(r, 1.0);
        println!(
            "{:>5} {:>9.2} {:>9.3} {:>10.3} {:>13.1}",
            r,
            a.peak_gain_dbi,
            a.hpbw_deg,
            a.first_null_deg(),
            footprint_radius(8_000.0, a.hpbw_deg)
        );
    }

    let a = ReflectorAntenna::new(25.0, 1.0);
    println!("\n25 wl cut:");
    for t in [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0] {
        println!("  {t:>4.1} deg  {:>7.2} dBi", a.gain_dbi(t));
    }

    let e = ElementPattern::default();
    println!("\nelement: boresight {:.1} dBi, 65 deg off {:.1} dBi, back {:.1} dBi", e.gain_dbi(90.0, 0.0), e.gain_dbi(90.0, 65.0), e.gain_dbi(90.0, 180.0));
    for kind in [DeploymentKind::Tn4g, DeploymentKind::Tn5g] {
        let panel = SectorAntenna::from_config(&ScenarioConfig::for_kind(kind));
        println!(
            "{}: {}x{} panel, broadside beam {:.2} dBi",
            kind.label(),
            panel.rows,
            panel.cols,
            panel.beam_gain_dbi((90.0, 0.0), (90.0, 0.0))
        );
    }
}
