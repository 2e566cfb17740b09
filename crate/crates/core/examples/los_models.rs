//! LoS probability: the elevation tables used at stratospheric altitude, the
//! street-canyon model used below it, and the terrestrial distance model.

use skylink::channel::{los_probability, uma_los_probability, LosGeometryParams};
use skylink::scenario::ScenarioConfig;

fn main() -> skylink::Result<()> {
    let params = LosGeometryParams::from_config(&ScenarioConfig::default());
    let (w_street, w_cross) = params.region_weights();
    println!("street-canyon cell area {:.1} m2, weights {:.4} / {:.4}", params.area(), w_street, w_cross);
    println!("{:>6} {:>12} {:>12}", "el deg", "table (20km)", "street (5km)");
    for el in [10.0, 20.0, 30.0, 45.0, 60.0, 75.0, 90.0] {
        println!(
            "{:>6.0} {:>12.3} {:>12.3}",
            el,
            los_probability(el, 20_000.0, &params)?,
            los_probability(el, 5_000.0, &params)?
        );
    }
    println!("\nterrestrial:");
    for d in [10.0, 50.0, 100.0, 200.0, 500.0] {
        println!("  {d:>5.0} m  {:.3}", uma_los_probability(d));
    }
    Ok(())
}
