//! Scenario files: a minimal override file, the defaults it expands to and
//! the error a misspelt key produces.

use skylink::io::{config_to_json, parse_config_str};

fn main() -> skylink::Result<()> {
    let cfg = parse_config_str(r#"{ "deployment_kind": "NTN5G", "h_ntn_m": 5000, "aperture_radius_wavelengths": 15 }"#)?;
    println!("{}", config_to_json(&cfg)?);
    let v = cfg.validate()?;
    println!("wavelength {:.4} m, aperture radius {:.3} m", v.wavelength_m(), v.aperture_radius_m());

    match parse_config_str(r#"{ "apreture_radius": 15 }"#) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
