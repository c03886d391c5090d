//! Power and efficiency of the fuel cell across current density, with Monte
//! Carlo bands, and the location of the maximum-power point.
//!
//! Run with `cargo run --release --example mcfc_sweep`.

use sauq::mcfc_study::{sweep, SweepOptions};
use sauq::models::McfcConstants;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = SweepOptions {
        steps: 13,
        n_s: 5000,
        ..Default::default()
    };
    let s = sweep(&opts, 42, &McfcConstants::default())?;
    println!("{:>6} {:>9} {:>8} {:>7} {:>7}", "j", "P", "sd_P", "eta", "sd_eta");
    for i in 0..s.j_grid.len() {
        println!(
            "{:>6.0} {:>9.2} {:>8.2} {:>7.4} {:>7.4}",
            s.j_grid[i], s.nominal_p[i], s.sd_p[i], s.nominal_eta[i], s.sd_eta[i]
        );
    }
    println!(
        "\nj* = {:.1} A/m2, P* = {:.1} W/m2, eta* = {:.4}",
        s.j_star, s.p_star, s.eta_star
    );
    println!(
        "relative sd at j*: P {:.3}, eta {:.3}",
        s.star_uq[0].relative_sd(),
        s.star_uq[1].relative_sd()
    );
    Ok(())
}
