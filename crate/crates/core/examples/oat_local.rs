//! Forward and central finite-difference sensitivities.
//!
//! Run with `cargo run --example oat_local`.

use sauq::local_sa::{oat_sensitivity, FdScheme, OatOptions};
use sauq::models::{Mcfc, McfcConstants, McfcParams, Model, Sfs};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // x2^2 at x2 = 1: forward gives 2 + δ, central gives 2
    let f3 = Sfs::new(3)?;
    for scheme in [FdScheme::Forward, FdScheme::Central] {
        let opts = OatOptions {
            rel_perturbation: 0.01,
            scheme,
        };
        let r = &oat_sensitivity(&f3, &[1.0, 1.0, 1.0], &opts)?[0];
        println!("f3 {:<8} raw = {:?} ({} evaluations)", scheme.as_str(), r.raw, r.evaluations);
    }

    let cell = Mcfc::new(McfcConstants::default());
    let x0 = McfcParams::default().to_vec();
    let res = oat_sensitivity(&cell, &x0, &OatOptions::default())?;
    println!("\nfuel cell at j = {} A/m2", x0[0]);
    println!("{:<10} {:>14} {:>14}", "parameter", "dP/dx", "normalized");
    for (i, name) in cell.input_names().iter().enumerate() {
        let norm = res[0].normalized.as_ref().map_or(f64::NAN, |n| n[i]);
        println!("{name:<10} {:>14.6e} {:>14.4}", res[0].raw[i], norm);
    }
    Ok(())
}
