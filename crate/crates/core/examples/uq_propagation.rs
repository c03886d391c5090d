//! Forward propagation of input uncertainty: the sandwich rule with OAT
//! sensitivities against plain Monte Carlo.
//!
//! Run with `cargo run --release --example uq_propagation`.

use sauq::local_sa::{oat_sensitivity, OatOptions};
use sauq::models::{Mcfc, McfcConstants, Sfs};
use sauq::models::mcfc_parameters;
use sauq::problem::ParameterSpec;
use sauq::uq::{deterministic_uq, monte_carlo_uq, CovarianceMatrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // y = x1 + x2 + x3 with sd (1, 2, 3): variance 14 either way
    let specs: Vec<ParameterSpec> = [1.0, 2.0, 3.0]
        .iter()
        .enumerate()
        .map(|(i, sd)| ParameterSpec::normal(format!("x{}", i + 1), 1.0, *sd))
        .collect();
    let f1 = Sfs::new(1)?;
    let cx = CovarianceMatrix::from_specs(&specs)?;
    let oat = oat_sensitivity(&f1, &[1.0; 3], &OatOptions::default())?;
    let det = deterministic_uq(&[oat[0].raw.clone()], &cx)?[0][0];
    let mc = &monte_carlo_uq(&f1, &specs, 100_000, 42)?[0];
    println!("linear: sandwich variance {det}, Monte Carlo {:.4}", mc.variance);

    // fuel cell at 3000 A/m2, all nine inputs uncertain
    let cell = Mcfc::new(McfcConstants::default());
    let specs = mcfc_parameters(3000.0);
    let x0: Vec<f64> = specs.iter().map(|s| s.nominal).collect();
    let cx = CovarianceMatrix::from_specs(&specs)?;
    let oat = oat_sensitivity(&cell, &x0, &OatOptions::default())?;
    let rows: Vec<Vec<f64>> = oat.iter().map(|r| r.raw.clone()).collect();
    let cy = deterministic_uq(&rows, &cx)?;
    let mc = monte_carlo_uq(&cell, &specs, 10_000, 42)?;
    for (k, name) in ["P", "eta"].iter().enumerate() {
        let (lo, hi) = mc[k].ci95.unwrap_or((f64::NAN, f64::NAN));
        println!(
            "{name:<4} sandwich sd {:.5}  MC sd {:.5}  MC mean {:.5} (95% CI {:.5}..{:.5})",
            cy[k][k].sqrt(),
            mc[k].sd,
            mc[k].mean,
            lo,
            hi
        );
    }
    Ok(())
}
