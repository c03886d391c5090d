//! Regression (SRC, SRRC) and partial correlation (PCC, PRCC) coefficients on
//! the four simple functions:
//!
//! f1 = x1 + x2 + x3, f2 = x1 + x1 x2 + x3, f3 = x1 + x2^2 + x3^3,
//! f4 = x1 + x1 x2^2 + x3^3, all inputs U(0, 1).
//!
//! Run with `cargo run --example regression_sfs`.

use sauq::models::{evaluate_matrix, Sfs};
use sauq::problem::{sample_matrix, ParameterSpec};
use sauq::regression_sa::{regression_sa, RegressionMethod};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let specs: Vec<ParameterSpec> = ["x1", "x2", "x3"]
        .iter()
        .map(|n| ParameterSpec::uniform(*n, 0.0, 1.0))
        .collect();
    let x = sample_matrix(&specs, 5000, 42)?;
    for k in 1..=4 {
        let y: Vec<f64> = evaluate_matrix(&Sfs::new(k)?, &x)?.into_iter().map(|r| r[0]).collect();
        println!("f{k}");
        for m in [RegressionMethod::Src, RegressionMethod::Pcc, RegressionMethod::Srrc, RegressionMethod::Prcc] {
            // an exact linear response makes (X, y) singular, so PCC is undefined for f1
            match regression_sa(m, &x, &y) {
                Ok(r) => {
                    let c: Vec<String> = r.coefficients.iter().map(|v| format!("{v:7.4}")).collect();
                    let r2 = r.r_squared.map_or(String::new(), |v| format!("  R2 = {v:.4}"));
                    println!("  {:<5} {}{r2}", m.as_str(), c.join(" "));
                }
                Err(e) => println!("  {:<5} {e}", m.as_str()),
            }
        }
    }
    Ok(())
}
