//! Sobol first-order and total indices on the Ishigami function and the Sobol
//! g-function, next to their closed-form values.
//!
//! Run with `cargo run --release --example sobol_benchmarks`.

use std::f64::consts::PI;

use sauq::models::{Ishigami, SobolG, SOBOL_G_DEFAULT_A};
use sauq::problem::ParameterSpec;
use sauq::sobol::{estimate_sobol, evaluation_count};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 10_000;

    let specs: Vec<ParameterSpec> = (1..=3).map(|i| ParameterSpec::uniform(format!("x{i}"), -PI, PI)).collect();
    let s = &estimate_sobol(&Ishigami::default(), &specs, n, 42)?[0];
    let (a, b) = (7.0, 0.1);
    let v = a * a / 8.0 + b * PI.powi(4) / 5.0 + b * b * PI.powi(8) / 18.0 + 0.5;
    let v1 = (1.0 + b * PI.powi(4) / 5.0).powi(2) / 2.0;
    let v2 = a * a / 8.0;
    let v13 = 8.0 * b * b * PI.powi(8) / 225.0;
    let exact_s = [v1 / v, v2 / v, 0.0];
    let exact_t = [(v1 + v13) / v, v2 / v, v13 / v];
    println!("Ishigami, N = {n} ({} runs)", evaluation_count(n, 3));
    for i in 0..3 {
        println!(
            "  x{}  S = {:.4} (exact {:.4})  T = {:.4} (exact {:.4})",
            i + 1,
            s.first[i],
            exact_s[i],
            s.total[i],
            exact_t[i]
        );
    }

    let a = SOBOL_G_DEFAULT_A;
    let specs: Vec<ParameterSpec> = (1..=8).map(|i| ParameterSpec::uniform(format!("x{i}"), 0.0, 1.0)).collect();
    let s = &estimate_sobol(&SobolG { a: a.to_vec() }, &specs, n, 42)?[0];
    let vi: Vec<f64> = a.iter().map(|ai| (1.0 / 3.0) / (1.0 + ai).powi(2)).collect();
    let v = vi.iter().map(|x| 1.0 + x).product::<f64>() - 1.0;
    println!("\ng-function, N = {n} ({} runs)", evaluation_count(n, 8));
    for i in 0..8 {
        println!(
            "  x{} (a = {:>4})  S = {:.4} (exact {:.4})  T = {:.4}",
            i + 1,
            a[i],
            s.first[i],
            vi[i] / v,
            s.total[i]
        );
    }
    Ok(())
}
