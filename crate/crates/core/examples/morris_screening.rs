//! Morris elementary-effects screening: the simple functions with a coarse
//! 4-level grid, then the 20-input Morris function with a 0.01 step.
//!
//! Run with `cargo run --example morris_screening`.

use sauq::models::{MorrisFunction, Sfs};
use sauq::morris::{classify, morris_screening, MorrisOptions};
use sauq::problem::ParameterSpec;

fn unit(n: usize) -> Vec<ParameterSpec> {
    (1..=n).map(|i| ParameterSpec::uniform(format!("x{i}"), 0.0, 1.0)).collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let coarse = MorrisOptions {
        trajectories: 50,
        levels: 4,
        step: None,
    };
    for k in 1..=4 {
        let (_, s) = morris_screening(&Sfs::new(k)?, &unit(3), &coarse, 42)?;
        let s = &s[0];
        println!("f{k}: mu* = {:.3?}  sigma = {:.3?}", s.mu_star, s.sigma);
        println!("     {:?}", classify(s, 0.05, 0.1));
    }

    let fine = MorrisOptions {
        trajectories: 200,
        levels: 101,
        step: Some(0.01),
    };
    let model = MorrisFunction::from_seed(1991);
    let (design, s) = morris_screening(&model, &unit(20), &fine, 42)?;
    println!("\nMorris function, {} model runs", design.n_rows());
    println!("{:<5} {:>10} {:>10} {:>10}", "", "mu", "mu*", "sigma");
    for i in 0..20 {
        println!("x{:<4} {:>10.3} {:>10.3} {:>10.3}", i + 1, s[0].mu[i], s[0].mu_star[i], s[0].sigma[i]);
    }
    Ok(())
}
