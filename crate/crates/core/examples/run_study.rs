//! Drives a study from a TOML document, the same way the `sauq run` command
//! does, and lists the files it wrote.
//!
//! Run with `cargo run --example run_study`.

use sauq::report::Format;
use sauq::study::{resolve, run_study, StudyConfig};

const CONFIG: &str = r#"
seed = 7

[model]
name = "sfs2"

[[methods]]
kind = "src"
n_s = 2000

[[methods]]
kind = "pcc"
n_s = 2000

[[methods]]
kind = "morris"
trajectories = 40
levels = 4

[[methods]]
kind = "sobol"
n = 2000
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = StudyConfig::from_toml(CONFIG)?;
    cfg.output_dir = std::env::temp_dir().join("sauq-run-study-example");
    let study = resolve(&cfg, Some(CONFIG))?;
    let summary = run_study(&study, Format::Csv)?;
    for m in &summary.methods {
        println!("{:<8} ok={} {:?}", m.label, m.ok, m.files);
    }
    println!("plots: {:?}", summary.plots);
    println!("\nsobol.csv:\n{}", std::fs::read_to_string(summary.output_dir.join("sobol.csv"))?);
    Ok(())
}
