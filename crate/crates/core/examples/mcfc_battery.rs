//! Every method at the maximum-power point of the fuel cell: the three
//! uncertainty estimates and the importance ranking of the nine inputs.
//!
//! Run with `cargo run --release --example mcfc_battery`.

use sauq::mcfc_study::{optimum_battery, BatteryOptions, RankMethod};
use sauq::models::McfcConstants;
use sauq::study::nominal_optimum;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = McfcConstants::default();
    let j_star = nominal_optimum(&c)?;
    let b = optimum_battery(j_star, &BatteryOptions::default(), 42, &c)?;

    println!("j* = {j_star:.1} A/m2");
    for (k, out) in b.outputs.iter().enumerate() {
        let sds: Vec<String> = b.uq[k].iter().map(|u| format!("{} {:.4}", u.method.as_str(), u.sd)).collect();
        println!("sd of {out}: {}", sds.join(", "));
    }

    let t = &b.ranking[0];
    println!("\nimportance for P (rank in brackets)");
    print!("{:<10}", "");
    for m in RankMethod::ALL {
        print!(" {:>14}", m.as_str());
    }
    println!();
    let ranks: Vec<Vec<usize>> = RankMethod::ALL.iter().map(|m| t.ranks(*m)).collect();
    for (i, row) in t.rows.iter().enumerate() {
        print!("{:<10}", row.parameter);
        for (m, r) in RankMethod::ALL.iter().zip(&ranks) {
            print!(" {:>10.3e} [{}]", row.value(*m), r[i]);
        }
        println!();
    }
    Ok(())
}
