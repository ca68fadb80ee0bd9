//! Cohesiveness threshold as a function of the frustration, per ratio
//! lambda2 / d_max.

use ksnet::certificate::{bounds_curve, linspace};
use std::f64::consts::FRAC_PI_2;

fn main() -> ksnet::Result<()> {
    let ratios = [0.25, 0.5, 1.0, 2.0];
    let phis = linspace(0.05, FRAC_PI_2, 8);
    let rows = bounds_curve(&ratios, &phis)?;
    print!("{:>8}", "phi");
    for r in ratios {
        print!("{:>10}", format!("r={r}"));
    }
    println!();
    for (k, phi) in phis.iter().enumerate() {
        print!("{phi:8.3}");
        for (j, _) in ratios.iter().enumerate() {
            print!("{:10.4}", rows[j * phis.len() + k].gamma_bar);
        }
        println!();
    }
    Ok(())
}
