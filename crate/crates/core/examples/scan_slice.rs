//! Sign map of the Jacobian's log-seminorm on a planar slice of K3.
//!
//! `-` marks points where the seminorm is negative, `+` where it is not, and
//! capitals mark points inside the cohesive region.

use ksnet::certificate::{scan_slice, SliceSpec};
use ksnet::dynamics::ModelParams;
use ksnet::graph::WeightedGraph;
use ksnet::torus::PhaseState;
use std::f64::consts::PI;

fn main() -> ksnet::Result<()> {
    let g = WeightedGraph::complete(3)?;
    let p = ModelParams::homogeneous(g.clone(), 0.01)?;
    let res = 41;
    let grid = scan_slice(&p, &g.cycle_basis(), SliceSpec::axes(PhaseState::zeros(3), 0, 1, (-PI, PI), res))?;
    println!("gamma_bar = {:.4}", grid.gamma_bar);
    for ti in (0..res).rev() {
        let line: String = (0..res)
            .map(|si| {
                let pt = grid.at(si, ti);
                match (pt.cohesive, pt.mu < 0.0) {
                    (true, true) => 'N',
                    (true, false) => 'P',
                    (false, true) => '-',
                    (false, false) => '+',
                }
            })
            .collect();
        println!("{line}");
    }
    Ok(())
}
