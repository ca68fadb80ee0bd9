//! One synchronous state per winding cell, different states across cells.

use ksnet::dynamics::ModelParams;
use ksnet::graph::WeightedGraph;
use ksnet::reduction::PolytopeChart;
use ksnet::sync::{enumerate_feasible_windings, uniqueness_check, NewtonOptions};
use std::f64::consts::FRAC_PI_2;

fn main() -> ksnet::Result<()> {
    let g = WeightedGraph::ring(5)?;
    let p = ModelParams::homogeneous(g.clone(), 0.0)?;
    let chart = PolytopeChart::for_graph(&g)?;
    let gamma = 0.9 * FRAC_PI_2;
    for u in enumerate_feasible_windings(chart.basis(), gamma) {
        let report = uniqueness_check(&p, &chart, &u, gamma, 30, 1, &NewtonOptions::default())?;
        println!(
            "u = {u}: {} class(es), {} of 30 starts converged inside the cell, {} escaped",
            report.classes.len(),
            report.converged_in_cell,
            report.escaped
        );
        if let Some(x) = report.representative() {
            println!("    representative {:.4?}", x.as_slice());
        }
    }
    Ok(())
}
