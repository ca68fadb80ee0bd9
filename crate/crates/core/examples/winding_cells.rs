//! Winding vectors, cohesiveness and the cells they index.

use ksnet::graph::WeightedGraph;
use ksnet::sync::enumerate_feasible_windings;
use ksnet::torus::{ccw_diff, is_cohesive, max_edge_diff, winding_vector, PhaseState};
use std::f64::consts::{FRAC_PI_2, TAU};

fn main() -> ksnet::Result<()> {
    println!("d_cc(3, -3) = {:.4}  (3 - (-3) wrapped into [-pi, pi))", ccw_diff(3.0, -3.0));

    let g = WeightedGraph::ring(5)?;
    let basis = g.cycle_basis();
    for k in -2..=2 {
        let x = PhaseState::splay(5, k);
        println!(
            "splay k = {k:2}: winding {}, max edge diff {:.4}, pi/2-cohesive {}",
            winding_vector(&basis, &x)?,
            max_edge_diff(&g, &x)?,
            is_cohesive(&g, &x, FRAC_PI_2)?
        );
    }

    // windings ignore rigid rotations and 2 pi moves of single nodes
    let mut x = PhaseState::splay(5, 1);
    x[2] += 3.0 * TAU;
    let x = PhaseState::new(x.add_scalar(0.7));
    println!("moved splay: winding {}", winding_vector(&basis, &x)?);

    let cells = enumerate_feasible_windings(&basis, FRAC_PI_2);
    println!("winding vectors allowed on pi/2-cohesive states of ring-5: {cells:?}");
    Ok(())
}
