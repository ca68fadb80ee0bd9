//! Polytope coordinates of a winding cell and the reduced vector field.

use ksnet::dynamics::ModelParams;
use ksnet::graph::WeightedGraph;
use ksnet::reduction::PolytopeChart;
use ksnet::seminorm::log_seminorm;
use ksnet::sync::lift;
use ksnet::torus::PhaseState;
use nalgebra::DVector;

fn main() -> ksnet::Result<()> {
    let g = WeightedGraph::ring(5)?;
    let p = ModelParams::new(g.clone(), 0.3, DVector::from_vec(vec![0.1, -0.2, 0.0, 0.15, -0.05]))?;
    let chart = PolytopeChart::for_graph(&g)?;

    let x = PhaseState::new(PhaseState::splay(5, 1).add_scalar(1.0));
    let r = chart.project(&x)?;
    println!("cell u = {}, z = {:.4?}", r.u, r.z.as_slice());
    println!("edge differences from z: {:.4?}", chart.embed_edge_diffs(&r.z, &r.u)?.as_slice());
    println!("inside P_(u, 1.3): {}", chart.in_polytope(&r.z, &r.u, 1.3)?);

    let back = lift(&chart, &r.z, &r.u)?;
    println!("mean-zero preimage: {:.4?}", back.as_slice());

    let zdot = chart.reduced_field(&p, &r.z, &r.u)?;
    println!("reduced field:      {:.4?}", zdot.as_slice());
    println!("R f(x):             {:.4?}", (chart.projector().r() * p.vector_field(&x)?).as_slice());

    let j = chart.reduced_jacobian(&p, &r.z, &r.u)?;
    let mu_reduced = ksnet::seminorm::lambda_max((&j + j.transpose()) * 0.5);
    let mu_full = log_seminorm(chart.projector(), &p.jacobian(&x)?)?;
    println!("mu of reduced Jacobian {mu_reduced:.6}, consensus log-seminorm of J_f {mu_full:.6}");
    Ok(())
}
