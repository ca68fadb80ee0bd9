//! Two trajectories from cohesive starts approach each other modulo
//! rotation at least as fast as the certified rate.

use ksnet::certificate::{certify, sample_cohesive_state};
use ksnet::dynamics::ModelParams;
use ksnet::graph::WeightedGraph;
use ksnet::seminorm::{consensus_seminorm, ConsensusProjector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ksnet::Result<()> {
    let g = WeightedGraph::ring(6)?;
    let phi = 0.2;
    let report = certify(&g, phi, None)?;
    let p = ModelParams::homogeneous(g.clone(), phi)?;
    let proj = ConsensusProjector::new(g.n())?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let tree = g.spanning_tree();
    let x0 = sample_cohesive_state(&g, &tree, report.gamma, &mut rng, 100_000).unwrap();
    let y0 = sample_cohesive_state(&g, &tree, report.gamma, &mut rng, 100_000).unwrap();
    let (tx, ty) = (p.integrate(&x0, 1e-2, 10.0)?, p.integrate(&y0, 1e-2, 10.0)?);
    let d0 = consensus_seminorm(&proj, &(&*x0 - &*y0))?;
    println!("certified rate c = {:.4}", report.rate_c);
    println!("{:>6} {:>12} {:>14}", "t", "distance", "bound");
    for k in (0..tx.len()).step_by(100) {
        let d = consensus_seminorm(&proj, &(&*tx.states[k] - &*ty.states[k]))?;
        let t = tx.times[k];
        println!("{t:6.2} {d:12.6} {:14.6}", d0 * (-report.rate_c * t).exp());
    }
    Ok(())
}
