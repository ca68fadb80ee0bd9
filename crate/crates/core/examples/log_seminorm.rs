//! Three ways to evaluate the consensus log-seminorm of a matrix.

use ksnet::graph::WeightedGraph;
use ksnet::seminorm::{
    log_seminorm, log_seminorm_limit_extrapolated, log_seminorm_lmi_check, ConsensusProjector, LIMIT_STEPS,
};

fn main() -> ksnet::Result<()> {
    let g = WeightedGraph::ring(6)?;
    let a = -g.laplacian();
    let proj = ConsensusProjector::new(6)?;
    let mu = log_seminorm(&proj, &a)?;
    println!("eigenvalue formula: {mu:.10}  (-lambda2 = {:.10})", -g.algebraic_connectivity()?);
    println!("limit definition:   {:.10}", log_seminorm_limit_extrapolated(&proj, &a, &LIMIT_STEPS)?);
    println!("LMI holds at mu: {}, at mu - 0.01: {}", log_seminorm_lmi_check(&proj, &a, mu)?, log_seminorm_lmi_check(&proj, &a, mu - 0.01)?);
    Ok(())
}
