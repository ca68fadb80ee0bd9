//! Spectral constants and the fundamental cycle basis of a few graphs.

use ksnet::graph::WeightedGraph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ksnet::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let graphs = [
        ("K5", WeightedGraph::complete(5)?),
        ("ring-6", WeightedGraph::ring(6)?),
        ("star-5", WeightedGraph::star(5)?),
        ("random-10", WeightedGraph::random_connected(10, 0.25, (0.5, 1.5), &mut rng)?),
    ];
    for (name, g) in &graphs {
        let basis = g.cycle_basis();
        println!(
            "{name:>9}: n = {:2}, m = {:2}, lambda2 = {:.4}, d_max = {:.4}, cycles = {} (lengths {:?})",
            g.n(),
            g.m(),
            g.algebraic_connectivity()?,
            g.max_weighted_degree(),
            basis.len(),
            basis.cycle_lengths()
        );
    }

    let ring = WeightedGraph::ring(5)?;
    println!("\nring-5 Laplacian spectrum: {:.4?}", ring.laplacian_spectrum());
    println!("ring-5 basis cycle: {:?}", ring.cycle_basis().cycles()[0]);
    println!("cycle-edge matrix: {}", ring.cycle_basis().cycle_edge_matrix());
    Ok(())
}
