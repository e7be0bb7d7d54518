//! Sampling binomial random hypergraphs, a monotone coupling, and CSV round trips.

use corestrip::hypergraph::{binomial_edge_probability, gen_binomial, gen_coupled, read_edges_csv, write_edges_csv};
use corestrip::thresholds::{threshold_constants, ModelParams};
use corestrip::RngSeed;

fn main() -> corestrip::Result<()> {
    let n = 100_000;
    let crit = threshold_constants(ModelParams::new(3, 2)?)?.c_rk;
    let c = crit + (n as f64).powf(-0.3);

    let h = gen_binomial(n, 3, c, RngSeed::new(7))?;
    let expected = binomial_edge_probability(n, 3, c) * (n as f64) * (n as f64 - 1.0) * (n as f64 - 2.0) / 6.0;
    let stats = h.degree_stats();
    println!("n={n} c={c:.5}: {} edges (expected {expected:.0}), max degree {}", h.num_edges(), stats.max_degree);

    // The low-density graph is a subgraph of the high-density one.
    let (lo, hi) = gen_coupled(n, 3, crit - 0.1, crit + 0.1, RngSeed::new(7))?;
    println!("coupled: {} edges below, {} above", lo.num_edges(), hi.num_edges());

    let mut buf = Vec::new();
    write_edges_csv(&h, &mut buf)?;
    let back = read_edges_csv(buf.as_slice(), Some(n), false)?;
    assert_eq!(back.slots(), h.slots());
    println!("csv round trip: {} bytes", buf.len());
    Ok(())
}
