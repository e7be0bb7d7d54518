//! Degree sequences with minimum degree k and their configuration-model hypergraphs.

use corestrip::hypergraph::{config_model, sample_truncated_multinomial};
use corestrip::stripping::parallel_strip;
use corestrip::thresholds::{invert_mean_degree, truncated_poisson_profile};
use corestrip::RngSeed;

fn main() -> corestrip::Result<()> {
    let (n, r, k) = (50_000, 3, 2);
    let d = 3 * 40_000u64;
    let deg = sample_truncated_multinomial(n, d, k, RngSeed::new(1))?;
    println!("sum {} over {} vertices, min degree {}", deg.sum(), deg.len(), deg.degrees.iter().min().unwrap());

    // Empirical degree shares against the truncated Poisson law with the same mean.
    let lambda = invert_mean_degree(d as f64 / n as f64, k)?;
    let law = truncated_poisson_profile(lambda, k as usize, 6);
    for j in 2..=6 {
        println!("  deg {j}: {:.4} vs {:.4}", deg.count_of(j) as f64 / n as f64, law[j as usize]);
    }

    // Every vertex of a min-degree-k configuration is already in the k-core.
    let h = config_model(&deg, r, RngSeed::new(2))?;
    let t = parallel_strip(&h, k)?;
    println!("{} edges, simple: {}, core size {}", h.num_edges(), h.is_simple(), t.core.len());
    Ok(())
}
