//! Brute-force references on small instances: solution sets, exact depths,
//! order-independence of the core, and connectivity thresholds.

use corestrip::hypergraph::gen_binomial;
use corestrip::oracle::{enumerate_exhaustive, enumerate_nullspace, exact_connectivity_threshold, exact_depths, exhaustive_core, gf2_rank};
use corestrip::stripping::{depth_bounds, parallel_strip, slow_strip, SlowStripOptions};
use corestrip::xorsat::{connectivity_width, eliminate, gen_system};
use corestrip::RngSeed;

fn main() -> corestrip::Result<()> {
    let h = gen_binomial(14, 3, 5.5, RngSeed::new(4))?;
    let run = slow_strip(&h, 2, &SlowStripOptions::default())?;
    println!("n=14, {} edges, core {:?}", h.num_edges(), run.trace.core);

    let depths = exact_depths(&h, 2)?;
    for v in 0..h.n() as u32 {
        if let Some(d) = depths[v as usize] {
            let (lo, hi) = depth_bounds(&run.trace, &run.dag, v)?;
            println!("  vertex {v}: exact depth {d}, bounds [{lo}, {hi}]");
        }
    }
    let core = exhaustive_core(&h, 2, 50, RngSeed::new(0))?;
    assert_eq!(core, parallel_strip(&h, 2)?.core);

    let sys = gen_system(&h, RngSeed::new(8));
    let sols = enumerate_exhaustive(&sys)?;
    assert_eq!(sols, enumerate_nullspace(&sys)?);
    println!("rank {}, {} solutions", gf2_rank(&sys), sols.len());

    // A sparser instance without a core: one cluster, threshold within the elimination bound.
    let h = gen_binomial(18, 3, 2.5, RngSeed::new(6))?;
    let run = slow_strip(&h, 2, &SlowStripOptions::default())?;
    let sys = gen_system(&h, RngSeed::new(6));
    let sols = enumerate_nullspace(&sys)?;
    let w = connectivity_width(&eliminate(&sys, &run.trace, &run.dag)?);
    println!(
        "n=18, {} edges, core size {}: {} solutions, connectivity threshold {} (bounds {} .. {})",
        h.num_edges(),
        run.trace.core.len(),
        sols.len(),
        exact_connectivity_threshold(&sols)?,
        w.lower_witness + 1,
        w.upper
    );
    Ok(())
}
