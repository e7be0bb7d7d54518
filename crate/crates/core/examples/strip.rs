//! Parallel and one-at-a-time stripping, the deletion DAG, and depth bounds.

use corestrip::hypergraph::gen_binomial;
use corestrip::stripping::{depth_bounds, parallel_strip, reach_set, slow_strip, SlowStripOptions};
use corestrip::thresholds::{threshold_constants, ModelParams};
use corestrip::RngSeed;

fn main() -> corestrip::Result<()> {
    let n = 200_000;
    let tc = threshold_constants(ModelParams::new(3, 2)?)?;
    let c = tc.c_rk + (n as f64).powf(-0.3);
    let h = gen_binomial(n, 3, c, RngSeed::new(11))?;

    let fast = parallel_strip(&h, 2)?;
    println!("core {} / {n} (alpha {:.4}), {} rounds", fast.core.len(), tc.alpha, fast.i_max());
    for (i, lvl) in fast.levels.iter().enumerate().step_by(8) {
        println!("  S_{} has {} vertices", i + 1, lvl.len());
    }

    let run = slow_strip(&h, 2, &SlowStripOptions::default())?;
    assert_eq!(run.trace.core, fast.core);
    println!("slow strip: same core, {} arcs in the DAG", run.dag.num_arcs());

    // Reach set and depth bounds of the first vertex on the top level.
    let v = fast.levels[fast.i_max() - 1][0];
    let reach = reach_set(&run.dag, v)?;
    let (lo, hi) = depth_bounds(&run.trace, &run.dag, v)?;
    println!("vertex {v}: level {}, |R+| = {}, depth in [{lo}, {hi}]", fast.level_of[v as usize], reach.len());
    Ok(())
}
