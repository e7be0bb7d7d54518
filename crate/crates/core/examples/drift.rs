//! Light-vertex process near criticality: samples of L_t and the phase-2 drift.

use corestrip::hypergraph::gen_binomial;
use corestrip::stripping::{drift_series, slow_strip, write_trace_csv, SlowStripOptions};
use corestrip::thresholds::{threshold_constants, ModelParams};
use corestrip::RngSeed;

fn main() -> corestrip::Result<()> {
    let (n, delta) = (100_000, 0.3);
    let tc = threshold_constants(ModelParams::new(3, 2)?)?;
    let c = tc.c_rk + (n as f64).powf(-delta);
    let h = gen_binomial(n, 3, c, RngSeed::new(3))?;

    let opts = SlowStripOptions { stride: 256, delta: Some(delta), constants: Some(tc) };
    let run = slow_strip(&h, 2, &opts)?;
    let s = drift_series(&run)?;
    println!("t0 = {}, tau = {}, phase-2 steps {}", s.t0, s.tau, s.phase2_steps);
    println!("mean increment {:.5} (95% CI {:.5} .. {:.5})", s.mean_increment, s.ci95.0, s.ci95.1);
    println!("max L in phase 2: {} = {:.3} n^(1-delta)", s.max_l_phase2, s.max_l_phase2 as f64 / (n as f64).powf(1.0 - delta));
    if let Some(br) = s.mean_br {
        println!("mean branching ratio {br:.5}");
    }

    let mut csv = Vec::new();
    write_trace_csv(&run.drift, &mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv).lines().take(4).collect::<Vec<_>>().join("\n"));
    println!("\n... {} samples", run.drift.len());
    Ok(())
}
