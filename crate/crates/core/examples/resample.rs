//! Resampling a hypergraph from its level profile and checking the level partition survives.

use corestrip::hypergraph::gen_binomial;
use corestrip::stripping::{core_degree_sequence, level_profiles, parallel_strip, resample_from_profiles};
use corestrip::thresholds::{threshold_constants, ModelParams};
use corestrip::RngSeed;

fn main() -> corestrip::Result<()> {
    let n = 5_000;
    let c = threshold_constants(ModelParams::new(3, 2)?)?.c_rk + (n as f64).powf(-0.3);
    let h = gen_binomial(n, 3, c, RngSeed::new(5))?;
    let trace = parallel_strip(&h, 2)?;
    let profile = level_profiles(&h, &trace)?;
    let core_deg = core_degree_sequence(&h, &trace);

    let v = trace.levels[1][0];
    println!("vertex {v} on level 2: lambda = {:?}, d+ = {}", profile.lambda(v), profile.d_plus(v));

    let mut matches = 0;
    for s in 0..20 {
        let r = resample_from_profiles(&profile, &core_deg, RngSeed::new(s))?;
        let t = parallel_strip(&r.hypergraph, 2)?;
        let same = t.levels == trace.levels && t.core == trace.core;
        matches += same as usize;
        if !r.repaired_layers.is_empty() {
            println!("draw {s}: repaired layers {:?}", r.repaired_layers);
        }
    }
    println!("{matches}/20 resamples reproduce all {} levels and the core", trace.i_max());
    Ok(())
}
