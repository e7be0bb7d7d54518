//! Critical densities and core constants for a few `(r, k)` pairs.

use corestrip::thresholds::{core_degree_profile, supercritical_point, threshold_constants, ModelParams};

fn main() -> corestrip::Result<()> {
    for (r, k) in [(3, 2), (2, 3), (4, 2)] {
        let params = ModelParams::new(r, k)?;
        let tc = threshold_constants(params)?;
        println!(
            "r={r} k={k}: c={:.8} mu={:.6} alpha={:.6} beta={:.6} K1={:.6}",
            tc.c_rk, tc.mu_rk, tc.alpha, tc.beta, tc.k1
        );
    }

    let params = ModelParams::new(3, 2)?;
    let tc = threshold_constants(params)?;
    for eps in [0.0, 0.01, 0.1, 1.0] {
        let p = supercritical_point(tc.c_rk + eps, params)?;
        println!("c = crit + {eps:<4}: core fraction {:.5}, edges/n {:.5}", p.alpha_c, p.beta_c);
    }

    // Share of core vertices with degree j at the threshold.
    let profile = core_degree_profile(params, 8)?;
    for (j, q) in profile.iter().enumerate().filter(|(_, q)| **q > 0.0) {
        println!("  P(deg = {j}) = {q:.5}");
    }
    Ok(())
}
