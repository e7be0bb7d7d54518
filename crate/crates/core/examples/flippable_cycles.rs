//! Flippable cycles: cycles of degree-2 vertices, inside and outside the core.

use corestrip::hypergraph::gen_binomial;
use corestrip::xorsat::{find_flippable_cycles, flippable_mass};
use corestrip::thresholds::{threshold_constants, ModelParams};
use corestrip::RngSeed;

fn main() -> corestrip::Result<()> {
    let crit = threshold_constants(ModelParams::new(3, 2)?)?.c_rk;
    for n in [10_000, 100_000] {
        let h = gen_binomial(n, 3, crit + (n as f64).powf(-0.3), RngSeed::new(9))?;
        let all = find_flippable_cycles(&h, false);
        let core = find_flippable_cycles(&h, true);
        let longest = core.iter().map(|c| c.vertices.len()).max().unwrap_or(0);
        println!(
            "n={n}: {} components in H, {} in the core; mass {} in H, {} in the core; longest core component {longest}",
            all.len(),
            core.len(),
            flippable_mass(&all),
            flippable_mass(&core),
        );
    }
    Ok(())
}
