//! Cluster structure of a random 2-XORSAT-on-hypergraph instance: free variables,
//! solution extension, connectivity width and the last-free-vertex witness chain.

use corestrip::hypergraph::gen_binomial;
use corestrip::stripping::{slow_strip, SlowStripOptions};
use corestrip::thresholds::{threshold_constants, ModelParams};
use corestrip::xorsat::{connectivity_width, eliminate, extend_solution, gen_system, last_free_witness, solve_core};
use corestrip::RngSeed;

fn main() -> corestrip::Result<()> {
    let n = 10_000;
    let c = threshold_constants(ModelParams::new(3, 2)?)?.c_rk + (n as f64).powf(-0.3);
    let h = gen_binomial(n, 3, c, RngSeed::new(21))?;
    let run = slow_strip(&h, 2, &SlowStripOptions::default())?;

    // Redraw right-hand sides until the core is consistent.
    let mut found = None;
    for i in 0..32 {
        let sys = gen_system(&h, RngSeed::new(21).derive(i));
        if let Some(x) = solve_core(&sys, &run.trace)? {
            found = Some((sys, x));
            break;
        }
    }
    let (sys, core_sol) = found.expect("a satisfiable draw");

    let s = eliminate(&sys, &run.trace, &run.dag)?;
    println!("core {} vertices, {} free variables ({} outside the core), {} core cycles", run.trace.core.len(), s.num_free(), s.num_noncore_free, s.cycles.len());

    let zeros = vec![false; s.num_free()];
    let x = extend_solution(&s, &core_sol, &zeros)?;
    let mut flipped = zeros.clone();
    flipped[0] = true;
    let y = extend_solution(&s, &core_sol, &flipped)?;
    let diff = x.iter().zip(&y).filter(|(a, b)| a != b).count();
    assert!(sys.is_satisfied_by(&x) && sys.is_satisfied_by(&y));
    println!("flipping free variable 0 changes {diff} variables (flip set {})", s.flip_set(0).len());

    let w = connectivity_width(&s);
    println!("connectivity width <= {}, lower witness {}", w.upper, w.lower_witness);
    let wit = last_free_witness(&run.trace, &run.dag, &s)?;
    println!(
        "witness u* = {} at level {}: {} candidates, {} verified, chain {}",
        wit.u_star, wit.i_star, wit.candidates, wit.verified.len(), wit.chain.len()
    );
    Ok(())
}
