//! A small Monte Carlo sweep with CSV and JSON outputs.

use corestrip::experiment::{read_trials_csv, run_experiment, write_outputs, ExperimentConfig, ExperimentKind};

fn main() -> corestrip::Result<()> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::StripScaling, vec![10_000, 30_000, 100_000], 8, 42);
    cfg.delta = Some(0.3);
    let out = run_experiment(&cfg)?;
    for p in &out.summary.points {
        let s = p.metrics["strip_number"];
        println!("n={:>6}: strip number {:.1} ± {:.1} over {} trials", p.n, s.mean, s.sd, s.count);
    }
    if let Some(f) = out.summary.fit {
        println!("fitted exponent {:.3} ± {:.3}", f.exponent, f.stderr);
    }

    let dir = std::env::temp_dir().join("corestrip-example");
    write_outputs(&out, &dir)?;
    let back = read_trials_csv(std::fs::File::open(dir.join("trials.csv"))?)?;
    println!("wrote {} rows to {}", back.len(), dir.display());
    Ok(())
}
