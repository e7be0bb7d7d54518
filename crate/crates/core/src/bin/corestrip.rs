use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use corestrip::experiment::{run_experiment, write_outputs, CExpr, ExperimentConfig};
use corestrip::hypergraph::{gen_binomial, read_edges_csv, write_edges_csv};
use corestrip::oracle::{exact_depths, exhaustive_core, enumerate_exhaustive, enumerate_nullspace, gf2_rank, MAX_DEPTH_N, MAX_ENUM_N};
use corestrip::stripping::{drift_series, slow_strip, write_trace_csv, SlowStripOptions};
use corestrip::thresholds::{supercritical_point_with, threshold_constants, ModelParams};
use corestrip::xorsat::{connectivity_width, eliminate, find_flippable_cycles, gen_system, last_free_witness, solve_core};
use corestrip::{Hypergraph, Result, RngSeed};

#[derive(Parser)]
#[command(name = "corestrip", version, about = "k-core stripping of random hypergraphs and XORSAT clusters")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Threshold constants for (r, k).
    Thresholds {
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Also report the core fractions at this density.
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Sample H_r(n, p = c/n^(r-1)) and write its edges as CSV.
    Gen {
        #[command(flatten)]
        inst: Instance,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run SLOW-STRIP and report the core, levels and drift.
    Strip {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 64)]
        stride: usize,
        /// Drift samples as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Cluster structure of a random XORSAT system on the sampled hypergraph.
    Clusters {
        #[command(flatten)]
        inst: Instance,
        #[arg(long)]
        json: bool,
    },
    /// Run a configured Monte Carlo experiment.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Brute-force references on a small edge list.
    Oracle {
        #[command(subcommand)]
        cmd: OracleCmd,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Solution count and GF(2) rank for random right-hand sides.
    Solutions {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 0)]
        rhs_seed: u64,
    },
    /// Exact depth of every vertex.
    Depth {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 2)]
        k: u32,
    },
    /// Core after many random stripping orders.
    Core {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct Instance {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    r: usize,
    /// Density: a number, `crit`, or sums like `crit + n^-delta`, `crit - 2*n^-0.3`.
    #[arg(long = "c-expr", visible_alias = "c", default_value = "crit + n^-delta")]
    c: CExpr,
    #[arg(long, default_value_t = 0.3)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Instance {
    fn sample(&self) -> Result<(Hypergraph, f64)> {
        let tc = threshold_constants(ModelParams::supported(self.r, 2)?)?;
        let c = self.c.eval(self.n, tc.c_rk, Some(self.delta))?;
        Ok((gen_binomial(self.n, self.r, c, RngSeed::new(self.seed))?, c))
    }
}

#[derive(Args)]
struct Source {
    /// Edge list CSV as written by `gen`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    n: Option<usize>,
}

impl Source {
    fn load(&self) -> Result<Hypergraph> {
        read_edges_csv(BufReader::new(File::open(&self.input)?), self.n, true)
    }
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Thresholds { r, k, c, json } => {
            let tc = threshold_constants(ModelParams::supported(r, k)?)?;
            let point = c.map(|c| supercritical_point_with(c, &tc)).transpose()?;
            if json {
                print_json(&json!({ "constants": tc, "point": point }))?;
            } else {
                println!("r = {r}, k = {k}");
                println!("c_rk   = {:.10}  (c_rk/(r-1)! = {:.10})", tc.c_rk, tc.c_rk / ModelParams::new(r, k)?.density_scale());
                println!("mu_rk  = {:.10}", tc.mu_rk);
                println!("alpha  = {:.10}", tc.alpha);
                println!("beta   = {:.10}", tc.beta);
                println!("zeta   = {:.10}", tc.zeta);
                println!("p_star = {:.10}", tc.p_star);
                println!("K1 = {:.6}, K2 = {:.6}, K3 = {:.6}", tc.k1, tc.k2, tc.k3);
                if let Some(p) = point {
                    println!("at c = {}: mu = {:.8}, alpha = {:.8}, beta = {:.8}", p.c, p.mu_c, p.alpha_c, p.beta_c);
                }
            }
        }
        Cmd::Gen { inst, out } => {
            let (h, _) = inst.sample()?;
            match out {
                Some(p) => write_edges_csv(&h, BufWriter::new(File::create(p)?))?,
                None => write_edges_csv(&h, io::stdout().lock())?,
            }
        }
        Cmd::Strip { inst, k, stride, trace, summary } => {
            let (h, c) = inst.sample()?;
            let tc = threshold_constants(ModelParams::supported(inst.r, k as usize)?)?;
            let opts = SlowStripOptions { stride, delta: Some(inst.delta), constants: Some(tc) };
            let run = slow_strip(&h, k, &opts)?;
            if let Some(p) = trace {
                write_trace_csv(&run.drift, BufWriter::new(File::create(p)?))?;
            }
            let t = &run.trace;
            let report = json!({
                "n": inst.n, "r": inst.r, "k": k, "c": c, "edges": h.num_edges(),
                "core_size": t.core.len(), "core_edges": t.core_edges.len(),
                "strip_number": t.i_max(), "tau": t.tau, "t0": t.t0,
                "drift": drift_series(&run).ok(),
            });
            match summary {
                Some(p) => {
                    let mut f = BufWriter::new(File::create(p)?);
                    serde_json::to_writer_pretty(&mut f, &report)?;
                    writeln!(f)?;
                }
                None => print_json(&report)?,
            }
        }
        Cmd::Clusters { inst, json } => {
            let (h, c) = inst.sample()?;
            let tc = threshold_constants(ModelParams::supported(inst.r, 2)?)?;
            let opts = SlowStripOptions { delta: Some(inst.delta), constants: Some(tc), ..Default::default() };
            let run = slow_strip(&h, 2, &opts)?;
            let sys = gen_system(&h, RngSeed::new(inst.seed).derive(0x5a7));
            let sat = match solve_core(&sys, &run.trace) {
                Ok(x) => Some(x.is_some()),
                Err(corestrip::Error::Guard(_)) => None,
                Err(e) => return Err(e),
            };
            let s = eliminate(&sys, &run.trace, &run.dag)?;
            let w = connectivity_width(&s);
            let witness = last_free_witness(&run.trace, &run.dag, &s).ok();
            let all_cycles = find_flippable_cycles(&h, false).iter().filter(|c| !c.degenerate).count();
            let report = json!({
                "n": inst.n, "c": c, "core_size": run.trace.core.len(), "core_satisfiable": sat,
                "free": s.num_free(), "noncore_free": s.num_noncore_free,
                "core_cycles": s.cycles.len(), "core_cycle_mass": s.cycle_vertices().len(),
                "all_flippable_cycles": all_cycles,
                "width_upper": w.upper, "lower_witness": w.lower_witness,
                "witness": witness.map(|r| json!({
                    "u_star": r.u_star, "i_star": r.i_star, "candidates": r.candidates,
                    "verified": r.verified.len(), "chain": r.chain.len(), "singleton_count": r.singleton_count,
                })),
            });
            if json {
                print_json(&report)?;
            } else {
                for (k, v) in report.as_object().expect("object") {
                    println!("{k}: {v}");
                }
            }
        }
        Cmd::Experiment { config, out, workers } => {
            let mut cfg = ExperimentConfig::from_path(&config)?;
            cfg.apply_seed_env()?;
            if workers.is_some() {
                cfg.workers = workers;
            }
            let result = run_experiment(&cfg)?;
            write_outputs(&result, &out)?;
            let failed = result.records.iter().filter(|r| r.error.is_some()).count();
            eprintln!("{} trials, {failed} failed; wrote {}", result.records.len(), out.display());
        }
        Cmd::Oracle { cmd } => match cmd {
            OracleCmd::Solutions { src, rhs_seed } => {
                let h = src.load()?;
                if h.n() > MAX_ENUM_N {
                    eprintln!("note: enumeration needs n <= {MAX_ENUM_N}");
                }
                let sys = gen_system(&h, RngSeed::new(rhs_seed));
                let a = enumerate_exhaustive(&sys)?;
                let b = enumerate_nullspace(&sys)?;
                print_json(&json!({ "rank": gf2_rank(&sys), "solutions": a.len(), "methods_agree": a == b }))?;
            }
            OracleCmd::Depth { src, k } => {
                let h = src.load()?;
                if h.n() > MAX_DEPTH_N {
                    eprintln!("note: exact depth needs n <= {MAX_DEPTH_N}");
                }
                print_json(&exact_depths(&h, k)?)?;
            }
            OracleCmd::Core { src, k, trials, seed } => {
                let h = src.load()?;
                print_json(&exhaustive_core(&h, k, trials, RngSeed::new(seed))?)?;
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
