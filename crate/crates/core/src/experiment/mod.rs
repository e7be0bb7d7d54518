//! Seeded Monte Carlo experiments over a grid of `n`, with CSV trial records
//! and a JSON summary.

mod cexpr;
mod fit;

pub use cexpr::CExpr;
pub use fit::{fit_power_law, PowerFit};

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::gen_binomial;
use crate::rng::{splitmix64, RngSeed};
use crate::stripping::{
    core_degree_sequence, drift_series_with, level_profiles, parallel_strip, reach_set, resample_from_profiles,
    slow_strip, SlowStripOptions,
};
use crate::thresholds::{supercritical_point_with, threshold_constants, ModelParams, ThresholdConstants};
use crate::xorsat::{
    connectivity_width, eliminate, find_flippable_cycles, flippable_mass, gen_system, last_free_witness,
    solve_core,
};

pub const SEED_ENV: &str = "CORESTRIP_SEED";
/// Fresh right-hand sides tried per trial before a cluster trial gives up on
/// an inconsistent core.
const MAX_SAT_ATTEMPTS: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    CoreSize,
    StripScaling,
    DepthScaling,
    Drift,
    FlippableMass,
    ClusterConnectivity,
    ResampleCheck,
}

impl ExperimentKind {
    /// Column fitted against `n` in the summary.
    pub fn primary_metric(self) -> &'static str {
        match self {
            ExperimentKind::CoreSize => "core_fraction",
            ExperimentKind::StripScaling => "strip_number",
            ExperimentKind::DepthScaling => "max_reach",
            ExperimentKind::Drift => "max_l_scaled",
            ExperimentKind::FlippableMass => "flippable_mass",
            ExperimentKind::ClusterConnectivity => "width_upper",
            ExperimentKind::ResampleCheck => "resample_match",
        }
    }
}

fn default_r() -> usize {
    3
}
fn default_k() -> usize {
    2
}
fn default_c() -> CExpr {
    CExpr::parse("crit + n^-delta").expect("valid literal")
}
fn default_stride() -> usize {
    64
}
fn default_depth_sample() -> usize {
    1000
}
fn default_depth_tail() -> usize {
    10
}
fn default_resamples() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default = "default_r")]
    pub r: usize,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default = "default_c")]
    pub c: CExpr,
    pub n: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Drift sampling stride for SLOW-STRIP.
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default)]
    pub workers: Option<usize>,
    /// Uniform non-core vertices per depth trial.
    #[serde(default = "default_depth_sample")]
    pub depth_sample: usize,
    /// Trailing levels included whole in each depth trial.
    #[serde(default = "default_depth_tail")]
    pub depth_tail_levels: usize,
    /// Stripping rounds skipped before drift statistics are collected.
    #[serde(default)]
    pub burn_in: usize,
    /// Resamples per resample-check trial.
    #[serde(default = "default_resamples")]
    pub resamples: usize,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, n: Vec<usize>, trials: usize, seed: u64) -> Self {
        ExperimentConfig {
            kind,
            r: default_r(),
            k: default_k(),
            delta: None,
            c: default_c(),
            n,
            trials,
            seed,
            stride: default_stride(),
            workers: None,
            depth_sample: default_depth_sample(),
            depth_tail_levels: default_depth_tail(),
            burn_in: 0,
            resamples: default_resamples(),
            out_dir: None,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Replaces the base seed with `CORESTRIP_SEED` when set.
    pub fn apply_seed_env(&mut self) -> Result<()> {
        if let Ok(s) = std::env::var(SEED_ENV) {
            self.seed = s.trim().parse().map_err(|_| Error::Parse(format!("{SEED_ENV}='{s}' is not a u64")))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        ModelParams::supported(self.r, self.k)?;
        if self.n.is_empty() || self.n.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter("n grid must be nonempty and strictly increasing".into()));
        }
        if self.n[0] < self.r {
            return Err(Error::Parameter(format!("n must be at least r = {}", self.r)));
        }
        if self.trials == 0 || self.stride == 0 || self.resamples == 0 {
            return Err(Error::Parameter("trials, stride and resamples must be positive".into()));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d < 0.5) {
                return Err(Error::Parameter(format!("delta must lie in (0, 1/2), got {d}")));
            }
        } else if self.c.uses_delta() {
            return Err(Error::Parameter(format!("density '{}' needs delta", self.c)));
        }
        if self.kind == ExperimentKind::ClusterConnectivity && self.k != 2 {
            return Err(Error::Parameter("cluster experiments need k = 2".into()));
        }
        Ok(())
    }

    pub fn trial_seed(&self, n_index: usize, trial: usize) -> RngSeed {
        RngSeed::new(self.seed ^ splitmix64((n_index as u64) << 32 | trial as u64))
    }
}

/// One row of `trials.csv`. Empty fields do not apply to the experiment kind
/// or were not reached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct TrialRecord {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub c: f64,
    pub edges: Option<usize>,
    pub core_size: Option<usize>,
    pub core_edges: Option<usize>,
    pub core_fraction: Option<f64>,
    pub alpha_pred: Option<f64>,
    pub beta_pred: Option<f64>,
    pub strip_number: Option<usize>,
    pub max_reach: Option<usize>,
    pub reach_sampled: Option<usize>,
    pub t0: Option<usize>,
    pub tau: Option<usize>,
    pub phase2_steps: Option<usize>,
    pub mean_increment: Option<f64>,
    pub max_l_phase2: Option<u64>,
    pub max_l_scaled: Option<f64>,
    pub mean_br: Option<f64>,
    pub flippable_cycles: Option<usize>,
    pub flippable_mass: Option<usize>,
    pub sat_attempts: Option<u64>,
    pub num_free: Option<usize>,
    pub width_upper: Option<usize>,
    pub width_lower: Option<usize>,
    pub witness_chain: Option<usize>,
    pub resample_match: Option<f64>,
    pub repaired_layers: Option<usize>,
    pub total_layers: Option<usize>,
    pub error: Option<String>,
}

impl TrialRecord {
    fn metrics(&self) -> [(&'static str, Option<f64>); 17] {
        let u = |x: Option<usize>| x.map(|v| v as f64);
        [
            ("c", Some(self.c)),
            ("core_size", u(self.core_size)),
            ("core_edges", u(self.core_edges)),
            ("core_fraction", self.core_fraction),
            ("edge_fraction", self.core_edges.map(|e| e as f64 / self.n as f64)),
            ("strip_number", u(self.strip_number)),
            ("max_reach", u(self.max_reach)),
            ("phase2_steps", u(self.phase2_steps)),
            ("mean_increment", self.mean_increment),
            ("max_l_scaled", self.max_l_scaled),
            ("mean_br", self.mean_br),
            ("flippable_mass", u(self.flippable_mass)),
            ("num_free", u(self.num_free)),
            ("width_upper", u(self.width_upper)),
            ("width_lower", u(self.width_lower)),
            ("resample_match", self.resample_match),
            ("repair_rate", self.repaired_layers.zip(self.total_layers).map(|(a, b)| a as f64 / b.max(1) as f64)),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
}

impl Stat {
    pub fn of(xs: &[f64]) -> Option<Stat> {
        if xs.is_empty() {
            return None;
        }
        let m = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / m;
        let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0) } else { 0.0 };
        Some(Stat { count: xs.len(), mean, sd: var.sqrt() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSummary {
    pub n: usize,
    pub trials: usize,
    pub failures: usize,
    pub metrics: BTreeMap<&'static str, Stat>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub constants: ThresholdConstants,
    pub points: Vec<PointSummary>,
    pub fit_metric: &'static str,
    pub fit: Option<PowerFit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
}

/// Runs every `(n, trial)` pair in parallel; records come back in grid then
/// trial order and each depends only on the config and its own seed.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let tc = threshold_constants(ModelParams::supported(cfg.r, cfg.k)?)?;
    let tasks: Vec<(usize, usize)> =
        (0..cfg.n.len()).flat_map(|i| (0..cfg.trials).map(move |t| (i, t))).collect();
    let work = || tasks.par_iter().map(|&(i, t)| run_trial(cfg, &tc, i, t)).collect::<Vec<_>>();
    let records = match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let summary = summarize(cfg, tc, &records);
    Ok(ExperimentOutput { records, summary })
}

fn summarize(cfg: &ExperimentConfig, tc: ThresholdConstants, records: &[TrialRecord]) -> Summary {
    let mut points = Vec::with_capacity(cfg.n.len());
    for (i, &n) in cfg.n.iter().enumerate() {
        let rows = &records[i * cfg.trials..(i + 1) * cfg.trials];
        let mut cols: BTreeMap<&'static str, Vec<f64>> = BTreeMap::new();
        for rec in rows.iter().filter(|r| r.error.is_none()) {
            for (name, v) in rec.metrics() {
                if let Some(v) = v.filter(|v| v.is_finite()) {
                    cols.entry(name).or_default().push(v);
                }
            }
        }
        let metrics = cols.iter().filter_map(|(&k, xs)| Stat::of(xs).map(|s| (k, s))).collect();
        points.push(PointSummary {
            n,
            trials: rows.len(),
            failures: rows.iter().filter(|r| r.error.is_some()).count(),
            metrics,
        });
    }
    let fit_metric = cfg.kind.primary_metric();
    let pts: Vec<(f64, f64)> =
        points.iter().filter_map(|p| p.metrics.get(fit_metric).map(|s| (p.n as f64, s.mean))).collect();
    Summary { config: cfg.clone(), constants: tc, points, fit_metric, fit: fit_power_law(&pts).ok() }
}

fn run_trial(cfg: &ExperimentConfig, tc: &ThresholdConstants, n_index: usize, trial: usize) -> TrialRecord {
    let n = cfg.n[n_index];
    let seed = cfg.trial_seed(n_index, trial);
    let mut rec = TrialRecord { n, trial, seed: seed.seed, ..Default::default() };
    if let Err(e) = fill_trial(cfg, tc, seed, &mut rec) {
        rec.error = Some(e.to_string());
    }
    rec
}

fn fill_trial(cfg: &ExperimentConfig, tc: &ThresholdConstants, seed: RngSeed, rec: &mut TrialRecord) -> Result<()> {
    let n = rec.n;
    let k = cfg.k as u32;
    rec.c = cfg.c.eval(n, tc.c_rk, cfg.delta)?;
    if let Ok(p) = supercritical_point_with(rec.c, tc) {
        rec.alpha_pred = Some(p.alpha_c);
        rec.beta_pred = Some(p.beta_c);
    }
    let h = gen_binomial(n, cfg.r, rec.c, seed.derive(0x11))?;
    rec.edges = Some(h.num_edges());
    let slow_opts = SlowStripOptions { stride: cfg.stride, delta: cfg.delta, constants: Some(*tc) };
    let record_core = |rec: &mut TrialRecord, core: usize, core_edges: usize, s: usize| {
        rec.core_size = Some(core);
        rec.core_edges = Some(core_edges);
        rec.core_fraction = Some(core as f64 / n as f64);
        rec.strip_number = Some(s);
    };
    match cfg.kind {
        ExperimentKind::CoreSize | ExperimentKind::StripScaling => {
            let t = parallel_strip(&h, k)?;
            record_core(rec, t.core.len(), t.core_edges.len(), t.i_max());
        }
        ExperimentKind::DepthScaling => {
            let run = slow_strip(&h, k, &slow_opts)?;
            let t = &run.trace;
            record_core(rec, t.core.len(), t.core_edges.len(), t.i_max());
            let noncore: Vec<u32> = (0..n as u32).filter(|&v| !t.is_core(v)).collect();
            let mut rng = seed.derive(0xde).rng();
            let mut picked: Vec<u32> = sample(&mut rng, noncore.len(), cfg.depth_sample.min(noncore.len()))
                .into_iter()
                .map(|i| noncore[i])
                .collect();
            let tail_from = t.levels.len().saturating_sub(cfg.depth_tail_levels);
            picked.extend(t.levels[tail_from..].iter().flatten().copied());
            picked.sort_unstable();
            picked.dedup();
            let mut best = 0;
            for &v in &picked {
                best = best.max(reach_set(&run.dag, v)?.len());
            }
            rec.max_reach = Some(best);
            rec.reach_sampled = Some(picked.len());
        }
        ExperimentKind::Drift => {
            let run = slow_strip(&h, k, &slow_opts)?;
            let t = &run.trace;
            record_core(rec, t.core.len(), t.core_edges.len(), t.i_max());
            rec.tau = Some(t.tau);
            rec.t0 = t.t0;
            let d = drift_series_with(&run, cfg.burn_in)?;
            rec.phase2_steps = Some(d.phase2_steps);
            rec.mean_increment = Some(d.mean_increment);
            rec.max_l_phase2 = Some(d.max_l_phase2);
            if let Some(delta) = cfg.delta {
                rec.max_l_scaled = Some(d.max_l_phase2 as f64 / (n as f64).powf(1.0 - delta));
            }
            rec.mean_br = d.mean_br;
        }
        ExperimentKind::FlippableMass => {
            let t = parallel_strip(&h, 2)?;
            record_core(rec, t.core.len(), t.core_edges.len(), t.i_max());
            let cycles = find_flippable_cycles(&h, true);
            rec.flippable_cycles = Some(cycles.iter().filter(|c| !c.degenerate).count());
            rec.flippable_mass = Some(flippable_mass(&cycles));
        }
        ExperimentKind::ClusterConnectivity => {
            let run = slow_strip(&h, 2, &slow_opts)?;
            let t = &run.trace;
            record_core(rec, t.core.len(), t.core_edges.len(), t.i_max());
            // Cores beyond the dense solver guard are left unchecked.
            let mut attempt = 0;
            let sys = loop {
                attempt += 1;
                let sys = gen_system(&h, seed.derive(0x5a7 + attempt));
                match solve_core(&sys, t) {
                    Ok(Some(_)) => {
                        rec.sat_attempts = Some(attempt);
                        break sys;
                    }
                    Err(Error::Guard(_)) => break sys,
                    Err(e) => return Err(e),
                    Ok(None) if attempt == MAX_SAT_ATTEMPTS => {
                        return Err(Error::Infeasible(format!("core unsatisfiable in {attempt} draws")));
                    }
                    Ok(None) => {}
                }
            };
            let s = eliminate(&sys, t, &run.dag)?;
            let w = connectivity_width(&s);
            rec.num_free = Some(s.num_free());
            rec.width_upper = Some(w.upper);
            rec.width_lower = Some(w.lower_witness);
            rec.flippable_cycles = Some(s.cycles.len());
            rec.flippable_mass = Some(s.cycle_vertices().len());
            if s.num_noncore_free > 0 {
                rec.witness_chain = Some(last_free_witness(t, &run.dag, &s)?.chain.len());
            }
        }
        ExperimentKind::ResampleCheck => {
            let t = parallel_strip(&h, k)?;
            record_core(rec, t.core.len(), t.core_edges.len(), t.i_max());
            let profile = level_profiles(&h, &t)?;
            let core_deg = core_degree_sequence(&h, &t);
            let (mut matched, mut repaired) = (0, 0);
            for j in 0..cfg.resamples {
                let res = resample_from_profiles(&profile, &core_deg, seed.derive(0x7e00 + j as u64))?;
                repaired += res.repaired_layers.len();
                let t2 = parallel_strip(&res.hypergraph, k)?;
                if t2.levels == t.levels && t2.core == t.core {
                    matched += 1;
                }
            }
            rec.resample_match = Some(matched as f64 / cfg.resamples as f64);
            rec.repaired_layers = Some(repaired);
            rec.total_layers = Some(t.i_max() * cfg.resamples);
        }
    }
    Ok(())
}

pub fn write_trials_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trials_csv<R: std::io::Read>(input: R) -> Result<Vec<TrialRecord>> {
    csv::Reader::from_reader(input).deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Writes `trials.csv` and `summary.json` into `dir`.
pub fn write_outputs(output: &ExperimentOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_trials_csv(&output.records, BufWriter::new(File::create(dir.join("trials.csv"))?))?;
    let mut f = BufWriter::new(File::create(dir.join("summary.json"))?);
    serde_json::to_writer_pretty(&mut f, &output.summary)?;
    writeln!(f)?;
    f.flush()?;
    Ok(())
}
