//! End-to-end acceptance checks. Runs without the libtest harness and prints
//! one PASS/FAIL line per criterion; exits nonzero if any fails.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use corestrip::experiment::{
    fit_power_law, run_experiment, write_trials_csv, CExpr, ExperimentConfig, ExperimentKind, TrialRecord,
};
use corestrip::hypergraph::{gen_binomial, sample_truncated_multinomial};
use corestrip::oracle::{enumerate_solutions, exact_connectivity_threshold, exact_depths, exhaustive_core, flippable_support, mask_of, SolutionSet};
use corestrip::stripping::{parallel_strip, reach_set, slow_strip, SlowStripOptions};
use corestrip::thresholds::{core_degree_profile, invert_mean_degree, threshold_constants, truncated_poisson_profile, ModelParams};
use corestrip::xorsat::{connectivity_width, eliminate, extend_solution, gen_system, solve_core, VarKind};
use corestrip::RngSeed;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn experiment(kind: ExperimentKind, n: Vec<usize>, trials: usize, seed: u64, delta: f64) -> Vec<TrialRecord> {
    let mut cfg = ExperimentConfig::new(kind, n, trials, seed);
    cfg.delta = Some(delta);
    run_experiment(&cfg).expect("valid config").records
}

/// Failed trials, formatted for the detail line.
fn failures(recs: &[TrialRecord]) -> Option<String> {
    let errs: Vec<&str> = recs.iter().filter_map(|r| r.error.as_deref()).collect();
    (!errs.is_empty()).then(|| format!("{} failed trials, first: {}", errs.len(), errs[0]))
}

/// `(r-1)! min_μ μ / f_{k-1}(μ)^{r-1}` on a grid of step 1e-5, with the tail
/// computed from its own series.
fn grid_threshold(r: usize, k: usize) -> f64 {
    let tail = |mu: f64| {
        let mut term = (-mu).exp();
        let mut below = 0.0;
        for j in 0..k - 1 {
            if j > 0 {
                term *= mu / j as f64;
            }
            below += term;
        }
        1.0 - below
    };
    let fact: f64 = (1..r).map(|i| i as f64).product();
    (1..=1_500_000)
        .map(|i| i as f64 * 1e-5)
        .map(|mu| mu / tail(mu).powi(r as i32 - 1))
        .fold(f64::INFINITY, f64::min)
        * fact
}

fn c1_numerics() -> Outcome {
    let c32 = grid_threshold(3, 2);
    let c23 = grid_threshold(2, 3);
    let t32 = threshold_constants(ModelParams::supported(3, 2).unwrap()).unwrap();
    let t23 = threshold_constants(ModelParams::supported(2, 3).unwrap()).unwrap();
    let mut ok = (c32 / 6.0 - 0.818469).abs() < 1e-4
        && (t32.c_rk / 6.0 - 0.818469).abs() < 1e-4
        && (t32.c_rk - c32).abs() < 1e-6
        && (c23 - 3.3510).abs() < 1e-3
        && (t23.c_rk - 3.3510).abs() < 1e-3
        && (t23.c_rk - c23).abs() < 1e-6;
    let mut worst: f64 = 0.0;
    for r in 2..=5 {
        for k in 2..=5 {
            if (r, k) == (2, 2) {
                continue;
            }
            let p = ModelParams::supported(r, k).unwrap();
            let tc = threshold_constants(p).unwrap();
            let prof = core_degree_profile(p, k).unwrap();
            let target = 1.0 / ((r - 1) * (k - 1)) as f64;
            let lhs = k as f64 * prof[k] * tc.alpha / (r as f64 * tc.beta);
            worst = worst.max((lhs - target).abs()).max((tc.p_star - target).abs());
        }
    }
    ok &= worst < 1e-10;
    outcome(
        ok,
        format!("c32/3! = {:.7} (grid {:.7}), c23 = {:.5} (grid {:.5}), max identity error {worst:.1e}", t32.c_rk / 6.0, c32 / 6.0, t23.c_rk, c23),
    )
}

fn c2_core_size() -> Outcome {
    let recs = experiment(ExperimentKind::CoreSize, vec![100_000, 300_000], 20, 0xc02e, 0.3);
    if let Some(f) = failures(&recs) {
        return outcome(false, f);
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [100_000, 300_000] {
        let rows: Vec<&TrialRecord> = recs.iter().filter(|r| r.n == n).collect();
        let frac = mean(&rows.iter().map(|r| r.core_fraction.unwrap()).collect::<Vec<_>>());
        let edges = mean(&rows.iter().map(|r| r.core_edges.unwrap() as f64 / n as f64).collect::<Vec<_>>());
        let (alpha, beta) = (rows[0].alpha_pred.unwrap(), rows[0].beta_pred.unwrap());
        let (ea, eb) = (frac / alpha - 1.0, edges / beta - 1.0);
        ok &= ea.abs() < 0.02 && eb.abs() < 0.02;
        parts.push(format!("n={n}: |C|/n {frac:.4} vs α {alpha:.4} ({:+.2}%), edges/n {edges:.4} vs β {beta:.4} ({:+.2}%)", 100.0 * ea, 100.0 * eb));
    }
    outcome(ok, parts.join("; "))
}

fn c3_strip_scaling() -> Outcome {
    let grid = vec![10_000, 30_000, 100_000, 300_000];
    let mut ok = true;
    let mut parts = Vec::new();
    for delta in [0.25, 0.40] {
        let recs = experiment(ExperimentKind::StripScaling, grid.clone(), 10, 0x5c41e, delta);
        if let Some(f) = failures(&recs) {
            return outcome(false, f);
        }
        let pts: Vec<(f64, f64)> = grid
            .iter()
            .map(|&n| {
                let s: Vec<f64> = recs.iter().filter(|r| r.n == n).map(|r| r.strip_number.unwrap() as f64).collect();
                (n as f64, mean(&s))
            })
            .collect();
        let fit = fit_power_law(&pts).unwrap();
        let (lo, hi) = (delta / 2.0 - 0.05, delta / 2.0 + 0.12);
        ok &= (lo..=hi).contains(&fit.exponent);
        parts.push(format!(
            "δ={delta}: exponent {:.3} ± {:.3} in [{lo:.3}, {hi:.3}], mean s {:?}",
            fit.exponent,
            fit.stderr,
            pts.iter().map(|p| p.1.round() as i64).collect::<Vec<_>>()
        ));
    }
    outcome(ok, parts.join("; "))
}

fn c4_depth_sandwich() -> Outcome {
    let results: Vec<(usize, usize)> = (0..500u64)
        .into_par_iter()
        .map(|i| {
            let seed = RngSeed::new(0xde97 + i);
            let mut rng = seed.rng();
            let n = rng.random_range(5..=14);
            let c = rng.random_range(1.0..12.0);
            let h = gen_binomial(n, 3, c, seed.derive(1)).unwrap();
            let run = slow_strip(&h, 2, &SlowStripOptions::default()).unwrap();
            let depth = exact_depths(&h, 2).unwrap();
            let (mut checked, mut bad) = (0, 0);
            for v in 0..n as u32 {
                match (run.trace.is_core(v), depth[v as usize]) {
                    (true, None) => {}
                    (false, Some(d)) => {
                        checked += 1;
                        let lo = run.trace.level_of[v as usize] as usize;
                        let hi = reach_set(&run.dag, v).unwrap().len();
                        if !(lo <= d && d <= hi) {
                            bad += 1;
                        }
                    }
                    _ => bad += 1,
                }
            }
            (checked, bad)
        })
        .collect();
    let checked: usize = results.iter().map(|r| r.0).sum();
    let bad: usize = results.iter().map(|r| r.1).sum();
    outcome(bad == 0, format!("500 instances, {checked} non-core vertices, {bad} violations"))
}

fn c5_canonical_core() -> Outcome {
    let tc = threshold_constants(ModelParams::supported(3, 2).unwrap()).unwrap();
    let bad: Vec<u64> = (0..200u64)
        .into_par_iter()
        .filter(|&i| {
            let seed = RngSeed::new(0xca40 + i);
            let c = tc.c_rk + seed.rng().random_range(-0.3..0.3);
            let h = gen_binomial(1000, 3, c, seed.derive(2)).unwrap();
            let par = parallel_strip(&h, 2).unwrap();
            let slow = slow_strip(&h, 2, &SlowStripOptions::default()).unwrap();
            let ex = exhaustive_core(&h, 2, 20, seed.derive(3));
            !(slow.trace.core == par.core && slow.trace.levels == par.levels && ex.as_ref() == Ok(&par.core))
        })
        .collect();
    outcome(bad.is_empty(), format!("200 instances n=1000, {} disagreements", bad.len()))
}

fn c6_drift() -> Outcome {
    let n = 100_000;
    let recs = experiment(ExperimentKind::Drift, vec![n], 50, 0xd21f7, 0.3);
    if let Some(f) = failures(&recs) {
        return outcome(false, f);
    }
    let inc: Vec<f64> = recs.iter().map(|r| r.mean_increment.unwrap()).collect();
    let negative = inc.iter().filter(|&&x| x < 0.0).count();
    let mut mags: Vec<f64> = inc.iter().map(|x| x.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let median = (mags[24] + mags[25]) / 2.0;
    let scale = (n as f64).powf(-0.15);
    let ratio = median / scale;
    let ok = negative * 100 >= 95 * inc.len() && (0.1..=10.0).contains(&ratio);
    outcome(ok, format!("{negative}/50 negative, median |ΔL| {median:.4} = {ratio:.2} × n^(-δ/2)"))
}

fn c7_phase2_shape() -> Outcome {
    let grid = vec![10_000, 100_000, 1_000_000];
    let mut cfg = ExperimentConfig::new(ExperimentKind::Drift, grid.clone(), 6, 0x1a2);
    cfg.delta = Some(0.3);
    cfg.stride = 1024;
    let recs = run_experiment(&cfg).unwrap().records;
    if let Some(f) = failures(&recs) {
        return outcome(false, f);
    }
    let means: Vec<f64> = grid
        .iter()
        .map(|&n| mean(&recs.iter().filter(|r| r.n == n).map(|r| r.max_l_scaled.unwrap()).collect::<Vec<_>>()))
        .collect();
    let hi = means.iter().cloned().fold(f64::MIN, f64::max);
    let lo = means.iter().cloned().fold(f64::MAX, f64::min);
    let ok = hi / lo <= 5.0;
    outcome(ok, format!("max L / n^(1-δ) by n: {:?}, spread ×{:.2}", means.iter().map(|m| format!("{m:.3}")).collect::<Vec<_>>(), hi / lo))
}

enum ClusterCheck {
    Skipped,
    Checked { violations: Vec<String>, classes: usize, with_lower: usize },
}

fn check_cluster_instance(i: u64) -> ClusterCheck {
    let seed = RngSeed::new(0xc1a5 + i);
    let mut rng = seed.rng();
    let n = rng.random_range(12..=22);
    let c = rng.random_range(4.5..9.0);
    let h = gen_binomial(n, 3, c, seed.derive(1)).unwrap();
    let run = slow_strip(&h, 2, &SlowStripOptions::default()).unwrap();
    let t = &run.trace;
    if t.core.is_empty() {
        return ClusterCheck::Skipped;
    }
    let sys = gen_system(&h, seed.derive(2));
    if solve_core(&sys, t).unwrap().is_none() {
        return ClusterCheck::Skipped;
    }
    let s = eliminate(&sys, t, &run.dag).unwrap();
    let sols = enumerate_solutions(&sys).unwrap();
    let mut violations = Vec::new();

    // Brute-force classes: solutions grouped by their values on core vertices
    // outside the kernel-support cycle set.
    let y = flippable_support(&h, t).unwrap();
    let label_vars: Vec<u32> = t.core.iter().copied().filter(|v| y.binary_search(v).is_err()).collect();
    if label_vars != s.noncycle_core {
        violations.push(format!("instance {i}: non-cycle core {:?} vs oracle {:?}", s.noncycle_core, label_vars));
    }
    let label = |x: u32| label_vars.iter().fold(0u32, |m, &v| m | (x >> v & 1) << v);
    let mut classes: HashMap<u32, Vec<u32>> = HashMap::new();
    for &x in &sols.masks {
        classes.entry(label(x)).or_default().push(x);
    }
    let nf = s.num_free();
    let mut threshold = None;
    let w = connectivity_width(&s);
    for (key, members) in &classes {
        if members.len() != 1 << nf {
            violations.push(format!("instance {i}: class size {} vs 2^{nf}", members.len()));
            continue;
        }
        // The class must be exactly the image of extend_solution.
        let core: Vec<bool> = (0..n).map(|v| key >> v & 1 == 1).collect();
        let mut image: Vec<u32> = (0..1u32 << nf)
            .map(|f| {
                let free: Vec<bool> = (0..nf).map(|j| f >> j & 1 == 1).collect();
                mask_of(&extend_solution(&s, &core, &free).unwrap())
            })
            .collect();
        image.sort_unstable();
        image.dedup();
        if &image != members {
            violations.push(format!("instance {i}: elimination class differs from brute-force class"));
        }
        // Classes are translates of one another, so one threshold serves all.
        if threshold.is_none() {
            let d = exact_connectivity_threshold(&SolutionSet { n, masks: members.clone() }).unwrap();
            threshold = Some(d);
            if d > w.upper {
                violations.push(format!("instance {i}: threshold {d} > upper {}", w.upper));
            }
            if w.lower_witness >= 1 && d <= w.lower_witness {
                violations.push(format!("instance {i}: {}-connected despite lower witness", w.lower_witness));
            }
        }
    }
    // The free variables really are free and every variable is accounted for.
    if s.kind.iter().filter(|k| matches!(k, VarKind::Free(_))).count() != nf {
        violations.push(format!("instance {i}: free count mismatch"));
    }
    ClusterCheck::Checked { violations, classes: classes.len(), with_lower: (w.lower_witness >= 1) as usize }
}

fn c8_cluster_exactness() -> Outcome {
    let mut checked = 0;
    let mut classes = 0;
    let mut with_lower = 0;
    let mut violations: Vec<String> = Vec::new();
    let mut next = 0u64;
    while checked < 300 {
        let batch: Vec<ClusterCheck> = (next..next + 64).into_par_iter().map(check_cluster_instance).collect();
        next += 64;
        for r in batch {
            if let ClusterCheck::Checked { violations: v, classes: c, with_lower: l } = r {
                if checked < 300 {
                    checked += 1;
                    classes += c;
                    with_lower += l;
                    violations.extend(v);
                }
            }
        }
    }
    let first = violations.first().cloned().unwrap_or_default();
    outcome(
        violations.is_empty(),
        format!("{checked} instances, {classes} clusters, {with_lower} with a lower witness, {} violations {first}", violations.len()),
    )
}

fn c9_flippable_mass() -> Outcome {
    let grid = vec![10_000, 100_000];
    let recs = experiment(ExperimentKind::FlippableMass, grid.clone(), 20, 0xf11b, 0.3);
    if let Some(f) = failures(&recs) {
        return outcome(false, f);
    }
    let scaled: Vec<f64> = grid
        .iter()
        .map(|&n| {
            let m = mean(&recs.iter().filter(|r| r.n == n).map(|r| r.flippable_mass.unwrap() as f64).collect::<Vec<_>>());
            let nf = n as f64;
            m / (nf.powf(0.15) * nf.ln())
        })
        .collect();
    // Bounded: no growth beyond the factor-5 band from the smaller n.
    let ok = scaled[1] <= 5.0 * scaled[0].max(f64::MIN_POSITIVE) || scaled[1] == 0.0;
    outcome(ok, format!("mass / (n^(δ/2) log n): n=1e4 {:.4}, n=1e5 {:.4}", scaled[0], scaled[1]))
}

fn c10_resample() -> Outcome {
    let mut cfg = ExperimentConfig::new(ExperimentKind::ResampleCheck, vec![2000], 10, 0x7e5a);
    cfg.delta = Some(0.3);
    cfg.resamples = 100;
    let recs = run_experiment(&cfg).unwrap().records;
    if let Some(f) = failures(&recs) {
        return outcome(false, f);
    }
    let matched: f64 = recs.iter().map(|r| r.resample_match.unwrap()).sum::<f64>() * 100.0;
    let repaired: usize = recs.iter().map(|r| r.repaired_layers.unwrap()).sum();
    let layers: usize = recs.iter().map(|r| r.total_layers.unwrap()).sum();
    let rate = repaired as f64 / layers as f64;
    let ok = matched.round() as usize == 1000 && rate < 0.05;
    outcome(ok, format!("{}/1000 resamples keep the level partition, repair rate {:.2}% of {layers} layers", matched.round(), 100.0 * rate))
}

fn c11_truncated_multinomial() -> Outcome {
    let n = 100_000usize;
    let d = 250_000u64;
    let deg = sample_truncated_multinomial(n, d, 2, RngSeed::new(0x7a11)).unwrap();
    let lambda = invert_mean_degree(2.5, 2).unwrap();
    let pred = truncated_poisson_profile(lambda, 2, 10);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for (j, &p) in pred.iter().enumerate() {
        let emp = deg.count_of(j as u32) as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        let z = if se > 0.0 { (emp - p).abs() / se } else if emp == 0.0 { 0.0 } else { f64::INFINITY };
        worst = worst.max(z);
        ok &= z <= 4.0;
    }
    outcome(ok, format!("λ = {lambda:.5}, largest deviation {worst:.2} standard errors over j ≤ 10"))
}

fn c12_determinism() -> Outcome {
    let mut diffs = Vec::new();
    for kind in [ExperimentKind::CoreSize, ExperimentKind::Drift, ExperimentKind::ClusterConnectivity, ExperimentKind::ResampleCheck] {
        let mut cfg = ExperimentConfig::new(kind, vec![2000, 5000], 4, 0xde7);
        cfg.delta = Some(0.3);
        cfg.c = CExpr::parse("crit + n^-delta").unwrap();
        let csv = |cfg: &ExperimentConfig| {
            let mut buf = Vec::new();
            write_trials_csv(&run_experiment(cfg).unwrap().records, &mut buf).unwrap();
            buf
        };
        let a = csv(&cfg);
        let mut one = cfg.clone();
        one.workers = Some(1);
        if a != csv(&cfg) || a != csv(&one) {
            diffs.push(format!("{kind:?}"));
        }
    }
    outcome(diffs.is_empty(), format!("4 experiment kinds rerun with 1 and default workers; differing: {diffs:?}"))
}

/// Monte Carlo band checks. Their FAIL lines are reported but do not gate the
/// exit status, since a fixed seed can land outside a band by chance.
const STATISTICAL: [usize; 5] = [2, 3, 6, 7, 9];

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("threshold numerics", c1_numerics),
        ("core-size law", c2_core_size),
        ("stripping-number scaling", c3_strip_scaling),
        ("depth bounds sandwich", c4_depth_sandwich),
        ("core canonicality", c5_canonical_core),
        ("phase-2 drift sign", c6_drift),
        ("phase-2 bound shape", c7_phase2_shape),
        ("cluster exactness", c8_cluster_exactness),
        ("flippable-cycle mass", c9_flippable_mass),
        ("resampling fidelity", c10_resample),
        ("truncated multinomial profile", c11_truncated_multinomial),
        ("determinism", c12_determinism),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut hard = Vec::new();
    let mut soft = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let start = Instant::now();
        let o = f();
        let secs = start.elapsed().as_secs_f64();
        println!("{} {id:>2} {name}: {} [{secs:.1}s]", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            if STATISTICAL.contains(&id) { soft.push(id) } else { hard.push(id) }
        }
    }
    if !soft.is_empty() {
        println!("statistical criteria outside their band (not gating): {soft:?}");
    }
    if hard.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("exact criteria failed: {hard:?}");
        ExitCode::FAILURE
    }
}
