use std::fs;
use std::process::Command;

use corestrip::experiment::{read_trials_csv, run_experiment, write_outputs, ExperimentConfig, ExperimentKind};
use corestrip::hypergraph::{gen_binomial, read_edges_csv, write_edges_csv};
use corestrip::oracle::{enumerate_solutions, exact_connectivity_threshold};
use corestrip::stripping::{slow_strip, SlowStripOptions};
use corestrip::thresholds::{poisson_tail, threshold_constants, ModelParams};
use corestrip::xorsat::{connectivity_width, eliminate, gen_system};
use corestrip::{Hypergraph, RngSeed};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_corestrip"))
}

#[test]
fn poisson_tail_against_partial_sums() {
    // P(Po(3) >= 2) summed term by term until the tail is negligible.
    let mut term = (-3.0f64).exp();
    let mut below = term;
    term *= 3.0;
    below += term;
    assert!((poisson_tail(2, 3.0).unwrap() - (1.0 - below)).abs() < 1e-12);
    assert!((poisson_tail(2, 3.0).unwrap() - 0.8008517).abs() < 1e-6);
}

#[test]
fn edge_count_matches_binomial_mean() {
    let (n, c) = (100_000usize, 4.91);
    let m = (n as f64) * (n as f64 - 1.0) * (n as f64 - 2.0) / 6.0;
    let p = c / (n as f64).powi(2);
    let (mean, sd) = (m * p, (m * p * (1.0 - p)).sqrt());
    let counts: Vec<f64> = (0..50).map(|s| gen_binomial(n, 3, c, RngSeed::new(s)).unwrap().num_edges() as f64).collect();
    let avg = counts.iter().sum::<f64>() / 50.0;
    assert!((avg - mean).abs() < 3.0 * sd / 50f64.sqrt(), "{avg} vs {mean}");
    assert!((mean - c * n as f64 / 6.0).abs() < 5.0);
}

#[test]
fn rhs_bits_are_fair() {
    let h = gen_binomial(60_000, 3, 5.0, RngSeed::new(1)).unwrap();
    let sys = gen_system(&h, RngSeed::new(2));
    let m = sys.num_equations() as f64;
    let ones = sys.rhs.iter().filter(|&&b| b).count() as f64;
    assert!((ones / m - 0.5).abs() < 4.0 * 0.5 / m.sqrt());
}

#[test]
fn five_variable_system_end_to_end() {
    // x0+x1+x2, x1+x2+x3, x2+x3+x4 as a 3-uniform path.
    let h = Hypergraph::new(5, 3, vec![vec![0, 1, 2], vec![1, 2, 3], vec![2, 3, 4]], false).unwrap();
    let sys = corestrip::xorsat::XorSystem::new(h.clone(), vec![true, false, true]).unwrap();
    let run = slow_strip(&h, 2, &SlowStripOptions::default()).unwrap();
    assert!(run.trace.core.is_empty());
    let cs = eliminate(&sys, &run.trace, &run.dag).unwrap();
    let sols = enumerate_solutions(&sys).unwrap();
    assert_eq!(sols.len(), 1 << cs.num_free());
    let w = connectivity_width(&cs);
    let t = exact_connectivity_threshold(&sols).unwrap();
    assert!(t <= w.upper && t > w.lower_witness);
}

#[test]
fn thresholds_json() {
    let out = bin().args(["thresholds", "--json", "--c", "5.0"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let c = v["constants"]["c_rk"].as_f64().unwrap();
    assert!((c / 6.0 - 0.818469).abs() < 1e-4);
    assert!(v["point"]["alpha_c"].as_f64().unwrap() > v["constants"]["alpha"].as_f64().unwrap());
}

#[test]
fn gen_strip_and_oracle_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("edges.csv");
    let st = bin()
        .args(["gen", "--n", "14", "--c", "5.5", "--seed", "4", "--out"])
        .arg(&edges)
        .status()
        .unwrap();
    assert!(st.success());
    let h = read_edges_csv(fs::File::open(&edges).unwrap(), Some(14), false).unwrap();
    let mut again = Vec::new();
    write_edges_csv(&gen_binomial(14, 3, 5.5, RngSeed::new(4)).unwrap(), &mut again).unwrap();
    assert_eq!(fs::read(&edges).unwrap(), again);

    let out = bin().args(["oracle", "core", "--n", "14", "--input"]).arg(&edges).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let core: Vec<u32> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(core, corestrip::stripping::parallel_strip(&h, 2).unwrap().core);

    let out = bin().args(["oracle", "solutions", "--n", "14", "--input"]).arg(&edges).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["methods_agree"], true);

    let summary = dir.path().join("strip.json");
    let trace = dir.path().join("trace.csv");
    let st = bin()
        .args(["strip", "--n", "20000", "--seed", "3", "--stride", "128", "--trace"])
        .arg(&trace)
        .arg("--summary")
        .arg(&summary)
        .status()
        .unwrap();
    assert!(st.success());
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&summary).unwrap()).unwrap();
    assert!(v["strip_number"].as_u64().unwrap() > 0);
    assert!(fs::read_to_string(&trace).unwrap().starts_with("t,"));
}

#[test]
fn bad_input_is_an_error() {
    let out = bin().args(["thresholds", "--r", "2", "--k", "2"]).output().unwrap();
    assert!(!out.status.success());
    let out = bin().args(["gen", "--n", "100", "--c", "crit +"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn experiment_outputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    fs::write(&cfg_path, r#"{"kind": "core-size", "n": [2000, 4000, 8000], "trials": 3, "seed": 5, "delta": 0.3}"#).unwrap();
    let out_dir = dir.path().join("out");
    let st = bin().args(["experiment", "--workers", "2", "--config"]).arg(&cfg_path).arg("--out").arg(&out_dir).status().unwrap();
    assert!(st.success());

    let cfg = ExperimentConfig::from_path(&cfg_path).unwrap();
    let mine = run_experiment(&cfg).unwrap();
    let theirs = read_trials_csv(fs::File::open(out_dir.join("trials.csv")).unwrap()).unwrap();
    assert_eq!(theirs, mine.records);

    let other = dir.path().join("lib");
    write_outputs(&mine, &other).unwrap();
    assert_eq!(fs::read(out_dir.join("trials.csv")).unwrap(), fs::read(other.join("trials.csv")).unwrap());
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["fit_metric"], "core_fraction");
    assert_eq!(summary["points"].as_array().unwrap().len(), 3);
    let tc = threshold_constants(ModelParams::new(3, 2).unwrap()).unwrap();
    assert!((summary["constants"]["alpha"].as_f64().unwrap() - tc.alpha).abs() < 1e-12);
}

#[test]
fn config_rejects_unknown_fields() {
    assert!(ExperimentConfig::from_json(r#"{"kind": "drift", "n": [10], "trials": 1, "seed": 0, "bogus": 1}"#).is_err());
    let c = ExperimentConfig::new(ExperimentKind::Drift, vec![], 1, 0);
    assert!(c.validate().is_err());
}

#[test]
fn config_model_is_simple_often_enough() {
    let tc = threshold_constants(ModelParams::new(3, 2).unwrap()).unwrap();
    let n = 10_000;
    let d = ((tc.zeta * n as f64) as u64) / 3 * 3;
    let deg = corestrip::hypergraph::sample_truncated_multinomial(n, d, 2, RngSeed::new(3)).unwrap();
    let simple = (0..200)
        .filter(|&s| corestrip::hypergraph::config_model(&deg, 3, RngSeed::new(s)).unwrap().is_simple())
        .count();
    assert!(simple as f64 / 200.0 >= 0.05, "{simple}/200 simple");
}

#[test]
fn coupled_gap_matches_binomial() {
    let n = 10_000usize;
    let tc = threshold_constants(ModelParams::new(3, 2).unwrap()).unwrap();
    let gap = (n as f64).powf(-0.3);
    let m = (n as f64) * (n as f64 - 1.0) * (n as f64 - 2.0) / 6.0;
    let p = gap / (n as f64).powi(2);
    let (mean, sd) = (m * p, (m * p).sqrt());
    let mut total = 0.0;
    for s in 0..100 {
        let (lo, hi) = corestrip::hypergraph::gen_coupled(n, 3, tc.c_rk, tc.c_rk + gap, RngSeed::new(s)).unwrap();
        let big: std::collections::HashSet<&[u32]> = hi.edges().collect();
        assert!(lo.edges().all(|e| big.contains(e)));
        total += (hi.num_edges() - lo.num_edges()) as f64;
    }
    assert!((total / 100.0 - mean).abs() < 3.0 * sd / 10.0, "{} vs {mean}", total / 100.0);
}

#[test]
fn subcritical_core_is_empty() {
    let tc = threshold_constants(ModelParams::new(3, 2).unwrap()).unwrap();
    let empty = (0..50)
        .filter(|&s| {
            let h = gen_binomial(100_000, 3, tc.c_rk - 0.5, RngSeed::new(s)).unwrap();
            corestrip::stripping::parallel_strip(&h, 2).unwrap().core.is_empty()
        })
        .count();
    assert!(empty >= 48, "{empty}/50");
}

#[test]
fn free_count_ignores_vertex_labels() {
    // SLOW-STRIP breaks ties by label, so relabelling changes the removal order.
    use rand::seq::SliceRandom;
    let tc = threshold_constants(ModelParams::new(3, 2).unwrap()).unwrap();
    for s in 0..20u64 {
        let n = 3000;
        let h = gen_binomial(n, 3, tc.c_rk + 0.1, RngSeed::new(s)).unwrap();
        let mut perm: Vec<u32> = (0..n as u32).collect();
        perm.shuffle(&mut RngSeed::new(s).derive(1).rng());
        let edges = h.edges().map(|e| e.iter().map(|&v| perm[v as usize]).collect()).collect();
        let g = Hypergraph::new(n, 3, edges, false).unwrap();
        let count = |h: &Hypergraph| {
            let run = slow_strip(h, 2, &SlowStripOptions::default()).unwrap();
            eliminate(&gen_system(h, RngSeed::new(0)), &run.trace, &run.dag).unwrap().num_free()
        };
        assert_eq!(count(&h), count(&g), "seed {s}");
    }
}
