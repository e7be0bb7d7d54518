use std::io::Write;

use serde::Serialize;

use super::slow::SlowStrip;
use crate::error::{Error, Result};

/// Running totals over heavy vertices (not yet queued).
#[derive(Debug, Clone, Default)]
pub(crate) struct HeavyStats {
    count: u64,
    degree_sum: u64,
    degree_k_count: u64,
}

impl HeavyStats {
    pub(crate) fn new(deg: &[u32], in_q: &[bool], k: u32) -> Self {
        let mut s = HeavyStats::default();
        for (&d, &q) in deg.iter().zip(in_q) {
            s.add(d, q, k);
        }
        s
    }

    pub(crate) fn add(&mut self, d: u32, queued: bool, k: u32) {
        if !queued {
            self.count += 1;
            self.degree_sum += d as u64;
            self.degree_k_count += (d == k) as u64;
        }
    }

    pub(crate) fn remove(&mut self, d: u32, queued: bool, k: u32) {
        if !queued {
            self.count -= 1;
            self.degree_sum -= d as u64;
            self.degree_k_count -= (d == k) as u64;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftSample {
    pub t: usize,
    pub n_vertices: usize,
    pub n_edges: usize,
    pub l_t: u64,
    /// Heavy vertex count.
    pub n_t: u64,
    /// Total degree of heavy vertices.
    pub d_t: u64,
    /// Total degree of heavy vertices of degree exactly `k`.
    pub d_tk: u64,
    pub zeta_t: Option<f64>,
    pub pbar_t: Option<f64>,
    pub br_t: Option<f64>,
    pub pi_t: Option<f64>,
}

impl DriftSample {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        t: usize,
        n_vertices: usize,
        n_edges: usize,
        l_t: u64,
        heavy: &HeavyStats,
        r: usize,
        k: u32,
        pi_offset: Option<f64>,
    ) -> Self {
        let d_tk = heavy.degree_k_count * k as u64;
        let zeta_t = (heavy.count > 0).then(|| heavy.degree_sum as f64 / heavy.count as f64);
        let pbar_t = (heavy.degree_sum > 0).then(|| d_tk as f64 / heavy.degree_sum as f64);
        let br_t = pbar_t.map(|p| -1.0 + ((r - 1) * (k as usize - 1)) as f64 * p);
        DriftSample {
            t,
            n_vertices,
            n_edges,
            l_t,
            n_t: heavy.count,
            d_t: heavy.degree_sum,
            d_tk,
            zeta_t,
            pbar_t,
            br_t,
            pi_t: pi_offset.map(|off| n_vertices as f64 - off),
        }
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes drift samples with columns
/// `t,n_vertices,n_edges,L_t,N_t,D_t,D_tk,zeta_t,pbar_t,br_t,pi_t`;
/// undefined values are left empty.
pub fn write_trace_csv<W: Write>(samples: &[DriftSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "n_vertices", "n_edges", "L_t", "N_t", "D_t", "D_tk", "zeta_t", "pbar_t", "br_t", "pi_t"])?;
    for s in samples {
        w.write_record([
            s.t.to_string(),
            s.n_vertices.to_string(),
            s.n_edges.to_string(),
            s.l_t.to_string(),
            s.n_t.to_string(),
            s.d_t.to_string(),
            s.d_tk.to_string(),
            opt(s.zeta_t),
            opt(s.pbar_t),
            opt(s.br_t),
            opt(s.pi_t),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftSummary {
    pub t0: usize,
    pub tau: usize,
    pub phase2_steps: usize,
    /// Mean of `L_{t+1} - L_t` over `t0 <= t < tau`.
    pub mean_increment: f64,
    pub sd_increment: f64,
    pub ci95: (f64, f64),
    pub max_l_phase2: u64,
    /// Mean branching factor over sampled Phase-2 steps.
    pub mean_br: Option<f64>,
    /// Least-squares fit `br_t ≈ intercept + slope·(−√(L_t/n))`.
    pub br_slope: Option<f64>,
    pub br_intercept: Option<f64>,
    /// `br_intercept / (−n^{−δ/2})`, when δ is known.
    pub intercept_ratio: Option<f64>,
}

/// Descriptive statistics of the queue-load walk after `t0`.
pub fn drift_series(run: &SlowStrip) -> Result<DriftSummary> {
    drift_series_with(run, 0)
}

/// As [`drift_series`], with the window starting no earlier than the first
/// step of round `burn_in + 1`. `burn_in = 0` keeps the window at `t0`.
pub fn drift_series_with(run: &SlowStrip, burn_in: usize) -> Result<DriftSummary> {
    let trace = &run.trace;
    let t0 = trace.t0.ok_or_else(|| Error::Empty("Phase 2 undefined: no t0 (needs delta and constants)".into()))?;
    let t0 = match burn_in {
        0 => t0,
        b => t0.max(trace.t_of_level.get(b).copied().unwrap_or(trace.tau)),
    };
    if t0 >= trace.tau {
        return Err(Error::Empty(format!("Phase 2 is empty: t0 = {t0}, tau = {}", trace.tau)));
    }
    let incs: Vec<f64> = trace.l_series[t0..=trace.tau]
        .windows(2)
        .map(|w| w[1] as f64 - w[0] as f64)
        .collect();
    let cnt = incs.len() as f64;
    let mean = incs.iter().sum::<f64>() / cnt;
    let var = if incs.len() > 1 { incs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (cnt - 1.0) } else { 0.0 };
    let sd = var.sqrt();
    let half = 1.96 * sd / cnt.sqrt();
    let max_l_phase2 = trace.l_series[t0..].iter().copied().max().unwrap_or(0);

    let n = trace.n as f64;
    let pts: Vec<(f64, f64)> = run
        .drift
        .iter()
        .filter(|s| s.t >= t0 && s.t < trace.tau)
        .filter_map(|s| s.br_t.map(|b| (-(s.l_t as f64 / n).sqrt(), b)))
        .collect();
    let mean_br = (!pts.is_empty()).then(|| pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64);
    let (br_slope, br_intercept) = match ols(&pts) {
        Some((a, b)) => (Some(b), Some(a)),
        None => (None, None),
    };
    let intercept_ratio = match (br_intercept, run.delta) {
        (Some(a), Some(delta)) => Some(a / -n.powf(-delta / 2.0)),
        _ => None,
    };
    Ok(DriftSummary {
        t0,
        tau: trace.tau,
        phase2_steps: incs.len(),
        mean_increment: mean,
        sd_increment: sd,
        ci95: (mean - half, mean + half),
        max_l_phase2,
        mean_br,
        br_slope,
        br_intercept,
        intercept_ratio,
    })
}

/// Ordinary least squares `y = a + b x`; `None` when `x` has no spread.
pub(crate) fn ols(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    Some((my - b * mx, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Hypergraph;
    use crate::stripping::{slow_strip, SlowStripOptions};

    #[test]
    fn ols_recovers_line() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 2.0 - 0.5 * i as f64)).collect();
        let (a, b) = ols(&pts).unwrap();
        assert!((a - 2.0).abs() < 1e-12 && (b + 0.5).abs() < 1e-12);
        assert!(ols(&[(1.0, 1.0), (1.0, 2.0)]).is_none());
    }

    #[test]
    fn no_phase2_without_delta() {
        let h = Hypergraph::new(3, 2, vec![vec![0, 1], vec![1, 2]], false).unwrap();
        let run = slow_strip(&h, 2, &SlowStripOptions::default()).unwrap();
        assert!(matches!(drift_series(&run), Err(Error::Empty(_))));
    }

    #[test]
    fn star_drains_at_unit_rate() {
        let edges: Vec<Vec<u32>> = (1..6).map(|i| vec![0, i]).collect();
        let h = Hypergraph::new(6, 2, edges, false).unwrap();
        let mut run = slow_strip(&h, 2, &SlowStripOptions::default()).unwrap();
        run.trace.t0 = Some(0);
        let s = drift_series(&run).unwrap();
        assert_eq!(s.phase2_steps, 5);
        assert_eq!(s.mean_increment, -1.0);
        assert_eq!(s.max_l_phase2, 5);
    }

    #[test]
    fn trace_csv_header_and_blanks() {
        let h = Hypergraph::new(3, 2, vec![vec![0, 1]], false).unwrap();
        let run = slow_strip(&h, 2, &SlowStripOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&run.drift, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,n_vertices,n_edges,L_t,N_t,D_t,D_tk,zeta_t,pbar_t,br_t,pi_t");
        assert_eq!(lines.next().unwrap(), "0,2,1,2,0,0,0,,,,");
    }

    #[test]
    fn burn_in_shrinks_the_window() {
        use crate::hypergraph::gen_binomial;
        use crate::thresholds::{threshold_constants, ModelParams};
        use crate::RngSeed;
        let tc = threshold_constants(ModelParams::new(3, 2).unwrap()).unwrap();
        let n = 20_000;
        let g = gen_binomial(n, 3, tc.c_rk + (n as f64).powf(-0.3), RngSeed::new(1)).unwrap();
        let opts = SlowStripOptions { stride: 64, delta: Some(0.3), constants: Some(tc) };
        let run = slow_strip(&g, 2, &opts).unwrap();
        let a = drift_series(&run).unwrap();
        assert_eq!(drift_series_with(&run, 0).unwrap(), a);
        let b = drift_series_with(&run, 5).unwrap();
        assert_eq!(b.t0, a.t0.max(run.trace.t_of_level[5]));
        assert!(b.phase2_steps <= a.phase2_steps);
        assert!(drift_series_with(&run, 100_000).is_err());
    }
}
