use std::collections::VecDeque;

use super::drift::{DriftSample, HeavyStats};
use super::{check_k, StripTrace, CORE_LEVEL};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::thresholds::ThresholdConstants;

const UNRANKED: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct SlowStripOptions {
    /// Drift samples are taken every `stride` removals, plus at `t0` and `tau`.
    pub stride: usize,
    /// Supercriticality exponent, with `c = c_rk + n^{-delta}`. Needed, with
    /// `constants`, for `t0` and `pi_t`.
    pub delta: Option<f64>,
    pub constants: Option<ThresholdConstants>,
}

impl Default for SlowStripOptions {
    fn default() -> Self {
        SlowStripOptions { stride: 64, delta: None, constants: None }
    }
}

/// Arcs `u -> v` for every `u` sharing an edge that `v` removed as queue head.
/// Core vertices get a processing rank of `u32::MAX` and have no in-arcs.
#[derive(Debug, Clone)]
pub struct DeletionDag {
    removals: Vec<(u32, u32)>,
    proc_rank: Vec<u32>,
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
}

impl DeletionDag {
    fn build(n: usize, h: &Hypergraph, removals: Vec<(u32, u32)>, proc_rank: Vec<u32>) -> Self {
        let mut arcs: Vec<(u32, u32)> = Vec::with_capacity(removals.len() * (h.r() - 1));
        for &(head, e) in &removals {
            for &w in h.edge(e as usize) {
                if w != head {
                    arcs.push((w, head));
                }
            }
        }
        arcs.sort_unstable();
        arcs.dedup();
        let (out_offsets, out_targets) = csr(n, arcs.iter().copied());
        let mut rev: Vec<(u32, u32)> = arcs.iter().map(|&(u, v)| (v, u)).collect();
        rev.sort_unstable();
        let (in_offsets, in_sources) = csr(n, rev.into_iter());
        DeletionDag { removals, proc_rank, out_offsets, out_targets, in_offsets, in_sources }
    }

    pub fn n(&self) -> usize {
        self.proc_rank.len()
    }

    /// `(head, edge)` per SLOW-STRIP iteration, in order.
    pub fn removals(&self) -> &[(u32, u32)] {
        &self.removals
    }

    /// Order in which `v` was first selected as queue head or deleted.
    pub fn proc_rank(&self, v: u32) -> Option<u32> {
        let r = self.proc_rank[v as usize];
        (r != UNRANKED).then_some(r)
    }

    pub fn out_neighbors(&self, v: u32) -> &[u32] {
        &self.out_targets[self.out_offsets[v as usize]..self.out_offsets[v as usize + 1]]
    }

    pub fn in_neighbors(&self, v: u32) -> &[u32] {
        &self.in_sources[self.in_offsets[v as usize]..self.in_offsets[v as usize + 1]]
    }

    pub fn num_arcs(&self) -> usize {
        self.out_targets.len()
    }
}

fn csr(n: usize, sorted: impl Iterator<Item = (u32, u32)>) -> (Vec<usize>, Vec<u32>) {
    let mut offsets = vec![0usize; n + 1];
    let mut targets = Vec::new();
    for (u, v) in sorted {
        offsets[u as usize + 1] += 1;
        targets.push(v);
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    (offsets, targets)
}

#[derive(Debug, Clone)]
pub struct SlowStrip {
    pub trace: StripTrace,
    pub dag: DeletionDag,
    pub drift: Vec<DriftSample>,
    pub delta: Option<f64>,
}

/// SLOW-STRIP: a FIFO queue of light vertices; each iteration the head removes
/// its smallest-index remaining edge. Initial queue order is by vertex id.
/// Vertices reaching degree zero are deleted and skipped lazily.
pub fn slow_strip(h: &Hypergraph, k: u32, opts: &SlowStripOptions) -> Result<SlowStrip> {
    check_k(k)?;
    if opts.stride == 0 {
        return Err(Error::Parameter("drift stride must be positive".into()));
    }
    let n = h.n();
    let m = h.num_edges();
    let inc = h.incidence();
    let mut deg = h.degrees();
    let mut in_q = vec![false; n];
    let mut level = vec![CORE_LEVEL; n];
    let mut proc_rank = vec![UNRANKED; n];
    let mut next_rank = 0u32;
    let mut ptr = vec![0usize; n];
    let mut edge_alive = vec![true; m];
    let mut queue = VecDeque::new();
    let mut l: u64 = 0;
    let mut alive = n;

    let phase2_target = match (opts.delta, &opts.constants) {
        (Some(delta), Some(tc)) => {
            let nf = n as f64;
            Some((tc.alpha * nf + 3.0 * tc.k1 * nf.powf(1.0 - delta / 2.0)).round().max(0.0) as usize)
        }
        _ => None,
    };
    let pi_offset = match (opts.delta, &opts.constants) {
        (Some(delta), Some(tc)) => {
            let nf = n as f64;
            Some(tc.alpha * nf + 0.5 * tc.k1 * nf.powf(1.0 - delta / 2.0))
        }
        _ => None,
    };

    for v in 0..n as u32 {
        if deg[v as usize] < k {
            in_q[v as usize] = true;
            level[v as usize] = 1;
            l += deg[v as usize] as u64;
            if deg[v as usize] == 0 {
                proc_rank[v as usize] = next_rank;
                next_rank += 1;
                alive -= 1;
            } else {
                queue.push_back(v);
            }
        }
    }
    let mut heavy = HeavyStats::new(&deg, &in_q, k);

    let mut t = 0usize;
    let mut l_series = vec![l];
    let mut t_of_level: Vec<usize> = Vec::new();
    let mut removals: Vec<(u32, u32)> = Vec::with_capacity(m);
    let mut drift = Vec::new();
    let mut t0 = None;
    let sample = |t: usize, alive: usize, l: u64, heavy: &HeavyStats, drift: &mut Vec<DriftSample>| {
        drift.push(DriftSample::new(t, alive, m - t, l, heavy, h.r(), k, pi_offset));
    };
    if phase2_target.is_some_and(|target| alive <= target) {
        t0 = Some(0);
    }
    sample(0, alive, l, &heavy, &mut drift);

    while let Some(&v) = queue.front() {
        let vi = v as usize;
        if deg[vi] == 0 {
            queue.pop_front();
            continue;
        }
        if proc_rank[vi] == UNRANKED {
            proc_rank[vi] = next_rank;
            next_rank += 1;
        }
        while t_of_level.len() < level[vi] as usize {
            t_of_level.push(t);
        }
        let incident = inc.of(v);
        while !edge_alive[incident[ptr[vi]] as usize] {
            ptr[vi] += 1;
        }
        let e = incident[ptr[vi]];
        edge_alive[e as usize] = false;
        removals.push((v, e));
        for &w in h.edge(e as usize) {
            let wi = w as usize;
            heavy.remove(deg[wi], in_q[wi], k);
            deg[wi] -= 1;
            if in_q[wi] {
                l -= 1;
            } else if deg[wi] < k {
                in_q[wi] = true;
                level[wi] = level[vi] + 1;
                l += deg[wi] as u64;
                queue.push_back(w);
            }
            heavy.add(deg[wi], in_q[wi], k);
            if deg[wi] == 0 {
                alive -= 1;
                if proc_rank[wi] == UNRANKED {
                    proc_rank[wi] = next_rank;
                    next_rank += 1;
                }
            }
        }
        t += 1;
        l_series.push(l);
        let mut record = t % opts.stride == 0;
        if t0.is_none() && phase2_target.is_some_and(|target| alive <= target) {
            t0 = Some(t);
            record = true;
        }
        if record {
            sample(t, alive, l, &heavy, &mut drift);
        }
    }
    if drift.last().map(|s| s.t) != Some(t) {
        sample(t, alive, l, &heavy, &mut drift);
    }
    debug_assert_eq!(l, 0);

    let i_max = level.iter().copied().max().unwrap_or(0) as usize;
    let mut levels = vec![Vec::new(); i_max];
    for v in 0..n as u32 {
        if level[v as usize] != CORE_LEVEL {
            levels[level[v as usize] as usize - 1].push(v);
        }
    }
    while t_of_level.len() < i_max {
        t_of_level.push(t);
    }
    let hat_l = t_of_level.iter().map(|&ti| l_series[ti]).collect();
    let core = (0..n as u32).filter(|&v| !in_q[v as usize]).collect();
    let core_edges = (0..m as u32).filter(|&e| edge_alive[e as usize]).collect();
    let dag = DeletionDag::build(n, h, removals, proc_rank);
    let trace = StripTrace {
        n,
        k,
        levels,
        level_of: level,
        core,
        core_edges,
        t_of_level,
        l_series,
        hat_l,
        t0,
        tau: t,
    };
    Ok(SlowStrip { trace, dag, drift, delta: opts.delta })
}

/// `R⁺(v)`: vertices reachable from `v` along DAG arcs, ordered by processing
/// rank, so `v` comes last. Deleting them in this order is a valid k-stripping
/// sequence.
pub fn reach_set(dag: &DeletionDag, v: u32) -> Result<Vec<u32>> {
    if dag.proc_rank(v).is_none() {
        return Err(Error::CoreVertex(v));
    }
    let mut seen = vec![false; dag.n()];
    let mut stack = vec![v];
    let mut out = Vec::new();
    seen[v as usize] = true;
    while let Some(u) = stack.pop() {
        out.push(u);
        for &w in dag.out_neighbors(u) {
            if !seen[w as usize] {
                seen[w as usize] = true;
                stack.push(w);
            }
        }
    }
    out.sort_unstable_by_key(|&u| dag.proc_rank[u as usize]);
    Ok(out)
}

/// `(level(v), |R⁺(v)|)`: a lower and an upper bound on the depth of `v`.
pub fn depth_bounds(trace: &StripTrace, dag: &DeletionDag, v: u32) -> Result<(usize, usize)> {
    if trace.is_core(v) {
        return Err(Error::CoreVertex(v));
    }
    Ok((trace.level_of[v as usize] as usize, reach_set(dag, v)?.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stripping::parallel_strip;

    fn h(n: usize, r: usize, edges: &[&[u32]]) -> Hypergraph {
        Hypergraph::new(n, r, edges.iter().map(|e| e.to_vec()).collect(), true).unwrap()
    }

    fn path() -> Hypergraph {
        h(5, 2, &[&[0, 1], &[1, 2], &[2, 3], &[3, 4]])
    }

    #[test]
    fn path_reference_run() {
        let s = slow_strip(&path(), 2, &SlowStripOptions::default()).unwrap();
        let t = &s.trace;
        assert_eq!(t.levels, vec![vec![0, 4], vec![1, 3], vec![2]]);
        assert_eq!(t.tau, 4);
        assert_eq!(t.t_of_level[0], 0);
        assert_eq!(t.hat_l[0], 2);
        assert_eq!(t.l_series, vec![2, 2, 2, 2, 0]);
        assert!(t.core.is_empty());
        assert_eq!(s.dag.removals(), &[(0, 0), (4, 3), (1, 1), (3, 2)]);
    }

    #[test]
    fn path_reach_and_depth() {
        let s = slow_strip(&path(), 2, &SlowStripOptions::default()).unwrap();
        let r = reach_set(&s.dag, 2).unwrap();
        assert_eq!(*r.last().unwrap(), 2);
        assert_eq!(r.len(), 5);
        assert_eq!(depth_bounds(&s.trace, &s.dag, 2).unwrap(), (3, 5));
        assert_eq!(reach_set(&s.dag, 0).unwrap(), vec![0]);
    }

    #[test]
    fn nothing_to_strip() {
        let g = h(4, 3, &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]]);
        let s = slow_strip(&g, 2, &SlowStripOptions::default()).unwrap();
        assert_eq!(s.trace.tau, 0);
        assert_eq!(s.trace.core, vec![0, 1, 2, 3]);
        assert!(matches!(reach_set(&s.dag, 1), Err(Error::CoreVertex(1))));
        assert!(depth_bounds(&s.trace, &s.dag, 1).is_err());
    }

    #[test]
    fn levels_match_parallel() {
        let g = h(9, 3, &[&[0, 1, 2], &[2, 3, 4], &[4, 5, 6], &[6, 7, 8], &[1, 3, 5], &[0, 7, 8]]);
        let s = slow_strip(&g, 2, &SlowStripOptions::default()).unwrap();
        let p = parallel_strip(&g, 2).unwrap();
        assert_eq!(s.trace.levels, p.levels);
        assert_eq!(s.trace.core, p.core);
        assert_eq!(s.trace.core_edges, p.core_edges);
    }
}
