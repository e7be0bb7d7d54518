//! k-stripping: the parallel process, SLOW-STRIP with its deletion DAG, level
//! profiles and the level-preserving resampler, and Phase-2 drift statistics.

mod drift;
mod profile;
mod slow;

pub use drift::{drift_series, drift_series_with, write_trace_csv, DriftSample, DriftSummary};
pub use profile::{
    core_degree_sequence, level_profiles, resample_from_profiles, LevelProfile, Resampled, TypeCount,
};
pub use slow::{depth_bounds, reach_set, slow_strip, DeletionDag, SlowStrip, SlowStripOptions};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

/// Level marker for core vertices in [`StripTrace::level_of`].
pub const CORE_LEVEL: u32 = 0;

/// Outcome of a stripping run. Fields that only SLOW-STRIP produces
/// (`t_of_level`, `l_series`, `hat_l`, `t0`, `tau`) are empty or zero for the
/// parallel process.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StripTrace {
    pub n: usize,
    pub k: u32,
    /// `levels[i - 1]` is `S_i`, sorted by vertex id.
    pub levels: Vec<Vec<u32>>,
    /// Level of each vertex, or [`CORE_LEVEL`].
    pub level_of: Vec<u32>,
    pub core: Vec<u32>,
    pub core_edges: Vec<u32>,
    /// `t_of_level[i - 1]` is `t(i)`: edge removals before the first level-`i` step.
    pub t_of_level: Vec<usize>,
    /// `L_t` for `t = 0..=tau`.
    pub l_series: Vec<u64>,
    /// `hat_l[i - 1] = L_{t(i)}`.
    pub hat_l: Vec<u64>,
    pub t0: Option<usize>,
    pub tau: usize,
}

impl StripTrace {
    /// Number of parallel rounds, `I_max`; this is the stripping number.
    pub fn i_max(&self) -> usize {
        self.levels.len()
    }

    pub fn is_core(&self, v: u32) -> bool {
        self.level_of[v as usize] == CORE_LEVEL
    }
}

pub(crate) fn check_k(k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    Ok(())
}

/// Removes every vertex of degree below `k` at once, round after round, until
/// the k-core remains. Vertices isolated from the start form part of `S_1`.
pub fn parallel_strip(h: &Hypergraph, k: u32) -> Result<StripTrace> {
    check_k(k)?;
    let n = h.n();
    let inc = h.incidence();
    let mut deg = h.degrees();
    let mut edge_alive = vec![true; h.num_edges()];
    let mut level_of = vec![CORE_LEVEL; n];
    let mut levels: Vec<Vec<u32>> = Vec::new();

    let mut frontier: Vec<u32> = (0..n as u32).filter(|&v| deg[v as usize] < k).collect();
    for &v in &frontier {
        level_of[v as usize] = 1;
    }
    while !frontier.is_empty() {
        let i = levels.len() as u32 + 1;
        let mut next = Vec::new();
        for &v in &frontier {
            for &e in inc.of(v) {
                if !edge_alive[e as usize] {
                    continue;
                }
                edge_alive[e as usize] = false;
                for &w in h.edge(e as usize) {
                    let wd = &mut deg[w as usize];
                    *wd -= 1;
                    if *wd + 1 == k && level_of[w as usize] == CORE_LEVEL {
                        level_of[w as usize] = i + 1;
                        next.push(w);
                    }
                }
            }
        }
        frontier.sort_unstable();
        levels.push(std::mem::take(&mut frontier));
        frontier = next;
    }
    let core: Vec<u32> = (0..n as u32).filter(|&v| level_of[v as usize] == CORE_LEVEL).collect();
    let core_edges: Vec<u32> = (0..h.num_edges() as u32).filter(|&e| edge_alive[e as usize]).collect();
    Ok(StripTrace {
        n,
        k,
        levels,
        level_of,
        core,
        core_edges,
        t_of_level: Vec::new(),
        l_series: Vec::new(),
        hat_l: Vec::new(),
        t0: None,
        tau: 0,
    })
}
