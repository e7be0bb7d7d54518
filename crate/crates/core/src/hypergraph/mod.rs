//! r-uniform hypergraphs and their random generators.
//!
//! Edges are stored flat, `r` vertex slots per edge, and keep their index for
//! the lifetime of the hypergraph so stripping traces can name them. Degrees
//! count slots: a vertex listed twice in one edge has degree two from it.

mod config;
mod generate;
mod io;

pub use config::{config_model, sample_truncated_multinomial, truncated_multinomial_exact, DegreeSequence};
pub use generate::{binomial_edge_probability, gen_binomial, gen_coupled};
pub use io::{read_edges_csv, write_edges_csv};

use std::collections::HashSet;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    r: usize,
    slots: Vec<u32>,
    multi_allowed: bool,
}

/// Vertex-to-edge incidence in compressed form. An edge id is listed once per
/// slot the vertex occupies, and ids are ascending within each vertex.
#[derive(Debug, Clone)]
pub struct Incidence {
    offsets: Vec<usize>,
    edges: Vec<u32>,
}

impl Incidence {
    pub fn of(&self, v: u32) -> &[u32] {
        &self.edges[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeStats {
    pub max_degree: u32,
    pub sum: u64,
    pub sum_sq: u64,
}

/// Concrete stand-in for an asymptotic niceness condition on degree sequences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NiceConfig {
    /// Allowed max degree is `max_degree_factor * n^{1/24}`.
    pub max_degree_factor: f64,
    /// Allowed `Σ d²` is `sum_sq_factor * n`.
    pub sum_sq_factor: f64,
}

impl Default for NiceConfig {
    fn default() -> Self {
        NiceConfig { max_degree_factor: 10.0, sum_sq_factor: 50.0 }
    }
}

impl Hypergraph {
    /// Builds a hypergraph, validating slot counts, vertex range, and (when
    /// `multi_allowed` is false) simplicity.
    pub fn new(n: usize, r: usize, edges: Vec<Vec<u32>>, multi_allowed: bool) -> Result<Self> {
        let mut slots = Vec::with_capacity(edges.len() * r);
        for (i, e) in edges.into_iter().enumerate() {
            if e.len() != r {
                return Err(Error::Parameter(format!("edge {i} has {} slots, expected {r}", e.len())));
            }
            slots.extend(e);
        }
        Self::from_slots(n, r, slots, multi_allowed)
    }

    pub fn from_slots(n: usize, r: usize, slots: Vec<u32>, multi_allowed: bool) -> Result<Self> {
        if r == 0 {
            return Err(Error::Parameter("uniformity r must be positive".into()));
        }
        if slots.len() % r != 0 {
            return Err(Error::Parameter(format!("{} slots do not split into {r}-edges", slots.len())));
        }
        if let Some(&v) = slots.iter().find(|&&v| v as usize >= n) {
            return Err(Error::Parameter(format!("vertex {v} out of range for n = {n}")));
        }
        let h = Hypergraph { n, r, slots, multi_allowed };
        if !multi_allowed && !h.is_simple() {
            return Err(Error::Parameter("hypergraph has a repeated vertex or duplicate edge".into()));
        }
        Ok(h)
    }

    pub(crate) fn from_slots_unchecked(n: usize, r: usize, slots: Vec<u32>, multi_allowed: bool) -> Self {
        debug_assert!(slots.len() % r == 0);
        Hypergraph { n, r, slots, multi_allowed }
    }

    pub fn empty(n: usize, r: usize) -> Self {
        Hypergraph { n, r, slots: Vec::new(), multi_allowed: false }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn multi_allowed(&self) -> bool {
        self.multi_allowed
    }

    pub fn num_edges(&self) -> usize {
        self.slots.len() / self.r
    }

    pub fn edge(&self, i: usize) -> &[u32] {
        &self.slots[i * self.r..(i + 1) * self.r]
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.slots.chunks_exact(self.r)
    }

    pub fn slots(&self) -> &[u32] {
        &self.slots
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut d = vec![0u32; self.n];
        for &v in &self.slots {
            d[v as usize] += 1;
        }
        d
    }

    pub fn incidence(&self) -> Incidence {
        let deg = self.degrees();
        let mut offsets = Vec::with_capacity(self.n + 1);
        offsets.push(0);
        for &d in &deg {
            offsets.push(offsets.last().unwrap() + d as usize);
        }
        let mut fill = offsets.clone();
        let mut edges = vec![0u32; self.slots.len()];
        for (ei, e) in self.edges().enumerate() {
            for &v in e {
                edges[fill[v as usize]] = ei as u32;
                fill[v as usize] += 1;
            }
        }
        Incidence { offsets, edges }
    }

    /// Sub-hypergraph made of the listed edges; vertex ids are kept.
    pub fn edge_subgraph(&self, edge_ids: &[u32]) -> Hypergraph {
        let mut slots = Vec::with_capacity(edge_ids.len() * self.r);
        for &e in edge_ids {
            slots.extend_from_slice(self.edge(e as usize));
        }
        Hypergraph { n: self.n, r: self.r, slots, multi_allowed: self.multi_allowed }
    }

    /// No vertex repeated within an edge and no two edges with the same vertex set.
    pub fn is_simple(&self) -> bool {
        let mut seen: HashSet<Vec<u32>> = HashSet::with_capacity(self.num_edges());
        for e in self.edges() {
            let mut s = e.to_vec();
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return false;
            }
            if !seen.insert(s) {
                return false;
            }
        }
        true
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let d = self.degrees();
        DegreeStats {
            max_degree: d.iter().copied().max().unwrap_or(0),
            sum: d.iter().map(|&x| x as u64).sum(),
            sum_sq: d.iter().map(|&x| (x as u64) * (x as u64)).sum(),
        }
    }

    pub fn nice_check(&self, cfg: &NiceConfig) -> bool {
        let s = self.degree_stats();
        let n = self.n.max(1) as f64;
        (s.max_degree as f64) <= cfg.max_degree_factor * n.powf(1.0 / 24.0)
            && (s.sum_sq as f64) <= cfg.sum_sq_factor * n
    }
}
