use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::{StripTrace, CORE_LEVEL};
use crate::error::{Error, Result};
use crate::hypergraph::{config_model, DegreeSequence, Hypergraph};
use crate::rng::RngSeed;
use crate::sampling::sample_with_sum;
use crate::thresholds::{bisect, mean_degree_map};

/// Attempts at an exact coverage-constrained occupancy draw before repairing.
const OCCUPANCY_ATTEMPTS: usize = 10_000;

/// `count` slots of a vertex in edges of Type `(a, b)`: `a` slots in the
/// vertex's own level, `b` in the next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TypeCount {
    pub a: u8,
    pub b: u8,
    pub count: u32,
}

/// Per-vertex Type counts `λ_{a,b}(v)` in the residual graph of `v`'s level.
/// A vertex listed twice in an edge counts twice, so the counts sum to its
/// residual degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelProfile {
    pub n: usize,
    pub r: usize,
    pub k: u32,
    pub levels: Vec<Vec<u32>>,
    pub level_of: Vec<u32>,
    pub core: Vec<u32>,
    lambda: Vec<Vec<TypeCount>>,
}

impl LevelProfile {
    /// Nonzero `λ_{a,b}(v)` entries, sorted by `(a, b)`.
    pub fn lambda(&self, v: u32) -> &[TypeCount] {
        &self.lambda[v as usize]
    }

    pub fn lambda_ab(&self, v: u32, a: u8, b: u8) -> u32 {
        self.lambda(v).iter().find(|t| t.a == a && t.b == b).map_or(0, |t| t.count)
    }

    /// Degree of `v` in the residual graph of its level.
    pub fn residual_degree(&self, v: u32) -> u32 {
        self.lambda(v).iter().map(|t| t.count).sum()
    }

    /// `d^{(a)}(v)`: slots of `v` in edges lying within its level with `a` slots there.
    pub fn within_level_degree(&self, v: u32, a: u8) -> u32 {
        self.lambda_ab(v, a, 0)
    }

    /// `d⁺(v)`: next-level slots across the edges at `v`, with multiplicity.
    pub fn d_plus(&self, v: u32) -> u32 {
        self.lambda(v).iter().map(|t| t.count * t.b as u32).sum()
    }

    /// `d⁺⁺(v)`: slots beyond the next level across the edges at `v`.
    pub fn d_plus_plus(&self, v: u32) -> u32 {
        self.lambda(v).iter().map(|t| t.count * (self.r as u32 - t.a as u32 - t.b as u32)).sum()
    }
}

fn rank(level: u32, i_max: usize) -> u32 {
    if level == CORE_LEVEL {
        i_max as u32 + 1
    } else {
        level
    }
}

/// Exposes `λ_{a,b}(v)` for every stripped vertex. Fails if the trace does not
/// describe a stripping of `h`.
pub fn level_profiles(h: &Hypergraph, trace: &StripTrace) -> Result<LevelProfile> {
    let n = h.n();
    if trace.n != n || trace.level_of.len() != n {
        return Err(Error::Mismatch(format!("trace covers {} vertices, hypergraph has {n}", trace.n)));
    }
    let i_max = trace.i_max();
    let mut acc: Vec<BTreeMap<(u8, u8), u32>> = vec![BTreeMap::new(); n];
    // Slots of v in edges whose lowest level is exactly level(v) - 1.
    let mut from_prev = vec![0u32; n];
    for e in h.edges() {
        let lo = e.iter().map(|&v| rank(trace.level_of[v as usize], i_max)).min().unwrap_or(0);
        if lo as usize > i_max {
            continue;
        }
        let a = e.iter().filter(|&&v| rank(trace.level_of[v as usize], i_max) == lo).count() as u8;
        // The core sits at rank i_max + 1 but is never a next level.
        let next = |lv: u32| lv == lo + 1 && lv as usize <= i_max;
        let b = e.iter().filter(|&&v| next(rank(trace.level_of[v as usize], i_max))).count() as u8;
        for &v in e {
            let lv = rank(trace.level_of[v as usize], i_max);
            if lv == lo {
                *acc[v as usize].entry((a, b)).or_insert(0) += 1;
            } else if next(lv) {
                from_prev[v as usize] += 1;
            }
        }
    }
    let lambda: Vec<Vec<TypeCount>> = acc
        .into_iter()
        .map(|m| m.into_iter().map(|((a, b), count)| TypeCount { a, b, count }).collect())
        .collect();
    let profile = LevelProfile {
        n,
        r: h.r(),
        k: trace.k,
        levels: trace.levels.clone(),
        level_of: trace.level_of.clone(),
        core: trace.core.clone(),
        lambda,
    };
    for (i, level) in trace.levels.iter().enumerate() {
        for &v in level {
            if trace.level_of[v as usize] != i as u32 + 1 {
                return Err(Error::Mismatch(format!("vertex {v} listed in level {} but marked otherwise", i + 1)));
            }
            let d = profile.residual_degree(v);
            if d >= trace.k {
                return Err(Error::Mismatch(format!("vertex {v} has residual degree {d} >= k at its level")));
            }
            if i > 0 && d + from_prev[v as usize] < trace.k {
                return Err(Error::Mismatch(format!("vertex {v} was light one level earlier")));
            }
        }
    }
    Ok(profile)
}

/// Degrees inside the core sub-hypergraph, indexed by vertex (zero off the core).
pub fn core_degree_sequence(h: &Hypergraph, trace: &StripTrace) -> DegreeSequence {
    let mut d = vec![0u32; h.n()];
    for &e in &trace.core_edges {
        for &v in h.edge(e as usize) {
            d[v as usize] += 1;
        }
    }
    DegreeSequence::new(d)
}

#[derive(Debug, Clone)]
pub struct Resampled {
    pub hypergraph: Hypergraph,
    /// Levels `i` whose `(S_i, S_{i+1})` layer fell back to the repair pass
    /// and so is not an exact uniform draw.
    pub repaired_layers: Vec<usize>,
}

/// Draws a hypergraph with the same level partition and the same `λ_{a,b}`
/// profile. Within-level and bipartite edges are configuration pairings; the
/// next-level side of each layer gives every vertex at least the slots it needs
/// to have been heavy one round earlier. Remaining slots go to uniform vertices
/// of the core or levels two or more above. The core is a configuration model
/// on `core_degrees`. Loops and parallel edges can occur.
pub fn resample_from_profiles(profile: &LevelProfile, core_degrees: &DegreeSequence, seed: RngSeed) -> Result<Resampled> {
    let r = profile.r;
    let k = profile.k;
    let i_max = profile.levels.len();
    if core_degrees.len() != profile.n {
        return Err(Error::Parameter(format!(
            "core degree sequence has {} entries, expected {}",
            core_degrees.len(),
            profile.n
        )));
    }
    let mut rng = seed.rng();
    let core = config_model(core_degrees, r, seed.derive(0x0c0e))?;
    let mut slots: Vec<u32> = core.slots().to_vec();
    let mut repaired_layers = Vec::new();

    // Core first, then levels from the top down, so the endpoints available
    // to level i (core and levels i+2 and above) form a prefix.
    let mut pool: Vec<u32> = profile.core.clone();
    let mut prefix = vec![profile.core.len(); i_max + 2];
    for j in (1..=i_max).rev() {
        pool.extend_from_slice(&profile.levels[j - 1]);
        prefix[j] = pool.len();
    }
    let pool_for = |i: usize| -> &[u32] { &pool[..prefix[(i + 2).min(i_max + 1)]] };

    let fill = |edge: &mut Vec<u32>, i: usize, rng: &mut rand_chacha::ChaCha8Rng| -> Result<()> {
        let p = pool_for(i);
        while edge.len() < r {
            if p.is_empty() {
                return Err(Error::Infeasible(format!("level {i} needs outer endpoints but none remain")));
            }
            edge.push(p[rng.random_range(0..p.len())]);
        }
        edge.sort_unstable();
        Ok(())
    };

    for i in 1..=i_max {
        let level = &profile.levels[i - 1];
        let mut by_type: BTreeMap<(u8, u8), Vec<u32>> = BTreeMap::new();
        for &v in level {
            for t in profile.lambda(v) {
                by_type.entry((t.a, t.b)).or_default().extend(std::iter::repeat_n(v, t.count as usize));
            }
        }
        // Next-level sides of this layer, filled after occupancy is drawn.
        let mut pending: Vec<(Vec<u32>, u8)> = Vec::new();
        for (&(a, b), copies) in by_type.iter_mut() {
            if a == 0 || (a as usize + b as usize) > r {
                return Err(Error::Infeasible(format!("invalid edge type ({a}, {b})")));
            }
            if copies.len() % a as usize != 0 {
                return Err(Error::Infeasible(format!(
                    "level {i}: {} slots of type ({a}, {b}) do not group into {a}-sets",
                    copies.len()
                )));
            }
            copies.shuffle(&mut rng);
            for group in copies.chunks_exact(a as usize) {
                if b == 0 {
                    let mut e = group.to_vec();
                    fill(&mut e, i, &mut rng)?;
                    slots.extend_from_slice(&e);
                } else {
                    pending.push((group.to_vec(), b));
                }
            }
        }
        if i == i_max {
            if !pending.is_empty() {
                return Err(Error::Infeasible(format!("top level {i} has edges into a missing next level")));
            }
            continue;
        }
        let next = &profile.levels[i];
        let need: Vec<u32> = next.iter().map(|&u| k.saturating_sub(profile.residual_degree(u))).collect();
        let total: u64 = pending.iter().map(|p| p.1 as u64).sum();
        let (occ, repaired) = draw_occupancy(&need, total, &mut rng).ok_or_else(|| {
            Error::Infeasible(format!("level {}: {total} slots cannot cover the next level", i + 1))
        })?;
        if repaired {
            repaired_layers.push(i);
        }
        let mut next_slots: Vec<u32> = Vec::with_capacity(total as usize);
        for (&u, &x) in next.iter().zip(&occ) {
            next_slots.extend(std::iter::repeat_n(u, x as usize));
        }
        next_slots.shuffle(&mut rng);
        let mut cursor = 0;
        for (mut e, b) in pending {
            e.extend_from_slice(&next_slots[cursor..cursor + b as usize]);
            cursor += b as usize;
            fill(&mut e, i, &mut rng)?;
            slots.extend_from_slice(&e);
        }
    }
    let hypergraph = Hypergraph::from_slots(profile.n, r, slots, true)?;
    Ok(Resampled { hypergraph, repaired_layers })
}

/// Occupancy `x_u >= need_u` summing to `total`, with law proportional to
/// `Π 1/x_u!`. Falls back to `need` plus a uniform multinomial spread of the
/// excess (flagged) if rejection does not succeed in time.
fn draw_occupancy<R: Rng>(need: &[u32], total: u64, rng: &mut R) -> Option<(Vec<u32>, bool)> {
    let floor: u64 = need.iter().map(|&x| x as u64).sum();
    if total < floor || (need.is_empty() && total > 0) {
        return None;
    }
    if total == floor {
        return Some((need.to_vec(), false));
    }
    let mean_at = |lambda: f64| -> f64 {
        need.iter().map(|&lo| mean_degree_map(lambda, lo).unwrap_or(lambda)).sum::<f64>() - total as f64
    };
    let lambda = bisect(mean_at, 1e-9, total as f64 + 1.0, 1e-10).ok()?;
    if let Some(x) = sample_with_sum(need, lambda, total, rng, OCCUPANCY_ATTEMPTS) {
        return Some((x, false));
    }
    let mut x = need.to_vec();
    for _ in 0..total - floor {
        x[rng.random_range(0..need.len())] += 1;
    }
    Some((x, true))
}
