use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use super::Hypergraph;
use crate::error::{Error, Result};
use crate::rng::RngSeed;
use crate::sampling::sample_with_sum;
use crate::thresholds::invert_mean_degree;

/// Vertex counts and totals at or below these use the exact sampler.
const EXACT_MAX_N: usize = 12;
const EXACT_MAX_D: u64 = 2000;
const REJECTION_ATTEMPTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSequence {
    pub degrees: Vec<u32>,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<u32>) -> Self {
        DegreeSequence { degrees }
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.degrees.iter().map(|&d| d as u64).sum()
    }

    /// Number of entries equal to `j`.
    pub fn count_of(&self, j: u32) -> usize {
        self.degrees.iter().filter(|&&d| d == j).count()
    }
}

fn check_feasible(n: usize, d: u64, k: u32) -> Result<()> {
    if d < k as u64 * n as u64 {
        return Err(Error::Infeasible(format!("total {d} is below k·N = {}", k as u64 * n as u64)));
    }
    if n == 0 && d > 0 {
        return Err(Error::Infeasible(format!("total {d} cannot be split over zero vertices")));
    }
    Ok(())
}

/// Samples `Multi(N, D, k)`: a vector with entries at least `k`, summing to
/// `D`, with probability proportional to `Π 1/d_i!`.
pub fn sample_truncated_multinomial(n: usize, d: u64, k: u32, seed: RngSeed) -> Result<DegreeSequence> {
    check_feasible(n, d, k)?;
    if n == 0 {
        return Ok(DegreeSequence::new(Vec::new()));
    }
    if d == k as u64 * n as u64 {
        return Ok(DegreeSequence::new(vec![k; n]));
    }
    if n <= EXACT_MAX_N && d <= EXACT_MAX_D {
        return truncated_multinomial_exact(n, d, k, seed);
    }
    truncated_multinomial_rejection(n, d, k, seed)
}

pub(crate) fn truncated_multinomial_rejection(n: usize, d: u64, k: u32, seed: RngSeed) -> Result<DegreeSequence> {
    check_feasible(n, d, k)?;
    if d == k as u64 * n as u64 {
        return Ok(DegreeSequence::new(vec![k; n]));
    }
    let lambda = invert_mean_degree(d as f64 / n as f64, k)?;
    let mut rng = seed.rng();
    sample_with_sum(&vec![k; n], lambda, d, &mut rng, REJECTION_ATTEMPTS)
        .map(DegreeSequence::new)
        .ok_or_else(|| Error::Numerical(format!("truncated multinomial rejection exhausted for N={n}, D={d}")))
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Exact conditional sampler by dynamic programming over partial sums.
/// Cost is `O(N·D²)`; intended for small instances and as a test oracle.
pub fn truncated_multinomial_exact(n: usize, d: u64, k: u32, seed: RngSeed) -> Result<DegreeSequence> {
    check_feasible(n, d, k)?;
    if d > 1 << 16 {
        return Err(Error::Guard(format!("exact sampler limited to D <= 65536, got {d}")));
    }
    let d = d as usize;
    let k = k as usize;
    let lw: Vec<f64> = (0..=d).map(|j| -ln_factorial(j as u64)).collect();
    // table[i][s]: log of Σ Π_{j<i} 1/d_j! over d_j ≥ k with Σ d_j = s
    let mut table = vec![vec![f64::NEG_INFINITY; d + 1]; n + 1];
    table[0][0] = 0.0;
    for i in 1..=n {
        for s in k * i..=d {
            let mut acc = f64::NEG_INFINITY;
            for x in k..=s - k * (i - 1) {
                acc = log_add(acc, lw[x] + table[i - 1][s - x]);
            }
            table[i][s] = acc;
        }
    }
    let mut rng = seed.rng();
    let mut out = vec![0u32; n];
    let mut s = d;
    for i in (1..=n).rev() {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let hi = s - k * (i - 1);
        let mut pick = hi;
        for x in k..=hi {
            acc += (lw[x] + table[i - 1][s - x] - table[i][s]).exp();
            if u < acc {
                pick = x;
                break;
            }
        }
        out[i - 1] = pick as u32;
        s -= pick;
    }
    Ok(DegreeSequence::new(out))
}

/// Configuration model: `deg[v]` copies of each vertex, uniformly partitioned
/// into groups of `r`. Loops and parallel edges are kept.
pub fn config_model(deg: &DegreeSequence, r: usize, seed: RngSeed) -> Result<Hypergraph> {
    if r == 0 {
        return Err(Error::Parameter("uniformity r must be positive".into()));
    }
    let total = deg.sum();
    if total % r as u64 != 0 {
        return Err(Error::Parameter(format!("degree sum {total} is not divisible by r = {r}")));
    }
    let mut copies: Vec<u32> = Vec::with_capacity(total as usize);
    for (v, &dv) in deg.degrees.iter().enumerate() {
        copies.extend(std::iter::repeat_n(v as u32, dv as usize));
    }
    let mut rng = seed.rng();
    copies.shuffle(&mut rng);
    for e in copies.chunks_exact_mut(r) {
        e.sort_unstable();
    }
    Ok(Hypergraph::from_slots_unchecked(deg.len(), r, copies, true))
}
