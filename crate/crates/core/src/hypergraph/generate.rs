use std::collections::HashSet;

use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson};

use super::Hypergraph;
use crate::error::{Error, Result};
use crate::rng::RngSeed;

/// `C(n, r)`, saturating at `u128::MAX`.
fn binomial_coefficient(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // acc * (n - i) / (i + 1) stays integral at each step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Edge probability `p = c / n^{r-1}` of `H_r(n, p)`.
pub fn binomial_edge_probability(n: usize, r: usize, c: f64) -> f64 {
    c / (n as f64).powi(r as i32 - 1)
}

fn sample_binomial<R: Rng>(trials: u128, p: f64, rng: &mut R) -> Result<u64> {
    if trials == 0 || p == 0.0 {
        return Ok(0);
    }
    if p >= 1.0 {
        return u64::try_from(trials).map_err(|_| Error::Parameter("edge count overflows u64".into()));
    }
    if let Ok(t) = u64::try_from(trials) {
        let d = Binomial::new(t, p).map_err(|e| Error::Parameter(e.to_string()))?;
        return Ok(d.sample(rng));
    }
    // More than 2^64 potential edges: Poisson(trials * p) is within total
    // variation p of the binomial, far below anything measurable here.
    let d = Poisson::new(trials as f64 * p).map_err(|e| Error::Parameter(e.to_string()))?;
    Ok(d.sample(rng) as u64)
}

/// Draws a uniform r-subset of `0..n` not already in `seen`, records it, and
/// appends it (sorted) to `slots`.
fn push_fresh_edge<R: Rng>(n: usize, r: usize, seen: &mut HashSet<Box<[u32]>>, slots: &mut Vec<u32>, rng: &mut R) {
    let mut e = vec![0u32; r];
    loop {
        let mut filled = 0;
        while filled < r {
            let v = rng.random_range(0..n as u32);
            if !e[..filled].contains(&v) {
                e[filled] = v;
                filled += 1;
            }
        }
        e.sort_unstable();
        if !seen.contains(e.as_slice()) {
            seen.insert(e.clone().into_boxed_slice());
            slots.extend_from_slice(&e);
            return;
        }
    }
}

fn validate_probability(p: f64, c: f64) -> Result<()> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::Parameter(format!("density must be nonnegative, got {c}")));
    }
    if p > 1.0 {
        return Err(Error::Parameter(format!("edge probability c/n^(r-1) = {p} exceeds 1")));
    }
    Ok(())
}

/// Samples `H_r(n, p = c/n^{r-1})`: the edge count is binomial, then that many
/// distinct uniform r-subsets are drawn by rejection.
pub fn gen_binomial(n: usize, r: usize, c: f64, seed: RngSeed) -> Result<Hypergraph> {
    if r < 2 {
        return Err(Error::Parameter(format!("uniformity r must be at least 2, got {r}")));
    }
    if n < r {
        if !(c >= 0.0) {
            return Err(Error::Parameter(format!("density must be nonnegative, got {c}")));
        }
        return Ok(Hypergraph::empty(n, r));
    }
    let p = binomial_edge_probability(n, r, c);
    validate_probability(p, c)?;
    let mut rng = seed.rng();
    let total = binomial_coefficient(n, r);
    let m = sample_binomial(total, p, &mut rng)? as usize;
    if m as u128 > total / 2 + 1 && total < 1 << 20 {
        // Dense regime on a tiny vertex set: enumerate instead of rejecting.
        return Ok(dense_binomial(n, r, p, &mut rng));
    }
    let mut seen = HashSet::with_capacity(m);
    let mut slots = Vec::with_capacity(m * r);
    for _ in 0..m {
        push_fresh_edge(n, r, &mut seen, &mut slots, &mut rng);
    }
    Ok(Hypergraph::from_slots_unchecked(n, r, slots, false))
}

/// Independent coin per r-subset; only used when `C(n, r)` is tiny.
fn dense_binomial<R: Rng>(n: usize, r: usize, p: f64, rng: &mut R) -> Hypergraph {
    let mut slots = Vec::new();
    let mut idx: Vec<u32> = (0..r as u32).collect();
    loop {
        if rng.random_bool(p) {
            slots.extend_from_slice(&idx);
        }
        // next combination in lexicographic order
        let mut i = r;
        loop {
            if i == 0 {
                return Hypergraph::from_slots_unchecked(n, r, slots, false);
            }
            i -= 1;
            if (idx[i] as usize) < n - r + i {
                idx[i] += 1;
                for j in i + 1..r {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// A coupled pair `H ⊆ H'` with `H ~ H_r(n, c_low/n^{r-1})` and
/// `H' ~ H_r(n, c_high/n^{r-1})`. `H` is exactly `gen_binomial(n, r, c_low, seed)`;
/// `H'` lists the edges of `H` first, under the same indices, then the extras.
pub fn gen_coupled(n: usize, r: usize, c_low: f64, c_high: f64, seed: RngSeed) -> Result<(Hypergraph, Hypergraph)> {
    if !(c_low <= c_high) {
        return Err(Error::Parameter(format!("need c_low <= c_high, got {c_low} > {c_high}")));
    }
    let low = gen_binomial(n, r, c_low, seed)?;
    if n < r || c_low == c_high {
        return Ok((low.clone(), low));
    }
    let p_low = binomial_edge_probability(n, r, c_low);
    let p_high = binomial_edge_probability(n, r, c_high);
    validate_probability(p_high, c_high)?;
    // Each non-edge of H joins independently with q, so that
    // (1 - p_low)(1 - q) = 1 - p_high.
    let q = if p_low >= 1.0 { 0.0 } else { ((p_high - p_low) / (1.0 - p_low)).clamp(0.0, 1.0) };
    let mut rng = seed.derive(0xc0u64).rng();
    let total = binomial_coefficient(n, r);
    let extra = sample_binomial(total - low.num_edges() as u128, q, &mut rng)? as usize;
    let mut seen: HashSet<Box<[u32]>> = low.edges().map(|e| e.to_vec().into_boxed_slice()).collect();
    let mut slots = low.slots().to_vec();
    slots.reserve(extra * r);
    for _ in 0..extra {
        push_fresh_edge(n, r, &mut seen, &mut slots, &mut rng);
    }
    Ok((low, Hypergraph::from_slots_unchecked(n, r, slots, false)))
}
