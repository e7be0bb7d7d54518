//! Truncated Poisson draws and sum-conditioned vectors of them.

use std::collections::BTreeMap;

use rand::Rng;

/// Poisson(λ) conditioned on being at least `lo`, sampled by inverse CDF.
#[derive(Debug, Clone)]
pub(crate) struct TruncatedPoisson {
    lo: u32,
    pmf: Vec<f64>,
    cdf: Vec<f64>,
    pmf_max: f64,
}

impl TruncatedPoisson {
    pub(crate) fn new(lambda: f64, lo: u32) -> Self {
        if !(lambda > 0.0) {
            return TruncatedPoisson { lo, pmf: vec![1.0], cdf: vec![1.0], pmf_max: 1.0 };
        }
        // Weights relative to the mass at `lo`; the mode is at max(lo, ⌊λ⌋),
        // so log-space keeps them finite.
        let ln_l = lambda.ln();
        let mut logw = Vec::new();
        let mut j = lo;
        let mut lw = 0.0_f64;
        let mut best = f64::NEG_INFINITY;
        loop {
            logw.push(lw);
            best = best.max(lw);
            if (j as f64) > lambda && lw < best - 45.0 {
                break;
            }
            j += 1;
            lw += ln_l - (j as f64).ln();
        }
        let mut pmf: Vec<f64> = logw.iter().map(|&w| (w - best).exp()).collect();
        let total: f64 = pmf.iter().sum();
        pmf.iter_mut().for_each(|p| *p /= total);
        let mut acc = 0.0;
        let cdf = pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let pmf_max = pmf.iter().copied().fold(0.0, f64::max);
        TruncatedPoisson { lo, pmf, cdf, pmf_max }
    }

    pub(crate) fn sample<R: Rng>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.random::<f64>() * self.cdf.last().copied().unwrap_or(1.0);
        let idx = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        self.lo + idx as u32
    }

    pub(crate) fn pmf(&self, x: u64) -> f64 {
        if x < self.lo as u64 {
            return 0.0;
        }
        self.pmf.get((x - self.lo as u64) as usize).copied().unwrap_or(0.0)
    }
}

/// Draws independent `TruncatedPoisson(λ, lows[i])` values conditioned on
/// summing to `total`. All coordinates but the last are sampled freely; the
/// last is forced and accepted with probability `pmf(x)/pmf_max`, which is
/// exact for the conditional law. Returns `None` after `max_attempts`.
pub(crate) fn sample_with_sum<R: Rng>(
    lows: &[u32],
    lambda: f64,
    total: u64,
    rng: &mut R,
    max_attempts: usize,
) -> Option<Vec<u32>> {
    let n = lows.len();
    if n == 0 {
        return (total == 0).then(Vec::new);
    }
    let min_sum: u64 = lows.iter().map(|&l| l as u64).sum();
    if total < min_sum {
        return None;
    }
    let mut by_low: BTreeMap<u32, usize> = BTreeMap::new();
    let mut dists: Vec<TruncatedPoisson> = Vec::new();
    let kind: Vec<usize> = lows
        .iter()
        .map(|&l| {
            *by_low.entry(l).or_insert_with(|| {
                dists.push(TruncatedPoisson::new(lambda, l));
                dists.len() - 1
            })
        })
        .collect();
    // Suffix minima let an attempt stop as soon as it overshoots.
    let mut suffix_min = vec![0u64; n + 1];
    for i in (0..n).rev() {
        suffix_min[i] = suffix_min[i + 1] + lows[i] as u64;
    }
    let last = &dists[kind[n - 1]];
    let mut out = vec![0u32; n];
    'attempt: for _ in 0..max_attempts {
        let mut sum = 0u64;
        for i in 0..n - 1 {
            let x = dists[kind[i]].sample(rng);
            out[i] = x;
            sum += x as u64;
            if sum + suffix_min[i + 1] > total {
                continue 'attempt;
            }
        }
        let rest = total - sum;
        let accept = last.pmf(rest) / last.pmf_max;
        if accept > 0.0 && rng.random::<f64>() < accept {
            out[n - 1] = rest as u32;
            return Some(out);
        }
    }
    None
}
