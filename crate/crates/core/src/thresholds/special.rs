//! Poisson tail probabilities and the functions built from them.

use crate::error::{Error, Result};

/// Mean above which the tail is taken from the regularized incomplete gamma
/// function instead of direct summation.
const LARGE_MEAN: f64 = 50.0;

fn ln_factorial(t: u32) -> f64 {
    statrs::function::factorial::ln_factorial(t as u64)
}

/// Poisson probability mass `e^{-λ} λ^t / t!`, with `pmf(-1) = 0` by convention.
pub fn poisson_pmf(t: i64, lambda: f64) -> f64 {
    if t < 0 {
        return 0.0;
    }
    if lambda == 0.0 {
        return if t == 0 { 1.0 } else { 0.0 };
    }
    (t as f64 * lambda.ln() - lambda - ln_factorial(t as u32)).exp()
}

/// `f_t(λ)`: probability that a Poisson variable with mean `λ` is at least `t`.
pub fn poisson_tail(t: u32, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("poisson_tail needs lambda > 0, got {lambda}")));
    }
    if t == 0 {
        return Ok(1.0);
    }
    if lambda > LARGE_MEAN {
        // P(Po(λ) >= t) = P(t, λ), the regularized lower incomplete gamma.
        return Ok(statrs::function::gamma::gamma_lr(t as f64, lambda).clamp(0.0, 1.0));
    }
    if (t as f64) <= lambda {
        // Head is short and the answer is at least ~1/2: no cancellation trouble.
        let mut term = (-lambda).exp();
        let mut head = 0.0;
        for i in 0..t {
            head += term;
            term *= lambda / (i + 1) as f64;
        }
        return Ok((1.0 - head).clamp(0.0, 1.0));
    }
    // Upper tail from t: terms decrease monotonically since t > λ.
    let mut term = poisson_pmf(t as i64, lambda);
    let mut sum = 0.0;
    let mut i = t;
    while term > 1e-17 * sum || sum == 0.0 {
        sum += term;
        i += 1;
        term *= lambda / i as f64;
        if term == 0.0 {
            break;
        }
    }
    Ok(sum.min(1.0))
}

/// Derivative of `f_t` in `λ`: `f_t'(λ) = e^{-λ} λ^{t-1} / (t-1)!`.
pub fn poisson_tail_deriv(t: u32, lambda: f64) -> f64 {
    poisson_pmf(t as i64 - 1, lambda)
}

/// `g_k(x) = x f_{k-1}(x) / f_k(x)`: the mean of a Poisson(x) variable
/// conditioned on being at least `k`.
pub fn mean_degree_map(x: f64, k: u32) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("g_k needs x > 0, got {x}")));
    }
    if k == 0 {
        return Ok(x);
    }
    let lower = poisson_tail(k - 1, x)?;
    let upper = poisson_tail(k, x)?;
    Ok(x * lower / upper)
}

/// Inverse of [`mean_degree_map`]: the unique `λ > 0` with `g_k(λ) = target`.
pub fn invert_mean_degree(target: f64, k: u32) -> Result<f64> {
    if !(target > k as f64) || !target.is_finite() {
        return Err(Error::NoRoot(format!(
            "g_{k}(λ) = {target} has no positive root; the target must exceed {k}"
        )));
    }
    // g_k(x) > x and g_k(x) -> k as x -> 0, so the root lies in (0, target).
    let mut lo = 0.0_f64;
    let mut hi = target;
    let g = |x: f64| mean_degree_map(x, k).expect("positive argument");
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    if root <= 0.0 {
        return Err(Error::Numerical(format!("g_{k} inversion collapsed for target {target}")));
    }
    Ok(root)
}

/// `ψ_k(x)`: the share of degree-`k` mass when the truncated-Poisson mean is `x`.
pub fn degree_k_share(x: f64, k: u32) -> Result<f64> {
    if !(x > k as f64) {
        return Err(Error::Domain(format!("ψ_{k} needs x > {k}, got {x}")));
    }
    if k == 0 {
        return Err(Error::Domain("ψ_k needs k >= 1".into()));
    }
    let lambda = invert_mean_degree(x, k)?;
    Ok(poisson_pmf(k as i64 - 1, lambda) / poisson_tail(k - 1, lambda)?)
}
