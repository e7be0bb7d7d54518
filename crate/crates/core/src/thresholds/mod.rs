//! Closed-form constants of the random r-uniform hypergraph k-core.
//!
//! The central object is the density function `h(μ) = μ / f_{k-1}(μ)^{r-1}`,
//! where `f_t(μ) = P(Poisson(μ) >= t)`. Its minimum over `μ > 0`, scaled by
//! `(r-1)!`, is the critical density `c_{r,k}` at which a non-empty k-core
//! appears in `H_r(n, p = c / n^{r-1})`. Everything else here (core fractions,
//! the degree profile of the core, the window constants `K1..K3`) is read off
//! the minimizer `μ_{r,k}` or off the larger root `μ(c)` for `c > c_{r,k}`.

mod optimize;
mod special;

pub use optimize::{bisect, golden_section};
pub use special::{
    degree_k_share, invert_mean_degree, mean_degree_map, poisson_pmf, poisson_tail,
    poisson_tail_deriv,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniformity `r` and core order `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelParams {
    pub r: usize,
    pub k: usize,
}

impl ModelParams {
    pub fn new(r: usize, k: usize) -> Result<Self> {
        if r < 2 || k < 2 {
            return Err(Error::Parameter(format!("need r >= 2 and k >= 2, got ({r}, {k})")));
        }
        Ok(ModelParams { r, k })
    }

    /// Rejects `(2, 2)`, for which no threshold constants exist.
    pub fn supported(r: usize, k: usize) -> Result<Self> {
        let p = Self::new(r, k)?;
        if r == 2 && k == 2 {
            return Err(Error::UnsupportedModel { r, k });
        }
        Ok(p)
    }

    fn check_supported(&self) -> Result<()> {
        Self::supported(self.r, self.k).map(|_| ())
    }

    /// `(r-1)!`
    pub fn density_scale(&self) -> f64 {
        (1..self.r).map(|i| i as f64).product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConstants {
    pub r: usize,
    pub k: usize,
    pub c_rk: f64,
    pub mu_rk: f64,
    pub alpha: f64,
    pub beta: f64,
    pub zeta: f64,
    pub p_star: f64,
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "K2")]
    pub k2: f64,
    #[serde(rename = "K3")]
    pub k3: f64,
    /// `e^{-μ} μ / f_1(μ)` at the minimizer; only defined for `k = 2`.
    pub flippable_ratio: Option<f64>,
}

impl ThresholdConstants {
    pub fn params(&self) -> ModelParams {
        ModelParams { r: self.r, k: self.k }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupercriticalPoint {
    pub c: f64,
    pub mu_c: f64,
    pub alpha_c: f64,
    pub beta_c: f64,
}

fn ktail(t: usize, mu: f64) -> f64 {
    poisson_tail(t as u32, mu).expect("mu > 0 checked by caller")
}

/// `h(μ) = μ / f_{k-1}(μ)^{r-1}`.
pub fn h_density(mu: f64, params: ModelParams) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("h needs mu > 0, got {mu}")));
    }
    let f = poisson_tail(params.k as u32 - 1, mu)?;
    Ok(mu / f.powi(params.r as i32 - 1))
}

/// Analytic `h'(μ)`.
pub fn h_density_deriv(mu: f64, params: ModelParams) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("h' needs mu > 0, got {mu}")));
    }
    let r = params.r as i32;
    let f = ktail(params.k - 1, mu);
    let g = poisson_pmf(params.k as i64 - 2, mu);
    Ok(f.powi(1 - r) - (r - 1) as f64 * mu * g * f.powi(-r))
}

/// Analytic `h''(μ)`.
pub fn h_density_second_deriv(mu: f64, params: ModelParams) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("h'' needs mu > 0, got {mu}")));
    }
    let r = params.r as i32;
    let kk = params.k as i64;
    let f = ktail(params.k - 1, mu);
    let g = poisson_pmf(kk - 2, mu);
    let dg = poisson_pmf(kk - 3, mu) - poisson_pmf(kk - 2, mu);
    Ok(-((r - 1) as f64) * f.powi(-r) * (2.0 * g + mu * dg - r as f64 * mu * g * g / f))
}

/// Location of the minimum of `h` for supported `(r, k)`.
fn minimize_h(params: ModelParams) -> Result<f64> {
    let hi = 10.0 * (params.r * params.k) as f64;
    let lo = 1e-3;
    let steps = 4000;
    let h = |mu: f64| h_density(mu, params).unwrap_or(f64::INFINITY);
    let grid = |i: usize| lo + (hi - lo) * i as f64 / steps as f64;
    let (best, _) = (0..=steps)
        .map(|i| (i, h(grid(i))))
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    if best == 0 || best == steps {
        return Err(Error::Numerical(format!(
            "minimizer of h for (r, k) = ({}, {}) sits on the grid boundary at μ = {}",
            params.r,
            params.k,
            grid(best)
        )));
    }
    let (a, b) = (grid(best - 1), grid(best + 1));
    let (mu, _) = golden_section(h, a, b, 1e-12);
    // Polish on the analytic derivative; golden section alone stalls near sqrt(eps).
    let dh = |m: f64| h_density_deriv(m, params).unwrap_or(f64::NAN);
    let width = 1e-6_f64.max(1e-9 * mu);
    let (mut pa, mut pb) = ((mu - width).max(a), (mu + width).min(b));
    if dh(pa).signum() == dh(pb).signum() {
        pa = a;
        pb = b;
    }
    bisect(dh, pa, pb, 1e-15).map_err(|e| {
        Error::Numerical(format!("could not polish the minimizer of h in [{a}, {b}]: {e}"))
    })
}

/// All closed-form constants for `(r, k)`.
pub fn threshold_constants(params: ModelParams) -> Result<ThresholdConstants> {
    params.check_supported()?;
    let (r, k) = (params.r, params.k);
    let mu = minimize_h(params)?;
    let scale = params.density_scale();
    let c_rk = scale * h_density(mu, params)?;

    let f_k = ktail(k, mu);
    let f_km1 = ktail(k - 1, mu);
    let alpha = f_k;
    let beta = mu * f_km1 / r as f64;
    let zeta = mean_degree_map(mu, k as u32)?;
    let p_star = 1.0 / ((r - 1) * (k - 1)) as f64;

    let h2 = h_density_second_deriv(mu, params)?;
    let step = 1e-5;
    let h2_fd = (h_density_deriv(mu + step, params)? - h_density_deriv(mu - step, params)?)
        / (2.0 * step);
    if ((h2 - h2_fd) / h2).abs() > 1e-6 {
        return Err(Error::Numerical(format!(
            "h'' analytic {h2} disagrees with central difference {h2_fd}"
        )));
    }
    // Expansion of c = (r-1)! h(μ) around the minimizer.
    let k1 = (2.0 / (scale * h2)).sqrt();
    let k2 = poisson_tail_deriv(k as u32, mu) * k1;
    let k3 = k1 * (f_km1 + mu * poisson_tail_deriv(k as u32 - 1, mu)) / r as f64;
    for (name, v) in [("K1", k1), ("K2", k2), ("K3", k3)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Numerical(format!("{name} = {v} is not a positive constant")));
        }
    }
    let flippable_ratio = (k == 2).then(|| poisson_pmf(1, mu) / ktail(1, mu));

    Ok(ThresholdConstants {
        r,
        k,
        c_rk,
        mu_rk: mu,
        alpha,
        beta,
        zeta,
        p_star,
        k1,
        k2,
        k3,
        flippable_ratio,
    })
}

/// `p_{r,k}(j)` for `j = 0..=j_max`: the limiting degree distribution of the core.
pub fn core_degree_profile(params: ModelParams, j_max: usize) -> Result<Vec<f64>> {
    let tc = threshold_constants(params)?;
    if j_max < params.k {
        return Err(Error::Parameter(format!("j_max = {j_max} must be at least k = {}", params.k)));
    }
    Ok(truncated_poisson_profile(tc.mu_rk, params.k, j_max))
}

/// `e^{-λ} λ^j / (f_k(λ) j!)` for `j >= k`, zero below `k`.
pub fn truncated_poisson_profile(lambda: f64, k: usize, j_max: usize) -> Vec<f64> {
    let fk = ktail(k, lambda);
    (0..=j_max)
        .map(|j| if j < k { 0.0 } else { poisson_pmf(j as i64, lambda) / fk })
        .collect()
}

/// The larger root `μ(c)` of `(r-1)! h(μ) = c` and the core fractions there.
pub fn supercritical_point(c: f64, params: ModelParams) -> Result<SupercriticalPoint> {
    let tc = threshold_constants(params)?;
    supercritical_point_with(c, &tc)
}

/// As [`supercritical_point`], reusing already computed constants.
pub fn supercritical_point_with(c: f64, tc: &ThresholdConstants) -> Result<SupercriticalPoint> {
    let params = tc.params();
    let scale = params.density_scale();
    if !c.is_finite() || c < tc.c_rk - 1e-12 {
        return Err(Error::Subcritical { c, c_crit: tc.c_rk });
    }
    let mu_c = if c <= tc.c_rk {
        tc.mu_rk
    } else {
        let f = |mu: f64| scale * h_density(mu, params).unwrap_or(f64::INFINITY) - c;
        let mut hi = tc.mu_rk + 1.0;
        while f(hi) < 0.0 {
            hi *= 2.0;
            if hi > 1e9 {
                return Err(Error::Numerical(format!("cannot bracket μ(c) for c = {c}")));
            }
        }
        bisect(f, tc.mu_rk, hi, 1e-15)?
    };
    Ok(SupercriticalPoint {
        c,
        mu_c,
        alpha_c: ktail(params.k, mu_c),
        beta_c: mu_c * ktail(params.k - 1, mu_c) / params.r as f64,
    })
}
