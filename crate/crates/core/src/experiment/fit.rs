use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub stderr: f64,
    pub r2: f64,
}

/// Least squares of `log y` on `log n`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerFit> {
    if points.len() < 3 {
        return Err(Error::Parameter(format!("need at least 3 points, got {}", points.len())));
    }
    if let Some(&(n, y)) = points.iter().find(|&&(n, y)| !(n > 0.0 && y > 0.0)) {
        return Err(Error::Domain(format!("nonpositive point ({n}, {y})")));
    }
    let m = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(n, y)| (n.ln(), y.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("all n equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let sst: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    Ok(PowerFit {
        exponent: slope,
        stderr: (ssr / (m - 2.0) / sxx).sqrt(),
        r2: if sst > 0.0 { 1.0 - ssr / sst } else { 1.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: [f64; 4] = [1e4, 3e4, 1e5, 3e5];

    #[test]
    fn identity_and_constant() {
        let f = fit_power_law(&GRID.map(|n| (n, n))).unwrap();
        assert!((f.exponent - 1.0).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
        let f = fit_power_law(&GRID.map(|n| (n, 7.0))).unwrap();
        assert!(f.exponent.abs() < 1e-12);
    }

    #[test]
    fn log_factor_inflates_slope() {
        let f = fit_power_law(&GRID.map(|n| (n, n.powf(0.15) * n.ln()))).unwrap();
        assert!((0.15..=0.27).contains(&f.exponent), "{}", f.exponent);
    }

    #[test]
    fn errors() {
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
    }
}
