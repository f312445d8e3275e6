//! Finite-sample rate estimation.

use crate::error::{Error, Result};
use crate::loss::DeviationTable;

/// Ordinary least squares `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Standard error of the slope; NaN with fewer than three points.
    pub slope_se: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return Err(Error::InvalidInput(format!(
            "linear fit needs matching inputs of length >= 2, got {n} and {}",
            y.len()
        )));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidInput("linear fit needs at least two distinct x".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - rss / syy } else { 1.0 };
    let slope_se = if n > 2 { (rss / (nf - 2.0) / sxx).sqrt() } else { f64::NAN };
    Ok(LinearFit { slope, intercept, r_squared, slope_se })
}

/// Fitted rate of a deviation table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    /// Slope of `log(mean sup_dev)` against `log n`.
    pub slope: f64,
    pub intercept: f64,
    /// Slope standard error of the pooled per-trial regression.
    pub slope_se: f64,
    /// `1.96·slope_se`.
    pub band_halfwidth: f64,
    pub distinct_n: usize,
}

/// Least-squares slope of `log(sup_dev)` against `log(n)`, fitted to the
/// per-`n` trial means. Needs at least four distinct `n`.
pub fn estimate_sample_rate(table: &DeviationTable) -> Result<RateEstimate> {
    let means = table.mean_by_n();
    if means.len() < 4 {
        return Err(Error::TooFewRows { need: 4, got: means.len() });
    }
    if table.rows.iter().any(|r| !(r.sup_dev > 0.0) || !r.sup_dev.is_finite()) {
        return Err(Error::InvalidInput("sup_dev values must be positive and finite".into()));
    }
    let x: Vec<f64> = means.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let y: Vec<f64> = means.iter().map(|(_, m)| m.ln()).collect();
    let fit = linear_fit(&x, &y)?;
    let px: Vec<f64> = table.rows.iter().map(|r| (r.n as f64).ln()).collect();
    let py: Vec<f64> = table.rows.iter().map(|r| r.sup_dev.ln()).collect();
    let pooled = linear_fit(&px, &py)?;
    Ok(RateEstimate {
        slope: fit.slope,
        intercept: fit.intercept,
        slope_se: pooled.slope_se,
        band_halfwidth: 1.96 * pooled.slope_se,
        distinct_n: means.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::DeviationRow;

    fn table(f: impl Fn(usize, usize) -> f64, trials: usize) -> DeviationTable {
        let rows = [1000, 10_000, 100_000, 1_000_000]
            .iter()
            .flat_map(|&n| (0..trials).map(move |t| (n, t)))
            .map(|(n, t)| DeviationRow { n, trial: t, sup_dev: f(n, t) })
            .collect();
        DeviationTable { rows }
    }

    #[test]
    fn exact_inverse_sqrt_rate() {
        let r = estimate_sample_rate(&table(|n, _| (n as f64).powf(-0.5), 3)).unwrap();
        assert!((r.slope + 0.5).abs() < 1e-12);
        assert!(r.slope_se.abs() < 1e-12);
    }

    #[test]
    fn constant_table_has_zero_slope() {
        let r = estimate_sample_rate(&table(|_, _| 0.3, 2)).unwrap();
        assert!(r.slope.abs() < 1e-12);
    }

    #[test]
    fn too_few_n_values() {
        let t = DeviationTable { rows: vec![DeviationRow { n: 10, trial: 0, sup_dev: 0.1 }] };
        assert!(matches!(estimate_sample_rate(&t), Err(Error::TooFewRows { need: 4, got: 1 })));
    }

    #[test]
    fn fit_statistics() {
        let f = linear_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-15 && (f.intercept - 1.0).abs() < 1e-15);
        assert!((f.r_squared - 1.0).abs() < 1e-15);
    }
}
