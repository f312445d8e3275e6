//! `concentration`: sup gradient deviation against `n` and its log-log slope.

use super::setup::stream;
use super::simulate::write_json;
use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::output::{ensure_dir, write_atomic, write_atomic_with};
use crate::svg::{render, Chart, Series};
use serde::Serialize;
use spurlab_core::distributions::derive_seed;
use spurlab_core::loss::{grad_deviation, random_w_grid, DeviationTable};
use spurlab_core::verify::{estimate_sample_rate, RateEstimate};
use std::path::Path;

/// Distinct sample sizes needed for a slope with a standard error.
pub const MIN_DISTINCT_N: usize = 4;

#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationSummary {
    pub command: &'static str,
    pub seed: u64,
    pub gamma: Vec<f64>,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub w_grid_size: usize,
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub band_halfwidth: f64,
    pub rate_band: [f64; 2],
    pub within_band: bool,
    pub mean_by_n: Vec<(usize, f64)>,
}

pub struct ConcentrationOutcome {
    pub summary: ConcentrationSummary,
    pub table: DeviationTable,
    pub rate: RateEstimate,
}

pub fn concentration(cfg: &ScenarioConfig, seed: u64, out: &Path) -> Result<ConcentrationOutcome, CliError> {
    let c = &cfg.concentration;
    let mut distinct = c.n_values.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < MIN_DISTINCT_N {
        return Err(CliError::Config(format!(
            "concentration.n_values needs at least {MIN_DISTINCT_N} distinct sizes, got {}",
            distinct.len()
        )));
    }
    let gamma = cfg.gamma(derive_seed(seed, stream::GAMMA));
    let spec = cfg.target_spec(gamma.clone())?;
    let (d1, d2) = (cfg.distribution.d1, cfg.distribution.d2);
    let grid = random_w_grid(d1, d2, cfg.trainer.radius, c.w_grid_size, derive_seed(seed, stream::W_GRID));
    let table = grad_deviation(&spec, &c.n_values, c.trials, &grid, seed)?;
    let rate = estimate_sample_rate(&table)?;
    let means = table.mean_by_n();
    ensure_dir(out)?;
    write_atomic_with(&out.join("deviation.csv"), |w| table.write_csv(w))?;
    write_atomic_with(&out.join("deviation_fit.csv"), |w| {
        writeln!(w, "n,mean_sup_dev,fitted")?;
        for &(n, m) in &means {
            let fit = (rate.intercept + rate.slope * (n as f64).ln()).exp();
            writeln!(w, "{n},{m:.16e},{fit:.16e}")?;
        }
        Ok(())
    })?;
    let summary = ConcentrationSummary {
        command: "concentration",
        seed,
        gamma,
        n_values: c.n_values.clone(),
        trials: c.trials,
        w_grid_size: c.w_grid_size,
        slope: rate.slope,
        intercept: rate.intercept,
        slope_se: rate.slope_se,
        band_halfwidth: rate.band_halfwidth,
        rate_band: c.rate_band,
        within_band: rate.slope >= c.rate_band[0] && rate.slope <= c.rate_band[1],
        mean_by_n: means.clone(),
    };
    write_json(&out.join("summary.json"), &summary)?;
    let fitted: Vec<(f64, f64)> =
        means.iter().map(|&(n, _)| (n as f64, (rate.intercept + rate.slope * (n as f64).ln()).exp())).collect();
    let chart = Chart {
        title: "Sup gradient deviation".into(),
        x_label: "n".into(),
        y_label: "mean sup deviation".into(),
        series: vec![
            Series::new("mean over trials", means.iter().map(|&(n, m)| (n as f64, m)).collect()),
            Series::new("fit", fitted).dashed(),
        ],
        log_x: true,
        log_y: true,
        annotation: Some(format!("slope = {:.4} +/- {:.4}", rate.slope, rate.band_halfwidth)),
    };
    write_atomic(&out.join("report.svg"), render(&[chart]).as_bytes())?;
    Ok(ConcentrationOutcome { summary, table, rate })
}
