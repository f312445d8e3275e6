//! `surrogate-compare`: entropy minimisation with `ℓ_exp` and with `ℓ_ent`
//! on identical data.

use super::setup::SeedSetup;
use super::simulate::{run_seed, trajectory_csv, write_json, SeedSummary};
use crate::config::{ScenarioConfig, SourceName, VariantName};
use crate::error::CliError;
use crate::output::{ensure_dir, write_atomic, write_atomic_with};
use crate::svg::{render, Chart, Series};
use rayon::prelude::*;
use serde::Serialize;
use spurlab_core::kernels::smoothed::{loss_ent, loss_exp};
use spurlab_core::loss::Surrogate;
use spurlab_core::verify::surrogate_ratio_table;
use spurlab_core::Trajectory64;
use std::path::Path;

pub const RATIO_EXTENT: f64 = 10.0;
pub const RATIO_STEP: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct PairSummary {
    pub seed: u64,
    pub exp: SeedSummary,
    pub ent: SeedSummary,
    pub final_accuracy_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareSummary {
    pub command: &'static str,
    pub pairs: Vec<PairSummary>,
    pub ratio_extent: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_min_at: f64,
    pub ratio_max_at: f64,
}

pub struct CompareOutcome {
    pub summary: CompareSummary,
    pub exp: Vec<Trajectory64>,
    pub ent: Vec<Trajectory64>,
    pub ratio: Vec<(f64, f64)>,
}

pub fn surrogate_compare(cfg: &ScenarioConfig, out: &Path) -> Result<CompareOutcome, CliError> {
    if cfg.trainer.gradient_source != SourceName::Empirical {
        return Err(CliError::Config("surrogate-compare needs gradient_source = \"empirical\"".into()));
    }
    let mut cfg = cfg.clone();
    cfg.trainer.variant = VariantName::EntropyMin;
    let cfg = &cfg;
    let runs: Vec<(PairSummary, Trajectory64, Trajectory64)> = cfg
        .experiment
        .seeds
        .par_iter()
        .map(|&seed| {
            let setup = SeedSetup::build(cfg, seed)?;
            let a = run_seed(cfg, &setup, Surrogate::Exp)?;
            let b = run_seed(cfg, &setup, Surrogate::Ent)?;
            let (exp, ent) = (SeedSummary::new(&setup, &a), SeedSummary::new(&setup, &b));
            let gap = (exp.final_accuracy - ent.final_accuracy).abs();
            Ok((PairSummary { seed, exp, ent, final_accuracy_gap: gap }, a, b))
        })
        .collect::<Result<_, CliError>>()?;
    let ratio = surrogate_ratio_table(RATIO_EXTENT, RATIO_STEP);
    let (lo, hi) = ratio.iter().fold(((0.0, f64::INFINITY), (0.0, f64::NEG_INFINITY)), |(lo, hi), &(t, r)| {
        (if r < lo.1 { (t, r) } else { lo }, if r > hi.1 { (t, r) } else { hi })
    });
    ensure_dir(out)?;
    let mut pairs = Vec::new();
    let (mut exp, mut ent) = (Vec::new(), Vec::new());
    for (p, a, b) in runs {
        write_atomic(&out.join(format!("trajectory_exp_{}.csv", p.seed)), &trajectory_csv(&a))?;
        write_atomic(&out.join(format!("trajectory_ent_{}.csv", p.seed)), &trajectory_csv(&b))?;
        pairs.push(p);
        exp.push(a);
        ent.push(b);
    }
    write_atomic_with(&out.join("ratio_table.csv"), |w| {
        writeln!(w, "t,loss_ent,loss_exp,ratio")?;
        for &(t, r) in &ratio {
            writeln!(w, "{t:.16e},{:.16e},{:.16e},{r:.16e}", loss_ent(t), loss_exp(t))?;
        }
        Ok(())
    })?;
    let summary = CompareSummary {
        command: "surrogate-compare",
        pairs,
        ratio_extent: RATIO_EXTENT,
        ratio_min: lo.1,
        ratio_max: hi.1,
        ratio_min_at: lo.0,
        ratio_max_at: hi.0,
    };
    write_json(&out.join("summary.json"), &summary)?;
    let pair_series = |f: fn(&spurlab_core::trainer::TrajectoryRecord<f64>) -> f64| {
        let mut v = Vec::new();
        for (p, (a, b)) in summary.pairs.iter().zip(exp.iter().zip(&ent)) {
            let pts = |t: &Trajectory64| t.records.iter().map(|r| (r.step as f64, f(r))).collect();
            v.push(Series::new(format!("exp seed {}", p.seed), pts(a)));
            v.push(Series::new(format!("ent seed {}", p.seed), pts(b)).dashed());
        }
        v
    };
    let charts = [
        Chart {
            title: "Target accuracy".into(),
            x_label: "step".into(),
            y_label: "accuracy".into(),
            series: pair_series(|r| r.accuracy),
            ..Chart::default()
        },
        Chart {
            title: "Spurious weight norm".into(),
            x_label: "step".into(),
            y_label: "||w2||".into(),
            series: pair_series(|r| r.norm_w2),
            ..Chart::default()
        },
        Chart {
            title: "Loss ratio ent/exp".into(),
            x_label: "t".into(),
            y_label: "ratio".into(),
            series: vec![Series::new("ratio", ratio.clone())],
            ..Chart::default()
        },
    ];
    write_atomic(&out.join("report.svg"), render(&charts).as_bytes())?;
    Ok(CompareOutcome { summary, exp, ent, ratio })
}
