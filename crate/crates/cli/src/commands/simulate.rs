//! `simulate`: source fit, self-training on the target, reports.

use super::setup::{stream, SeedSetup, SourceReport};
use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::output::{ensure_dir, write_atomic, write_atomic_with};
use crate::svg::{render, Chart, Series};
use rayon::prelude::*;
use serde::Serialize;
use spurlab_core::distributions::{bayes_accuracy, derive_seed};
use spurlab_core::loss::Surrogate;
use spurlab_core::trainer::{run, Trajectory};
use spurlab_core::Trajectory64;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub gamma: Vec<f64>,
    pub bayes_accuracy: f64,
    pub source: Option<SourceReport>,
    pub steps: usize,
    /// Accuracy on the held-out target test batch (population accuracy for
    /// population gradients).
    pub initial_accuracy: f64,
    pub final_accuracy: f64,
    pub initial_population_accuracy: f64,
    pub final_population_accuracy: f64,
    pub initial_norm_w2: f64,
    pub final_norm_w2: f64,
    pub initial_w2: Vec<f64>,
    pub final_w2: Vec<f64>,
    pub final_w1: Vec<f64>,
    pub final_max_abs_w2: f64,
    pub precondition_violations: usize,
}

impl SeedSummary {
    pub fn new(setup: &SeedSetup, traj: &Trajectory64) -> Self {
        let (w0, wf) = (&setup.w0, traj.final_w());
        SeedSummary {
            seed: setup.seed,
            gamma: setup.target.gamma.clone(),
            bayes_accuracy: bayes_accuracy(&setup.target),
            source: setup.source.clone(),
            steps: traj.steps(),
            initial_accuracy: traj.records[0].accuracy,
            final_accuracy: traj.last().accuracy,
            initial_population_accuracy: setup.population_accuracy(w0),
            final_population_accuracy: setup.population_accuracy(wf),
            initial_norm_w2: w0.norm_w2(),
            final_norm_w2: wf.norm_w2(),
            initial_w2: w0.w2.clone(),
            final_w2: wf.w2.clone(),
            final_w1: wf.w1.clone(),
            final_max_abs_w2: wf.w2.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
            precondition_violations: traj.precondition_violations.len(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateSummary {
    pub command: &'static str,
    pub variant: String,
    pub runs: Vec<SeedSummary>,
}

pub struct SimulateOutcome {
    pub summary: SimulateSummary,
    pub trajectories: Vec<(u64, Trajectory64)>,
}

/// Runs one seed with the configured variant and `surrogate`.
pub fn run_seed(cfg: &ScenarioConfig, setup: &SeedSetup, surrogate: Surrogate) -> Result<Trajectory64, CliError> {
    let tcfg = cfg.trainer_config(derive_seed(setup.seed, stream::NOISE));
    let mut obj = setup.objective(surrogate);
    Ok(run(&setup.w0, &tcfg, obj.as_mut())?)
}

pub fn trajectory_csv(t: &Trajectory<f64>) -> Vec<u8> {
    let mut buf = Vec::new();
    t.write_csv(&mut buf).expect("writing to memory");
    buf
}

fn series(
    trajs: &[(u64, Trajectory64)],
    f: impl Fn(&spurlab_core::trainer::TrajectoryRecord<f64>) -> f64,
) -> Vec<Series> {
    trajs
        .iter()
        .map(|(s, t)| Series::new(format!("seed {s}"), t.records.iter().map(|r| (r.step as f64, f(r))).collect()))
        .collect()
}

pub fn simulate(cfg: &ScenarioConfig, out: &Path) -> Result<SimulateOutcome, CliError> {
    let runs: Vec<(SeedSummary, Trajectory64)> = cfg
        .experiment
        .seeds
        .par_iter()
        .map(|&seed| {
            let setup = SeedSetup::build(cfg, seed)?;
            let traj = run_seed(cfg, &setup, Surrogate::Exp)?;
            Ok((SeedSummary::new(&setup, &traj), traj))
        })
        .collect::<Result<_, CliError>>()?;
    ensure_dir(out)?;
    let (summaries, trajs): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    let trajectories: Vec<(u64, Trajectory64)> = cfg.experiment.seeds.iter().copied().zip(trajs).collect();
    for (seed, t) in &trajectories {
        write_atomic(&out.join(format!("trajectory_{seed}.csv")), &trajectory_csv(t))?;
    }
    let summary = SimulateSummary {
        command: "simulate",
        variant: format!("{:?}", cfg.trainer_config(0).variant),
        runs: summaries,
    };
    write_json(&out.join("summary.json"), &summary)?;
    let charts = [
        Chart {
            title: "Target accuracy".into(),
            x_label: "step".into(),
            y_label: "accuracy".into(),
            series: series(&trajectories, |r| r.accuracy),
            ..Chart::default()
        },
        Chart {
            title: "Spurious weight norm".into(),
            x_label: "step".into(),
            y_label: "||w2||".into(),
            series: series(&trajectories, |r| r.norm_w2),
            ..Chart::default()
        },
    ];
    write_atomic(&out.join("report.svg"), render(&charts).as_bytes())?;
    Ok(SimulateOutcome { summary, trajectories })
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<(), CliError> {
    write_atomic_with(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(std::io::Error::other)?;
        w.write_all(b"\n")
    })
}
