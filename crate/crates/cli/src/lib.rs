//! Front end for spurlab: scenario configs, experiment runners and reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;

pub use config::ScenarioConfig;
pub use error::CliError;

use spurlab_core::verify::Suite;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Verify,
    SurrogateCompare,
    Concentration,
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Options {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub suite: Option<String>,
}

/// Loads the config and applies `--out` and `--seed`.
pub fn resolve(opts: &Options) -> Result<ScenarioConfig, CliError> {
    let mut cfg = ScenarioConfig::load_or_default(opts.config.as_deref())?;
    if let Some(out) = &opts.out {
        cfg.experiment.output_dir = out.clone();
    }
    if let Some(seed) = opts.seed {
        cfg.experiment.seeds = vec![seed];
    }
    Ok(cfg)
}

/// Runs `cmd`; `Ok` means exit code 0.
pub fn execute(cmd: Command, opts: &Options) -> Result<(), CliError> {
    let suite = match (&opts.suite, cmd) {
        (Some(s), Command::Verify) => commands::parse_suite(s)?,
        (Some(_), _) => return Err(CliError::Usage("--suite only applies to verify".into())),
        (None, _) => Suite::All,
    };
    let cfg = resolve(opts)?;
    let out = cfg.experiment.output_dir.clone();
    match cmd {
        Command::Simulate => {
            let o = commands::simulate(&cfg, &out)?;
            for r in &o.summary.runs {
                println!(
                    "seed {}: accuracy {:.4} -> {:.4} (bayes {:.4}), |w2| {:.4} -> {:.4}, {} steps",
                    r.seed,
                    r.initial_accuracy,
                    r.final_accuracy,
                    r.bayes_accuracy,
                    r.initial_norm_w2,
                    r.final_norm_w2,
                    r.steps
                );
            }
        }
        Command::SurrogateCompare => {
            let o = commands::surrogate_compare(&cfg, &out)?;
            for p in &o.summary.pairs {
                println!(
                    "seed {}: exp accuracy {:.4} |w2| {:.4}; ent accuracy {:.4} |w2| {:.4}",
                    p.seed, p.exp.final_accuracy, p.exp.final_norm_w2, p.ent.final_accuracy, p.ent.final_norm_w2
                );
            }
            println!(
                "ratio ent/exp on |t| <= {}: min {:.4} at {}, max {:.4} at {}",
                o.summary.ratio_extent,
                o.summary.ratio_min,
                o.summary.ratio_min_at,
                o.summary.ratio_max,
                o.summary.ratio_max_at
            );
        }
        Command::Concentration => {
            let seed = cfg.experiment.seeds[0];
            let o = commands::concentration(&cfg, seed, &out)?;
            println!(
                "slope {:.4} +/- {:.4} (band {:?}, within: {})",
                o.summary.slope, o.summary.band_halfwidth, o.summary.rate_band, o.summary.within_band
            );
        }
        Command::Verify => {
            let seed = opts.seed.unwrap_or(0);
            let reports = commands::verify(&cfg, suite, seed, &out)?;
            for r in &reports {
                println!("{:<28} {}", r.check_name, r.status);
            }
            let failed = commands::failures(&reports);
            if failed > 0 {
                return Err(CliError::CheckFailed(failed));
            }
        }
    }
    Ok(())
}
