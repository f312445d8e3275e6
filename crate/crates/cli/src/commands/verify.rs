//! `verify`: runs a check suite and writes the summary and witness dumps.

use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::output::{ensure_dir, write_atomic_with};
use spurlab_core::verify::{run_suite, write_summary, Suite, VerificationReport};
use std::path::Path;

pub fn parse_suite(name: &str) -> Result<Suite, CliError> {
    name.parse().map_err(|e: spurlab_core::Error| CliError::Usage(e.to_string()))
}

/// Runs `suite`; nothing is written unless every check ran to completion.
pub fn verify(cfg: &ScenarioConfig, suite: Suite, seed: u64, out: &Path) -> Result<Vec<VerificationReport>, CliError> {
    let scfg = cfg.suite_config(seed)?;
    let reports = run_suite(suite, &scfg)?;
    ensure_dir(out)?;
    let wdir = out.join("witnesses");
    ensure_dir(&wdir)?;
    for r in &reports {
        write_atomic_with(&wdir.join(format!("{}.csv", r.check_name)), |w| r.write_witness_csv(w))?;
    }
    write_atomic_with(&out.join("verify_summary.csv"), |w| write_summary(&reports, w))?;
    Ok(reports)
}

pub fn failures(reports: &[VerificationReport]) -> usize {
    reports.iter().filter(|r| !r.ok()).count()
}
