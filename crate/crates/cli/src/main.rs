use clap::{Parser, Subcommand};
use spurlab::{execute, CliError, Command, Options};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "spurlab",
    version,
    about = "Self-training under spurious-feature shift: experiments and verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Scenario config (TOML); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `experiment.output_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Single seed, overriding `experiment.seeds`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Verification suite: all, kernels, lemmas, examples, finite-sample.
    #[arg(long, global = true)]
    suite: Option<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Source fit followed by self-training on the target.
    Simulate,
    /// Numeric checks of the theory.
    Verify,
    /// Entropy minimisation with the exponential and the entropy loss.
    SurrogateCompare,
    /// Sup gradient deviation against sample size.
    Concentration,
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SPURLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("SPURLAB_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cmd = match cli.command {
        Cmd::Simulate => Command::Simulate,
        Cmd::Verify => Command::Verify,
        Cmd::SurrogateCompare => Command::SurrogateCompare,
        Cmd::Concentration => Command::Concentration,
    };
    let opts = Options { config: cli.config, out: cli.out, seed: cli.seed, suite: cli.suite };
    match init_threads().and_then(|_| execute(cmd, &opts)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spurlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
