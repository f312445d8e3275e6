pub mod concentration;
pub mod setup;
pub mod simulate;
pub mod surrogate;
pub mod verify;

pub use concentration::{concentration, ConcentrationOutcome, ConcentrationSummary};
pub use setup::SeedSetup;
pub use simulate::{simulate, SeedSummary, SimulateOutcome, SimulateSummary};
pub use surrogate::{surrogate_compare, CompareOutcome, CompareSummary, PairSummary};
pub use verify::{failures, parse_suite, verify};
