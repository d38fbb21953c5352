//! Parameter sweeps, oracle cross-checks and plotting for the `su11mzi`
//! interferometer engine.

pub mod config;
pub mod oracle_check;
pub mod plot;
pub mod sweeps;
pub mod table;

use std::path::Path;

pub use config::{ConfigError, Plan, SweepConfig};
pub use oracle_check::{run_oracle_check, OracleReport};
pub use plot::{render_svg, write_svg, PlotError, PlotSpec};
pub use sweeps::{run_qfi_sweep, run_ratio_sweep, run_sensitivity_curve, SweepError};
pub use table::{Table, TableError};

/// Loads `path` (or the built-in default), applies command-line overrides
/// and validates.
pub fn load_plan(path: Option<&Path>, oracle: bool, cutoff: Option<usize>) -> Result<Plan, ConfigError> {
    let mut cfg = match path {
        Some(p) => SweepConfig::load(p)?,
        None => SweepConfig::default(),
    };
    cfg.oracle |= oracle;
    if cutoff.is_some() {
        cfg.cutoff = cutoff;
    }
    cfg.validate()
}
