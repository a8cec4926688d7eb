//! Scenario files, command dispatch and reports for the `orbifold` tool.

pub mod commands;
pub mod report;
pub mod scenario;

use std::path::{Path, PathBuf};

pub use commands::{run_command, Command, CommandError, Options};
pub use report::{Report, Status};
pub use scenario::{parse_scenario, parse_scenario_with, Scenario, ScenarioError};

/// Accepts a path, a path without the `.scn` extension, or the name of a
/// scenario under `scenarios/` (or `$ORBIFOLD_SCENARIOS`).
pub fn resolve_scenario_path(arg: &Path) -> PathBuf {
    let mut candidates = vec![arg.to_path_buf(), arg.with_extension("scn")];
    let mut dirs = vec![PathBuf::from("scenarios")];
    if let Some(d) = std::env::var_os("ORBIFOLD_SCENARIOS") {
        dirs.insert(0, PathBuf::from(d));
    }
    for d in dirs {
        candidates.push(d.join(arg));
        candidates.push(d.join(arg).with_extension("scn"));
    }
    candidates.into_iter().find(|p| p.is_file()).unwrap_or_else(|| arg.to_path_buf())
}
