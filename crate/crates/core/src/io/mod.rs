//! Field files, run configuration and the command-line operations.

mod afld;
mod commands;
mod config;
mod norm_spec;

pub use afld::{FieldFile, Layout, HEADER_LEN, MAGIC, VERSION};
pub use commands::{
    cmd_check, cmd_decompose, cmd_norms, cmd_run, initial_velocity, replay_monitor, run_config, snapshot_name,
    DecomposeMode, RunOutcome, CSV_NAME, MANIFEST_NAME, QUEUE_DEPTH,
};
pub use config::{InitKind, RunConfig, KEYS};
pub use norm_spec::NormSpec;
