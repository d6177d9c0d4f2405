//! Monte Carlo study machinery: benchmark data generators, the method
//! registry, and the replication runner.

mod methods;
mod models;
mod runner;

pub use methods::{parse_method, resolve_methods, MethodConfig, MethodOptions, Recipe};
pub use models::{ModelId, ModelSpec};
pub use runner::{
    run_cell, table, CellResult, McSummary, ReplicationRecord, TableReport,
    UNRELIABLE_FAILURE_RATE,
};
