//! File formats, synthetic costs and query workloads.

mod costs;
mod dimacs;
mod prep;
mod workload;

use thiserror::Error;

pub use costs::{
    haversine_meters, read_costs, synthesize_costs, write_costs_binary, write_costs_text,
    CostMode, CostTable,
};
pub use dimacs::{parse_dimacs, read_dimacs, write_dimacs, write_dimacs_coords};
pub use prep::{load_prep, read_prep, save_prep, write_prep, PREP_MAGIC, PREP_VERSION};
pub use workload::{Query, Workload};

use crate::cost::CostError;
use crate::graph::GraphError;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cost(#[from] CostError),
}

pub(crate) fn parse_error<T>(line: usize, msg: impl Into<String>) -> Result<T, IoError> {
    Err(IoError::Parse {
        line,
        msg: msg.into(),
    })
}

/// Bytes of an adjacency array with `n` nodes, `m` arcs and `k` cost
/// components, all stored as 32-bit integers: `4((n+1) + (k+1)m)`.
pub fn memory_estimate(n: u64, m: u64, k: u64) -> u64 {
    4 * ((n + 1) + (k + 1) * m)
}
