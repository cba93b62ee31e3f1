//! Walk simulation engines: the direct recursive algorithms, the
//! genealogical-forest construction, record replay, binary traces, and the
//! parallel Monte Carlo driver.

pub mod genealogy;
pub mod monte_carlo;
pub mod replay;
pub mod trace;
pub mod walk;

pub use genealogy::{simulate_with_genealogy, GenealogyForest, GenealogyTree};
pub use monte_carlo::{
    monte_carlo, parallel_replicas, parallel_replicas_offset, CheckpointSummary, MonteCarloResult,
};
pub use replay::replay;
pub use trace::{read_trace, write_trace, TRACE_MAGIC, TRACE_VERSION};
pub use walk::{
    simulate, simulate_negative, simulate_positive, PathResult, StepChoice, StepRecord,
};
