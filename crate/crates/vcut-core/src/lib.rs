//! Small vertex cuts in the CONGEST model: a synchronous round simulator, exact
//! sequential oracles, distributed primitives and the distributed cut search.

pub mod distributed;
pub mod generate;
pub mod graph;
pub mod oracle;
pub mod primitives;
pub mod sim;
pub mod verdict;

pub use graph::{Graph, GraphError, GraphStats};
pub use verdict::CutVerdict;
