//! Synchronous CONGEST simulator.

mod engine;
mod message;
mod trace;

pub use engine::{
    node_seed, run_sync, NodeFault, NodeProgram, NodeView, Outbox, RunMetrics, RunResult,
    SimConfig, SimError, Simulation, Status,
};
pub use message::{
    bits_for, id_bits, measure_bits, Field, Message, MessageReader, MessageWriter, WireError,
};
pub use trace::{dump_trace, trace_hash, TraceEntry, TraceHasher, EMPTY_TRACE_HASH};
