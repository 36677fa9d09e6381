//! Minimum cycle decompositions for Eulerian multigraphs of treewidth at
//! most two whose node degrees are all 2 or 4 ("double ear decomposable"
//! graphs).
//!
//! The crate provides:
//! - [`graph`]: a multigraph with loops and parallel edges, plus the
//!   elementary subdivide/resolve transformations and a text format.
//! - [`reduce`]: the linear-time reduction engine computing the cycle
//!   number `c(G)` together with a replayable trace.
//! - [`construct`]: forward construction of double ear decomposable
//!   graphs, random instance generation, and lifting a trace into an
//!   explicit cycle decomposition or construction script.
//! - [`recognize`]: an independent membership test (degree filter plus
//!   series-parallel reduction per component).
//! - [`oracle`]: brute-force minimum cycle decomposition for small
//!   instances, used as ground truth in tests.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod construct;
pub mod graph;
pub mod oracle;
pub mod recognize;
pub mod reduce;

mod slotlist;

pub use construct::{
    apply_script, ear_script_from_trace, lift_cycles, random_script, validate_decomposition,
    CycleDecomposition, EarScript, ScriptStep,
};
pub use graph::{parse_graph, EdgeId, Multigraph, NodeId, ParseError};
pub use oracle::{brute_force_c, for_each_even_multigraph, OracleError, OracleResult};
pub use recognize::{
    degrees_in_2_4, is_double_ear_decomposable, treewidth_at_most_2, RecognitionReport,
};
pub use reduce::{
    cycle_number, init_state, run, run_with_policy, ChoicePolicy, DecompositionResult,
    ReductionStep, ReductionTrace, WorkState,
};
