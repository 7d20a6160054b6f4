//! Exact-arithmetic qutrit circuits: a ternary gate library, a transpiler
//! to postulated native gate sets, an exact state-vector simulator, and a
//! meet-in-the-middle circuit synthesizer.
//!
//! All gate algebra runs over the ring generated by ω = e^(i2π/3), √3 and
//! 1/3, so identities hold by exact equality rather than floating-point
//! tolerance.

pub mod amplitude;
pub mod circuit;
pub mod gates;
pub mod matrix;
pub mod sim;
pub mod synth;
pub mod transpile;

pub use amplitude::ExactAmplitude;
pub use circuit::{Circuit, Control, CostReport, GateApplication, ParseError};
pub use gates::{controlled_matrix, embed_gate, gate_matrix, ControlSpec, GateKind};
pub use matrix::Matrix;
pub use sim::{run, states_equal, CompareMode, RunResult, SimError, StateVector};
pub use synth::{
    aligned_swap_solution, gf3_classical, gf3_target, stage_alignment, stage_maps_from_table2,
    staged_swap_circuit, swap_target, synthesize, synthesize_with_workers, verify_connectivity,
    SearchStats, StageMaps, SynthError, SynthOutcome, SynthesisSpec, GF3_ADD, GF3_MUL,
};
pub use transpile::{
    decompose_controlled, decompose_gate, reset_circuit, reset_cost, verify_decomposition,
    DecomposeError, Mode, Postulate, ResetTechnique, VerifyResult,
};
