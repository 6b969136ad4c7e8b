//! Synthesis, verification, and resource estimation for the controlled
//! modular adder `|x⟩|b⟩ → |x⟩|b + a·x mod N⟩` built on an in-place
//! carry-lookahead adder.
//!
//! The pipeline is:
//!
//! 1. [`modadd::synth_modadd`] builds the block-level circuit for a
//!    validated [`modadd::Instance`]: a leading controlled comparator, a
//!    doubly controlled adder with an embedded classical constant, and a
//!    trailing controlled comparator that restores the comparison flag.
//! 2. [`strategy::lower_blocks`] assigns each logical Toffoli a
//!    decomposition under a named [`strategy::Strategy`] — standard
//!    Clifford+T, relative-phase forms, pebbled pairs sharing pooled
//!    ancillas, or carries parked on idle register wires — with every
//!    placement checked against the phase-safety rules in [`decomp`].
//! 3. [`strategy::lower`] expands the result to primitive gates, either
//!    with unitary uncomputation or with the measurement-assisted pattern
//!    (measure in the X basis, then a classically conditioned CZ).
//! 4. [`sim`] replays circuits on basis states — a monomial tracker for
//!    block-level circuits and a sparse statevector for primitive ones —
//!    and [`sim::verify_functional`] checks the modular-sum contract over
//!    exhaustive or sampled inputs.
//! 5. [`resource`] produces counts, depths, KQ figures, per-round
//!    breakdowns, T-gate scheduling under a throughput cap, and the
//!    closed-form models used to size the magic-state supply.
//! 6. [`qasm`] serializes circuits as a QASM-2.0 subset that round-trips
//!    exactly.
//!
//! Circuits on `n`-bit registers use `4n + 2` wires — control, constant,
//! accumulator, carries, propagate scratch, and a comparison flag — plus
//! whatever ancillas the chosen strategy pools.

pub mod cla;
pub mod decomp;
pub mod error;
pub mod ir;
pub mod modadd;
pub mod qasm;
pub mod resource;
pub mod sim;
pub mod strategy;

pub use error::{Error, Result};
pub use ir::{Block, BlockKind, Circuit, Metric, RoundLabel, Segment, Variant};
pub use modadd::Instance;
pub use strategy::Strategy;
