// SPDX-License-Identifier: Apache-2.0
//! Bit-accurate software model of a p-bit probabilistic-computing
//! accelerator for graph max-cut.
//!
//! The crate covers the datapath arithmetic ([`fixedpoint`]), the LFSR noise
//! source ([`rng`]), the activation variants ([`activation`]), the max-cut
//! model and G-Set ingestion ([`problem`]), the sequential and k-way
//! speculate-and-select sampling core ([`engine`]) and the accelerator's
//! instruction, memory and timing bookkeeping ([`hwmodel`]).

pub mod activation;
pub mod engine;
pub mod fixedpoint;
pub mod hwmodel;
pub mod problem;
pub mod rng;

pub use activation::{Activation, ActivationKind};
pub use engine::{run_trial, AnnealSchedule, EngineConfig, EngineError, InitialState, TrialResult};
pub use fixedpoint::{FixedQ, QFormat};
pub use problem::{parse_gset, BestKnownRegistry, CouplingMatrix, MaxCutProblem, SpinState};
pub use rng::{Lfsr21, RngBank, SeedBlock};
