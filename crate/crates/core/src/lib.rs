//! Simulation of a variable beam splitter (VBS) fed by two coherent or two
//! phase-mixed (Poisson) light sources, read out by an on-off detector.
//!
//! * [`fock`] – truncated single- and two-mode density matrices.
//! * [`states`] – coherent, Poisson and thermal states.
//! * [`optics`] – the VBS unitary, closed-form vacuum probabilities and their
//!   brute-force oracles.
//! * [`experiment`] – detector model, Monte-Carlo θ sweeps and curve
//!   classification.
//! * [`verify`] – the self-check suite behind `vbsim verify`.

pub mod error;
pub mod experiment;
pub mod fock;
pub mod optics;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use fock::{
    partial_trace_second, tensor_product, vacuum_probability, SingleModeState, Truncation, TwoModeState,
    DEFAULT_TAIL_TOL,
};
pub use optics::{apply_vbs, build_vbs, BeamSplitterSetting, TwoModeUnitary};
pub use states::{coherent_density, coherent_pure, poisson_state, thermal_state, ComplexAmplitude};
