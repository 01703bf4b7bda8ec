//! Brute-force vacuum probabilities: build the input state in a truncated
//! Fock space, apply the VBS unitary, trace out the second port and read
//! `⟨0|ρ|0⟩`. These are the oracles for every closed form in this module.
//!
//! Both modes share a cutoff chosen so that a Poisson distribution with the
//! *total* input mean leaks less than `tail_tol`. Every output sector that
//! touches the vacuum of the first mode is then complete.

use std::f64::consts::FRAC_PI_4;

use crate::error::Result;
use crate::fock::{partial_trace_second, tensor_product, vacuum_probability, SingleModeState, Truncation, TwoModeState};
use crate::states::{coherent_density, poisson_state, ComplexAmplitude};

use super::vbs::{apply_vbs, build_vbs};
use super::BeamSplitterSetting;

/// Shared cutoff for a two-mode input of total mean `total_mean`.
pub fn pair_truncation(total_mean: f64, tail_tol: f64) -> Result<Truncation> {
    Truncation::for_mean(total_mean, tail_tol)
}

/// First-port vacuum probability of `B_θ ρ B_θ†`.
pub fn output_vacuum_prob(rho: &TwoModeState, theta: f64) -> Result<f64> {
    let out = apply_vbs(BeamSplitterSetting::new(theta)?, rho)?;
    Ok(vacuum_probability(&partial_trace_second(&out)))
}

pub fn coherent_pair_input(alpha: ComplexAmplitude, beta: ComplexAmplitude, tail_tol: f64) -> Result<TwoModeState> {
    let t = pair_truncation(alpha.mean_photons() + beta.mean_photons(), tail_tol)?;
    tensor_product(&coherent_density(alpha, t)?, &coherent_density(beta, t)?)
}

pub fn poisson_pair_input(mag_alpha: f64, mag_beta: f64, tail_tol: f64) -> Result<TwoModeState> {
    let (ma, mb) = (mag_alpha * mag_alpha, mag_beta * mag_beta);
    let t = pair_truncation(ma + mb, tail_tol)?;
    tensor_product(&poisson_state(ma, t)?, &poisson_state(mb, t)?)
}

/// `B_{π/4}(ρ_P(|α|²) ⊗ |0⟩⟨0|)B_{π/4}†`: one phase-mixed laser split in two.
pub fn split_poisson_input(mean_photons: f64, tail_tol: f64) -> Result<TwoModeState> {
    let t = pair_truncation(mean_photons, tail_tol)?;
    let input = tensor_product(&poisson_state(mean_photons, t)?, &SingleModeState::vacuum(t))?;
    build_vbs(BeamSplitterSetting::new(FRAC_PI_4)?, t.dim(), t.dim())?.apply(&input)
}

pub fn coherent_vacuum_prob(alpha: ComplexAmplitude, beta: ComplexAmplitude, theta: f64, tail_tol: f64) -> Result<f64> {
    output_vacuum_prob(&coherent_pair_input(alpha, beta, tail_tol)?, theta)
}

pub fn poisson_vacuum_prob(mag_alpha: f64, mag_beta: f64, theta: f64, tail_tol: f64) -> Result<f64> {
    output_vacuum_prob(&poisson_pair_input(mag_alpha, mag_beta, tail_tol)?, theta)
}

/// Equal-magnitude coherent inputs `|α⟩|αe^{iχ}⟩`.
pub fn coherent_phase_vacuum_prob(mean_photons: f64, chi: f64, theta: f64, tail_tol: f64) -> Result<f64> {
    let alpha = ComplexAmplitude::from_mean_photons(mean_photons, 0.0)?;
    let beta = ComplexAmplitude::from_mean_photons(mean_photons, chi)?;
    coherent_vacuum_prob(alpha, beta, theta, tail_tol)
}

pub fn split_poisson_vacuum_prob(mean_photons: f64, theta: f64, tail_tol: f64) -> Result<f64> {
    output_vacuum_prob(&split_poisson_input(mean_photons, tail_tol)?, theta)
}
