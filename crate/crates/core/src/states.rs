//! Input-state constructors: coherent (pure and density), Poisson
//! (phase-mixed coherent), thermal and vacuum, plus an independent
//! displacement-operator route to the coherent state.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{check_mean, poisson_weights, SingleModeState, Truncation, ZERO};

/// Coherent parameter `α = |α| e^{iφ}` with `φ` kept in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexAmplitude {
    magnitude: f64,
    phase: f64,
}

/// Wrap an angle into `[0, 2π)`.
pub fn normalize_angle(phase: f64) -> f64 {
    let r = phase.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl ComplexAmplitude {
    pub const ZERO: Self = Self { magnitude: 0.0, phase: 0.0 };

    pub fn new(magnitude: f64, phase: f64) -> Result<Self> {
        if !(magnitude.is_finite() && magnitude >= 0.0) {
            return Err(Error::InvalidParameter(format!("amplitude magnitude must be finite and >= 0, got {magnitude}")));
        }
        if !phase.is_finite() {
            return Err(Error::InvalidParameter(format!("phase must be finite, got {phase}")));
        }
        Ok(Self { magnitude, phase: normalize_angle(phase) })
    }

    /// Amplitude with `|α|² = mean`.
    pub fn from_mean_photons(mean: f64, phase: f64) -> Result<Self> {
        check_mean(mean)?;
        Self::new(mean.sqrt(), phase)
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.norm(), if z.norm() == 0.0 { 0.0 } else { z.arg() })
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn mean_photons(&self) -> f64 {
        self.magnitude * self.magnitude
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.phase)
    }
}

/// Pure state of one mode in the truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeVector {
    amplitudes: DVector<Complex64>,
    trunc: Truncation,
}

impl ModeVector {
    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn get(&self, n: usize) -> Complex64 {
        self.amplitudes[n]
    }

    pub fn trunc(&self) -> Truncation {
        self.trunc
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨ψ| a†a |ψ⟩`.
    pub fn number_expectation(&self) -> f64 {
        self.amplitudes.iter().enumerate().map(|(n, z)| n as f64 * z.norm_sqr()).sum()
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> SingleModeState {
        let entries = &self.amplitudes * self.amplitudes.adjoint();
        SingleModeState::from_matrix(entries, self.trunc).expect("outer product has the truncation's shape")
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amplitudes.iter().zip(other.amplitudes.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }
}

/// `|α⟩ = e^{−|α|²/2} Σ αⁿ/√n! |n⟩`.
///
/// Magnitudes are the square roots of the Poisson weights, so the
/// populations of `|α⟩⟨α|` and of the phase-mixed state agree to rounding.
pub fn coherent_pure(alpha: ComplexAmplitude, trunc: Truncation) -> Result<ModeVector> {
    trunc.require_poisson(alpha.mean_photons())?;
    let weights = poisson_weights(alpha.mean_photons(), trunc.n_max());
    let phase = alpha.phase();
    let amplitudes = DVector::from_fn(trunc.dim(), |n, _| Complex64::from_polar(weights[n].sqrt(), n as f64 * phase));
    Ok(ModeVector { amplitudes, trunc })
}

/// `ρ_α = |α⟩⟨α|`.
pub fn coherent_density(alpha: ComplexAmplitude, trunc: Truncation) -> Result<SingleModeState> {
    Ok(coherent_pure(alpha, trunc)?.to_density())
}

/// Fully phase-mixed coherent state: diagonal with Poisson weights.
pub fn poisson_state(mean_photons: f64, trunc: Truncation) -> Result<SingleModeState> {
    check_mean(mean_photons)?;
    trunc.require_poisson(mean_photons)?;
    Ok(SingleModeState::from_diagonal(&poisson_weights(mean_photons, trunc.n_max()), trunc))
}

/// Bose-Einstein state with weights `n̄ⁿ/(1+n̄)^{n+1}`.
pub fn thermal_state(mean_photons: f64, trunc: Truncation) -> Result<SingleModeState> {
    check_mean(mean_photons)?;
    trunc.require_thermal(mean_photons)?;
    let ratio = mean_photons / (1.0 + mean_photons);
    let mut w = 1.0 / (1.0 + mean_photons);
    let weights: Vec<f64> = (0..trunc.dim())
        .map(|_| {
            let out = w;
            w *= ratio;
            out
        })
        .collect();
    Ok(SingleModeState::from_diagonal(&weights, trunc))
}

/// Coherent state obtained as `exp(α a† − α* a)|0⟩` by dense matrix
/// exponentiation.
///
/// The ladder operators are represented on a working space twice the size
/// of `trunc` so that the edge distortion of the truncated generator stays
/// far away from the retained levels.
pub fn displacement_oracle(alpha: ComplexAmplitude, trunc: Truncation) -> Result<ModeVector> {
    trunc.require_poisson(alpha.mean_photons())?;
    let work = 2 * trunc.dim() + 16;
    let a = alpha.to_complex();
    let mut gen = DMatrix::from_element(work, work, ZERO);
    for n in 1..work {
        let s = (n as f64).sqrt();
        // a†|n-1⟩ = √n |n⟩ and a|n⟩ = √n |n-1⟩
        gen[(n, n - 1)] = a * s;
        gen[(n - 1, n)] = -a.conj() * s;
    }
    let disp = gen.exp();
    let amplitudes = DVector::from_fn(trunc.dim(), |n, _| disp[(n, 0)]);
    Ok(ModeVector { amplitudes, trunc })
}
