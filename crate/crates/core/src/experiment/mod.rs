//! Monte-Carlo model of the two-laser test: drifting relative phase, an
//! imperfect on-off detector, Bernoulli sampling over a θ sweep, and
//! classification of the resulting click-rate curve.

mod classify;
mod detector;
mod sweep;

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::states::{normalize_angle, ComplexAmplitude};

pub use classify::{classify_curve, Classification, CoherentFit, PoissonFit, Verdict, DECISION_MARGIN};
pub use detector::{
    click_probability, click_prob_coherent_pair, click_prob_poisson_pair, effective_state_at_detector, DetectorModel,
};
pub use sweep::{run_sweep, window_click_prob, SweepRecord, TrialPlan};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// What the two lasers emit as seen by the detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    /// Pure coherent states with a well-defined relative phase.
    Coherent,
    /// Phase-mixed coherent states (diagonal Poisson mixtures).
    Poisson,
}

/// How the relative phase `χ` of a coherent pair evolves between trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftMode {
    /// Independent uniform `χ` for every trial.
    Fast,
    /// `χ = χ₀` throughout.
    Frozen,
    /// `χ(t) = χ₀ − Δω t`, with trials spaced by window plus dead time.
    Clock,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserPairConfig {
    /// `|α|²`
    pub mean_photons_1: f64,
    /// `|β|²`
    pub mean_photons_2: f64,
    /// Wavelength of laser 1, meters.
    pub lambda_1: f64,
    /// Wavelength of laser 2, meters.
    pub lambda_2: f64,
    /// Relative phase at `t = 0`, radians.
    pub chi_0: f64,
    pub source_kind: SourceKind,
}

impl LaserPairConfig {
    /// Equal-intensity pair at a common wavelength.
    pub fn balanced(mean_photons: f64, lambda: f64, source_kind: SourceKind) -> Self {
        Self {
            mean_photons_1: mean_photons,
            mean_photons_2: mean_photons,
            lambda_1: lambda,
            lambda_2: lambda,
            chi_0: 0.0,
            source_kind,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, m) in [("mean_photons_1", self.mean_photons_1), ("mean_photons_2", self.mean_photons_2)] {
            if !(m.is_finite() && m >= 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be finite and >= 0, got {m}")));
            }
        }
        for (name, l) in [("lambda_1", self.lambda_1), ("lambda_2", self.lambda_2)] {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be finite and > 0, got {l}")));
            }
        }
        if !self.chi_0.is_finite() {
            return Err(Error::InvalidConfig(format!("chi_0 must be finite, got {}", self.chi_0)));
        }
        Ok(())
    }

    /// `ω₂ − ω₁`, rad/s.
    pub fn omega_diff(&self) -> Result<f64> {
        angular_freq_diff(self.lambda_1, self.lambda_2)
    }
}

/// `ω₂ − ω₁ = 2πc(1/λ₂ − 1/λ₁)`.
pub fn angular_freq_diff(lambda_1: f64, lambda_2: f64) -> Result<f64> {
    if !(lambda_1 > 0.0 && lambda_2 > 0.0 && lambda_1.is_finite() && lambda_2.is_finite()) {
        return Err(Error::InvalidParameter(format!("wavelengths must be finite and > 0, got {lambda_1}, {lambda_2}")));
    }
    // (λ₁ − λ₂)/(λ₁λ₂) avoids cancelling two nearly equal reciprocals
    Ok(TAU * SPEED_OF_LIGHT * (lambda_1 - lambda_2) / (lambda_1 * lambda_2))
}

/// Fraction of a full `2π` cycle that `χ` advances during `duration`.
pub fn phase_change_periods(lambda_1: f64, lambda_2: f64, duration: f64) -> Result<f64> {
    Ok((angular_freq_diff(lambda_1, lambda_2)? * duration).abs() / TAU)
}

/// `χ(t) = χ₀ − (ω₂ − ω₁)t`, reduced to `[0, 2π)`.
pub fn chi_of_t(config: &LaserPairConfig, t: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time must be finite and >= 0, got {t}")));
    }
    let advance = (config.omega_diff()? * t).rem_euclid(TAU);
    Ok(normalize_angle(config.chi_0 - advance))
}

/// Free evolution `|α⟩ → e^{−iωt/2}|αe^{−iωt}⟩`. Returns the evolved
/// amplitude and the global phase `−ωt/2` (reduced to `[0, 2π)`).
pub fn coherent_time_evolution(alpha: ComplexAmplitude, omega: f64, t: f64) -> Result<(ComplexAmplitude, f64)> {
    if !(omega >= 0.0 && omega.is_finite() && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("need finite omega >= 0 and finite t, got {omega}, {t}")));
    }
    let wt = (omega * t).rem_euclid(TAU);
    let evolved = ComplexAmplitude::new(alpha.magnitude(), alpha.phase() - wt)?;
    Ok((evolved, normalize_angle(-0.5 * wt)))
}
