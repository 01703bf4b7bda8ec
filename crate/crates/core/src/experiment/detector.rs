//! Imperfect on-off detector: efficiency `η` modeled as a beam splitter of
//! transmittivity `η` whose other port carries a thermal state of mean
//! `n̄_d` (dark counts), followed by an ideal vacuum/non-vacuum readout.

use num_complex::Complex64;

use super::LaserPairConfig;
use crate::error::{Error, Result};
use crate::fock::{partial_trace_second, tensor_product, vacuum_probability, SingleModeState, Truncation};
use crate::optics::{bessel_i0, build_vbs, BeamSplitterSetting};
use crate::states::thermal_state;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    /// Quantum efficiency `η ∈ [0, 1]`.
    pub efficiency: f64,
    /// Mean photon number `n̄_d` of the thermal dark-count mode.
    pub dark_mean_photons: f64,
    /// Detection window `τ_w`, seconds.
    pub window: f64,
    /// Dead time `τ_d` after each window, seconds.
    pub dead_time: f64,
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self::ideal()
    }
}

impl DetectorModel {
    /// Unit efficiency, no dark counts, instantaneous windows.
    pub fn ideal() -> Self {
        Self { efficiency: 1.0, dark_mean_photons: 0.0, window: 0.0, dead_time: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::InvalidConfig(format!("efficiency must lie in [0, 1], got {}", self.efficiency)));
        }
        for (name, x) in [("dark_mean_photons", self.dark_mean_photons), ("window", self.window), ("dead_time", self.dead_time)] {
            if !(x.is_finite() && x >= 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be finite and >= 0, got {x}")));
            }
        }
        Ok(())
    }

    /// Thermal occupation that reaches the detector, `(1 − η) n̄_d`.
    pub fn thermal_background(&self) -> f64 {
        (1.0 - self.efficiency) * self.dark_mean_photons
    }

    /// Vacuum probability for a coherent state of mean `mean_photons`
    /// arriving at the detector: a displaced thermal state with
    /// displacement `√η γ` and occupation `n = (1 − η) n̄_d`, so
    /// `p₀ = e^{−η|γ|²/(1+n)} / (1 + n)`.
    pub fn vacuum_prob_coherent(&self, mean_photons: f64) -> f64 {
        let g = 1.0 + self.thermal_background();
        (-self.efficiency * mean_photons / g).exp() / g
    }

    pub fn click_prob_coherent(&self, mean_photons: f64) -> f64 {
        1.0 - self.vacuum_prob_coherent(mean_photons)
    }

    /// Setting of the loss beam splitter, `cos²θ = η`.
    fn loss_splitter(&self) -> Result<BeamSplitterSetting> {
        BeamSplitterSetting::from_transmittivity(self.efficiency)
    }
}

/// The state the ideal readout sees: `tr₂[B (ρ ⊗ ρ_th(n̄_d)) B†]` with
/// `cos²θ = η`.
///
/// Both modes are padded to `dim_ρ + dim_th − 1` levels so that every
/// photon-number sector reached by the input is represented exactly; the
/// result lives in that padded space.
pub fn effective_state_at_detector(rho: &SingleModeState, det: &DetectorModel) -> Result<SingleModeState> {
    det.validate()?;
    let tail_tol = rho.trunc().tail_tol();
    let th_trunc = Truncation::for_thermal(det.dark_mean_photons, tail_tol)?;
    let padded = rho.trunc().with_n_max(rho.trunc().n_max() + th_trunc.n_max())?;
    let signal = rho.resized(padded);
    let dark = thermal_state(det.dark_mean_photons, th_trunc)?.resized(padded);
    let joint = tensor_product(&signal, &dark)?;
    let u = build_vbs(det.loss_splitter()?, padded.dim(), padded.dim())?;
    Ok(partial_trace_second(&u.apply(&joint)?))
}

/// `1 − ⟨0|ρ_det|0⟩`.
pub fn click_probability(rho: &SingleModeState, det: &DetectorModel) -> Result<f64> {
    Ok(1.0 - vacuum_probability(&effective_state_at_detector(rho, det)?))
}

/// Click probability behind the VBS for coherent inputs
/// `|√m₁⟩|√m₂ e^{iχ}⟩`.
pub fn click_prob_coherent_pair(lasers: &LaserPairConfig, theta: f64, chi: f64, det: &DetectorModel) -> f64 {
    let (s, c) = theta.sin_cos();
    let gamma = Complex64::new(lasers.mean_photons_1.sqrt() * c, 0.0)
        + Complex64::from_polar(lasers.mean_photons_2.sqrt() * s, chi);
    det.click_prob_coherent(gamma.norm_sqr())
}

/// Click probability behind the VBS for two phase-mixed inputs; the
/// coherent-pair result averaged over `χ`:
/// `1 − e^{−η(m₁c² + m₂s²)/g} I₀(η√(m₁m₂) sin 2θ / g) / g`, `g = 1 + (1−η)n̄_d`.
pub fn click_prob_poisson_pair(lasers: &LaserPairConfig, theta: f64, det: &DetectorModel) -> Result<f64> {
    let (s, c) = theta.sin_cos();
    let g = 1.0 + det.thermal_background();
    let eta = det.efficiency;
    let (m1, m2) = (lasers.mean_photons_1, lasers.mean_photons_2);
    let exponent = -eta * (m1 * c * c + m2 * s * s) / g;
    let bessel = bessel_i0(eta * (m1 * m2).sqrt() * (2.0 * theta).sin() / g)?;
    Ok(1.0 - exponent.exp() * bessel / g)
}
