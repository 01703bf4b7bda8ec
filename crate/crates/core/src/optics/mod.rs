//! Variable beam splitter (VBS) optics.
//!
//! Closed-form vacuum probabilities of one VBS output port for coherent,
//! Poisson and split-beam inputs, each paired with a brute-force route
//! through the truncated Fock space (see [`brute`]).

mod bessel;
pub mod brute;
mod dd;
mod direct;
mod vbs;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::ComplexAmplitude;

pub use bessel::{bessel_i0, check_bessel_identities, BesselIdentityCheck, BESSEL_I0_LIMIT};
pub use direct::{poisson_output_direct, reduced_state_after_5050, SplitReduction};
pub use vbs::{apply_vbs, build_vbs, TwoModeUnitary, VbsBlock};

/// Default number of nodes for phase-averaging quadrature.
pub const DEFAULT_PHASE_POINTS: usize = 1024;

/// VBS angle `θ` in radians; transmittivity `T = cos²θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterSetting {
    theta: f64,
}

impl BeamSplitterSetting {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidParameter(format!("VBS angle must be finite, got {theta}")));
        }
        Ok(Self { theta })
    }

    pub fn from_degrees(deg: f64) -> Result<Self> {
        Self::new(deg.to_radians())
    }

    /// 50:50 splitter.
    pub fn balanced() -> Self {
        Self { theta: PI / 4.0 }
    }

    /// Setting whose transmittivity equals `t`.
    pub fn from_transmittivity(t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!("transmittivity must lie in [0, 1], got {t}")));
        }
        Self::new(t.sqrt().acos())
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn degrees(&self) -> f64 {
        self.theta.to_degrees()
    }

    pub fn transmittivity(&self) -> f64 {
        let c = self.theta.cos();
        c * c
    }
}

/// Output coherent parameters `(αc + βs, −αs + βc)`.
pub fn coherent_output_params(
    alpha: ComplexAmplitude,
    beta: ComplexAmplitude,
    theta: f64,
) -> Result<(ComplexAmplitude, ComplexAmplitude)> {
    let (s, c) = theta.sin_cos();
    let (a, b) = (alpha.to_complex(), beta.to_complex());
    Ok((ComplexAmplitude::from_complex(a * c + b * s)?, ComplexAmplitude::from_complex(-a * s + b * c)?))
}

/// Dual coherent inputs: `e^{−|αc + βs|²}`.
pub fn vacuum_prob_coherent(alpha: ComplexAmplitude, beta: ComplexAmplitude, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    (-(alpha.to_complex() * c + beta.to_complex() * s).norm_sqr()).exp()
}

/// Dual Poisson inputs: `e^{−|αc|² − |βs|²} I₀(|α||β| sin 2θ)`.
pub fn vacuum_prob_poisson(mag_alpha: f64, mag_beta: f64, theta: f64) -> Result<f64> {
    check_magnitude(mag_alpha)?;
    check_magnitude(mag_beta)?;
    let (s, c) = theta.sin_cos();
    let ac = mag_alpha * c;
    let bs = mag_beta * s;
    Ok((-ac * ac - bs * bs).exp() * bessel_i0(mag_alpha * mag_beta * (2.0 * theta).sin())?)
}

/// Equal-magnitude coherent inputs with relative phase `χ`:
/// `e^{−|α|²(1 + sin 2θ cos χ)}`.
pub fn vacuum_prob_coherent_phase(mean_photons: f64, chi: f64, theta: f64) -> f64 {
    (-mean_photons * (1.0 + (2.0 * theta).sin() * chi.cos())).exp()
}

/// Average of `f` over `[0, 2π)` with the `points`-node periodic trapezoid
/// rule.
pub fn periodic_average(points: usize, f: impl Fn(f64) -> f64) -> f64 {
    assert!(points > 0, "quadrature needs at least one node");
    let h = TAU / points as f64;
    (0..points).map(|k| f(k as f64 * h)).sum::<f64>() / points as f64
}

/// Coherent-input vacuum probability `e^{−||α|c + |β|e^{iχ}s|²}`, averaged
/// over the relative phase `χ` by quadrature.
pub fn phase_averaged_vacuum_prob(mag_alpha: f64, mag_beta: f64, theta: f64) -> Result<f64> {
    phase_averaged_vacuum_prob_with(mag_alpha, mag_beta, theta, DEFAULT_PHASE_POINTS)
}

pub fn phase_averaged_vacuum_prob_with(mag_alpha: f64, mag_beta: f64, theta: f64, points: usize) -> Result<f64> {
    check_magnitude(mag_alpha)?;
    check_magnitude(mag_beta)?;
    if points == 0 {
        return Err(Error::InvalidParameter("quadrature needs at least one node".into()));
    }
    let (s, c) = theta.sin_cos();
    Ok(periodic_average(points, |chi| {
        (-(Complex64::new(mag_alpha * c, 0.0) + Complex64::from_polar(mag_beta * s, chi)).norm_sqr()).exp()
    }))
}

/// Single laser split 50:50 before the VBS, Poisson-mixed source of mean
/// `mean_photons`: `e^{−(|α|²/2)(1 − sin 2θ)}`.
pub fn split_poisson_vbs_vacuum_prob(mean_photons: f64, theta: f64) -> f64 {
    (-0.5 * mean_photons * (1.0 - (2.0 * theta).sin())).exp()
}

fn check_magnitude(x: f64) -> Result<()> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::InvalidParameter(format!("amplitude magnitude must be finite and >= 0, got {x}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    fn amp(mean: f64, phase: f64) -> ComplexAmplitude {
        ComplexAmplitude::from_mean_photons(mean, phase).unwrap()
    }

    /// `−ln(1 − 0.85)`.
    fn m_star() -> f64 {
        -(0.15f64).ln()
    }

    #[test]
    fn output_params_identity_and_symmetry() {
        let (a, b) = (amp(1.3, 0.4), amp(0.6, 2.0));
        let (a2, b2) = coherent_output_params(a, b, 0.0).unwrap();
        assert_abs_diff_eq!((a2.to_complex() - a.to_complex()).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((b2.to_complex() - b.to_complex()).norm(), 0.0, epsilon = 1e-15);

        let (a2, b2) = coherent_output_params(a, a, FRAC_PI_4).unwrap();
        assert_abs_diff_eq!((a2.to_complex() - a.to_complex() * 2f64.sqrt()).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b2.magnitude(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn coherent_vacuum_anchor() {
        assert_eq!(vacuum_prob_coherent(ComplexAmplitude::ZERO, ComplexAmplitude::ZERO, 0.7), 1.0);
        let a = amp(m_star(), 0.0);
        let p0 = vacuum_prob_coherent(a, a, FRAC_PI_4);
        assert_abs_diff_eq!(p0, 0.0225, epsilon = 1e-12);
        assert_abs_diff_eq!(1.0 - p0, 0.9775, epsilon = 1e-12);
    }

    #[test]
    fn poisson_vacuum_anchor() {
        let m = m_star();
        let p0 = vacuum_prob_poisson(m.sqrt(), m.sqrt(), FRAC_PI_4).unwrap();
        // 0.15 · I₀(1.89712), I₀ by explicit series
        let mut i0 = 0.0;
        let mut t = 1.0;
        for k in 0..30 {
            if k > 0 {
                t *= (m * m / 4.0) / (k * k) as f64;
            }
            i0 += t;
        }
        assert_abs_diff_eq!(p0, 0.15 * i0, epsilon = 1e-14);
        assert_abs_diff_eq!(1.0 - p0, 0.681_46, epsilon = 1e-5);
    }

    #[test]
    fn vacuum_beta_makes_cases_identical() {
        let a = amp(1.7, 0.9);
        for k in 0..24 {
            let theta = TAU * k as f64 / 24.0;
            let pc = vacuum_prob_coherent(a, ComplexAmplitude::ZERO, theta);
            let pp = vacuum_prob_poisson(a.magnitude(), 0.0, theta).unwrap();
            assert_abs_diff_eq!(pc, pp, epsilon = 1e-15);
        }
    }

    #[test]
    fn relative_phase_special_cases() {
        let m = 1.9;
        let a = amp(m, 0.0);
        for k in 0..16 {
            let theta = TAU * k as f64 / 16.0;
            assert_abs_diff_eq!(vacuum_prob_coherent_phase(m, 0.0, theta), vacuum_prob_coherent(a, a, theta), epsilon = 1e-14);
            assert_abs_diff_eq!(vacuum_prob_coherent_phase(m, PI / 2.0, theta), (-m).exp(), epsilon = 1e-15);
        }
    }

    #[test]
    fn chi_67_5_mimics_poisson_on_one_quadrant_only() {
        let m = m_star();
        let chi = 67.5f64.to_radians();
        let gap = |deg: f64| {
            let t = deg.to_radians();
            (vacuum_prob_coherent_phase(m, chi, t) - vacuum_prob_poisson(m.sqrt(), m.sqrt(), t).unwrap()).abs()
        };
        let near = (0..=90).map(|d| gap(90.0 + d as f64)).fold(0.0, f64::max);
        let far = (0..=90).map(|d| gap(d as f64)).fold(0.0, f64::max);
        assert!(near > 0.0 && near < 0.05, "near {near}");
        assert!(far > 0.2, "far {far}");
    }

    #[test]
    fn phase_average_collapses_to_poisson() {
        let m = m_star();
        let avg = phase_averaged_vacuum_prob(m.sqrt(), m.sqrt(), FRAC_PI_4).unwrap();
        let pois = vacuum_prob_poisson(m.sqrt(), m.sqrt(), FRAC_PI_4).unwrap();
        assert_abs_diff_eq!(avg, pois, epsilon = 1e-12);
        // |α| = 0
        let p = phase_averaged_vacuum_prob(0.0, 1.2, 0.9).unwrap();
        assert_abs_diff_eq!(p, (-(1.2f64 * 0.9f64.sin()).powi(2)).exp(), epsilon = 1e-14);
    }

    #[test]
    fn cosine_exponential_integral() {
        // ∫₀^π e^{z cos x} dx = π I₀(z) at z = 1, as a full-period average
        let avg = periodic_average(1024, |x| x.cos().exp());
        assert_abs_diff_eq!(avg, bessel_i0(1.0).unwrap(), epsilon = 1e-14);
    }

    #[test]
    fn split_pipeline_equals_coherent_split() {
        for k in 0..64 {
            let theta = TAU * k as f64 / 64.0;
            let m = 1.3;
            let a = amp(m / 2.0, 0.0);
            let minus_a = amp(m / 2.0, PI);
            let coh = vacuum_prob_coherent(a, minus_a, theta);
            assert_abs_diff_eq!(split_poisson_vbs_vacuum_prob(m, theta), coh, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(split_poisson_vbs_vacuum_prob(2.0, FRAC_PI_4), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn periodicities() {
        let m: f64 = 1.9;
        let r = m.sqrt();
        for k in 0..360 {
            let t = (k as f64).to_radians();
            let pp = vacuum_prob_poisson(r, r, t).unwrap();
            let pp90 = vacuum_prob_poisson(r, r, t + PI / 2.0).unwrap();
            assert_abs_diff_eq!(pp, pp90, epsilon = 1e-12);
            let pc = vacuum_prob_coherent_phase(m, 0.0, t);
            let pc180 = vacuum_prob_coherent_phase(m, 0.0, t + PI);
            assert_abs_diff_eq!(pc, pc180, epsilon = 1e-12);
        }
        let t = PI / 8.0;
        assert!((vacuum_prob_coherent_phase(m, 0.0, t) - vacuum_prob_coherent_phase(m, 0.0, t + PI / 2.0)).abs() > 0.1);
    }

    #[test]
    fn transmittivity_round_trip() {
        let s = BeamSplitterSetting::from_transmittivity(0.6).unwrap();
        assert_abs_diff_eq!(s.transmittivity(), 0.6, epsilon = 1e-15);
        assert!(BeamSplitterSetting::from_transmittivity(1.2).is_err());
        assert!(BeamSplitterSetting::new(f64::INFINITY).is_err());
    }
}
