//! Binomial-expansion route to the Poisson-input output state, and the
//! 50:50 split of a single Poisson beam.

use std::f64::consts::FRAC_PI_4;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::vbs::apply_vbs;
use super::BeamSplitterSetting;
use crate::error::{Error, Result};
use crate::fock::{
    ln_factorial, partial_trace_second, poisson_tail, poisson_weights, tensor_product, SingleModeState, Truncation,
    TwoModeState,
};
use crate::states::poisson_state;

/// `B_θ (ρ_P(|α|²) ⊗ ρ_P(|β|²)) B_θ†` from the explicit expansion
///
/// `B|n, m⟩ = Σ_{q,r} C(n,q) C(m,r) (−1)^q c^{n−q+r} s^{q+m−r}
///            √((N−q−r)! (q+r)! / (n! m!)) |N−q−r, q+r⟩`
///
/// with both outer Poisson sums capped at `trunc.n_max()`. Output states that
/// fall outside the truncated space are dropped.
pub fn poisson_output_direct(mag_alpha: f64, mag_beta: f64, theta: f64, trunc: Truncation) -> Result<TwoModeState> {
    for x in [mag_alpha, mag_beta] {
        if !(x.is_finite() && x >= 0.0) {
            return Err(Error::InvalidParameter(format!("amplitude magnitude must be finite and >= 0, got {x}")));
        }
    }
    let (ma, mb) = (mag_alpha * mag_alpha, mag_beta * mag_beta);
    let n_max = trunc.n_max();
    let neglected = poisson_tail(ma, n_max) + poisson_tail(mb, n_max);
    if neglected >= trunc.tail_tol() {
        return Err(Error::TruncationTooSmall { n_max, tail: neglected, tail_tol: trunc.tail_tol() });
    }

    let d = trunc.dim();
    let (s, c) = theta.sin_cos();
    let pa = poisson_weights(ma, n_max);
    let pb = poisson_weights(mb, n_max);
    let mut out = DMatrix::<f64>::zeros(d * d, d * d);
    // amplitudes of B|n, m⟩ indexed by the second-mode occupation q + r
    let mut v = vec![0.0; 2 * d];

    for n in 0..d {
        for m in 0..d {
            let w = pa[n] * pb[m];
            if w == 0.0 {
                continue;
            }
            let total = n + m;
            v[..=total].iter_mut().for_each(|x| *x = 0.0);
            let half_in = 0.5 * (ln_factorial(n) + ln_factorial(m));
            for q in 0..=n {
                for r in 0..=m {
                    let k = q + r;
                    let ln_mag = half_in + 0.5 * (ln_factorial(total - k) + ln_factorial(k))
                        - ln_factorial(n - q)
                        - ln_factorial(q)
                        - ln_factorial(m - r)
                        - ln_factorial(r);
                    let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
                    v[k] += sign * ln_mag.exp() * c.powi((n - q + r) as i32) * s.powi((q + m - r) as i32);
                }
            }
            let kept: Vec<(usize, f64)> = (0..=total)
                .filter(|&k| k < d && total - k < d)
                .map(|k| ((total - k) * d + k, v[k]))
                .collect();
            for &(i, vi) in &kept {
                for &(j, vj) in &kept {
                    out[(i, j)] += w * vi * vj;
                }
            }
        }
    }
    TwoModeState::from_matrix(out.map(|x| Complex64::new(x, 0.0)), trunc, trunc)
}

/// Joint and reduced states after splitting a Poisson beam on a 50:50
/// splitter with vacuum in the other port.
#[derive(Debug, Clone)]
pub struct SplitReduction {
    joint: TwoModeState,
    reduced: SingleModeState,
    mean_photons: f64,
}

impl SplitReduction {
    pub fn joint(&self) -> &TwoModeState {
        &self.joint
    }

    pub fn reduced(&self) -> &SingleModeState {
        &self.reduced
    }

    pub fn into_reduced(self) -> SingleModeState {
        self.reduced
    }

    /// Entrywise distance of the reduced state from `ρ_P(|α|²/2)`.
    pub fn deviation_from_poisson(&self) -> Result<f64> {
        let target = poisson_state(0.5 * self.mean_photons, self.reduced.trunc())?;
        Ok(self.reduced.max_abs_diff(&target))
    }

    /// Largest joint-state entry `|⟨n,m|ρ|n',m'⟩|` with `n ≠ n'` or `m ≠ m'`.
    pub fn max_joint_coherence(&self) -> f64 {
        let e = self.joint.entries();
        let mut best = 0.0f64;
        for i in 0..e.nrows() {
            for j in 0..e.ncols() {
                if i != j {
                    best = best.max(e[(i, j)].norm());
                }
            }
        }
        best
    }
}

/// Splits `ρ_P(mean_photons) ⊗ |0⟩⟨0|` on `B_{π/4}` and traces out the second
/// port. Every output sector fits the truncation, so the result is exact up
/// to the input tail.
pub fn reduced_state_after_5050(mean_photons: f64, trunc: Truncation) -> Result<SplitReduction> {
    let input = tensor_product(&poisson_state(mean_photons, trunc)?, &SingleModeState::vacuum(trunc))?;
    let joint = apply_vbs(BeamSplitterSetting::new(FRAC_PI_4)?, &input)?;
    let reduced = partial_trace_second(&joint);
    Ok(SplitReduction { joint, reduced, mean_photons })
}
