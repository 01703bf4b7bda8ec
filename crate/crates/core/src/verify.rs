//! Self-check suite: every closed form against its brute-force path, the
//! series identities, and the structural properties of the VBS unitary.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fock::{Truncation, DEFAULT_TAIL_TOL};
use crate::optics::{self, brute, BeamSplitterSetting};
use crate::states::{poisson_state, ComplexAmplitude};

/// Seed for the random parameter tuples.
pub const DEFAULT_VERIFY_SEED: u64 = 20_190_401;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    /// Pass when the value is at most this.
    AtMost(f64),
    /// Pass when the value is strictly above this.
    Above(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub value: f64,
    pub bound: Bound,
}

impl CheckResult {
    fn new(name: &'static str, value: f64, bound: Bound) -> Self {
        Self { name, value, bound }
    }

    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost(tol) => self.value <= tol,
            Bound::Above(floor) => self.value > floor,
        }
    }
}

/// Random `(|α|², |β|², θ, χ)` with means in `[0, 2.5]`.
pub fn random_tuples(seed: u64, count: usize) -> Vec<[f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| [2.5 * rng.random::<f64>(), 2.5 * rng.random::<f64>(), TAU * rng.random::<f64>(), TAU * rng.random::<f64>()])
        .collect()
}

fn max_over<T>(items: impl IntoIterator<Item = T>, f: impl Fn(T) -> Result<f64>) -> Result<f64> {
    items.into_iter().try_fold(0.0f64, |acc, x| Ok(acc.max(f(x)?)))
}

/// Runs the full suite. Errors only if a computation itself fails.
pub fn run_verification(seed: u64) -> Result<Vec<CheckResult>> {
    let tuples = random_tuples(seed, 50);
    let tol = DEFAULT_TAIL_TOL;
    let mut out = Vec::new();

    out.push(CheckResult::new(
        "coherent vacuum probability vs brute force (50 tuples)",
        max_over(&tuples, |&[ma, mb, theta, chi]| {
            let a = ComplexAmplitude::from_mean_photons(ma, 0.0)?;
            let b = ComplexAmplitude::from_mean_photons(mb, chi)?;
            Ok((optics::vacuum_prob_coherent(a, b, theta) - brute::coherent_vacuum_prob(a, b, theta, tol)?).abs())
        })?,
        Bound::AtMost(1e-10),
    ));
    out.push(CheckResult::new(
        "Poisson vacuum probability vs brute force (50 tuples)",
        max_over(&tuples, |&[ma, mb, theta, _]| {
            let closed = optics::vacuum_prob_poisson(ma.sqrt(), mb.sqrt(), theta)?;
            Ok((closed - brute::poisson_vacuum_prob(ma.sqrt(), mb.sqrt(), theta, tol)?).abs())
        })?,
        Bound::AtMost(1e-10),
    ));
    out.push(CheckResult::new(
        "relative-phase vacuum probability vs brute force (50 tuples)",
        max_over(&tuples, |&[ma, _, theta, chi]| {
            let closed = optics::vacuum_prob_coherent_phase(ma, chi, theta);
            Ok((closed - brute::coherent_phase_vacuum_prob(ma, chi, theta, tol)?).abs())
        })?,
        Bound::AtMost(1e-10),
    ));
    out.push(CheckResult::new(
        "phase average of coherent case vs Poisson closed form (10 tuples)",
        max_over(&tuples[..10], |&[ma, mb, theta, _]| {
            let (a, b) = (ma.sqrt(), mb.sqrt());
            Ok((optics::phase_averaged_vacuum_prob(a, b, theta)? - optics::vacuum_prob_poisson(a, b, theta)?).abs())
        })?,
        Bound::AtMost(1e-9),
    ));
    out.push(CheckResult::new(
        "direct Poisson output state vs unitary, |α|²=|β|²=1, θ=15°,45°,75°",
        max_over([15.0f64, 45.0, 75.0], |deg| {
            let t = brute::pair_truncation(2.0, tol)?;
            let direct = optics::poisson_output_direct(1.0, 1.0, deg.to_radians(), t)?;
            let unitary = optics::apply_vbs(BeamSplitterSetting::from_degrees(deg)?, &brute::poisson_pair_input(1.0, 1.0, tol)?)?;
            Ok(direct.max_abs_diff(&unitary))
        })?,
        Bound::AtMost(1e-10),
    ));
    out.push(CheckResult::new(
        "series identities at (A, B) = (1.2, 0.7)",
        optics::check_bessel_identities(1.2, 0.7, 60)?.max_residual(),
        Bound::AtMost(1e-10),
    ));
    let grid: Vec<(f64, f64)> = (0..5).flat_map(|i| (0..5).map(move |j| (0.5 * i as f64, 0.5 * j as f64))).collect();
    out.push(CheckResult::new(
        "series identities on A, B in [0, 2]",
        max_over(grid, |(a, b)| Ok(optics::check_bessel_identities(a, b, 80)?.max_residual()))?,
        Bound::AtMost(1e-10),
    ));

    let split = optics::reduced_state_after_5050(1.0, Truncation::for_mean(1.0, tol)?)?;
    out.push(CheckResult::new(
        "50:50 split of Poisson(1): reduced state vs Poisson(0.5)",
        split.deviation_from_poisson()?,
        Bound::AtMost(1e-12),
    ));
    out.push(CheckResult::new(
        "50:50 split of Poisson(1): largest joint coherence",
        split.max_joint_coherence(),
        Bound::Above(0.01),
    ));
    let split_reduced_vs_state = {
        let t = Truncation::for_mean(2.0, tol)?;
        let s = optics::reduced_state_after_5050(2.0, t)?;
        s.reduced().max_abs_diff(&poisson_state(1.0, t)?)
    };
    out.push(CheckResult::new(
        "50:50 split of Poisson(2): reduced state vs Poisson(1)",
        split_reduced_vs_state,
        Bound::AtMost(1e-12),
    ));

    let thetas: Vec<f64> = (0..64).map(|k| TAU * k as f64 / 64.0).collect();
    out.push(CheckResult::new(
        "split-Poisson pipeline vs coherent split pipeline (formula)",
        max_over(&thetas, |&theta| {
            let m = 1.9;
            let a = ComplexAmplitude::from_mean_photons(m / 2.0, 0.0)?;
            let minus_a = ComplexAmplitude::from_mean_photons(m / 2.0, PI)?;
            Ok((optics::split_poisson_vbs_vacuum_prob(m, theta) - optics::vacuum_prob_coherent(a, minus_a, theta)).abs())
        })?,
        Bound::AtMost(1e-15),
    ));
    out.push(CheckResult::new(
        "split-Poisson pipeline vs brute force (64 angles)",
        max_over(&thetas, |&theta| {
            Ok((optics::split_poisson_vbs_vacuum_prob(1.9, theta) - brute::split_poisson_vacuum_prob(1.9, theta, tol)?).abs())
        })?,
        Bound::AtMost(1e-10),
    ));

    out.push(CheckResult::new(
        "VBS block unitarity (32 angles)",
        max_over(0..32, |k| {
            Ok(optics::build_vbs(BeamSplitterSetting::new(TAU * k as f64 / 32.0)?, 12, 12)?.unitarity_residual())
        })?,
        Bound::AtMost(1e-12),
    ));
    let group = {
        let u = |t: f64| optics::build_vbs(BeamSplitterSetting::new(t).expect("finite"), 12, 12);
        u(0.3)?.compose(&u(0.5)?)?.max_abs_diff(&u(0.8)?)
    };
    out.push(CheckResult::new("VBS group law U(0.3)U(0.5) = U(0.8)", group, Bound::AtMost(1e-11)));

    let m_star = -(0.15f64).ln();
    let r = m_star.sqrt();
    out.push(CheckResult::new(
        "periodicity: coherent π, Poisson π/2 (360 angles)",
        max_over(0..360, |k| {
            let t = (k as f64).to_radians();
            let a = ComplexAmplitude::from_mean_photons(m_star, 0.0)?;
            let pc = (optics::vacuum_prob_coherent(a, a, t) - optics::vacuum_prob_coherent(a, a, t + PI)).abs();
            let pp = (optics::vacuum_prob_poisson(r, r, t)? - optics::vacuum_prob_poisson(r, r, t + PI / 2.0)?).abs();
            Ok(pc.max(pp))
        })?,
        Bound::AtMost(1e-12),
    ));
    let balanced = optics::vacuum_prob_poisson(r, r, FRAC_PI_4)?;
    out.push(CheckResult::new(
        "Poisson 50:50 vacuum probability vs I₀ series",
        (balanced - 0.15 * series_i0(m_star)).abs(),
        Bound::AtMost(1e-14),
    ));
    Ok(out)
}

/// Plain power series for `I₀`, independent of the library routine.
fn series_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= q / (k * k) as f64;
        sum += term;
    }
    sum
}
