//! Bernoulli sampling of click/no-click outcomes over a sweep of VBS angles.
//!
//! Randomness comes from ChaCha8 with the seed as key, the θ index as stream
//! and the trial index as position. Every trial consumes exactly two `u64`
//! draws (phase, then click), so a trial's outcome does not depend on how
//! the trials are split across threads.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::detector::{click_prob_coherent_pair, click_prob_poisson_pair, DetectorModel};
use super::{chi_of_t, DriftMode, LaserPairConfig, SourceKind};
use crate::error::{Error, Result};

/// Trials handled by one RNG instance.
const CHUNK: u64 = 8192;
/// 32-bit ChaCha words consumed per trial.
const WORDS_PER_TRIAL: u128 = 4;
/// Simpson intervals for the partial period of a Clock-mode window.
const WINDOW_INTERVALS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct TrialPlan {
    /// VBS angles, radians.
    pub theta_grid: Vec<f64>,
    pub trials_per_theta: u64,
    pub seed: u64,
}

impl TrialPlan {
    pub fn validate(&self) -> Result<()> {
        if self.theta_grid.is_empty() {
            return Err(Error::InvalidConfig("theta grid is empty".into()));
        }
        if let Some(t) = self.theta_grid.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidConfig(format!("theta must be finite, got {t}")));
        }
        if self.trials_per_theta == 0 {
            return Err(Error::InvalidConfig("trials per theta must be >= 1".into()));
        }
        Ok(())
    }
}

/// Click counts at one VBS angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    /// Radians.
    pub theta: f64,
    pub trials: u64,
    pub clicks: u64,
    pub p_hat: f64,
    /// `√(p̂(1 − p̂)/trials)`
    pub std_err: f64,
}

impl SweepRecord {
    pub fn new(theta: f64, trials: u64, clicks: u64) -> Result<Self> {
        if trials == 0 || clicks > trials {
            return Err(Error::InvalidParameter(format!("need 0 <= clicks <= trials, trials >= 1; got {clicks}/{trials}")));
        }
        let p_hat = clicks as f64 / trials as f64;
        let std_err = (p_hat * (1.0 - p_hat) / trials as f64).sqrt();
        Ok(Self { theta, trials, clicks, p_hat, std_err })
    }

    /// Noise-free record carrying a model probability; used for fitting
    /// exact curves.
    pub fn exact(theta: f64, p: f64) -> Self {
        Self { theta, trials: 0, clicks: 0, p_hat: p, std_err: 0.0 }
    }
}

/// Runs `trials_per_theta` Bernoulli trials at each angle of the plan.
pub fn run_sweep(
    plan: &TrialPlan,
    lasers: &LaserPairConfig,
    det: &DetectorModel,
    drift: DriftMode,
) -> Result<Vec<SweepRecord>> {
    plan.validate()?;
    lasers.validate()?;
    det.validate()?;
    let omega = lasers.omega_diff()?;
    let spacing = det.window + det.dead_time;
    if drift == DriftMode::Clock && lasers.source_kind == SourceKind::Coherent && omega != 0.0 && spacing <= 0.0 {
        return Err(Error::InvalidConfig("clock drift needs window + dead time > 0".into()));
    }
    let n = plan.trials_per_theta;

    plan.theta_grid
        .par_iter()
        .enumerate()
        .map(|(idx, &theta)| {
            let fixed = match (lasers.source_kind, drift) {
                (SourceKind::Poisson, _) => Some(click_prob_poisson_pair(lasers, theta, det)?),
                (SourceKind::Coherent, DriftMode::Frozen) => Some(click_prob_coherent_pair(lasers, theta, lasers.chi_0, det)),
                _ => None,
            };
            let first_trial = idx as u64 * n;
            let chunks = n.div_ceil(CHUNK);
            let clicks = (0..chunks)
                .into_par_iter()
                .map(|c| -> Result<u64> {
                    let start = c * CHUNK;
                    let end = (start + CHUNK).min(n);
                    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
                    rng.set_stream(idx as u64);
                    rng.set_word_pos(start as u128 * WORDS_PER_TRIAL);
                    let mut clicks = 0;
                    for k in start..end {
                        let u_chi: f64 = rng.random();
                        let u_click: f64 = rng.random();
                        let p = match (fixed, drift) {
                            (Some(p), _) => p,
                            (None, DriftMode::Fast) => click_prob_coherent_pair(lasers, theta, TAU * u_chi, det),
                            (None, _) => window_click_prob(lasers, theta, (first_trial + k) as f64 * spacing, det)?,
                        };
                        if u_click < p {
                            clicks += 1;
                        }
                    }
                    Ok(clicks)
                })
                .collect::<Result<Vec<u64>>>()?
                .into_iter()
                .sum();
            SweepRecord::new(theta, n, clicks)
        })
        .collect()
}

/// Click probability of a coherent pair for a window opening at `t_start`,
/// averaged over the phase swept during the window. Whole periods
/// contribute the phase-averaged (Poisson-pair) value; the remaining
/// fraction of a period is integrated with Simpson's rule.
pub fn window_click_prob(lasers: &LaserPairConfig, theta: f64, t_start: f64, det: &DetectorModel) -> Result<f64> {
    let omega = lasers.omega_diff()?;
    let chi_start = chi_of_t(lasers, t_start)?;
    let sweep = (omega * det.window).abs();
    if sweep == 0.0 {
        return Ok(click_prob_coherent_pair(lasers, theta, chi_start, det));
    }
    // χ decreases when ω₂ > ω₁; the average only needs the covered interval
    let lo = if omega > 0.0 { chi_start - sweep } else { chi_start };
    let periods = (sweep / TAU).floor();
    let rem = sweep - periods * TAU;
    let mut integral = 0.0;
    if periods > 0.0 {
        integral += periods * TAU * click_prob_poisson_pair(lasers, theta, det)?;
    }
    if rem > 0.0 {
        let h = rem / WINDOW_INTERVALS as f64;
        let f = |i: usize| click_prob_coherent_pair(lasers, theta, lo + i as f64 * h, det);
        let mut s = f(0) + f(WINDOW_INTERVALS);
        for i in 1..WINDOW_INTERVALS {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i);
        }
        integral += s * h / 3.0;
    }
    Ok(integral / sweep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn lasers(kind: SourceKind) -> LaserPairConfig {
        LaserPairConfig::balanced(-(0.15f64).ln(), 635e-9, kind)
    }

    fn plan(trials: u64, seed: u64) -> TrialPlan {
        TrialPlan { theta_grid: vec![0.0, FRAC_PI_4, 1.0], trials_per_theta: trials, seed }
    }

    #[test]
    fn record_statistics() {
        let r = SweepRecord::new(0.3, 100, 25).unwrap();
        assert_eq!(r.p_hat, 0.25);
        assert!((r.std_err - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-16);
        assert!(SweepRecord::new(0.0, 10, 11).is_err());
        assert!(SweepRecord::new(0.0, 0, 0).is_err());
    }

    #[test]
    fn same_seed_same_records() {
        let l = lasers(SourceKind::Coherent);
        let a = run_sweep(&plan(20_000, 7), &l, &DetectorModel::ideal(), DriftMode::Fast).unwrap();
        let b = run_sweep(&plan(20_000, 7), &l, &DetectorModel::ideal(), DriftMode::Fast).unwrap();
        assert_eq!(a, b);
        let c = run_sweep(&plan(20_000, 8), &l, &DetectorModel::ideal(), DriftMode::Fast).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn outcomes_do_not_depend_on_chunking() {
        // a trial count that is not a multiple of the chunk size, compared
        // with a single sequential stream
        let l = lasers(SourceKind::Poisson);
        let p = TrialPlan { theta_grid: vec![0.4], trials_per_theta: CHUNK + 123, seed: 99 };
        let rec = run_sweep(&p, &l, &DetectorModel::ideal(), DriftMode::Fast).unwrap();
        let prob = click_prob_poisson_pair(&l, 0.4, &DetectorModel::ideal()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        rng.set_stream(0);
        let mut clicks = 0;
        for _ in 0..p.trials_per_theta {
            let _: f64 = rng.random();
            let u: f64 = rng.random();
            clicks += u64::from(u < prob);
        }
        assert_eq!(rec[0].clicks, clicks);
    }

    #[test]
    fn certain_outcomes() {
        // θ = 0 with one laser dark: p = 1 − e^{0} = 0
        let l = LaserPairConfig { mean_photons_1: 0.0, ..lasers(SourceKind::Coherent) };
        let r = run_sweep(&plan(1000, 1), &l, &DetectorModel::ideal(), DriftMode::Frozen).unwrap();
        assert_eq!(r[0].clicks, 0);
        assert_eq!(r[0].std_err, 0.0);
    }

    #[test]
    fn window_average_limits() {
        let l = LaserPairConfig { lambda_1: 635.01e-9, ..lasers(SourceKind::Coherent) };
        let d = DetectorModel::ideal();
        let theta = FRAC_PI_4;
        // zero-length window: instantaneous phase
        let p = window_click_prob(&l, theta, 1e-9, &d).unwrap();
        let chi = chi_of_t(&l, 1e-9).unwrap();
        assert!((p - click_prob_coherent_pair(&l, theta, chi, &d)).abs() < 1e-15);
        // exactly one period: the phase average
        let period = TAU / l.omega_diff().unwrap();
        let d1 = DetectorModel { window: period, ..d };
        let p = window_click_prob(&l, theta, 3e-9, &d1).unwrap();
        assert!((p - click_prob_poisson_pair(&l, theta, &d).unwrap()).abs() < 1e-9);
        // many periods plus a fraction: close to the average
        let d2 = DetectorModel { window: 1000.37 * period, ..d };
        let p = window_click_prob(&l, theta, 0.0, &d2).unwrap();
        assert!((p - click_prob_poisson_pair(&l, theta, &d).unwrap()).abs() < 1e-3);
    }

    #[test]
    fn invalid_plans() {
        let l = lasers(SourceKind::Poisson);
        let d = DetectorModel::ideal();
        assert!(run_sweep(&plan(0, 1), &l, &d, DriftMode::Fast).is_err());
        let empty = TrialPlan { theta_grid: vec![], trials_per_theta: 1, seed: 0 };
        assert!(run_sweep(&empty, &l, &d, DriftMode::Fast).is_err());
        let cl = LaserPairConfig { lambda_1: 635.01e-9, ..lasers(SourceKind::Coherent) };
        assert!(run_sweep(&plan(10, 1), &cl, &d, DriftMode::Clock).is_err());
    }
}
