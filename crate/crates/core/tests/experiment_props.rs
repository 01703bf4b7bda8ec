use std::f64::consts::TAU;

use proptest::prelude::*;
use vbsim_core::experiment::{
    classify_curve, click_prob_poisson_pair, click_probability, run_sweep, DetectorModel, DriftMode, LaserPairConfig,
    SourceKind, SweepRecord, TrialPlan, Verdict,
};
use vbsim_core::fock::{Truncation, DEFAULT_TAIL_TOL};
use vbsim_core::{coherent_density, poisson_state, ComplexAmplitude};

fn m_star() -> f64 {
    -(0.15f64).ln()
}

fn nine_angles() -> Vec<f64> {
    (0..9).map(|k| (45.0 * k as f64).to_radians()).collect()
}

fn det(eta: f64, dark: f64) -> DetectorModel {
    DetectorModel { efficiency: eta, dark_mean_photons: dark, ..DetectorModel::ideal() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // With no dark counts a lower efficiency only removes photons.
    #[test]
    fn clicks_rise_with_efficiency(m in 0.0..3.0f64, phase in 0.0..TAU, e1 in 0.0..1.0f64, e2 in 0.0..1.0f64, poisson in any::<bool>()) {
        let t = Truncation::for_mean(m, DEFAULT_TAIL_TOL).unwrap();
        let rho = if poisson {
            poisson_state(m, t).unwrap()
        } else {
            coherent_density(ComplexAmplitude::from_mean_photons(m, phase).unwrap(), t).unwrap()
        };
        let (lo, hi) = (e1.min(e2), e1.max(e2));
        let p_lo = click_probability(&rho, &det(lo, 0.0)).unwrap();
        let p_hi = click_probability(&rho, &det(hi, 0.0)).unwrap();
        prop_assert!(p_lo <= p_hi + 1e-12);
    }

    // Dark counts add clicks as long as the transmitted signal is weak,
    // η|γ|² ≤ 1 + (1 − η) n̄_d.
    #[test]
    fn clicks_rise_with_dark_counts(m in 0.0..1.0f64, phase in 0.0..TAU, eta in 0.0..1.0f64, d1 in 0.0..0.5f64, d2 in 0.0..0.5f64) {
        let t = Truncation::for_mean(m, DEFAULT_TAIL_TOL).unwrap();
        let rho = coherent_density(ComplexAmplitude::from_mean_photons(m, phase).unwrap(), t).unwrap();
        let (lo, hi) = (d1.min(d2), d1.max(d2));
        let p_lo = click_probability(&rho, &det(eta, lo)).unwrap();
        let p_hi = click_probability(&rho, &det(eta, hi)).unwrap();
        prop_assert!(p_lo <= p_hi + 1e-12);
    }

    #[test]
    fn noiseless_curves_are_classified(m in 0.5..3.0f64, chi in 0.0..TAU) {
        let thetas: Vec<f64> = (0..17).map(|k| (22.5 * k as f64).to_radians()).collect();
        let coh: Vec<SweepRecord> = thetas
            .iter()
            .map(|&t| SweepRecord::exact(t, 1.0 - (-m * (1.0 + (2.0 * t).sin() * chi.cos())).exp()))
            .collect();
        let verdict = classify_curve(&coh, m).unwrap().verdict;
        prop_assert!(matches!(verdict, Verdict::Coherent { .. }), "{:?}", verdict);
        let lasers = LaserPairConfig::balanced(m, 635e-9, SourceKind::Poisson);
        let pois: Vec<SweepRecord> = thetas
            .iter()
            .map(|&t| SweepRecord::exact(t, click_prob_poisson_pair(&lasers, t, &DetectorModel::ideal()).unwrap()))
            .collect();
        prop_assert_eq!(classify_curve(&pois, m).unwrap().verdict, Verdict::Poisson);
    }
}

#[test]
fn dark_counts_can_reduce_clicks_for_bright_inputs() {
    // outside the weak-signal region more background means fewer clicks:
    // p₀ = e^{−η|γ|²/(1+n)}/(1+n) grows with n once η|γ|² > 1 + n
    let t = Truncation::for_mean(4.0, DEFAULT_TAIL_TOL).unwrap();
    let rho = coherent_density(ComplexAmplitude::from_mean_photons(4.0, 0.0).unwrap(), t).unwrap();
    let p0 = click_probability(&rho, &det(0.9, 0.0)).unwrap();
    let p1 = click_probability(&rho, &det(0.9, 0.5)).unwrap();
    assert!(p1 < p0);
}

#[test]
fn determinism_across_thread_pools() {
    let plan = TrialPlan { theta_grid: nine_angles(), trials_per_theta: 30_000, seed: 11 };
    let lasers = LaserPairConfig { lambda_1: 635.01e-9, ..LaserPairConfig::balanced(m_star(), 635e-9, SourceKind::Coherent) };
    let d = DetectorModel { window: 1e-11, dead_time: 3e-11, ..det(0.9, 0.01) };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_sweep(&plan, &lasers, &d, DriftMode::Clock).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(7));
}

/// Two-proportion z statistic.
fn z(a: &SweepRecord, b: &SweepRecord) -> f64 {
    let pooled = (a.clicks + b.clicks) as f64 / (a.trials + b.trials) as f64;
    let se = (pooled * (1.0 - pooled) * (1.0 / a.trials as f64 + 1.0 / b.trials as f64)).sqrt();
    if se == 0.0 {
        0.0
    } else {
        (a.p_hat - b.p_hat) / se
    }
}

#[test]
fn fast_drift_is_indistinguishable_from_poisson() {
    let angles: Vec<f64> = (0..36).map(|k| (10.0 * k as f64).to_radians()).collect();
    let coh = LaserPairConfig::balanced(m_star(), 635e-9, SourceKind::Coherent);
    let pois = LaserPairConfig { source_kind: SourceKind::Poisson, ..coh };
    let mut rejections = 0;
    let mut total = 0;
    for seed in 0..5u64 {
        let plan_a = TrialPlan { theta_grid: angles.clone(), trials_per_theta: 100_000, seed };
        let plan_b = TrialPlan { seed: seed + 1000, ..plan_a.clone() };
        let a = run_sweep(&plan_a, &coh, &DetectorModel::ideal(), DriftMode::Fast).unwrap();
        let b = run_sweep(&plan_b, &pois, &DetectorModel::ideal(), DriftMode::Fast).unwrap();
        for (x, y) in a.iter().zip(&b) {
            total += 1;
            if z(x, y).abs() > 3.0 {
                rejections += 1;
            }
        }
    }
    // 0.27 % expected under the null
    assert!(rejections as f64 <= 0.01 * total as f64, "{rejections}/{total}");
}

#[test]
fn frozen_drift_follows_the_relative_phase_curve() {
    let plan = TrialPlan { theta_grid: nine_angles(), trials_per_theta: 100_000, seed: 5 };
    let lasers = LaserPairConfig::balanced(m_star(), 635e-9, SourceKind::Coherent);
    let recs = run_sweep(&plan, &lasers, &DetectorModel::ideal(), DriftMode::Frozen).unwrap();
    let within = recs
        .iter()
        .filter(|r| {
            let p = 1.0 - (-m_star() * (1.0 + (2.0 * r.theta).sin())).exp();
            let sigma = (p * (1.0 - p) / r.trials as f64).sqrt();
            (r.p_hat - p).abs() <= 3.0 * sigma
        })
        .count();
    assert!(within >= 8, "{within}/9");
}

#[test]
fn long_clock_windows_behave_like_fast_drift() {
    // Δω τ_w ≫ 2π: every window averages over many phase periods
    let lasers = LaserPairConfig { lambda_1: 635.01e-9, ..LaserPairConfig::balanced(m_star(), 635e-9, SourceKind::Coherent) };
    let d = DetectorModel { window: 1e-8, dead_time: 1e-8, ..DetectorModel::ideal() };
    let plan = TrialPlan { theta_grid: nine_angles(), trials_per_theta: 50_000, seed: 3 };
    let recs = run_sweep(&plan, &lasers, &d, DriftMode::Clock).unwrap();
    for r in &recs {
        let p = click_prob_poisson_pair(&lasers, r.theta, &DetectorModel::ideal()).unwrap();
        let sigma = (p * (1.0 - p) / r.trials as f64).sqrt();
        assert!((r.p_hat - p).abs() <= 5.0 * sigma, "θ = {}: {} vs {p}", r.theta, r.p_hat);
    }
}
