//! Decides whether a measured click-rate curve `p(θ)` came from a coherent
//! pair or from two phase-mixed sources, by least-squares fits of the two
//! ideal-detector models
//!
//! * coherent: `P(θ; m, χ) = 1 − e^{−m(1 + sin 2θ cos χ)}`
//! * Poisson:  `P̃(θ; m)   = 1 − e^{−m} I₀(m sin 2θ)`

use std::f64::consts::{PI, TAU};

use super::sweep::SweepRecord;
use crate::error::{Error, Result};
use crate::optics::bessel_i0;
use crate::states::normalize_angle;

/// Inconclusive when the better residual sum exceeds this fraction of the
/// worse one.
pub const DECISION_MARGIN: f64 = 0.8;

const GRID: usize = 64;
const M_MIN: f64 = 0.1;
const M_MAX_DEFAULT: f64 = 4.0;
const ANGLE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentFit {
    pub mean_photons: f64,
    /// Relative phase folded into `[0, π]`; the model only sees `cos χ`.
    pub chi: f64,
    pub rss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonFit {
    pub mean_photons: f64,
    pub rss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Coherent { chi_hat: f64 },
    Poisson,
    Inconclusive,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Coherent { .. } => "coherent",
            Verdict::Poisson => "poisson",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub verdict: Verdict,
    pub coherent: CoherentFit,
    pub poisson: PoissonFit,
}

fn coherent_model(theta: f64, m: f64, chi: f64) -> f64 {
    1.0 - (-m * (1.0 + (2.0 * theta).sin() * chi.cos())).exp()
}

fn poisson_model(theta: f64, m: f64) -> f64 {
    match bessel_i0(m * (2.0 * theta).sin()) {
        Ok(i0) => 1.0 - (-m).exp() * i0,
        Err(_) => f64::NAN,
    }
}

fn rss(records: &[SweepRecord], model: impl Fn(f64) -> f64) -> f64 {
    let s: f64 = records.iter().map(|r| (r.p_hat - model(r.theta)).powi(2)).sum();
    if s.is_nan() {
        f64::INFINITY
    } else {
        s
    }
}

/// Fits both models and picks one.
///
/// `calib_mean_photons` is the expected per-laser mean; it widens the search
/// range for `m` when it exceeds the default upper bound of 4.
///
/// Requires the angles to span at least 180° with no gap wider than 45°.
pub fn classify_curve(records: &[SweepRecord], calib_mean_photons: f64) -> Result<Classification> {
    check_coverage(records)?;
    if !(calib_mean_photons.is_finite() && calib_mean_photons >= 0.0) {
        return Err(Error::InvalidParameter(format!("calibration mean must be finite and >= 0, got {calib_mean_photons}")));
    }
    let m_max = M_MAX_DEFAULT.max(2.0 * calib_mean_photons);
    let coherent = fit_coherent(records, m_max);
    let poisson = fit_poisson(records, m_max);

    let (better, worse) = if coherent.rss <= poisson.rss { (coherent.rss, poisson.rss) } else { (poisson.rss, coherent.rss) };
    let verdict = if !(worse > 0.0) || better > DECISION_MARGIN * worse {
        Verdict::Inconclusive
    } else if coherent.rss < poisson.rss {
        Verdict::Coherent { chi_hat: coherent.chi }
    } else {
        Verdict::Poisson
    };
    Ok(Classification { verdict, coherent, poisson })
}

fn check_coverage(records: &[SweepRecord]) -> Result<()> {
    if records.len() < 3 {
        return Err(Error::InsufficientCoverage(format!("need at least 3 angles, got {}", records.len())));
    }
    let mut thetas: Vec<f64> = records.iter().map(|r| r.theta).collect();
    if thetas.iter().any(|t| !t.is_finite()) {
        return Err(Error::InsufficientCoverage("non-finite angle".into()));
    }
    thetas.sort_by(f64::total_cmp);
    let span = thetas[thetas.len() - 1] - thetas[0];
    if span < PI - ANGLE_SLACK {
        return Err(Error::InsufficientCoverage(format!("angles span {:.3}°, need >= 180°", span.to_degrees())));
    }
    let gap = thetas.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if gap > PI / 4.0 + ANGLE_SLACK {
        return Err(Error::InsufficientCoverage(format!("largest gap {:.3}°, need <= 45°", gap.to_degrees())));
    }
    Ok(())
}

fn m_grid(m_max: f64) -> impl Iterator<Item = f64> {
    let step = (m_max - M_MIN) / (GRID - 1) as f64;
    (0..GRID).map(move |i| M_MIN + i as f64 * step)
}

fn fit_coherent(records: &[SweepRecord], m_max: f64) -> CoherentFit {
    let objective = |x: [f64; 2]| {
        if x[0] < 0.0 {
            return f64::INFINITY;
        }
        rss(records, |t| coherent_model(t, x[0], x[1]))
    };
    let mut best = ([M_MIN, 0.0], f64::INFINITY);
    for m in m_grid(m_max) {
        for k in 0..GRID {
            let x = [m, TAU * k as f64 / GRID as f64];
            let f = objective(x);
            if f < best.1 {
                best = (x, f);
            }
        }
    }
    let step = [(m_max - M_MIN) / (GRID - 1) as f64, TAU / GRID as f64];
    let (x, f) = nelder_mead(objective, best.0, step);
    let chi = normalize_angle(x[1]);
    let chi = if chi > PI { TAU - chi } else { chi };
    CoherentFit { mean_photons: x[0], chi, rss: f }
}

fn fit_poisson(records: &[SweepRecord], m_max: f64) -> PoissonFit {
    let objective = |m: f64| rss(records, |t| poisson_model(t, m));
    let grid: Vec<f64> = m_grid(m_max).collect();
    let (i, _) = grid
        .iter()
        .map(|&m| objective(m))
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, f)| if f < acc.1 { (i, f) } else { acc });
    let step = grid[1] - grid[0];
    let lo = (grid[i] - step).max(0.0);
    let hi = grid[i] + step;
    let m = golden_section(objective, lo, hi);
    PoissonFit { mean_photons: m, rss: objective(m) }
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-13 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Two-parameter Nelder–Mead with the standard coefficients.
fn nelder_mead(f: impl Fn([f64; 2]) -> f64, start: [f64; 2], step: [f64; 2]) -> ([f64; 2], f64) {
    let mut pts = [start, [start[0] + step[0], start[1]], [start[0], start[1] + step[1]]];
    let mut vals = pts.map(&f);
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];

    for _ in 0..2000 {
        let mut order = [0, 1, 2];
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        pts = order.map(|i| pts[i]);
        vals = order.map(|i| vals[i]);
        let size = (pts[1][0] - pts[0][0]).abs().max((pts[2][0] - pts[0][0]).abs())
            + (pts[1][1] - pts[0][1]).abs().max((pts[2][1] - pts[0][1]).abs());
        if size < 1e-12 || (vals[2] - vals[0]).abs() <= 1e-30 {
            break;
        }
        let centroid = lerp(pts[0], pts[1], 0.5);
        let reflected = lerp(centroid, pts[2], -1.0);
        let fr = f(reflected);
        if fr < vals[0] {
            let expanded = lerp(centroid, pts[2], -2.0);
            let fe = f(expanded);
            (pts[2], vals[2]) = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < vals[1] {
            (pts[2], vals[2]) = (reflected, fr);
        } else {
            let contracted = if fr < vals[2] { lerp(centroid, reflected, 0.5) } else { lerp(centroid, pts[2], 0.5) };
            let fc = f(contracted);
            if fc < vals[2].min(fr) {
                (pts[2], vals[2]) = (contracted, fc);
            } else {
                for i in 1..3 {
                    pts[i] = lerp(pts[0], pts[i], 0.5);
                    vals[i] = f(pts[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap_or(0);
    (pts[best], vals[best])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(from_deg: f64, to_deg: f64, step_deg: f64) -> Vec<f64> {
        let n = ((to_deg - from_deg) / step_deg).round() as usize;
        (0..=n).map(|i| (from_deg + i as f64 * step_deg).to_radians()).collect()
    }

    fn exact(thetas: &[f64], p: impl Fn(f64) -> f64) -> Vec<SweepRecord> {
        thetas.iter().map(|&t| SweepRecord::exact(t, p(t))).collect()
    }

    fn m_star() -> f64 {
        -(0.15f64).ln()
    }

    #[test]
    fn noiseless_poisson_curve() {
        let recs = exact(&grid(0.0, 360.0, 45.0), |t| poisson_model(t, m_star()));
        let c = classify_curve(&recs, m_star()).unwrap();
        assert_eq!(c.verdict, Verdict::Poisson);
        assert!((c.poisson.mean_photons - m_star()).abs() < 1e-6);
    }

    #[test]
    fn noiseless_coherent_curve() {
        let chi = 67.5f64.to_radians();
        let recs = exact(&grid(0.0, 360.0, 45.0), |t| coherent_model(t, m_star(), chi));
        let c = classify_curve(&recs, m_star()).unwrap();
        match c.verdict {
            Verdict::Coherent { chi_hat } => assert!((chi_hat - chi).abs() < 1e-6, "{chi_hat}"),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn every_phase_on_a_sixteen_point_grid() {
        let thetas = grid(0.0, 360.0, 22.5);
        for k in 0..16 {
            let chi = TAU * k as f64 / 16.0;
            let recs = exact(&thetas, |t| coherent_model(t, 1.9, chi));
            let c = classify_curve(&recs, 1.9).unwrap();
            assert!(matches!(c.verdict, Verdict::Coherent { .. }), "χ = {chi}: {c:?}");
        }
    }

    #[test]
    fn folded_phase() {
        let chi = 300f64.to_radians();
        let recs = exact(&grid(0.0, 180.0, 15.0), |t| coherent_model(t, 1.2, chi));
        match classify_curve(&recs, 1.2).unwrap().verdict {
            Verdict::Coherent { chi_hat } => assert!((chi_hat - 60f64.to_radians()).abs() < 1e-6),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn coverage_rules() {
        let chi = 67.5f64.to_radians();
        let narrow = exact(&grid(90.0, 180.0, 15.0), |t| coherent_model(t, m_star(), chi));
        assert!(matches!(classify_curve(&narrow, m_star()), Err(Error::InsufficientCoverage(_))));
        let sparse = exact(&grid(0.0, 360.0, 60.0), |t| poisson_model(t, 1.0));
        assert!(matches!(classify_curve(&sparse, 1.0), Err(Error::InsufficientCoverage(_))));
        let half = exact(&grid(0.0, 180.0, 45.0), |t| poisson_model(t, 1.0));
        assert!(classify_curve(&half, 1.0).is_ok());
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let x = golden_section(|x| (x - 0.3).powi(2), 0.0, 1.0);
        assert!((x - 0.3).abs() < 1e-7);
    }
}
