use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use vbsim_core::experiment::{
    classify_curve, run_sweep, DetectorModel, DriftMode, LaserPairConfig, SourceKind, TrialPlan, Verdict,
};
use vbsim_core::optics::{vacuum_prob_coherent_phase, vacuum_prob_poisson};
use vbsim_core::verify::{run_verification, Bound, DEFAULT_VERIFY_SEED};

use crate::config::{parse_list, ConfigFile};
use crate::error::CliError;
use crate::{Common, CurvesArgs, Drift, ExperimentArgs, Source, SurfaceArgs, ThetaRange, VerifyArgs};

const DEFAULT_P_STAR: f64 = 0.85;
const DEFAULT_LAMBDA_NM: f64 = 635.0;

/// Seventeen significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn load(common: &Common) -> Result<(ConfigFile, Option<PathBuf>), CliError> {
    let file = match &common.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let out = common.out.clone().or_else(|| file.raw("out").map(PathBuf::from));
    Ok((file, out))
}

/// Flag, then file, then default.
fn pick<T: std::str::FromStr>(flag: Option<T>, file: &ConfigFile, key: &str, default: T) -> Result<T, CliError> {
    Ok(match flag {
        Some(v) => v,
        None => file.get(key)?.unwrap_or(default),
    })
}

fn pick_enum<T: ValueEnum + Copy>(flag: Option<T>, file: &ConfigFile, key: &str, default: T) -> Result<T, CliError> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match file.raw(key) {
        None => Ok(default),
        Some(s) => T::from_str(s, true).map_err(|_| CliError::Config(format!("invalid value `{s}` for `{key}`"))),
    }
}

fn p_star(flag: Option<f64>, file: &ConfigFile) -> Result<f64, CliError> {
    let p = pick(flag, file, "p_star", DEFAULT_P_STAR)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(CliError::Config(format!("p_star must lie in (0, 1), got {p}")));
    }
    Ok(p)
}

/// `−ln(1 − p*)`: the mean photon number whose θ = 0 click rate is `p*`.
fn calibrated_mean(p_star: f64) -> f64 {
    -(1.0 - p_star).ln()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

fn theta_grid_deg(range: &ThetaRange, file: &ConfigFile, default_steps: usize) -> Result<Vec<f64>, CliError> {
    let lo = pick(range.theta_min, file, "theta_min_deg", 0.0)?;
    let hi = pick(range.theta_max, file, "theta_max_deg", 360.0)?;
    let n = pick(range.theta_steps, file, "theta_steps", default_steps)?;
    if n < 2 {
        return Err(CliError::Config(format!("theta_steps must be >= 2, got {n}")));
    }
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(CliError::Config(format!("need finite theta_min < theta_max, got {lo}, {hi}")));
    }
    Ok(linspace(lo, hi, n))
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::io(path, e)),
        None => std::io::stdout().write_all(bytes).map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(format!("csv: {e}")))
}

pub fn surface(args: &SurfaceArgs) -> Result<(), CliError> {
    let (file, out) = load(&args.common)?;
    let thetas = theta_grid_deg(&args.theta, &file, 361)?;
    let p = p_star(args.p_star, &file)?;
    let m_max = pick(args.mean_photons_max, &file, "mean_photons_max", calibrated_mean(p))?;
    let m_steps = pick(args.m_steps, &file, "m_steps", 20)?;
    if m_steps < 2 {
        return Err(CliError::Config(format!("m_steps must be >= 2, got {m_steps}")));
    }
    if !(m_max.is_finite() && m_max > 0.0) {
        return Err(CliError::Config(format!("mean_photons_max must be finite and > 0, got {m_max}")));
    }
    let means = linspace(0.0, m_max, m_steps);
    let mut rows = Vec::with_capacity(thetas.len() * means.len());
    for &deg in &thetas {
        let theta = deg.to_radians();
        for &m in &means {
            let p_coh = 1.0 - vacuum_prob_coherent_phase(m, 0.0, theta);
            let p_pois = 1.0 - vacuum_prob_poisson(m.sqrt(), m.sqrt(), theta)?;
            rows.push(vec![num(deg), num(m), num(p_coh), num(p_pois)]);
        }
    }
    let bytes = csv_bytes(&["theta_deg", "mean_photons", "p_coherent", "p_poisson"], rows)?;
    write_output(out.as_deref(), &bytes)
}

pub fn curves(args: &CurvesArgs) -> Result<(), CliError> {
    let (file, out) = load(&args.common)?;
    let thetas = theta_grid_deg(&args.theta, &file, 361)?;
    let m = calibrated_mean(p_star(args.p_star, &file)?);
    let chis = match &args.chi_list {
        Some(s) => parse_list(s).map_err(|e| CliError::Config(format!("--chi-list: {e}")))?,
        None => file.get_list("chi_list_deg")?.unwrap_or_else(|| (0..9).map(|k| 11.25 * k as f64).collect()),
    };
    if chis.is_empty() || chis.iter().any(|c| !c.is_finite()) {
        return Err(CliError::Config("chi list must be non-empty and finite".into()));
    }
    let mut rows = Vec::with_capacity(thetas.len() * chis.len());
    for &chi_deg in &chis {
        for &deg in &thetas {
            let theta = deg.to_radians();
            let p_coh = 1.0 - vacuum_prob_coherent_phase(m, chi_deg.to_radians(), theta);
            let p_pois = 1.0 - vacuum_prob_poisson(m.sqrt(), m.sqrt(), theta)?;
            rows.push(vec![num(deg), num(chi_deg), num(p_coh), num(p_pois)]);
        }
    }
    let bytes = csv_bytes(&["theta_deg", "chi_deg", "p_coherent", "p_poisson"], rows)?;
    write_output(out.as_deref(), &bytes)
}

pub fn experiment(args: &ExperimentArgs) -> Result<(), CliError> {
    let (file, out) = load(&args.common)?;
    let thetas = theta_grid_deg(&args.theta, &file, 9)?;
    let trials: u64 = match args.trials {
        Some(t) => t,
        None => file
            .get("trials")?
            .ok_or_else(|| CliError::Config("`trials` must be given (flag --trials or config key)".into()))?,
    };
    let m_default = calibrated_mean(p_star(args.p_star, &file)?);
    let source = pick_enum(args.source, &file, "source", Source::Coherent)?;
    let drift = pick_enum(args.drift, &file, "drift", Drift::Fast)?;
    let lasers = LaserPairConfig {
        mean_photons_1: pick(args.mean1, &file, "mean_photons_1", m_default)?,
        mean_photons_2: pick(args.mean2, &file, "mean_photons_2", m_default)?,
        lambda_1: pick(args.lambda1_nm, &file, "lambda1_nm", DEFAULT_LAMBDA_NM)? * 1e-9,
        lambda_2: pick(args.lambda2_nm, &file, "lambda2_nm", DEFAULT_LAMBDA_NM)? * 1e-9,
        chi_0: pick(args.chi0_deg, &file, "chi0_deg", 0.0)?.to_radians(),
        source_kind: match source {
            Source::Coherent => SourceKind::Coherent,
            Source::Poisson => SourceKind::Poisson,
        },
    };
    let det = DetectorModel {
        efficiency: pick(args.eta, &file, "eta", 1.0)?,
        dark_mean_photons: pick(args.dark_mean, &file, "dark_mean", 0.0)?,
        window: pick(args.window_fs, &file, "window_fs", 0.0)? * 1e-15,
        dead_time: pick(args.dead_ns, &file, "dead_ns", 0.0)? * 1e-9,
    };
    let plan = TrialPlan {
        theta_grid: thetas.iter().map(|d| d.to_radians()).collect(),
        trials_per_theta: trials,
        seed: pick(args.seed, &file, "seed", 0)?,
    };
    let drift = match drift {
        Drift::Fast => DriftMode::Fast,
        Drift::Frozen => DriftMode::Frozen,
        Drift::Clock => DriftMode::Clock,
    };
    let records = run_sweep(&plan, &lasers, &det, drift).map_err(|e| match e {
        vbsim_core::Error::InvalidConfig(m) => CliError::Config(m),
        e => CliError::Domain(e),
    })?;

    let rows = records
        .iter()
        .zip(&thetas)
        .map(|(r, &deg)| vec![num(deg), r.trials.to_string(), r.clicks.to_string(), num(r.p_hat), num(r.std_err)]);
    let mut bytes = csv_bytes(&["theta_deg", "trials", "clicks", "p_hat", "std_err"], rows)?;

    let calib = 0.5 * (lasers.mean_photons_1 + lasers.mean_photons_2);
    let outcome = classify_curve(&records, calib);
    let trailer = match &outcome {
        Ok(c) => {
            let chi = match c.verdict {
                Verdict::Coherent { chi_hat } => format!(",chi_hat_deg={}", num(chi_hat.to_degrees())),
                _ => String::new(),
            };
            format!(
                "# verdict={}{chi},m_coherent={},chi_coherent_deg={},rss_coherent={},m_poisson={},rss_poisson={}\n",
                c.verdict.label(),
                num(c.coherent.mean_photons),
                num(c.coherent.chi.to_degrees()),
                num(c.coherent.rss),
                num(c.poisson.mean_photons),
                num(c.poisson.rss),
            )
        }
        Err(e) => format!("# verdict=none,reason={}\n", e.to_string().replace(['\n', ','], " ")),
    };
    bytes.extend_from_slice(trailer.as_bytes());
    write_output(out.as_deref(), &bytes)?;
    outcome.map(|_| ()).map_err(CliError::Domain)
}

pub fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    let results = run_verification(args.seed.unwrap_or(DEFAULT_VERIFY_SEED))?;
    let mut failed = 0;
    let mut worst: f64 = 0.0;
    for r in &results {
        let (op, bound) = match r.bound {
            Bound::AtMost(t) => ("<=", t),
            Bound::Above(t) => (">", t),
        };
        if matches!(r.bound, Bound::AtMost(_)) {
            worst = worst.max(r.value);
        }
        if !r.passed() {
            failed += 1;
        }
        println!("{}  {:.3e} {op} {:.0e}  {}", if r.passed() { "PASS" } else { "FAIL" }, r.value, bound, r.name);
    }
    println!("{} checks, {failed} failed, max residual {worst:.3e}", results.len());

    if let Some(path) = &args.out {
        let rows = results.iter().map(|r| {
            let bound = match r.bound {
                Bound::AtMost(t) => format!("<={}", num(t)),
                Bound::Above(t) => format!(">{}", num(t)),
            };
            vec![r.name.to_string(), num(r.value), bound, r.passed().to_string()]
        });
        write_output(Some(path), &csv_bytes(&["check", "value", "bound", "passed"], rows)?)?;
    }
    if failed > 0 {
        return Err(CliError::VerifyFailed(failed));
    }
    Ok(())
}
