//! Modified Bessel function `I₀` and the series identities that follow from
//! summing the Poisson-input vacuum probability two different ways.

use super::dd::DoubleDouble;
use crate::error::{Error, Result};

/// Arguments at or beyond this magnitude are rejected; `I₀(700)` is already
/// within a few decades of `f64::MAX`.
pub const BESSEL_I0_LIMIT: f64 = 700.0;

/// `I₀(x) = Σ (x²/4)ⁿ / (n!)²`, summed until a term falls below `1e-16` of
/// the running total.
pub fn bessel_i0(x: f64) -> Result<f64> {
    if !(x.abs() < BESSEL_I0_LIMIT) {
        return Err(Error::BesselOverflow(x));
    }
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > 1e-16 * sum {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
    }
    Ok(sum)
}

/// Left-hand sides of the three series identities together with their
/// common closed form `e^{A²+B²} I₀(2AB)`.
///
/// All sums are carried out in double-double arithmetic so that the
/// absolute residual is meaningful even when the closed form is ~10⁶.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselIdentityCheck {
    /// `Σₙ (1/n!) Σₖ [C(n,k) A^{n−k} Bᵏ]²`
    pub binomial_form: f64,
    /// `Σₙ n! Σₖ [A^{n−k}/(n−k)! · Bᵏ/k!]²`
    pub factorial_form: f64,
    /// `Σₙ Σ_{k ≤ Kₙ} ((AB)ᵏ/k!)² (A²+B²)^{n−2k}/(n−2k)!`
    pub grouped_form: f64,
    pub closed_form: f64,
    residual: f64,
}

impl BesselIdentityCheck {
    pub fn lhs(&self) -> [f64; 3] {
        [self.binomial_form, self.factorial_form, self.grouped_form]
    }

    /// Largest absolute difference between any left side and the closed
    /// form, evaluated before rounding to `f64`.
    pub fn max_residual(&self) -> f64 {
        self.residual
    }
}

/// `Kₙ = (n + ((−1)ⁿ − 1)/2)/2`, i.e. `⌊n/2⌋`.
fn k_n(n: usize) -> usize {
    let sign: i64 = if n % 2 == 0 { 1 } else { -1 };
    ((n as i64 + (sign - 1) / 2) / 2) as usize
}

/// Evaluates the three series with `n = 0..=n_terms` and compares them with
/// the closed form.
pub fn check_bessel_identities(a: f64, b: f64, n_terms: usize) -> Result<BesselIdentityCheck> {
    if !(a.is_finite() && b.is_finite()) || a.abs() > 5.0 || b.abs() > 5.0 {
        return Err(Error::InvalidParameter(format!("identity check needs |A|, |B| <= 5, got ({a}, {b})")));
    }
    let one = DoubleDouble::from(1.0);
    let a_dd = DoubleDouble::from(a);
    let b_dd = DoubleDouble::from(b);

    // powers and inverse factorials up to n_terms
    let mut pow_a = vec![one; n_terms + 1];
    let mut pow_b = vec![one; n_terms + 1];
    let mut inv_fact = vec![one; n_terms + 1];
    let mut fact = vec![one; n_terms + 1];
    for k in 1..=n_terms {
        pow_a[k] = pow_a[k - 1] * a_dd;
        pow_b[k] = pow_b[k - 1] * b_dd;
        fact[k] = fact[k - 1] * DoubleDouble::from(k as f64);
        inv_fact[k] = inv_fact[k - 1] / DoubleDouble::from(k as f64);
    }

    let mut binomial_form = DoubleDouble::ZERO;
    let mut factorial_form = DoubleDouble::ZERO;
    for n in 0..=n_terms {
        let mut inner_binom = DoubleDouble::ZERO;
        let mut inner_fact = DoubleDouble::ZERO;
        for k in 0..=n {
            let binom = fact[n] * inv_fact[k] * inv_fact[n - k];
            let x = binom * pow_a[n - k] * pow_b[k];
            inner_binom += x * x;
            let y = pow_a[n - k] * inv_fact[n - k] * pow_b[k] * inv_fact[k];
            inner_fact += y * y;
        }
        binomial_form += inner_binom * inv_fact[n];
        factorial_form += inner_fact * fact[n];
    }

    let q = a_dd * a_dd + b_dd * b_dd;
    let r = a_dd * b_dd;
    let mut pow_q = vec![one; n_terms + 1];
    let mut pow_r = vec![one; n_terms + 1];
    for k in 1..=n_terms {
        pow_q[k] = pow_q[k - 1] * q;
        pow_r[k] = pow_r[k - 1] * r;
    }
    let mut grouped_form = DoubleDouble::ZERO;
    for n in 0..=n_terms {
        for k in 0..=k_n(n) {
            let rk = pow_r[k] * inv_fact[k];
            grouped_form += rk * rk * pow_q[n - 2 * k] * inv_fact[n - 2 * k];
        }
    }

    // e^{Q} and I₀(2R) = Σ (R²)ᵏ/(k!)², both as plain series in Q, R² ≤ 50
    let closed = exp_series(q) * i0_series_of_square(r * r);
    let residual = [binomial_form, factorial_form, grouped_form]
        .iter()
        .map(|lhs| (*lhs - closed).abs().to_f64())
        .fold(0.0, f64::max);

    Ok(BesselIdentityCheck {
        binomial_form: binomial_form.to_f64(),
        factorial_form: factorial_form.to_f64(),
        grouped_form: grouped_form.to_f64(),
        closed_form: closed.to_f64(),
        residual,
    })
}

fn exp_series(x: DoubleDouble) -> DoubleDouble {
    let mut term = DoubleDouble::from(1.0);
    let mut sum = term;
    let mut k = 1.0;
    while term.to_f64().abs() > 1e-34 * sum.to_f64().abs() {
        term = term * x / DoubleDouble::from(k);
        sum += term;
        k += 1.0;
    }
    sum
}

/// `Σ zᵏ/(k!)²` with `z = x²/4`, i.e. `I₀(x)`.
fn i0_series_of_square(z: DoubleDouble) -> DoubleDouble {
    let mut term = DoubleDouble::from(1.0);
    let mut sum = term;
    let mut k = 1.0;
    while term.to_f64() > 1e-34 * sum.to_f64() {
        term = term * z / DoubleDouble::from(k * k);
        sum += term;
        k += 1.0;
    }
    sum
}
