//! Truncated Fock-space density matrices for one and two bosonic modes.
//!
//! Every state carries the [`Truncation`] it was built with, so callers can
//! tell how much probability mass was discarded by the finite cutoff. Two-mode
//! states use the lexicographic basis `|n⟩⊗|m⟩ ↦ n·dim_b + m` (first mode
//! major).

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default probability mass allowed beyond the cutoff.
pub const DEFAULT_TAIL_TOL: f64 = 1e-14;

/// Largest two-mode Hilbert-space dimension (`dim_a · dim_b`) a dense state
/// may occupy. At this size a density matrix takes 256 MiB.
pub const MAX_TWO_MODE_DIM: usize = 4096;

const HERMITICITY_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = -1e-10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
#[cfg(test)]
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `ln(n!)`, tabulated on first use.
pub fn ln_factorial(n: usize) -> f64 {
    const TABLE_LEN: usize = 1024;
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut out = Vec::with_capacity(TABLE_LEN);
        // Exact products while they fit in a double, then a running sum of logs.
        let mut exact = 1.0_f64;
        let mut acc = 0.0_f64;
        for k in 0..TABLE_LEN {
            if k > 0 {
                if k <= 20 {
                    exact *= k as f64;
                    acc = exact.ln();
                } else {
                    acc += (k as f64).ln();
                }
            }
            out.push(acc);
        }
        out
    });
    match table.get(n) {
        Some(v) => *v,
        None => table[TABLE_LEN - 1] + ((TABLE_LEN as u64)..=(n as u64)).map(|k| (k as f64).ln()).sum::<f64>(),
    }
}

/// Poisson weights `e^{-λ} λ^n / n!` for `n = 0..=n_max`.
pub fn poisson_weights(mean: f64, n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut w = (-mean).exp();
    out.push(w);
    for n in 1..=n_max {
        w *= mean / n as f64;
        out.push(w);
    }
    out
}

/// Poisson probability mass strictly above `n_max`, summed directly so that
/// tails far below machine epsilon stay accurate.
pub fn poisson_tail(mean: f64, n_max: usize) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    let k0 = n_max + 1;
    let mut term = (-mean + k0 as f64 * mean.ln() - ln_factorial(k0)).exp();
    let mut sum = 0.0;
    let mut k = k0;
    loop {
        sum += term;
        k += 1;
        term *= mean / k as f64;
        if (k as f64) > mean && term <= sum * 1e-18 {
            break;
        }
        if term == 0.0 {
            break;
        }
    }
    sum
}

/// Bose-Einstein mass strictly above `n_max`: `(n̄/(1+n̄))^{n_max+1}`.
pub fn thermal_tail(mean: f64, n_max: usize) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    (mean / (1.0 + mean)).powi(n_max as i32 + 1)
}

/// Fock cutoff and the tail mass it is allowed to drop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    n_max: usize,
    tail_tol: f64,
}

impl Truncation {
    pub fn new(n_max: usize, tail_tol: f64) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidTruncation(format!("n_max must be >= 1, got {n_max}")));
        }
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::InvalidTruncation(format!("tail_tol must lie in (0, 1), got {tail_tol}")));
        }
        Ok(Self { n_max, tail_tol })
    }

    pub fn with_default_tol(n_max: usize) -> Result<Self> {
        Self::new(n_max, DEFAULT_TAIL_TOL)
    }

    /// Smallest cutoff whose Poisson tail for `mean` is below `tail_tol`.
    pub fn for_mean(mean: f64, tail_tol: f64) -> Result<Self> {
        check_mean(mean)?;
        let mut trunc = Self::new(1, tail_tol)?;
        while poisson_tail(mean, trunc.n_max) >= tail_tol {
            trunc.n_max += 1;
        }
        Ok(trunc)
    }

    /// Smallest cutoff whose thermal tail for mean occupation `mean` is
    /// below `tail_tol`.
    pub fn for_thermal(mean: f64, tail_tol: f64) -> Result<Self> {
        check_mean(mean)?;
        let mut trunc = Self::new(1, tail_tol)?;
        while thermal_tail(mean, trunc.n_max) >= tail_tol {
            trunc.n_max += 1;
        }
        Ok(trunc)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    /// Same tolerance, different cutoff.
    pub fn with_n_max(&self, n_max: usize) -> Result<Self> {
        Self::new(n_max, self.tail_tol)
    }

    /// Fails when a Poisson distribution of the given mean leaks more than
    /// `tail_tol` beyond the cutoff.
    pub fn require_poisson(&self, mean: f64) -> Result<()> {
        let tail = poisson_tail(mean, self.n_max);
        if tail >= self.tail_tol {
            return Err(Error::TruncationTooSmall { n_max: self.n_max, tail, tail_tol: self.tail_tol });
        }
        Ok(())
    }

    pub fn require_thermal(&self, mean: f64) -> Result<()> {
        let tail = thermal_tail(mean, self.n_max);
        if tail >= self.tail_tol {
            return Err(Error::TruncationTooSmall { n_max: self.n_max, tail, tail_tol: self.tail_tol });
        }
        Ok(())
    }
}

pub(crate) fn check_mean(mean: f64) -> Result<()> {
    if !(mean.is_finite() && mean >= 0.0) {
        return Err(Error::InvalidParameter(format!("mean photon number must be finite and >= 0, got {mean}")));
    }
    Ok(())
}

/// Sanity report for a density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// `1 − Re tr ρ`.
    pub trace_deficit: f64,
    /// `max |ρ − ρ†|` entrywise.
    pub hermiticity_residual: f64,
    /// Smallest eigenvalue of the Hermitian part `(ρ + ρ†)/2`.
    pub min_eigenvalue: f64,
}

impl Diagnostics {
    fn of(m: &DMatrix<Complex64>) -> Self {
        let trace_deficit = 1.0 - m.trace().re;
        let adj = m.adjoint();
        let hermiticity_residual = m.iter().zip(adj.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        let herm = (m + &adj).scale(0.5);
        let min_eigenvalue = herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        Self { trace_deficit, hermiticity_residual, min_eigenvalue }
    }

    /// `dim` bounds the rounding error of the trace, which is allowed on top
    /// of the truncation tail.
    fn check(&self, tail_tol: f64, dim: usize) -> Result<()> {
        if self.hermiticity_residual > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (residual {:e})", self.hermiticity_residual)));
        }
        if self.trace_deficit.abs() > tail_tol + dim as f64 * f64::EPSILON {
            return Err(Error::InvalidState(format!("trace deficit {:e} exceeds tail_tol {:e}", self.trace_deficit, tail_tol)));
        }
        if self.min_eigenvalue < POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {:e}", self.min_eigenvalue)));
        }
        Ok(())
    }
}

fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Density matrix of one mode in the Fock basis `|0⟩ … |n_max⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleModeState {
    entries: DMatrix<Complex64>,
    trunc: Truncation,
}

impl SingleModeState {
    pub fn from_matrix(entries: DMatrix<Complex64>, trunc: Truncation) -> Result<Self> {
        let d = trunc.dim();
        if entries.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: format!("{d}x{d}"),
                found: format!("{}x{}", entries.nrows(), entries.ncols()),
            });
        }
        Ok(Self { entries, trunc })
    }

    pub fn vacuum(trunc: Truncation) -> Self {
        let mut weights = vec![0.0; trunc.dim()];
        weights[0] = 1.0;
        Self::from_diagonal(&weights, trunc)
    }

    pub(crate) fn from_diagonal(weights: &[f64], trunc: Truncation) -> Self {
        debug_assert_eq!(weights.len(), trunc.dim());
        let d = trunc.dim();
        let entries = DMatrix::from_fn(d, d, |i, j| if i == j { Complex64::new(weights[i], 0.0) } else { ZERO });
        Self { entries, trunc }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trunc(&self) -> Truncation {
        self.trunc
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn get(&self, n: usize, n_prime: usize) -> Complex64 {
        self.entries[(n, n_prime)]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ ρ_ij ρ_ji
        let d = self.dim();
        let mut acc = ZERO;
        for i in 0..d {
            for j in 0..d {
                acc += self.entries[(i, j)] * self.entries[(j, i)];
            }
        }
        acc.re
    }

    /// Real diagonal of the matrix (occupation probabilities).
    pub fn populations(&self) -> Vec<f64> {
        self.entries.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn mean_photons(&self) -> f64 {
        self.populations().iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    pub fn vacuum_probability(&self) -> f64 {
        vacuum_probability(self)
    }

    pub fn diagnostics(&self) -> Diagnostics {
        Diagnostics::of(&self.entries)
    }

    /// Errors when the Hermiticity, trace or positivity bounds are violated.
    pub fn check(&self) -> Result<()> {
        self.diagnostics().check(self.trunc.tail_tol, self.dim())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.entries, &other.entries)
    }

    /// Largest magnitude among the entries off the main diagonal.
    pub fn max_off_diagonal(&self) -> f64 {
        let d = self.dim();
        let mut best = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    best = best.max(self.entries[(i, j)].norm());
                }
            }
        }
        best
    }

    /// Copy into a larger (zero-padded) or smaller (cut) Fock space.
    pub fn resized(&self, trunc: Truncation) -> Self {
        let d = trunc.dim();
        let keep = d.min(self.dim());
        let mut entries = DMatrix::from_element(d, d, ZERO);
        entries.view_mut((0, 0), (keep, keep)).copy_from(&self.entries.view((0, 0), (keep, keep)));
        Self { entries, trunc }
    }
}

/// Joint density matrix of two modes, basis `|n⟩⊗|m⟩` ordered with the
/// first mode major.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    entries: DMatrix<Complex64>,
    trunc_a: Truncation,
    trunc_b: Truncation,
}

impl TwoModeState {
    pub fn from_matrix(entries: DMatrix<Complex64>, trunc_a: Truncation, trunc_b: Truncation) -> Result<Self> {
        let d = trunc_a.dim() * trunc_b.dim();
        if d > MAX_TWO_MODE_DIM {
            return Err(Error::ResourceLimit { dim: d, limit: MAX_TWO_MODE_DIM });
        }
        if entries.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: format!("{d}x{d}"),
                found: format!("{}x{}", entries.nrows(), entries.ncols()),
            });
        }
        Ok(Self { entries, trunc_a, trunc_b })
    }

    pub fn dim_a(&self) -> usize {
        self.trunc_a.dim()
    }

    pub fn dim_b(&self) -> usize {
        self.trunc_b.dim()
    }

    pub fn trunc_a(&self) -> Truncation {
        self.trunc_a
    }

    pub fn trunc_b(&self) -> Truncation {
        self.trunc_b
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut DMatrix<Complex64> {
        &mut self.entries
    }

    #[inline]
    pub fn index(&self, n: usize, m: usize) -> usize {
        n * self.dim_b() + m
    }

    /// `⟨n, m| ρ |n', m'⟩`.
    pub fn get(&self, n: usize, m: usize, n_prime: usize, m_prime: usize) -> Complex64 {
        self.entries[(self.index(n, m), self.index(n_prime, m_prime))]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Expectation value of the total number operator `a†a + b†b`.
    pub fn mean_total_photons(&self) -> f64 {
        let db = self.dim_b();
        self.entries.diagonal().iter().enumerate().map(|(i, z)| ((i / db) + (i % db)) as f64 * z.re).sum()
    }

    pub fn diagnostics(&self) -> Diagnostics {
        Diagnostics::of(&self.entries)
    }

    pub fn check(&self) -> Result<()> {
        let tol = self.trunc_a.tail_tol.max(self.trunc_b.tail_tol);
        self.diagnostics().check(2.0 * tol, self.entries.nrows())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.entries, &other.entries)
    }

    /// Like [`max_abs_diff`](Self::max_abs_diff), restricted to basis pairs
    /// whose total photon numbers are both at most `n_total`.
    pub fn max_abs_diff_within_total(&self, other: &Self, n_total: usize) -> f64 {
        assert_eq!(self.entries.shape(), other.entries.shape(), "shape mismatch");
        let db = self.dim_b();
        let total = |i: usize| i / db + i % db;
        let d = self.entries.nrows();
        let mut best = 0.0_f64;
        for i in (0..d).filter(|&i| total(i) <= n_total) {
            for j in (0..d).filter(|&j| total(j) <= n_total) {
                best = best.max((self.entries[(i, j)] - other.entries[(i, j)]).norm());
            }
        }
        best
    }
}

/// `ρ_a ⊗ ρ_b` in the lexicographic two-mode basis.
pub fn tensor_product(a: &SingleModeState, b: &SingleModeState) -> Result<TwoModeState> {
    if a.trunc.tail_tol != b.trunc.tail_tol {
        return Err(Error::InvalidTruncation(format!(
            "tensor factors must share tail_tol ({:e} vs {:e})",
            a.trunc.tail_tol, b.trunc.tail_tol
        )));
    }
    let (da, db) = (a.dim(), b.dim());
    if da * db > MAX_TWO_MODE_DIM {
        return Err(Error::ResourceLimit { dim: da * db, limit: MAX_TWO_MODE_DIM });
    }
    let entries = a.entries.kronecker(&b.entries);
    TwoModeState::from_matrix(entries, a.trunc, b.trunc)
}

/// `tr₂ ρ`: `out[n, n'] = Σ_k ρ[(n,k), (n',k)]`.
pub fn partial_trace_second(rho: &TwoModeState) -> SingleModeState {
    let (da, db) = (rho.dim_a(), rho.dim_b());
    let out = DMatrix::from_fn(da, da, |n, np| {
        (0..db).map(|k| rho.entries[(n * db + k, np * db + k)]).sum::<Complex64>()
    });
    SingleModeState { entries: out, trunc: rho.trunc_a }
}

/// `⟨0|ρ|0⟩`.
pub fn vacuum_probability(rho: &SingleModeState) -> f64 {
    let z = rho.entries[(0, 0)];
    debug_assert!(z.im.abs() <= 1e-12, "vacuum population has imaginary part {}", z.im);
    z.re
}
