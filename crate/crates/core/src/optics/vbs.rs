//! The beam-splitter unitary `exp(θ(a†b − ab†))`, assembled one
//! total-photon-number block at a time.

use std::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::BeamSplitterSetting;
use crate::error::{Error, Result};
use crate::fock::{TwoModeState, ZERO};

/// One `N = n + m` sector. Rows and columns are indexed by the first-mode
/// occupation `n`, offset by `n_range.start`.
#[derive(Debug, Clone, PartialEq)]
pub struct VbsBlock {
    total: usize,
    n_range: Range<usize>,
    matrix: DMatrix<f64>,
}

impl VbsBlock {
    pub fn total(&self) -> usize {
        self.total
    }

    /// First-mode occupations present in this sector.
    pub fn n_range(&self) -> Range<usize> {
        self.n_range.clone()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// True when every `|n, N−n⟩` with `0 ≤ n ≤ N` fits inside the
    /// truncated space, i.e. the block is the exact physical one.
    pub fn is_complete(&self) -> bool {
        self.n_range.start == 0 && self.n_range.end == self.total + 1
    }

    /// `max |UᵀU − I|`.
    pub fn unitarity_residual(&self) -> f64 {
        let g = self.matrix.transpose() * &self.matrix;
        let mut worst = 0.0_f64;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }
}

/// Block-diagonal two-mode unitary on a truncated `dim_a × dim_b` space.
///
/// Sectors with `N ≤ min(dim_a, dim_b) − 1` are complete and exact. Higher
/// sectors are cut by the truncation; there the generator is restricted to
/// the surviving basis states, which keeps each block orthogonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeUnitary {
    dim_a: usize,
    dim_b: usize,
    blocks: Vec<VbsBlock>,
}

fn sector_range(total: usize, dim_a: usize, dim_b: usize) -> Range<usize> {
    let lo = total.saturating_sub(dim_b - 1);
    let hi = total.min(dim_a - 1);
    lo..hi + 1
}

/// Real antisymmetric generator `a†b − ab†` restricted to one sector.
fn sector_generator(total: usize, range: &Range<usize>) -> DMatrix<f64> {
    let len = range.len();
    let mut k = DMatrix::zeros(len, len);
    for (i, n) in range.clone().enumerate() {
        let m = total - n;
        // a†b |n, m⟩ = √((n+1)m) |n+1, m−1⟩
        if i + 1 < len {
            k[(i + 1, i)] = (((n + 1) * m) as f64).sqrt();
        }
        // ab† |n, m⟩ = √(n(m+1)) |n−1, m+1⟩
        if i > 0 {
            k[(i - 1, i)] = -((n * (m + 1)) as f64).sqrt();
        }
    }
    k
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Scaling-and-squaring Taylor exponential, sized for the small sector
/// blocks (at most a few dozen rows).
fn expm_small(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = one_norm(a);
    let mut squarings = 0u32;
    while norm / f64::from(1u32 << squarings.min(31)) > 0.125 && squarings < 60 {
        squarings += 1;
    }
    let scaled = a / 2f64.powi(squarings as i32);
    let mut result = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=20 {
        term = &term * &scaled / k as f64;
        result += &term;
        if one_norm(&term) <= f64::EPSILON * 1e-3 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// `B_θ = exp(θ(a†b − ab†))` on a `dim_a × dim_b` truncated space.
///
/// Sign convention: `B a B† = a cos θ − b sin θ`, so that
/// `B|α⟩|β⟩ = |α cos θ + β sin θ⟩|−α sin θ + β cos θ⟩`.
pub fn build_vbs(setting: BeamSplitterSetting, dim_a: usize, dim_b: usize) -> Result<TwoModeUnitary> {
    if dim_a < 2 || dim_b < 2 {
        return Err(Error::InvalidParameter(format!("mode dimensions must be >= 2, got {dim_a}x{dim_b}")));
    }
    let theta = setting.theta();
    let blocks = (0..dim_a + dim_b - 1)
        .into_par_iter()
        .map(|total| {
            let n_range = sector_range(total, dim_a, dim_b);
            let gen = sector_generator(total, &n_range) * theta;
            VbsBlock { total, n_range, matrix: expm_small(&gen) }
        })
        .collect();
    Ok(TwoModeUnitary { dim_a, dim_b, blocks })
}

impl TwoModeUnitary {
    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn blocks(&self) -> &[VbsBlock] {
        &self.blocks
    }

    pub fn block(&self, total: usize) -> Option<&VbsBlock> {
        self.blocks.get(total)
    }

    /// Index range (in first-mode occupation) of the sector with total
    /// photon number `total`.
    pub fn block_index(&self, total: usize) -> Option<Range<usize>> {
        self.block(total).map(VbsBlock::n_range)
    }

    /// Largest total photon number whose sector is represented exactly.
    pub fn exact_up_to(&self) -> usize {
        self.dim_a.min(self.dim_b) - 1
    }

    /// `⟨n, m| U |n', m'⟩`; zero across different sectors.
    pub fn element(&self, n: usize, m: usize, n_prime: usize, m_prime: usize) -> f64 {
        if n + m != n_prime + m_prime || n >= self.dim_a || m >= self.dim_b || n_prime >= self.dim_a || m_prime >= self.dim_b {
            return 0.0;
        }
        let b = &self.blocks[n + m];
        b.matrix[(n - b.n_range.start, n_prime - b.n_range.start)]
    }

    /// Dense matrix in the lexicographic two-mode basis.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let d = self.dim_a * self.dim_b;
        let mut out = DMatrix::from_element(d, d, ZERO);
        for b in &self.blocks {
            let idx = self.sector_indices(b);
            for (i, &gi) in idx.iter().enumerate() {
                for (j, &gj) in idx.iter().enumerate() {
                    out[(gi, gj)] = Complex64::new(b.matrix[(i, j)], 0.0);
                }
            }
        }
        out
    }

    fn sector_indices(&self, b: &VbsBlock) -> Vec<usize> {
        b.n_range.clone().map(|n| n * self.dim_b + (b.total - n)).collect()
    }

    /// Worst `max |U_N† U_N − I|` over all sectors.
    pub fn unitarity_residual(&self) -> f64 {
        self.blocks.iter().map(VbsBlock::unitarity_residual).fold(0.0, f64::max)
    }

    /// Sector-wise product `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if (self.dim_a, self.dim_b) != (other.dim_a, other.dim_b) {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", self.dim_a, self.dim_b),
                found: format!("{}x{}", other.dim_a, other.dim_b),
            });
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| VbsBlock { total: a.total, n_range: a.n_range.clone(), matrix: &a.matrix * &b.matrix })
            .collect();
        Ok(Self { dim_a: self.dim_a, dim_b: self.dim_b, blocks })
    }

    /// Entrywise distance between two unitaries of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(a, b)| a.matrix.iter().zip(b.matrix.iter()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    /// `U ρ U†`, computed sector pair by sector pair.
    pub fn apply(&self, rho: &TwoModeState) -> Result<TwoModeState> {
        if (rho.dim_a(), rho.dim_b()) != (self.dim_a, self.dim_b) {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", self.dim_a, self.dim_b),
                found: format!("{}x{}", rho.dim_a(), rho.dim_b()),
            });
        }
        let indices: Vec<Vec<usize>> = self.blocks.iter().map(|b| self.sector_indices(b)).collect();
        let complex_blocks: Vec<DMatrix<Complex64>> =
            self.blocks.iter().map(|b| b.matrix.map(|x| Complex64::new(x, 0.0))).collect();
        let src = rho.entries();

        // Each row sector is independent; results are scattered afterwards so
        // the output does not depend on scheduling.
        let rows: Vec<Vec<DMatrix<Complex64>>> = (0..self.blocks.len())
            .into_par_iter()
            .map(|r| {
                let ri = &indices[r];
                (0..self.blocks.len())
                    .map(|c| {
                        let ci = &indices[c];
                        let sub = DMatrix::from_fn(ri.len(), ci.len(), |i, j| src[(ri[i], ci[j])]);
                        if sub.iter().all(|z| *z == ZERO) {
                            return sub;
                        }
                        &complex_blocks[r] * sub * complex_blocks[c].transpose()
                    })
                    .collect()
            })
            .collect();

        let mut out = rho.clone();
        let dst = out.entries_mut();
        for (r, row) in rows.into_iter().enumerate() {
            for (c, blk) in row.into_iter().enumerate() {
                for (i, &gi) in indices[r].iter().enumerate() {
                    for (j, &gj) in indices[c].iter().enumerate() {
                        dst[(gi, gj)] = blk[(i, j)];
                    }
                }
            }
        }
        Ok(out)
    }
}

/// `B_θ ρ B_θ†` for a two-mode state.
pub fn apply_vbs(setting: BeamSplitterSetting, rho: &TwoModeState) -> Result<TwoModeState> {
    build_vbs(setting, rho.dim_a(), rho.dim_b())?.apply(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn bs(theta: f64) -> BeamSplitterSetting {
        BeamSplitterSetting::new(theta).unwrap()
    }

    #[test]
    fn zero_angle_is_identity() {
        let u = build_vbs(bs(0.0), 6, 5).unwrap();
        let d = u.to_dense();
        for i in 0..30 {
            for j in 0..30 {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((d[(i, j)].re - target).abs() < 1e-15 && d[(i, j)].im == 0.0);
            }
        }
    }

    #[test]
    fn single_photon_sector_at_quarter_turn() {
        let u = build_vbs(bs(FRAC_PI_2), 4, 4).unwrap();
        // a' = a cos θ − b sin θ sends |1,0⟩ → −|0,1⟩ and |0,1⟩ → |1,0⟩
        assert!((u.element(0, 1, 1, 0) + 1.0).abs() < 1e-14);
        assert!((u.element(1, 0, 0, 1) - 1.0).abs() < 1e-14);
        assert!(u.element(1, 0, 1, 0).abs() < 1e-14);
    }

    #[test]
    fn single_photon_sector_is_rotation() {
        let theta = 0.37;
        let u = build_vbs(bs(theta), 3, 3).unwrap();
        assert!((u.element(1, 0, 1, 0) - theta.cos()).abs() < 1e-15);
        assert!((u.element(0, 1, 1, 0) + theta.sin()).abs() < 1e-15);
        assert!((u.element(1, 0, 0, 1) - theta.sin()).abs() < 1e-15);
    }

    #[test]
    fn group_law() {
        let u1 = build_vbs(bs(0.3), 12, 12).unwrap();
        let u2 = build_vbs(bs(0.5), 12, 12).unwrap();
        let u12 = build_vbs(bs(0.8), 12, 12).unwrap();
        assert!(u1.compose(&u2).unwrap().max_abs_diff(&u12) < 1e-12);
    }

    #[test]
    fn blocks_unitary_on_angle_grid() {
        for k in 0..32 {
            let theta = TAU * k as f64 / 32.0;
            let u = build_vbs(bs(theta), 20, 20).unwrap();
            assert!(u.unitarity_residual() <= 1e-12, "theta {theta}: {}", u.unitarity_residual());
        }
    }

    #[test]
    fn block_structure() {
        let u = build_vbs(bs(1.0), 4, 3).unwrap();
        assert_eq!(u.blocks().len(), 6);
        assert_eq!(u.block_index(0), Some(0..1));
        assert_eq!(u.block_index(3), Some(1..4));
        assert_eq!(u.block_index(5), Some(3..4));
        assert_eq!(u.exact_up_to(), 2);
        assert!(u.block(2).unwrap().is_complete());
        assert!(!u.block(3).unwrap().is_complete());
        // different sectors never couple
        let d = u.to_dense();
        for i in 0..12 {
            for j in 0..12 {
                if i / 3 + i % 3 != j / 3 + j % 3 {
                    assert_eq!(d[(i, j)], ZERO);
                }
            }
        }
    }

    #[test]
    fn rejects_tiny_dimensions() {
        assert!(build_vbs(bs(0.1), 1, 4).is_err());
    }

    #[test]
    fn half_turn_flips_odd_sectors() {
        // B_π = (−1)^{a†a}-like parity map: a → −a, b → −b
        let u = build_vbs(bs(PI), 6, 6).unwrap();
        assert!((u.element(1, 0, 1, 0) + 1.0).abs() < 1e-13);
        assert!((u.element(1, 1, 1, 1) - 1.0).abs() < 1e-13);
    }
}
