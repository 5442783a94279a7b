//! Monte Carlo estimates of `E[max(Y₁, Y₂, 0)]`, used as an independent
//! check of the closed form, and the factorial comparison grid.

use serde::{Deserialize, Serialize};

use crate::error::{finite, positive, Error, Result};
use crate::normal::Correlation;
use crate::rng::{derive_seed, Stream};
use crate::unli::{unli_2d, BvnParams};

/// A Monte Carlo mean with its standard error (unbiased sample variance
/// over `n`), and the seed that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
    pub seed: u64,
}

/// Running mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub(crate) fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub(crate) fn mean(&self) -> f64 {
        self.mean
    }

    pub(crate) fn sample_variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub(crate) fn estimate(&self, seed: u64) -> McEstimate {
        McEstimate {
            mean: self.mean,
            std_error: (self.sample_variance() / self.n as f64).sqrt(),
            n: self.n,
            seed,
        }
    }
}

/// Draws from a bivariate normal:
/// `Y₁ = μ₁ + σ₁Z₁`, `Y₂ = μ₂ + σ₂(ρZ₁ + sqrt(1-ρ²)Z₂)`.
///
/// `Z₁, Z₂` are consecutive normals of a [`Stream`], so the sequence is
/// fixed by `(params, seed)`.
#[derive(Debug, Clone)]
pub struct BvnSampler {
    params: BvnParams,
    cond_scale: f64,
    stream: Stream,
    remaining: u64,
}

impl Iterator for BvnSampler {
    type Item = (f64, f64);

    fn next(&mut self) -> Option<(f64, f64)> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let z1 = self.stream.standard_normal();
        let z2 = self.stream.standard_normal();
        let p = &self.params;
        Some((
            p.mu1() + p.sigma1() * z1,
            p.mu2() + p.sigma2() * (p.rho() * z1 + self.cond_scale * z2),
        ))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (n, Some(n))
    }
}

pub fn sample_bvn(p: &BvnParams, n: u64, seed: u64) -> Result<BvnSampler> {
    if n == 0 {
        return Err(Error::Invalid("sample count must be at least 1".into()));
    }
    let rho = p.rho();
    Ok(BvnSampler {
        params: *p,
        cond_scale: ((1.0 - rho) * (1.0 + rho)).sqrt(),
        stream: Stream::new(seed),
        remaining: n,
    })
}

/// Monte Carlo estimate of `E[max(Y₁, Y₂, 0)]` from `n` draws.
pub fn mc_unli_2d(p: &BvnParams, n: u64, seed: u64) -> Result<McEstimate> {
    if n < 2 {
        return Err(Error::Invalid(
            "at least 2 draws are needed for a standard error".into(),
        ));
    }
    let mut acc = Moments::default();
    for (y1, y2) in sample_bvn(p, n, seed)? {
        acc.push(y1.max(y2).max(0.0));
    }
    Ok(acc.estimate(seed))
}

/// Factorial grid of `(μ₁, μ₂, σ₁², σ₂², ρ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub mu_values: Vec<f64>,
    pub var_values: Vec<f64>,
    pub rho_values: Vec<Correlation>,
}

impl Default for GridSpec {
    /// `μ ∈ {-2, 0, 2}`, `σ² ∈ {1, 3}`, `ρ ∈ {-0.75, -0.5, ..., 0.75}`: 252 cells.
    fn default() -> Self {
        let rho_values = (-3..=3)
            .map(|k| Correlation::new(0.25 * k as f64).expect("grid correlation"))
            .collect();
        Self {
            mu_values: vec![-2.0, 0.0, 2.0],
            var_values: vec![1.0, 3.0],
            rho_values,
        }
    }
}

impl GridSpec {
    pub fn new(mu_values: Vec<f64>, var_values: Vec<f64>, rho_values: Vec<f64>) -> Result<Self> {
        let rho_values = rho_values
            .into_iter()
            .map(Correlation::new)
            .collect::<Result<Vec<_>>>()?;
        let spec = Self {
            mu_values,
            var_values,
            rho_values,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu_values.is_empty() || self.var_values.is_empty() || self.rho_values.is_empty() {
            return Err(Error::Invalid("grid axes must be nonempty".into()));
        }
        for &m in &self.mu_values {
            finite("mu", m)?;
        }
        for &v in &self.var_values {
            positive("variance", v)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.mu_values.len().pow(2) * self.var_values.len().pow(2) * self.rho_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cells in table order: `μ₁` varies fastest, then `μ₂`, `σ₁²`, `σ₂²`,
    /// and `ρ` slowest.
    pub fn cells(&self) -> Result<Vec<GridCell>> {
        self.validate()?;
        let mut cells = Vec::with_capacity(self.len());
        for &rho in &self.rho_values {
            for &var2 in &self.var_values {
                for &var1 in &self.var_values {
                    for &mu2 in &self.mu_values {
                        for &mu1 in &self.mu_values {
                            let params =
                                BvnParams::from_variances(mu1, mu2, var1, var2, rho.get())?;
                            cells.push(GridCell {
                                mu1,
                                mu2,
                                var1,
                                var2,
                                rho: rho.get(),
                                params,
                            });
                        }
                    }
                }
            }
        }
        Ok(cells)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCell {
    pub mu1: f64,
    pub mu2: f64,
    pub var1: f64,
    pub var2: f64,
    pub rho: f64,
    pub params: BvnParams,
}

/// One row of the closed-form versus Monte Carlo comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub mu1: f64,
    pub mu2: f64,
    pub var1: f64,
    pub var2: f64,
    pub rho: f64,
    pub closed: f64,
    pub mc: f64,
    pub mc_se: f64,
    /// `closed - mc`
    pub diff: f64,
}

impl GridRow {
    pub fn within(&self, standard_errors: f64) -> bool {
        self.diff.abs() <= standard_errors * self.mc_se
    }
}

/// Evaluates the closed form and a Monte Carlo estimate on every cell.
///
/// Cell `c` uses seed `derive_seed(seed, c)`, so the table is the same
/// whether cells run serially or in parallel.
pub fn run_grid(grid: &GridSpec, n: u64, seed: u64) -> Result<Vec<GridRow>> {
    if n < 2 {
        return Err(Error::Invalid(
            "at least 2 draws per cell are needed".into(),
        ));
    }
    let cells = grid.cells()?;
    let row = |(index, cell): (usize, &GridCell)| -> Result<GridRow> {
        let closed = unli_2d(&cell.params).total;
        let mc = mc_unli_2d(&cell.params, n, derive_seed(seed, index as u64))?;
        Ok(GridRow {
            mu1: cell.mu1,
            mu2: cell.mu2,
            var1: cell.var1,
            var2: cell.var2,
            rho: cell.rho,
            closed,
            mc: mc.mean,
            mc_se: mc.std_error,
            diff: closed - mc.mean,
        })
    };

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        cells.par_iter().enumerate().map(row).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        cells.iter().enumerate().map(row).collect()
    }
}
