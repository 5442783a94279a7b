//! Unit normal loss integrals.
//!
//! In one dimension, `E[max(Y, 0)]` for `Y ~ N(μ, σ²)`. In two dimensions,
//! `E[max(Y₁, Y₂, 0)]` for a bivariate normal `(Y₁, Y₂)`, written as the sum
//! of four closed-form terms
//!
//! ```text
//! E[max(Y₁, Y₂, 0)] = u₁₂ + v₁₂ + u₂₁ + v₂₁
//! ```
//!
//! where `u_ij + v_ij = E[Y_i · 1{Y_i > 0, Y_i > Y_j}]`. The `u` term is the
//! boundary term of an integration by parts and the `v` term the remaining
//! integral, expressed through `Φ`, `φ` and `Φ₂`.
//!
//! [`literal`] evaluates the `v` term directly from the intermediate
//! quantities `α, β, a₁, b₁, a₂, b₂, t₁, t₂`. The production path in
//! [`v_term`] uses equivalent forms that stay finite as `σ_i - ρσ_j → 0`,
//! where `α` and `β` diverge.

pub mod literal;

use serde::{Deserialize, Serialize};

use crate::error::{finite, positive, Error, Result};
use crate::normal::{bvn_with_complement, cdf, pdf, Correlation};

/// Relative tolerance under which `σ_i - ρσ_j` is treated as exactly zero.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;

/// Mean, standard deviation and correlation of a bivariate normal
/// `(Y₁, Y₂)`, typically the incremental net benefits of two strategies
/// against a common reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBvnParams")]
pub struct BvnParams {
    mu1: f64,
    mu2: f64,
    sigma1: f64,
    sigma2: f64,
    rho: Correlation,
}

#[derive(Deserialize)]
struct RawBvnParams {
    mu1: f64,
    mu2: f64,
    sigma1: f64,
    sigma2: f64,
    rho: f64,
}

impl TryFrom<RawBvnParams> for BvnParams {
    type Error = Error;

    fn try_from(raw: RawBvnParams) -> Result<Self> {
        BvnParams::new(raw.mu1, raw.mu2, raw.sigma1, raw.sigma2, raw.rho)
    }
}

impl BvnParams {
    pub fn new(mu1: f64, mu2: f64, sigma1: f64, sigma2: f64, rho: f64) -> Result<Self> {
        Ok(Self {
            mu1: finite("mu1", mu1)?,
            mu2: finite("mu2", mu2)?,
            sigma1: positive("sigma1", sigma1)?,
            sigma2: positive("sigma2", sigma2)?,
            rho: Correlation::new(rho)?,
        })
    }

    /// Builds parameters from variances rather than standard deviations.
    pub fn from_variances(mu1: f64, mu2: f64, var1: f64, var2: f64, rho: f64) -> Result<Self> {
        positive("var1", var1)?;
        positive("var2", var2)?;
        Self::new(mu1, mu2, var1.sqrt(), var2.sqrt(), rho)
    }

    pub fn mu1(&self) -> f64 {
        self.mu1
    }

    pub fn mu2(&self) -> f64 {
        self.mu2
    }

    pub fn sigma1(&self) -> f64 {
        self.sigma1
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn rho(&self) -> f64 {
        self.rho.get()
    }

    pub fn correlation(&self) -> Correlation {
        self.rho
    }

    /// The same distribution with the two components relabelled.
    pub fn swapped(&self) -> Self {
        Self {
            mu1: self.mu2,
            mu2: self.mu1,
            sigma1: self.sigma2,
            sigma2: self.sigma1,
            rho: self.rho,
        }
    }

    /// Largest of `|μ₁|, |μ₂|, σ₁, σ₂`; the natural unit for absolute tolerances.
    pub fn scale(&self) -> f64 {
        self.mu1
            .abs()
            .max(self.mu2.abs())
            .max(self.sigma1)
            .max(self.sigma2)
    }

    fn oriented(&self, term: TermIndex) -> Oriented {
        let (mu_i, mu_j, sigma_i, sigma_j) = match term {
            TermIndex::OneTwo => (self.mu1, self.mu2, self.sigma1, self.sigma2),
            TermIndex::TwoOne => (self.mu2, self.mu1, self.sigma2, self.sigma1),
        };
        let rho = self.rho.get();
        Oriented {
            mu_i,
            mu_j,
            sigma_i,
            sigma_j,
            rho,
            sqrt_one_minus_rho2: ((1.0 - rho) * (1.0 + rho)).sqrt(),
        }
    }
}

/// Which of the two `(i, j)` orderings a term belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TermIndex {
    /// `i = 1, j = 2`
    OneTwo,
    /// `i = 2, j = 1`
    TwoOne,
}

impl TermIndex {
    pub fn new(i: usize, j: usize) -> Result<Self> {
        match (i, j) {
            (1, 2) => Ok(TermIndex::OneTwo),
            (2, 1) => Ok(TermIndex::TwoOne),
            _ => Err(Error::Invalid(format!(
                "term indices must be (1, 2) or (2, 1), got ({i}, {j})"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Oriented {
    mu_i: f64,
    mu_j: f64,
    sigma_i: f64,
    sigma_j: f64,
    rho: f64,
    sqrt_one_minus_rho2: f64,
}

impl Oriented {
    /// `σ_i - ρσ_j`
    fn slope(&self) -> f64 {
        self.sigma_i - self.rho * self.sigma_j
    }

    fn is_degenerate(&self) -> bool {
        self.slope().abs() <= DEGENERACY_TOLERANCE * self.sigma_i.max(self.sigma_j)
    }

    /// `(-σ_i μ_j + ρ σ_j μ_i) / (σ_i σ_j sqrt(1-ρ²))`, the argument shared by
    /// both `Φ` factors of the `u` term.
    fn boundary_argument(&self) -> f64 {
        (-self.sigma_i * self.mu_j + self.rho * self.sigma_j * self.mu_i)
            / (self.sigma_i * self.sigma_j * self.sqrt_one_minus_rho2)
    }
}

/// The closed-form intermediates of one `(i, j)` term. Only defined away
/// from the degenerate branch `σ_i = ρσ_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TermIntermediates {
    pub alpha: f64,
    pub beta: f64,
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    pub t1: f64,
    pub t2: f64,
}

/// The four terms of the two-dimensional integral and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Unli2dBreakdown {
    pub u12: f64,
    pub v12: f64,
    pub u21: f64,
    pub v21: f64,
    pub total: f64,
}

/// `E[max(Y, 0)]` for `Y ~ N(mu, sigma²)`:
/// `μ[1 - Φ(-μ/σ)] + σφ(-μ/σ)`.
pub fn unli_1d(mu: f64, sigma: f64) -> Result<f64> {
    finite("mu", mu)?;
    positive("sigma", sigma)?;
    Ok(unli_1d_unchecked(mu, sigma))
}

pub(crate) fn unli_1d_unchecked(mu: f64, sigma: f64) -> f64 {
    let z = mu / sigma;
    mu * cdf(z) + sigma * pdf(z)
}

/// Whether `|σ_i - ρσ_j|` falls under [`DEGENERACY_TOLERANCE`]` · max(σ_i, σ_j)`.
pub fn is_degenerate(p: &BvnParams, term: TermIndex) -> bool {
    p.oriented(term).is_degenerate()
}

/// `α, β, a₁, b₁, a₂, b₂, t₁, t₂` for the `(i, j)` term, or `None` on the
/// degenerate branch where `α` and `β` are undefined.
pub fn term_intermediates(p: &BvnParams, term: TermIndex) -> Option<TermIntermediates> {
    let o = p.oriented(term);
    if o.is_degenerate() {
        return None;
    }
    let slope = o.slope();
    let alpha = (o.sigma_i * o.mu_j - o.rho * o.sigma_j * o.mu_i) / slope;
    let beta = o.sigma_i * o.sigma_j * o.sqrt_one_minus_rho2 / slope;
    let abs_beta = beta.abs();
    let a1 = (o.mu_i - alpha) / abs_beta;
    let b1 = o.sigma_i / abs_beta;
    let a2 = (alpha - o.mu_i) / o.sigma_i;
    let b2 = abs_beta / o.sigma_i;
    Some(TermIntermediates {
        alpha,
        beta,
        a1,
        b1,
        a2,
        b2,
        t1: (1.0 + b1 * b1).sqrt(),
        t2: (1.0 + b2 * b2).sqrt(),
    })
}

/// Boundary term `u_ij`.
///
/// The leading indicator bracket is 1 when `σ_i - ρσ_j > 0`, 0 when it is
/// negative, and `Φ(g)` on the degenerate branch, where
/// `g = (-σ_i μ_j + ρσ_j μ_i) / (σ_i σ_j sqrt(1-ρ²))`.
pub fn u_term(p: &BvnParams, term: TermIndex) -> f64 {
    let o = p.oriented(term);
    let phi_g = cdf(o.boundary_argument());
    let bracket = if o.is_degenerate() {
        phi_g
    } else if o.slope() > 0.0 {
        1.0
    } else {
        0.0
    };
    let h = -o.mu_i / o.sigma_i;
    o.mu_i * bracket - phi_g * (-o.sigma_i * pdf(h) + o.mu_i * cdf(h))
}

/// Integral term `v_ij`, the part of `E[Y_i · 1{Y_i > 0, Y_i > Y_j}]` not
/// captured by [`u_term`]. Zero on the degenerate branch.
///
/// With `d = σ_i - ρσ_j`, `s = sgn(d)`, `δ = μ_i - μ_j` and
/// `θ² = d² + σ_j²(1-ρ²)` (the variance of `Y_i - Y_j`), the intermediates
/// reduce to
///
/// ```text
/// -a₁/t₁ = -sδ/θ      -α/|β| = s·g      1/t₁ = σ_j sqrt(1-ρ²)/θ
/// a₂/t₂  = -sδ/θ      σ_i/t₂ = σ_i|d|/θ
/// -t₂α/|β| + a₂b₂/t₂ = (μ_i σ_j(ρσ_i - σ_j) - μ_j σ_i d) / (σ_i σ_j sqrt(1-ρ²) θ)
/// ```
///
/// none of which divide by `d`.
pub fn v_term(p: &BvnParams, term: TermIndex) -> f64 {
    let o = p.oriented(term);
    if o.is_degenerate() {
        return 0.0;
    }
    let d = o.slope();
    let s = d.signum();
    let delta = o.mu_i - o.mu_j;
    let spread = o.sigma_j * o.sqrt_one_minus_rho2;
    let theta = d.hypot(spread);

    // Φ(x) - Φ₂(x, k; -c) = Φ₂(x, -k; c) with x = -sδ/θ, k = s·g, c = 1/t₁.
    let x = -s * delta / theta;
    let k = s * o.boundary_argument();
    // 1 - c² = d²/θ² exactly; near the degenerate branch c rounds to 1.
    let c = spread / theta;
    let gaussian_part = s * o.mu_i * bvn_with_complement(x, -k, c, (d / theta).powi(2));

    let w = (o.mu_i * o.sigma_j * (o.rho * o.sigma_i - o.sigma_j) - o.mu_j * o.sigma_i * d)
        / (o.sigma_i * o.sigma_j * o.sqrt_one_minus_rho2 * theta);
    let density_part = -(o.sigma_i * d / theta) * pdf(delta / theta) * cdf(-w);

    -(gaussian_part + density_part)
}

/// `u_ij + v_ij = E[Y_i · 1{Y_i > 0, Y_i > Y_j}]` as a truncated first
/// moment of `(Y_i, Y_i - Y_j)`, whose correlation is `r = d/θ`:
/// `μ_i Φ₂(h, k; r) + σ_i [φ(h) Φ((k - rh)/s) + r φ(k) Φ((h - rk)/s)]`
/// with `h = μ_i/σ_i`, `k = δ/θ` and `s = sqrt(1 - r²)`.
fn pair(p: &BvnParams, term: TermIndex) -> f64 {
    let o = p.oriented(term);
    let d = o.slope();
    let spread = o.sigma_j * o.sqrt_one_minus_rho2;
    let theta = d.hypot(spread);
    let r = d / theta;
    let s = spread / theta;
    let h = o.mu_i / o.sigma_i;
    let k = (o.mu_i - o.mu_j) / theta;
    let mass = bvn_with_complement(h, k, r, s * s);
    let tail = pdf(h) * cdf((k - r * h) / s) + r * pdf(k) * cdf((h - r * k) / s);
    o.mu_i * mass + o.sigma_i * tail
}

/// `E[max(Y₁, Y₂, 0)]` and its four closed-form terms.
///
/// `total` is summed pairwise from [`pair`]-style truncated moments rather
/// than from the four terms: `u_ij` and `v_ij` cancel heavily when `μ_i` is
/// far below zero, and the moment form needs no degenerate branch. Outside
/// the degenerate band the two agree to rounding.
pub fn unli_2d(p: &BvnParams) -> Unli2dBreakdown {
    Unli2dBreakdown {
        u12: u_term(p, TermIndex::OneTwo),
        v12: v_term(p, TermIndex::OneTwo),
        u21: u_term(p, TermIndex::TwoOne),
        v21: v_term(p, TermIndex::TwoOne),
        total: pair(p, TermIndex::OneTwo) + pair(p, TermIndex::TwoOne),
    }
}
