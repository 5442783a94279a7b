//! The `v` term evaluated literally from `α, β, a₁, b₁, a₂, b₂, t₁, t₂`.
//!
//! ```text
//! T = sgn(β) μ_i [Φ((-a₁/b₁)/sqrt(1 + 1/b₁²)) - Φ₂(-a₁/t₁, L, -1/t₁)]
//!     - sgn(β) (σ_i/t₂) φ(a₂/t₂) (1 - Φ(-t₂·(-L) + a₂b₂/t₂))
//! ```
//!
//! `T` is `∫ v du` from the integration by parts, so the term that enters
//! the total is `v_ij = -T`. The second upper limit `L` is `-α/|β|` under
//! [`BranchConvention::AbsoluteBeta`] and `-α/β` under
//! [`BranchConvention::SignedBeta`]; the two agree for `β > 0`. Only the
//! absolute-value form is correct when `β < 0`, which is what
//! [`super::v_term`] implements. The signed form is kept for comparison.
//!
//! These expressions lose accuracy as `β → ±∞` and are only intended for
//! cross-checking away from the degenerate branch.

use super::{term_intermediates, u_term, BvnParams, TermIndex};
use crate::normal::{bvn, cdf, pdf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchConvention {
    /// Upper limit `-α/|β|`.
    AbsoluteBeta,
    /// Upper limit `-α/β`.
    SignedBeta,
}

/// `∫ v du` for the `(i, j)` term; zero on the degenerate branch.
pub fn integral_part(p: &BvnParams, term: TermIndex, convention: BranchConvention) -> f64 {
    let Some(t) = term_intermediates(p, term) else {
        return 0.0;
    };
    let (mu_i, sigma_i) = match term {
        TermIndex::OneTwo => (p.mu1(), p.sigma1()),
        TermIndex::TwoOne => (p.mu2(), p.sigma2()),
    };
    let sign = t.beta.signum();
    let limit = match convention {
        BranchConvention::AbsoluteBeta => -t.alpha / t.beta.abs(),
        BranchConvention::SignedBeta => -t.alpha / t.beta,
    };
    let lead = cdf((-t.a1 / t.b1) / (1.0 + (1.0 / t.b1).powi(2)).sqrt());
    let first = sign * mu_i * (lead - bvn(-t.a1 / t.t1, limit, -1.0 / t.t1));
    let second = sign * (sigma_i / t.t2)
        * pdf(t.a2 / t.t2)
        * (1.0 - cdf(t.t2 * limit + t.a2 * t.b2 / t.t2));
    first - second
}

/// `v_ij` under the given convention.
pub fn v_term(p: &BvnParams, term: TermIndex, convention: BranchConvention) -> f64 {
    -integral_part(p, term, convention)
}

/// `u₁₂ + v₁₂ + u₂₁ + v₂₁` with the literal `v` terms.
pub fn total(p: &BvnParams, convention: BranchConvention) -> f64 {
    [TermIndex::OneTwo, TermIndex::TwoOne]
        .into_iter()
        .map(|term| u_term(p, term) + v_term(p, term, convention))
        .sum()
}
