//! Expected value of perfect information for two- and three-strategy
//! decisions.
//!
//! With incremental net benefits `Y` against a reference strategy, EVPI is
//! `E[max(Y, 0)] - max(E[Y], 0)` for two strategies and
//! `E[max(Y₁, Y₂, 0)] - max(μ₁, μ₂, 0)` for three.

use serde::{Deserialize, Serialize};

use crate::error::{finite, positive, Error, Result};
use crate::normal::{cdf, pdf};
use crate::unli::{unli_2d, BvnParams};

/// EVPI of a two-strategy decision whose incremental net benefit is
/// `N(mu_inb, sigma_inb²)`.
///
/// Equals `unli_1d(μ, σ) - max(μ, 0)`, evaluated as `σ[φ(z) - zΦ(-z)]` with
/// `z = |μ|/σ` so no cancellation occurs for large `|μ|`.
pub fn evpi_two(mu_inb: f64, sigma_inb: f64) -> Result<f64> {
    finite("mu", mu_inb)?;
    positive("sigma", sigma_inb)?;
    let z = mu_inb.abs() / sigma_inb;
    Ok((sigma_inb * (pdf(z) - z * cdf(-z))).max(0.0))
}

/// EVPI of a three-strategy decision with incremental net benefits `p`.
/// Rounding residue below zero is clamped.
pub fn evpi_three(p: &BvnParams) -> f64 {
    let best_now = p.mu1().max(p.mu2()).max(0.0);
    (unli_2d(p).total - best_now).max(0.0)
}

/// Mean net benefits of three strategies and the covariance matrix of those
/// means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeStrategy {
    pub mean: [f64; 3],
    pub cov: [[f64; 3]; 3],
}

impl ThreeStrategy {
    /// Incremental net benefits of the other two strategies (in index order)
    /// against `reference`.
    pub fn incremental(&self, reference: usize) -> Result<BvnParams> {
        if reference > 2 {
            return Err(Error::Invalid(format!(
                "reference strategy index {reference} out of range 0..3"
            )));
        }
        let others: Vec<usize> = (0..3).filter(|&k| k != reference).collect();
        let (a, b, r) = (others[0], others[1], reference);
        let s = &self.cov;
        let var1 = s[a][a] + s[r][r] - 2.0 * s[a][r];
        let var2 = s[b][b] + s[r][r] - 2.0 * s[b][r];
        let cov12 = s[a][b] - s[a][r] - s[b][r] + s[r][r];
        positive("var1", var1)?;
        positive("var2", var2)?;
        let (sigma1, sigma2) = (var1.sqrt(), var2.sqrt());
        BvnParams::new(
            self.mean[a] - self.mean[r],
            self.mean[b] - self.mean[r],
            sigma1,
            sigma2,
            cov12 / (sigma1 * sigma2),
        )
    }

    pub fn evpi(&self, reference: usize) -> Result<f64> {
        Ok(evpi_three(&self.incremental(reference)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvpiMethod {
    Closed,
    Bootstrap,
}

impl EvpiMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            EvpiMethod::Closed => "closed",
            EvpiMethod::Bootstrap => "bootstrap",
        }
    }
}

impl std::str::FromStr for EvpiMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(EvpiMethod::Closed),
            "bootstrap" => Ok(EvpiMethod::Bootstrap),
            other => Err(Error::Invalid(format!(
                "unknown EVPI method {other:?}; expected closed or bootstrap"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvpiPoint {
    pub wtp: f64,
    pub evpi: f64,
}

/// EVPI as a function of willingness to pay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvpiCurve {
    pub method: EvpiMethod,
    pub points: Vec<EvpiPoint>,
}

impl EvpiCurve {
    /// Builds a curve, checking that `wtp` is strictly increasing. Bootstrap
    /// values are floored at zero.
    pub fn new(method: EvpiMethod, points: Vec<EvpiPoint>) -> Result<Self> {
        check_increasing(points.iter().map(|p| p.wtp))?;
        let points = match method {
            EvpiMethod::Closed => points,
            EvpiMethod::Bootstrap => points
                .into_iter()
                .map(|p| EvpiPoint {
                    evpi: p.evpi.max(0.0),
                    ..p
                })
                .collect(),
        };
        Ok(Self { method, points })
    }

    pub fn wtps(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.wtp)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.evpi)
    }

    /// Mean of `|other - self| / self` over points where `self` exceeds
    /// `min_value`. `None` if no point qualifies or the grids differ.
    pub fn mean_relative_abs_error(&self, other: &EvpiCurve, min_value: f64) -> Option<f64> {
        if self.points.len() != other.points.len()
            || self.wtps().zip(other.wtps()).any(|(a, b)| a != b)
        {
            return None;
        }
        let errs: Vec<f64> = self
            .points
            .iter()
            .zip(&other.points)
            .filter(|(r, _)| r.evpi > min_value)
            .map(|(r, o)| (o.evpi - r.evpi).abs() / r.evpi)
            .collect();
        if errs.is_empty() {
            None
        } else {
            Some(errs.iter().sum::<f64>() / errs.len() as f64)
        }
    }
}

fn check_increasing(wtps: impl Iterator<Item = f64>) -> Result<()> {
    let mut prev = f64::NEG_INFINITY;
    for w in wtps {
        finite("wtp", w)?;
        if w <= prev {
            return Err(Error::Invalid(format!(
                "willingness-to-pay values must be strictly increasing ({w} after {prev})"
            )));
        }
        prev = w;
    }
    Ok(())
}

/// `min, min + step, ...` up to `max` inclusive (with a relative slack of
/// 1e-9 steps so that `0..100000 step 5000` ends at 100000).
pub fn wtp_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    finite("wtp-min", min)?;
    finite("wtp-max", max)?;
    positive("wtp-step", step)?;
    if max < min {
        return Err(Error::Invalid(format!(
            "wtp-max ({max}) is below wtp-min ({min})"
        )));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| min + k as f64 * step).collect())
}

/// Closed-form EVPI at each willingness to pay, with the incremental net
/// benefit distribution supplied per point by `params_at_wtp`.
pub fn evpi_curve_closed<F>(params_at_wtp: F, wtps: &[f64]) -> Result<EvpiCurve>
where
    F: Fn(f64) -> Result<BvnParams>,
{
    check_increasing(wtps.iter().copied())?;
    let points = wtps
        .iter()
        .map(|&wtp| {
            Ok(EvpiPoint {
                wtp,
                evpi: evpi_three(&params_at_wtp(wtp)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    EvpiCurve::new(EvpiMethod::Closed, points)
}
