//! Standard normal density, distribution and quantile functions, and the
//! standard bivariate normal distribution function.
//!
//! The checked functions (`std_normal_cdf`, `bvn_cdf`, ...) validate their
//! arguments and wrap results in [`Probability`]. The crate-internal `pdf`,
//! `cdf` and `bvn` skip validation and are what the closed forms call in
//! their inner loops.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// `1 / sqrt(2π)`
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Largest accepted `|ρ|`. Closer to ±1 the closed forms divide by
/// `sqrt(1 - ρ²)` with too few significant bits left.
pub const MAX_ABS_CORRELATION: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::OutOfRange {
                name: "probability",
                value,
                reason: "must lie in [0, 1]",
            })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A correlation coefficient strictly inside `(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Correlation(f64);

impl Correlation {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() {
            return Err(Error::NonFinite {
                name: "rho",
                value,
            });
        }
        if value.abs() > MAX_ABS_CORRELATION {
            return Err(Error::OutOfRange {
                name: "rho",
                value,
                reason: "correlation must satisfy |rho| < 1 - 1e-12",
            });
        }
        Ok(Self(value))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl<'de> Deserialize<'de> for Correlation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Correlation::new(v).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<f64> for Correlation {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Correlation::new(value)
    }
}

impl fmt::Display for Correlation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Standard normal density `φ(x)`.
pub fn std_normal_pdf(x: f64) -> Result<f64> {
    crate::error::finite("x", x)?;
    Ok(pdf(x))
}

/// Standard normal distribution function `Φ(x)`; `±∞` are accepted.
pub fn std_normal_cdf(x: f64) -> Result<Probability> {
    if x.is_nan() {
        return Err(Error::NonFinite { name: "x", value: x });
    }
    Ok(Probability(cdf(x)))
}

/// `P(Z₁ ≤ x1, Z₂ ≤ x2)` for a standard bivariate normal with correlation `rho`.
///
/// Infinite limits are handled exactly. Accuracy is about `1e-15` absolute
/// over the whole domain.
pub fn bvn_cdf(x1: f64, x2: f64, rho: Correlation) -> Result<Probability> {
    if x1.is_nan() {
        return Err(Error::NonFinite { name: "x1", value: x1 });
    }
    if x2.is_nan() {
        return Err(Error::NonFinite { name: "x2", value: x2 });
    }
    Ok(Probability(bvn(x1, x2, rho.get())))
}

/// Standard normal quantile `Φ⁻¹(p)` for `p` in `(0, 1)`; `0` and `1` map to `∓∞`.
pub fn inverse_std_normal_cdf(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            reason: "must lie in [0, 1]",
        });
    }
    Ok(inv_cdf(p))
}

#[inline]
pub(crate) fn pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// `Φ(x)` through `erfc`, which keeps full relative accuracy in the lower tail.
#[inline]
pub(crate) fn cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        1.0
    } else if x == f64::NEG_INFINITY {
        0.0
    } else {
        0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
    }
}

pub(crate) fn inv_cdf(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    // Work in the lower half where `p` carries full relative precision;
    // `1 - p` is exact for p >= 0.5.
    if p > 0.5 {
        return -lower_quantile(1.0 - p);
    }
    lower_quantile(p)
}

/// Acklam's rational approximation followed by one Halley step against `cdf`.
fn lower_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_671_660_229_582,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    let e = cdf(x) - p;
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

fn rules() -> &'static [GaussLegendre; 3] {
    static RULES: OnceLock<[GaussLegendre; 3]> = OnceLock::new();
    RULES.get_or_init(|| {
        [
            GaussLegendre::new(6),
            GaussLegendre::new(12),
            GaussLegendre::new(20),
        ]
    })
}

/// Unchecked `Φ₂(x1, x2; r)`. Accepts `r = ±1` as the degenerate limits.
pub(crate) fn bvn(x1: f64, x2: f64, r: f64) -> f64 {
    upper_orthant(-x1, -x2, r, (1.0 - r) * (1.0 + r))
}

/// `Φ₂(x1, x2; r)` with `1 - r²` supplied by the caller, who may know it
/// more accurately than `r` conveys when `|r|` is close to 1.
pub(crate) fn bvn_with_complement(x1: f64, x2: f64, r: f64, one_minus_r2: f64) -> f64 {
    upper_orthant(-x1, -x2, r, one_minus_r2)
}

/// `P(X > h, Y > k)` with correlation `r`, after Genz's BVNU.
///
/// For `|r| < 0.925` the integrand of Plackett's identity
/// `∂Φ₂/∂r = φ₂` is integrated over `asin(r)` with a Gauss–Legendre rule
/// whose order grows with `|r|`. Closer to ±1 the Drezner–Wesolowsky
/// substitution is used, with a series for the singular part.
fn upper_orthant(h: f64, k: f64, r: f64, one_minus_r2: f64) -> f64 {
    // Canonical argument order makes the result exactly symmetric.
    let (h, k) = if h <= k { (h, k) } else { (k, h) };

    if h == f64::INFINITY || k == f64::INFINITY {
        return 0.0;
    }
    if h == f64::NEG_INFINITY {
        return if k == f64::NEG_INFINITY { 1.0 } else { cdf(-k) };
    }
    if r == 0.0 {
        return cdf(-h) * cdf(-k);
    }
    if r > 0.0 && one_minus_r2 <= 0.0 {
        return cdf(-h.max(k));
    }
    if r < 0.0 && one_minus_r2 <= 0.0 {
        // P(h < X < -k)
        let mass = if h < 0.0 { cdf(-k) - cdf(h) } else { cdf(-h) - cdf(k) };
        return mass.max(0.0);
    }

    let rule = &rules()[if r.abs() < 0.3 {
        0
    } else if r.abs() < 0.75 {
        1
    } else {
        2
    }];
    let two_pi = 2.0 * PI;

    let bvn = if r.abs() < 0.925 {
        let hk = h * k;
        let hs = 0.5 * (h * h + k * k);
        let asr = 0.5 * r.asin();
        let sum: f64 = rule
            .nodes()
            .iter()
            .zip(rule.weights())
            .map(|(&x, &w)| {
                let sn = (asr * (1.0 + x)).sin();
                w * ((sn * hk - hs) / (1.0 - sn * sn)).exp()
            })
            .sum();
        sum * asr / two_pi + cdf(-h) * cdf(-k)
    } else {
        let k = if r < 0.0 { -k } else { k };
        let hk = h * k;
        let mut a = one_minus_r2.sqrt();
        let bs = (h - k) * (h - k);
        let c = (4.0 - hk) / 8.0;
        let d = (12.0 - hk) / 80.0;

        let mut singular = 0.0;
        let asr = -0.5 * (bs / one_minus_r2 + hk);
        if asr > -100.0 {
            singular = a
                * asr.exp()
                * (1.0 - c * (bs - one_minus_r2) * (1.0 - d * bs) / 3.0
                    + c * d * one_minus_r2 * one_minus_r2);
        }
        if hk > -100.0 {
            let b = bs.sqrt();
            let sp = two_pi.sqrt() * cdf(-b / a);
            singular -= (-0.5 * hk).exp() * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0);
        }

        a *= 0.5;
        let sum: f64 = rule
            .nodes()
            .iter()
            .zip(rule.weights())
            .filter_map(|(&x, &w)| {
                let xs = (a * (1.0 + x)).powi(2);
                let asr = -0.5 * (bs / xs + hk);
                if asr <= -100.0 {
                    return None;
                }
                let sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs);
                let rs = (1.0 - xs).sqrt();
                let ep = (-0.5 * hk * xs / ((1.0 + rs) * (1.0 + rs))).exp() / rs;
                Some(w * asr.exp() * (sp - ep))
            })
            .sum();
        let tail = (a * sum - singular) / two_pi;

        if r > 0.0 {
            tail + cdf(-h.max(k))
        } else if h >= k {
            -tail
        } else {
            let band = if h < 0.0 { cdf(k) - cdf(h) } else { cdf(-h) - cdf(-k) };
            band - tail
        }
    };
    bvn.clamp(0.0, 1.0)
}
