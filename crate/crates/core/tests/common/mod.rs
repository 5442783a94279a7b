//! Independent reference implementations used by the integration tests.
//!
//! Nothing here calls into the closed forms under test. Normal densities and
//! CDFs are rebuilt from `exp` and `libm::erfc`; integrals use adaptive
//! Gauss–Kronrod; random numbers come from a SplitMix64 generator with
//! Box–Muller normals.
#![allow(dead_code)]

use std::f64::consts::{PI, SQRT_2};
use std::path::PathBuf;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use unli_core::unli::unli_1d;
use unli_core::{unli_2d, BvnParams};

pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

// ---------------------------------------------------------------------------
// Adaptive Gauss–Kronrod (7/15)

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx) + f(c + dx);
        k += WGK[i] * pair;
        if i % 2 == 1 {
            g += WG[i / 2] * pair;
        }
    }
    (k * h, (k - g).abs() * h)
}

/// `∫ f` over `[a, b]`, split at each of `breaks` inside the interval.
/// Globally adaptive: the piece with the largest error estimate is bisected
/// until the summed estimate is below `tol` or 4000 pieces exist.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut pts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    pts.extend(inner);
    pts.push(b);

    let mut pieces: Vec<(f64, f64, f64, f64)> = pts
        .windows(2)
        .map(|w| {
            let (v, e) = kronrod(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    while pieces.len() < 4000 {
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        if err <= tol {
            break;
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        for (l, h) in [(lo, mid), (mid, hi)] {
            let (v, e) = kronrod(&f, l, h);
            pieces.push((l, h, v, e));
        }
    }
    // Small pieces first.
    let mut values: Vec<f64> = pieces.iter().map(|p| p.2).collect();
    values.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    values.iter().sum()
}

/// Proptest configuration with a fixed seed, so runs are reproducible.
pub fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x5EED_0000 + u64::from(n)),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

// ---------------------------------------------------------------------------
// Quadrature oracles

/// `E[max(Y, 0)]` for `Y ~ N(mu, sigma²)` by direct integration of
/// `y·f(y)` over `y > 0`.
pub fn unli_1d_quadrature(mu: f64, sigma: f64) -> f64 {
    let hi = mu + 40.0 * sigma;
    if hi <= 0.0 {
        return 0.0;
    }
    let f = |y: f64| y * pdf((y - mu) / sigma) / sigma;
    integrate(f, 0.0, hi, &[mu, mu - 5.0 * sigma, mu + 5.0 * sigma], 1e-15 * (1.0 + mu.abs() + sigma))
}

/// `P(Z₁ ≤ x1, Z₂ ≤ x2)` as `∫_{-∞}^{x1} φ(t) Φ((x2 - ρt)/sqrt(1-ρ²)) dt`.
pub fn bvn_quadrature(x1: f64, x2: f64, rho: f64) -> f64 {
    let q = ((1.0 - rho) * (1.0 + rho)).sqrt();
    let upper = x1.min(40.0);
    let f = |t: f64| pdf(t) * cdf((x2 - rho * t) / q);
    let kink = if rho != 0.0 { x2 / rho } else { f64::NAN };
    integrate(f, -40.0, upper, &[kink, kink - 5.0 * q, kink + 5.0 * q, 0.0], 1e-16)
}

/// `E[max(c, Y)]` for `Y ~ N(m, s²)`.
fn e_max_const(c: f64, m: f64, s: f64) -> f64 {
    let x = (m - c) / s;
    c + s * (x * cdf(x) + pdf(x))
}

/// `E[max(Y₁, Y₂, 0)]` by conditioning on `Z₁`: given `Y₁ = a`,
/// `Y₂ ~ N(μ₂ + σ₂ρZ₁, σ₂²(1-ρ²))`, and the inner expectation is a
/// one-dimensional loss integral.
pub fn unli_2d_quadrature(p: &BvnParams) -> f64 {
    let (m1, m2, s1, s2, r) = (p.mu1(), p.mu2(), p.sigma1(), p.sigma2(), p.rho());
    let s = s2 * ((1.0 - r) * (1.0 + r)).sqrt();
    let f = |z: f64| {
        let c = (m1 + s1 * z).max(0.0);
        pdf(z) * e_max_const(c, m2 + s2 * r * z, s)
    };
    integrate(f, -39.0, 39.0, &[-m1 / s1, 0.0, -8.0, 8.0], 1e-15 * p.scale())
}

/// `E[Y_i · 1{Y_i > 0, Y_i ≥ Y_j}]`, the share of the maximum carried by
/// strategy `i` (`i = 0` for the first).
pub fn pair_quadrature(p: &BvnParams, i: usize) -> f64 {
    let q = if i == 0 { *p } else { p.swapped() };
    let (mi, mj, si, sj, r) = (q.mu1(), q.mu2(), q.sigma1(), q.sigma2(), q.rho());
    let cs = sj * ((1.0 - r) * (1.0 + r)).sqrt();
    let hi = mi + 40.0 * si;
    if hi <= 0.0 {
        return 0.0;
    }
    let f = |y: f64| {
        let cm = mj + r * sj * (y - mi) / si;
        y * pdf((y - mi) / si) / si * cdf((y - cm) / cs)
    };
    integrate(f, 0.0, hi, &[mi, mi - 5.0 * si, mi + 5.0 * si], 1e-15 * p.scale())
}

// ---------------------------------------------------------------------------
// Monte Carlo

/// SplitMix64 with Box–Muller normals.
pub struct TestRng {
    state: u64,
    spare: Option<f64>,
}

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self { state: seed, spare: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `(0, 1]`.
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let r = (-2.0 * self.uniform().ln()).sqrt();
        let t = 2.0 * PI * self.uniform();
        self.spare = Some(r * t.sin());
        r * t.cos()
    }
}

/// Fraction of `n` standard BVN pairs with `Z₁ ≤ x1, Z₂ ≤ x2`.
pub fn bvn_mc_fraction(x1: f64, x2: f64, rho: f64, n: usize, seed: u64) -> f64 {
    let mut rng = TestRng::new(seed);
    let q = ((1.0 - rho) * (1.0 + rho)).sqrt();
    let mut hits = 0usize;
    for _ in 0..n {
        let z1 = rng.normal();
        let z2 = rho * z1 + q * rng.normal();
        if z1 <= x1 && z2 <= x2 {
            hits += 1;
        }
    }
    hits as f64 / n as f64
}

// ---------------------------------------------------------------------------
// Reference data

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// A row of the 252-cell reference comparison table.
#[derive(Debug, Clone, Copy)]
pub struct TableRow {
    pub mu1: f64,
    pub mu2: f64,
    pub var1: f64,
    pub var2: f64,
    pub rho: f64,
    pub closed: f64,
    pub mc: f64,
}

impl TableRow {
    pub fn key(&self) -> [i64; 5] {
        [self.mu1, self.mu2, self.var1, self.var2, self.rho].map(|x| (x * 100.0).round() as i64)
    }
}

pub fn reference_table() -> Vec<TableRow> {
    let text = std::fs::read_to_string(data_path("grid252_reference.tsv")).expect("reference table");
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: Vec<f64> = l.split('\t').map(|x| x.trim().parse().expect("number")).collect();
            TableRow {
                mu1: v[0],
                mu2: v[1],
                var1: v[2],
                var2: v[3],
                rho: v[4],
                closed: v[5],
                mc: v[6],
            }
        })
        .collect()
}

/// `(x1, x2, rho, p)` evaluated at 40 digits.
pub fn bvn_reference() -> Vec<(f64, f64, f64, f64)> {
    let text = std::fs::read_to_string(data_path("bvn_reference.csv")).expect("bvn reference");
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.trim().parse().expect("number")).collect();
            (v[0], v[1], v[2], v[3])
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Parameter strategies and property checks shared by the property suite and
// the acceptance harness.

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

/// Unrestricted draws: `|μ/σ| ≤ 4`, `σ` over two decades, `|ρ| ≤ 0.98`.
pub fn general_params() -> impl Strategy<Value = BvnParams> {
    (log_uniform(0.1, 10.0), log_uniform(0.1, 10.0), -4.0..4.0f64, -4.0..4.0f64, -0.98..0.98f64)
        .prop_map(|(s1, s2, z1, z2, r)| BvnParams::new(z1 * s1, z2 * s2, s1, s2, r).unwrap())
}

/// `σ₁ < ρσ₂`: the first term sits on the negative-β branch.
pub fn negative_beta_params() -> impl Strategy<Value = BvnParams> {
    (log_uniform(0.1, 10.0), 0.2..0.95f64, 0.3..0.98f64, -4.0..4.0f64, -4.0..4.0f64, any::<bool>())
        .prop_map(|(s2, f, r, z1, z2, flip)| {
            let s1 = f * r * s2;
            let p = BvnParams::new(z1 * s1, z2 * s2, s1, s2, r).unwrap();
            if flip {
                p.swapped()
            } else {
                p
            }
        })
}

/// `σ₁ = ρσ₂(1 + ε)` with `|ε|` between 1e-12 and 1e-5.
pub fn near_degenerate_params() -> impl Strategy<Value = BvnParams> {
    (log_uniform(0.1, 10.0), 0.05..0.98f64, log_uniform(1e-12, 1e-5), any::<bool>(), -4.0..4.0f64, -4.0..4.0f64)
        .prop_map(|(s2, r, eps, neg, z1, z2)| {
            let s1 = r * s2 * (1.0 + if neg { -eps } else { eps });
            BvnParams::new(z1 * s1, z2 * s2, s1, s2, r).unwrap()
        })
}

/// Mixture of the three regimes.
pub fn any_params() -> impl Strategy<Value = BvnParams> {
    prop_oneof![
        3 => general_params(),
        1 => negative_beta_params(),
        1 => near_degenerate_params(),
    ]
}

fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

fn total(p: &BvnParams) -> f64 {
    unli_2d(p).total
}

fn with_mu(p: &BvnParams, mu1: f64, mu2: f64) -> BvnParams {
    BvnParams::new(mu1, mu2, p.sigma1(), p.sigma2(), p.rho()).unwrap()
}

pub fn check_symmetry(p: &BvnParams) -> Result<(), TestCaseError> {
    let (a, b) = (total(p), total(&p.swapped()));
    prop_assert!(rel_close(a, b, 1e-12), "{p:?}: {a} vs swapped {b}");
    Ok(())
}

pub fn check_scaling(p: &BvnParams, c: f64) -> Result<(), TestCaseError> {
    let scaled = BvnParams::new(c * p.mu1(), c * p.mu2(), c * p.sigma1(), c * p.sigma2(), p.rho()).unwrap();
    let (a, b) = (total(&scaled), c * total(p));
    prop_assert!(rel_close(a, b, 1e-12), "{p:?} x {c}: {a} vs {b}");
    Ok(())
}

pub fn check_sandwich(p: &BvnParams) -> Result<(), TestCaseError> {
    let t = total(p);
    let one = unli_1d(p.mu1(), p.sigma1()).unwrap();
    let two = unli_1d(p.mu2(), p.sigma2()).unwrap();
    let slack = 1e-12 * p.scale();
    prop_assert!(t >= one.max(two) - slack, "{p:?}: {t} below {one}, {two}");
    prop_assert!(t <= one + two + slack, "{p:?}: {t} above {one} + {two}");
    Ok(())
}

pub fn check_jensen(p: &BvnParams) -> Result<(), TestCaseError> {
    let t = total(p);
    let floor = p.mu1().max(p.mu2()).max(0.0);
    prop_assert!(t >= floor - 1e-9 * p.scale(), "{p:?}: {t} < {floor}");
    Ok(())
}

/// Raising either mean by `step` (a fraction of its σ) never lowers the total.
pub fn check_monotone(p: &BvnParams, step: f64) -> Result<(), TestCaseError> {
    let t = total(p);
    let slack = 1e-12 * p.scale();
    let up1 = total(&with_mu(p, p.mu1() + step * p.sigma1(), p.mu2()));
    let up2 = total(&with_mu(p, p.mu1(), p.mu2() + step * p.sigma2()));
    prop_assert!(up1 >= t - slack, "{p:?}: raising mu1 gave {up1} < {t}");
    prop_assert!(up2 >= t - slack, "{p:?}: raising mu2 gave {up2} < {t}");
    Ok(())
}

/// Totals at `σ₁ = ρσ₂` and at `σ₁ = ρσ₂ ± 1e-6` agree to `1e-4·scale`.
pub fn check_continuity(mu1: f64, mu2: f64, sigma2: f64, rho: f64) -> Result<(), TestCaseError> {
    let at = |s1: f64| BvnParams::new(mu1, mu2, s1, sigma2, rho).unwrap();
    let centre = at(rho * sigma2);
    let base = total(&centre);
    for off in [-1e-6, 1e-6] {
        let t = total(&at(rho * sigma2 + off));
        prop_assert!(
            (t - base).abs() <= 1e-4 * centre.scale(),
            "{centre:?} offset {off}: {t} vs {base}"
        );
    }
    Ok(())
}

/// A second alternative pushed to `μ₂ = -10⁶σ₂` leaves the one-dimensional
/// integral.
pub fn check_reduction(mu: f64, sigma: f64, sigma2: f64) -> Result<(), TestCaseError> {
    let p = BvnParams::new(mu, -1e6 * sigma2, sigma, sigma2, 0.0).unwrap();
    let (two_d, one_d) = (total(&p), unli_1d(mu, sigma).unwrap());
    prop_assert!(rel_close(two_d, one_d, 1e-6), "{p:?}: {two_d} vs {one_d}");
    let (e3, e2) = (
        unli_core::evpi_three(&p),
        unli_core::evpi_two(mu, sigma).unwrap(),
    );
    prop_assert!(rel_close(e3, e2, 1e-6), "{p:?}: evpi {e3} vs {e2}");
    Ok(())
}
