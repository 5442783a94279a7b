//! Browser demo: the two-dimensional loss integral term by term, an EVPI
//! heatmap over the two incremental means, and closed-form against
//! bootstrap EVPI curves on a synthetic trial.
//!
//! The functions here are plain Rust; the `wasm` module wraps them for
//! JavaScript with flat `Float64Array` results.

use unli_core::trial::{estimate_inb_bvn, synth_trial, BootstrapReplicates, SynthSpec};
use unli_core::voi::{evpi_curve_closed, wtp_grid};
use unli_core::{evpi_three, unli_2d, BvnParams, Unli2dBreakdown};

/// `E[max(Y₁, Y₂, 0)]` and its four terms.
pub fn breakdown(mu1: f64, mu2: f64, sd1: f64, sd2: f64, rho: f64) -> Result<Unli2dBreakdown, String> {
    let p = BvnParams::new(mu1, mu2, sd1, sd2, rho).map_err(|e| e.to_string())?;
    Ok(unli_2d(&p))
}

/// Three-strategy EVPI on a `steps × steps` grid of `(μ₁, μ₂)` spanning
/// `[-extent, extent]` on both axes. Row-major with `μ₂` increasing down
/// the rows and `μ₁` across the columns.
pub fn evpi_heatmap(extent: f64, steps: usize, sd1: f64, sd2: f64, rho: f64) -> Result<Vec<f64>, String> {
    if !(extent.is_finite() && extent > 0.0) {
        return Err(format!("extent must be positive, got {extent}"));
    }
    if !(2..=400).contains(&steps) {
        return Err(format!("steps must be between 2 and 400, got {steps}"));
    }
    BvnParams::new(0.0, 0.0, sd1, sd2, rho).map_err(|e| e.to_string())?;
    let at = |k: usize| -extent + 2.0 * extent * k as f64 / (steps - 1) as f64;
    let mut out = Vec::with_capacity(steps * steps);
    for row in 0..steps {
        for col in 0..steps {
            let p = BvnParams::new(at(col), at(row), sd1, sd2, rho).map_err(|e| e.to_string())?;
            out.push(evpi_three(&p));
        }
    }
    Ok(out)
}

/// EVPI curves on the synthetic three-arm trial.
#[derive(Debug, Clone, PartialEq)]
pub struct Curves {
    pub wtps: Vec<f64>,
    pub closed: Vec<f64>,
    pub bootstrap: Vec<f64>,
}

impl Curves {
    /// Mean relative absolute error of the bootstrap curve where the closed
    /// curve exceeds `min_value`.
    pub fn mrae(&self, min_value: f64) -> Option<f64> {
        let errs: Vec<f64> = self
            .closed
            .iter()
            .zip(&self.bootstrap)
            .filter(|(c, _)| **c > min_value)
            .map(|(c, b)| (b - c).abs() / c)
            .collect();
        (!errs.is_empty()).then(|| errs.iter().sum::<f64>() / errs.len() as f64)
    }
}

/// Closed-form and bootstrap EVPI from 0 to `wtp_max` in steps of
/// `wtp_step`, on the COPD-like preset drawn with `trial_seed`.
pub fn preset_curves(
    wtp_max: f64,
    wtp_step: f64,
    boot_b: usize,
    trial_seed: u64,
    boot_seed: u64,
) -> Result<Curves, String> {
    let run = || -> unli_core::Result<Curves> {
        let d = synth_trial(&SynthSpec::copd_preset(), trial_seed)?;
        let wtps = wtp_grid(0.0, wtp_max, wtp_step)?;
        let closed = evpi_curve_closed(|w| estimate_inb_bvn(&d, w, "single"), &wtps)?;
        let boot = BootstrapReplicates::draw(&d, boot_b, boot_seed)?.curve(&wtps)?;
        Ok(Curves {
            closed: closed.values().collect(),
            bootstrap: boot.values().collect(),
            wtps,
        })
    };
    run().map_err(|e| e.to_string())
}

#[cfg(target_arch = "wasm32")]
mod wasm {
    use wasm_bindgen::prelude::*;

    fn js(e: String) -> JsError {
        JsError::new(&e)
    }

    /// `[u12, v12, u21, v21, total]`
    #[wasm_bindgen]
    pub fn breakdown(mu1: f64, mu2: f64, sd1: f64, sd2: f64, rho: f64) -> Result<Vec<f64>, JsError> {
        let b = super::breakdown(mu1, mu2, sd1, sd2, rho).map_err(js)?;
        Ok(vec![b.u12, b.v12, b.u21, b.v21, b.total])
    }

    #[wasm_bindgen]
    pub fn evpi_heatmap(extent: f64, steps: usize, sd1: f64, sd2: f64, rho: f64) -> Result<Vec<f64>, JsError> {
        super::evpi_heatmap(extent, steps, sd1, sd2, rho).map_err(js)
    }

    /// `[wtps..., closed..., bootstrap...]`, each of equal length.
    #[wasm_bindgen]
    pub fn preset_curves(
        wtp_max: f64,
        wtp_step: f64,
        boot_b: usize,
        trial_seed: u32,
        boot_seed: u32,
    ) -> Result<Vec<f64>, JsError> {
        let c = super::preset_curves(wtp_max, wtp_step, boot_b, trial_seed.into(), boot_seed.into()).map_err(js)?;
        Ok([c.wtps, c.closed, c.bootstrap].concat())
    }
}
