//! Patient-level data from a three-arm parallel trial.
//!
//! Per-patient net benefit is `effect · wtp - cost`. Arm means are treated as
//! independent normals with variance `s²/n`, which gives the bivariate
//! normal of the two incremental net benefits against a reference arm. The
//! bootstrap resamples patients within each arm and is the simulation-based
//! counterpart of the closed form.

mod synth;

pub use synth::{synth_trial, ArmSpec, SynthSpec};

use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mc::{McEstimate, Moments};
use crate::rng::{derive_seed, Stream};
use crate::unli::BvnParams;
use crate::voi::{EvpiCurve, EvpiMethod, EvpiPoint, ThreeStrategy};

pub const CSV_HEADER: [&str; 4] = ["patient_id", "arm", "cost", "effect"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Patient {
    pub id: String,
    pub cost: f64,
    pub effect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Arm {
    pub name: String,
    pub patients: Vec<Patient>,
}

impl Arm {
    pub fn len(&self) -> usize {
        self.patients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patients.is_empty()
    }
}

/// Exactly three nonempty, distinctly named arms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialDataset {
    arms: Vec<Arm>,
    dropped_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmSummary {
    pub arm: String,
    pub n: usize,
    pub mean_nb: f64,
    /// Sample variance of per-patient net benefit divided by `n`.
    pub var_of_mean: f64,
}

pub fn net_benefit(cost: f64, effect: f64, wtp: f64) -> f64 {
    effect * wtp - cost
}

impl TrialDataset {
    pub fn new(arms: Vec<Arm>) -> Result<Self> {
        Self::with_dropped(arms, 0)
    }

    fn with_dropped(arms: Vec<Arm>, dropped_rows: usize) -> Result<Self> {
        if arms.len() != 3 {
            return Err(Error::Trial(format!(
                "expected exactly three arms, found {}",
                arms.len()
            )));
        }
        for (k, arm) in arms.iter().enumerate() {
            if arm.is_empty() {
                return Err(Error::Trial(format!("arm {:?} has no patients", arm.name)));
            }
            if arms[..k].iter().any(|a| a.name == arm.name) {
                return Err(Error::Trial(format!("duplicate arm name {:?}", arm.name)));
            }
            for p in &arm.patients {
                if !p.cost.is_finite() || !p.effect.is_finite() || p.cost < 0.0 {
                    return Err(Error::Trial(format!(
                        "patient {:?} in arm {:?} has invalid cost/effect ({}, {})",
                        p.id, arm.name, p.cost, p.effect
                    )));
                }
            }
        }
        Ok(Self { arms, dropped_rows })
    }

    pub fn arms(&self) -> &[Arm] {
        &self.arms
    }

    pub fn arm_names(&self) -> Vec<&str> {
        self.arms.iter().map(|a| a.name.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.arms.iter().map(Arm::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rows skipped at load time because a field was missing.
    pub fn dropped_rows(&self) -> usize {
        self.dropped_rows
    }

    pub fn arm_index(&self, name: &str) -> Result<usize> {
        self.arms.iter().position(|a| a.name == name).ok_or_else(|| {
            Error::Trial(format!(
                "reference arm {name:?} not found; arms are {:?}",
                self.arm_names()
            ))
        })
    }

    pub fn summaries(&self, wtp: f64) -> Vec<ArmSummary> {
        self.arms
            .iter()
            .map(|arm| {
                let mut m = Moments::default();
                for p in &arm.patients {
                    m.push(net_benefit(p.cost, p.effect, wtp));
                }
                ArmSummary {
                    arm: arm.name.clone(),
                    n: arm.len(),
                    mean_nb: m.mean(),
                    var_of_mean: m.sample_variance() / arm.len() as f64,
                }
            })
            .collect()
    }

    /// Mean net benefits and their (diagonal) covariance at `wtp`.
    pub fn three_strategy(&self, wtp: f64) -> Result<ThreeStrategy> {
        if let Some(arm) = self.arms.iter().find(|a| a.len() < 2) {
            return Err(Error::Trial(format!(
                "arm {:?} has {} patient(s); at least 2 are needed for a variance",
                arm.name,
                arm.len()
            )));
        }
        let s = self.summaries(wtp);
        let mut cov = [[0.0; 3]; 3];
        for k in 0..3 {
            cov[k][k] = s[k].var_of_mean;
        }
        Ok(ThreeStrategy {
            mean: [s[0].mean_nb, s[1].mean_nb, s[2].mean_nb],
            cov,
        })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(CSV_HEADER).map_err(csv_error)?;
        for arm in &self.arms {
            for p in &arm.patients {
                w.write_record([
                    p.id.as_str(),
                    arm.name.as_str(),
                    &p.cost.to_string(),
                    &p.effect.to_string(),
                ])
                .map_err(csv_error)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!(),
        }
    } else {
        Error::Parse {
            line,
            message: e.to_string(),
        }
    }
}

pub fn load_trial_csv(path: impl AsRef<Path>) -> Result<TrialDataset> {
    let file = std::fs::File::open(path.as_ref()).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.as_ref().display()),
        ))
    })?;
    read_trial_csv(file)
}

/// Parses `patient_id,arm,cost,effect` records (extra columns are ignored).
/// Rows with an empty or `NA` field are dropped and counted.
pub fn read_trial_csv<R: Read>(reader: R) -> Result<TrialDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let mut columns = [0usize; 4];
    for (slot, name) in columns.iter_mut().zip(CSV_HEADER) {
        *slot = headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("missing column {name:?} (header is {:?})", headers.iter().collect::<Vec<_>>()),
        })?;
    }
    let [id_col, arm_col, cost_col, effect_col] = columns;

    let mut arms: Vec<Arm> = Vec::new();
    let mut dropped = 0usize;
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |col: usize| record.get(col).filter(|v| !is_missing(v));

        let arm_name = field(arm_col);
        if let Some(name) = arm_name {
            if !arms.iter().any(|a| a.name == name) {
                if arms.len() == 3 {
                    return Err(Error::Parse {
                        line,
                        message: format!(
                            "unexpected fourth arm label {name:?}; already have {:?}",
                            arms.iter().map(|a| a.name.as_str()).collect::<Vec<_>>()
                        ),
                    });
                }
                arms.push(Arm {
                    name: name.to_string(),
                    patients: Vec::new(),
                });
            }
        }

        let (Some(id), Some(name), Some(cost), Some(effect)) =
            (field(id_col), arm_name, field(cost_col), field(effect_col))
        else {
            dropped += 1;
            continue;
        };
        let cost = parse_number(cost, "cost", line)?;
        let effect = parse_number(effect, "effect", line)?;
        if cost < 0.0 {
            return Err(Error::Parse {
                line,
                message: format!("negative cost {cost}"),
            });
        }
        let arm = arms.iter_mut().find(|a| a.name == name).expect("arm registered above");
        arm.patients.push(Patient {
            id: id.to_string(),
            cost,
            effect,
        });
    }

    if arms.len() != 3 {
        return Err(Error::Trial(format!(
            "expected exactly three arm labels, found {}: {:?}",
            arms.len(),
            arms.iter().map(|a| a.name.as_str()).collect::<Vec<_>>()
        )));
    }
    TrialDataset::with_dropped(arms, dropped)
}

fn is_missing(v: &str) -> bool {
    v.is_empty() || v.eq_ignore_ascii_case("na")
}

fn parse_number(raw: &str, name: &str, line: u64) -> Result<f64> {
    let value: f64 = raw.parse().map_err(|_| Error::Parse {
        line,
        message: format!("{name} {raw:?} is not a number"),
    })?;
    if !value.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("{name} {raw:?} is not finite"),
        });
    }
    Ok(value)
}

/// Bivariate normal of the incremental net benefits of the two non-reference
/// arms (in dataset order) against `ref_arm`.
///
/// `μ_i = NB̄_i - NB̄_r`, `σ_i² = s_i²/n_i + s_r²/n_r`, and the covariance
/// is the shared `s_r²/n_r`.
pub fn estimate_inb_bvn(d: &TrialDataset, wtp: f64, ref_arm: &str) -> Result<BvnParams> {
    let reference = d.arm_index(ref_arm)?;
    d.three_strategy(wtp)?.incremental(reference)
}

/// Per-replicate arm means of cost and effect from a within-arm bootstrap.
/// Net benefit at any willingness to pay is linear in these, so one set of
/// replicates serves a whole curve.
#[derive(Debug, Clone)]
pub struct BootstrapReplicates {
    means: Vec<[(f64, f64); 3]>,
    seed: u64,
}

impl BootstrapReplicates {
    /// Draws `b` replicates; replicate `r` uses seed `derive_seed(seed, r)`.
    pub fn draw(d: &TrialDataset, b: usize, seed: u64) -> Result<Self> {
        if b < 2 {
            return Err(Error::Invalid(
                "at least 2 bootstrap replicates are needed".into(),
            ));
        }
        let one = |r: usize| -> [(f64, f64); 3] {
            let mut stream = Stream::new(derive_seed(seed, r as u64));
            let mut out = [(0.0, 0.0); 3];
            for (slot, arm) in out.iter_mut().zip(d.arms()) {
                let n = arm.len();
                let (mut cost, mut effect) = (0.0, 0.0);
                for _ in 0..n {
                    let p = &arm.patients[stream.index(n)];
                    cost += p.cost;
                    effect += p.effect;
                }
                *slot = (cost / n as f64, effect / n as f64);
            }
            out
        };

        #[cfg(feature = "parallel")]
        let means = {
            use rayon::prelude::*;
            (0..b).into_par_iter().map(one).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let means = (0..b).map(one).collect();

        Ok(Self { means, seed })
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    /// `mean_b[max_j NB̄_j] - max_j[mean_b NB̄_j]`, floored at zero, with a
    /// jackknife standard error over replicates.
    pub fn evpi_at(&self, wtp: f64) -> McEstimate {
        let b = self.means.len();
        let bf = b as f64;
        let nb: Vec<[f64; 3]> = self
            .means
            .iter()
            .map(|arms| arms.map(|(c, e)| net_benefit(c, e, wtp)))
            .collect();
        let max_of = |v: &[f64; 3]| v[0].max(v[1]).max(v[2]);

        let sum_max: f64 = nb.iter().map(max_of).sum();
        let mut sums = [0.0; 3];
        for row in &nb {
            for j in 0..3 {
                sums[j] += row[j];
            }
        }
        let estimate = sum_max / bf - max_of(&sums.map(|s| s / bf));

        let leave_one_out: Vec<f64> = nb
            .iter()
            .map(|row| {
                let mean_max = (sum_max - max_of(row)) / (bf - 1.0);
                let means = [0, 1, 2].map(|j| (sums[j] - row[j]) / (bf - 1.0));
                mean_max - max_of(&means)
            })
            .collect();
        let centre = leave_one_out.iter().sum::<f64>() / bf;
        let ss: f64 = leave_one_out.iter().map(|t| (t - centre).powi(2)).sum();

        McEstimate {
            mean: estimate.max(0.0),
            std_error: ((bf - 1.0) / bf * ss).sqrt(),
            n: b as u64,
            seed: self.seed,
        }
    }

    pub fn curve(&self, wtps: &[f64]) -> Result<EvpiCurve> {
        let points = wtps
            .iter()
            .map(|&wtp| EvpiPoint {
                wtp,
                evpi: self.evpi_at(wtp).mean,
            })
            .collect();
        EvpiCurve::new(EvpiMethod::Bootstrap, points)
    }
}

/// Bootstrap EVPI at one willingness to pay from `b` within-arm resamples.
pub fn bootstrap_evpi(d: &TrialDataset, wtp: f64, b: usize, seed: u64) -> Result<McEstimate> {
    crate::error::finite("wtp", wtp)?;
    Ok(BootstrapReplicates::draw(d, b, seed)?.evpi_at(wtp))
}
