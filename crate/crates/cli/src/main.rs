//! `unli`: command-line front end for the closed-form UNLI and EVPI
//! computations.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use unli_core::trial::{estimate_inb_bvn, load_trial_csv, synth_trial, BootstrapReplicates, SynthSpec};
use unli_core::voi::{evpi_curve_closed, wtp_grid};
use unli_core::{evpi_three, run_grid, unli_1d, unli_2d, BvnParams, GridSpec};

use output::{Failure, Format, OutputRecord};

#[derive(Debug, Parser)]
#[command(name = "unli", version, about = "Unit normal loss integrals and EVPI")]
struct Cli {
    /// Emit a JSON record instead of plain text.
    #[arg(long, global = true)]
    json: bool,

    /// Round printed numbers to 3 decimal places.
    #[arg(long = "round-3", global = true)]
    round3: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// E[max(X, 0)] for X ~ N(mu, sd²).
    Unli1d(Unli1dArgs),
    /// E[max(Y₁, Y₂, 0)] for a bivariate normal (Y₁, Y₂).
    Unli2d(Unli2dArgs),
    /// Closed form against Monte Carlo over a factorial grid.
    Simgrid(SimgridArgs),
    /// EVPI for three strategies.
    Evpi(EvpiArgs),
    /// EVPI across a range of willingness-to-pay values.
    EvpiCurve(EvpiCurveArgs),
    /// Synthetic three-arm trial data.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
struct Unli1dArgs {
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    sd: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
struct Unli2dArgs {
    #[command(flatten)]
    #[serde(flatten)]
    params: ParamArgs,
    /// Print the four terms as well as the total.
    #[arg(long)]
    #[serde(default)]
    breakdown: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
struct ParamArgs {
    #[arg(long)]
    mu1: f64,
    #[arg(long)]
    mu2: f64,
    #[arg(long)]
    sd1: f64,
    #[arg(long)]
    sd2: f64,
    #[arg(long)]
    rho: f64,
}

impl ParamArgs {
    fn bvn(&self) -> Result<BvnParams, Failure> {
        Ok(BvnParams::new(self.mu1, self.mu2, self.sd1, self.sd2, self.rho)?)
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
struct SimgridArgs {
    /// Monte Carlo draws per cell.
    #[arg(long)]
    n: u64,
    #[arg(long)]
    seed: u64,
    /// CSV destination; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use the 252-cell grid (the default).
    #[arg(long, conflicts_with = "grid")]
    #[serde(default)]
    grid_default: bool,
    /// JSON grid with `mu_values`, `var_values` and `rho_values`.
    #[arg(long)]
    grid: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
struct EvpiArgs {
    #[arg(long, conflicts_with = "trial")]
    mu1: Option<f64>,
    #[arg(long, conflicts_with = "trial")]
    mu2: Option<f64>,
    #[arg(long, conflicts_with = "trial")]
    sd1: Option<f64>,
    #[arg(long, conflicts_with = "trial")]
    sd2: Option<f64>,
    #[arg(long, conflicts_with = "trial")]
    rho: Option<f64>,
    /// Patient-level CSV (patient_id,arm,cost,effect).
    #[arg(long, requires_all = ["ref_arm", "wtp"])]
    trial: Option<PathBuf>,
    #[arg(long, requires = "trial")]
    ref_arm: Option<String>,
    #[arg(long, requires = "trial")]
    wtp: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Closed,
    Bootstrap,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
struct EvpiCurveArgs {
    #[arg(long)]
    trial: PathBuf,
    #[arg(long)]
    ref_arm: String,
    #[arg(long)]
    wtp_min: f64,
    #[arg(long)]
    wtp_max: f64,
    #[arg(long)]
    wtp_step: f64,
    #[arg(long, value_enum)]
    method: Method,
    /// Bootstrap replicates.
    #[arg(long, default_value_t = 1000)]
    boot_b: usize,
    #[arg(long, required_if_eq("method", "bootstrap"))]
    seed: Option<u64>,
    /// CSV destination; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
struct SynthArgs {
    #[arg(long, required_unless_present = "spec", conflicts_with = "spec")]
    preset: Option<String>,
    /// JSON trial specification.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    seed: u64,
    /// CSV destination; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = Format {
        json: cli.json,
        round3: cli.round3,
    };
    match run(cli.command, format) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command, fmt: Format) -> Result<(), Failure> {
    match command {
        Command::Unli1d(a) => unli1d(a, fmt),
        Command::Unli2d(a) => unli2d(a, fmt),
        Command::Simgrid(a) => simgrid(a, fmt),
        Command::Evpi(a) => evpi(a, fmt),
        Command::EvpiCurve(a) => evpi_curve(a, fmt),
        Command::Synth(a) => synth(a, fmt),
    }
}

fn record<A: Serialize>(command: &str, inputs: &A, results: Value) -> OutputRecord {
    OutputRecord {
        command: command.into(),
        inputs: serde_json::to_value(inputs).expect("flags serialize"),
        results,
        seed: None,
    }
}

fn unli1d(a: Unli1dArgs, fmt: Format) -> Result<(), Failure> {
    let value = unli_1d(a.mu, a.sd)?;
    if fmt.json {
        return record("unli1d", &a, json!({ "value": value })).print();
    }
    output::print_line(&fmt.number(value))
}

fn unli2d(a: Unli2dArgs, fmt: Format) -> Result<(), Failure> {
    let b = unli_2d(&a.params.bvn()?);
    if fmt.json {
        let results = if a.breakdown {
            serde_json::to_value(b).expect("breakdown serializes")
        } else {
            json!({ "total": b.total })
        };
        return record("unli2d", &a, results).print();
    }
    if !a.breakdown {
        return output::print_line(&fmt.number(b.total));
    }
    let lines: Vec<String> = [
        ("u12", b.u12),
        ("v12", b.v12),
        ("u21", b.u21),
        ("v21", b.v21),
        ("total", b.total),
    ]
    .iter()
    .map(|(name, x)| format!("{name}\t{}", fmt.number(*x)))
    .collect();
    output::print_line(&lines.join("\n"))
}

fn simgrid(a: SimgridArgs, fmt: Format) -> Result<(), Failure> {
    let grid = match &a.grid {
        Some(path) => {
            let text = read_input(path)?;
            let grid: GridSpec = serde_json::from_str(&text)
                .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            grid.validate()?;
            grid
        }
        None => GridSpec::default(),
    };
    let rows = run_grid(&grid, a.n, a.seed)?;

    let header = ["mu1", "mu2", "var1", "var2", "rho", "closed", "mc", "mc_se", "diff"];
    let records = rows.iter().map(|r| {
        [r.mu1, r.mu2, r.var1, r.var2, r.rho, r.closed, r.mc, r.mc_se, r.diff].map(|x| fmt.number(x))
    });
    let within = rows.iter().filter(|r| r.within(4.0)).count();

    if fmt.json {
        if let Some(out) = &a.out {
            output::write_csv(Some(out), &header, records)?;
        }
        let mut results = json!({ "cells": rows.len(), "within_4se": within });
        if a.out.is_none() {
            results["rows"] = serde_json::to_value(&rows).expect("rows serialize");
        }
        let mut rec = record("simgrid", &a, results);
        rec.seed = Some(a.seed);
        return rec.print();
    }
    output::write_csv(a.out.as_deref(), &header, records)?;
    if let Some(out) = &a.out {
        eprintln!(
            "wrote {} rows to {}; {within} within 4 standard errors",
            rows.len(),
            out.display()
        );
    }
    Ok(())
}

fn evpi(a: EvpiArgs, fmt: Format) -> Result<(), Failure> {
    let (params, estimated) = match &a.trial {
        Some(path) => {
            let d = load_trial_csv(path).map_err(Failure::input)?;
            let ref_arm = a.ref_arm.as_deref().expect("clap requires --ref-arm");
            let wtp = a.wtp.expect("clap requires --wtp");
            (estimate_inb_bvn(&d, wtp, ref_arm)?, true)
        }
        None => match (a.mu1, a.mu2, a.sd1, a.sd2, a.rho) {
            (Some(mu1), Some(mu2), Some(sd1), Some(sd2), Some(rho)) => {
                (BvnParams::new(mu1, mu2, sd1, sd2, rho)?, false)
            }
            _ => {
                return Err(Failure::input(
                    "give either --mu1 --mu2 --sd1 --sd2 --rho or --trial --ref-arm --wtp",
                ))
            }
        },
    };
    let value = evpi_three(&params);
    if fmt.json {
        let mut results = json!({ "evpi": value });
        if estimated {
            results["params"] = serde_json::to_value(params).expect("params serialize");
        }
        return record("evpi", &a, results).print();
    }
    output::print_line(&fmt.number(value))
}

fn evpi_curve(a: EvpiCurveArgs, fmt: Format) -> Result<(), Failure> {
    let d = load_trial_csv(&a.trial).map_err(Failure::input)?;
    d.arm_index(&a.ref_arm)?;
    let wtps = wtp_grid(a.wtp_min, a.wtp_max, a.wtp_step)?;

    let (curve, errors) = match a.method {
        Method::Closed => (
            evpi_curve_closed(|w| estimate_inb_bvn(&d, w, &a.ref_arm), &wtps)?,
            None,
        ),
        Method::Bootstrap => {
            let seed = a.seed.ok_or_else(|| Failure::input("bootstrap requires --seed"))?;
            let reps = BootstrapReplicates::draw(&d, a.boot_b, seed)?;
            let errors: Vec<f64> = wtps.iter().map(|&w| reps.evpi_at(w).std_error).collect();
            (reps.curve(&wtps)?, Some(errors))
        }
    };

    let method = curve.method.as_str();
    if fmt.json {
        let records = curve.points.iter().map(|p| {
            [fmt.number(p.wtp), fmt.number(p.evpi), method.to_string()]
        });
        if let Some(out) = &a.out {
            output::write_csv(Some(out), &["wtp", "evpi", "method"], records)?;
        }
        let points: Vec<Value> = curve
            .points
            .iter()
            .enumerate()
            .map(|(k, p)| match &errors {
                Some(se) => json!({ "wtp": p.wtp, "evpi": p.evpi, "std_error": se[k] }),
                None => json!({ "wtp": p.wtp, "evpi": p.evpi }),
            })
            .collect();
        let mut rec = record("evpi-curve", &a, json!({ "method": method, "points": points }));
        rec.seed = a.seed.filter(|_| a.method == Method::Bootstrap);
        return rec.print();
    }
    let records = curve
        .points
        .iter()
        .map(|p| [fmt.number(p.wtp), fmt.number(p.evpi), method.to_string()]);
    output::write_csv(a.out.as_deref(), &["wtp", "evpi", "method"], records)
}

fn synth(a: SynthArgs, fmt: Format) -> Result<(), Failure> {
    let spec = match (&a.preset, &a.spec) {
        (Some(name), _) => SynthSpec::preset(name)?,
        (None, Some(path)) => {
            let text = read_input(path)?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?
        }
        (None, None) => unreachable!("clap requires --preset or --spec"),
    };
    let d = synth_trial(&spec, a.seed)?;
    let mut buf = Vec::new();
    d.write_csv(&mut buf)?;
    match &a.out {
        Some(path) => output::write_file(path, &buf)?,
        None if !fmt.json => return output::write_stdout(&buf),
        None => {}
    }
    if fmt.json {
        let arms: Vec<Value> = d
            .arms()
            .iter()
            .map(|arm| json!({ "name": arm.name, "patients": arm.len() }))
            .collect();
        let mut results = json!({ "patients": d.len(), "arms": arms });
        if a.out.is_none() {
            results["csv"] = Value::String(String::from_utf8(buf).expect("CSV is UTF-8"));
        }
        let mut rec = record("synth", &a, results);
        rec.seed = Some(a.seed);
        return rec.print();
    }
    Ok(())
}

fn read_input(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}
