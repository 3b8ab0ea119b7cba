//! The five commands, each turning a system file into an [`Output`].

use std::fmt;

use rayon::prelude::*;
use serde_json::{json, Value};

use jscc::apps::{
    eavesdropper_system, equivocation_bound, mac_mi_user, mac_oracle_with_budget, mac_rates,
    GammaSolver, MacSpec,
};
use jscc::ensemble::source_shannon_entropy;
use jscc::oracle::{
    draw_code_with_budget, energy_targets, ensemble_stats_with_budget, mc_mi, EnsembleStats,
    DEFAULT_BUDGET,
};
use jscc::phase::{analyze, classify_phase};
use jscc::spec_file::SpecFile;
use jscc::Error;

use crate::output::{write_csv, write_json, Output, Table};
use crate::{Cli, Command, Common, Format, BUDGET_ENV};

/// Columns of `analyze` and `sweep` output (the latter prefixed by
/// `axis_value`).
pub const REPORT_COLUMNS: [&str; 7] = [
    "phase",
    "epsilon0",
    "epsilon_star",
    "channel_share",
    "mi_rate",
    "source_entropy",
    "sigma_at_eps0",
];

pub const SIMULATE_COLUMNS: [&str; 16] = [
    "n_source",
    "n_channel",
    "mode",
    "num_seeds",
    "trials",
    "mi_mean",
    "mi_std",
    "theorem1_mi",
    "gap",
    "h_s",
    "energy_split_source_mean",
    "energy_split_channel_mean",
    "energy_gap_source_mean",
    "energy_gap_channel_mean",
    "z_c_fraction_mean",
    "degenerate",
];

pub const WIRETAP_COLUMNS: [&str; 5] = ["rate", "gamma", "mi_main", "mi_tap", "secrecy_capacity"];

pub const MAC_COLUMNS: [&str; 11] = [
    "n_source",
    "seed",
    "mi_s",
    "mi_t_given_s",
    "mi_joint",
    "mi_user_s",
    "mi_user_t",
    "sum_rate",
    "conditional_rate",
    "epsilon_c",
    "phase",
];

/// A failed run and its process exit code: 2 for bad input, 3 for an
/// exceeded enumeration budget, 4 for numerical or phase preconditions.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Spec { .. }
            | Error::OutOfRange { .. }
            | Error::InvalidTemperature(_)
            | Error::InvalidGrid(_)
            | Error::IncompatibleSupport { .. }
            | Error::InfeasibleRate { .. } => 2,
            Error::TooLarge { .. } => 3,
            _ => 4,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError {
            code: 4,
            message: e.to_string(),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn input_error(message: String) -> CliError {
    CliError { code: 2, message }
}

fn budget(common: &Common) -> Result<u64> {
    if let Some(b) = common.budget {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| input_error(format!("{BUDGET_ENV}={v} is not an integer"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn load(common: &Common) -> Result<SpecFile> {
    let text = std::fs::read_to_string(&common.spec)
        .map_err(|e| input_error(format!("cannot read {}: {e}", common.spec.display())))?;
    SpecFile::from_json(&text).map_err(|e| {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", common.spec.display(), err.message);
        err
    })
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data serialises")
}

/// Runs the command and returns the serialized output.
pub fn run(cli: &Cli) -> Result<String> {
    let common = cli.command.common();
    let file = load(common)?;
    let budget = budget(common)?;
    let out = match &cli.command {
        Command::Analyze { .. } => analyze_cmd(&file)?,
        Command::Sweep {
            axis,
            from,
            to,
            steps,
            ..
        } => sweep_cmd(&file, axis, *from, *to, *steps)?,
        Command::Simulate {
            block_length,
            seeds,
            mc,
            trials,
            ..
        } => simulate_cmd(&file, block_length, *seeds, common.seed, *mc, *trials, budget)?,
        Command::Wiretap {
            resolution, points, ..
        } => wiretap_cmd(&file, *resolution, *points)?,
        Command::Mac {
            block_length,
            seeds,
            ..
        } => mac_cmd(&file, block_length, *seeds, common.seed, budget)?,
    };
    let out = if common.bits { out.in_bits() } else { out };
    Ok(match common.format {
        Format::Csv => write_csv(&out.table)?,
        Format::Json => write_json(&out.json)?,
    })
}

fn header(command: &str) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("units".into(), json!("nats"));
    m
}

pub fn analyze_cmd(file: &SpecFile) -> Result<Output> {
    let report = to_value(&analyze(&file.system()?)?);
    let mut table = Table::new(&REPORT_COLUMNS);
    table.push(&report);
    let mut doc = header("analyze");
    doc.insert("report".into(), report);
    Ok(Output {
        json: Value::Object(doc),
        table,
    })
}

/// `steps` evenly spaced values from `from` to `to` inclusive.
pub fn axis_values(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..steps)
            .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

pub fn sweep_cmd(file: &SpecFile, axis: &str, from: f64, to: f64, steps: usize) -> Result<Output> {
    if steps == 0 {
        return Err(input_error("--steps must be at least 1".into()));
    }
    // validate the axis once so that a bad name fails before any work
    file.with_axis(axis, from)?;
    let rows: Vec<Value> = axis_values(from, to, steps)
        .into_par_iter()
        .map(|v| {
            let sys = file.with_axis(axis, v)?.system()?;
            let mut r = to_value(&analyze(&sys)?);
            r.as_object_mut()
                .expect("report is an object")
                .insert("axis_value".into(), json!(v));
            Ok(r)
        })
        .collect::<std::result::Result<_, Error>>()?;
    let mut cols = vec!["axis_value"];
    cols.extend(REPORT_COLUMNS);
    let mut table = Table::new(&cols);
    rows.iter().for_each(|r| table.push(r));
    let mut doc = header("sweep");
    doc.insert("axis".into(), json!(axis));
    doc.insert("rows".into(), Value::Array(rows));
    Ok(Output {
        json: Value::Object(doc),
        table,
    })
}

pub fn simulate_cmd(
    file: &SpecFile,
    block_lengths: &[usize],
    seeds: usize,
    seed: u64,
    mc: bool,
    trials: usize,
    budget: u64,
) -> Result<Output> {
    if seeds == 0 {
        return Err(input_error("--seeds must be at least 1".into()));
    }
    let sys = file.system()?;
    let theorem1 = analyze(&sys)?.mi_rate;
    let (target_s, target_c) = energy_targets(&sys)?;
    let mut rows = Vec::new();
    for &n in block_lengths {
        let stats = if mc {
            let reports = (0..seeds as u64)
                .map(|k| {
                    let code = draw_code_with_budget(&sys, n, seed.wrapping_add(k), budget)?;
                    mc_mi(&code, trials, seed.wrapping_add(k))
                })
                .collect::<std::result::Result<Vec<_>, Error>>()
                .map_err(too_large_hint)?;
            EnsembleStats::from_reports(n, seed, reports)
        } else {
            ensemble_stats_with_budget(&sys, n, seeds, seed, budget).map_err(too_large_hint)?
        };
        let mut row = json!({
            "n_source": n,
            "n_channel": stats.reports.first().map_or(0, |r| r.n_channel),
            "mode": if mc { "monte_carlo" } else { "exact" },
            "num_seeds": stats.num_seeds,
            "trials": if mc { trials } else { 0 },
            "mi_mean": stats.mi_mean,
            "mi_std": stats.mi_variance.sqrt(),
            "theorem1_mi": theorem1,
            "gap": stats.mean_abs_gap(theorem1),
            "h_s": source_shannon_entropy(sys.source()),
            "energy_split_source_mean": stats.energy_split_source_mean,
            "energy_split_channel_mean": stats.energy_split_channel_mean,
            "energy_gap_source_mean": stats.energy_gap_source_mean,
            "energy_gap_channel_mean": stats.energy_gap_channel_mean,
            "z_c_fraction_mean": stats.z_c_fraction_mean,
            "degenerate": stats.degenerate,
        });
        row.as_object_mut()
            .expect("object")
            .insert("codes".into(), to_value(&stats.reports));
        rows.push(row);
    }
    let mut table = Table::new(&SIMULATE_COLUMNS);
    rows.iter().for_each(|r| table.push(r));
    let mut doc = header("simulate");
    doc.insert("base_seed".into(), json!(seed));
    doc.insert("theorem1_mi".into(), json!(theorem1));
    doc.insert("energy_target_source".into(), json!(target_s));
    doc.insert("energy_target_channel".into(), json!(target_c));
    doc.insert("rows".into(), Value::Array(rows));
    Ok(Output {
        json: Value::Object(doc),
        table,
    })
}

fn too_large_hint(e: Error) -> CliError {
    let hint = matches!(e, Error::TooLarge { .. });
    let mut err = CliError::from(e);
    if hint {
        err.message.push_str(
            "; rerun with --mc --trials 1000 for a Monte Carlo estimate, or raise --budget",
        );
    }
    err
}

pub fn wiretap_cmd(file: &SpecFile, resolution: usize, points: usize) -> Result<Output> {
    let (spec, code_rate) = file.wiretap()?;
    let solver = GammaSolver::new(&spec, resolution)?;
    let cs = solver.secrecy_capacity();
    let top = solver.max_rate();
    let source_rate = spec.source_entropy() / spec.lambda().value();
    let at_source = match solver.gamma(source_rate) {
        Ok(p) => to_value(&p),
        Err(Error::InfeasibleRate { .. }) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    let mut table = Table::new(&WIRETAP_COLUMNS);
    let curve: Vec<Value> = crate::commands::axis_values(0.0, top, points)
        .into_iter()
        .map(|r| {
            let g = solver.gamma(r)?;
            Ok(json!({
                "rate": r,
                "gamma": g.value,
                "mi_main": g.mi_main,
                "mi_tap": g.mi_tap,
                "secrecy_capacity": cs,
            }))
        })
        .collect::<std::result::Result<_, Error>>()?;
    curve.iter().for_each(|r| table.push(r));
    let equivocation = match code_rate {
        Some(rate) => {
            let eav = eavesdropper_system(&spec, &file.ensemble_spec()?, rate)?;
            json!({
                "code_rate": rate,
                "equivocation_bound": equivocation_bound(&spec, &eav, rate)?,
            })
        }
        None => Value::Null,
    };
    let mut doc = header("wiretap");
    doc.insert("secrecy_capacity".into(), json!(cs));
    doc.insert("max_rate".into(), json!(top));
    doc.insert("certified".into(), json!(solver.certified()));
    doc.insert("source_rate".into(), json!(source_rate));
    doc.insert("gamma_at_source_rate".into(), at_source);
    doc.insert("equivocation".into(), equivocation);
    doc.insert("curve".into(), Value::Array(curve));
    Ok(Output {
        json: Value::Object(doc),
        table,
    })
}

fn user_rate(spec: &MacSpec) -> Result<Value> {
    match mac_mi_user(spec) {
        Ok(v) => Ok(json!(v)),
        Err(Error::PhaseMismatch { .. }) => Ok(Value::Null),
        Err(e) => Err(e.into()),
    }
}

pub fn mac_cmd(
    file: &SpecFile,
    block_lengths: &[usize],
    seeds: usize,
    seed: u64,
    budget: u64,
) -> Result<Output> {
    let spec = file.mac()?;
    let rates = mac_rates(&spec)?;
    let phase = classify_phase(&spec.combined_system()?, spec.beta())?;
    let summary = json!({
        "mi_user_s": user_rate(&spec)?,
        "mi_user_t": user_rate(&spec.swapped())?,
        "sum_rate": rates.sum_rate,
        "conditional_rate": rates.conditional_rate,
        "epsilon_c": rates.epsilon_c,
        "phase": phase.as_str(),
    });
    let mut oracle = Vec::new();
    for &n in block_lengths {
        for k in 0..seeds as u64 {
            let r = mac_oracle_with_budget(&spec, n, seed.wrapping_add(k), budget)?;
            oracle.push(to_value(&r));
        }
    }
    let mut table = Table::new(&MAC_COLUMNS);
    let merge = |row: &Value| {
        let mut m = summary.as_object().expect("object").clone();
        m.extend(row.as_object().expect("object").clone());
        Value::Object(m)
    };
    if oracle.is_empty() {
        table.push(&summary);
    } else {
        oracle.iter().for_each(|r| table.push(&merge(r)));
    }
    let mut doc = header("mac");
    doc.insert("rates".into(), to_value(&rates));
    doc.insert("summary".into(), summary);
    doc.insert("oracle".into(), Value::Array(oracle));
    Ok(Output {
        json: Value::Object(doc),
        table,
    })
}
