//! Command dispatch: each command evaluates through the analysis harness and
//! emits deterministic CSV — fixed 17-significant-digit scientific notation,
//! `,` separators, `\n` line ends, and a header comment block recording the
//! tool version, command, configuration hash, and optional seed.

use crate::analysis::{
    converge_lambda, converge_n, smatrix_rows, sweep_k, ConvergenceRecord, Scenario,
};
use crate::config::{config_hash, Config, CutoffSpec};
use crate::coupling::Variant;
use crate::error::{Error, Result};
use crate::geometry::Geometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Smatrix,
    Sweep,
    ConvergeN,
    ConvergeLambda,
    Unitarity,
    CompareFormulas,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Smatrix => "smatrix",
            Command::Sweep => "sweep",
            Command::ConvergeN => "converge-n",
            Command::ConvergeLambda => "converge-lambda",
            Command::Unitarity => "unitarity",
            Command::CompareFormulas => "compare-formulas",
        }
    }
}

impl std::str::FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smatrix" => Ok(Command::Smatrix),
            "sweep" => Ok(Command::Sweep),
            "converge-n" => Ok(Command::ConvergeN),
            "converge-lambda" => Ok(Command::ConvergeLambda),
            "unitarity" => Ok(Command::Unitarity),
            "compare-formulas" => Ok(Command::CompareFormulas),
            other => Err(Error::ConfigError(format!(
                "unknown command {other:?}; expected one of smatrix, sweep, converge-n, \
                 converge-lambda, unitarity, compare-formulas"
            ))),
        }
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(command: Command, config: &Config, seed: Option<u64>, columns: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!("# wavescat {}\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&format!("# command: {}\n", command.name()));
    out.push_str(&format!(
        "# config-hash: fnv1a64:{:016x}\n",
        config_hash(config)
    ));
    if let Some(seed) = seed {
        out.push_str(&format!("# seed: {seed}\n"));
    }
    out.push_str(columns);
    out.push('\n');
    out
}

/// The interior/channel materialization cap. Discrete geometries carry their
/// own finite spectrum; analytic ones need `run.N` as an explicit budget
/// large enough that every open channel exists.
fn scenario_for(config: &Config, k_list: &[f64]) -> Result<Scenario> {
    let cap = match (&config.geometry, config.n_cut) {
        (Geometry::Fd2d { .. }, _) => f64::INFINITY,
        (_, CutoffSpec::Energy(n)) => {
            let k_sq_max = k_list.iter().fold(0.0_f64, |acc, &k| acc.max(k * k));
            if n < k_sq_max {
                return Err(Error::RangeError {
                    key: "run.N".into(),
                    value: fmt(n),
                    why: format!(
                        "interior cutoff must be at least k^2 = {} so every open channel is \
                         materialized",
                        fmt(k_sq_max)
                    ),
                });
            }
            n
        }
        (_, CutoffSpec::All) => {
            return Err(Error::RangeError {
                key: "run.N".into(),
                value: "all".into(),
                why: "analytic geometries need a finite interior cutoff".into(),
            })
        }
    };
    Scenario::new(config.geometry.clone(), cap, config.threshold_eps)
}

fn single_k(config: &Config) -> Result<f64> {
    config.k.ok_or(Error::MissingKey { key: "run.k" })
}

fn k_list(config: &Config) -> Result<Vec<f64>> {
    if let Some(grid) = &config.k_grid {
        return Ok(grid.clone());
    }
    if let Some(k) = config.k {
        return Ok(vec![k]);
    }
    Err(Error::MissingKey { key: "run.k" })
}

fn numeric_cut(spec: CutoffSpec, key: &'static str) -> Result<f64> {
    match spec {
        CutoffSpec::Energy(e) => Ok(e),
        CutoffSpec::All => Err(Error::RangeError {
            key: key.into(),
            value: "all".into(),
            why: "this command needs an explicit top cutoff to build its ladder".into(),
        }),
    }
}

const SWEEP_COLUMNS: &str =
    "k,lambda,lambda_prime,re_S,im_S,abs_err_vs_reference,unitarity_defect,open_channel_count";

fn push_sweep_row(out: &mut String, row: &crate::analysis::SweepRow) {
    let err = row.abs_err_vs_reference.map(fmt).unwrap_or_default();
    out.push_str(&format!(
        "{},{},{},{},{},{},{},{}\n",
        fmt(row.k),
        row.lambda,
        row.lambda_prime,
        fmt(row.s.re),
        fmt(row.s.im),
        err,
        fmt(row.unitarity_defect),
        row.open_channel_count
    ));
}

fn convergence_csv(
    command: Command,
    config: &Config,
    seed: Option<u64>,
    control_name: &str,
    record: &ConvergenceRecord,
) -> String {
    let mut out = header(command, config, seed, &format!("{control_name},error"));
    for (c, e) in record.control.iter().zip(&record.errors) {
        out.push_str(&format!("{},{}\n", fmt(*c), fmt(*e)));
    }
    out.push_str(&format!("# reference: {}\n", record.reference));
    out.push_str(&format!("# fit-coords: {}\n", record.fit_coords));
    match &record.fit {
        Some(fit) => {
            out.push_str(&format!("# fit-slope: {}\n", fmt(fit.slope)));
            out.push_str(&format!("# fit-intercept: {}\n", fmt(fit.intercept)));
        }
        None => out.push_str("# fit-slope: none\n"),
    }
    out
}

/// Run one command against a parsed configuration, returning the CSV text.
pub fn run_command(command: Command, config: &Config, seed: Option<u64>) -> Result<String> {
    match command {
        Command::Smatrix => {
            let k = single_k(config)?;
            let scenario = scenario_for(config, &[k])?;
            let rows = smatrix_rows(
                &scenario,
                k,
                config.n_cut.to_cutoff(),
                config.lambda_cut.to_cutoff(),
                config.variant,
                config.resolvent,
            )?;
            let mut out = header(command, config, seed, SWEEP_COLUMNS);
            for row in &rows {
                push_sweep_row(&mut out, row);
            }
            Ok(out)
        }
        Command::Sweep => {
            let ks = k_list(config)?;
            let scenario = scenario_for(config, &ks)?;
            let table = sweep_k(
                &scenario,
                &ks,
                config.n_cut.to_cutoff(),
                config.lambda_cut.to_cutoff(),
                config.variant,
                config.resolvent,
            )?;
            let mut out = header(command, config, seed, SWEEP_COLUMNS);
            for row in &table.rows {
                push_sweep_row(&mut out, row);
            }
            for (k, reason) in &table.skipped {
                out.push_str(&format!("# skipped: k = {} ({reason})\n", fmt(*k)));
            }
            Ok(out)
        }
        Command::ConvergeN => {
            let k = single_k(config)?;
            let top = numeric_cut(config.n_cut, "run.N")?;
            let scenario = scenario_for(config, &[k])?;
            let ladder: Vec<f64> = (0..5).rev().map(|j| top / f64::powi(2.0, j)).collect();
            let record = converge_n(
                &scenario,
                k,
                config.lambda_cut.to_cutoff(),
                &ladder,
                config.variant,
                config.resolvent,
            )?;
            Ok(convergence_csv(command, config, seed, "N", &record))
        }
        Command::ConvergeLambda => {
            let k = single_k(config)?;
            let top = numeric_cut(config.lambda_cut, "run.Lambda")?;
            let scenario = scenario_for(config, &[k])?;
            let ladder: Vec<f64> = (0..5)
                .rev()
                .map(|j| k * k + (top - k * k) / f64::powi(2.0, j))
                .collect();
            let record = converge_lambda(
                &scenario,
                k,
                config.n_cut.to_cutoff(),
                &ladder,
                config.variant,
                config.resolvent,
            )?;
            Ok(convergence_csv(command, config, seed, "Lambda", &record))
        }
        Command::Unitarity => {
            let ks = k_list(config)?;
            let scenario = scenario_for(config, &ks)?;
            let mut out = header(
                command,
                config,
                seed,
                "k,open_channel_count,unitarity_defect_projected,unitarity_defect_full,\
                 symmetry_defect_full",
            );
            let mut skipped = Vec::new();
            for &k in &ks {
                match scenario.smatrix_at(
                    k,
                    config.n_cut.to_cutoff(),
                    config.lambda_cut.to_cutoff(),
                    config.variant,
                    config.resolvent,
                ) {
                    Ok(result) => out.push_str(&format!(
                        "{},{},{},{},{}\n",
                        fmt(k),
                        result.open_columns.len(),
                        fmt(result.unitarity_defect_open),
                        fmt(result.unitarity_defect_full),
                        fmt(result.symmetry_defect_full)
                    )),
                    Err(e @ Error::ThresholdError { .. }) => skipped.push((k, e.to_string())),
                    Err(other) => return Err(other),
                }
            }
            for (k, reason) in &skipped {
                out.push_str(&format!("# skipped: k = {} ({reason})\n", fmt(*k)));
            }
            Ok(out)
        }
        Command::CompareFormulas => {
            let ks = k_list(config)?;
            let scenario = scenario_for(config, &ks)?;
            let mut out = header(
                command,
                config,
                seed,
                "k,open_channel_count,defect_projected_transpose,defect_projected_conjugate,\
                 defect_full_transpose,defect_full_conjugate",
            );
            let mut skipped = Vec::new();
            for &k in &ks {
                let per_variant = [Variant::Transpose, Variant::Conjugate].map(|variant| {
                    scenario.smatrix_at(
                        k,
                        config.n_cut.to_cutoff(),
                        config.lambda_cut.to_cutoff(),
                        variant,
                        config.resolvent,
                    )
                });
                match per_variant {
                    [Ok(t), Ok(c)] => out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        fmt(k),
                        t.open_columns.len(),
                        fmt(t.unitarity_defect_open),
                        fmt(c.unitarity_defect_open),
                        fmt(t.unitarity_defect_full),
                        fmt(c.unitarity_defect_full)
                    )),
                    [Err(e @ Error::ThresholdError { .. }), _]
                    | [_, Err(e @ Error::ThresholdError { .. })] => {
                        skipped.push((k, e.to_string()))
                    }
                    [Err(other), _] | [_, Err(other)] => return Err(other),
                }
            }
            for (k, reason) in &skipped {
                out.push_str(&format!("# skipped: k = {} ({reason})\n", fmt(*k)));
            }
            Ok(out)
        }
    }
}
