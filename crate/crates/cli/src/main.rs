//! `wegnerlab`: seeded experiments on Wegner estimates for alloy-type
//! lattice operators.
//!
//! Exit status: 0 on success, 1 on operational errors, 2 when a proven bound
//! is violated.

mod config;
mod manifest;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use wegnerlab::canonical::short_hash;
use wegnerlab::initial_scale::{run_tails, two_scale_probe, write_two_scale_csv, TailsConfig};
use wegnerlab::spectral::{averaging_suite, write_averaging_csv, AveragingConfig};
use wegnerlab::toeplitz::{neumann_inverse_bound, norm_growth_probe, ConvolutionVector};
use wegnerlab::wegner::{
    dos_estimate, h2_cells, ids_estimate, lipschitz_for_config, verify_wegner, write_dos_csv, write_h2_csv,
    ConstantMode, Diagnostic, IdsCurve, Severity, WegnerConfig,
};

use crate::config::{detect_kind, from_value, load_value, ConfigKind};
use crate::manifest::RunManifest;

#[derive(Parser)]
#[command(name = "wegnerlab", version, about = "Wegner-estimate experiments for alloy-type lattice operators")]
struct Cli {
    /// Worker threads; never changes the outputs.
    #[arg(long, global = true, env = "WEGNERLAB_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Replaces the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Dotted JSON path assignment, e.g. `sides.0=32`; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Trace bound E[Tr P([E−ε, E])] ≤ bound on every (l, E, ε) cell.
    Wegner(RunArgs),
    /// Averaged counting function on the config's `ids` grid, with the Lipschitz check.
    Ids(RunArgs),
    /// Finite-difference density of states on the config's `ids` grid.
    Dos(RunArgs),
    /// Inverse-norm growth of the truncated Toeplitz matrices.
    Toeplitz {
        /// Convolution vector JSON.
        #[arg(long)]
        alpha: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        sides: Vec<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Rank-one spectral-averaging checks on random small systems.
    Averaging(RunArgs),
    /// Neumann ground-state tail probabilities and the rare-configuration monitor.
    Tails(RunArgs),
    /// Two-scale union bound for the ground-state tail.
    TwoScale(RunArgs),
    /// Checks a config statically and lists diagnostics.
    Validate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

enum Outcome {
    Ok,
    Violation(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} workers: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Wegner(a) => cmd_wegner(&a),
        Command::Ids(a) => cmd_ids(&a, false),
        Command::Dos(a) => cmd_ids(&a, true),
        Command::Toeplitz { alpha, sides, out } => cmd_toeplitz(&alpha, &sides, &out),
        Command::Averaging(a) => cmd_averaging(&a),
        Command::Tails(a) => cmd_tails(&a),
        Command::TwoScale(a) => cmd_two_scale(&a),
        Command::Validate { config, overrides } => cmd_validate(&config, &overrides),
    }
}

fn load<T: serde::de::DeserializeOwned>(a: &RunArgs) -> Result<(T, Value)> {
    let value = load_value(&a.config, &a.overrides, a.seed)?;
    let parsed = from_value(value.clone()).with_context(|| format!("invalid config {}", a.config.display()))?;
    Ok((parsed, value))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn print_warnings(diagnostics: &[Diagnostic]) {
    for d in diagnostics.iter().filter(|d| d.severity == Severity::Warning) {
        eprintln!("{d}");
    }
}

fn finish(manifest: RunManifest, out: &Path, start: Instant, outcome: Outcome) -> Result<Outcome> {
    let mut manifest = manifest;
    if let Outcome::Violation(_) = outcome {
        manifest.status = "violation";
    }
    for f in &manifest.outputs {
        println!("wrote {}", out.join(f).display());
    }
    manifest.write(out, start.elapsed().as_secs_f64())?;
    Ok(outcome)
}

fn cmd_wegner(a: &RunArgs) -> Result<Outcome> {
    let start = Instant::now();
    let (config, raw): (WegnerConfig, Value) = load(a)?;
    print_warnings(&config.diagnostics());
    let report = verify_wegner(&config)?;
    report.write_csv(create(&a.out, "wegner.csv")?)?;
    let mut manifest = RunManifest::new("wegner", report.config_hash.clone(), raw);
    manifest.seed = Some(config.seed);
    manifest.samples = Some(config.samples);
    manifest.outputs.push("wegner.csv".into());

    let mut failures: Vec<String> = report
        .failures()
        .map(|c| format!("l={} E={} eps={}: ucl99 {} > bound {}", c.l, c.energy, c.eps, c.ucl99, c.bound))
        .collect();
    let mut h2_summary = Value::Null;
    if let Some(h2) = &config.h2 {
        let rows = h2_cells(&config, &h2.energies, &h2.etas, h2.side)?;
        write_h2_csv(&rows, create(&a.out, "h2.csv")?, &report.config_hash)?;
        manifest.outputs.push("h2.csv".into());
        failures.extend(
            rows.iter()
                .filter(|r| !r.pass)
                .map(|r| format!("h2 l={} E={} eta={}: p {} > bound {}", r.l, r.energy, r.eta, r.p_hat, r.bound)),
        );
        h2_summary = json!({ "cells": rows.len(), "failures": rows.iter().filter(|r| !r.pass).count() });
    }
    manifest.summary = json!({
        "mode": config.mode.as_str(),
        "cells": report.cells.len(),
        "failures": report.failures().count(),
        "degenerate_hits": report.cells.iter().map(|c| c.degenerate_hits).sum::<usize>(),
        "h2": h2_summary,
    });
    println!("{} cells, {} failures", report.cells.len(), report.failures().count());
    let outcome = if failures.is_empty() { Outcome::Ok } else { Outcome::Violation(failures.join("; ")) };
    finish(manifest, &a.out, start, outcome)
}

fn cmd_ids(a: &RunArgs, dos: bool) -> Result<Outcome> {
    let start = Instant::now();
    let (config, raw): (WegnerConfig, Value) = load(a)?;
    print_warnings(&config.diagnostics());
    let Some(grid) = &config.ids else {
        bail!("config has no `ids` grid (side, e_min, e_max, h)");
    };
    let hash = config.hash()?;
    let curve: IdsCurve = ids_estimate(&config, &grid.energies(), grid.side)?;
    let name = if dos { "dos" } else { "ids" };
    let mut manifest = RunManifest::new(name, hash.clone(), raw);
    manifest.seed = Some(config.seed);
    manifest.samples = Some(config.samples);
    let mut outcome = Outcome::Ok;
    if dos {
        let rows = dos_estimate(&curve)?;
        write_dos_csv(&rows, grid.side, create(&a.out, "dos.csv")?, &hash)?;
        manifest.outputs.push("dos.csv".into());
        manifest.summary = json!({ "points": rows.len() });
    } else {
        curve.write_csv(create(&a.out, "ids.csv")?, &hash)?;
        manifest.outputs.push("ids.csv".into());
        if config.mode == ConstantMode::Certified {
            let l = lipschitz_for_config(&config, &curve)?;
            println!(
                "max difference quotient {} vs constant {} + allowance {}",
                l.max_quotient, l.constant, l.allowance
            );
            if !l.pass {
                outcome = Outcome::Violation(format!(
                    "IDS difference quotient {} exceeds {} + {}",
                    l.max_quotient, l.constant, l.allowance
                ));
            }
            manifest.summary = json!({ "lipschitz": l });
        } else {
            manifest.summary = json!({ "lipschitz": "excluded in this mode" });
        }
    }
    finish(manifest, &a.out, start, outcome)
}

fn cmd_toeplitz(alpha_path: &Path, sides: &[usize], out: &Path) -> Result<Outcome> {
    let start = Instant::now();
    let text = std::fs::read_to_string(alpha_path).with_context(|| format!("reading {}", alpha_path.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", alpha_path.display()))?;
    let alpha: ConvolutionVector =
        from_value(value.clone()).with_context(|| format!("invalid convolution vector {}", alpha_path.display()))?;
    let config = json!({ "alpha": value, "sides": sides });
    let hash = short_hash(&config)?;
    let table = norm_growth_probe(&alpha, sides)?;
    let (normalized, _) = alpha.normalize()?;
    let certificate = neumann_inverse_bound(&normalized).ok();

    let mut w = csv::Writer::from_writer(create(out, "toeplitz.csv")?);
    w.write_record(["l", "size", "inverse_norm", "neumann_bound", "slope", "config_hash"])?;
    let mut failures = Vec::new();
    for r in &table.rows {
        // the certificate is for the normalized matrix; undo the 1/α_0 scaling
        let bound = certificate.map(|b| b / alpha.alpha0().abs());
        if let Some(b) = bound {
            if r.inverse_norm > b * (1.0 + 1e-8) {
                failures.push(format!("l={}: norm {} > certificate {b}", r.side, r.inverse_norm));
            }
        }
        w.write_record([
            r.side.to_string(),
            r.size.to_string(),
            r.inverse_norm.to_string(),
            bound.map(|b| b.to_string()).unwrap_or_default(),
            table.exponent.to_string(),
            hash.clone(),
        ])?;
    }
    w.flush()?;
    println!("growth exponent {}", table.exponent);
    let mut manifest = RunManifest::new("toeplitz", hash, config);
    manifest.outputs.push("toeplitz.csv".into());
    manifest.summary = json!({ "slope": table.exponent, "certified": certificate.is_some() });
    let outcome = if failures.is_empty() { Outcome::Ok } else { Outcome::Violation(failures.join("; ")) };
    finish(manifest, out, start, outcome)
}

fn cmd_averaging(a: &RunArgs) -> Result<Outcome> {
    let start = Instant::now();
    let (config, raw): (AveragingConfig, Value) = load(a)?;
    let hash = short_hash(&config)?;
    let rows = averaging_suite(&config)?;
    write_averaging_csv(&rows, create(&a.out, "averaging.csv")?, &hash)?;
    let failures: Vec<String> = rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("system {}: lhs {} > bound {}", r.system, r.check.lhs, r.check.bound))
        .collect();
    let mut manifest = RunManifest::new("averaging", hash, raw);
    manifest.seed = Some(config.seed);
    manifest.samples = Some(config.systems);
    manifest.outputs.push("averaging.csv".into());
    manifest.summary = json!({ "systems": rows.len(), "failures": failures.len() });
    println!("{} systems, {} failures", rows.len(), failures.len());
    let outcome = if failures.is_empty() { Outcome::Ok } else { Outcome::Violation(failures.join("; ")) };
    finish(manifest, &a.out, start, outcome)
}

fn cmd_tails(a: &RunArgs) -> Result<Outcome> {
    let start = Instant::now();
    let (config, raw): (TailsConfig, Value) = load(a)?;
    print_warnings(&config.diagnostics());
    let report = run_tails(&config)?;
    report.write_csv(create(&a.out, "tails.csv")?)?;
    let mut manifest = RunManifest::new("tails", report.config_hash.clone(), raw);
    manifest.seed = Some(config.seed);
    manifest.samples = Some(config.samples);
    manifest.outputs.push("tails.csv".into());
    let fits: Vec<Value> = report
        .fits
        .iter()
        .map(|(e, f)| match f {
            Ok(f) => json!({ "E": e, "c_hat": f.c_hat, "monotone": f.monotone, "residuals": f.residuals }),
            Err(msg) => json!({ "E": e, "error": msg }),
        })
        .collect();
    manifest.summary = json!({ "fits": fits, "monitor_pass": report.monitor_pass() });
    for r in &report.rows {
        println!("l={} E={} p_hat={} violations={}", r.l, r.energy, r.p_hat, r.violations);
    }
    let outcome = if report.monitor_pass() {
        Outcome::Ok
    } else {
        Outcome::Violation("rare-configuration implication violated with eps_u = 0 and l >= 16".into())
    };
    finish(manifest, &a.out, start, outcome)
}

fn cmd_two_scale(a: &RunArgs) -> Result<Outcome> {
    let start = Instant::now();
    let (config, raw): (TailsConfig, Value) = load(a)?;
    print_warnings(&config.diagnostics());
    config.validate()?;
    let Some(ts) = config.two_scale() else {
        bail!("config needs L, zeta and beta for the two-scale probe");
    };
    let hash = config.hash()?;
    let r = two_scale_probe(&config.site, &config.density, ts.big_l, ts.zeta, ts.beta, config.samples, config.seed)?;
    write_two_scale_csv(&r, create(&a.out, "two_scale.csv")?, &hash)?;
    println!(
        "L={} l={}: direct {} vs union bound {} (+3 se {})",
        r.big_l, r.l, r.lhs_p, r.union_bound, 3.0 * r.combined_se
    );
    let mut manifest = RunManifest::new("two-scale", hash, raw);
    manifest.seed = Some(config.seed);
    manifest.samples = Some(config.samples);
    manifest.outputs.push("two_scale.csv".into());
    manifest.summary = serde_json::to_value(&r)?;
    let outcome = if r.pass {
        Outcome::Ok
    } else {
        Outcome::Violation(format!("direct {} exceeds union bound {}", r.lhs_p, r.union_bound))
    };
    finish(manifest, &a.out, start, outcome)
}

/// Prints every diagnostic; errors make the config unrunnable (exit 1).
fn cmd_validate(path: &Path, overrides: &[String]) -> Result<Outcome> {
    let value = load_value(path, overrides, None)?;
    let diagnostics = match detect_kind(&value)? {
        ConfigKind::Wegner => parse_then(value, |c: WegnerConfig| c.diagnostics()),
        ConfigKind::Tails => parse_then(value, |c: TailsConfig| c.diagnostics()),
        ConfigKind::Averaging => parse_then(value, |c: AveragingConfig| {
            if c.max_size < 2 {
                vec![Diagnostic::error("max_size", "need max_size >= 2")]
            } else {
                Vec::new()
            }
        }),
        ConfigKind::Convolution => parse_then(value, |a: ConvolutionVector| match a.normalize() {
            Ok((n, _)) if n.alpha_star() >= 1.0 => vec![Diagnostic::warning(
                "entries",
                format!("alpha* / |alpha_0| = {} >= 1: not certifiable", n.alpha_star()),
            )],
            _ => Vec::new(),
        }),
    };
    for d in &diagnostics {
        println!("{d}");
    }
    let errors = diagnostics.iter().filter(|d| d.severity == Severity::Error).count();
    if errors > 0 {
        bail!("{errors} error(s) in {}", path.display());
    }
    if diagnostics.is_empty() {
        println!("ok: no diagnostics");
    }
    Ok(Outcome::Ok)
}

fn parse_then<T: serde::de::DeserializeOwned>(value: Value, check: impl Fn(T) -> Vec<Diagnostic>) -> Vec<Diagnostic> {
    match from_value::<T>(value) {
        Ok(c) => check(c),
        Err(e) => vec![Diagnostic::error(&e.path, e.message)],
    }
}
