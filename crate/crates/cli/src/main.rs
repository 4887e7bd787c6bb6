//! Command-line front end: leakage tables, CSV sweeps, finite-key rates,
//! verification suites and Monte-Carlo simulation.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid arguments or I/O
//! failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rrdps_core::attack::SpectralParams;
use rrdps_core::oracle::{self, suite_names};
use rrdps_core::sweep::{self, format_float, COMPARE_SCHEMA};
use rrdps_core::{bounds, Error};

#[derive(Parser)]
#[command(name = "rrdps", version, about = "Security-bound calculator for round-robin differential phase shift QKD")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Leakage measures, saturation points and optimal attack parameters at one (d, β)
    Bounds {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        beta: f64,
        /// emit a machine-readable JSON record
        #[arg(long)]
        json: bool,
    },
    /// CSV sweep of all measures over a β range at fixed d
    Sweep {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0.0)]
        beta_min: f64,
        #[arg(long, default_value_t = 0.5)]
        beta_max: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV of saturation points and saturated leakages over a dimension range
    Saturation {
        #[arg(long, default_value_t = 3)]
        d_min: usize,
        #[arg(long, default_value_t = 30)]
        d_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extractable key length and distance bound for a finite-key query
    Rate {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        json: bool,
    },
    /// Run brute-force verification suites; exits 1 on any failure
    Verify {
        /// suite name or "all"
        #[arg(long, default_value = "all")]
        suite: String,
        /// comma-separated qudit dimensions
        #[arg(long, value_delimiter = ',', default_values_t = vec![3usize, 4, 5])]
        d: Vec<usize>,
        /// random feasible parameter draws per dimension
        #[arg(long, default_value_t = 100)]
        draws: usize,
        /// absolute tolerance override applied to every suite
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Monte-Carlo protocol rounds under the coupled-ancilla attack
    Simulate {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 100_000)]
        rounds: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// attack parameter λ₊ (defaults to the min-entropy optimum)
        #[arg(long)]
        lambda_plus: Option<f64>,
        /// attack parameter λ₋ (defaults to the min-entropy optimum)
        #[arg(long)]
        lambda_minus: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// CSV comparison against earlier published bounds
    Compare {
        /// fixed d: β-sweep comparison; omitted: saturated comparison over d range
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 3)]
        d_min: usize,
        #[arg(long, default_value_t = 30)]
        d_max: usize,
        #[arg(long, default_value_t = 0.0)]
        beta_min: f64,
        #[arg(long, default_value_t = 0.5)]
        beta_max: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Round every float in a JSON tree to 12 significant digits.
fn round_json(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Number(n) => {
            if let Some(x) = n.as_f64() {
                if n.is_f64() {
                    let rounded: f64 = format!("{x:.11e}").parse().unwrap();
                    if let Some(num) = serde_json::Number::from_f64(rounded) {
                        *value = serde_json::Value::Number(num);
                    }
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_json),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> anyhow::Result<()> {
    let mut json = serde_json::to_value(value)?;
    round_json(&mut json);
    println!("{}", serde_json::to_string(&json)?);
    Ok(())
}

fn write_output(out: Option<PathBuf>, content: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            let mut file = std::fs::File::create(&path)
                .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))?;
            file.write_all(content.as_bytes())?;
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn cmd_bounds(d: usize, beta: f64, json: bool) -> anyhow::Result<ExitCode> {
    let report = bounds::leakage_report(d, beta)?;
    if json {
        print_json(&report)?;
    } else {
        println!("d = {d}, beta = {beta}");
        println!("  statdist_leak    = {:.6} bits  (2 log2 T){}", report.statdist_leak,
            if report.statdist_saturated { "  [saturated]" } else { "" });
        println!("  i_ae             = {:.6} bits{}", report.i_ae,
            if report.vn_saturated { "  [saturated]" } else { "" });
        println!("  minentropy_leak  = {:.6} bits{}", report.minentropy_leak,
            if report.minentropy_saturated { "  [saturated]" } else { "" });
        println!("  accessible_info  = {:.6} bits", report.accessible_info);
        println!("  qkd_rate         = {:.6}", report.qkd_rate);
        println!("  beta_star        = {:.6}", report.beta_star);
        println!("  beta_zero        = {:.6}", report.beta_zero);
        println!("  beta_sat         = {:.6}", report.beta_sat);
        println!("  lambda (statdist) = ({:.6e}, {:.6e})", report.lambdas_statdist.0, report.lambdas_statdist.1);
        println!("  lambda (vn)       = ({:.6e}, {:.6e})", report.lambdas_vn.0, report.lambdas_vn.1);
        println!("  lambda (minentropy) = ({:.6e}, {:.6e})", report.lambdas_min.0, report.lambdas_min.1);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_rate(n: u64, epsilon: f64, d: usize, beta: f64, json: bool) -> anyhow::Result<ExitCode> {
    let kl = bounds::key_length_for_epsilon(n, beta, d, epsilon)?;
    if json {
        print_json(&kl)?;
    } else if kl.extractable {
        println!("ell       = {}", kl.ell);
        println!("ell/n     = {:.12}", kl.ell as f64 / n as f64);
        println!("rate      = {:.12}", kl.rate);
        println!("bound     = {:.6e}  (trace distance of key from uniform)", kl.bound);
    } else {
        println!("no extractable key (rate = {:.6e} <= 0)", kl.rate);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(
    suite: &str,
    d: &[usize],
    draws: usize,
    tol: Option<f64>,
    seed: u64,
    json: bool,
) -> anyhow::Result<ExitCode> {
    let report = if suite == "all" {
        oracle::verify_all_with_tolerance(d, draws, seed, tol)?
    } else {
        let result = oracle::run_suite(suite, d, draws, seed, tol)?;
        let pass = result.pass;
        oracle::VerifyReport { seed, suites: vec![result], pass }
    };
    if json {
        print_json(&report)?;
    } else {
        for s in &report.suites {
            println!(
                "{:<22} {:>5} cases  max dev {:.3e}  tol {:.1e}  {}  [{}]",
                s.suite,
                s.cases,
                s.max_deviation,
                s.tolerance,
                if s.pass { "PASS" } else { "FAIL" },
                s.worst_case,
            );
        }
        println!("overall: {}", if report.pass { "PASS" } else { "FAIL" });
    }
    Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_simulate(
    d: usize,
    beta: f64,
    rounds: u64,
    seed: u64,
    lambda_plus: Option<f64>,
    lambda_minus: Option<f64>,
    json: bool,
) -> anyhow::Result<ExitCode> {
    let (lp_opt, lm_opt) = bounds::optimal_lambdas_min(beta, d)?;
    let sp = SpectralParams::from_lambda_pm(
        d,
        beta,
        lambda_plus.unwrap_or(lp_opt),
        lambda_minus.unwrap_or(lm_opt),
    )?;
    let report = oracle::simulate(&sp, rounds, seed)?;
    if json {
        print_json(&report)?;
    } else {
        println!("d = {}, beta = {}, lambda = ({:.6e}, {:.6e}), rounds = {}, seed = {}",
            report.d, report.beta, report.lambda_plus, report.lambda_minus, report.rounds, report.seed);
        println!("  bit error rate = {:.6} ± {:.6}", report.bit_error_rate, report.ber_std_err);
        println!("  eve success    = {:.6} ± {:.6}  (expected {:.6})",
            report.eve_success, report.eve_std_err, report.eve_success_expected);
        let freqs: Vec<String> =
            report.k_frequencies.iter().map(|f| format!("{f:.4}")).collect();
        println!("  k frequencies  = [{}]", freqs.join(", "));
    }
    Ok(ExitCode::SUCCESS)
}

fn compare_csv_beta(d: usize, beta_min: f64, beta_max: f64, step: f64) -> anyhow::Result<String> {
    let mut out = String::from(COMPARE_SCHEMA);
    out.push('\n');
    out.push_str("d,beta,statdist_leak,i_ae,sk2017,syk,intercept_resend_lower\n");
    let n = ((beta_max - beta_min) / step).round() as usize;
    for i in 0..=n {
        let beta = (beta_min + i as f64 * step).min(beta_max);
        let prior = bounds::prior_bounds(beta, d)?;
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            d,
            format_float(beta),
            format_float(bounds::statdist_leak(beta, d)?),
            format_float(bounds::i_ae(beta, d)?),
            format_float(prior.sk2017),
            format_float(prior.syk),
            format_float(prior.intercept_resend_lower),
        ));
    }
    Ok(out)
}

fn compare_csv_saturated(d_min: usize, d_max: usize) -> anyhow::Result<String> {
    if d_min > d_max {
        return Err(Error::Domain(format!("empty range [{d_min}, {d_max}]")).into());
    }
    let mut out = String::from(COMPARE_SCHEMA);
    out.push('\n');
    out.push_str("d,statdist_leak_sat,i_ae_sat,syk\n");
    for d in d_min..=d_max {
        out.push_str(&format!(
            "{},{},{},{}\n",
            d,
            format_float(bounds::statdist_leak(0.5, d)?),
            format_float(bounds::i_ae(0.5, d)?),
            format_float(bounds::prior_bounds(0.5, d)?.syk),
        ));
    }
    Ok(out)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Bounds { d, beta, json } => cmd_bounds(d, beta, json),
        Command::Sweep { d, beta_min, beta_max, step, out } => {
            let rows = sweep::sweep_rows(d, beta_min, beta_max, step)?;
            write_output(out, &sweep::sweep_csv(&rows))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Saturation { d_min, d_max, out } => {
            let rows = sweep::saturation_rows(d_min, d_max)?;
            write_output(out, &sweep::saturation_csv(&rows))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Rate { n, epsilon, d, beta, json } => cmd_rate(n, epsilon, d, beta, json),
        Command::Verify { suite, d, draws, tol, seed, json } => {
            if suite != "all" && !suite_names().contains(&suite.as_str()) {
                anyhow::bail!(
                    "unknown suite '{suite}'; available: all, {}",
                    suite_names().join(", ")
                );
            }
            cmd_verify(&suite, &d, draws, tol, seed, json)
        }
        Command::Simulate { d, beta, rounds, seed, lambda_plus, lambda_minus, json } => {
            cmd_simulate(d, beta, rounds, seed, lambda_plus, lambda_minus, json)
        }
        Command::Compare { d, d_min, d_max, beta_min, beta_max, step, out } => {
            let csv = match d {
                Some(d) => compare_csv_beta(d, beta_min, beta_max, step)?,
                None => compare_csv_saturated(d_min, d_max)?,
            };
            write_output(out, &csv)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
