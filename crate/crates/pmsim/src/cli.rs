//! Command-line interface: verify the square, compute bounds, run the
//! probe-qubit suite, sweep the noise curve, synthesize spectra.
//!
//! Exit codes: 0 success, 1 validation failure (diagnostic names the
//! offending flag), 2 internal numerical-integrity failure. All output is
//! deterministic for fixed arguments; summaries print 6 decimal places,
//! CSV files carry 17 significant digits.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::dqc1::{run_experiment_suite_with, ProbeSpec, SuiteResult};
use crate::error::Error;
use crate::linalg::{expectation, DensityMatrix};
use crate::nmr::{
    build_hamiltonian, cluster_centers, simulate_fid, spectrum, spectrum_csv, transverse_start,
    ClusterConfig, MolecularHamiltonianParams,
};
use crate::noise::{beta_sweep, NoiseModel};
use crate::square::{line_product, nchv_max, pm_square, verify_square, PmSquare};

const DEFAULT_RATIO_GRID: &str = "0.01:2:50log";

/// Reference beta values marked on the noise curve at ratios 0.05 and
/// 0.75 (effective dephasing times of 30 ms and 2 ms at a 1.5 ms pulse).
const SWEEP_REFERENCES: [(f64, f64); 2] = [(0.05, 5.3), (0.75, 1.1)];

#[derive(Parser)]
#[command(
    name = "pmsim",
    version,
    about = "Peres-Mermin square contextuality simulator with a probe-qubit readout protocol"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the square structure: per-line commutation and products.
    Verify(VerifyArgs),
    /// Run the six probe experiments and print the correlations and beta.
    Beta(SuiteArgs),
    /// Brute-force the noncontextual bound over all 512 assignments.
    Nchv(VerifyArgs),
    /// Run the six probe experiments and emit the suite CSV.
    Dqc1(SuiteArgs),
    /// Sweep beta against the pulse-length/dephasing-time ratio.
    Sweep(SweepArgs),
    /// Synthesize the spin-system spectrum and locate its clusters.
    Spectrum(SpectrumArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Square description file (three token rows plus a sign row);
    /// defaults to the built-in square.
    #[arg(long)]
    square: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Probe purity / measurement efficiency in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    /// Pulse length in ms (used when --t2 enables noise).
    #[arg(long, default_value_t = 1.5)]
    t: f64,
    /// Effective dephasing time in ms; enables per-gate dephasing noise.
    #[arg(long)]
    t2: Option<f64>,
    /// Noise-channel applications per line experiment.
    #[arg(long, default_value_t = 3)]
    gates: usize,
    /// Report raw correlations instead of dividing by epsilon.
    #[arg(long)]
    no_epsilon_correction: bool,
    /// Tolerance for the internal protocol-identity self-check.
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    /// Write the suite CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Pulse length in ms.
    #[arg(long, default_value_t = 1.5)]
    t: f64,
    /// Ratio grid: "start:stop:count", "start:stop:countlog", or a
    /// comma-separated list.
    #[arg(long, default_value = DEFAULT_RATIO_GRID)]
    ratios: String,
    /// Noise-channel applications per line experiment.
    #[arg(long, default_value_t = 3)]
    gates: usize,
    /// Probe purity / measurement efficiency in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    /// Write the sweep CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Parameter file (key=value); defaults to the built-in malonic-acid
    /// table.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Dwell time between samples in ms.
    #[arg(long, default_value_t = 0.025)]
    dwell: f64,
    /// Number of FID samples.
    #[arg(long, default_value_t = 4096)]
    samples: usize,
    /// Apodization time constant in ms.
    #[arg(long, default_value_t = 2.0)]
    t2star: f64,
    /// Write the spectrum CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct CliFailure {
    code: i32,
    message: String,
}

impl CliFailure {
    fn validation(flag: &str, err: impl std::fmt::Display) -> Self {
        Self {
            code: 1,
            message: format!("{flag}: {err}"),
        }
    }
}

fn failure_from(err: Error, flag: &str) -> CliFailure {
    let code = match err {
        Error::NumericalIntegrity(_) => 2,
        _ => 1,
    };
    CliFailure {
        code,
        message: format!("{flag}: {err}"),
    }
}

/// Parses the ratio grid mini-language.
fn parse_ratio_grid(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.len() {
        1 => {
            let values: Result<Vec<f64>, _> = text
                .split(',')
                .map(|tok| tok.trim().parse::<f64>().map_err(|_| tok.to_string()))
                .collect();
            values.map_err(|tok| format!("invalid ratio value '{tok}'"))
        }
        3 => {
            let start: f64 = parts[0]
                .parse()
                .map_err(|_| format!("invalid grid start '{}'", parts[0]))?;
            let stop: f64 = parts[1]
                .parse()
                .map_err(|_| format!("invalid grid stop '{}'", parts[1]))?;
            let (count_text, logarithmic) = match parts[2].strip_suffix("log") {
                Some(rest) => (rest, true),
                None => (parts[2], false),
            };
            let count: usize = count_text
                .parse()
                .map_err(|_| format!("invalid grid count '{count_text}'"))?;
            if count == 0 {
                return Err("grid count must be positive".into());
            }
            if count == 1 {
                return Ok(vec![start]);
            }
            if stop <= start {
                return Err(format!("grid stop {stop} must exceed start {start}"));
            }
            if logarithmic && start <= 0.0 {
                return Err("logarithmic grid requires a positive start".into());
            }
            let step = (count - 1) as f64;
            Ok((0..count)
                .map(|k| {
                    let frac = k as f64 / step;
                    if logarithmic {
                        start * (stop / start).powf(frac)
                    } else {
                        start + (stop - start) * frac
                    }
                })
                .collect())
        }
        _ => Err("expected 'start:stop:count[log]' or a comma-separated list".into()),
    }
}

fn read_file(path: &Path, flag: &str) -> Result<String, CliFailure> {
    fs::read_to_string(path).map_err(|err| {
        CliFailure::validation(flag, format!("cannot read {}: {err}", path.display()))
    })
}

fn load_square(path: Option<&PathBuf>) -> Result<PmSquare, CliFailure> {
    match path {
        None => Ok(pm_square()),
        Some(p) => {
            let text = read_file(p, "--square")?;
            PmSquare::parse(&text).map_err(|err| CliFailure::validation("--square", err))
        }
    }
}

fn emit(out: Option<&PathBuf>, flag: &str, content: &str) -> Result<bool, CliFailure> {
    match out {
        Some(path) => {
            fs::write(path, content).map_err(|err| {
                CliFailure::validation(flag, format!("cannot write {}: {err}", path.display()))
            })?;
            Ok(true)
        }
        None => {
            print!("{content}");
            Ok(false)
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliFailure> {
    let sq = load_square(args.square.as_ref())?;
    let report = verify_square(&sq);
    println!("square:");
    for row in sq.grid() {
        let tokens: Vec<String> = row.iter().map(|p| p.to_string()).collect();
        println!("  {}", tokens.join(" "));
    }
    println!("line  commute  product  expected");
    for check in &report.lines {
        let commute = if check.pairwise_commute.iter().all(|&c| c) {
            "yes"
        } else {
            "no"
        };
        println!(
            "{:<5} {:<8} {:<8} {}{}",
            check.line.label(),
            commute,
            check.product.to_string(),
            sq.line_sign(check.line),
            if check.passed() { "   ok" } else { "   FAIL" },
        );
    }
    if report.passed() {
        println!("result: PASS");
        Ok(())
    } else {
        println!("result: FAIL");
        Err(CliFailure::validation(
            "--square",
            "square failed verification",
        ))
    }
}

fn cmd_nchv(args: &VerifyArgs) -> Result<(), CliFailure> {
    let sq = load_square(args.square.as_ref())?;
    let (max, assignment) = nchv_max(&sq);
    println!("nchv_max = {max}");
    println!("maximizing assignment:");
    for line in assignment.to_string().lines() {
        println!("  {line}");
    }
    Ok(())
}

fn run_suite(args: &SuiteArgs) -> Result<SuiteResult, CliFailure> {
    let probe =
        ProbeSpec::new(args.epsilon).map_err(|err| CliFailure::validation("--epsilon", err))?;
    let noise = match args.t2 {
        None => None,
        Some(t2) => Some(
            NoiseModel::new(args.t, t2, args.gates)
                .map_err(|err| CliFailure::validation("--t2/--t/--gates", err))?,
        ),
    };
    let result = run_experiment_suite_with(probe, noise.as_ref(), !args.no_epsilon_correction)
        .map_err(|err| failure_from(err, "--epsilon"))?;

    // In the noiseless circuit the readout must reproduce
    // epsilon * tr(rho * prod S_k) for every line.
    if noise.is_none() {
        let sq = pm_square();
        let system = DensityMatrix::maximally_mixed(4);
        for line_result in &result.lines {
            let product = line_product(&sq, line_result.line).to_matrix();
            let expected = args.epsilon
                * expectation(&system, &product).map_err(|err| failure_from(err, "--tolerance"))?;
            if (line_result.raw_correlation - expected).abs() > args.tolerance {
                return Err(CliFailure {
                    code: 2,
                    message: format!(
                        "protocol identity violated on {}: {} vs {expected}",
                        line_result.line.label(),
                        line_result.raw_correlation
                    ),
                });
            }
        }
    }
    Ok(result)
}

fn print_suite_summary(result: &SuiteResult) {
    println!("line  raw        corrected  sign  contribution");
    for line in &result.lines {
        println!(
            "{:<5} {:>9.6}  {:>9.6}  {:>4} {:>13.6}",
            line.line.label(),
            line.raw_correlation,
            line.corrected_correlation,
            if line.sign.value() > 0.0 { "+1" } else { "-1" },
            line.contribution,
        );
    }
    println!("beta = {:.6}", result.beta);
}

fn cmd_beta(args: &SuiteArgs) -> Result<(), CliFailure> {
    let result = run_suite(args)?;
    print_suite_summary(&result);
    if let Some(out) = &args.out {
        emit(Some(out), "--out", &result.to_csv())?;
    }
    Ok(())
}

fn cmd_dqc1(args: &SuiteArgs) -> Result<(), CliFailure> {
    let result = run_suite(args)?;
    let wrote_file = emit(args.out.as_ref(), "--out", &result.to_csv())?;
    if wrote_file {
        print_suite_summary(&result);
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliFailure> {
    let ratios =
        parse_ratio_grid(&args.ratios).map_err(|err| CliFailure::validation("--ratios", err))?;
    let probe =
        ProbeSpec::new(args.epsilon).map_err(|err| CliFailure::validation("--epsilon", err))?;
    let series = beta_sweep(args.t, &ratios, probe, args.gates)
        .map_err(|err| failure_from(err, "--ratios"))?;
    let csv = series.to_csv();
    let wrote_file = emit(args.out.as_ref(), "--out", &csv)?;

    let mut annotations = String::new();
    for &(target, reference) in &SWEEP_REFERENCES {
        if let Some(point) = series
            .points
            .iter()
            .find(|p| (p.ratio - target).abs() <= 1e-9 * target.max(1.0))
        {
            annotations.push_str(&format!(
                "beta(ratio={target}) = {:.6} (reference {reference})\n",
                point.beta
            ));
        }
    }
    if wrote_file {
        print!("{annotations}");
    } else {
        eprint!("{annotations}");
    }
    Ok(())
}

fn cmd_spectrum(args: &SpectrumArgs) -> Result<(), CliFailure> {
    let params = match &args.params {
        None => MolecularHamiltonianParams::malonic_acid(),
        Some(path) => {
            let text = read_file(path, "--params")?;
            MolecularHamiltonianParams::parse(&text)
                .map_err(|err| CliFailure::validation("--params", err))?
        }
    };
    if args.dwell.is_nan() || args.dwell <= 0.0 {
        return Err(CliFailure::validation("--dwell", "dwell must be positive"));
    }
    if args.samples < 2 {
        return Err(CliFailure::validation(
            "--samples",
            "need at least 2 samples",
        ));
    }
    if args.t2star.is_nan() || args.t2star <= 0.0 {
        return Err(CliFailure::validation(
            "--t2star",
            "t2star must be positive",
        ));
    }

    let n = params.n_spins();
    let h = build_hamiltonian(&params);
    let fid = simulate_fid(
        &transverse_start(n),
        &h,
        args.dwell,
        args.samples,
        args.t2star,
    )
    .map_err(|err| failure_from(err, "--dwell/--samples/--t2star"))?;
    let csv = spectrum_csv(&spectrum(&fid));
    let wrote_file = emit(args.out.as_ref(), "--out", &csv)?;

    let cfg = ClusterConfig {
        dwell_ms: args.dwell,
        n_samples: args.samples,
        ..ClusterConfig::default()
    };
    let centers = cluster_centers(&params, &cfg).map_err(|err| failure_from(err, "--params"))?;
    let mut lines = String::from("detected cluster centers (kHz):\n");
    for (label, center) in params.labels().iter().zip(&centers) {
        lines.push_str(&format!("  {label}: {center:.6}\n"));
    }
    if wrote_file {
        print!("{lines}");
    } else {
        eprint!("{lines}");
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), CliFailure> {
    match &cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Beta(args) => cmd_beta(args),
        Command::Nchv(args) => cmd_nchv(args),
        Command::Dqc1(args) => cmd_dqc1(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Spectrum(args) => cmd_spectrum(args),
    }
}

/// Parses arguments and runs one command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_grid_explicit_list() {
        assert_eq!(parse_ratio_grid("0.75").unwrap(), vec![0.75]);
        assert_eq!(parse_ratio_grid("0.05,0.75").unwrap(), vec![0.05, 0.75]);
        assert!(parse_ratio_grid("a,b").is_err());
    }

    #[test]
    fn ratio_grid_linear_and_log() {
        let lin = parse_ratio_grid("1:3:3").unwrap();
        assert_eq!(lin, vec![1.0, 2.0, 3.0]);
        let log = parse_ratio_grid("0.01:2:50log").unwrap();
        assert_eq!(log.len(), 50);
        assert!((log[0] - 0.01).abs() < 1e-12);
        assert!((log[49] - 2.0).abs() < 1e-12);
        let mid_ratio = log[1] / log[0];
        assert!(log
            .windows(2)
            .all(|w| (w[1] / w[0] - mid_ratio).abs() < 1e-9));
    }

    #[test]
    fn ratio_grid_rejects_malformed() {
        assert!(parse_ratio_grid("1:2").is_err());
        assert!(parse_ratio_grid("1:2:0").is_err());
        assert!(parse_ratio_grid("2:1:5").is_err());
        assert!(parse_ratio_grid("0:1:5log").is_err());
        assert!(parse_ratio_grid("1:2:xlog").is_err());
    }
}
