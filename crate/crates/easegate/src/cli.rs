//! Command-line front end.
//!
//! Four subcommands: `synth` solves and verifies pulses, `verify` re-checks
//! an existing pulse file, `counts` prints two-qubit resource comparisons,
//! and `modes` generates a trap description from a harmonic chain model.
//!
//! Exit codes: 0 success, 2 solver infeasibility, 3 invalid input, 4
//! verification failure.
//!
//! File outputs are byte-deterministic: reruns on identical inputs produce
//! identical bytes. serde_json prints floats in their shortest round-trip
//! form, JSON keys follow fixed struct or sorted map order, and wall-clock
//! timing goes to stderr only, never into a file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::counts::{
    counts_bv, counts_heisenberg, counts_hidden_shift, counts_qft, counts_vqe, CountResult,
    VqeVariant,
};
use crate::ease::solve_ease;
use crate::error::{Error, Result};
use crate::model::{load_spec, load_trap_config, PulseSolution, TrapConfig, VerificationReport};
use crate::modes::{generate_chain_modes, ChainParams};
use crate::tolerance::ToleranceSet;
use crate::verify::{verify_solution, QuadratureSettings};

#[derive(Parser)]
#[command(
    name = "easegate",
    version,
    about = "Segmented pulse synthesis for simultaneously entangling gates on ion chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve pulses for a coupling spec, verify them, write a pulse file
    Synth(SynthArgs),
    /// Re-check an existing pulse file by independent quadrature
    Verify(VerifyArgs),
    /// Print a two-qubit resource comparison for a circuit family
    Counts(CountsArgs),
    /// Generate a trap description from a harmonic chain model
    Modes(ModesArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Trap description file (JSON)
    #[arg(long)]
    trap: PathBuf,
    /// Coupling spec file (JSON)
    #[arg(long)]
    spec: PathBuf,
    /// Pulse document to write
    #[arg(long)]
    out: PathBuf,
    /// Verification report path (defaults to <out>.report.json on failure)
    #[arg(long)]
    report: Option<PathBuf>,
    /// Per-segment CSV export for plotting
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Null-space rank cutoff override (absolute singular value)
    #[arg(long)]
    tol_rank: Option<f64>,
    /// Verification tolerance override
    #[arg(long)]
    tol_verify: Option<f64>,
    /// Verification quadrature nodes per oscillation period
    #[arg(long)]
    nodes_per_period: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Trap description file (JSON)
    #[arg(long)]
    trap: PathBuf,
    /// Coupling spec file (JSON)
    #[arg(long)]
    spec: PathBuf,
    /// Pulse document to check
    #[arg(long)]
    pulses: PathBuf,
    /// Verification report to write
    #[arg(long)]
    report: PathBuf,
    /// Verification tolerance override
    #[arg(long)]
    tol_verify: Option<f64>,
    /// Verification quadrature nodes per oscillation period
    #[arg(long)]
    nodes_per_period: Option<usize>,
}

#[derive(Args)]
struct CountsArgs {
    /// qft | bv | hidden-shift | vqe-hf7 | vqe-hf21 | heisenberg
    #[arg(long)]
    algorithm: String,
    /// Qubit count for qft, bv, and hidden-shift
    #[arg(long)]
    qubits: Option<u64>,
    /// Stage count for heisenberg
    #[arg(long)]
    stages: Option<u64>,
}

#[derive(Args)]
struct ModesArgs {
    /// Chain length
    #[arg(long)]
    ions: usize,
    /// Transverse center-of-mass frequency in MHz
    #[arg(long, default_value_t = 3.0)]
    com_freq_mhz: f64,
    /// Center-of-mass Lamb-Dicke coupling per ion
    #[arg(long, default_value_t = 0.1)]
    base_eta: f64,
    /// Trap description file to write
    #[arg(long)]
    out: PathBuf,
}

/// Provenance block embedded in every output document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub trap_sha256: String,
    pub spec_sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulses_sha256: Option<String>,
    pub tolerances: ToleranceSet,
    pub quadrature: QuadratureSettings,
    pub engine_version: String,
    /// Always null in files so identical inputs give identical bytes; the
    /// measured time is printed to stderr instead.
    pub duration_ms: Option<u64>,
}

/// On-disk pulse format. Amplitudes are rad/us, one list per pulsed ion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PulseDocument {
    pub ions: BTreeMap<usize, Vec<f64>>,
    #[serde(default)]
    pub ordering: Vec<usize>,
    #[serde(default)]
    pub power: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Synth(a) => cmd_synth(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Counts(a) => cmd_counts(&a),
        Command::Modes(a) => cmd_modes(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::EmptyNullSpace { .. }
        | Error::SignUnreachable { .. }
        | Error::InfeasibleSubspace { .. }
        | Error::ZeroOverlap { .. }
        | Error::InconsistentConstraints { .. }
        | Error::Numerical(_) => 2,
        _ => 3,
    }
}

fn read_input(path: &Path) -> Result<(String, String)> {
    let bytes = fs::read(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for b in digest.iter() {
        write!(hex, "{b:02x}").expect("writing to a String cannot fail");
    }
    let text = String::from_utf8(bytes)
        .map_err(|_| Error::Schema(format!("{} is not valid UTF-8", path.display())))?;
    Ok((text, hex))
}

fn write_text(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    Ok(())
}

fn pretty_value(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON value serialization cannot fail");
    s.push('\n');
    s
}

fn pretty_doc<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("document serialization cannot fail");
    s.push('\n');
    s
}

fn tolerance_overrides(tol_rank: Option<f64>, tol_verify: Option<f64>) -> ToleranceSet {
    let mut tol = ToleranceSet::default();
    if let Some(r) = tol_rank {
        tol.rank_tol = Some(r);
    }
    if let Some(v) = tol_verify {
        tol.verify_tol = v;
    }
    tol
}

fn quadrature_settings(nodes_per_period: Option<usize>) -> Result<QuadratureSettings> {
    let settings = QuadratureSettings {
        nodes_per_period: nodes_per_period.unwrap_or(QuadratureSettings::default().nodes_per_period),
        ..QuadratureSettings::default()
    };
    settings.validate()?;
    Ok(settings)
}

fn default_report_path(out: &Path) -> PathBuf {
    PathBuf::from(format!("{}.report.json", out.display()))
}

fn report_json(report: &VerificationReport, manifest: &RunManifest) -> serde_json::Value {
    serde_json::json!({
        "alpha_residuals": report.alpha_residuals.iter().map(|r| serde_json::json!({
            "ion": r.ion,
            "mode": r.mode,
            "re": r.value.re,
            "im": r.value.im,
            "abs": r.value.norm(),
        })).collect::<Vec<_>>(),
        "chi": report.chi_matrix.iter().map(|e| serde_json::json!({
            "a": e.a,
            "b": e.b,
            "realized": e.realized,
            "target": e.target,
            "error": e.error,
        })).collect::<Vec<_>>(),
        "max_alpha_abs": report.max_alpha_abs,
        "max_chi_error": report.max_chi_error,
        "worst_alpha_ratio": report.worst_alpha_ratio,
        "alpha_pass": report.alpha_pass,
        "chi_pass": report.chi_pass,
        "pass": report.pass(),
        "verify_tol": report.verify_tol,
        "manifest": manifest,
    })
}

fn csv_export(config: &TrapConfig, solution: &PulseSolution) -> String {
    let bounds = config.segment_boundaries();
    let mut s = String::from("ion,segment,start_us,end_us,amplitude\n");
    for (&ion, pulse) in &solution.amplitudes {
        for (k, &amp) in pulse.iter().enumerate() {
            let _ = writeln!(s, "{ion},{k},{},{},{amp}", bounds[k], bounds[k + 1]);
        }
    }
    s
}

fn cmd_synth(args: &SynthArgs) -> Result<i32> {
    let tol = tolerance_overrides(args.tol_rank, args.tol_verify);
    let settings = quadrature_settings(args.nodes_per_period)?;
    let (trap_text, trap_digest) = read_input(&args.trap)?;
    let (spec_text, spec_digest) = read_input(&args.spec)?;
    let config = load_trap_config(&trap_text, &tol)?;
    let spec = load_spec(&spec_text, &config)?;

    let solve_start = Instant::now();
    let solution = solve_ease(&config, &spec, &tol)?;
    eprintln!(
        "solved {} pulses in {} ms (power {:.6})",
        solution.amplitudes.len(),
        solve_start.elapsed().as_millis(),
        solution.power
    );

    let verify_start = Instant::now();
    let report = verify_solution(&config, &spec, &solution, &settings, &tol)?;
    eprintln!(
        "verified in {} ms: max |alpha| {:.3e}, max chi error {:.3e}",
        verify_start.elapsed().as_millis(),
        report.max_alpha_abs,
        report.max_chi_error
    );

    let manifest = RunManifest {
        command: "synth".into(),
        trap_sha256: trap_digest,
        spec_sha256: spec_digest,
        pulses_sha256: None,
        tolerances: tol,
        quadrature: settings,
        engine_version: env!("CARGO_PKG_VERSION").into(),
        duration_ms: None,
    };

    if !report.pass() {
        let report_path = args
            .report
            .clone()
            .unwrap_or_else(|| default_report_path(&args.out));
        write_text(&report_path, &pretty_value(&report_json(&report, &manifest)))?;
        eprintln!(
            "verification failed; report written to {}",
            report_path.display()
        );
        return Ok(4);
    }

    let doc = PulseDocument {
        ions: solution.amplitudes.clone(),
        ordering: solution.ordering.clone(),
        power: solution.power,
        manifest: Some(manifest.clone()),
    };
    write_text(&args.out, &pretty_doc(&doc))?;
    if let Some(csv) = &args.csv {
        write_text(csv, &csv_export(&config, &solution))?;
    }
    if let Some(rp) = &args.report {
        write_text(rp, &pretty_value(&report_json(&report, &manifest)))?;
    }
    eprintln!("wrote {}", args.out.display());
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let tol = tolerance_overrides(None, args.tol_verify);
    let settings = quadrature_settings(args.nodes_per_period)?;
    let (trap_text, trap_digest) = read_input(&args.trap)?;
    let (spec_text, spec_digest) = read_input(&args.spec)?;
    let (pulse_text, pulse_digest) = read_input(&args.pulses)?;
    let config = load_trap_config(&trap_text, &tol)?;
    let spec = load_spec(&spec_text, &config)?;
    let doc: PulseDocument = serde_json::from_str(&pulse_text)
        .map_err(|e| Error::Schema(format!("pulse document: {e}")))?;
    let solution = PulseSolution {
        ordering: if doc.ordering.is_empty() {
            doc.ions.keys().copied().collect()
        } else {
            doc.ordering.clone()
        },
        amplitudes: doc.ions,
        components: Vec::new(),
        power: doc.power,
    };

    let start = Instant::now();
    let report = verify_solution(&config, &spec, &solution, &settings, &tol)?;
    eprintln!(
        "verified in {} ms: max |alpha| {:.3e}, max chi error {:.3e}",
        start.elapsed().as_millis(),
        report.max_alpha_abs,
        report.max_chi_error
    );

    let manifest = RunManifest {
        command: "verify".into(),
        trap_sha256: trap_digest,
        spec_sha256: spec_digest,
        pulses_sha256: Some(pulse_digest),
        tolerances: tol,
        quadrature: settings,
        engine_version: env!("CARGO_PKG_VERSION").into(),
        duration_ms: None,
    };
    write_text(&args.report, &pretty_value(&report_json(&report, &manifest)))?;
    if report.pass() {
        eprintln!("verification passed; report written to {}", args.report.display());
        Ok(0)
    } else {
        eprintln!(
            "verification failed; report written to {}",
            args.report.display()
        );
        Ok(4)
    }
}

fn counts_table(r: &CountResult) -> String {
    let qubits = r
        .qubits
        .map(|n| n.to_string())
        .unwrap_or_else(|| "-".into());
    let cnot = r
        .cnot
        .map(|c| c.to_string())
        .unwrap_or_else(|| "external".into());
    let mut s = String::new();
    let _ = writeln!(s, "{:<12} {:>6} {:>10} {:>6}", "algorithm", "qubits", "cnot", "ease");
    let _ = writeln!(s, "{:<12} {:>6} {:>10} {:>6}", r.algorithm, qubits, cnot, r.ease);
    let _ = writeln!(s, "{}, {}, {}, {}", r.algorithm, qubits, cnot, r.ease);
    let _ = writeln!(s, "notes: {}", r.notes);
    s
}

fn cmd_counts(args: &CountsArgs) -> Result<i32> {
    let need_qubits = || {
        args.qubits.ok_or_else(|| {
            Error::Domain(format!("--qubits is required for {}", args.algorithm))
        })
    };
    let result = match args.algorithm.as_str() {
        "qft" => counts_qft(need_qubits()?)?,
        "bv" => counts_bv(need_qubits()?)?,
        "hidden-shift" | "hs" => counts_hidden_shift(need_qubits()?)?,
        "vqe-hf7" => counts_vqe(VqeVariant::Hf7),
        "vqe-hf21" => counts_vqe(VqeVariant::Hf21),
        "heisenberg" => counts_heisenberg(
            args.stages
                .ok_or_else(|| Error::Domain("--stages is required for heisenberg".into()))?,
        )?,
        other => return Err(Error::Domain(format!("unknown algorithm '{other}'"))),
    };
    print!("{}", counts_table(&result));
    Ok(0)
}

fn cmd_modes(args: &ModesArgs) -> Result<i32> {
    let params = ChainParams::new(args.ions, args.com_freq_mhz, args.base_eta);
    let modes = generate_chain_modes(&params)?;
    let n_segments = 2 * args.ions + 5;
    let file = modes.to_trap_file(modes.default_detuning_mhz(), 300.0, n_segments);
    write_text(&args.out, &pretty_doc(&file))?;
    eprintln!(
        "wrote {} ({} modes, detuning {} MHz, {} segments)",
        args.out.display(),
        args.ions,
        file.detuning_mhz,
        n_segments
    );
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infeasibility_maps_to_exit_2_and_bad_input_to_3() {
        assert_eq!(
            exit_code_for(&Error::EmptyNullSpace {
                n_segments: 4,
                rank: 4
            }),
            2
        );
        assert_eq!(
            exit_code_for(&Error::ZeroOverlap {
                position: 1,
                recommended_segments: 12
            }),
            2
        );
        assert_eq!(exit_code_for(&Error::Schema("bad".into())), 3);
        assert_eq!(exit_code_for(&Error::Domain("bad".into())), 3);
        assert_eq!(
            exit_code_for(&Error::Coverage { ion: 3 }),
            3
        );
    }

    #[test]
    fn counts_rows_are_comma_separated() {
        let table = counts_table(&counts_qft(10).unwrap());
        assert!(table.contains("90, 9"), "{table}");
        let table = counts_table(&counts_vqe(VqeVariant::Hf21));
        assert!(table.contains("185, 81"), "{table}");
        let table = counts_table(&counts_heisenberg(2).unwrap());
        assert!(table.contains("external, 42"), "{table}");
    }

    #[test]
    fn report_path_defaults_next_to_the_pulse_file() {
        assert_eq!(
            default_report_path(Path::new("out/pulses.json")),
            PathBuf::from("out/pulses.json.report.json")
        );
    }

    #[test]
    fn pulse_documents_round_trip_without_a_manifest() {
        let text = r#"{"ions": {"0": [0.1, -0.2], "3": [0.0, 0.4]}}"#;
        let doc: PulseDocument = serde_json::from_str(text).unwrap();
        assert_eq!(doc.ions[&3], vec![0.0, 0.4]);
        assert!(doc.ordering.is_empty());
        assert!(doc.manifest.is_none());
        let back = pretty_doc(&doc);
        assert!(!back.contains("manifest"));
    }
}
