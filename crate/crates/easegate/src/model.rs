//! Trap description, coupling targets, and solver output types.
//!
//! File documents carry ordinary frequencies in MHz and times in microseconds.
//! Everything downstream of loading works in angular frequency (rad/us), so a
//! mode listed at `f` MHz enters the engine as `2*pi*f` rad/us. The original
//! file values are kept alongside the converted ones so that a loaded
//! configuration serializes back to the exact bytes it came from.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::ToleranceSet;

/// On-disk trap schema. All keys are required; unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapConfigFile {
    pub n_ions: usize,
    pub mode_freqs_mhz: Vec<f64>,
    /// Row p holds the per-ion coupling of mode p.
    pub lamb_dicke: Vec<Vec<f64>>,
    pub detuning_mhz: f64,
    pub gate_time_us: f64,
    pub n_segments: usize,
}

/// Validated trap configuration in engine units.
///
/// Modes are stored sorted ascending by frequency, with Lamb-Dicke rows
/// permuted to match. Ion indices are 0-based columns of `lamb_dicke`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapConfig {
    pub n_ions: usize,
    /// Mode frequencies in rad/us, strictly increasing.
    pub mode_freqs: Vec<f64>,
    /// `lamb_dicke[(p, m)]` couples mode p to ion m. Dimensionless.
    pub lamb_dicke: DMatrix<f64>,
    /// Drive detuning in rad/us.
    pub detuning: f64,
    /// Total gate time in us.
    pub gate_time: f64,
    pub n_segments: usize,
    /// File-unit copies, kept so serialization round-trips bit-exactly.
    mode_freqs_mhz: Vec<f64>,
    detuning_mhz: f64,
}

impl TrapConfig {
    /// Builds and validates a configuration from file-unit values.
    pub fn new(file: TrapConfigFile, tol: &ToleranceSet) -> Result<Self> {
        let cfg = Self::from_file_unchecked(file);
        cfg.validate(tol)?;
        Ok(cfg)
    }

    /// Builds without validation. Test harnesses use this to probe the
    /// integral kernels at frequencies the guards would reject.
    pub fn new_unchecked(file: TrapConfigFile) -> Self {
        Self::from_file_unchecked(file)
    }

    fn from_file_unchecked(file: TrapConfigFile) -> Self {
        let n = file.n_ions;
        // Sort modes ascending by file frequency, carrying their rows along.
        let mut order: Vec<usize> = (0..file.mode_freqs_mhz.len()).collect();
        order.sort_by(|&i, &j| {
            file.mode_freqs_mhz[i]
                .partial_cmp(&file.mode_freqs_mhz[j])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mode_freqs_mhz: Vec<f64> = order.iter().map(|&i| file.mode_freqs_mhz[i]).collect();
        let rows: Vec<Vec<f64>> = order
            .iter()
            .map(|&i| file.lamb_dicke.get(i).cloned().unwrap_or_default())
            .collect();
        let cols = rows.iter().map(Vec::len).max().unwrap_or(0).max(n);
        let mut eta = DMatrix::zeros(rows.len(), cols);
        for (p, row) in rows.iter().enumerate() {
            for (m, &v) in row.iter().enumerate() {
                eta[(p, m)] = v;
            }
        }
        TrapConfig {
            n_ions: n,
            mode_freqs: mode_freqs_mhz.iter().map(|f| TAU * f).collect(),
            lamb_dicke: eta,
            detuning: TAU * file.detuning_mhz,
            gate_time: file.gate_time_us,
            n_segments: file.n_segments,
            mode_freqs_mhz,
            detuning_mhz: file.detuning_mhz,
        }
    }

    fn validate(&self, tol: &ToleranceSet) -> Result<()> {
        if self.n_ions == 0 {
            return Err(Error::Validation("n_ions must be at least 1".into()));
        }
        if self.mode_freqs.len() != self.n_ions {
            return Err(Error::Validation(format!(
                "expected {} mode frequencies, got {}",
                self.n_ions,
                self.mode_freqs.len()
            )));
        }
        if self.lamb_dicke.nrows() != self.n_ions || self.lamb_dicke.ncols() != self.n_ions {
            return Err(Error::Validation(format!(
                "lamb_dicke must be {n}x{n}, got {r}x{c}",
                n = self.n_ions,
                r = self.lamb_dicke.nrows(),
                c = self.lamb_dicke.ncols()
            )));
        }
        for &f in &self.mode_freqs_mhz {
            if !f.is_finite() || f <= 0.0 {
                return Err(Error::Validation(format!(
                    "mode frequencies must be positive and finite, got {f} MHz"
                )));
            }
        }
        for w in self.mode_freqs.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Validation(format!(
                    "mode frequencies must be pairwise distinct, found {} and {} rad/us",
                    w[0], w[1]
                )));
            }
        }
        if !self.detuning.is_finite() || self.detuning <= 0.0 {
            return Err(Error::Validation(format!(
                "detuning must be positive and finite, got {} MHz",
                self.detuning_mhz
            )));
        }
        for v in self.lamb_dicke.iter() {
            if !v.is_finite() {
                return Err(Error::Validation("lamb_dicke entries must be finite".into()));
            }
        }
        if !self.gate_time.is_finite() || self.gate_time <= 0.0 {
            return Err(Error::Validation(format!(
                "gate_time_us must be positive and finite, got {}",
                self.gate_time
            )));
        }
        if self.n_segments == 0 {
            return Err(Error::Validation("n_segments must be at least 1".into()));
        }
        // Closed-form segment integrals carry 1/(omega - mu) and 1/(omega + mu).
        for &w in &self.mode_freqs {
            for d in [w - self.detuning, w + self.detuning] {
                if d.abs() <= tol.eps_res {
                    return Err(Error::Resonance {
                        mode_freq: w,
                        detuning: self.detuning,
                        guard: tol.eps_res,
                    });
                }
            }
        }
        Ok(())
    }

    /// Segment boundaries `k * gate_time / n_segments` for k = 0..=n_segments.
    pub fn segment_boundaries(&self) -> Vec<f64> {
        (0..=self.n_segments)
            .map(|k| k as f64 * self.gate_time / self.n_segments as f64)
            .collect()
    }

    /// Largest Lamb-Dicke magnitude, used to scale residual thresholds.
    pub fn max_eta_abs(&self) -> f64 {
        self.lamb_dicke.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
    }

    /// File-unit view of this configuration.
    pub fn to_file(&self) -> TrapConfigFile {
        TrapConfigFile {
            n_ions: self.n_ions,
            mode_freqs_mhz: self.mode_freqs_mhz.clone(),
            lamb_dicke: (0..self.lamb_dicke.nrows())
                .map(|p| self.lamb_dicke.row(p).iter().copied().collect())
                .collect(),
            detuning_mhz: self.detuning_mhz,
            gate_time_us: self.gate_time,
            n_segments: self.n_segments,
        }
    }

    pub fn to_json_string(&self) -> String {
        // Serialization of a validated in-memory struct cannot fail.
        serde_json::to_string_pretty(&self.to_file()).expect("trap schema serializes")
    }
}

/// Parses and validates a trap document.
pub fn load_trap_config(json: &str, tol: &ToleranceSet) -> Result<TrapConfig> {
    let file: TrapConfigFile =
        serde_json::from_str(json).map_err(|e| Error::Schema(e.to_string()))?;
    TrapConfig::new(file, tol)
}

/// Reads a trap document from disk.
pub fn load_trap_config_path(path: &Path, tol: &ToleranceSet) -> Result<TrapConfig> {
    let text = std::fs::read_to_string(path)?;
    load_trap_config(&text, tol)
}

/// One requested coupling: ions `a` and `b` entangled by angle `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingTarget {
    pub a: usize,
    pub b: usize,
    pub theta: f64,
}

/// On-disk coupling spec.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub pairs: Vec<CouplingTarget>,
}

/// Validated set of coupling targets against a specific trap size.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementSpec {
    pub pairs: Vec<CouplingTarget>,
}

impl EntanglementSpec {
    /// Ions that appear in at least one pair, ascending.
    pub fn participants(&self) -> BTreeSet<usize> {
        let mut s = BTreeSet::new();
        for p in &self.pairs {
            s.insert(p.a);
            s.insert(p.b);
        }
        s
    }

    /// Requested angle for an unordered pair, or 0 when the pair must stay
    /// decoupled.
    pub fn target(&self, a: usize, b: usize) -> f64 {
        for p in &self.pairs {
            if (p.a == a && p.b == b) || (p.a == b && p.b == a) {
                return p.theta;
            }
        }
        0.0
    }
}

/// Validates coupling targets against the trap.
pub fn validate_spec(pairs: Vec<CouplingTarget>, config: &TrapConfig) -> Result<EntanglementSpec> {
    if pairs.is_empty() {
        return Err(Error::Validation("spec contains no pairs".into()));
    }
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    for p in &pairs {
        if p.a == p.b {
            return Err(Error::Validation(format!(
                "pair ({}, {}) couples an ion to itself",
                p.a, p.b
            )));
        }
        if p.a >= config.n_ions || p.b >= config.n_ions {
            return Err(Error::Validation(format!(
                "pair ({}, {}) is out of range for {} ions",
                p.a, p.b, config.n_ions
            )));
        }
        if !p.theta.is_finite() || p.theta == 0.0 {
            return Err(Error::Validation(format!(
                "pair ({}, {}) has invalid angle {}",
                p.a, p.b, p.theta
            )));
        }
        let key = (p.a.min(p.b), p.a.max(p.b));
        if !seen.insert(key) {
            return Err(Error::Validation(format!(
                "pair ({}, {}) listed more than once",
                key.0, key.1
            )));
        }
    }
    Ok(EntanglementSpec { pairs })
}

/// Parses and validates a coupling spec document.
pub fn load_spec(json: &str, config: &TrapConfig) -> Result<EntanglementSpec> {
    let file: SpecFile = serde_json::from_str(json).map_err(|e| Error::Schema(e.to_string()))?;
    validate_spec(file.pairs, config)
}

pub fn load_spec_path(path: &Path, config: &TrapConfig) -> Result<EntanglementSpec> {
    let text = std::fs::read_to_string(path)?;
    load_spec(&text, config)
}

/// Solved pulse set: per-ion segment amplitudes in rad/us.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSolution {
    /// Ion index -> per-segment amplitude, length `n_segments`.
    pub amplitudes: BTreeMap<usize, Vec<f64>>,
    /// Participating qubits in solve order.
    pub ordering: Vec<usize>,
    /// Connected coupling groups, in solve order.
    pub components: Vec<Vec<usize>>,
    /// Sum of squared amplitudes over all ions and segments.
    pub power: f64,
}

impl PulseSolution {
    pub fn recompute_power(&self) -> f64 {
        self.amplitudes
            .values()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>())
            .sum()
    }
}

/// Residual displacement and realized-coupling report for one pulse set.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    /// Phase-space residual per (ion, mode); zero for a perfectly closed loop.
    pub alpha_residuals: Vec<AlphaResidual>,
    /// Realized coupling per unordered participating pair.
    pub chi_matrix: Vec<ChiEntry>,
    pub max_alpha_abs: f64,
    pub max_chi_error: f64,
    /// Largest |alpha| over each ion's rows, divided by that ion's threshold.
    /// At most 1.0 when the displacement test passes.
    pub worst_alpha_ratio: f64,
    pub alpha_pass: bool,
    pub chi_pass: bool,
    pub verify_tol: f64,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.alpha_pass && self.chi_pass
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AlphaResidual {
    pub ion: usize,
    pub mode: usize,
    pub value: Complex64,
}

#[derive(Debug, Clone, Copy)]
pub struct ChiEntry {
    pub a: usize,
    pub b: usize,
    pub realized: f64,
    pub target: f64,
    pub error: f64,
}
