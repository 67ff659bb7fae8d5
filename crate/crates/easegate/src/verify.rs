//! Independent numerical check of a synthesized pulse set.
//!
//! Nothing here reuses the synthesis-side closed forms. Both gate conditions
//! are re-evaluated by direct quadrature of the defining time integrals:
//!
//! * loop closure: for every ion m and mode p the complex displacement
//!   alpha = -eta_p^m * int_0^tau Omega_m(t) cos(mu t) e^{i omega_p t} dt
//!   must vanish.
//! * realized coupling: for every ion pair the ordered double integral
//!   -sum_p 4 eta_p^a eta_p^b int_0^tau dt2 int_0^t2 dt1
//!   Omega_a(t2) Omega_b(t1) sin(omega_p (t2 - t1)) cos(mu t1) cos(mu t2),
//!   symmetrized over the two pulse roles, must land on the target angle
//!   (zero for pairs that must stay decoupled).
//!
//! The double integral is flattened to a single pass: expanding the sine
//! difference splits the inner integral into cosine and sine moments of the
//! inner pulse, which are cumulative in t2. Those cumulants are tabulated
//! once per mode at the outer quadrature nodes, restarting from zero at
//! every segment boundary so the running sums never grow long enough for
//! roundoff drift to matter; per-pulse prefix sums over whole segments
//! stitch the pieces back together in O(1) per node.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    AlphaResidual, ChiEntry, EntanglementSpec, PulseSolution, TrapConfig, VerificationReport,
};
use crate::quad::GaussLegendre;
use crate::tolerance::ToleranceSet;

pub type Complex64 = Complex<f64>;

const TAU: f64 = std::f64::consts::TAU;

/// Resolution of the verification quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    /// Outer nodes per period of the fastest oscillation present.
    pub nodes_per_period: usize,
    /// Gauss-Legendre order of each outer panel.
    pub order: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            nodes_per_period: 50,
            order: 16,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_period < 10 {
            return Err(Error::Validation(
                "nodes_per_period below 10 cannot resolve the drive oscillation".into(),
            ));
        }
        if self.order < 4 {
            return Err(Error::Validation(
                "quadrature order must be at least 4".into(),
            ));
        }
        Ok(())
    }
}

/// Pulse- and mode-independent node geometry for one trap configuration.
struct NodeGrid {
    t: Vec<f64>,
    w: Vec<f64>,
    seg_of: Vec<usize>,
    cos_mu: Vec<f64>,
    boundaries: Vec<f64>,
}

impl NodeGrid {
    fn build(config: &TrapConfig, settings: &QuadratureSettings) -> NodeGrid {
        let omega_fast = config
            .mode_freqs
            .iter()
            .fold(config.detuning.abs(), |a, &w| a.max(w.abs()));
        let t_min = TAU / omega_fast;
        let boundaries = config.segment_boundaries();
        let seg_len = config.gate_time / config.n_segments as f64;
        let panels = ((settings.nodes_per_period as f64 * seg_len / t_min)
            / settings.order as f64)
            .ceil()
            .max(1.0) as usize;

        let rule = GaussLegendre::new(settings.order);
        let mut t = Vec::new();
        let mut w = Vec::new();
        let mut seg_of = Vec::new();
        for k in 0..config.n_segments {
            let (t0, t1) = (boundaries[k], boundaries[k + 1]);
            let h = (t1 - t0) / panels as f64;
            for p in 0..panels {
                for (x, wx) in rule.mapped(t0 + p as f64 * h, t0 + (p + 1) as f64 * h) {
                    t.push(x);
                    w.push(wx);
                    seg_of.push(k);
                }
            }
        }
        let cos_mu = t.iter().map(|&x| (config.detuning * x).cos()).collect();
        NodeGrid {
            t,
            w,
            seg_of,
            cos_mu,
            boundaries,
        }
    }
}

/// One mode's oscillation samples and inner-integral cumulants on a grid.
struct ModeTable {
    cos_w: Vec<f64>,
    sin_w: Vec<f64>,
    /// Segment-local cumulative integrals of cos(mu t) cos(omega t) and
    /// cos(mu t) sin(omega t), from the segment start to each node.
    cum_c: Vec<f64>,
    cum_s: Vec<f64>,
    /// Whole-segment values of the same two integrals.
    delta_c: Vec<f64>,
    delta_s: Vec<f64>,
}

impl ModeTable {
    fn build(grid: &NodeGrid, mu: f64, omega: f64, gap_rule: &GaussLegendre) -> ModeTable {
        let n = grid.t.len();
        let n_seg = grid.boundaries.len() - 1;
        let mut cos_w = Vec::with_capacity(n);
        let mut sin_w = Vec::with_capacity(n);
        for &x in &grid.t {
            let (s, c) = (omega * x).sin_cos();
            cos_w.push(c);
            sin_w.push(s);
        }

        let gap = |a: f64, b: f64| {
            let mut ic = 0.0;
            let mut is = 0.0;
            for (x, wx) in gap_rule.mapped(a, b) {
                let cm = (mu * x).cos();
                let (s, c) = (omega * x).sin_cos();
                ic += wx * cm * c;
                is += wx * cm * s;
            }
            (ic, is)
        };

        let mut cum_c = vec![0.0; n];
        let mut cum_s = vec![0.0; n];
        let mut delta_c = vec![0.0; n_seg];
        let mut delta_s = vec![0.0; n_seg];
        let mut j = 0;
        for k in 0..n_seg {
            let mut prev = grid.boundaries[k];
            let mut run_c = 0.0;
            let mut run_s = 0.0;
            while j < n && grid.seg_of[j] == k {
                let (ic, is) = gap(prev, grid.t[j]);
                run_c += ic;
                run_s += is;
                cum_c[j] = run_c;
                cum_s[j] = run_s;
                prev = grid.t[j];
                j += 1;
            }
            let (ic, is) = gap(prev, grid.boundaries[k + 1]);
            delta_c[k] = run_c + ic;
            delta_s[k] = run_s + is;
        }
        ModeTable {
            cos_w,
            sin_w,
            cum_c,
            cum_s,
            delta_c,
            delta_s,
        }
    }

    /// Ordered double integral with `outer` on t2 and `inner` on t1, without
    /// the mode weight.
    fn wedge(&self, grid: &NodeGrid, outer: &[f64], inner: &[f64]) -> f64 {
        let n_seg = self.delta_c.len();
        let mut prefix_c = vec![0.0; n_seg];
        let mut prefix_s = vec![0.0; n_seg];
        let mut acc_c = 0.0;
        let mut acc_s = 0.0;
        for k in 0..n_seg {
            prefix_c[k] = acc_c;
            prefix_s[k] = acc_s;
            acc_c += inner[k] * self.delta_c[k];
            acc_s += inner[k] * self.delta_s[k];
        }
        let mut total = 0.0;
        for j in 0..grid.t.len() {
            let k = grid.seg_of[j];
            let u = prefix_c[k] + inner[k] * self.cum_c[j];
            let v = prefix_s[k] + inner[k] * self.cum_s[j];
            total += grid.w[j] * outer[k] * grid.cos_mu[j] * (self.sin_w[j] * u - self.cos_w[j] * v);
        }
        total
    }

    /// Cosine and sine first moments of one pulse over the whole gate.
    fn first_moments(&self, omega_seg: &[f64]) -> (f64, f64) {
        let mut x = 0.0;
        let mut y = 0.0;
        for (k, &amp) in omega_seg.iter().enumerate() {
            x += amp * self.delta_c[k];
            y += amp * self.delta_s[k];
        }
        (x, y)
    }
}

fn check_pulse_len(config: &TrapConfig, omega: &[f64]) -> Result<()> {
    if omega.len() != config.n_segments {
        return Err(Error::DimensionMismatch {
            expected: format!("{} segment amplitudes", config.n_segments),
            got: format!("{}", omega.len()),
        });
    }
    Ok(())
}

fn check_ion(config: &TrapConfig, ion: usize) -> Result<()> {
    if ion >= config.n_ions {
        return Err(Error::Validation(format!(
            "ion {ion} is out of range for a {}-ion chain",
            config.n_ions
        )));
    }
    Ok(())
}

/// Residual phase-space displacement of one ion, one entry per mode.
pub fn alpha_residual(
    config: &TrapConfig,
    omega: &[f64],
    ion: usize,
    settings: &QuadratureSettings,
) -> Result<Vec<Complex64>> {
    settings.validate()?;
    check_pulse_len(config, omega)?;
    check_ion(config, ion)?;
    let grid = NodeGrid::build(config, settings);
    let gap_rule = GaussLegendre::new(8);
    let mut out = Vec::with_capacity(config.n_ions);
    for p in 0..config.mode_freqs.len() {
        let table = ModeTable::build(&grid, config.detuning, config.mode_freqs[p], &gap_rule);
        let (x, y) = table.first_moments(omega);
        let eta = config.lamb_dicke[(p, ion)];
        out.push(Complex64::new(-eta * x, -eta * y));
    }
    Ok(out)
}

/// Realized coupling between two pulsed ions, symmetrized over pulse roles.
pub fn chi_value(
    config: &TrapConfig,
    omega_a: &[f64],
    omega_b: &[f64],
    ion_a: usize,
    ion_b: usize,
    settings: &QuadratureSettings,
) -> Result<f64> {
    settings.validate()?;
    check_pulse_len(config, omega_a)?;
    check_pulse_len(config, omega_b)?;
    check_ion(config, ion_a)?;
    check_ion(config, ion_b)?;
    if ion_a == ion_b {
        return Err(Error::Validation("coupling needs two distinct ions".into()));
    }
    let grid = NodeGrid::build(config, settings);
    let gap_rule = GaussLegendre::new(8);
    let mut total = 0.0;
    for p in 0..config.mode_freqs.len() {
        let weight = -4.0 * config.lamb_dicke[(p, ion_a)] * config.lamb_dicke[(p, ion_b)];
        if weight == 0.0 {
            continue;
        }
        let table = ModeTable::build(&grid, config.detuning, config.mode_freqs[p], &gap_rule);
        let forward = table.wedge(&grid, omega_a, omega_b);
        let reverse = table.wedge(&grid, omega_b, omega_a);
        total += weight * 0.5 * (forward + reverse);
    }
    Ok(total)
}

/// Checks a full pulse set against its spec by quadrature.
///
/// Every participating ion must carry a pulse of the right length. The
/// report covers all unordered pairs of pulsed ions, so unintended coupling
/// between separately solved groups is caught too.
pub fn verify_solution(
    config: &TrapConfig,
    spec: &EntanglementSpec,
    solution: &PulseSolution,
    settings: &QuadratureSettings,
    tol: &ToleranceSet,
) -> Result<VerificationReport> {
    settings.validate()?;
    for &ion in spec.participants().iter() {
        if !solution.amplitudes.contains_key(&ion) {
            return Err(Error::Coverage { ion });
        }
    }
    for (&ion, pulse) in &solution.amplitudes {
        check_ion(config, ion)?;
        check_pulse_len(config, pulse)?;
    }

    let ions: Vec<usize> = solution.amplitudes.keys().copied().collect();
    let pulses: Vec<&[f64]> = ions
        .iter()
        .map(|i| solution.amplitudes[i].as_slice())
        .collect();
    let n_pairs = ions.len() * (ions.len() - 1) / 2;
    let grid = NodeGrid::build(config, settings);
    let gap_rule = GaussLegendre::new(8);

    let mut alpha_residuals: Vec<AlphaResidual> = Vec::new();
    let mut pair_chi = vec![0.0; n_pairs];
    for p in 0..config.mode_freqs.len() {
        let table = ModeTable::build(&grid, config.detuning, config.mode_freqs[p], &gap_rule);
        for (idx, &ion) in ions.iter().enumerate() {
            let (x, y) = table.first_moments(pulses[idx]);
            let eta = config.lamb_dicke[(p, ion)];
            alpha_residuals.push(AlphaResidual {
                ion,
                mode: p,
                value: Complex64::new(-eta * x, -eta * y),
            });
        }
        let mut pair = 0;
        for ai in 0..ions.len() {
            for bi in ai + 1..ions.len() {
                let weight =
                    -4.0 * config.lamb_dicke[(p, ions[ai])] * config.lamb_dicke[(p, ions[bi])];
                if weight != 0.0 {
                    let forward = table.wedge(&grid, pulses[ai], pulses[bi]);
                    let reverse = table.wedge(&grid, pulses[bi], pulses[ai]);
                    pair_chi[pair] += weight * 0.5 * (forward + reverse);
                }
                pair += 1;
            }
        }
    }
    alpha_residuals.sort_by_key(|r| (r.ion, r.mode));

    // Displacement scale: one segment of unit drive at the largest coupling.
    let seg_len = config.gate_time / config.n_segments as f64;
    let eta_max = config.max_eta_abs();
    let threshold = |ion: usize| -> f64 {
        let l1: f64 = solution.amplitudes[&ion].iter().map(|a| a.abs()).sum();
        tol.verify_tol * eta_max * l1 * seg_len
    };
    let mut max_alpha_abs = 0.0f64;
    let mut worst_alpha_ratio = 0.0f64;
    let mut alpha_pass = true;
    for r in &alpha_residuals {
        let mag = r.value.norm();
        let thr = threshold(r.ion);
        max_alpha_abs = max_alpha_abs.max(mag);
        if mag > thr {
            alpha_pass = false;
        }
        let ratio = if thr > 0.0 {
            mag / thr
        } else if mag > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        worst_alpha_ratio = worst_alpha_ratio.max(ratio);
    }

    let theta_max = spec
        .pairs
        .iter()
        .fold(0.0f64, |a, p| a.max(p.theta.abs()));
    let chi_tol = tol.verify_tol * theta_max.max(1.0);
    let mut chi_matrix = Vec::with_capacity(n_pairs);
    let mut max_chi_error = 0.0f64;
    let mut chi_pass = true;
    let mut pair = 0;
    for ai in 0..ions.len() {
        for bi in ai + 1..ions.len() {
            let realized = pair_chi[pair];
            let target = spec.target(ions[ai], ions[bi]);
            let error = (realized - target).abs();
            max_chi_error = max_chi_error.max(error);
            if error > chi_tol {
                chi_pass = false;
            }
            chi_matrix.push(ChiEntry {
                a: ions[ai],
                b: ions[bi],
                realized,
                target,
                error,
            });
            pair += 1;
        }
    }

    Ok(VerificationReport {
        alpha_residuals,
        chi_matrix,
        max_alpha_abs,
        max_chi_error,
        worst_alpha_ratio,
        alpha_pass,
        chi_pass,
        verify_tol: tol.verify_tol,
    })
}
