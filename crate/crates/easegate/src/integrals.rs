//! Closed-form segment integrals for the decoupling and coupling matrices.
//!
//! A pulse is piecewise constant on `n_segments` equal slices of the gate
//! time, so every integral the solver needs reduces to per-segment moments of
//! products of cosines and sines. With a = omega - mu and b = omega + mu,
//!
//! ```text
//! cos(mu t) cos(omega t) = (cos(a t) + cos(b t)) / 2
//! cos(mu t) sin(omega t) = (sin(a t) + sin(b t)) / 2
//! ```
//!
//! which integrate termwise. The difference-of-sines and difference-of-cosines
//! primitives are evaluated in product form with a sinc kernel, so they stay
//! accurate when a frequency argument is small.
//!
//! The decoupling matrix stacks, per mode p, a cosine row and a sine row:
//! entry (p, k) is the k-th segment integral of cos(mu t) cos(omega_p t), and
//! entry (p + N, k) the one with sine. A pulse in its null space closes every
//! phase-space trajectory exactly.
//!
//! The pair coupling between ions m and n accumulates the ordered double
//! integral of
//!
//! ```text
//! -sum_p 4 eta_p^m eta_p^n sin(omega_p (t2 - t1)) cos(mu t1) cos(mu t2)
//! ```
//!
//! over t1 <= t2, cell by cell: cell (k, l) restricts t2 to segment k and t1
//! to segment l. Cells above the diagonal are empty by time ordering. For
//! l < k the two time integrals factorize through the same per-segment
//! moments as the decoupling rows; the diagonal cells integrate the wedge in
//! closed form. Only a drive frequency below the resonance guard (where a
//! 1/(2 mu) term degenerates) re-routes a diagonal cell to nested quadrature.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::TrapConfig;
use crate::quad::GaussLegendre;
use crate::tolerance::ToleranceSet;

/// Stacked cosine/sine segment moments, one row pair per mode.
#[derive(Debug, Clone)]
pub struct DecouplingMatrix {
    /// 2N x n_segments; row p is the cosine row of mode p, row p + N its
    /// sine row.
    pub m: DMatrix<f64>,
    pub n_modes: usize,
}

/// Ordered-time coupling cells for one ion pair.
#[derive(Debug, Clone)]
pub struct PairCoupling {
    /// Lower-triangular cell matrix of the ordered double integral.
    pub d: DMatrix<f64>,
    /// Symmetrized form (d + d^T) / 2; the realized coupling of pulses
    /// (w_m, w_n) is w_m^T s w_n.
    pub s: DMatrix<f64>,
}

/// sin(x)/x with the series branch for small arguments.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-5 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Integral of cos(x t) over [t0, t1], stable in x near zero.
fn int_cos(x: f64, t0: f64, t1: f64) -> f64 {
    let half = 0.5 * (t1 - t0);
    let mid = 0.5 * (t1 + t0);
    2.0 * half * (x * mid).cos() * sinc(x * half)
}

/// Integral of sin(x t) over [t0, t1], stable in x near zero.
fn int_sin(x: f64, t0: f64, t1: f64) -> f64 {
    let half = 0.5 * (t1 - t0);
    let mid = 0.5 * (t1 + t0);
    2.0 * half * (x * mid).sin() * sinc(x * half)
}

/// Segment integral of cos(mu t) cos(omega t).
fn seg_cos(omega: f64, mu: f64, t0: f64, t1: f64) -> f64 {
    0.5 * (int_cos(omega - mu, t0, t1) + int_cos(omega + mu, t0, t1))
}

/// Segment integral of cos(mu t) sin(omega t).
fn seg_sin(omega: f64, mu: f64, t0: f64, t1: f64) -> f64 {
    0.5 * (int_sin(omega - mu, t0, t1) + int_sin(omega + mu, t0, t1))
}

fn resonance_guard(config: &TrapConfig, tol: &ToleranceSet) -> Result<()> {
    for &w in &config.mode_freqs {
        for d in [w - config.detuning, w + config.detuning] {
            if d.abs() <= tol.eps_res {
                return Err(Error::Resonance {
                    mode_freq: w,
                    detuning: config.detuning,
                    guard: tol.eps_res,
                });
            }
        }
    }
    Ok(())
}

/// Builds the 2N x n_segments decoupling matrix.
pub fn build_m_matrix(config: &TrapConfig, tol: &ToleranceSet) -> Result<DecouplingMatrix> {
    resonance_guard(config, tol)?;
    let n = config.mode_freqs.len();
    let bounds = config.segment_boundaries();
    let nseg = config.n_segments;
    let mut m = DMatrix::zeros(2 * n, nseg);
    for (p, &w) in config.mode_freqs.iter().enumerate() {
        for k in 0..nseg {
            let (t0, t1) = (bounds[k], bounds[k + 1]);
            m[(p, k)] = seg_cos(w, config.detuning, t0, t1);
            m[(p + n, k)] = seg_sin(w, config.detuning, t0, t1);
        }
    }
    Ok(DecouplingMatrix { m, n_modes: n })
}

/// Closed-form wedge integral of sin(omega (t2 - t1)) cos(mu t1) cos(mu t2)
/// over t0 <= t1 <= t2 <= t1e within one segment [t0, t1e].
fn diagonal_cell(omega: f64, mu: f64, t0: f64, t1e: f64) -> f64 {
    let fr = [omega - mu, omega + mu];
    let mut acc = 0.0;
    for &y in &fr {
        for &x in &fr {
            let cross = int_cos(y - x, t0, t1e);
            let boundary = ((y * t1e - x * t0).sin() - ((y - x) * t0).sin()) / y;
            acc += (cross - boundary) / x;
        }
    }
    0.25 * acc
}

/// Quadrature fallback for a diagonal cell when the closed form degenerates.
fn diagonal_cell_quadrature(omega: f64, mu: f64, t0: f64, t1e: f64) -> f64 {
    let gl = GaussLegendre::new(12);
    let len = t1e - t0;
    let max_freq = omega.abs().max(mu.abs()).max(1e-12);
    let periods = len * max_freq / std::f64::consts::TAU;
    let panels = (3.0 * periods).ceil() as usize + 2;
    gl.integrate_panels(t0, t1e, panels, |t2| {
        let outer = (mu * t2).cos();
        let inner = gl.integrate_panels(t0, t2, panels, |t1| {
            (omega * (t2 - t1)).sin() * (mu * t1).cos()
        });
        outer * inner
    })
}

/// Builds the ordered-time coupling cells for ions `ion_a` and `ion_b`.
pub fn build_pair_coupling(
    config: &TrapConfig,
    ion_a: usize,
    ion_b: usize,
    tol: &ToleranceSet,
) -> Result<PairCoupling> {
    resonance_guard(config, tol)?;
    if ion_a >= config.n_ions || ion_b >= config.n_ions {
        return Err(Error::DimensionMismatch {
            expected: format!("ion indices below {}", config.n_ions),
            got: format!("pair ({ion_a}, {ion_b})"),
        });
    }
    let nseg = config.n_segments;
    let bounds = config.segment_boundaries();
    let mu = config.detuning;
    let mut d = DMatrix::zeros(nseg, nseg);

    for (p, &w) in config.mode_freqs.iter().enumerate() {
        let weight = -4.0 * config.lamb_dicke[(p, ion_a)] * config.lamb_dicke[(p, ion_b)];
        if weight == 0.0 {
            continue;
        }
        // Per-segment moments shared by every off-diagonal cell of this mode.
        let cos_m: Vec<f64> =
            (0..nseg).map(|k| seg_cos(w, mu, bounds[k], bounds[k + 1])).collect();
        let sin_m: Vec<f64> =
            (0..nseg).map(|k| seg_sin(w, mu, bounds[k], bounds[k + 1])).collect();
        for k in 0..nseg {
            for l in 0..k {
                // Full inner segment: the double integral factorizes.
                d[(k, l)] += weight * (sin_m[k] * cos_m[l] - cos_m[k] * sin_m[l]);
            }
            let (t0, t1) = (bounds[k], bounds[k + 1]);
            let cell = if 2.0 * mu.abs() <= tol.eps_res {
                diagonal_cell_quadrature(w, mu, t0, t1)
            } else {
                diagonal_cell(w, mu, t0, t1)
            };
            d[(k, k)] += weight * cell;
        }
    }

    // Mirror-averaged form; exact symmetry by construction.
    let mut s = DMatrix::zeros(nseg, nseg);
    for k in 0..nseg {
        for l in 0..=k {
            let v = 0.5 * (d[(k, l)] + d[(l, k)]);
            s[(k, l)] = v;
            s[(l, k)] = v;
        }
    }
    Ok(PairCoupling { d, s })
}
