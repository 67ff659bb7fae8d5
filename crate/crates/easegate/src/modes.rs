//! Normal modes of a linear ion chain in a harmonic trap.
//!
//! Positions are solved in the standard dimensionless units where the axial
//! potential is u^2/2 per ion and the Coulomb repulsion between ions i and j
//! is 1/|u_i - u_j|. The transverse mode matrix in units of the axial
//! frequency squared is then
//!
//! ```text
//! K[i][i] = a^2 - sum_{k != i} 1/|u_i - u_k|^3
//! K[i][j] =            1/|u_i - u_j|^3            (i != j)
//! ```
//!
//! with a = f_transverse / f_axial. Its largest eigenvalue is exactly a^2
//! with eigenvector (1, ..., 1)/sqrt(N): the common mode oscillates at the
//! bare transverse frequency, and every other mode sits below it.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::TrapConfigFile;

/// Inputs for chain mode generation.
#[derive(Debug, Clone)]
pub struct ChainParams {
    pub n_ions: usize,
    /// Transverse common-mode frequency in MHz.
    pub com_freq_mhz: f64,
    /// Lamb-Dicke scale; each mode row is this times a unit eigenvector.
    pub base_eta: f64,
    /// Axial-to-transverse frequency ratio, in (0, 1). Smaller is stiffer
    /// transversally; large values buckle long chains.
    pub anisotropy: f64,
}

impl ChainParams {
    pub fn new(n_ions: usize, com_freq_mhz: f64, base_eta: f64) -> Self {
        ChainParams {
            n_ions,
            com_freq_mhz,
            base_eta,
            anisotropy: 0.1,
        }
    }
}

/// Generated mode data, ascending in frequency.
#[derive(Debug, Clone)]
pub struct ChainModes {
    pub freqs_mhz: Vec<f64>,
    /// Row p is base_eta times the unit eigenvector of mode p.
    pub lamb_dicke: Vec<Vec<f64>>,
    /// Dimensionless equilibrium positions, ascending.
    pub equilibrium: Vec<f64>,
}

impl ChainModes {
    /// Completes a trap document with drive and timing choices.
    pub fn to_trap_file(
        &self,
        detuning_mhz: f64,
        gate_time_us: f64,
        n_segments: usize,
    ) -> TrapConfigFile {
        TrapConfigFile {
            n_ions: self.freqs_mhz.len(),
            mode_freqs_mhz: self.freqs_mhz.clone(),
            lamb_dicke: self.lamb_dicke.clone(),
            detuning_mhz,
            gate_time_us,
            n_segments,
        }
    }

    /// Midway between the two highest modes; above the single mode for N = 1.
    pub fn default_detuning_mhz(&self) -> f64 {
        let n = self.freqs_mhz.len();
        if n >= 2 {
            0.5 * (self.freqs_mhz[n - 1] + self.freqs_mhz[n - 2])
        } else {
            1.01 * self.freqs_mhz[0]
        }
    }
}

/// Solves equilibrium positions and transverse normal modes for a chain.
pub fn generate_chain_modes(params: &ChainParams) -> Result<ChainModes> {
    let n = params.n_ions;
    if n == 0 {
        return Err(Error::Validation("chain needs at least one ion".into()));
    }
    if !(params.com_freq_mhz.is_finite() && params.com_freq_mhz > 0.0) {
        return Err(Error::Validation(format!(
            "common-mode frequency must be positive, got {}",
            params.com_freq_mhz
        )));
    }
    if !(params.base_eta.is_finite() && params.base_eta > 0.0) {
        return Err(Error::Validation(format!(
            "base_eta must be positive, got {}",
            params.base_eta
        )));
    }
    if !(params.anisotropy > 0.0 && params.anisotropy < 1.0) {
        return Err(Error::Validation(format!(
            "anisotropy must lie in (0, 1), got {}",
            params.anisotropy
        )));
    }

    let u = equilibrium_positions(n)?;
    let a = 1.0 / params.anisotropy;

    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = a * a;
        for j in 0..n {
            if i == j {
                continue;
            }
            let inv3 = 1.0 / (u[i] - u[j]).abs().powi(3);
            diag -= inv3;
            k[(i, j)] = inv3;
        }
        k[(i, i)] = diag;
    }

    let eig = nalgebra::SymmetricEigen::new(k);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());

    let mut freqs_mhz = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    for &q in &order {
        let lambda = eig.eigenvalues[q];
        if lambda <= 0.0 {
            return Err(Error::Numerical(format!(
                "transverse mode unstable (eigenvalue {lambda}); decrease anisotropy for {n} ions"
            )));
        }
        // omega_p = omega_axial * sqrt(lambda), and omega_axial = com / a.
        freqs_mhz.push(params.com_freq_mhz * lambda.sqrt() / a);
        let mut v: Vec<f64> = eig.eigenvectors.column(q).iter().copied().collect();
        fix_vector_sign(&mut v);
        rows.push(v.iter().map(|x| params.base_eta * x).collect());
    }

    for w in freqs_mhz.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::Numerical(format!(
                "degenerate transverse modes at {} MHz",
                w[0]
            )));
        }
    }

    Ok(ChainModes {
        freqs_mhz,
        lamb_dicke: rows,
        equilibrium: u,
    })
}

/// First component with magnitude above 1e-8 is made positive.
fn fix_vector_sign(v: &mut [f64]) {
    for &x in v.iter() {
        if x.abs() > 1e-8 {
            if x < 0.0 {
                for y in v.iter_mut() {
                    *y = -*y;
                }
            }
            return;
        }
    }
}

/// Damped Newton solve of the dimensionless equilibrium equations
/// u_i - sum_{j != i} sign(u_i - u_j) / (u_i - u_j)^2 = 0.
fn equilibrium_positions(n: usize) -> Result<Vec<f64>> {
    if n == 1 {
        return Ok(vec![0.0]);
    }
    // Ordered initial spread close to the known density profile.
    let spacing = 2.018 / (n as f64).powf(0.559);
    let mut u: Vec<f64> =
        (0..n).map(|i| (i as f64 - 0.5 * (n as f64 - 1.0)) * spacing).collect();

    for _ in 0..200 {
        let g = gradient(&u);
        let h = hessian(&u);
        let step = h
            .lu()
            .solve(&DVector::from_column_slice(&g))
            .ok_or_else(|| Error::Numerical("singular Hessian in equilibrium solve".into()))?;
        // Damping keeps the ion order intact on early steps.
        let mut scale = 1.0;
        let base_norm = sup_norm(&g);
        let mut moved = u.clone();
        for _ in 0..60 {
            for i in 0..n {
                moved[i] = u[i] - scale * step[i];
            }
            if is_ordered(&moved) && sup_norm(&gradient(&moved)) <= base_norm {
                break;
            }
            scale *= 0.5;
        }
        let max_update = step.iter().map(|x| (scale * x).abs()).fold(0.0f64, f64::max);
        u = moved;
        if max_update < 1e-12 {
            return Ok(u);
        }
    }
    Err(Error::Numerical(format!(
        "equilibrium solve did not converge for {n} ions"
    )))
}

fn gradient(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let mut g = vec![0.0; n];
    for i in 0..n {
        let mut acc = u[i];
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = u[i] - u[j];
            acc -= d.signum() / (d * d);
        }
        g[i] = acc;
    }
    g
}

fn hessian(u: &[f64]) -> DMatrix<f64> {
    let n = u.len();
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 1.0;
        for j in 0..n {
            if i == j {
                continue;
            }
            let inv3 = 2.0 / (u[i] - u[j]).abs().powi(3);
            diag += inv3;
            h[(i, j)] = -inv3;
        }
        h[(i, i)] = diag;
    }
    h
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, &x| a.max(x.abs()))
}

fn is_ordered(u: &[f64]) -> bool {
    u.windows(2).all(|w| w[0] < w[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_ion_is_the_bare_trap() {
        let modes = generate_chain_modes(&ChainParams::new(1, 3.0, 0.1)).unwrap();
        assert_eq!(modes.freqs_mhz.len(), 1);
        assert!((modes.freqs_mhz[0] - 3.0).abs() < 1e-12);
        assert_eq!(modes.lamb_dicke, vec![vec![0.1]]);
        assert_eq!(modes.equilibrium, vec![0.0]);
    }

    #[test]
    fn two_ion_equilibrium_is_analytic() {
        // u = +-(1/4)^(1/3)
        let modes = generate_chain_modes(&ChainParams::new(2, 3.0, 0.1)).unwrap();
        let expect = 0.25f64.powf(1.0 / 3.0);
        assert!((modes.equilibrium[0] + expect).abs() < 1e-11);
        assert!((modes.equilibrium[1] - expect).abs() < 1e-11);
    }

    #[test]
    fn three_ion_equilibrium_is_analytic() {
        // outer ions at +-(5/4)^(1/3)
        let modes = generate_chain_modes(&ChainParams::new(3, 3.0, 0.1)).unwrap();
        let expect = 1.25f64.powf(1.0 / 3.0);
        assert!((modes.equilibrium[0] + expect).abs() < 1e-11);
        assert!(modes.equilibrium[1].abs() < 1e-11);
        assert!((modes.equilibrium[2] - expect).abs() < 1e-11);
    }

    #[test]
    fn two_ion_eigenvectors_are_the_symmetric_pair() {
        let modes = generate_chain_modes(&ChainParams::new(2, 3.0, 0.1)).unwrap();
        let s = 0.5f64.sqrt();
        // Ascending order: rocking mode below the common mode.
        let rock = &modes.lamb_dicke[0];
        let com = &modes.lamb_dicke[1];
        assert!((rock[0] - 0.1 * s).abs() < 1e-10);
        assert!((rock[1] + 0.1 * s).abs() < 1e-10);
        assert!((com[0] - 0.1 * s).abs() < 1e-10);
        assert!((com[1] - 0.1 * s).abs() < 1e-10);
        assert!((modes.freqs_mhz[1] - 3.0).abs() < 1e-10);
        assert!(modes.freqs_mhz[0] < modes.freqs_mhz[1]);
    }

    #[test]
    fn five_ion_rows_are_orthonormal() {
        let modes = generate_chain_modes(&ChainParams::new(5, 3.0, 0.1)).unwrap();
        for p in 0..5 {
            for q in 0..5 {
                let dot: f64 = (0..5)
                    .map(|m| modes.lamb_dicke[p][m] * modes.lamb_dicke[q][m])
                    .sum::<f64>()
                    / (0.1 * 0.1);
                let expect = if p == q { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-9, "rows {p},{q}: {dot}");
            }
        }
    }

    #[test]
    fn common_mode_tops_the_spectrum() {
        let modes = generate_chain_modes(&ChainParams::new(7, 3.0, 0.1)).unwrap();
        assert!((modes.freqs_mhz[6] - 3.0).abs() < 1e-9);
        for w in modes.freqs_mhz.windows(2) {
            assert!(w[0] < w[1]);
        }
        // Common-mode eigenvector is uniform.
        let com = &modes.lamb_dicke[6];
        let expect = 0.1 / 7.0f64.sqrt();
        for &x in com {
            assert!((x - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_zero_ions_and_bad_params() {
        assert!(generate_chain_modes(&ChainParams::new(0, 3.0, 0.1)).is_err());
        assert!(generate_chain_modes(&ChainParams::new(3, -1.0, 0.1)).is_err());
        let mut p = ChainParams::new(3, 3.0, 0.1);
        p.anisotropy = 1.5;
        assert!(generate_chain_modes(&p).is_err());
    }
}
