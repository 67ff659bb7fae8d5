//! Power-optimal shared pulse for one entangling pair.
//!
//! Within the null space of the decoupling matrix every pulse closes all
//! phase-space trajectories, so the only remaining condition is the realized
//! coupling w^T s w = theta. Writing w = B z over an orthonormal kernel basis
//! B turns that into z^T V z = theta with V = B^T s B. Among all z with that
//! value, expanding z in eigenvectors of V shows the squared norm sum_i z_i^2
//! is minimized by putting everything on the eigenvector whose eigenvalue has
//! the sign of theta and the largest magnitude; the minimum power is
//! theta / lambda. The pulse follows by scaling that eigenvector with
//! sqrt(theta / lambda), since the coupling is quadratic in the amplitude.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::integrals::{build_m_matrix, build_pair_coupling};
use crate::linalg::{extreme_eig_matching_sign, nullspace, project_quadratic, NullSpaceBasis};
use crate::model::TrapConfig;
use crate::tolerance::ToleranceSet;

/// Shared-pulse solution for one pair.
#[derive(Debug, Clone)]
pub struct SingleXxSolution {
    /// Per-segment amplitude in rad/us, applied to both ions.
    pub omega: DVector<f64>,
    /// Eigenvalue the solve landed on; same sign as theta.
    pub lambda: f64,
    /// Eigenvector coordinates in the kernel basis.
    pub coeffs: DVector<f64>,
    /// Total squared amplitude of one pulse, theta / lambda. No null-space
    /// pulse with the same coupling has less.
    pub power: f64,
}

/// Solves for the minimum-power shared pulse coupling `ion_a` and `ion_b` by
/// `theta`.
pub fn solve_single_xx(
    config: &TrapConfig,
    ion_a: usize,
    ion_b: usize,
    theta: f64,
    tol: &ToleranceSet,
) -> Result<SingleXxSolution> {
    if !theta.is_finite() || theta == 0.0 {
        return Err(Error::InvalidAngle);
    }
    if ion_a == ion_b || ion_a >= config.n_ions || ion_b >= config.n_ions {
        return Err(Error::Validation(format!(
            "pair ({ion_a}, {ion_b}) is not a valid ion pair for {} ions",
            config.n_ions
        )));
    }
    let dm = build_m_matrix(config, tol)?;
    let ns = nullspace(&dm.m, tol)?;
    solve_in_nullspace(config, &ns, ion_a, ion_b, theta, tol)
}

/// The same solve against a precomputed kernel basis.
pub(crate) fn solve_in_nullspace(
    config: &TrapConfig,
    ns: &NullSpaceBasis,
    ion_a: usize,
    ion_b: usize,
    theta: f64,
    tol: &ToleranceSet,
) -> Result<SingleXxSolution> {
    let pc = build_pair_coupling(config, ion_a, ion_b, tol)?;
    let v = project_quadratic(&ns.basis, &pc.s)?;
    let (lambda, coeffs) = extreme_eig_matching_sign(&v.v, theta)?
        .ok_or(Error::SignUnreachable { theta })?;
    let k = (theta / lambda).sqrt();
    let omega = &ns.basis * &coeffs * k;
    Ok(SingleXxSolution {
        omega,
        lambda,
        coeffs,
        power: theta / lambda,
    })
}
