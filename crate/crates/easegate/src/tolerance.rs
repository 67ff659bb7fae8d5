//! Numerical tolerances, collected in one place.
//!
//! Every rank decision, pivot cutoff, resonance guard, and verification
//! threshold in the crate reads from a [`ToleranceSet`] so that a command-line
//! override reaches all of them consistently.

/// Tolerances shared by the solver and the verifier.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ToleranceSet {
    /// Singular values at or below this count toward the null space.
    /// `None` picks `max(rows, cols) * machine_eps * sigma_max` per matrix.
    pub rank_tol: Option<f64>,
    /// Row-reduction entries below `tol_pivot * max_abs_entry` are treated as
    /// exact zeros.
    pub tol_pivot: f64,
    /// Resonance guard in rad/us. Closed-form segment integrals are rejected
    /// (or re-routed to quadrature) when a frequency denominator falls below
    /// this.
    pub eps_res: f64,
    /// Scale-relative verification threshold for residual displacements and
    /// coupling errors.
    pub verify_tol: f64,
}

impl Default for ToleranceSet {
    fn default() -> Self {
        ToleranceSet {
            rank_tol: None,
            tol_pivot: 1e-10,
            eps_res: 1e-6,
            verify_tol: 1e-8,
        }
    }
}

impl ToleranceSet {
    /// Effective rank cutoff for a matrix with the given shape and largest
    /// singular value.
    pub fn rank_cutoff(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        match self.rank_tol {
            Some(t) => t,
            None => rows.max(cols) as f64 * f64::EPSILON * sigma_max,
        }
    }

    /// Absolute pivot cutoff for a matrix whose largest entry magnitude is
    /// `max_abs`.
    pub fn pivot_cutoff(&self, max_abs: f64) -> f64 {
        self.tol_pivot * max_abs
    }
}
