//! Simultaneous entangling-gate synthesis over many pairs.
//!
//! Every pulse lives in the kernel of the decoupling matrix (all phase-space
//! trajectories close), so only the pairwise couplings remain: for each pair
//! of participating ions the projected quadratic form must hit its target
//! angle, or zero for pairs that must stay decoupled.
//!
//! Participants split into connected coupling groups, and the solver walks
//! them one qubit at a time in a deterministic order. For the qubit at
//! position n of the walk there are three situations:
//!
//! * it opens a new group: no earlier qubit couples to it, so nothing fixes
//!   its pulse yet. Record the subspace orthogonal to its decoupling
//!   constraints and defer.
//! * it is the second qubit of its group: its partner's pulse is still
//!   deferred. Take the extreme eigenvector L of the pair's projected
//!   coupling, project L into each qubit's recorded subspace, and scale the
//!   two projections so the pair coupling lands on theta with equal pulse
//!   norms on both sides.
//! * every relevant earlier pulse is known: each earlier qubit m contributes
//!   one linear constraint row (V^{(m,n)} xi_m)^T, with its coupling target
//!   (or zero) on the right-hand side. Row-reduce and take the minimum-norm
//!   solution of the reduced system.
//!
//! The minimum-norm step parameterizes solutions by the free columns of the
//! reduced system: with pivot block [I | E] and reduced targets c, the free
//! part d solves (I + E^T E) d = E^T c, and the pivot part is c - E d. That
//! stationarity condition is exactly the least-norm optimality of the full
//! solution vector.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::integrals::{build_m_matrix, build_pair_coupling};
use crate::linalg::{
    extreme_eig_matching_sign, nullspace, orthonormalize, project_quadratic, rref_within,
    sym_eig_extreme, NullSpaceBasis,
};
use crate::model::{EntanglementSpec, PulseSolution, TrapConfig};
use crate::tolerance::ToleranceSet;

/// What the walk does at one position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// Opens a coupling group; pulse deferred until the next position.
    Defer,
    /// Solves this qubit together with the deferred group opener.
    SolvePair,
    /// Solves against fully known earlier pulses.
    SolveConstrained,
}

/// Deterministic processing order for the participating qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitOrdering {
    /// Ion indices in solve order, groups concatenated.
    pub sequence: Vec<usize>,
    /// The coupling groups, each in its walk order.
    pub components: Vec<Vec<usize>>,
    /// Step kind per position of `sequence`.
    pub kinds: Vec<StepKind>,
}

/// Splits the spec into connected coupling groups and orders the walk.
///
/// Groups are sorted by their smallest ion; within a group the walk is
/// breadth-first from the smallest ion, visiting neighbors in ascending
/// order, so the second position is always the opener's smallest neighbor.
pub fn preprocess_groups(spec: &EntanglementSpec) -> QubitOrdering {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for p in &spec.pairs {
        adj.entry(p.a).or_default().push(p.b);
        adj.entry(p.b).or_default().push(p.a);
    }
    for nb in adj.values_mut() {
        nb.sort_unstable();
        nb.dedup();
    }

    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut seen: std::collections::BTreeSet<usize> = std::collections::BTreeSet::new();
    // BTreeMap iteration starts components at their smallest member and
    // yields the groups already sorted by it.
    for &root in adj.keys() {
        if seen.contains(&root) {
            continue;
        }
        let mut order = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(root);
        seen.insert(root);
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for &nb in &adj[&q] {
                if seen.insert(nb) {
                    queue.push_back(nb);
                }
            }
        }
        components.push(order);
    }

    let mut sequence = Vec::new();
    let mut kinds = Vec::new();
    for comp in &components {
        for (i, &ion) in comp.iter().enumerate() {
            sequence.push(ion);
            kinds.push(match i {
                0 => StepKind::Defer,
                1 => StepKind::SolvePair,
                _ => StepKind::SolveConstrained,
            });
        }
    }
    QubitOrdering {
        sequence,
        components,
        kinds,
    }
}

/// Incremental state of the walk.
pub struct SolverWorkspace<'a> {
    config: &'a TrapConfig,
    tol: &'a ToleranceSet,
    pub ordering: QubitOrdering,
    pub null: NullSpaceBasis,
    /// Kernel-coordinate pulse per position, filled as the walk proceeds.
    coords: Vec<Option<DVector<f64>>>,
    /// Orthonormal constrained subspace recorded by a deferred opener.
    saved_bases: Vec<Option<Vec<DVector<f64>>>>,
    /// Projected couplings keyed by unordered ion pair.
    v_cache: BTreeMap<(usize, usize), DMatrix<f64>>,
    /// Free dimensions seen at each position, for diagnostics.
    pub subspace_dims: Vec<usize>,
}

impl<'a> SolverWorkspace<'a> {
    pub fn new(
        config: &'a TrapConfig,
        spec: &'a EntanglementSpec,
        tol: &'a ToleranceSet,
    ) -> Result<Self> {
        let dm = build_m_matrix(config, tol)?;
        let null = nullspace(&dm.m, tol)?;
        let ordering = preprocess_groups(spec);
        let positions = ordering.sequence.len();
        Ok(SolverWorkspace {
            config,
            tol,
            ordering,
            null,
            coords: vec![None; positions],
            saved_bases: vec![None; positions],
            v_cache: BTreeMap::new(),
            subspace_dims: vec![0; positions],
        })
    }

    pub fn kernel_dim(&self) -> usize {
        self.null.dim()
    }

    /// Segment amplitudes for the pulse solved at `position`.
    pub fn pulse(&self, position: usize) -> Option<DVector<f64>> {
        self.coords[position].as_ref().map(|z| &self.null.basis * z)
    }

    fn recommended_segments(&self) -> usize {
        let minimal = 2 * self.config.n_ions + self.ordering.sequence.len() - 1;
        if self.config.n_segments < minimal {
            minimal
        } else {
            self.config.n_segments + 1
        }
    }

    /// Projected coupling between two ions, cached per unordered pair.
    fn coupling(&mut self, ion_a: usize, ion_b: usize) -> Result<DMatrix<f64>> {
        let key = (ion_a.min(ion_b), ion_a.max(ion_b));
        if let Some(v) = self.v_cache.get(&key) {
            return Ok(v.clone());
        }
        let pc = build_pair_coupling(self.config, key.0, key.1, self.tol)?;
        let v = project_quadratic(&self.null.basis, &pc.s)?.v;
        self.v_cache.insert(key, v.clone());
        Ok(v)
    }

    /// Decoupling constraint rows against every earlier solved pulse.
    /// Position `skip` (the deferred opener during a pair solve) is left out.
    fn decoupling_rows(
        &mut self,
        position: usize,
        skip: Option<usize>,
    ) -> Result<Vec<DVector<f64>>> {
        let ion_n = self.ordering.sequence[position];
        let mut rows = Vec::new();
        for m_pos in 0..position {
            if Some(m_pos) == skip {
                continue;
            }
            let ion_m = self.ordering.sequence[m_pos];
            let xi = match &self.coords[m_pos] {
                Some(z) => z.clone(),
                None => continue,
            };
            let v = self.coupling(ion_m, ion_n)?;
            rows.push(&v * &xi);
        }
        Ok(rows)
    }

    /// Orthonormal basis of the subspace annihilating the given rows.
    /// With no rows this is the full kernel coordinate basis.
    fn subspace_from_rows(&self, rows: &[DVector<f64>]) -> Vec<DVector<f64>> {
        let dim = self.kernel_dim();
        if rows.is_empty() {
            return (0..dim)
                .map(|i| DVector::from_fn(dim, |j, _| if i == j { 1.0 } else { 0.0 }))
                .collect();
        }
        let mut eps = DMatrix::zeros(rows.len(), dim);
        for (i, r) in rows.iter().enumerate() {
            eps.row_mut(i).copy_from(&r.transpose());
        }
        let (reduced, pivots) = rref_within(&eps, dim, self.tol);
        let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
        let raw: Vec<DVector<f64>> = free
            .iter()
            .map(|&j| {
                let mut rho = DVector::zeros(dim);
                rho[j] = 1.0;
                for (q, &c) in pivots.iter().enumerate() {
                    rho[c] = -reduced[(q, j)];
                }
                rho
            })
            .collect();
        orthonormalize(&raw)
    }

    /// Opens a group: records the constrained subspace, defers the pulse.
    pub fn case1_subspace(&mut self, position: usize) -> Result<usize> {
        let rows = self.decoupling_rows(position, None)?;
        let basis = self.subspace_from_rows(&rows);
        let dim = basis.len();
        if dim == 0 {
            return Err(Error::InfeasibleSubspace {
                position,
                constraints: rows.len(),
                dim: self.kernel_dim(),
                recommended_segments: self.recommended_segments(),
            });
        }
        self.subspace_dims[position] = dim;
        self.saved_bases[position] = Some(basis);
        Ok(dim)
    }

    /// Solves the deferred opener at `position - 1` together with `position`.
    pub fn case2_pair_solve(&mut self, position: usize, theta: f64) -> Result<()> {
        if !theta.is_finite() || theta == 0.0 {
            return Err(Error::InvalidAngle);
        }
        let opener = position
            .checked_sub(1)
            .ok_or_else(|| Error::Validation("pair solve needs a deferred opener".into()))?;
        let ion_prev = self.ordering.sequence[opener];
        let ion_cur = self.ordering.sequence[position];

        let rows = self.decoupling_rows(position, Some(opener))?;
        let own_basis = self.subspace_from_rows(&rows);
        self.subspace_dims[position] = own_basis.len();
        let opener_basis = self.saved_bases[opener]
            .clone()
            .ok_or_else(|| Error::Validation("opener subspace was never recorded".into()))?;
        if own_basis.is_empty() {
            return Err(Error::InfeasibleSubspace {
                position,
                constraints: rows.len(),
                dim: self.kernel_dim(),
                recommended_segments: self.recommended_segments(),
            });
        }

        let v = self.coupling(ion_prev, ion_cur)?;
        // Extreme eigenvector with theta's sign when one exists; the scale
        // split below can absorb a sign flip otherwise.
        let l = match extreme_eig_matching_sign(&v, theta)? {
            Some((_, vec)) => vec,
            None => sym_eig_extreme(&v)?.1,
        };

        let project = |basis: &[DVector<f64>]| {
            let mut u = DVector::zeros(self.kernel_dim());
            for b in basis {
                u.axpy(b.dot(&l), b, 1.0);
            }
            u
        };
        let u_prev = project(&opener_basis);
        let u_cur = project(&own_basis);
        let (n_prev, n_cur) = (u_prev.norm(), u_cur.norm());
        if n_prev < 1e-10 || n_cur < 1e-10 {
            return Err(Error::ZeroOverlap {
                position,
                recommended_segments: self.recommended_segments(),
            });
        }
        let q = (u_prev.transpose() * &v * &u_cur)[(0, 0)];
        let v_scale = v.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(1e-300);
        if q.abs() < 1e-14 * v_scale * n_prev * n_cur {
            return Err(Error::ZeroOverlap {
                position,
                recommended_segments: self.recommended_segments(),
            });
        }

        // theta = s_prev * s_cur * q with equal pulse norms on both sides.
        let gamma = theta / q;
        let s_prev = (gamma.abs() * n_cur / n_prev).sqrt();
        let s_cur = gamma / s_prev;
        self.coords[opener] = Some(&u_prev * s_prev);
        self.coords[position] = Some(&u_cur * s_cur);
        Ok(())
    }

    /// Solves `position` against all earlier pulses: one constraint row per
    /// earlier position, minimum-norm solution of the reduced system.
    ///
    /// `targets` pairs each earlier position with its coupling value, zero
    /// for pairs that must stay decoupled.
    pub fn case3_min_norm(&mut self, position: usize, targets: &[(usize, f64)]) -> Result<()> {
        if targets.iter().all(|&(_, t)| t == 0.0) {
            return Err(Error::InconsistentConstraints {
                position,
                detail: "every coupling target is zero; the qubit does not belong in the walk"
                    .into(),
                recommended_segments: self.recommended_segments(),
            });
        }
        let dim = self.kernel_dim();
        let ion_n = self.ordering.sequence[position];
        let mut aug = DMatrix::zeros(targets.len(), dim + 1);
        for (i, &(m_pos, chi)) in targets.iter().enumerate() {
            let ion_m = self.ordering.sequence[m_pos];
            let xi = self.coords[m_pos]
                .clone()
                .ok_or_else(|| Error::Validation(format!("position {m_pos} has no pulse yet")))?;
            let v = self.coupling(ion_m, ion_n)?;
            let row = &v * &xi;
            for j in 0..dim {
                aug[(i, j)] = row[j];
            }
            aug[(i, dim)] = chi;
        }

        let (reduced, pivots) = rref_within(&aug, dim, self.tol);
        let rank = pivots.len();
        for i in rank..targets.len() {
            if reduced[(i, dim)] != 0.0 {
                return Err(Error::InconsistentConstraints {
                    position,
                    detail: format!(
                        "{} constraints exceed the reachable couplings ({} independent directions)",
                        targets.len(),
                        rank
                    ),
                    recommended_segments: self.recommended_segments(),
                });
            }
        }
        self.subspace_dims[position] = dim - rank;

        let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
        let mut zeta = DVector::zeros(dim);
        if free.is_empty() {
            // Fully determined: pivot values are the reduced targets.
            for (q, &c) in pivots.iter().enumerate() {
                zeta[c] = reduced[(q, dim)];
            }
        } else {
            let e = DMatrix::from_fn(rank, free.len(), |q, l| reduced[(q, free[l])]);
            let chi_t = DVector::from_fn(rank, |q, _| reduced[(q, dim)]);
            // Least-norm free part: (I + E^T E) d = E^T chi.
            let p = DMatrix::identity(free.len(), free.len()) + e.transpose() * &e;
            let phi = e.transpose() * &chi_t;
            let d = nalgebra::Cholesky::new(p)
                .ok_or_else(|| Error::Numerical("normal system is not positive definite".into()))?
                .solve(&phi);
            let pivot_part = &chi_t - &e * &d;
            for (q, &c) in pivots.iter().enumerate() {
                zeta[c] = pivot_part[q];
            }
            for (l, &c) in free.iter().enumerate() {
                zeta[c] = d[l];
            }
        }
        self.coords[position] = Some(zeta);
        Ok(())
    }
}

/// Solves the full pulse set for a coupling spec.
pub fn solve_ease(
    config: &TrapConfig,
    spec: &EntanglementSpec,
    tol: &ToleranceSet,
) -> Result<PulseSolution> {
    let mut ws = SolverWorkspace::new(config, spec, tol)?;
    let sequence = ws.ordering.sequence.clone();
    let kinds = ws.ordering.kinds.clone();

    for (pos, kind) in kinds.iter().enumerate() {
        match kind {
            StepKind::Defer => {
                ws.case1_subspace(pos)?;
            }
            StepKind::SolvePair => {
                let theta = spec.target(sequence[pos - 1], sequence[pos]);
                ws.case2_pair_solve(pos, theta)?;
            }
            StepKind::SolveConstrained => {
                let ion_n = sequence[pos];
                let targets: Vec<(usize, f64)> = (0..pos)
                    .map(|m_pos| (m_pos, spec.target(sequence[m_pos], ion_n)))
                    .collect();
                ws.case3_min_norm(pos, &targets)?;
            }
        }
    }

    let mut amplitudes = BTreeMap::new();
    for (pos, &ion) in sequence.iter().enumerate() {
        let pulse = ws
            .pulse(pos)
            .ok_or_else(|| Error::Numerical(format!("position {pos} was never solved")))?;
        amplitudes.insert(ion, pulse.iter().copied().collect::<Vec<f64>>());
    }
    let solution = PulseSolution {
        amplitudes,
        ordering: sequence,
        components: ws.ordering.components.clone(),
        power: 0.0,
    };
    let power = solution.recompute_power();
    Ok(PulseSolution { power, ..solution })
}
