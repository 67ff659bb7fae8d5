//! Dense kernels behind the pulse solvers.
//!
//! Rank decisions go through singular values rather than elimination so that
//! a noisy nearly-dependent row cannot masquerade as new rank. Eigenvector and
//! null-space vector signs follow one convention everywhere (first component
//! with magnitude above 1e-8 is positive) to keep solver output reproducible
//! across runs and platforms.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tolerance::ToleranceSet;

/// Orthonormal basis of a matrix kernel.
#[derive(Debug, Clone)]
pub struct NullSpaceBasis {
    /// Columns are the basis vectors; `cols x dim` where `cols` is the
    /// column count of the decomposed matrix.
    pub basis: DMatrix<f64>,
    /// Numerical rank of the decomposed matrix.
    pub rank: usize,
    /// Largest singular value, for scale-aware diagnostics.
    pub sigma_max: f64,
}

impl NullSpaceBasis {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// Symmetric projection of a quadratic form into a basis.
#[derive(Debug, Clone)]
pub struct ProjectedCoupling {
    /// `v[(i, j)] = basis_i^T s basis_j`, exactly symmetric.
    pub v: DMatrix<f64>,
}

/// Orthonormal kernel basis of `m` by singular-value decomposition.
///
/// The rank cutoff is `tol.rank_tol` when set, otherwise
/// `max(rows, cols) * eps * sigma_max`. Errs when the kernel is trivial.
pub fn nullspace(m: &DMatrix<f64>, tol: &ToleranceSet) -> Result<NullSpaceBasis> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::DimensionMismatch {
            expected: "a nonempty matrix".into(),
            got: format!("{rows}x{cols}"),
        });
    }
    // A thin decomposition of a wide matrix omits the kernel directions, so
    // pad with zero rows up to square; the spectrum is unchanged and the
    // right-singular basis becomes complete.
    let work = if rows < cols {
        let mut padded = DMatrix::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Numerical("SVD did not produce V".into()))?;
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = tol.rank_cutoff(rows, cols, sigma_max);

    let mut kernel_rows: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            rank += 1;
        } else if i < v_t.nrows() {
            kernel_rows.push(i);
        }
    }
    // Rows of V^T beyond the singular-value count (tall input) never occur
    // here: work is square or tall with full V^T only when square.
    let dim = cols - rank;
    if dim == 0 {
        return Err(Error::EmptyNullSpace {
            n_segments: cols,
            rank,
        });
    }
    let mut basis = DMatrix::zeros(cols, dim);
    for (j, &i) in kernel_rows.iter().enumerate() {
        let mut col: Vec<f64> = v_t.row(i).iter().copied().collect();
        fix_sign(&mut col);
        basis.set_column(j, &DVector::from_vec(col));
    }
    Ok(NullSpaceBasis {
        basis,
        rank,
        sigma_max,
    })
}

/// First component with magnitude above 1e-8 is made positive.
pub(crate) fn fix_sign(v: &mut [f64]) {
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

/// Eigenpairs of a symmetric matrix sorted by |lambda| descending, ties by
/// value descending, with the shared sign convention applied.
fn sorted_eigenpairs(v: &DMatrix<f64>) -> Result<Vec<(f64, DVector<f64>)>> {
    if v.nrows() == 0 || v.nrows() != v.ncols() {
        return Err(Error::DimensionMismatch {
            expected: "a nonempty square symmetric matrix".into(),
            got: format!("{}x{}", v.nrows(), v.ncols()),
        });
    }
    let eig = nalgebra::SymmetricEigen::new(v.clone());
    let mut idx: Vec<usize> = (0..v.nrows()).collect();
    idx.sort_by(|&i, &j| {
        let (li, lj) = (eig.eigenvalues[i], eig.eigenvalues[j]);
        lj.abs()
            .partial_cmp(&li.abs())
            .unwrap()
            .then(lj.partial_cmp(&li).unwrap())
    });
    Ok(idx
        .into_iter()
        .map(|i| {
            let mut col: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            fix_sign(&mut col);
            (eig.eigenvalues[i], DVector::from_vec(col))
        })
        .collect())
}

/// Extreme eigenpair of a symmetric matrix: largest |lambda|, ties broken
/// toward the larger value.
pub fn sym_eig_extreme(v: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    let pairs = sorted_eigenpairs(v)?;
    Ok(pairs.into_iter().next().expect("nonempty spectrum"))
}

/// Extreme eigenpair among eigenvalues whose sign matches `sign_of`.
/// `None` when the spectrum has no such eigenvalue.
pub(crate) fn extreme_eig_matching_sign(
    v: &DMatrix<f64>,
    sign_of: f64,
) -> Result<Option<(f64, DVector<f64>)>> {
    let want = sign_of.signum();
    let pairs = sorted_eigenpairs(v)?;
    Ok(pairs.into_iter().find(|(l, _)| l.signum() == want && *l != 0.0))
}

/// Reduced row echelon form with partial pivoting.
///
/// Returns the reduced matrix and the pivot column indices. Entries below
/// `tol.tol_pivot * max_abs(e)` are treated as exact zeros; pivot entries are
/// set to exactly 1.
pub fn rref(e: &DMatrix<f64>, tol: &ToleranceSet) -> (DMatrix<f64>, Vec<usize>) {
    rref_within(e, e.ncols(), tol)
}

/// Row reduction restricted to pivoting within the first `pivot_cols`
/// columns; trailing columns ride along as right-hand sides.
pub(crate) fn rref_within(
    e: &DMatrix<f64>,
    pivot_cols: usize,
    tol: &ToleranceSet,
) -> (DMatrix<f64>, Vec<usize>) {
    let mut m = e.clone();
    let (rows, cols) = m.shape();
    let max_abs = m.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let cutoff = tol.pivot_cutoff(max_abs);
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..pivot_cols.min(cols) {
        if r >= rows {
            break;
        }
        // Partial pivoting: largest magnitude in the open rows.
        let mut best = r;
        for i in (r + 1)..rows {
            if m[(i, c)].abs() > m[(best, c)].abs() {
                best = i;
            }
        }
        if m[(best, c)].abs() <= cutoff {
            continue;
        }
        m.swap_rows(r, best);
        let pivot = m[(r, c)];
        for j in 0..cols {
            m[(r, j)] /= pivot;
        }
        m[(r, c)] = 1.0;
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = m[(i, c)];
            if factor == 0.0 {
                continue;
            }
            for j in 0..cols {
                m[(i, j)] -= factor * m[(r, j)];
            }
            m[(i, c)] = 0.0;
        }
        pivots.push(c);
        r += 1;
    }
    // Sweep away elimination residue so rank reads off the rows.
    for x in m.iter_mut() {
        if x.abs() <= cutoff {
            *x = 0.0;
        }
    }
    (m, pivots)
}

/// Modified Gram-Schmidt with one re-orthogonalization pass.
///
/// Vectors whose residual drops below 1e-10 of their original norm are
/// dropped as linearly dependent.
pub fn orthonormalize(vectors: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        let original = v.norm();
        if original == 0.0 {
            continue;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dot(&r);
                r.axpy(-proj, q, 1.0);
            }
        }
        let norm = r.norm();
        if norm < 1e-10 * original {
            continue;
        }
        basis.push(r / norm);
    }
    basis
}

/// Projects a symmetric form through a basis: `v = B^T s B`, with the upper
/// triangle mirrored so the result is exactly symmetric.
pub fn project_quadratic(basis: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<ProjectedCoupling> {
    if s.nrows() != s.ncols() || s.nrows() != basis.nrows() {
        return Err(Error::DimensionMismatch {
            expected: format!("{n}x{n} form against {n}-row basis", n = basis.nrows()),
            got: format!("{}x{} form", s.nrows(), s.ncols()),
        });
    }
    let dim = basis.ncols();
    let sb = s * basis;
    let mut v = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let val = basis.column(i).dot(&sb.column(j));
            v[(i, j)] = val;
            v[(j, i)] = val;
        }
    }
    Ok(ProjectedCoupling { v })
}
