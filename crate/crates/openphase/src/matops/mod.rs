//! Dense complex linear algebra for non-normal matrices.
//!
//! Spectral decomposition with paired right vectors and left covectors under the
//! bilinear (non-conjugated) pairing, bi-orthonormalization with a deterministic
//! gauge, and a tolerance-driven Jordan normal form.

mod assign;
mod eigen;
mod jordan;

pub use assign::{max_weight_assignment, min_cost_assignment};
pub use eigen::{apply_gauge, biorthonormalize, normalize_pairs, spectral_decompose, EigenSystem};
pub use jordan::{jordan_form, jordan_form_with_bound, JordanBlock, JordanForm, DEFAULT_CONDITION_BOUND};

#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::linalg::Schur;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;
/// Dense complex matrix.
pub type CMatrix = DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = DVector<C64>;

/// Default relative eigenvalue clustering tolerance (multiplied by ‖M‖).
pub const DEFAULT_CLUSTER_REL: f64 = 1e-7;

/// Failures of the dense linear-algebra layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is defective at tolerance {tol:e} (eigenvalue condition {reciprocal_condition:e})")]
    DefectiveMatrix { tol: f64, reciprocal_condition: f64 },
    #[error("eigen-pair residual {residual:e} exceeds tolerance {tol:e}")]
    Residual { residual: f64, tol: f64 },
    #[error("eigenvalues {i} and {j} are closer ({gap:e}) than the cluster tolerance {tol:e}")]
    NearDegenerate { i: usize, j: usize, gap: f64, tol: f64 },
    #[error("condition estimate {condition:e} of the similarity transform exceeds {bound:e}")]
    IllConditionedTransform { condition: f64, bound: f64 },
    #[error("distinct eigenvalue clusters only {gap:e} apart, below 10x cluster tolerance {tol:e}")]
    TolClash { gap: f64, tol: f64 },
    #[error("Jordan chain construction failed: {0}")]
    ChainConstruction(&'static str),
    #[error("iterative decomposition did not converge")]
    NoConvergence,
}

/// Frobenius norm.
pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Default absolute clustering tolerance `1e-7·‖M‖`.
pub fn default_cluster_tol(m: &CMatrix) -> f64 {
    DEFAULT_CLUSTER_REL * frobenius_norm(m)
}

/// Bilinear pairing ⟨⟨E|D⟩⟩ = Σ Eᵢ Dᵢ (no conjugation).
pub fn bilinear(left: &CVector, right: &CVector) -> C64 {
    left.iter().zip(right.iter()).map(|(a, b)| a * b).sum()
}

/// Lift a real matrix to a complex one.
pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

/// Complex Schur form `(Q, T)` with `M = Q·T·Q*`.
///
/// The QR iteration can stall on matrices with an exactly zero diagonal and
/// near-degenerate spectrum; it is then retried on `M + ‖M‖·I` and shifted back.
pub(crate) fn schur_form(m: &CMatrix) -> Result<(CMatrix, CMatrix), MatError> {
    let n = m.nrows();
    let iterations = 1000 * n.max(1);
    if let Some(s) = Schur::try_new(m.clone(), f64::EPSILON, iterations) {
        return Ok(s.unpack());
    }
    let shift = C64::new(frobenius_norm(m).max(1.0), 0.0);
    let shifted = m + CMatrix::identity(n, n) * shift;
    let (q, mut t) = Schur::try_new(shifted, f64::EPSILON, iterations).ok_or(MatError::NoConvergence)?.unpack();
    for i in 0..n {
        t[(i, i)] -= shift;
    }
    Ok((q, t))
}

pub(crate) fn check_square_finite(m: &CMatrix) -> Result<(), MatError> {
    if m.nrows() != m.ncols() {
        return Err(MatError::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(MatError::NonFinite);
    }
    Ok(())
}

/// Singular values (descending) with the matching right singular vectors as columns.
pub(crate) fn svd_sorted(a: &CMatrix) -> Result<(alloc::vec::Vec<f64>, CMatrix, CMatrix), MatError> {
    use alloc::vec::Vec;
    let (r, c) = a.shape();
    if r == 0 || c == 0 {
        return Ok((Vec::new(), CMatrix::zeros(r, 0), CMatrix::identity(c, c)));
    }
    let svd =
        nalgebra::linalg::SVD::try_new(a.clone(), true, true, f64::EPSILON, 10_000).ok_or(MatError::NoConvergence)?;
    let u = svd.u.ok_or(MatError::NoConvergence)?;
    let v = svd.v_t.ok_or(MatError::NoConvergence)?.adjoint();
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u_sorted = CMatrix::from_fn(u.nrows(), k, |row, col| u[(row, order[col])]);
    // For wide inputs the thin SVD omits the trailing null directions of V; complete them.
    let mut v_sorted = CMatrix::from_fn(v.nrows(), k, |row, col| v[(row, order[col])]);
    if k < c {
        v_sorted = complete_orthonormal(&v_sorted);
    }
    Ok((sv, u_sorted, v_sorted))
}

/// Extend orthonormal columns to a full unitary basis.
fn complete_orthonormal(q: &CMatrix) -> CMatrix {
    let n = q.nrows();
    let mut cols: alloc::vec::Vec<CVector> = q.column_iter().map(|c| c.into_owned()).collect();
    for e in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v = CVector::zeros(n);
        v[e] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for c in &cols {
                let p = c.dotc(&v);
                v -= c * p;
            }
        }
        let nv = v.norm();
        if nv > 1e-8 {
            cols.push(v / C64::new(nv, 0.0));
        }
    }
    CMatrix::from_columns(&cols)
}
