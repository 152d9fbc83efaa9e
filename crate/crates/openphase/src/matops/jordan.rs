//! Numerically tolerant Jordan normal form.
//!
//! Eigenvalues are clustered within `cluster_tol`; for each cluster with centre μ
//! and multiplicity m the kernel dimensions of (M − μI)^k decide the block sizes
//! (singular values below `rank_tol·σ_max` count as zero), and generalized
//! eigenvector chains are drawn from the kernel directions outside the lower
//! kernel plus the already-built chains.

use alloc::vec::Vec;

use super::eigen::clusters;
use super::{check_square_finite, frobenius_norm, svd_sorted, CMatrix, CVector, MatError, C64};

/// Default upper bound on the condition estimate of the transform.
pub const DEFAULT_CONDITION_BOUND: f64 = 1e12;

/// One Jordan block `λ·I_n + K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JordanBlock {
    pub eigenvalue: C64,
    pub size: usize,
}

/// `M = S·J·S⁻¹` with `J` block diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanForm {
    pub transform: CMatrix,
    pub blocks: Vec<JordanBlock>,
    pub cluster_tol: f64,
    pub rank_tol: f64,
    /// ‖S·J·S⁻¹ − M‖ / ‖M‖ (Frobenius).
    pub residual: f64,
    /// σ_max(S)/σ_min(S).
    pub condition: f64,
}

impl JordanForm {
    /// Block-diagonal `J` with eigenvalues on the diagonal and ones on each
    /// block's first superdiagonal.
    pub fn jordan_matrix(&self) -> CMatrix {
        let n = self.blocks.iter().map(|b| b.size).sum();
        let mut j = CMatrix::zeros(n, n);
        let mut offset = 0;
        for b in &self.blocks {
            for i in 0..b.size {
                j[(offset + i, offset + i)] = b.eigenvalue;
                if i + 1 < b.size {
                    j[(offset + i, offset + i + 1)] = C64::new(1.0, 0.0);
                }
            }
            offset += b.size;
        }
        j
    }

    /// `S·J·S⁻¹`, or `None` if `S` is numerically singular.
    pub fn reconstruct(&self) -> Option<CMatrix> {
        let inv = self.transform.clone().try_inverse()?;
        Some(&self.transform * self.jordan_matrix() * inv)
    }
}

/// Jordan form with the default condition bound.
pub fn jordan_form(m: &CMatrix, cluster_tol: f64, rank_tol: f64) -> Result<JordanForm, MatError> {
    jordan_form_with_bound(m, cluster_tol, rank_tol, DEFAULT_CONDITION_BOUND)
}

/// Jordan form; fails with `IllConditionedTransform` when cond(S) exceeds `condition_bound`.
pub fn jordan_form_with_bound(
    m: &CMatrix,
    cluster_tol: f64,
    rank_tol: f64,
    condition_bound: f64,
) -> Result<JordanForm, MatError> {
    check_square_finite(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(JordanForm {
            transform: CMatrix::zeros(0, 0),
            blocks: Vec::new(),
            cluster_tol,
            rank_tol,
            residual: 0.0,
            condition: 1.0,
        });
    }
    let (_, triangular) = super::schur_form(m)?;
    let values: Vec<C64> = (0..n).map(|i| triangular[(i, i)]).collect();

    let groups = clusters(&values, cluster_tol);
    let mut min_cross = f64::INFINITY;
    for (a, ga) in groups.iter().enumerate() {
        for gb in &groups[a + 1..] {
            for &i in ga {
                for &j in gb {
                    min_cross = min_cross.min((values[i] - values[j]).norm());
                }
            }
        }
    }
    if min_cross < 10.0 * cluster_tol {
        return Err(MatError::TolClash { gap: min_cross, tol: cluster_tol });
    }

    let mut centres: Vec<(C64, usize)> = groups
        .iter()
        .map(|g| {
            let sum: C64 = g.iter().map(|&i| values[i]).sum();
            (sum / g.len() as f64, g.len())
        })
        .collect();
    centres.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));

    let mut columns: Vec<CVector> = Vec::with_capacity(n);
    let mut blocks = Vec::new();
    for &(mu, mult) in &centres {
        let mut chains = cluster_chains(m, mu, mult, rank_tol)?;
        chains.sort_by_key(|chain| core::cmp::Reverse(chain.len()));
        for chain in chains {
            blocks.push(JordanBlock { eigenvalue: mu, size: chain.len() });
            columns.extend(chain.into_iter().rev());
        }
    }
    if columns.len() != n {
        return Err(MatError::ChainConstruction("chain count does not match the dimension"));
    }
    let transform = CMatrix::from_columns(&columns);
    let (sv, _, _) = svd_sorted(&transform)?;
    let condition = sv[0] / sv[n - 1];
    if !(condition <= condition_bound) {
        return Err(MatError::IllConditionedTransform { condition, bound: condition_bound });
    }
    let mut form = JordanForm { transform, blocks, cluster_tol, rank_tol, residual: 0.0, condition };
    let rebuilt = form
        .reconstruct()
        .ok_or(MatError::IllConditionedTransform { condition: f64::INFINITY, bound: condition_bound })?;
    let scale = frobenius_norm(m).max(f64::MIN_POSITIVE);
    form.residual = frobenius_norm(&(rebuilt - m)) / scale;
    Ok(form)
}

/// Orthonormal basis of the kernel of `a`: the right singular vectors with
/// σ ≤ rank_tol·σ_max, never more than `max_dim`; `force` takes exactly that many.
fn kernel(a: &CMatrix, rank_tol: f64, max_dim: usize, force: Option<usize>) -> Result<CMatrix, MatError> {
    let n = a.ncols();
    let (sv, _, v) = svd_sorted(a)?;
    let top = sv.first().copied().unwrap_or(0.0);
    let dim = match force {
        Some(d) => d,
        None if top == 0.0 => n,
        None => n - sv.iter().filter(|&&s| s > rank_tol * top).count(),
    }
    .min(max_dim);
    Ok(v.columns(n - dim, dim).into_owned())
}

fn orthonormal_span(cols: &[CVector], n: usize, rank_tol: f64) -> Result<CMatrix, MatError> {
    if cols.is_empty() {
        return Ok(CMatrix::zeros(n, 0));
    }
    let a = CMatrix::from_columns(cols);
    let (sv, u, _) = svd_sorted(&a)?;
    let top = sv[0];
    let rank = sv.iter().filter(|&&s| s > rank_tol * top).count();
    Ok(u.columns(0, rank).into_owned())
}

/// Chains `[v, Av, …, A^{len−1}v]` spanning the generalized eigenspace at `mu`.
fn cluster_chains(m: &CMatrix, mu: C64, mult: usize, rank_tol: f64) -> Result<Vec<Vec<CVector>>, MatError> {
    let n = m.nrows();
    let a = m - CMatrix::identity(n, n) * mu;
    let mut kernels = alloc::vec![CMatrix::zeros(n, 0)];
    let mut dims = alloc::vec![0usize];
    let mut power = CMatrix::identity(n, n);
    for k in 1..=mult {
        power = &a * &power;
        // Normalize so rank decisions see a matrix of unit scale.
        let pn = frobenius_norm(&power);
        if pn > 0.0 {
            power /= C64::new(pn, 0.0);
        }
        let prev = dims[k - 1];
        let mut ker = kernel(&power, rank_tol, mult, None)?;
        if ker.ncols() <= prev && k > 1 {
            // Kernels are nested; a non-growing kernel means the chain structure is complete
            // unless the multiplicity is not yet reached, in which case force growth.
            ker = kernel(&power, rank_tol, mult, Some((prev + 1).min(mult)))?;
        }
        if k == mult && ker.ncols() < mult {
            ker = kernel(&power, rank_tol, mult, Some(mult))?;
        }
        let d = ker.ncols().max(prev);
        dims.push(d);
        kernels.push(ker);
        if d == mult {
            break;
        }
    }
    let p = dims.len() - 1;
    if dims[p] != mult {
        return Err(MatError::ChainConstruction("generalized eigenspace dimension below multiplicity"));
    }
    let mut chains: Vec<Vec<CVector>> = Vec::new();
    for k in (1..=p).rev() {
        let at_least_k = dims[k] - dims[k - 1];
        let at_least_next = if k < p { dims[k + 1] - dims[k] } else { 0 };
        if at_least_k < at_least_next {
            return Err(MatError::ChainConstruction("kernel dimensions do not form a Jordan structure"));
        }
        let need = at_least_k - at_least_next;
        if need == 0 {
            continue;
        }
        let mut span: Vec<CVector> = kernels[k - 1].column_iter().map(|c| c.into_owned()).collect();
        for ch in &chains {
            span.push(ch[ch.len() - k].clone());
        }
        let w = orthonormal_span(&span, n, rank_tol)?;
        let nk = &kernels[k];
        let outside = nk - &w * (w.adjoint() * nk);
        let (sv, _, y) = svd_sorted(&outside)?;
        if sv.len() < need || sv[need - 1] < 1e-8 {
            return Err(MatError::ChainConstruction("no kernel direction outside the lower chains"));
        }
        for j in 0..need {
            let mut v = nk * y.column(j);
            let vn = v.norm();
            v /= C64::new(vn, 0.0);
            let mut chain = Vec::with_capacity(k);
            chain.push(v);
            for i in 1..k {
                let next = &a * &chain[i - 1];
                chain.push(next);
            }
            chains.push(chain);
        }
    }
    Ok(chains)
}
