//! Right/left eigen-decomposition of dense complex matrices.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;

use super::{bilinear, check_square_finite, frobenius_norm, min_cost_assignment, CMatrix, CVector, MatError, C64};

/// Eigenvalues with paired right vectors |D_α⟩⟩ and left covectors ⟨⟨E_α|.
///
/// Left covectors are stored as column vectors of their components; the pairing
/// is bilinear, `⟨⟨E|D⟩⟩ = Σ Eᵢ Dᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub eigenvalues: Vec<C64>,
    pub rights: Vec<CVector>,
    pub lefts: Vec<CVector>,
    pub tolerance: f64,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// ⟨⟨E_a|D_b⟩⟩.
    pub fn overlap(&self, a: usize, b: usize) -> C64 {
        bilinear(&self.lefts[a], &self.rights[b])
    }

    /// max_{α,β} |⟨⟨E_α|D_β⟩⟩ − δ_{αβ}|.
    pub fn biorthonormality_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((self.overlap(a, b) - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Largest right and left residual relative to ‖M‖.
    pub fn max_residual(&self, m: &CMatrix) -> f64 {
        let scale = frobenius_norm(m).max(f64::MIN_POSITIVE);
        let mt = m.transpose();
        let mut worst: f64 = 0.0;
        for ((lam, d), e) in self.eigenvalues.iter().zip(&self.rights).zip(&self.lefts) {
            let rd = (m * d - d * *lam).norm() / d.norm().max(f64::MIN_POSITIVE);
            let re = (&mt * e - e * *lam).norm() / e.norm().max(f64::MIN_POSITIVE);
            worst = worst.max(rd.max(re) / scale);
        }
        worst
    }
}

/// Clusters of eigenvalues this close (relative to ‖M‖) are paired as subspaces.
const PAIRING_CLUSTER_REL: f64 = 1e-6;

/// Eigenvectors of an upper-triangular matrix by back substitution.
fn triangular_eigenvectors(t: &CMatrix) -> Vec<CVector> {
    let n = t.nrows();
    let smin = (f64::EPSILON * frobenius_norm(t)).max(f64::MIN_POSITIVE);
    (0..n)
        .map(|i| {
            let lam = t[(i, i)];
            let mut y = CVector::zeros(n);
            y[i] = C64::new(1.0, 0.0);
            for j in (0..i).rev() {
                let mut s = C64::new(0.0, 0.0);
                for k in j + 1..=i {
                    s += t[(j, k)] * y[k];
                }
                let mut d = t[(j, j)] - lam;
                if d.norm() < smin {
                    d = C64::new(smin, 0.0);
                }
                y[j] = -s / d;
            }
            y
        })
        .collect()
}

fn unit(v: CVector) -> CVector {
    let n = v.norm();
    if n > 0.0 {
        v / C64::new(n, 0.0)
    } else {
        v
    }
}

fn schur_eigenpairs(m: &CMatrix) -> Result<(Vec<C64>, Vec<CVector>), MatError> {
    let (q, t) = super::schur_form(m)?;
    let values = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    let vectors = triangular_eigenvectors(&t).into_iter().map(|y| unit(&q * y)).collect();
    Ok((values, vectors))
}

/// Group indices whose eigenvalues are within `tol` (single linkage).
pub(crate) fn clusters(values: &[C64], tol: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(i);
    }
    groups
}

/// All eigenvalues of `m` with residual-checked right vectors and left covectors.
///
/// Left covectors come from the decomposition of `mᵀ` (bilinear pairing) and are
/// paired with the right vectors by eigenvalue. Within clusters of nearly equal
/// eigenvalues the left block is re-paired so that it is dual to the right block.
/// Normalization is left to [`biorthonormalize`].
pub fn spectral_decompose(m: &CMatrix, tol: f64) -> Result<EigenSystem, MatError> {
    check_square_finite(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(EigenSystem { eigenvalues: Vec::new(), rights: Vec::new(), lefts: Vec::new(), tolerance: tol });
    }
    let scale = frobenius_norm(m);
    let (values, rights) = schur_eigenpairs(m)?;
    let (tvalues, tvectors) = schur_eigenpairs(&m.transpose())?;

    let mut cost = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            cost[i * n + j] = (values[i] - tvalues[j]).norm();
        }
    }
    let pairing = min_cost_assignment(&cost, n);
    let mut lefts: Vec<CVector> = pairing.iter().map(|&j| tvectors[j].clone()).collect();

    let defect_threshold = tol.sqrt();
    for group in clusters(&values, PAIRING_CLUSTER_REL * scale) {
        if group.len() == 1 {
            let i = group[0];
            let s = bilinear(&lefts[i], &rights[i]).norm() / (lefts[i].norm() * rights[i].norm());
            if !(s >= defect_threshold) {
                return Err(MatError::DefectiveMatrix { tol, reciprocal_condition: s });
            }
            continue;
        }
        // W = U (Uᵀ V)^{-T} makes the left block dual to the right block.
        let k = group.len();
        let v = CMatrix::from_columns(&group.iter().map(|&i| rights[i].clone()).collect::<Vec<_>>());
        let u = CMatrix::from_columns(&group.iter().map(|&i| lefts[i].clone()).collect::<Vec<_>>());
        let gram = u.transpose() * &v;
        let (sv, _, _) = super::svd_sorted(&gram)?;
        let (vsv, _, _) = super::svd_sorted(&v)?;
        let rcond = sv[k - 1] / sv[0].max(f64::MIN_POSITIVE);
        let rank_v = vsv[k - 1] / vsv[0].max(f64::MIN_POSITIVE);
        if !(rcond >= defect_threshold) || !(rank_v >= defect_threshold) {
            return Err(MatError::DefectiveMatrix { tol, reciprocal_condition: rcond.min(rank_v) });
        }
        let inv = gram.try_inverse().ok_or(MatError::DefectiveMatrix { tol, reciprocal_condition: 0.0 })?;
        let w = u * inv.transpose();
        for (slot, &i) in group.iter().enumerate() {
            lefts[i] = unit(w.column(slot).into_owned());
        }
    }

    let sys = EigenSystem { eigenvalues: values, rights, lefts, tolerance: tol };
    let residual = sys.max_residual(m);
    if scale > 0.0 && !(residual <= tol) {
        return Err(MatError::Residual { residual, tol });
    }
    Ok(sys)
}

/// Rescale a right vector to unit norm with its largest-magnitude entry real and
/// positive (ties within 1e-9 relative go to the lowest index). Returns the factor applied.
pub fn apply_gauge(v: &mut CVector) -> C64 {
    let norm = v.norm();
    if norm == 0.0 {
        return C64::new(1.0, 0.0);
    }
    let top = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = v.iter().position(|z| z.norm() >= top * (1.0 - 1e-9)).unwrap_or(0);
    let phase = v[pivot] / v[pivot].norm();
    let factor = phase.conj() / norm;
    *v *= factor;
    factor
}

/// Gauge-fix every right vector and scale the lefts so that ⟨⟨E_α|D_α⟩⟩ = 1.
///
/// No degeneracy check; see [`biorthonormalize`].
pub fn normalize_pairs(sys: &EigenSystem) -> EigenSystem {
    let mut out = sys.clone();
    for (d, e) in out.rights.iter_mut().zip(out.lefts.iter_mut()) {
        apply_gauge(d);
        let s = bilinear(e, d);
        *e /= s;
    }
    out
}

/// Bi-orthonormalize a decomposition whose eigenvalues are pairwise separated
/// beyond `cluster_tol`.
pub fn biorthonormalize(sys: &EigenSystem, cluster_tol: f64) -> Result<EigenSystem, MatError> {
    let n = sys.dim();
    for i in 0..n {
        for j in i + 1..n {
            let gap = (sys.eigenvalues[i] - sys.eigenvalues[j]).norm();
            if gap < cluster_tol {
                return Err(MatError::NearDegenerate { i, j, gap, tol: cluster_tol });
            }
        }
    }
    Ok(normalize_pairs(sys))
}
