#[allow(unused_imports)]
use num_traits::Float;

use crate::lindblad::{coherence_to_column_stacking, hilbert_schmidt_gram, operator_to_coefficients};
use crate::matops::{CMatrix, CVector, C64};

/// Basis in which the supermatrix is diagonalized.
///
/// `to_basis` maps coherence coefficients to this basis; `gram` is the
/// Hilbert–Schmidt metric in this basis, so operator overlaps do not depend on
/// the choice.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    pub to_basis: CMatrix,
    pub from_basis: CMatrix,
    pub gram: CMatrix,
}

impl Representation {
    /// Coherence-vector (Gell-Mann) coefficients.
    pub fn coherence() -> Self {
        Representation {
            to_basis: CMatrix::identity(9, 9),
            from_basis: CMatrix::identity(9, 9),
            gram: hilbert_schmidt_gram(),
        }
    }

    /// Column-stacked density-matrix entries.
    pub fn column_stacking() -> Self {
        Self::from_transform(coherence_to_column_stacking()).expect("basis change is invertible")
    }

    /// Any invertible change of basis from coherence coefficients.
    pub fn from_transform(to_basis: CMatrix) -> Option<Self> {
        let from_basis = to_basis.clone().try_inverse()?;
        let gram = from_basis.adjoint() * hilbert_schmidt_gram() * &from_basis;
        Some(Representation { to_basis, from_basis, gram })
    }

    /// Supermatrix in this basis, `T·L·T⁻¹`.
    pub fn supermatrix(&self, coherence: &CMatrix) -> CMatrix {
        &self.to_basis * coherence * &self.from_basis
    }

    /// Vector of a 3×3 operator in this basis.
    pub fn operator_vector(&self, op: &CMatrix) -> CVector {
        &self.to_basis * operator_to_coefficients(op)
    }

    /// Hilbert–Schmidt inner product `a† G b`.
    pub fn inner(&self, a: &CVector, b: &CVector) -> C64 {
        (a.adjoint() * &self.gram * b)[(0, 0)]
    }

    pub fn norm(&self, a: &CVector) -> f64 {
        self.inner(a, a).re.max(0.0).sqrt()
    }
}
