//! Three-level Λ Hamiltonian, Lindblad dissipator and the 9×9 Liouville
//! supermatrix in the coherence-vector (Gell-Mann) basis.
//!
//! A density matrix is expanded as `ρ = w₀·I + Σₐ wₐ λₐ` with the standard
//! Gell-Mann matrices `λ₁…λ₈`; the coherence vector is `w = (w₀, w₁, …, w₈)` with
//! `w₀ = Tr ρ / 3`. The supermatrix acts on `w`: `ẇ = L·w`.

#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::DMatrix;

use crate::matops::{CMatrix, CVector, C64};

/// Number of atomic levels.
pub const LEVELS: usize = 3;
/// Dimension of the coherence-vector space.
pub const DIM: usize = LEVELS * LEVELS;
/// `Tr(Bₐ†Bₐ)` for the basis `B₀ = I, Bₐ = λₐ`.
pub const BASIS_NORMS: [f64; DIM] = [3.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0];

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Failures of the model layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LindbladError {
    #[error("decay rates must be finite and nonnegative")]
    InvalidRates,
    #[error("generic superoperator differs from the fixture at ({row}, {col}): {generic} vs {fixture}")]
    FixtureMismatch { row: usize, col: usize, generic: f64, fixture: f64 },
    #[error("not a density matrix (hermiticity error {hermiticity:e}, trace error {trace:e})")]
    NotAState { hermiticity: f64, trace: f64 },
    #[error("coherence vector must have w0 = 1/3 and finite components")]
    NotCoherence,
}

/// Decay amplitudes: Γ₁ = γ₁₃|1⟩⟨3|, Γ₂ = γ₂₃|2⟩⟨3|, Γ₃ = γ₁₂|1⟩⟨2|, Γ₄ = γ₂₁|2⟩⟨1|.
///
/// Amplitudes enter the Liouvillian squared.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DecayRates {
    pub gamma13: f64,
    pub gamma23: f64,
    pub gamma12: f64,
    pub gamma21: f64,
}

/// Squared-rate combinations appearing in the supermatrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCombos {
    /// (γ₁₃² + γ₂₃²)/2
    pub gamma_plus: f64,
    /// γ₁₃² − γ₂₃²
    pub gamma_minus: f64,
    /// γ₁₂² + γ₂₁²
    pub gamma_prime_plus: f64,
    /// γ₁₂² − γ₂₁²
    pub gamma_prime_minus: f64,
}

impl DecayRates {
    pub const ZERO: DecayRates = DecayRates { gamma13: 0.0, gamma23: 0.0, gamma12: 0.0, gamma21: 0.0 };

    pub fn new(gamma13: f64, gamma23: f64, gamma12: f64, gamma21: f64) -> Result<Self, LindbladError> {
        let r = DecayRates { gamma13, gamma23, gamma12, gamma21 };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<(), LindbladError> {
        if self.as_array().iter().all(|g| g.is_finite() && *g >= 0.0) {
            Ok(())
        } else {
            Err(LindbladError::InvalidRates)
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.gamma13, self.gamma23, self.gamma12, self.gamma21]
    }

    /// All amplitudes multiplied by `factor` (squared rates by `factor²`).
    pub fn scaled(&self, factor: f64) -> Self {
        DecayRates {
            gamma13: self.gamma13 * factor,
            gamma23: self.gamma23 * factor,
            gamma12: self.gamma12 * factor,
            gamma21: self.gamma21 * factor,
        }
    }

    pub fn combos(&self) -> RateCombos {
        let (a, b, c, d) = (self.gamma13.powi(2), self.gamma23.powi(2), self.gamma12.powi(2), self.gamma21.powi(2));
        RateCombos { gamma_plus: (a + b) / 2.0, gamma_minus: a - b, gamma_prime_plus: c + d, gamma_prime_minus: c - d }
    }

    /// Largest squared rate.
    pub fn max_rate(&self) -> f64 {
        self.as_array().iter().map(|g| g * g).fold(0.0, f64::max)
    }
}

/// The 9×9 real supermatrix together with its defining parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    pub matrix: DMatrix<f64>,
    pub g1: f64,
    pub g2: f64,
    pub rates: DecayRates,
}

impl Liouvillian {
    pub fn complex(&self) -> CMatrix {
        crate::matops::to_complex(&self.matrix)
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn unit_op(row: usize, col: usize) -> CMatrix {
    let mut m = CMatrix::zeros(LEVELS, LEVELS);
    m[(row, col)] = c(1.0, 0.0);
    m
}

/// Standard Gell-Mann matrices λ₁…λ₈.
pub fn gell_mann() -> [CMatrix; 8] {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let m = |e: [C64; 9]| CMatrix::from_row_slice(3, 3, &e);
    let s = 1.0 / SQRT_3;
    [
        m([z, one, z, one, z, z, z, z, z]),
        m([z, -i, z, i, z, z, z, z, z]),
        m([one, z, z, z, -one, z, z, z, z]),
        m([z, z, one, z, z, z, one, z, z]),
        m([z, z, -i, z, z, z, i, z, z]),
        m([z, z, z, z, z, one, z, one, z]),
        m([z, z, z, z, z, -i, z, i, z]),
        m([c(s, 0.0), z, z, z, c(s, 0.0), z, z, z, c(-2.0 * s, 0.0)]),
    ]
}

/// Basis `B₀ = I, Bₐ = λₐ` of the coherence-vector expansion.
pub fn coherence_basis() -> [CMatrix; DIM] {
    let gm = gell_mann();
    core::array::from_fn(|k| if k == 0 { CMatrix::identity(3, 3) } else { gm[k - 1].clone() })
}

/// H = g₁(|3⟩⟨1| + |1⟩⟨3|) + g₂(|3⟩⟨2| + |2⟩⟨3|).
pub fn build_hamiltonian(g1: f64, g2: f64) -> CMatrix {
    let mut h = CMatrix::zeros(3, 3);
    h[(2, 0)] = c(g1, 0.0);
    h[(0, 2)] = c(g1, 0.0);
    h[(2, 1)] = c(g2, 0.0);
    h[(1, 2)] = c(g2, 0.0);
    h
}

/// Γ₁ = γ₁₃|1⟩⟨3|, Γ₂ = γ₂₃|2⟩⟨3|, Γ₃ = γ₁₂|1⟩⟨2|, Γ₄ = γ₂₁|2⟩⟨1|.
pub fn lindblad_operators(rates: &DecayRates) -> [CMatrix; 4] {
    [
        unit_op(0, 2) * c(rates.gamma13, 0.0),
        unit_op(1, 2) * c(rates.gamma23, 0.0),
        unit_op(0, 1) * c(rates.gamma12, 0.0),
        unit_op(1, 0) * c(rates.gamma21, 0.0),
    ]
}

/// Right-hand side of the master equation, −i[H, ρ] + Σ (ΓρΓ† − ½{Γ†Γ, ρ}).
pub fn master_equation_rhs(h: &CMatrix, ops: &[CMatrix], rho: &CMatrix) -> CMatrix {
    let mut out = (h * rho - rho * h) * c(0.0, -1.0);
    for g in ops {
        let gd = g.adjoint();
        let gdg = &gd * g;
        out += g * rho * &gd - (&gdg * rho + rho * &gdg) * c(0.5, 0.0);
    }
    out
}

/// Supermatrix from the master equation, `L_ab = Tr(B_a† 𝓛(B_b)) / Tr(B_a† B_a)`.
pub fn generic_superoperator(g1: f64, g2: f64, rates: &DecayRates) -> DMatrix<f64> {
    let h = build_hamiltonian(g1, g2);
    let ops = lindblad_operators(rates);
    let basis = coherence_basis();
    let mut l = DMatrix::zeros(DIM, DIM);
    for (b, bb) in basis.iter().enumerate() {
        let image = master_equation_rhs(&h, &ops, bb);
        let coeffs = operator_to_coefficients(&image);
        for a in 0..DIM {
            l[(a, b)] = coeffs[a].re;
        }
    }
    // Flush rounding noise so structural zeros (the trace row) are exact.
    let noise = 16.0 * f64::EPSILON * l.amax();
    l.apply(|x| {
        if x.abs() <= noise {
            *x = 0.0
        }
    });
    l
}

fn fixture(g1: f64, g2: f64, rates: &DecayRates, corrected: bool) -> DMatrix<f64> {
    let RateCombos { gamma_plus: gp, gamma_minus: gm, gamma_prime_plus, gamma_prime_minus: gpm } = rates.combos();
    let gpp = if corrected { gamma_prime_plus / 2.0 } else { gamma_prime_plus };
    let d12 = rates.gamma12.powi(2) / 2.0;
    let d21 = rates.gamma21.powi(2) / 2.0;
    let (row6, row7) = if corrected { (d21, d12) } else { (d12, d21) };
    #[rustfmt::skip]
    let rows: [[f64; DIM]; DIM] = [
        [0.0; DIM],
        [0.0, -gpp, 0.0, 0.0, 0.0, g2, 0.0, g1, 0.0],
        [0.0, 0.0, -gpp, 0.0, -g2, 0.0, g1, 0.0, 0.0],
        [gm / 2.0 + gpm, 0.0, 0.0, -2.0 * gpp, 0.0, g1, 0.0, -g2, -(gm - gpm) / SQRT_3],
        [0.0, 0.0, g2, 0.0, -gp - d21, 0.0, 0.0, 0.0, 0.0],
        [0.0, -g2, 0.0, -g1, 0.0, -gp - row6, 0.0, 0.0, -SQRT_3 * g1],
        [0.0, 0.0, -g1, 0.0, 0.0, 0.0, -gp - row7, 0.0, 0.0],
        [0.0, -g1, 0.0, g2, 0.0, 0.0, 0.0, -gp - d12, -SQRT_3 * g2],
        [SQRT_3 * gp, 0.0, 0.0, 0.0, 0.0, SQRT_3 * g1, 0.0, SQRT_3 * g2, -2.0 * gp],
    ];
    DMatrix::from_fn(DIM, DIM, |r, col| rows[r][col])
}

/// The supermatrix exactly as printed in the reference table, with the
/// γ′₊ = γ₁₂² + γ₂₁² definition.
pub fn printed_fixture(g1: f64, g2: f64, rates: &DecayRates) -> DMatrix<f64> {
    fixture(g1, g2, rates, false)
}

/// The printed table with the collisional entries that reproduce the master
/// equation: γ′₊/2 on rows 2–4 and the damping of rows 6 and 7 exchanged.
pub fn corrected_fixture(g1: f64, g2: f64, rates: &DecayRates) -> DMatrix<f64> {
    fixture(g1, g2, rates, true)
}

/// Elementwise tolerance of the fixture check.
pub const FIXTURE_TOL: f64 = 1e-12;

/// Compare a supermatrix with a fixture elementwise.
pub fn check_against(generic: &DMatrix<f64>, fixture: &DMatrix<f64>, tol: f64) -> Result<(), LindbladError> {
    for row in 0..DIM {
        for col in 0..DIM {
            let (a, b) = (generic[(row, col)], fixture[(row, col)]);
            if !((a - b).abs() <= tol * b.abs().max(1.0)) {
                return Err(LindbladError::FixtureMismatch { row: row + 1, col: col + 1, generic: a, fixture: b });
            }
        }
    }
    Ok(())
}

/// Build the supermatrix from the master equation and validate it against the
/// corrected fixture.
pub fn build_superoperator(g1: f64, g2: f64, rates: &DecayRates) -> Result<Liouvillian, LindbladError> {
    rates.validate()?;
    let matrix = generic_superoperator(g1, g2, rates);
    check_against(&matrix, &corrected_fixture(g1, g2, rates), FIXTURE_TOL)?;
    Ok(Liouvillian { matrix, g1, g2, rates: *rates })
}

/// Supermatrix without the fixture check, used on hot paths after validation.
pub fn superoperator_unchecked(g1: f64, g2: f64, rates: &DecayRates) -> DMatrix<f64> {
    corrected_fixture(g1, g2, rates)
}

/// Complex coefficients `wₐ = Tr(Bₐ A)/Tr(Bₐ²)` of an arbitrary 3×3 operator.
pub fn operator_to_coefficients(a: &CMatrix) -> CVector {
    let basis = coherence_basis();
    CVector::from_fn(DIM, |k, _| (basis[k].adjoint() * a).trace() / BASIS_NORMS[k])
}

/// Inverse of [`operator_to_coefficients`].
pub fn coefficients_to_operator(w: &CVector) -> CMatrix {
    let basis = coherence_basis();
    let mut out = CMatrix::zeros(3, 3);
    for (k, b) in basis.iter().enumerate() {
        out += b * w[k];
    }
    out
}

/// Hilbert–Schmidt metric in coefficient space, `diag(3, 2, …, 2)`.
pub fn hilbert_schmidt_gram() -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_fn(DIM, |k, _| c(BASIS_NORMS[k], 0.0)))
}

/// Columns are the column-stacked basis operators: maps coefficients to `vec(ρ)`.
pub fn coherence_to_column_stacking() -> CMatrix {
    let basis = coherence_basis();
    CMatrix::from_fn(DIM, DIM, |r, k| basis[k][(r % LEVELS, r / LEVELS)])
}

/// Real coherence vector of a density matrix, first component fixed at 1/3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceVector {
    components: [f64; DIM],
}

impl CoherenceVector {
    pub fn new(components: [f64; DIM]) -> Result<Self, LindbladError> {
        if (components[0] - 1.0 / 3.0).abs() > 1e-12 || components.iter().any(|x| !x.is_finite()) {
            return Err(LindbladError::NotCoherence);
        }
        Ok(CoherenceVector { components })
    }

    /// The maximally mixed state.
    pub fn identity_state() -> Self {
        let mut components = [0.0; DIM];
        components[0] = 1.0 / 3.0;
        CoherenceVector { components }
    }

    /// Pure population in `level` (0-based).
    pub fn level(level: usize) -> Self {
        density_to_coherence(&unit_op(level, level)).expect("projector is a state")
    }

    pub fn components(&self) -> &[f64; DIM] {
        &self.components
    }

    /// Diagonal of the density matrix.
    pub fn populations(&self) -> [f64; LEVELS] {
        populations(&self.components)
    }
}

/// Diagonal of `ρ` from raw coherence components.
pub fn populations(w: &[f64; DIM]) -> [f64; LEVELS] {
    let s = w[8] / SQRT_3;
    [w[0] + w[3] + s, w[0] - w[3] + s, w[0] - 2.0 * s]
}

/// ρ ↦ w; rejects non-Hermitian or non-unit-trace input (tolerance 1e-12).
pub fn density_to_coherence(rho: &CMatrix) -> Result<CoherenceVector, LindbladError> {
    let hermiticity = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let trace = (rho.trace() - c(1.0, 0.0)).norm();
    if rho.shape() != (LEVELS, LEVELS) || !(hermiticity <= 1e-12) || !(trace <= 1e-12) {
        return Err(LindbladError::NotAState { hermiticity, trace });
    }
    let w = operator_to_coefficients(rho);
    let mut components: [f64; DIM] = core::array::from_fn(|k| w[k].re);
    components[0] = 1.0 / 3.0;
    Ok(CoherenceVector { components })
}

/// w ↦ ρ (Hermitian, unit trace; positivity not checked).
pub fn coherence_to_density(v: &CoherenceVector) -> CMatrix {
    let w = CVector::from_fn(DIM, |k, _| c(v.components[k], 0.0));
    coefficients_to_operator(&w)
}

/// Bloch-style components `v₁…v₈` of `w = (1/3)[1, √3 v₁, …, √3 v₈]`.
pub fn bloch_components(v: &CoherenceVector) -> [f64; 8] {
    core::array::from_fn(|k| v.components[k + 1] * SQRT_3)
}
