//! Pauli-basis coordinates of a two-qubit state.
//!
//! Any two-qubit operator expands as
//! `ρ = ¼ (I⊗I + Σ xᵢ σᵢ⊗I + Σ yⱼ I⊗σⱼ + Σ Tᵢⱼ σᵢ⊗σⱼ)`. In the normalised
//! product basis `σₘ⊗σₙ / 2` the coefficient matrix is
//! `C = ½ [[1, yᵀ], [x, T]]`, so that `Tr(C Cᵀ) = ¼ (1 + |x|² + |y|² + ‖T‖²)`.

use nalgebra::{Matrix3, Matrix4, Vector3};
use num_complex::Complex64;

use crate::qstate::{CMatrix2, CMatrix4, DensityMatrix};

/// Tolerance for the canonical zero pattern.
pub const CANONICAL_TOLERANCE: f64 = 1e-10;

/// `σ₀ = I, σ₁ = X, σ₂ = Y, σ₃ = Z`.
pub fn pauli(k: usize) -> CMatrix2 {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match k {
        0 => CMatrix2::new(l, o, o, l),
        1 => CMatrix2::new(o, l, l, o),
        2 => CMatrix2::new(o, -i, i, o),
        3 => CMatrix2::new(l, o, o, -l),
        _ => panic!("Pauli index {k} out of range 0..4"),
    }
}

fn pauli_product(m: usize, n: usize) -> CMatrix4 {
    pauli(m).kronecker(&pauli(n))
}

/// `Tr(ρ σₘ⊗σₙ)` as a complex number.
fn expectation(rho: &CMatrix4, m: usize, n: usize) -> Complex64 {
    let p = pauli_product(m, n);
    (0..4)
        .flat_map(|k| (0..4).map(move |l| (k, l)))
        .map(|(k, l)| rho[(k, l)] * p[(l, k)])
        .sum()
}

/// Bloch vectors `x` (qubit A), `y` (qubit B) and correlation tensor `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationData {
    pub x: Vector3<f64>,
    pub y: Vector3<f64>,
    pub t: Matrix3<f64>,
}

impl CorrelationData {
    pub fn new(x: Vector3<f64>, y: Vector3<f64>, t: Matrix3<f64>) -> Self {
        Self { x, y, t }
    }

    /// All-zero correlations, i.e. the data of `I/4`.
    pub fn zero() -> Self {
        Self::new(Vector3::zeros(), Vector3::zeros(), Matrix3::zeros())
    }

    /// The 4×4 real matrix `½ [[1, yᵀ], [x, T]]`.
    pub fn c_matrix(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|m, n| {
            0.5 * match (m, n) {
                (0, 0) => 1.0,
                (0, n) => self.y[n - 1],
                (m, 0) => self.x[m - 1],
                (m, n) => self.t[(m - 1, n - 1)],
            }
        })
    }

    /// Data of the state with the qubits exchanged: `(y, x, Tᵀ)`.
    pub fn swapped(&self) -> Self {
        Self::new(self.y, self.x, self.t.transpose())
    }

    /// Data after local rotations `R_A`, `R_B`: `(R_A x, R_B y, R_A T R_Bᵀ)`.
    pub fn rotated(&self, r_a: &Matrix3<f64>, r_b: &Matrix3<f64>) -> Self {
        Self::new(r_a * self.x, r_b * self.y, r_a * self.t * r_b.transpose())
    }

    /// Largest magnitude among the entries that must vanish in canonical
    /// form: `x₂, y₂, T₁₂, T₂₁, T₂₃, T₃₂` (1-based Bloch components).
    pub fn canonical_violation(&self) -> f64 {
        [
            self.x[1],
            self.y[1],
            self.t[(0, 1)],
            self.t[(1, 0)],
            self.t[(1, 2)],
            self.t[(2, 1)],
        ]
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max)
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical_violation() <= CANONICAL_TOLERANCE
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.x - other.x)
            .amax()
            .max((self.y - other.y).amax())
            .max((self.t - other.t).amax())
    }
}

/// Expands `rho` in the Pauli product basis. Imaginary parts of the traces
/// (zero for Hermitian input up to rounding) are dropped.
pub fn pauli_decompose(rho: &DensityMatrix) -> CorrelationData {
    let m = rho.entries();
    let x = Vector3::from_fn(|i, _| expectation(m, i + 1, 0).re);
    let y = Vector3::from_fn(|j, _| expectation(m, 0, j + 1).re);
    let t = Matrix3::from_fn(|i, j| expectation(m, i + 1, j + 1).re);
    CorrelationData { x, y, t }
}

/// Inverse of [`pauli_decompose`]. The result is Hermitian with unit trace
/// but need not be positive.
///
/// # Panics
///
/// If any entry of `corr` is not finite.
pub fn reconstruct_density(corr: &CorrelationData) -> DensityMatrix {
    let finite = corr
        .x
        .iter()
        .chain(corr.y.iter())
        .chain(corr.t.iter())
        .all(|v| v.is_finite());
    assert!(finite, "correlation data must be finite");
    let mut m = CMatrix4::zeros();
    for a in 0..4 {
        for b in 0..4 {
            let coef = match (a, b) {
                (0, 0) => 1.0,
                (0, b) => corr.y[b - 1],
                (a, 0) => corr.x[a - 1],
                (a, b) => corr.t[(a - 1, b - 1)],
            };
            if coef != 0.0 {
                m += pauli_product(a, b) * Complex64::new(0.25 * coef, 0.0);
            }
        }
    }
    DensityMatrix::from_trusted(m)
}

/// `Tr(C Cᵀ) = ¼ (1 + |x|² + |y|² + ‖T‖²_F)`.
pub fn trace_cc(corr: &CorrelationData) -> f64 {
    0.25 * (1.0 + corr.x.norm_squared() + corr.y.norm_squared() + corr.t.norm_squared())
}

/// The SO(3) rotation `Rᵢⱼ = ½ Tr(σᵢ U σⱼ U†)` induced on Bloch vectors by
/// conjugation with the qubit unitary `U`.
pub fn bloch_rotation(u: &CMatrix2) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| {
        let prod = pauli(i + 1) * u * pauli(j + 1) * u.adjoint();
        0.5 * prod.trace().re
    })
}
