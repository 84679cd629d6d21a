//! The local-measurement functional and its exact maximisation over `a`.
//!
//! For projective measurements along unit directions `a` (qubit A) and `b`
//! (qubit B), the measured overlap is `Tr(A C Bᵀ B Cᵀ Aᵀ) = f(a, b) / 4` with
//!
//! ```text
//! f(a, b) = 1 + (y·b)² + (x·a)² + (a·T b)²
//!         = 1 + (y·b)² + aᵀ (x xᵀ + (T b)(T b)ᵀ) a.
//! ```
//!
//! For fixed `b` the `a`-dependence is a quadratic form of rank at most two,
//! whose maximum over the unit sphere is its top eigenvalue, available in
//! closed form.

use nalgebra::Vector3;
use thiserror::Error;

use crate::pauli::{CorrelationData, CANONICAL_TOLERANCE};

/// How far `|v|` may stray from one for `v` to count as a direction.
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// Components below this magnitude are treated as zero when choosing the
/// sign representative of an antipodal pair.
const SIGN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObjectiveError {
    #[error("measurement direction has norm {norm}, expected 1")]
    NonUnitDirection { norm: f64 },
    #[error("correlation data is not in canonical form (largest forbidden entry {violation:.3e})")]
    NotCanonicalForm { violation: f64 },
}

/// A unit vector on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction(Vector3<f64>);

impl Direction {
    pub fn new(v: Vector3<f64>) -> Result<Self, ObjectiveError> {
        let norm = v.norm();
        if (norm - 1.0).abs() <= UNIT_TOLERANCE {
            Ok(Self(v))
        } else {
            Err(ObjectiveError::NonUnitDirection { norm })
        }
    }

    /// `v / |v|`, or `None` for a zero or non-finite vector.
    pub fn normalize(v: Vector3<f64>) -> Option<Self> {
        let n = v.norm();
        (n > 0.0 && n.is_finite()).then(|| Self(v / n))
    }

    /// `(cos φ sin θ, sin φ sin θ, cos θ)`.
    pub fn from_angles(azimuth: f64, polar: f64) -> Self {
        let (sp, cp) = azimuth.sin_cos();
        let (st, ct) = polar.sin_cos();
        Self(Vector3::new(cp * st, sp * st, ct))
    }

    pub fn x() -> Self {
        Self(Vector3::x())
    }

    pub fn y() -> Self {
        Self(Vector3::y())
    }

    pub fn z() -> Self {
        Self(Vector3::z())
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }

    /// `(azimuth, polar)` with azimuth in `(-π, π]` and polar in `[0, π]`.
    pub fn angles(&self) -> (f64, f64) {
        let v = self.0;
        (v.y.atan2(v.x), v.z.clamp(-1.0, 1.0).acos())
    }

    pub fn flipped(self) -> Self {
        Self(-self.0)
    }

    /// The member of `{v, -v}` whose first non-negligible component, in the
    /// order z, x, y, is positive.
    pub fn canonical_sign(self) -> Self {
        let v = self.0;
        let lead = [v.z, v.x, v.y].into_iter().find(|c| c.abs() > SIGN_EPS);
        match lead {
            Some(c) if c < 0.0 => self.flipped(),
            _ => self,
        }
    }
}

impl std::ops::Deref for Direction {
    type Target = Vector3<f64>;

    fn deref(&self) -> &Vector3<f64> {
        &self.0
    }
}

/// Measurement directions for qubit A (`a`) and qubit B (`b`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementDirections {
    pub a: Direction,
    pub b: Direction,
}

impl MeasurementDirections {
    pub fn new(a: Vector3<f64>, b: Vector3<f64>) -> Result<Self, ObjectiveError> {
        Ok(Self {
            a: Direction::new(a)?,
            b: Direction::new(b)?,
        })
    }

    /// `b` from `(θ1, θ2)`, `a` from `(θ3, θ4)`, each as (azimuth, polar).
    pub fn from_angles(theta1: f64, theta2: f64, theta3: f64, theta4: f64) -> Self {
        Self {
            a: Direction::from_angles(theta3, theta4),
            b: Direction::from_angles(theta1, theta2),
        }
    }

    pub fn canonical_sign(self) -> Self {
        Self {
            a: self.a.canonical_sign(),
            b: self.b.canonical_sign(),
        }
    }
}

/// `f(a, b) = 1 + (y·b)² + (x·a)² + (a·T b)²`.
pub fn objective_f(corr: &CorrelationData, dirs: &MeasurementDirections) -> f64 {
    let (a, b) = (dirs.a.vector(), dirs.b.vector());
    let yb = corr.y.dot(b);
    let xa = corr.x.dot(a);
    let atb = a.dot(&(corr.t * b));
    1.0 + yb * yb + xa * xa + atb * atb
}

/// Coefficients of `f(a, ·)` for a fixed `a`, as a quadratic in `b` with the
/// `b₃²` term eliminated through `b₁² + b₂² + b₃² = 1`:
///
/// `f = M0 + M11 b₁² + M22 b₂² + M12 b₁b₂ + M13 b₁b₃ + M23 b₂b₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveCoefficients {
    pub m0: f64,
    pub m11: f64,
    pub m12: f64,
    pub m13: f64,
    pub m22: f64,
    pub m23: f64,
}

impl ObjectiveCoefficients {
    pub fn evaluate(&self, b: &Vector3<f64>) -> f64 {
        self.m0
            + self.m11 * b.x * b.x
            + self.m22 * b.y * b.y
            + self.m12 * b.x * b.y
            + self.m13 * b.x * b.z
            + self.m23 * b.y * b.z
    }
}

/// Expands `f(a, b)` in the components of `b` for canonical-form data.
///
/// With `w = Tᵀa` the `b`-dependent part is `bᵀ (y yᵀ + w wᵀ) b`; the
/// coefficients follow from that symmetric matrix `S` directly.
pub fn objective_coefficients(
    corr: &CorrelationData,
    a: &Direction,
) -> Result<ObjectiveCoefficients, ObjectiveError> {
    let violation = corr.canonical_violation();
    if violation > CANONICAL_TOLERANCE {
        return Err(ObjectiveError::NotCanonicalForm { violation });
    }
    let xa = corr.x.dot(a);
    let w = corr.t.transpose() * a.vector();
    let s = corr.y * corr.y.transpose() + w * w.transpose();
    Ok(ObjectiveCoefficients {
        m0: 1.0 + xa * xa + s[(2, 2)],
        m11: s[(0, 0)] - s[(2, 2)],
        m22: s[(1, 1)] - s[(2, 2)],
        m12: 2.0 * s[(0, 1)],
        m13: 2.0 * s[(0, 2)],
        m23: 2.0 * s[(1, 2)],
    })
}

/// Top eigenpair of `u uᵀ + v vᵀ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rank2Max {
    pub value: f64,
    pub vector: Direction,
}

/// Largest eigenvalue of `u uᵀ + v vᵀ` and a unit eigenvector for it.
///
/// The eigenvector lies in `span{u, v}`; its coordinates there are an
/// eigenvector of the Gram matrix `[[u·u, u·v], [u·v, v·v]]`, which shares
/// the nonzero spectrum. When the top eigenvalue is degenerate
/// (`|u| = |v|`, `u ⊥ v`) the direction of `u + v` is returned, and when
/// both vectors vanish the eigenvalue is zero and `ẑ` is returned.
pub fn rank2_lambda_max(u: &Vector3<f64>, v: &Vector3<f64>) -> Rank2Max {
    let uu = u.norm_squared();
    let vv = v.norm_squared();
    let uv = u.dot(v);
    let value = 0.5 * (uu + vv + ((uu - vv).powi(2) + 4.0 * uv * uv).sqrt());

    let scale = uu + vv;
    if scale == 0.0 {
        return Rank2Max {
            value: 0.0,
            vector: Direction::z(),
        };
    }
    let tiny = 1e-14 * scale;
    let vector = if uv.abs() <= tiny && (uu - vv).abs() <= tiny {
        Direction::normalize(u + v)
            .or_else(|| Direction::normalize(*u))
            .unwrap_or_else(Direction::z)
    } else {
        // Two algebraically equivalent Gram eigenvectors; keep the better
        // conditioned one.
        let e1 = u * uv + v * (value - uu);
        let e2 = u * (value - vv) + v * uv;
        let e = if e1.norm_squared() >= e2.norm_squared() {
            e1
        } else {
            e2
        };
        Direction::normalize(e)
            .or_else(|| Direction::normalize(if uu >= vv { *u } else { *v }))
            .unwrap_or_else(Direction::z)
    };
    Rank2Max { value, vector }
}

/// Exact maximum of `f` over `a` for fixed `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AReduction {
    /// `g(b) = 1 + (y·b)² + λ_max(x xᵀ + (T b)(T b)ᵀ)`.
    pub value: f64,
    pub a: Direction,
}

pub fn reduced_over_a(corr: &CorrelationData, b: &Direction) -> AReduction {
    let yb = corr.y.dot(b);
    let tb = corr.t * b.vector();
    let top = rank2_lambda_max(&corr.x, &tb);
    AReduction {
        value: 1.0 + yb * yb + top.value,
        a: top.vector,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::pauli_decompose;
    use crate::qstate::{generate_state, StateFamily, StateFamilySpec};
    use nalgebra::Matrix3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;
    use std::f64::consts::PI;

    fn random_vec(rng: &mut ChaCha20Rng) -> Vector3<f64> {
        Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0))
    }

    fn random_direction(rng: &mut ChaCha20Rng) -> Direction {
        loop {
            if let Some(d) = Direction::normalize(random_vec(rng)) {
                return d;
            }
        }
    }

    fn bell(c3: f64) -> CorrelationData {
        pauli_decompose(&generate_state(&StateFamilySpec::bell_mixture(c3)).unwrap())
    }

    /// Largest root of the characteristic polynomial of a symmetric 3×3
    /// matrix, by bisection above the Gershgorin bound's lower part.
    fn char_poly_top_root(m: &Matrix3<f64>) -> f64 {
        let p = |l: f64| (m - Matrix3::identity() * l).determinant();
        let hi0 = (0..3)
            .map(|i| (0..3).map(|j| m[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
            + 1.0;
        // p(l) < 0 for l above the largest root; walk down to the first sign change.
        let steps = 4000;
        let mut hi = hi0;
        let mut lo = hi0;
        for k in 1..=steps {
            let l = hi0 - (k as f64) * (2.0 * hi0) / steps as f64;
            if p(l) >= 0.0 {
                lo = l;
                break;
            }
            hi = l;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if p(mid) >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn direction_validation() {
        assert!(Direction::new(Vector3::new(1.0, 1.0, 0.0)).is_err());
        assert!(Direction::new(Vector3::new(0.6, 0.8, 0.0)).is_ok());
        assert!(MeasurementDirections::new(Vector3::z(), Vector3::new(0.0, 0.0, 2.0)).is_err());
        let d = Direction::from_angles(0.3, 1.2);
        let (az, pol) = d.angles();
        assert!((az - 0.3).abs() < 1e-14 && (pol - 1.2).abs() < 1e-14);
    }

    #[test]
    fn canonical_sign_prefers_positive_z_then_x() {
        let d = Direction::new(Vector3::new(0.6, 0.0, -0.8)).unwrap();
        assert_eq!(d.canonical_sign().vector(), &Vector3::new(-0.6, 0.0, 0.8));
        let d = Direction::new(Vector3::new(-0.6, 0.8, 0.0)).unwrap();
        assert_eq!(d.canonical_sign().vector(), &Vector3::new(0.6, -0.8, 0.0));
        assert_eq!(Direction::y().flipped().canonical_sign(), Direction::y());
    }

    #[test]
    fn objective_examples() {
        let any = MeasurementDirections::from_angles(0.4, 1.0, 2.0, 0.3);
        assert_eq!(objective_f(&CorrelationData::zero(), &any), 1.0);
        for c3 in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            let corr = bell(c3);
            let zz = MeasurementDirections::new(Vector3::z(), Vector3::z()).unwrap();
            let yy = MeasurementDirections::new(Vector3::y(), Vector3::y()).unwrap();
            assert!((objective_f(&corr, &zz) - (1.0 + c3 * c3)).abs() < 1e-15);
            assert!((objective_f(&corr, &yy) - 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn objective_bounds() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for seed in 0..50 {
            let corr = pauli_decompose(&generate_state(&StateFamilySpec::random(seed)).unwrap());
            let upper = 1.0 + corr.x.norm_squared() + corr.y.norm_squared() + corr.t.norm_squared();
            for _ in 0..20 {
                let dirs = MeasurementDirections {
                    a: random_direction(&mut rng),
                    b: random_direction(&mut rng),
                };
                let f = objective_f(&corr, &dirs);
                assert!((1.0..=upper + 1e-12).contains(&f));
                assert!(f <= 4.0 + 1e-12);
            }
        }
    }

    fn b_grid() -> Vec<Vector3<f64>> {
        let mut out = Vec::new();
        for i in 0..20 {
            for j in 0..20 {
                let az = 2.0 * PI * i as f64 / 20.0;
                let pol = PI * j as f64 / 19.0;
                out.push(*Direction::from_angles(az, pol).vector());
            }
        }
        out
    }

    #[test]
    fn bell_coefficients() {
        for c3 in [-0.8, 0.0, 0.5, 1.0] {
            let corr = bell(c3);
            let m = objective_coefficients(&corr, &Direction::z()).unwrap();
            assert_eq!((m.m12, m.m13, m.m23), (0.0, 0.0, 0.0));
            assert!((m.m0 - (1.0 + c3 * c3)).abs() < 1e-15);
            assert!((m.m11 + c3 * c3).abs() < 1e-15);
            assert!((m.m22 + c3 * c3).abs() < 1e-15);
            for b in b_grid() {
                let expected = 1.0 + c3 * c3 * b.z * b.z;
                assert!((m.evaluate(&b) - expected).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn zero_correlations_give_constant_coefficients() {
        let m = objective_coefficients(&CorrelationData::zero(), &Direction::x()).unwrap();
        assert_eq!(
            m,
            ObjectiveCoefficients {
                m0: 1.0,
                m11: 0.0,
                m12: 0.0,
                m13: 0.0,
                m22: 0.0,
                m23: 0.0
            }
        );
    }

    fn random_canonical(rng: &mut ChaCha20Rng) -> CorrelationData {
        let mut x = random_vec(rng);
        let mut y = random_vec(rng);
        let mut t = Matrix3::from_fn(|_, _| rng.random_range(-1.0..1.0));
        x[1] = 0.0;
        y[1] = 0.0;
        for (i, j) in [(0, 1), (1, 0), (1, 2), (2, 1)] {
            t[(i, j)] = 0.0;
        }
        CorrelationData::new(x, y, t)
    }

    #[test]
    fn coefficients_reproduce_objective_on_grid() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        for _ in 0..50 {
            let corr = random_canonical(&mut rng);
            let a = random_direction(&mut rng);
            let m = objective_coefficients(&corr, &a).unwrap();
            for b in b_grid() {
                let dirs = MeasurementDirections {
                    a,
                    b: Direction::normalize(b).unwrap(),
                };
                assert!((m.evaluate(&b) - objective_f(&corr, &dirs)).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn coefficients_require_canonical_form() {
        let corr = pauli_decompose(&generate_state(&StateFamilySpec::random(1)).unwrap());
        assert!(matches!(
            objective_coefficients(&corr, &Direction::z()),
            Err(ObjectiveError::NotCanonicalForm { .. })
        ));
    }

    #[test]
    fn rank2_special_cases() {
        let v = Vector3::new(0.3, -0.4, 1.2);
        let r = rank2_lambda_max(&Vector3::zeros(), &v);
        assert!((r.value - v.norm_squared()).abs() < 1e-15);
        assert!((r.vector.dot(&v).abs() - v.norm()).abs() < 1e-14);

        let u = Vector3::new(2.0, 0.0, 0.0);
        let w = Vector3::new(0.0, 1.0, 1.0);
        assert!((rank2_lambda_max(&u, &w).value - 4.0).abs() < 1e-15);
        assert!((rank2_lambda_max(&w, &u).value - 4.0).abs() < 1e-15);

        let r = rank2_lambda_max(&w, &w);
        assert!((r.value - 2.0 * w.norm_squared()).abs() < 1e-15);

        let r = rank2_lambda_max(&Vector3::x(), &Vector3::y());
        assert_eq!(r.value, 1.0);
        assert!((r.vector.vector() - Vector3::new(1.0, 1.0, 0.0) / 2f64.sqrt()).norm() < 1e-15);

        let r = rank2_lambda_max(&Vector3::zeros(), &Vector3::zeros());
        assert_eq!((r.value, r.vector), (0.0, Direction::z()));
    }

    #[test]
    fn rank2_matches_characteristic_polynomial() {
        let mut rng = ChaCha20Rng::seed_from_u64(1000);
        for _ in 0..1000 {
            let (u, v) = (random_vec(&mut rng), random_vec(&mut rng));
            let m = u * u.transpose() + v * v.transpose();
            let r = rank2_lambda_max(&u, &v);
            assert!((r.value - char_poly_top_root(&m)).abs() <= 1e-12, "{u} {v}");
            let rayleigh = r.vector.dot(&(m * r.vector.vector()));
            assert!((rayleigh - r.value).abs() <= 1e-12);
        }
    }

    #[test]
    fn reduced_examples() {
        for c3 in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            let corr = bell(c3);
            let z = reduced_over_a(&corr, &Direction::z());
            assert!((z.value - (1.0 + c3 * c3)).abs() < 1e-15);
            let y = reduced_over_a(&corr, &Direction::y());
            assert!((y.value - 2.0).abs() < 1e-15);
        }
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for _ in 0..10 {
            let b = random_direction(&mut rng);
            assert_eq!(reduced_over_a(&CorrelationData::zero(), &b).value, 1.0);
        }
    }

    #[test]
    fn reduction_dominates_and_is_attained() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        for seed in 0..50 {
            let corr = pauli_decompose(&generate_state(&StateFamilySpec::random(seed)).unwrap());
            for _ in 0..10 {
                let b = random_direction(&mut rng);
                let red = reduced_over_a(&corr, &b);
                let at = objective_f(&corr, &MeasurementDirections { a: red.a, b });
                assert!((red.value - at).abs() <= 1e-12);
                for _ in 0..20 {
                    let a = random_direction(&mut rng);
                    assert!(
                        objective_f(&corr, &MeasurementDirections { a, b }) <= red.value + 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn reduction_is_rotation_covariant() {
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        for seed in 0..30 {
            let corr = pauli_decompose(&generate_state(&StateFamilySpec::random(seed)).unwrap());
            let ra = crate::pauli::bloch_rotation(&crate::qstate::random_su2(&mut rng));
            let rb = crate::pauli::bloch_rotation(&crate::qstate::random_su2(&mut rng));
            let rotated = corr.rotated(&ra, &rb);
            let b = random_direction(&mut rng);
            let rb_b = Direction::normalize(rb * b.vector()).unwrap();
            let lhs = reduced_over_a(&rotated, &rb_b).value;
            let rhs = reduced_over_a(&corr, &b).value;
            assert!((lhs - rhs).abs() <= 1e-10);
        }
    }

    #[test]
    fn phi_plus_reduction_is_flat() {
        let corr = pauli_decompose(
            &generate_state(&StateFamilySpec::new(StateFamily::BellPhiPlus)).unwrap(),
        );
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        for _ in 0..20 {
            let b = random_direction(&mut rng);
            assert!((reduced_over_a(&corr, &b).value - 2.0).abs() < 1e-14);
        }
    }
}
