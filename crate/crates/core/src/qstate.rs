//! Two-qubit density matrices: validation, generation of standard families,
//! local-unitary conjugation and subsystem exchange.
//!
//! Basis ordering is `|a b⟩` with index `2·a + b`, i.e. `|00⟩, |01⟩, |10⟩, |11⟩`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type CMatrix2 = Matrix2<Complex64>;
pub type CMatrix4 = Matrix4<Complex64>;

/// Absolute tolerance for Hermiticity, unit trace, positivity and unitarity.
pub const STATE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian: max |m_ij - conj(m_ji)| = {deviation:.3e}")]
    NonHermitian { deviation: f64 },
    #[error("trace is {trace} (|Tr - 1| = {deviation:.3e})")]
    TraceNotOne { trace: f64, deviation: f64 },
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue}")]
    NotPositive { min_eigenvalue: f64 },
    #[error("unknown state family '{0}'")]
    UnknownFamily(String),
    #[error("family {family} has no parameter '{name}'")]
    UnknownParameter { family: StateFamily, name: String },
    #[error("family {family} requires parameter '{name}'")]
    MissingParameter {
        family: StateFamily,
        name: &'static str,
    },
    #[error("parameter {name} = {value} is out of range ({range})")]
    ParameterOutOfRange {
        name: String,
        value: f64,
        range: &'static str,
    },
    #[error("probabilities sum to {sum}, not one")]
    ProbabilitiesNotNormalized { sum: f64 },
    #[error("{which} is not unitary: max |U U^dag - I| = {deviation:.3e}")]
    NotUnitary { which: &'static str, deviation: f64 },
}

/// Failure to read or write a state file.
#[derive(Debug, Error)]
pub enum StateFileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed state file: {0}")]
    Json(#[from] serde_json::Error),
}

/// A validated two-qubit density matrix.
///
/// Hermiticity and unit trace always hold to [`STATE_TOLERANCE`]. Positivity
/// holds when [`is_physical`](Self::is_physical) is true; formal states
/// (accepted with `allow_nonphysical`) carry a warning instead.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix4,
    physical: bool,
    warning: Option<String>,
}

impl DensityMatrix {
    pub fn entries(&self) -> &CMatrix4 {
        &self.entries
    }

    pub fn is_physical(&self) -> bool {
        self.physical
    }

    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }

    /// `I/4`.
    pub fn maximally_mixed() -> Self {
        Self {
            entries: CMatrix4::identity().map(|z| z * 0.25),
            physical: true,
            warning: None,
        }
    }

    /// Eigenvalues in ascending order.
    pub fn spectrum(&self) -> [f64; 4] {
        hermitian_spectrum(&self.entries)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum()[0]
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        max_abs(&(self.entries - other.entries))
    }

    pub fn to_state_file(&self) -> StateFile {
        StateFile::from_matrix(&self.entries)
    }

    /// Builds a state whose Hermiticity and trace hold by construction, only
    /// classifying positivity.
    pub(crate) fn from_trusted(entries: CMatrix4) -> Self {
        let min_eigenvalue = hermitian_spectrum(&entries)[0];
        if min_eigenvalue >= -STATE_TOLERANCE {
            Self {
                entries,
                physical: true,
                warning: None,
            }
        } else {
            Self {
                entries,
                physical: false,
                warning: Some(nonphysical_warning(min_eigenvalue)),
            }
        }
    }
}

fn nonphysical_warning(min_eigenvalue: f64) -> String {
    format!(
        "state is not positive semidefinite (min eigenvalue {min_eigenvalue}); processed formally"
    )
}

/// Deviation measures of an arbitrary 4×4 complex matrix from a density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub hermiticity_deviation: f64,
    pub trace: f64,
    pub trace_deviation: f64,
    /// Smallest eigenvalue of the Hermitian part `(m + m†)/2`.
    pub min_eigenvalue: f64,
}

impl Diagnostics {
    pub fn is_physical(&self) -> bool {
        self.hermiticity_deviation <= STATE_TOLERANCE
            && self.trace_deviation <= STATE_TOLERANCE
            && self.min_eigenvalue >= -STATE_TOLERANCE
    }
}

pub fn diagnose(m: &CMatrix4) -> Diagnostics {
    let hermiticity_deviation = max_abs(&(m - m.adjoint()));
    let trace = m.trace().re;
    let hermitian_part = (m + m.adjoint()).map(|z| z * 0.5);
    Diagnostics {
        hermiticity_deviation,
        trace,
        trace_deviation: (trace - 1.0).abs().max(m.trace().im.abs()),
        min_eigenvalue: hermitian_spectrum(&hermitian_part)[0],
    }
}

/// Checks that `m` is a density matrix.
///
/// With `allow_nonphysical` a matrix with negative eigenvalues is still
/// accepted, flagged as non-physical with a warning attached.
pub fn validate_density(
    m: &CMatrix4,
    allow_nonphysical: bool,
) -> Result<DensityMatrix, StateError> {
    for row in 0..4 {
        for col in 0..4 {
            let z = m[(row, col)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(StateError::NonFinite { row, col });
            }
        }
    }
    let d = diagnose(m);
    if d.hermiticity_deviation > STATE_TOLERANCE {
        return Err(StateError::NonHermitian {
            deviation: d.hermiticity_deviation,
        });
    }
    if d.trace_deviation > STATE_TOLERANCE {
        return Err(StateError::TraceNotOne {
            trace: d.trace,
            deviation: d.trace_deviation,
        });
    }
    if d.min_eigenvalue < -STATE_TOLERANCE {
        if !allow_nonphysical {
            return Err(StateError::NotPositive {
                min_eigenvalue: d.min_eigenvalue,
            });
        }
        return Ok(DensityMatrix {
            entries: *m,
            physical: false,
            warning: Some(nonphysical_warning(d.min_eigenvalue)),
        });
    }
    Ok(DensityMatrix {
        entries: *m,
        physical: true,
        warning: None,
    })
}

pub(crate) fn max_abs<const R: usize, const C: usize>(
    m: &nalgebra::SMatrix<Complex64, R, C>,
) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hermitian_spectrum(m: &CMatrix4) -> [f64; 4] {
    let ev = m.symmetric_eigenvalues();
    let mut out = [ev[0], ev[1], ev[2], ev[3]];
    out.sort_by(f64::total_cmp);
    out
}

// ---------------------------------------------------------------------------
// State families

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateFamily {
    /// `¼(I⊗I − σy⊗σy + C3 σz⊗σz)`; positive only at `C3 = 0`.
    BellMixture,
    /// `p |Ψ⁻⟩⟨Ψ⁻| + (1 − p) I/4`.
    Werner,
    /// `Σ p_ij |i⟩⟨i| ⊗ |j⟩⟨j|` in the computational basis.
    ClassicalClassical,
    /// `|ψ_a⟩⟨ψ_a| ⊗ |ψ_b⟩⟨ψ_b|` from Bloch angles.
    PureProduct,
    /// `|Φ⁺⟩⟨Φ⁺|` with `|Φ⁺⟩ = (|00⟩ + |11⟩)/√2`.
    BellPhiPlus,
    /// Real X-shaped state: diagonal plus the `ρ03` and `ρ12` coherences.
    XState,
    /// `G G† / Tr(G G†)` with `G` a seeded complex Ginibre matrix.
    Random,
}

impl StateFamily {
    pub const ALL: [StateFamily; 7] = [
        StateFamily::BellMixture,
        StateFamily::Werner,
        StateFamily::ClassicalClassical,
        StateFamily::PureProduct,
        StateFamily::BellPhiPlus,
        StateFamily::XState,
        StateFamily::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StateFamily::BellMixture => "bell_mixture",
            StateFamily::Werner => "werner",
            StateFamily::ClassicalClassical => "classical_classical",
            StateFamily::PureProduct => "pure_product",
            StateFamily::BellPhiPlus => "bell_phi_plus",
            StateFamily::XState => "x_state",
            StateFamily::Random => "random",
        }
    }

    /// Parameter names accepted by the family.
    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            StateFamily::BellMixture => &["C3"],
            StateFamily::Werner => &["p"],
            StateFamily::ClassicalClassical => &["p00", "p01", "p10", "p11"],
            StateFamily::PureProduct => &["theta_a", "phi_a", "theta_b", "phi_b"],
            StateFamily::BellPhiPlus | StateFamily::Random => &[],
            StateFamily::XState => &["r00", "r11", "r22", "r33", "r03", "r12"],
        }
    }
}

impl fmt::Display for StateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StateFamily {
    type Err = StateError;

    /// Accepts snake_case or kebab-case names.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        StateFamily::ALL
            .into_iter()
            .find(|f| f.name() == norm)
            .ok_or_else(|| StateError::UnknownFamily(s.to_string()))
    }
}

/// A family tag with its named parameters and (for `random`) a seed.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFamilySpec {
    pub family: StateFamily,
    pub parameters: BTreeMap<String, f64>,
    pub seed: u64,
}

impl StateFamilySpec {
    pub fn new(family: StateFamily) -> Self {
        Self {
            family,
            parameters: BTreeMap::new(),
            seed: 0,
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.parameters.insert(name.to_string(), value);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn bell_mixture(c3: f64) -> Self {
        Self::new(StateFamily::BellMixture).with("C3", c3)
    }

    pub fn random(seed: u64) -> Self {
        Self::new(StateFamily::Random).with_seed(seed)
    }

    /// Looks a parameter up case-insensitively.
    fn get(&self, name: &str) -> Option<f64> {
        self.parameters
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, &v)| v)
    }

    fn check_names(&self) -> Result<(), StateError> {
        let known = self.family.parameter_names();
        for k in self.parameters.keys() {
            if !known.iter().any(|n| n.eq_ignore_ascii_case(k)) {
                return Err(StateError::UnknownParameter {
                    family: self.family,
                    name: k.clone(),
                });
            }
        }
        Ok(())
    }

    fn required(&self, name: &'static str) -> Result<f64, StateError> {
        let v = self.get(name).ok_or(StateError::MissingParameter {
            family: self.family,
            name,
        })?;
        finite(name, v)
    }

    fn optional(&self, name: &'static str, default: f64) -> Result<f64, StateError> {
        finite(name, self.get(name).unwrap_or(default))
    }
}

fn finite(name: &str, v: f64) -> Result<f64, StateError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(StateError::ParameterOutOfRange {
            name: name.to_string(),
            value: v,
            range: "finite",
        })
    }
}

fn in_unit_interval(name: &str, v: f64) -> Result<f64, StateError> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(StateError::ParameterOutOfRange {
            name: name.to_string(),
            value: v,
            range: "[0, 1]",
        })
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn real_matrix(rows: [[f64; 4]; 4]) -> CMatrix4 {
    CMatrix4::from_fn(|i, j| c(rows[i][j]))
}

/// Builds a member of one of the standard families. Output is a pure
/// function of `spec`.
pub fn generate_state(spec: &StateFamilySpec) -> Result<DensityMatrix, StateError> {
    spec.check_names()?;
    match spec.family {
        StateFamily::BellMixture => {
            let c3 = spec.required("C3")?;
            if !(-1.0..=1.0).contains(&c3) {
                return Err(StateError::ParameterOutOfRange {
                    name: "C3".into(),
                    value: c3,
                    range: "[-1, 1]",
                });
            }
            let m = real_matrix([
                [1.0 + c3, 0.0, 0.0, 1.0],
                [0.0, 1.0 - c3, -1.0, 0.0],
                [0.0, -1.0, 1.0 - c3, 0.0],
                [1.0, 0.0, 0.0, 1.0 + c3],
            ])
            .map(|z| z * 0.25);
            validate_density(&m, true)
        }
        StateFamily::Werner => {
            let p = in_unit_interval("p", spec.required("p")?)?;
            let s = p * 0.5;
            let q = (1.0 - p) * 0.25;
            let m = real_matrix([
                [q, 0.0, 0.0, 0.0],
                [0.0, q + s, -s, 0.0],
                [0.0, -s, q + s, 0.0],
                [0.0, 0.0, 0.0, q],
            ]);
            validate_density(&m, false)
        }
        StateFamily::ClassicalClassical => {
            let mut p = [0.0; 4];
            for (k, name) in ["p00", "p01", "p10", "p11"].into_iter().enumerate() {
                p[k] = in_unit_interval(name, spec.optional(name, 0.0)?)?;
            }
            let sum: f64 = p.iter().sum();
            if (sum - 1.0).abs() > STATE_TOLERANCE {
                return Err(StateError::ProbabilitiesNotNormalized { sum });
            }
            let m = CMatrix4::from_fn(|i, j| if i == j { c(p[i]) } else { c(0.0) });
            validate_density(&m, false)
        }
        StateFamily::PureProduct => {
            let ka = bloch_ket(spec.optional("theta_a", 0.0)?, spec.optional("phi_a", 0.0)?);
            let kb = bloch_ket(spec.optional("theta_b", 0.0)?, spec.optional("phi_b", 0.0)?);
            let ket = [ka[0] * kb[0], ka[0] * kb[1], ka[1] * kb[0], ka[1] * kb[1]];
            let m = CMatrix4::from_fn(|i, j| ket[i] * ket[j].conj());
            validate_density(&m, false)
        }
        StateFamily::BellPhiPlus => {
            let m = real_matrix([
                [0.5, 0.0, 0.0, 0.5],
                [0.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.0],
                [0.5, 0.0, 0.0, 0.5],
            ]);
            validate_density(&m, false)
        }
        StateFamily::XState => {
            let mut d = [0.0; 4];
            for (k, name) in ["r00", "r11", "r22", "r33"].into_iter().enumerate() {
                d[k] = in_unit_interval(name, spec.optional(name, 0.25)?)?;
            }
            let sum: f64 = d.iter().sum();
            if (sum - 1.0).abs() > STATE_TOLERANCE {
                return Err(StateError::ProbabilitiesNotNormalized { sum });
            }
            let r03 = spec.optional("r03", 0.0)?;
            let r12 = spec.optional("r12", 0.0)?;
            if r03.abs() > (d[0] * d[3]).sqrt() + STATE_TOLERANCE {
                return Err(StateError::ParameterOutOfRange {
                    name: "r03".into(),
                    value: r03,
                    range: "|r03| <= sqrt(r00 r33)",
                });
            }
            if r12.abs() > (d[1] * d[2]).sqrt() + STATE_TOLERANCE {
                return Err(StateError::ParameterOutOfRange {
                    name: "r12".into(),
                    value: r12,
                    range: "|r12| <= sqrt(r11 r22)",
                });
            }
            let m = real_matrix([
                [d[0], 0.0, 0.0, r03],
                [0.0, d[1], r12, 0.0],
                [0.0, r12, d[2], 0.0],
                [r03, 0.0, 0.0, d[3]],
            ]);
            validate_density(&m, false)
        }
        StateFamily::Random => {
            let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
            Ok(random_ginibre_state(&mut rng))
        }
    }
}

fn bloch_ket(theta: f64, phi: f64) -> [Complex64; 2] {
    let (s, co) = (theta * 0.5).sin_cos();
    [c(co), Complex64::from_polar(s, phi)]
}

/// `G G† / Tr(G G†)` with independent standard-normal real and imaginary parts.
pub fn random_ginibre_state<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let g = CMatrix4::from_fn(|_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let mut w = g * g.adjoint();
    let tr = w.trace().re;
    w /= c(tr);
    // exact Hermitian symmetry
    let w = (w + w.adjoint()).map(|z| z * 0.5);
    DensityMatrix::from_trusted(w)
}

/// Haar-random element of SU(2).
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> CMatrix2 {
    let mut q = [0.0f64; 4];
    loop {
        for v in q.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-12 {
            q.iter_mut().for_each(|v| *v /= n);
            break;
        }
    }
    let alpha = Complex64::new(q[0], q[1]);
    let beta = Complex64::new(q[2], q[3]);
    CMatrix2::new(alpha, -beta.conj(), beta, alpha.conj())
}

fn unitarity_deviation(u: &CMatrix2) -> f64 {
    max_abs(&(u * u.adjoint() - CMatrix2::identity()))
}

/// `(uA ⊗ uB) ρ (uA ⊗ uB)†`.
pub fn local_unitary_conjugate(
    rho: &DensityMatrix,
    u_a: &CMatrix2,
    u_b: &CMatrix2,
) -> Result<DensityMatrix, StateError> {
    for (which, u) in [("uA", u_a), ("uB", u_b)] {
        let deviation = unitarity_deviation(u);
        if deviation.is_nan() || deviation > STATE_TOLERANCE {
            return Err(StateError::NotUnitary { which, deviation });
        }
    }
    let k: CMatrix4 = u_a.kronecker(u_b);
    Ok(DensityMatrix {
        entries: k * rho.entries * k.adjoint(),
        physical: rho.physical,
        warning: rho.warning.clone(),
    })
}

/// `SWAP ρ SWAP`: exchanges the roles of the two qubits.
pub fn swap_subsystems(rho: &DensityMatrix) -> DensityMatrix {
    const PERM: [usize; 4] = [0, 2, 1, 3];
    DensityMatrix {
        entries: CMatrix4::from_fn(|i, j| rho.entries[(PERM[i], PERM[j])]),
        physical: rho.physical,
        warning: rho.warning.clone(),
    }
}

// ---------------------------------------------------------------------------
// JSON state files

/// On-disk form: `{"matrix": [[[re, im], ...×4], ...×4]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub matrix: [[[f64; 2]; 4]; 4],
}

impl StateFile {
    pub fn from_matrix(m: &CMatrix4) -> Self {
        let mut matrix = [[[0.0; 2]; 4]; 4];
        for (i, row) in matrix.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let z = m[(i, j)];
                *cell = [z.re, z.im];
            }
        }
        Self { matrix }
    }

    pub fn to_matrix(&self) -> CMatrix4 {
        CMatrix4::from_fn(|i, j| {
            let [re, im] = self.matrix[i][j];
            Complex64::new(re, im)
        })
    }

    pub fn from_json(s: &str) -> Result<Self, StateFileError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("state file serializes");
        s.push('\n');
        s
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, StateFileError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| StateFileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), StateFileError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|source| StateFileError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}
