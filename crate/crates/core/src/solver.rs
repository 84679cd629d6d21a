//! Maximisation of the measurement functional over both directions and
//! assembly of the discord value.
//!
//! Three independent routes produce `f_max`:
//!
//! * **fast**: the exact `a`-reduction `g(b)` scanned on a spherical `b`-grid,
//!   then polished with a simplex search in `(θ1, θ2)`;
//! * **oracle**: `f(a, b)` itself on a 4-angle grid with one simplex polish,
//!   using no analytic reduction at all;
//! * **xstate candidates**: a finite set of stationary directions for states
//!   in canonical (X-like) form.
//!
//! The discord is `Tr(C Cᵀ) − f_max / 4`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use thiserror::Error;

use crate::objective::{
    objective_f, reduced_over_a, Direction, MeasurementDirections, ObjectiveError,
};
use crate::par;
use crate::pauli::{pauli_decompose, trace_cc, CorrelationData};
use crate::qstate::{DensityMatrix, StateError};
use crate::simplex;

#[derive(Debug, Error)]
pub enum GgqdError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error("invalid solver config: {field} = {value} (expected {expected})")]
    InvalidConfig {
        field: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("unknown solver method '{0}' (expected fast, oracle, xstate or both)")]
    UnknownMethod(String),
}

/// Grid resolutions and stopping rules for the maximisers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Angular spacing of the fast `b`-grid, radians.
    pub b_grid_step: f64,
    /// Simplex stops once the value spread falls below this.
    pub refine_tolerance: f64,
    /// Angular spacing of the 4-angle oracle grid, radians.
    pub oracle_angle_step: f64,
    pub refine_max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            b_grid_step: 0.035,
            refine_tolerance: 1e-10,
            oracle_angle_step: 0.087,
            refine_max_iterations: 200,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), GgqdError> {
        for (field, value) in [
            ("b_grid_step", self.b_grid_step),
            ("oracle_angle_step", self.oracle_angle_step),
        ] {
            if !(value > 0.0 && value <= FRAC_PI_2) {
                return Err(GgqdError::InvalidConfig {
                    field,
                    value,
                    expected: "(0, pi/2]",
                });
            }
        }
        if !(self.refine_tolerance > 0.0 && self.refine_tolerance <= 1e-4) {
            return Err(GgqdError::InvalidConfig {
                field: "refine_tolerance",
                value: self.refine_tolerance,
                expected: "(0, 1e-4]",
            });
        }
        if self.refine_max_iterations < 10 {
            return Err(GgqdError::InvalidConfig {
                field: "refine_max_iterations",
                value: self.refine_max_iterations as f64,
                expected: ">= 10",
            });
        }
        Ok(())
    }
}

/// Method requested from [`ggqd`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Fast,
    Oracle,
    XstateCandidates,
    /// Fast result, cross-checked against the oracle (and the X-state
    /// candidates when the data is canonical).
    Both,
}

impl FromStr for Method {
    type Err = GgqdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "fast" => Ok(Method::Fast),
            "oracle" => Ok(Method::Oracle),
            "xstate" | "xstate_candidates" | "x_state" => Ok(Method::XstateCandidates),
            "both" => Ok(Method::Both),
            _ => Err(GgqdError::UnknownMethod(s.to_string())),
        }
    }
}

/// Route that produced the reported maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverMethod {
    Fast,
    Oracle,
    XstateCandidates,
}

impl SolverMethod {
    pub fn name(self) -> &'static str {
        match self {
            SolverMethod::Fast => "fast",
            SolverMethod::Oracle => "oracle",
            SolverMethod::XstateCandidates => "xstate_candidates",
        }
    }
}

impl fmt::Display for SolverMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A maximum of `f` with directions attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub f_max: f64,
    pub dirs: MeasurementDirections,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GgqdResult {
    pub ggqd: f64,
    pub f_max: f64,
    pub a_star: Vector3<f64>,
    pub b_star: Vector3<f64>,
    pub trace_cc: f64,
    pub method: SolverMethod,
    pub oracle_f_max: Option<f64>,
    /// `|fast − oracle|` when both ran.
    pub oracle_gap: Option<f64>,
    /// Best X-state candidate value, when the cross-check applied.
    pub xstate_f_max: Option<f64>,
}

/// Uniform angular grid: azimuths `2πi/n` for `i < n`, polar angles `πj/m`
/// for `j ≤ m`, with spacings no larger than `step`.
#[derive(Debug, Clone, Copy)]
struct SphereGrid {
    n_azimuth: usize,
    n_polar: usize,
}

impl SphereGrid {
    fn new(step: f64) -> Self {
        Self {
            n_azimuth: (2.0 * PI / step).ceil() as usize,
            n_polar: (PI / step).ceil() as usize + 1,
        }
    }

    fn len(&self) -> usize {
        self.n_azimuth * self.n_polar
    }

    fn angles(&self, k: usize) -> [f64; 2] {
        let (i, j) = (k / self.n_polar, k % self.n_polar);
        [
            2.0 * PI * i as f64 / self.n_azimuth as f64,
            PI * j as f64 / (self.n_polar - 1) as f64,
        ]
    }

    fn direction(&self, k: usize) -> Direction {
        let [az, pol] = self.angles(k);
        Direction::from_angles(az, pol)
    }
}

/// Reported representative: `b` with `b₃ ≥ 0` (then `b₁`, then `b₂`
/// positive), and `a` chosen the same way. `f` is even in each direction.
fn canonical_maximum(f_max: f64, dirs: MeasurementDirections) -> Maximum {
    Maximum {
        f_max,
        dirs: dirs.canonical_sign(),
    }
}

/// Fast route: grid scan of the exact reduction `g(b) = max_a f(a, b)`
/// followed by simplex refinement of `(θ1, θ2)` from the best cell.
pub fn maximize_objective(corr: &CorrelationData, cfg: &SolverConfig) -> Maximum {
    let grid = SphereGrid::new(cfg.b_grid_step);
    let g = |b: &Direction| reduced_over_a(corr, b).value;
    let (best, _) =
        par::argmax_indexed(grid.len(), |k| g(&grid.direction(k))).expect("grid is never empty");

    let refined = simplex::maximize_with_restarts(
        |p: &[f64; 2]| g(&Direction::from_angles(p[0], p[1])),
        grid.angles(best),
        cfg.b_grid_step,
        cfg.refine_tolerance,
        cfg.refine_max_iterations,
    );
    let b = Direction::from_angles(refined.point[0], refined.point[1]).canonical_sign();
    let red = reduced_over_a(corr, &b);
    canonical_maximum(red.value, MeasurementDirections { a: red.a, b })
}

/// Oracle route: exhaustive `f(a, b)` over the `(θ1, θ2, θ3, θ4)` grid at
/// `cfg.oracle_angle_step`, then one simplex pass in all four angles.
pub fn brute_force_oracle(corr: &CorrelationData, cfg: &SolverConfig) -> Maximum {
    let grid = SphereGrid::new(cfg.oracle_angle_step);
    let dirs: Vec<Vector3<f64>> = (0..grid.len())
        .map(|k| *grid.direction(k).vector())
        .collect();
    let xa2: Vec<f64> = dirs.iter().map(|a| corr.x.dot(a).powi(2)).collect();

    let (best_b, _, best_a) = par::argmax_with(dirs.len(), |kb| {
        let b = &dirs[kb];
        let yb2 = corr.y.dot(b).powi(2);
        let tb = corr.t * b;
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (ka, a) in dirs.iter().enumerate() {
            let atb = a.dot(&tb);
            let v = 1.0 + yb2 + xa2[ka] + atb * atb;
            if v > best.0 {
                best = (v, ka);
            }
        }
        best
    })
    .expect("grid is never empty");

    let [t1, t2] = grid.angles(best_b);
    let [t3, t4] = grid.angles(best_a);
    let f = |p: &[f64; 4]| {
        objective_f(
            corr,
            &MeasurementDirections::from_angles(p[0], p[1], p[2], p[3]),
        )
    };
    let refined = simplex::maximize(
        f,
        [t1, t2, t3, t4],
        cfg.oracle_angle_step,
        cfg.refine_tolerance,
        cfg.refine_max_iterations,
    );
    let p = refined.point;
    let dirs = MeasurementDirections::from_angles(p[0], p[1], p[2], p[3]);
    canonical_maximum(objective_f(corr, &dirs), dirs)
}

/// Finite candidate set for canonical-form (X-like) data.
///
/// `b` ranges over `±ẑ`, `±ŷ` and `±x̂`. For each `b` the `a` candidates are the
/// stationary points of the `a₂ = 0` slice,
/// `a = (sin θ3, 0, cos θ3)` with `θ3 ∈ {π/4, 3π/4}` when
/// `D = x₃² + T₃₃² − x₁² − T₁₃² = 0` and
/// `θ3 ∈ {½ arctan(2E/D), ½ arctan(2E/D) + π/2}`, `E = x₁x₃ + T₁₃T₃₃`,
/// otherwise, together with the exact maximiser of [`reduced_over_a`].
/// Pairs closer than `1e-9` are merged.
pub fn xstate_candidates(
    corr: &CorrelationData,
) -> Result<Vec<MeasurementDirections>, ObjectiveError> {
    let violation = corr.canonical_violation();
    if !corr.is_canonical() {
        return Err(ObjectiveError::NotCanonicalForm { violation });
    }
    let (x, t) = (&corr.x, &corr.t);
    let d = x[2] * x[2] + t[(2, 2)] * t[(2, 2)] - x[0] * x[0] - t[(0, 2)] * t[(0, 2)];
    let e = x[0] * x[2] + t[(0, 2)] * t[(2, 2)];
    let thetas = if d.abs() <= 1e-12 {
        [FRAC_PI_4, 3.0 * FRAC_PI_4]
    } else {
        let base = 0.5 * (2.0 * e / d).atan();
        [base, base + FRAC_PI_2]
    };
    let slice_a = |theta: f64| {
        let (s, c) = theta.sin_cos();
        Direction::normalize(Vector3::new(s, 0.0, c)).expect("unit by construction")
    };

    let bs = [
        Direction::z(),
        Direction::z().flipped(),
        Direction::y(),
        Direction::y().flipped(),
        Direction::x(),
        Direction::x().flipped(),
    ];
    let mut out: Vec<MeasurementDirections> = Vec::new();
    for b in bs {
        let exact = reduced_over_a(corr, &b).a;
        for a in thetas
            .iter()
            .map(|&th| slice_a(th))
            .chain(std::iter::once(exact))
        {
            let cand = MeasurementDirections {
                a: a.canonical_sign(),
                b,
            };
            let dup = out.iter().any(|o| {
                (o.a.vector() - cand.a.vector()).amax() <= 1e-9
                    && (o.b.vector() - cand.b.vector()).amax() <= 1e-9
            });
            if !dup {
                out.push(cand);
            }
        }
    }
    Ok(out)
}

fn best_candidate(corr: &CorrelationData, cands: &[MeasurementDirections]) -> Maximum {
    let (k, f_max) = cands.iter().map(|d| objective_f(corr, d)).enumerate().fold(
        (0, f64::NEG_INFINITY),
        |acc, (k, v)| if v > acc.1 { (k, v) } else { acc },
    );
    canonical_maximum(f_max, cands[k])
}

/// Discord of a density matrix.
pub fn ggqd(
    rho: &DensityMatrix,
    cfg: &SolverConfig,
    method: Method,
) -> Result<GgqdResult, GgqdError> {
    ggqd_from_correlations(&pauli_decompose(rho), cfg, method)
}

/// Discord computed directly from `(x, y, T)`.
pub fn ggqd_from_correlations(
    corr: &CorrelationData,
    cfg: &SolverConfig,
    method: Method,
) -> Result<GgqdResult, GgqdError> {
    cfg.validate()?;
    let tcc = trace_cc(corr);
    let mut oracle_f_max = None;
    let mut oracle_gap = None;
    let mut xstate_f_max = None;
    let (max, used) = match method {
        Method::Fast => (maximize_objective(corr, cfg), SolverMethod::Fast),
        Method::Oracle => (brute_force_oracle(corr, cfg), SolverMethod::Oracle),
        Method::XstateCandidates => {
            let cands = xstate_candidates(corr)?;
            (best_candidate(corr, &cands), SolverMethod::XstateCandidates)
        }
        Method::Both => {
            let fast = maximize_objective(corr, cfg);
            let oracle = brute_force_oracle(corr, cfg);
            oracle_f_max = Some(oracle.f_max);
            oracle_gap = Some((fast.f_max - oracle.f_max).abs());
            if let Ok(cands) = xstate_candidates(corr) {
                xstate_f_max = Some(best_candidate(corr, &cands).f_max);
            }
            (fast, SolverMethod::Fast)
        }
    };
    Ok(GgqdResult {
        ggqd: tcc - max.f_max / 4.0,
        f_max: max.f_max,
        a_star: *max.dirs.a.vector(),
        b_star: *max.dirs.b.vector(),
        trace_cc: tcc,
        method: used,
        oracle_f_max,
        oracle_gap,
        xstate_f_max,
    })
}

/// Discord of many states, evaluated in parallel when enabled; output order
/// follows input order.
pub fn ggqd_batch(
    states: &[DensityMatrix],
    cfg: &SolverConfig,
    method: Method,
) -> Vec<Result<GgqdResult, GgqdError>> {
    par::map_indexed(states.len(), |k| ggqd(&states[k], cfg, method))
}
