use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ggqd_core::qstate::{diagnose, StateFile, StateFileError};
use ggqd_core::{
    generate_state, ggqd, par, validate_density, DensityMatrix, GgqdError, Method, SolverConfig,
    StateFamily, StateFamilySpec,
};
use serde_json::json;

use crate::format::{fmt_num, round_sig, Report};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_PARSE: u8 = 3;
pub const EXIT_OUTPUT: u8 = 4;
pub const EXIT_ORACLE_GAP: u8 = 5;

/// Largest fast/oracle disagreement `ggqd oracle` accepts.
pub const ORACLE_GAP_LIMIT: f64 = 1e-3;

const MAX_SWEEP_STEPS: f64 = 1e6;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn invalid(message: impl ToString) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.to_string(),
        }
    }
}

impl From<StateFileError> for Failure {
    fn from(e: StateFileError) -> Self {
        Self {
            code: EXIT_PARSE,
            message: e.to_string(),
        }
    }
}

impl From<GgqdError> for Failure {
    fn from(e: GgqdError) -> Self {
        Self::invalid(e)
    }
}

impl From<ggqd_core::StateError> for Failure {
    fn from(e: ggqd_core::StateError) -> Self {
        Self::invalid(e)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ConfigOverrides {
    pub b_grid_step: Option<f64>,
    pub oracle_step: Option<f64>,
    pub refine_tol: Option<f64>,
}

impl ConfigOverrides {
    fn config(&self) -> Result<SolverConfig, Failure> {
        let d = SolverConfig::default();
        let cfg = SolverConfig {
            b_grid_step: self.b_grid_step.unwrap_or(d.b_grid_step),
            oracle_angle_step: self.oracle_step.unwrap_or(d.oracle_angle_step),
            refine_tolerance: self.refine_tol.unwrap_or(d.refine_tolerance),
            ..d
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn load_state(path: &Path, allow_nonphysical: bool) -> Result<DensityMatrix, Failure> {
    let file = StateFile::read(path)?;
    let rho = validate_density(&file.to_matrix(), allow_nonphysical)
        .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    if let Some(w) = rho.warning() {
        eprintln!("warning: {w}");
    }
    Ok(rho)
}

fn write_output(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure {
        code: EXIT_OUTPUT,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn print(text: &str) {
    let mut out = std::io::stdout().lock();
    // A closed pipe is not an error worth reporting.
    let _ = out.write_all(text.as_bytes());
}

pub fn compute(
    input: &Path,
    method: &str,
    allow_nonphysical: bool,
    json_out: bool,
    overrides: &ConfigOverrides,
) -> Result<u8, Failure> {
    let method: Method = method.parse()?;
    let cfg = overrides.config()?;
    let rho = load_state(input, allow_nonphysical)?;
    let report = Report::new(&ggqd(&rho, &cfg, method)?);
    if json_out {
        print(&format!("{}\n", report.to_json(rho.is_physical())));
    } else {
        print(&report.to_text(rho.is_physical()));
    }
    Ok(EXIT_OK)
}

pub fn validate(input: &Path, json_out: bool) -> Result<u8, Failure> {
    let file = StateFile::read(input)?;
    let d = diagnose(&file.to_matrix());
    let physical = d.is_physical();
    if json_out {
        let v = json!({
            "hermiticity_deviation": round_sig(d.hermiticity_deviation),
            "trace_deviation": round_sig(d.trace_deviation),
            "min_eigenvalue": round_sig(d.min_eigenvalue),
            "physical": physical,
        });
        print(&format!("{v}\n"));
    } else {
        print(&format!(
            "hermiticity_deviation {}\ntrace_deviation       {}\nmin_eigenvalue        {}\nphysical              {physical}\n",
            fmt_num(d.hermiticity_deviation),
            fmt_num(d.trace_deviation),
            fmt_num(d.min_eigenvalue),
        ));
    }
    Ok(if physical { EXIT_OK } else { EXIT_INVALID })
}

pub fn oracle(
    input: &Path,
    allow_nonphysical: bool,
    json_out: bool,
    overrides: &ConfigOverrides,
) -> Result<u8, Failure> {
    let cfg = overrides.config()?;
    let rho = load_state(input, allow_nonphysical)?;
    let r = ggqd(&rho, &cfg, Method::Both)?;
    let fast = round_sig(r.f_max);
    let oracle = round_sig(r.oracle_f_max.expect("both runs the oracle"));
    let gap = r.oracle_gap.expect("both reports the gap");
    if json_out {
        let v = json!({
            "fast_f_max": fast,
            "oracle_f_max": oracle,
            "gap": round_sig(gap),
            "within_limit": gap <= ORACLE_GAP_LIMIT,
        });
        print(&format!("{v}\n"));
    } else {
        print(&format!(
            "fast_f_max   {}\noracle_f_max {}\ngap          {}\n",
            fmt_num(fast),
            fmt_num(oracle),
            fmt_num(gap)
        ));
    }
    Ok(if gap <= ORACLE_GAP_LIMIT {
        EXIT_OK
    } else {
        EXIT_ORACLE_GAP
    })
}

fn parse_assignment(s: &str) -> Result<(String, f64), Failure> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| Failure::invalid(format!("expected NAME=VALUE, got '{s}'")))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| Failure::invalid(format!("'{value}' is not a number in '{s}'")))?;
    Ok((name.trim().to_string(), value))
}

fn family_spec(family: &str, params: &[String], seed: u64) -> Result<StateFamilySpec, Failure> {
    let family: StateFamily = family.parse()?;
    let mut spec = StateFamilySpec::new(family).with_seed(seed);
    for p in params {
        let (name, value) = parse_assignment(p)?;
        spec = spec.with(&name, value);
    }
    Ok(spec)
}

pub fn gen(family: &str, params: &[String], seed: u64, output: &Path) -> Result<u8, Failure> {
    let spec = family_spec(family, params, seed)?;
    let rho = generate_state(&spec)?;
    if let Some(w) = rho.warning() {
        eprintln!("warning: {w}");
    }
    write_output(output, &rho.to_state_file().to_json())?;
    Ok(EXIT_OK)
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub family: String,
    pub param_name: String,
    pub from: f64,
    pub to: f64,
    pub step: f64,
    pub fixed: Vec<String>,
    pub method: String,
    pub seed: u64,
    pub allow_nonphysical: bool,
    pub output_path: PathBuf,
}

impl SweepSpec {
    /// Parameter values `from + i·step ≤ to`, rounded to the printed precision.
    fn values(&self) -> Result<Vec<f64>, Failure> {
        let (from, to, step) = (self.from, self.to, self.step);
        if !(from.is_finite() && to.is_finite() && step.is_finite()) {
            return Err(Failure::invalid("sweep bounds must be finite"));
        }
        if step <= 0.0 {
            return Err(Failure::invalid(format!(
                "step must be positive, got {step}"
            )));
        }
        if from > to {
            return Err(Failure::invalid(format!("from ({from}) exceeds to ({to})")));
        }
        let span = (to - from) / step;
        if span > MAX_SWEEP_STEPS {
            return Err(Failure::invalid(format!(
                "sweep has {span:.0} steps, limit {MAX_SWEEP_STEPS}"
            )));
        }
        let n = (span + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| round_sig(from + i as f64 * step)).collect())
    }
}

pub fn sweep(spec: &SweepSpec, overrides: &ConfigOverrides) -> Result<u8, Failure> {
    let method: Method = spec.method.parse()?;
    let cfg = overrides.config()?;
    let base = family_spec(&spec.family, &spec.fixed, spec.seed)?;
    let values = spec.values()?;

    let states: Vec<DensityMatrix> = values
        .iter()
        .map(|&v| {
            let rho = generate_state(&base.clone().with(&spec.param_name, v))?;
            if !rho.is_physical() && !spec.allow_nonphysical {
                return Err(Failure::invalid(format!(
                    "{}={v}: {} (pass --allow-nonphysical to proceed)",
                    spec.param_name,
                    rho.warning().unwrap_or("state is not physical")
                )));
            }
            Ok(rho)
        })
        .collect::<Result<_, _>>()?;
    if spec.allow_nonphysical && states.iter().any(|r| !r.is_physical()) {
        eprintln!("warning: sweep includes non-positive states; processed formally");
    }

    let rows = par::map_indexed(states.len(), |k| ggqd(&states[k], &cfg, method));
    let mut csv = String::with_capacity(64 * (rows.len() + 1));
    csv.push_str(Report::CSV_HEADER);
    csv.push('\n');
    for (value, row) in values.iter().zip(rows) {
        csv.push_str(&Report::new(&row?).csv_row(*value));
        csv.push('\n');
    }
    write_output(&spec.output_path, &csv)?;
    Ok(EXIT_OK)
}
