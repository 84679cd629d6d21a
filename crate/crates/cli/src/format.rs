//! Number formatting and the serialised report shared by `compute`, `sweep`
//! and `oracle`.

use ggqd_core::GgqdResult;
use serde_json::{json, Value};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits. `-0.0` becomes `0.0`.
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return if v == 0.0 { 0.0 } else { v };
    }
    let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v)
        .parse()
        .expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Direction components below `1e-12` are rounding residue of `sin`/`cos`
/// at axis angles; print them as zero.
fn direction_component(c: f64) -> f64 {
    if c.abs() < 1e-12 {
        0.0
    } else {
        round_sig(c)
    }
}

/// Shortest text that reads back as `round_sig(v)`; plain decimal for
/// moderate magnitudes, exponent form otherwise.
pub fn fmt_num(v: f64) -> String {
    let r = round_sig(v);
    let a = r.abs();
    if r == 0.0 {
        "0".to_string()
    } else if (1e-6..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// A [`GgqdResult`] rounded for output. `ggqd` is derived from the rounded
/// `trace_cc` and `f_max` so that a reader recomputing it from the same row
/// agrees to within the last printed digit.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub ggqd: f64,
    pub f_max: f64,
    pub a_star: [f64; 3],
    pub b_star: [f64; 3],
    pub trace_cc: f64,
    pub method: &'static str,
    pub oracle_f_max: Option<f64>,
    pub oracle_gap: Option<f64>,
    pub xstate_f_max: Option<f64>,
}

impl Report {
    pub fn new(r: &GgqdResult) -> Self {
        let f_max = round_sig(r.f_max);
        let trace_cc = round_sig(r.trace_cc);
        let v = |x: &nalgebra::Vector3<f64>| [x.x, x.y, x.z].map(direction_component);
        Self {
            ggqd: round_sig(trace_cc - f_max / 4.0),
            f_max,
            a_star: v(&r.a_star),
            b_star: v(&r.b_star),
            trace_cc,
            method: r.method.name(),
            oracle_f_max: r.oracle_f_max.map(round_sig),
            oracle_gap: r.oracle_gap.map(round_sig),
            xstate_f_max: r.xstate_f_max.map(round_sig),
        }
    }

    pub fn to_json(&self, physical: bool) -> Value {
        json!({
            "ggqd": self.ggqd,
            "f_max": self.f_max,
            "a_star": self.a_star,
            "b_star": self.b_star,
            "trace_cc": self.trace_cc,
            "method": self.method,
            "oracle_f_max": self.oracle_f_max,
            "oracle_gap": self.oracle_gap,
            "xstate_f_max": self.xstate_f_max,
            "physical": physical,
        })
    }

    pub fn to_text(&self, physical: bool) -> String {
        let vec3 = |v: &[f64; 3]| v.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(" ");
        let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_else(|| "-".into());
        let mut out = String::new();
        for (k, v) in [
            ("ggqd", fmt_num(self.ggqd)),
            ("f_max", fmt_num(self.f_max)),
            ("trace_cc", fmt_num(self.trace_cc)),
            ("a_star", vec3(&self.a_star)),
            ("b_star", vec3(&self.b_star)),
            ("method", self.method.to_string()),
            ("oracle_f_max", opt(self.oracle_f_max)),
            ("oracle_gap", opt(self.oracle_gap)),
            ("xstate_f_max", opt(self.xstate_f_max)),
            ("physical", physical.to_string()),
        ] {
            out.push_str(&format!("{k:<13} {v}\n"));
        }
        out
    }

    pub const CSV_HEADER: &'static str = "param,ggqd,f_max,a1,a2,a3,b1,b2,b3,trace_cc,method";

    pub fn csv_row(&self, param: f64) -> String {
        let mut cols = vec![fmt_num(param), fmt_num(self.ggqd), fmt_num(self.f_max)];
        cols.extend(self.a_star.iter().map(|v| fmt_num(*v)));
        cols.extend(self.b_star.iter().map(|v| fmt_num(*v)));
        cols.push(fmt_num(self.trace_cc));
        cols.push(self.method.to_string());
        cols.join(",")
    }
}
