use std::fmt::Write;

use metaplectic::calculus::{Gate, GateStatus, PipelineReport, Verdict};
use metaplectic::numkernel::CMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::job::{Command, FormJson, HoloJson, WeightJson};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Passed,
    GateFailed,
    NotCertifiedToeplitz,
    InputError,
    NumericalError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Passed => 0,
            Status::GateFailed | Status::NotCertifiedToeplitz => 1,
            Status::InputError => 2,
            Status::NumericalError => 3,
        }
    }

    fn describe(self) -> &'static str {
        match self {
            Status::Passed => "all gates passed",
            Status::GateFailed => "gate failed",
            Status::NotCertifiedToeplitz => "bounded, but the Toeplitz symbol is not certified",
            Status::InputError => "input error",
            Status::NumericalError => "numerical failure",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateJson {
    pub label: &'static str,
    pub condition: &'static str,
    pub status: &'static str,
    pub margin: Option<f64>,
    pub detail: String,
}

impl From<&Gate> for GateJson {
    fn from(g: &Gate) -> Self {
        GateJson {
            label: g.id.label(),
            condition: g.id.condition(),
            status: match g.status {
                GateStatus::Pass => "pass",
                GateStatus::Fail => "fail",
                GateStatus::Skipped => "skipped",
            },
            margin: g.margin,
            detail: g.detail.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleConstant {
    pub what: String,
    pub value: Complex64,
    pub error_bar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSection {
    pub m: usize,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    pub reference: Complex64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub constants: Vec<OracleConstant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: Option<Command>,
    pub status: Status,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub gates: Vec<GateJson>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub factor_exponents: Vec<HoloJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weyl_exponent: Option<HoloJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub toeplitz_exponent: Option<FormJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub canonical_map: Option<CMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_out: Option<WeightJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_phase: Option<HoloJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adjoint_kernel_phase: Option<HoloJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
}

impl Report {
    pub fn new(command: Option<Command>, status: Status) -> Self {
        Report {
            command,
            status,
            exit_code: status.exit_code(),
            dimension: None,
            failed: None,
            message: None,
            gates: Vec::new(),
            checks: Vec::new(),
            factor_exponents: Vec::new(),
            weyl_exponent: None,
            toeplitz_exponent: None,
            canonical_map: None,
            weight_out: None,
            kernel_phase: None,
            adjoint_kernel_phase: None,
            oracle: None,
        }
    }

    pub fn failure(command: Option<Command>, status: Status, message: String) -> Self {
        Report { message: Some(message), ..Report::new(command, status) }
    }

    pub fn from_pipeline(command: Command, n: usize, r: &PipelineReport) -> Self {
        let (status, failed) = match r.verdict {
            Verdict::Passed => (Status::Passed, None),
            Verdict::GateFailed(id) => (Status::GateFailed, Some(id.to_string())),
            Verdict::NotCertifiedToeplitz => (
                Status::NotCertifiedToeplitz,
                r.first_failure().map(|g| g.id.to_string()),
            ),
        };
        Report {
            dimension: Some(n),
            failed,
            gates: r.gates.iter().map(GateJson::from).collect(),
            factor_exponents: r.factor_exponents.iter().map(HoloJson::from_form).collect(),
            weyl_exponent: r.weyl_exponent.as_ref().map(HoloJson::from_form),
            toeplitz_exponent: r.toeplitz_exponent.as_ref().map(FormJson::from_form),
            ..Report::new(Some(command), status)
        }
    }

    pub fn set_status(&mut self, status: Status) {
        self.status = status;
        self.exit_code = status.exit_code();
    }

    /// Marks the report failed at the first failing check, if any.
    pub fn settle_checks(&mut self, on_failure: Status) {
        if self.status != Status::Passed {
            return;
        }
        if let Some(c) = self.checks.iter().find(|c| !c.passed) {
            self.failed = Some(c.name.clone());
            self.set_status(on_failure);
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let command = self.command.map_or("job", Command::name);
        match self.dimension {
            Some(n) => writeln!(out, "metaplectic {command}  (n = {n})"),
            None => writeln!(out, "metaplectic {command}"),
        }
        .ok();
        writeln!(out, "status   {} (exit {})", self.status.describe(), self.exit_code).ok();
        if let Some(f) = &self.failed {
            writeln!(out, "failed   {f}").ok();
        }
        if let Some(m) = &self.message {
            writeln!(out, "message  {m}").ok();
        }
        if !self.gates.is_empty() {
            writeln!(out, "\ngates").ok();
            for g in &self.gates {
                let margin = g.margin.map_or("-".to_string(), fmt_real);
                writeln!(
                    out,
                    "  {:<7} {:<12} {:<38} margin {:<20} {}",
                    g.status, g.label, g.condition, margin, g.detail
                )
                .ok();
            }
        }
        if !self.checks.is_empty() {
            writeln!(out, "\nchecks").ok();
            for c in &self.checks {
                let value = c.value.map_or("-".to_string(), fmt_real);
                let mark = if c.passed { "pass" } else { "fail" };
                writeln!(out, "  {mark:<7} {:<44} value {value:<20} {}", c.name, c.detail).ok();
            }
        }
        for (i, f) in self.factor_exponents.iter().enumerate() {
            if self.factor_exponents.len() > 1 {
                write_holo(&mut out, &format!("Weyl exponent of factor {}", i + 1), f);
            }
        }
        if let Some(f) = &self.weyl_exponent {
            write_holo(&mut out, "Weyl exponent F", f);
        }
        if let Some(q) = &self.toeplitz_exponent {
            writeln!(out, "\nToeplitz exponent Q  (n = {}, q = xᵀBx + x̄ᵀCx + x̄ᵀDx̄)", q.n).ok();
            for (name, m) in [("B", &q.b), ("C", &q.c), ("D", &q.d)] {
                if let Some(m) = m {
                    write_matrix(&mut out, name, m);
                }
            }
        }
        if let Some(k) = &self.canonical_map {
            writeln!(out, "\ncanonical map").ok();
            write_matrix(&mut out, "κ", k);
        }
        if let Some(w) = &self.weight_out {
            writeln!(out, "\noutput weight  (Re xᵀPx + x̄ᵀHx)").ok();
            if let Some(p) = &w.p {
                write_matrix(&mut out, "P", p);
            }
            write_matrix(&mut out, "H", &w.h);
        }
        if let Some(f) = &self.kernel_phase {
            write_holo(&mut out, "kernel phase Ψ(x, y)", f);
        }
        if let Some(f) = &self.adjoint_kernel_phase {
            write_holo(&mut out, "adjoint kernel phase Ψ*(y, x)", f);
        }
        if let Some(o) = &self.oracle {
            let r = o.r.map_or("auto".to_string(), fmt_real);
            writeln!(out, "\noracle  m = {}, R = {r}, reference {}", o.m, fmt_complex(o.reference)).ok();
            if let Some(s) = &o.skipped {
                writeln!(out, "  skipped: {s}").ok();
            }
            for c in &o.constants {
                writeln!(out, "  {:<28} {} ± {}", c.what, fmt_complex(c.value), fmt_real(c.error_bar)).ok();
            }
        }
        out
    }
}

fn write_holo(out: &mut String, title: &str, f: &HoloJson) {
    writeln!(out, "\n{title}  (N = {}, value ½uᵀMu)", f.dim).ok();
    write_matrix(out, "M", &f.m);
}

fn write_matrix(out: &mut String, name: &str, m: &CMatrix) {
    for r in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|c| fmt_complex(m[(r, c)])).collect();
        let lead = if r == 0 { format!("{name} =") } else { String::new() };
        writeln!(out, "  {lead:<4} [{}]", row.join(", ")).ok();
    }
}

/// Shortest of fixed and scientific notation with 12 significant digits.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..12).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `a+bi` with 12 significant digits per part.
pub fn fmt_complex(z: Complex64) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{}{sign}{}i", fmt_real(z.re), fmt_real(z.im.abs()))
}
