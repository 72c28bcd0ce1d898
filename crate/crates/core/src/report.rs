//! Command reports: a JSON document plus a short human summary.

use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::duality::QClass;
use crate::erasures::{Backing, Claim, ErasurePattern, ErrorLevel, PNorm, SolverDiagnostics};
use crate::fusion::ClassificationReport;

/// Exit status of a command.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CERTIFICATION: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;

/// Rows shown per error level in the human summary.
const SUMMARY_ROWS: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorRow {
    pub pattern: String,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorTable {
    pub subject: String,
    pub p: PNorm,
    pub r: usize,
    pub aggregate: f64,
    /// Tolerance the underlying dual was certified at.
    pub tol: f64,
    pub rows: Vec<ErrorRow>,
}

impl ErrorTable {
    pub fn from_level(subject: &str, p: PNorm, level: &ErrorLevel, tol: f64) -> Self {
        Self::new(subject, p, level.r, &level.errors, tol)
    }

    pub fn new(subject: &str, p: PNorm, r: usize, errors: &[(ErasurePattern, f64)], tol: f64) -> Self {
        Self {
            subject: subject.into(),
            p,
            r,
            aggregate: p.aggregate(errors.iter().map(|e| e.1)),
            tol,
            rows: errors
                .iter()
                .map(|(pat, e)| ErrorRow {
                    pattern: pat.to_string(),
                    error: *e,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    /// SHA-256 of the input bytes.
    pub input_digest: Option<String>,
    pub tol: f64,
    pub classification: Option<ClassificationReport>,
    pub bounds: Option<Bounds>,
    /// Structure of the duality operator, when a dual was built.
    pub q_class: Option<QClass>,
    pub checks: Vec<Claim>,
    pub error_tables: Vec<ErrorTable>,
    pub certificates: Vec<Claim>,
    pub solver: Option<SolverDiagnostics>,
    pub notes: Vec<String>,
}

pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

impl Report {
    pub fn new(command: impl Into<String>, tol: f64) -> Self {
        Self {
            command: command.into(),
            input_digest: None,
            tol,
            classification: None,
            bounds: None,
            q_class: None,
            checks: Vec::new(),
            error_tables: Vec::new(),
            certificates: Vec::new(),
            solver: None,
            notes: Vec::new(),
        }
    }

    pub fn with_input(mut self, bytes: &[u8]) -> Self {
        self.input_digest = Some(digest(bytes));
        self
    }

    pub fn check_at_most(&mut self, name: &str, value: f64, tol: f64) {
        self.checks.push(Claim::at_most(name, value, tol, Backing::Computed));
    }

    pub fn check_at_least(&mut self, name: &str, value: f64, bound: f64) {
        self.checks.push(Claim::at_least(name, value, bound, Backing::Computed));
    }

    pub fn check_flag(&mut self, name: &str, holds: bool) {
        self.checks.push(Claim::flag(name, holds, Backing::Computed));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn first_failure(&self) -> Option<&Claim> {
        self.checks.iter().chain(&self.certificates).find(|c| !c.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.first_failure().is_some() {
            EXIT_CERTIFICATION
        } else {
            EXIT_OK
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        if let Some(d) = &self.input_digest {
            let _ = writeln!(out, "input sha256: {d}");
        }
        if let Some(c) = &self.classification {
            let _ = writeln!(
                out,
                "fusion frame in dimension {}: {} subspaces of dimensions {:?}, rank {}",
                c.ambient_dim, c.subspace_count, c.dims, c.rank
            );
            let flags = [
                ("fusion frame", c.is_fusion_frame),
                ("tight", c.is_tight),
                ("parseval", c.is_parseval),
                ("riesz", c.is_riesz),
                ("orthonormal basis", c.is_orthonormal_basis),
                ("overcomplete", c.is_overcomplete),
            ];
            let on: Vec<&str> = flags.iter().filter(|f| f.1).map(|f| f.0).collect();
            let _ = writeln!(
                out,
                "  properties: {}",
                if on.is_empty() { "none".into() } else { on.join(", ") }
            );
        }
        if let Some(b) = &self.bounds {
            let _ = writeln!(out, "bounds: [{:.12}, {:.12}]", b.lower, b.upper);
        }
        if let Some(q) = self.q_class {
            let _ = writeln!(out, "Q classification: {q}");
        }
        if !self.checks.is_empty() || !self.certificates.is_empty() {
            let _ = writeln!(out, "checks:");
            for c in self.checks.iter().chain(&self.certificates) {
                let verdict = if c.pass { "PASS" } else { "FAIL" };
                let _ = writeln!(
                    out,
                    "  {verdict}  {} = {:.6e} (tol {:.1e}, {:?})",
                    c.name, c.value, c.tol, c.backing
                );
            }
        }
        for t in &self.error_tables {
            let _ = writeln!(
                out,
                "errors of {} at r = {} (p = {}): aggregate {:.12}",
                t.subject, t.r, t.p, t.aggregate
            );
            for row in t.rows.iter().take(SUMMARY_ROWS) {
                let _ = writeln!(out, "  {:<24} {:.12}", row.pattern, row.error);
            }
            if t.rows.len() > SUMMARY_ROWS {
                let _ = writeln!(out, "  ... {} more patterns", t.rows.len() - SUMMARY_ROWS);
            }
        }
        if let Some(s) = &self.solver {
            let _ = writeln!(
                out,
                "solver: {} iterations, converged {}, phi {:.12} -> {:.12}{}",
                s.iterations,
                s.converged,
                s.phi_start,
                s.phi_final,
                if s.polished {
                    format!(" (polished in {} Newton steps)", s.newton_steps)
                } else {
                    String::new()
                }
            );
        }
        for n in &self.notes {
            let _ = writeln!(out, "{n}");
        }
        match self.first_failure() {
            Some(c) => {
                let _ = writeln!(out, "result: FAIL ({})", c.name);
            }
            None => {
                let _ = writeln!(out, "result: PASS");
            }
        }
        out
    }
}
