//! Serializable run report and its table/JSON renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::measure::{DensityFunction, DiscreteMeasure};
use crate::scenario::ScenarioFile;
use crate::tol::PRODUCT_RULE_TOL;

pub const REPORT_SCHEMA: &str = "qcorr-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: String,
    /// The scenario exactly as loaded.
    pub scenario: ScenarioFile,
    pub flags: Flags,
    pub measures: Vec<MeasureTable>,
    /// One entry per decomposition; classical scenarios have exactly one.
    pub splits: Vec<Split>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flags {
    /// `auto-commuting`, `classical-product` or `explicit`.
    pub joint: String,
    pub joint_consistent: bool,
    /// `rho_c` and `rho_e` depend on the decomposition, `rho_t` does not.
    pub decomposition_relative: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projective: Option<[bool; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deterministic: Option<[bool; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureTable {
    pub name: String,
    pub points: Vec<String>,
    pub weights: Vec<f64>,
}

impl MeasureTable {
    pub fn from_measure(name: &str, m: &DiscreteMeasure) -> Self {
        Self {
            name: name.into(),
            points: m.space().point_labels(),
            weights: m.weights().to_vec(),
        }
    }

    pub fn weight_of(&self, point: &str) -> Option<f64> {
        self.points
            .iter()
            .position(|p| p == point)
            .map(|k| self.weights[k])
    }
}

/// Density values over the product space; `None` marks points off the
/// support of the denominator. Exactly one of `values`/`error` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Option<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl DensityEntry {
    pub fn from_density(f: &DensityFunction) -> Self {
        Self {
            values: Some(f.values().to_vec()),
            error: None,
        }
    }

    pub fn from_result(r: &Result<DensityFunction>) -> Self {
        match r {
            Ok(f) => Self::from_density(f),
            Err(e) => Self {
                values: None,
                error: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductRuleCheck {
    /// `max |rho_c·rho_e − rho_t|` over the common support.
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl ProductRuleCheck {
    pub fn new(residual: f64) -> Self {
        Self {
            residual,
            threshold: PRODUCT_RULE_TOL,
            pass: residual < PRODUCT_RULE_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub decomposition: String,
    /// `explicit`, `spectral` or `classical-frame`.
    pub origin: String,
    pub weights: Vec<f64>,
    pub classical_product: MeasureTable,
    pub rho_t: DensityEntry,
    pub rho_c: DensityEntry,
    pub rho_e: DensityEntry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product_rule: Option<ProductRuleCheck>,
}

impl Split {
    /// Value of a density at a named product point, `None` if off support or
    /// the density does not exist.
    pub fn value_at(&self, which: &DensityEntry, point: &str) -> Option<f64> {
        let k = self
            .classical_product
            .points
            .iter()
            .position(|p| p == point)?;
        which.values.as_ref()?[k]
    }
}

impl ReportDocument {
    /// True when some density could not be formed.
    pub fn has_engine_failure(&self) -> bool {
        self.splits
            .iter()
            .any(|s| s.rho_c.error.is_some() || s.rho_e.error.is_some() || s.rho_t.error.is_some())
    }

    pub fn measure(&self, name: &str) -> Option<&MeasureTable> {
        self.measures.iter().find(|m| m.name == name)
    }

    pub fn split(&self, decomposition: &str) -> Option<&Split> {
        self.splits
            .iter()
            .find(|s| s.decomposition == decomposition)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
}

pub fn emit_report(report: &ReportDocument, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("report serializes") + "\n",
        Format::Table => render_table(report),
    }
}

/// `%g`-style rendering with 6 significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&exp) {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        return format!("{}e{e}", trim_zeros(mantissa));
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}"))
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

const OFF_SUPPORT: &str = "—";

fn cell(v: Option<f64>) -> String {
    v.map(fmt_sig).unwrap_or_else(|| OFF_SUPPORT.into())
}

fn write_table(out: &mut String, header: &[String], rows: &[Vec<String>]) {
    let width = |k: usize| {
        rows.iter()
            .map(|r| r[k].chars().count())
            .chain(std::iter::once(header[k].chars().count()))
            .max()
            .unwrap_or(0)
    };
    let widths: Vec<usize> = (0..header.len()).map(width).collect();
    for line in std::iter::once(header).chain(rows.iter().map(Vec::as_slice)) {
        let mut s = String::from("  ");
        for (c, w) in line.iter().zip(&widths) {
            s.push_str(c);
            s.extend(std::iter::repeat_n(' ', w + 2 - c.chars().count()));
        }
        let _ = writeln!(out, "{}", s.trim_end());
    }
}

fn render_table(r: &ReportDocument) -> String {
    let mut out = String::new();
    let mode = match r.scenario.model {
        crate::scenario::ModelSpec::Quantum(_) => "quantum",
        crate::scenario::ModelSpec::Classical(_) => "classical",
    };
    let _ = writeln!(out, "scenario: {} ({mode})", r.scenario.name);
    if let Some(d) = &r.scenario.description {
        let _ = writeln!(out, "  {d}");
    }
    let _ = writeln!(
        out,
        "joint: {} (marginally consistent: {})",
        r.flags.joint,
        if r.flags.joint_consistent {
            "yes"
        } else {
            "no"
        }
    );
    if let Some([a, b]) = r.flags.deterministic {
        let _ = writeln!(out, "deterministic observables: A1 {a}, A2 {b}");
    }
    if let Some([a, b]) = r.flags.projective {
        let _ = writeln!(out, "projective observables: A1 {a}, A2 {b}");
    }
    if r.flags.decomposition_relative {
        let _ = writeln!(
            out,
            "rho_c and rho_e are relative to the decomposition; rho_t is not"
        );
    }

    let mut groups: Vec<(&Vec<String>, Vec<&MeasureTable>)> = Vec::new();
    for m in &r.measures {
        match groups.iter_mut().find(|(p, _)| **p == m.points) {
            Some((_, ms)) => ms.push(m),
            None => groups.push((&m.points, vec![m])),
        }
    }
    let _ = writeln!(out, "\nmeasures");
    for (points, ms) in groups {
        let header: Vec<String> = std::iter::once("outcome".to_string())
            .chain(ms.iter().map(|m| m.name.clone()))
            .collect();
        let rows: Vec<Vec<String>> = points
            .iter()
            .enumerate()
            .map(|(k, p)| {
                std::iter::once(p.clone())
                    .chain(ms.iter().map(|m| fmt_sig(m.weights[k])))
                    .collect()
            })
            .collect();
        write_table(&mut out, &header, &rows);
    }

    for s in &r.splits {
        let _ = writeln!(
            out,
            "\ndecomposition: {} ({}, {} component{})",
            s.decomposition,
            s.origin,
            s.weights.len(),
            if s.weights.len() == 1 { "" } else { "s" }
        );
        let header: Vec<String> = ["outcome", "rho_t", "rho_c", "rho_e", "classical product"]
            .iter()
            .map(|h| h.to_string())
            .collect();
        let entry = |e: &DensityEntry, k: usize| match &e.values {
            Some(v) => cell(v[k]),
            None => "n/a".into(),
        };
        let rows: Vec<Vec<String>> = s
            .classical_product
            .points
            .iter()
            .enumerate()
            .map(|(k, p)| {
                vec![
                    p.clone(),
                    entry(&s.rho_t, k),
                    entry(&s.rho_c, k),
                    entry(&s.rho_e, k),
                    fmt_sig(s.classical_product.weights[k]),
                ]
            })
            .collect();
        write_table(&mut out, &header, &rows);
        for (name, e) in [
            ("rho_t", &s.rho_t),
            ("rho_c", &s.rho_c),
            ("rho_e", &s.rho_e),
        ] {
            if let Some(err) = &e.error {
                let _ = writeln!(out, "  {name}: {err}");
            }
        }
        match &s.product_rule {
            Some(c) => {
                let _ = writeln!(
                    out,
                    "  product_rule_residual: <{}: {} ({})",
                    fmt_sig(c.threshold),
                    if c.pass { "PASS" } else { "FAIL" },
                    fmt_sig(c.residual)
                );
            }
            None => {
                let _ = writeln!(out, "  product_rule_residual: n/a");
            }
        }
    }
    if !r.notes.is_empty() {
        let _ = writeln!(out, "\nnotes");
        for n in &r.notes {
            let _ = writeln!(out, "  - {n}");
        }
    }
    out
}
