//! Scenario files (`"schema": "qcorr/1"`), the built-in two-qubit examples,
//! and evaluation of a scenario into a [`ReportDocument`].
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major lists of
//! rows. A quantum scenario looks like
//!
//! ```json
//! {
//!   "schema": "qcorr/1",
//!   "name": "separable",
//!   "mode": "quantum",
//!   "dim": 4,
//!   "state": [[[0.4, 0.0], ...], ...],
//!   "observables": [
//!     { "kind": "povm", "labels": ["+1/2", "-1/2"], "effects": [ ... ] },
//!     { "kind": "operator", "operator": [ ... ] }
//!   ],
//!   "joint": "auto-commuting",
//!   "decompositions": [
//!     { "name": "product-basis", "source": { "components": [ { "weight": 0.4, "vector": [ ... ] } ] } },
//!     { "name": "spectral", "source": "spectral" }
//!   ]
//! }
//! ```
//!
//! and a classical one replaces `dim`/`state`/`observables` by
//! `phase_space`, a weight list `state`, and kernels
//! `{ "labels": [...], "kernel": [[...], ...] }`, with `joint` either
//! `"classical-product"` or `{ "explicit": { "kernel": [...] } }`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classical_frame::{
    classical_joint, classical_report, ClassicalJoint, ClassicalObservable, ClassicalReport,
    PhaseSpace,
};
use crate::correlation::{
    correlation_report, ConvexDecomposition, CorrelationReport, DecompositionOrigin,
};
use crate::error::Error;
use crate::hilbert::{spectral_decompose, tensor, ComplexMatrix, DensityOperator, PureState, C64};
use crate::measure::{DiscreteMeasure, OutcomeSpace, ProductSpace};
use crate::observable::{
    check_joint, default_value_label, joint_from_commuting, spin_z_pair, Povm,
};
use crate::random;
use crate::report::{
    DensityEntry, Flags, MeasureTable, ProductRuleCheck, ReportDocument, Split, REPORT_SCHEMA,
};
use crate::tol::{validation_eps, EPS};

pub const SCHEMA: &str = "qcorr/1";

pub type ComplexSpec = [f64; 2];
pub type MatrixSpec = Vec<Vec<ComplexSpec>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub schema: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(flatten)]
    pub model: ModelSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ModelSpec {
    Quantum(QuantumSpec),
    Classical(ClassicalSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumSpec {
    pub dim: usize,
    pub state: MatrixSpec,
    pub observables: [ObservableSpec; 2],
    #[serde(default)]
    pub joint: JointSpec,
    pub decompositions: Vec<NamedDecomposition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ObservableSpec {
    Povm {
        labels: Vec<String>,
        effects: Vec<MatrixSpec>,
    },
    /// Self-adjoint operator; outcomes are its distinct eigenvalues.
    Operator {
        operator: MatrixSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<ValueLabel>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueLabel {
    pub value: f64,
    pub label: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JointSpec {
    #[default]
    AutoCommuting,
    /// Effects listed in row-major order over the product of the two
    /// observables' outcome spaces.
    Explicit { effects: Vec<MatrixSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedDecomposition {
    pub name: String,
    pub source: DecompositionSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecompositionSource {
    Spectral,
    Components(Vec<ComponentSpec>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub weight: f64,
    pub vector: Vec<ComplexSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSpec {
    pub phase_space: Vec<String>,
    pub state: Vec<f64>,
    pub observables: [KernelSpec; 2],
    #[serde(default)]
    pub joint: ClassicalJointSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub labels: Vec<String>,
    pub kernel: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassicalJointSpec {
    #[default]
    ClassicalProduct,
    /// Rows over the product outcome space in row-major order.
    Explicit { kernel: Vec<Vec<f64>> },
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("unknown example `{0}` (expected one of: {list})", list = PAPER_EXAMPLES.join(", "))]
    UnknownExample(String),
    #[error("engine error: {0}")]
    Engine(#[from] Error),
}

impl ScenarioError {
    /// Process exit code: 1 for input problems, 2 for engine failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Engine(_) => 2,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ScenarioError::Io { .. } => "io",
            ScenarioError::Parse { .. } => "parse",
            ScenarioError::Validation(_) => "validation",
            ScenarioError::UnknownExample(_) => "unknown-example",
            ScenarioError::Engine(_) => "engine",
        }
    }
}

fn invalid(context: &str, e: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Validation(format!("{context}: {e}"))
}

/// Validated scenario: the file as written plus the engine objects built
/// from it.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub model: Model,
}

#[derive(Debug, Clone)]
pub enum Model {
    Quantum(QuantumModel),
    Classical(ClassicalModel),
}

#[derive(Debug, Clone)]
pub struct QuantumModel {
    pub state: DensityOperator,
    pub a1: Povm,
    pub a2: Povm,
    pub joint: Povm,
    /// `None` stands for the spectral decomposition.
    pub decompositions: Vec<(String, Option<ConvexDecomposition>)>,
}

#[derive(Debug, Clone)]
pub struct ClassicalModel {
    pub state: DiscreteMeasure,
    pub a1: ClassicalObservable,
    pub a2: ClassicalObservable,
    pub joint: ClassicalJoint,
}

pub fn parse_scenario(text: &str) -> Result<ScenarioFile, ScenarioError> {
    serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Scenario::from_file(parse_scenario(&text)?)
}

impl Scenario {
    pub fn from_file(file: ScenarioFile) -> Result<Self, ScenarioError> {
        if file.schema != SCHEMA {
            return Err(ScenarioError::Validation(format!(
                "schema is `{}`, expected `{SCHEMA}`",
                file.schema
            )));
        }
        let model = match &file.model {
            ModelSpec::Quantum(q) => Model::Quantum(build_quantum(q)?),
            ModelSpec::Classical(c) => Model::Classical(build_classical(c)?),
        };
        Ok(Self { file, model })
    }

    pub fn to_json(&self) -> String {
        scenario_to_json(&self.file)
    }
}

pub fn scenario_to_json(file: &ScenarioFile) -> String {
    serde_json::to_string_pretty(file).expect("scenario serializes") + "\n"
}

fn to_c64(z: &ComplexSpec) -> C64 {
    C64::new(z[0], z[1])
}

fn matrix_from_spec(
    spec: &MatrixSpec,
    dim: usize,
    context: &str,
) -> Result<ComplexMatrix, ScenarioError> {
    if spec.len() != dim {
        return Err(ScenarioError::Validation(format!(
            "{context}: {} rows, expected {dim}",
            spec.len()
        )));
    }
    let rows = spec
        .iter()
        .map(|r| r.iter().map(to_c64).collect())
        .collect();
    ComplexMatrix::from_rows(rows).map_err(|e| invalid(context, e))
}

pub fn matrix_to_spec(m: &ComplexMatrix) -> MatrixSpec {
    m.rows()
        .into_iter()
        .map(|r| r.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn vector_to_spec(v: &[C64]) -> Vec<ComplexSpec> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn build_observable(
    spec: &ObservableSpec,
    dim: usize,
    context: &str,
) -> Result<Povm, ScenarioError> {
    let tol = validation_eps();
    match spec {
        ObservableSpec::Povm { labels, effects } => {
            let space =
                OutcomeSpace::new(labels.iter().cloned()).map_err(|e| invalid(context, e))?;
            let effects = effects
                .iter()
                .enumerate()
                .map(|(k, e)| matrix_from_spec(e, dim, &format!("{context}.effects[{k}]")))
                .collect::<Result<Vec<_>, _>>()?;
            Povm::with_tolerance(space, effects, tol).map_err(|e| invalid(context, e))
        }
        ObservableSpec::Operator { operator, labels } => {
            let op = matrix_from_spec(operator, dim, &format!("{context}.operator"))?;
            let label_for = |v: f64| -> String {
                labels
                    .as_ref()
                    .and_then(|ls| ls.iter().find(|l| (l.value - v).abs() <= 1e-7))
                    .map(|l| l.label.clone())
                    .unwrap_or_else(|| default_value_label(v))
            };
            Povm::from_self_adjoint(&op, label_for).map_err(|e| invalid(context, e))
        }
    }
}

fn build_quantum(q: &QuantumSpec) -> Result<QuantumModel, ScenarioError> {
    let tol = validation_eps();
    let state = DensityOperator::with_tolerance(matrix_from_spec(&q.state, q.dim, "state")?, tol)
        .map_err(|e| invalid("state", e))?;
    let a1 = build_observable(&q.observables[0], q.dim, "observables[0]")?;
    let a2 = build_observable(&q.observables[1], q.dim, "observables[1]")?;
    let joint = match &q.joint {
        JointSpec::AutoCommuting => {
            joint_from_commuting(&a1, &a2).map_err(|e| invalid("joint", e))?
        }
        JointSpec::Explicit { effects } => {
            let space = ProductSpace::new(a1.space().flatten(), a2.space().flatten());
            let effects = effects
                .iter()
                .enumerate()
                .map(|(k, e)| matrix_from_spec(e, q.dim, &format!("joint.effects[{k}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let j = Povm::with_tolerance(space, effects, tol).map_err(|e| invalid("joint", e))?;
            if !check_joint(&j, &a1, &a2) {
                return Err(ScenarioError::Validation(
                    "joint: marginal observables do not match observables[0] and observables[1]"
                        .into(),
                ));
            }
            j
        }
    };
    if q.decompositions.is_empty() {
        return Err(ScenarioError::Validation(
            "decompositions: list is empty".into(),
        ));
    }
    let mut decompositions = Vec::with_capacity(q.decompositions.len());
    for (k, nd) in q.decompositions.iter().enumerate() {
        let context = format!("decompositions[{k}] `{}`", nd.name);
        if q.decompositions[..k].iter().any(|o| o.name == nd.name) {
            return Err(ScenarioError::Validation(format!(
                "{context}: duplicate name"
            )));
        }
        let dec = match &nd.source {
            DecompositionSource::Spectral => None,
            DecompositionSource::Components(cs) => {
                let components = cs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let psi =
                            PureState::with_tolerance(c.vector.iter().map(to_c64).collect(), tol)
                                .map_err(|e| invalid(&format!("{context}.components[{i}]"), e))?;
                        Ok((c.weight, psi))
                    })
                    .collect::<Result<Vec<_>, ScenarioError>>()?;
                Some(
                    ConvexDecomposition::with_tolerance(components, state.clone(), tol)
                        .map_err(|e| invalid(&context, e))?,
                )
            }
        };
        decompositions.push((nd.name.clone(), dec));
    }
    Ok(QuantumModel {
        state,
        a1,
        a2,
        joint,
        decompositions,
    })
}

fn build_kernel(
    spec: &KernelSpec,
    omega: &PhaseSpace,
    context: &str,
) -> Result<ClassicalObservable, ScenarioError> {
    let space = OutcomeSpace::new(spec.labels.iter().cloned()).map_err(|e| invalid(context, e))?;
    ClassicalObservable::with_tolerance(omega.clone(), space, spec.kernel.clone(), validation_eps())
        .map_err(|e| invalid(context, e))
}

fn build_classical(c: &ClassicalSpec) -> Result<ClassicalModel, ScenarioError> {
    let omega =
        PhaseSpace::new(c.phase_space.iter().cloned()).map_err(|e| invalid("phase_space", e))?;
    let state =
        DiscreteMeasure::with_tolerance(omega.as_space(), c.state.clone(), validation_eps())
            .map_err(|e| invalid("state", e))?;
    let a1 = build_kernel(&c.observables[0], &omega, "observables[0]")?;
    let a2 = build_kernel(&c.observables[1], &omega, "observables[1]")?;
    let joint = match &c.joint {
        ClassicalJointSpec::ClassicalProduct => {
            classical_joint(&a1, &a2).map_err(|e| invalid("joint", e))?
        }
        ClassicalJointSpec::Explicit { kernel } => {
            let space = ProductSpace::new(a1.codomain().flatten(), a2.codomain().flatten());
            let obs = ClassicalObservable::with_tolerance(
                omega.clone(),
                space,
                kernel.clone(),
                validation_eps(),
            )
            .map_err(|e| invalid("joint", e))?;
            ClassicalJoint::new(obs).map_err(|e| invalid("joint", e))?
        }
    };
    Ok(ClassicalModel {
        state,
        a1,
        a2,
        joint,
    })
}

/// Restricts which decompositions a run reports on.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum DecompositionFilter {
    #[default]
    All,
    /// A named decomposition from the file, or `spectral`.
    Only(String),
}

pub fn run_scenario(
    scenario: &Scenario,
    filter: &DecompositionFilter,
) -> Result<ReportDocument, ScenarioError> {
    match &scenario.model {
        Model::Quantum(q) => run_quantum(scenario, q, filter),
        Model::Classical(c) => {
            if let DecompositionFilter::Only(name) = filter {
                return Err(ScenarioError::Validation(format!(
                    "--decomposition `{name}` does not apply to a classical scenario"
                )));
            }
            run_classical(scenario, c)
        }
    }
}

fn run_quantum(
    scenario: &Scenario,
    q: &QuantumModel,
    filter: &DecompositionFilter,
) -> Result<ReportDocument, ScenarioError> {
    let mut selected: Vec<(String, Option<&ConvexDecomposition>)> = match filter {
        DecompositionFilter::All => q
            .decompositions
            .iter()
            .map(|(n, d)| (n.clone(), d.as_ref()))
            .collect(),
        DecompositionFilter::Only(name) => match q.decompositions.iter().find(|(n, _)| n == name) {
            Some((n, d)) => vec![(n.clone(), d.as_ref())],
            None if name == "spectral" => vec![("spectral".to_string(), None)],
            None => {
                return Err(ScenarioError::Validation(format!(
                    "unknown decomposition `{name}` (available: {}, spectral)",
                    q.decompositions
                        .iter()
                        .map(|(n, _)| n.as_str())
                        .collect::<Vec<_>>()
                        .join(", ")
                )))
            }
        },
    };

    let mut splits = Vec::with_capacity(selected.len());
    let mut notes = Vec::new();
    let mut first: Option<CorrelationReport> = None;
    for (name, dec) in selected.drain(..) {
        let dec = match dec {
            Some(d) => d.clone(),
            None => spectral_decompose(&q.state)?.into_spectral(),
        };
        let r = correlation_report(&q.joint, &q.a1, &q.a2, &dec)?;
        splits.push(quantum_split(&name, &dec, &r));
        for (which, res) in [("rho_c", &r.rho_c), ("rho_e", &r.rho_e)] {
            if let Err(e) = res {
                notes.push(format!(
                    "{which} does not exist for decomposition `{name}`: {e}"
                ));
            }
        }
        if first.is_none() {
            first = Some(r);
        }
    }
    let r = first.expect("at least one decomposition");

    let joint_name = "J(A1,A2)(D)";
    let product_name = "A1(D)xA2(D)";
    concentration_notes(
        &mut notes,
        &[
            (joint_name, &r.joint_measure),
            (product_name, &r.marginal_product),
        ],
    );
    if splits.iter().any(|s| s.origin == "spectral") {
        notes.push("decomposition: spectral (one of many); the split into rho_c and rho_e is not canonical".into());
    }

    let flags = Flags {
        joint: match &scenario.file.model {
            ModelSpec::Quantum(QuantumSpec {
                joint: JointSpec::AutoCommuting,
                ..
            }) => "auto-commuting".into(),
            _ => "explicit".into(),
        },
        joint_consistent: true,
        decomposition_relative: true,
        projective: Some([q.a1.is_projective(), q.a2.is_projective()]),
        deterministic: None,
    };
    Ok(ReportDocument {
        schema: REPORT_SCHEMA.into(),
        scenario: scenario.file.clone(),
        flags,
        measures: vec![
            MeasureTable::from_measure("A1(D)", &r.marginals.0),
            MeasureTable::from_measure("A2(D)", &r.marginals.1),
            MeasureTable::from_measure(joint_name, &r.joint_measure),
            MeasureTable::from_measure(product_name, &r.marginal_product),
        ],
        splits,
        notes,
    })
}

fn quantum_split(name: &str, dec: &ConvexDecomposition, r: &CorrelationReport) -> Split {
    let origin = match r.origin {
        DecompositionOrigin::Explicit => "explicit",
        DecompositionOrigin::Spectral => "spectral",
    };
    Split {
        decomposition: name.to_string(),
        origin: origin.into(),
        weights: dec.components().iter().map(|(w, _)| *w).collect(),
        classical_product: MeasureTable::from_measure(
            "sum_i w_i A1(P_i)xA2(P_i)",
            &r.classical_product,
        ),
        rho_t: DensityEntry::from_density(&r.rho_t),
        rho_c: DensityEntry::from_result(&r.rho_c),
        rho_e: DensityEntry::from_result(&r.rho_e),
        product_rule: r.product_rule_residual.map(ProductRuleCheck::new),
    }
}

fn concentration_notes(notes: &mut Vec<String>, measures: &[(&str, &DiscreteMeasure)]) {
    let concentrated: Vec<(&str, usize)> = measures
        .iter()
        .filter_map(|(n, m)| m.dirac_point(EPS).map(|k| (*n, k)))
        .collect();
    if concentrated.len() == measures.len() && concentrated.windows(2).all(|w| w[0].1 == w[1].1) {
        let names: Vec<&str> = concentrated.iter().map(|(n, _)| *n).collect();
        let point = measures[0].1.space().point_label(concentrated[0].1);
        notes.push(format!(
            "{} are both concentrated at the point {point}",
            names.join(" and ")
        ));
    } else {
        for (n, k) in concentrated {
            let point = measures[0].1.space().point_label(k);
            notes.push(format!("{n} is concentrated at the point {point}"));
        }
    }
}

fn run_classical(scenario: &Scenario, c: &ClassicalModel) -> Result<ReportDocument, ScenarioError> {
    let r: ClassicalReport = classical_report(&c.joint, &c.a1, &c.a2, &c.state)?;
    let mut notes = Vec::new();
    for (which, res) in [("rho_c", &r.rho_c), ("rho_e", &r.rho_e)] {
        if let Err(e) = res {
            notes.push(format!("{which} does not exist: {e}"));
        }
    }
    if !r.joint_consistent {
        notes.push("joint kernel is not marginally consistent with the observables".into());
    }
    let joint_name = "J(A1,A2)(mu)";
    let product_name = "A1(mu)xA2(mu)";
    concentration_notes(
        &mut notes,
        &[
            (joint_name, &r.joint_measure),
            (product_name, &r.marginal_product),
        ],
    );
    let canonical = matches!(
        &scenario.file.model,
        ModelSpec::Classical(ClassicalSpec {
            joint: ClassicalJointSpec::ClassicalProduct,
            ..
        })
    );
    let split = Split {
        decomposition: "phase-space".into(),
        origin: "classical-frame".into(),
        weights: c.state.weights().to_vec(),
        classical_product: MeasureTable::from_measure("(A1xA2)(mu)", &r.classical_product),
        rho_t: DensityEntry::from_density(&r.rho_t),
        rho_c: DensityEntry::from_result(&r.rho_c),
        rho_e: DensityEntry::from_result(&r.rho_e),
        product_rule: r.product_rule_residual.map(ProductRuleCheck::new),
    };
    Ok(ReportDocument {
        schema: REPORT_SCHEMA.into(),
        scenario: scenario.file.clone(),
        flags: Flags {
            joint: if canonical {
                "classical-product".into()
            } else {
                "explicit".into()
            },
            joint_consistent: r.joint_consistent,
            decomposition_relative: false,
            projective: None,
            deterministic: Some([r.deterministic.0, r.deterministic.1]),
        },
        measures: vec![
            MeasureTable::from_measure("A1(mu)", &r.marginals.0),
            MeasureTable::from_measure("A2(mu)", &r.marginals.1),
            MeasureTable::from_measure(joint_name, &r.joint_measure),
            MeasureTable::from_measure(product_name, &r.marginal_product),
        ],
        splits: vec![split],
        notes,
    })
}

// ---------------------------------------------------------------------------
// Built-in two-qubit examples

pub const PAPER_EXAMPLES: [&str; 6] = ["i", "ii", "iii", "iii-mixed", "appendix", "appendix-px"];

/// `k=v,k=v` overrides for a built-in example.
pub type Params = BTreeMap<String, String>;

pub fn parse_params(s: &str) -> Result<Params, ScenarioError> {
    let mut out = Params::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| {
            ScenarioError::Validation(format!("parameter `{item}` is not of the form key=value"))
        })?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn take_f64(params: &mut Params, key: &str) -> Result<Option<f64>, ScenarioError> {
    params
        .remove(key)
        .map(|v| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| {
                    ScenarioError::Validation(format!("parameter {key}={v} is not a number"))
                })
        })
        .transpose()
}

fn take_u64(params: &mut Params, key: &str) -> Result<Option<u64>, ScenarioError> {
    params
        .remove(key)
        .map(|v| {
            v.parse::<u64>().map_err(|_| {
                ScenarioError::Validation(format!(
                    "parameter {key}={v} is not a non-negative integer"
                ))
            })
        })
        .transpose()
}

fn reject_leftovers(params: &Params, id: &str) -> Result<(), ScenarioError> {
    match params.keys().next() {
        Some(k) => Err(ScenarioError::Validation(format!(
            "unknown parameter `{k}` for example `{id}`"
        ))),
        None => Ok(()),
    }
}

fn weights4(params: &mut Params, default: [f64; 4]) -> Result<[f64; 4], ScenarioError> {
    let mut w = default;
    for (k, slot) in w.iter_mut().enumerate() {
        if let Some(v) = take_f64(params, &format!("w{}", k + 1))? {
            *slot = v;
        }
    }
    if w.iter().any(|x| *x < 0.0) {
        return Err(ScenarioError::Validation(format!(
            "weights {w:?} must be non-negative"
        )));
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > validation_eps() {
        return Err(ScenarioError::Validation(format!(
            "weights sum to {}, expected 1",
            crate::error::shown(sum)
        )));
    }
    Ok(w)
}

fn degenerate_params(
    params: &mut Params,
    default: (f64, f64),
) -> Result<(f64, f64), ScenarioError> {
    let (a, b) = match (take_f64(params, "a")?, take_f64(params, "b")?) {
        (None, None) => default,
        (Some(a), None) => (a, 0.5 - a),
        (None, Some(b)) => (0.5 - b, b),
        (Some(a), Some(b)) => (a, b),
    };
    if a < 0.0 || b < 0.0 || (a + b - 0.5).abs() > validation_eps() {
        return Err(ScenarioError::Validation(format!(
            "a = {a}, b = {b}: need a, b ≥ 0 and a + b = 1/2"
        )));
    }
    Ok((a, b))
}

/// Scenario file for a built-in example, with overrides applied.
pub fn paper_scenario(id: &str, params: &Params) -> Result<ScenarioFile, ScenarioError> {
    let mut params = params.clone();
    let file = match id {
        "i" => separable_scenario(weights4(&mut params, [0.4, 0.3, 0.2, 0.1])?),
        "ii" => bell_diagonal_scenario(weights4(&mut params, [0.4, 0.3, 0.2, 0.1])?),
        "iii" => {
            let (a, b) = degenerate_params(&mut params, (0.25, 0.25))?;
            degenerate_scenario(a, b)
        }
        "iii-mixed" => {
            let (a, b) = degenerate_params(&mut params, (0.3, 0.2))?;
            degenerate_mixed_scenario(a, b)
        }
        "appendix" => {
            let seed = take_u64(&mut params, "seed")?.unwrap_or(0);
            let n = take_u64(&mut params, "n")?.unwrap_or(4);
            if !(1..=8).contains(&n) {
                return Err(ScenarioError::Validation(format!(
                    "n = {n}: need 1 ≤ n ≤ 8"
                )));
            }
            random_separable_scenario(seed, n as usize)?
        }
        "appendix-px" => {
            let w = take_f64(&mut params, "w")?.unwrap_or(0.5);
            if !(0.0..=1.0).contains(&w) {
                return Err(ScenarioError::Validation(format!(
                    "w = {w}: need 0 ≤ w ≤ 1"
                )));
            }
            appendix_px_scenario(w)
        }
        other => return Err(ScenarioError::UnknownExample(other.to_string())),
    };
    reject_leftovers(&params, id)?;
    Ok(file)
}

pub fn run_paper_example(id: &str, params: &Params) -> Result<ReportDocument, ScenarioError> {
    let scenario = Scenario::from_file(paper_scenario(id, params)?)?;
    run_scenario(&scenario, &DecompositionFilter::All)
}

fn spin_observable_specs() -> [ObservableSpec; 2] {
    let (a1, a2, _) = spin_z_pair();
    let spec = |a: &Povm| ObservableSpec::Povm {
        labels: a.space().point_labels(),
        effects: a.effects().iter().map(matrix_to_spec).collect(),
    };
    [spec(&a1), spec(&a2)]
}

fn bell_states() -> [PureState; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [
        PureState::from_real(&[h, 0.0, 0.0, h]).expect("unit"),
        PureState::from_real(&[h, 0.0, 0.0, -h]).expect("unit"),
        PureState::from_real(&[0.0, h, h, 0.0]).expect("unit"),
        PureState::from_real(&[0.0, h, -h, 0.0]).expect("unit"),
    ]
}

/// `ψ₊ψ₊, ψ₋ψ₋, ψ₊ψ₋, ψ₋ψ₊`.
fn product_basis() -> [PureState; 4] {
    let (u, d) = (PureState::spin_up(), PureState::spin_down());
    [u.tensor(&u), d.tensor(&d), u.tensor(&d), d.tensor(&u)]
}

fn mixture_matrix(components: &[(f64, PureState)]) -> ComplexMatrix {
    let dim = components[0].1.dim();
    components
        .iter()
        .fold(ComplexMatrix::zeros(dim), |acc, (w, psi)| {
            &acc + &psi.projector().scale(*w)
        })
}

fn decomposition_spec(name: &str, components: &[(f64, PureState)]) -> NamedDecomposition {
    NamedDecomposition {
        name: name.into(),
        source: DecompositionSource::Components(
            components
                .iter()
                .filter(|(w, _)| *w > 0.0)
                .map(|(w, psi)| ComponentSpec {
                    weight: *w,
                    vector: vector_to_spec(psi.amplitudes()),
                })
                .collect(),
        ),
    }
}

fn two_qubit_scenario(
    name: &str,
    description: String,
    state: &ComplexMatrix,
    decompositions: Vec<NamedDecomposition>,
) -> ScenarioFile {
    ScenarioFile {
        schema: SCHEMA.into(),
        name: name.into(),
        description: Some(description),
        model: ModelSpec::Quantum(QuantumSpec {
            dim: 4,
            state: matrix_to_spec(state),
            observables: spin_observable_specs(),
            joint: JointSpec::AutoCommuting,
            decompositions,
        }),
    }
}

fn weighted(weights: &[f64], states: &[PureState]) -> Vec<(f64, PureState)> {
    weights
        .iter()
        .copied()
        .zip(states.iter().cloned())
        .collect()
}

/// `w₁P₊₊ + w₂P₋₋ + w₃P₊₋ + w₄P₋₊` with the spin-z pair.
pub fn separable_scenario(w: [f64; 4]) -> ScenarioFile {
    let comps = weighted(&w, &product_basis());
    two_qubit_scenario(
        "separable",
        format!("separable mixed state w1 P++ + w2 P-- + w3 P+- + w4 P-+ with w = {w:?}"),
        &mixture_matrix(&comps),
        vec![decomposition_spec("product-basis", &comps)],
    )
}

/// Bell-diagonal state `Σ wₖ′ Pₖ` with the spin-z pair.
pub fn bell_diagonal_scenario(w: [f64; 4]) -> ScenarioFile {
    let comps = weighted(&w, &bell_states());
    two_qubit_scenario(
        "bell-diagonal",
        format!("Bell diagonal state w1 P1 + w2 P2 + w3 P3 + w4 P4 with w = {w:?}"),
        &mixture_matrix(&comps),
        vec![decomposition_spec("bell-basis", &comps)],
    )
}

fn degenerate_decompositions(a: f64, b: f64) -> [(&'static str, Vec<(f64, PureState)>); 3] {
    let pb = product_basis();
    let bell = bell_states();
    [
        ("product-basis", weighted(&[a, a, b, b], &pb)),
        ("bell-basis", weighted(&[a, a, b, b], &bell)),
        (
            "mixed-basis",
            vec![
                (a, pb[0].clone()),
                (a, pb[1].clone()),
                (b, bell[2].clone()),
                (b, bell[3].clone()),
            ],
        ),
    ]
}

/// Degenerate state `D_d` (`a + b = ½`) under its three decompositions.
pub fn degenerate_scenario(a: f64, b: f64) -> ScenarioFile {
    let decs = degenerate_decompositions(a, b);
    two_qubit_scenario(
        "degenerate",
        format!(
            "degenerate state a(P++ + P--) + b(P+- + P-+) with a = {a}, b = {b}, \
             under the product-basis, Bell-basis and mixed-basis decompositions"
        ),
        &mixture_matrix(&decs[0].1),
        decs.iter().map(|(n, c)| decomposition_spec(n, c)).collect(),
    )
}

/// Degenerate state `D_d` with only the mixed product/Bell decomposition.
pub fn degenerate_mixed_scenario(a: f64, b: f64) -> ScenarioFile {
    let decs = degenerate_decompositions(a, b);
    two_qubit_scenario(
        "degenerate-mixed",
        format!("degenerate state with a = {a}, b = {b} under a P++ + a P-- + b P3 + b P4"),
        &mixture_matrix(&decs[0].1),
        vec![decomposition_spec(decs[2].0, &decs[2].1)],
    )
}

/// `w P₊⊗P₊ + (1−w) Pₓ⊗Pₓ`.
pub fn appendix_px_scenario(w: f64) -> ScenarioFile {
    let up = PureState::spin_up();
    let x = PureState::spin_x_up();
    let comps = vec![(w, up.tensor(&up)), (1.0 - w, x.tensor(&x))];
    let state = &tensor(&up.projector(), &up.projector()).scale(w)
        + &tensor(&x.projector(), &x.projector()).scale(1.0 - w);
    two_qubit_scenario(
        "appendix-px",
        format!("separable state w P+ (x) P+ + (1-w) Px (x) Px with w = {w}"),
        &state,
        vec![decomposition_spec("product-states", &comps)],
    )
}

/// Random separable state `Σ wᵢ 𝒫ᵢ ⊗ 𝒬ᵢ` with `n` product terms.
pub fn random_separable_scenario(seed: u64, n: usize) -> Result<ScenarioFile, ScenarioError> {
    let dec = random::separable_state(&mut random::seeded(seed), n)?;
    Ok(two_qubit_scenario(
        "appendix",
        format!("random separable state with {n} product terms (seed {seed})"),
        dec.target().matrix(),
        vec![decomposition_spec("product-states", dec.components())],
    ))
}

/// Fuzzy pair with rows (0.7, 0.3), (0.3, 0.7) and a correlated joint at a
/// Dirac state.
pub fn fuzzy_classical_scenario() -> ScenarioFile {
    let c = 0.21;
    ScenarioFile {
        schema: SCHEMA.into(),
        name: "fuzzy-classical".into(),
        description: Some(
            "fuzzy classical observables with a marginally consistent, perfectly correlated joint \
             evaluated at the pure state delta_w1"
                .into(),
        ),
        model: ModelSpec::Classical(ClassicalSpec {
            phase_space: vec!["w1".into(), "w2".into()],
            state: vec![1.0, 0.0],
            observables: [
                KernelSpec {
                    labels: vec!["+1/2".into(), "-1/2".into()],
                    kernel: vec![vec![0.7, 0.3], vec![0.3, 0.7]],
                },
                KernelSpec {
                    labels: vec!["+1/2".into(), "-1/2".into()],
                    kernel: vec![vec![0.7, 0.3], vec![0.3, 0.7]],
                },
            ],
            joint: ClassicalJointSpec::Explicit {
                kernel: vec![
                    vec![0.49 + c, 0.21 - c, 0.21 - c, 0.09 + c],
                    vec![0.09 + c, 0.21 - c, 0.21 - c, 0.49 + c],
                ],
            },
        }),
    }
}

/// Deterministic identity observables on two points at the uniform state.
pub fn deterministic_classical_scenario() -> ScenarioFile {
    ScenarioFile {
        schema: SCHEMA.into(),
        name: "deterministic-classical".into(),
        description: Some(
            "identity observables on a two-point phase space at the uniform state".into(),
        ),
        model: ModelSpec::Classical(ClassicalSpec {
            phase_space: vec!["w1".into(), "w2".into()],
            state: vec![0.5, 0.5],
            observables: [
                KernelSpec {
                    labels: vec!["0".into(), "1".into()],
                    kernel: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                },
                KernelSpec {
                    labels: vec!["0".into(), "1".into()],
                    kernel: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                },
            ],
            joint: ClassicalJointSpec::ClassicalProduct,
        }),
    }
}

/// Every scenario shipped under `scenarios/`, keyed by file name.
pub fn bundled_scenarios() -> Vec<(&'static str, ScenarioFile)> {
    let none = Params::new();
    let paper = |id: &str| paper_scenario(id, &none).expect("defaults are valid");
    vec![
        ("separable.json", paper("i")),
        ("bell_diagonal.json", paper("ii")),
        ("degenerate.json", paper("iii")),
        ("degenerate_mixed.json", paper("iii-mixed")),
        ("appendix_separable.json", paper("appendix")),
        ("appendix_px.json", paper("appendix-px")),
        ("fuzzy_classical.json", fuzzy_classical_scenario()),
        (
            "deterministic_classical.json",
            deterministic_classical_scenario(),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(s: &str) -> Params {
        parse_params(s).unwrap()
    }

    #[test]
    fn parse_params_handles_lists() {
        let p = params("w1=0.5, w2=0.5,w3=0");
        assert_eq!(p.len(), 3);
        assert_eq!(p["w2"], "0.5");
        assert!(parse_params("w1").is_err());
        assert!(parse_params("").unwrap().is_empty());
    }

    #[test]
    fn paper_scenario_parameter_validation() {
        assert!(matches!(
            paper_scenario("iv", &Params::new()),
            Err(ScenarioError::UnknownExample(_))
        ));
        assert!(paper_scenario("i", &params("w1=0.5")).is_err());
        assert!(paper_scenario("i", &params("w5=0.1")).is_err());
        assert!(paper_scenario("iii", &params("a=0.3,b=0.3")).is_err());
        assert!(paper_scenario("iii", &params("a=0.3")).is_ok());
        assert!(paper_scenario("appendix-px", &params("w=1.5")).is_err());
        assert!(paper_scenario("appendix", &params("n=9")).is_err());
        assert!(paper_scenario("ii", &params("w1=1,w2=0,w3=0,w4=0")).is_ok());
    }

    #[test]
    fn scenario_rejects_bad_trace() {
        let mut file = separable_scenario([0.4, 0.3, 0.2, 0.1]);
        if let ModelSpec::Quantum(q) = &mut file.model {
            q.state[0][0][0] -= 0.1;
        }
        let err = Scenario::from_file(file).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("trace ≠ 1"), "{err}");
    }

    #[test]
    fn scenario_rejects_decomposition_of_other_state() {
        let mut file = separable_scenario([0.4, 0.3, 0.2, 0.1]);
        if let ModelSpec::Quantum(q) = &mut file.model {
            q.decompositions = separable_scenario([0.1, 0.2, 0.3, 0.4])
                .model_quantum()
                .decompositions
                .clone();
        }
        let err = Scenario::from_file(file).unwrap_err();
        assert!(err.to_string().contains("reconstruct"), "{err}");
    }

    #[test]
    fn scenario_rejects_bad_weight_sum() {
        let mut file = separable_scenario([0.4, 0.3, 0.2, 0.1]);
        if let ModelSpec::Quantum(q) = &mut file.model {
            if let DecompositionSource::Components(cs) = &mut q.decompositions[0].source {
                cs[0].weight = 0.38;
            }
        }
        let err = Scenario::from_file(file).unwrap_err();
        assert!(err.to_string().contains("weights sum to 0.98"), "{err}");
    }

    #[test]
    fn explicit_joint_must_match_marginals() {
        let mut file = separable_scenario([0.4, 0.3, 0.2, 0.1]);
        let (_, _, j) = spin_z_pair();
        let mut effects: Vec<MatrixSpec> = j.effects().iter().map(matrix_to_spec).collect();
        if let ModelSpec::Quantum(q) = &mut file.model {
            q.joint = JointSpec::Explicit {
                effects: effects.clone(),
            };
        }
        assert!(Scenario::from_file(file.clone()).is_ok());
        effects.swap(1, 2);
        if let ModelSpec::Quantum(q) = &mut file.model {
            q.joint = JointSpec::Explicit { effects };
        }
        assert!(matches!(
            Scenario::from_file(file),
            Err(ScenarioError::Validation(_))
        ));
    }

    #[test]
    fn spectral_decomposition_is_deferred() {
        let mut file = separable_scenario([0.4, 0.3, 0.2, 0.1]);
        if let ModelSpec::Quantum(q) = &mut file.model {
            q.decompositions = vec![NamedDecomposition {
                name: "spectral".into(),
                source: DecompositionSource::Spectral,
            }];
        }
        let s = Scenario::from_file(file).unwrap();
        let Model::Quantum(q) = &s.model else {
            panic!()
        };
        assert!(q.decompositions[0].1.is_none());
        let report = run_scenario(&s, &DecompositionFilter::All).unwrap();
        assert_eq!(report.splits[0].origin, "spectral");
        assert!(report
            .notes
            .iter()
            .any(|n| n.contains("spectral (one of many)")));
    }

    #[test]
    fn decomposition_filter() {
        let s = Scenario::from_file(degenerate_scenario(0.3, 0.2)).unwrap();
        let r = run_scenario(&s, &DecompositionFilter::Only("bell-basis".into())).unwrap();
        assert_eq!(r.splits.len(), 1);
        let r = run_scenario(&s, &DecompositionFilter::Only("spectral".into())).unwrap();
        assert_eq!(r.splits[0].origin, "spectral");
        assert!(run_scenario(&s, &DecompositionFilter::Only("nope".into())).is_err());
    }

    #[test]
    fn operator_form_observables() {
        let mut file = separable_scenario([0.4, 0.3, 0.2, 0.1]);
        let sz = ComplexMatrix::diagonal(&[0.5, -0.5]);
        let id = ComplexMatrix::identity(2);
        if let ModelSpec::Quantum(q) = &mut file.model {
            q.observables = [
                ObservableSpec::Operator {
                    operator: matrix_to_spec(&tensor(&sz, &id)),
                    labels: None,
                },
                ObservableSpec::Operator {
                    operator: matrix_to_spec(&tensor(&id, &sz)),
                    labels: Some(vec![
                        ValueLabel {
                            value: 0.5,
                            label: "up".into(),
                        },
                        ValueLabel {
                            value: -0.5,
                            label: "down".into(),
                        },
                    ]),
                },
            ];
        }
        let s = Scenario::from_file(file).unwrap();
        let r = run_scenario(&s, &DecompositionFilter::All).unwrap();
        assert_eq!(r.measures[1].points, vec!["up", "down"]);
        let rho_t = r.splits[0].rho_t.values.as_ref().unwrap();
        assert!((rho_t[0].unwrap() - 0.4 / (0.6 * 0.5)).abs() < 1e-9);
    }

    #[test]
    fn appendix_px_at_w_one_notes_concentration() {
        let r = run_paper_example("appendix-px", &params("w=1")).unwrap();
        assert!(
            r.notes
                .iter()
                .any(|n| n.contains("both concentrated at the point (+1/2,+1/2)")),
            "{:?}",
            r.notes
        );
        let rho_t = r.splits[0].rho_t.values.as_ref().unwrap();
        assert_eq!(rho_t[0], Some(1.0));
        assert!(rho_t[1..].iter().all(Option::is_none));
    }

    #[test]
    fn classical_scenarios_run() {
        let s = Scenario::from_file(fuzzy_classical_scenario()).unwrap();
        let r = run_scenario(&s, &DecompositionFilter::All).unwrap();
        assert!(r.flags.joint_consistent);
        assert_eq!(r.flags.deterministic, Some([false, false]));
        assert!(r.splits[0].product_rule.as_ref().unwrap().pass);
        let s = Scenario::from_file(deterministic_classical_scenario()).unwrap();
        let r = run_scenario(&s, &DecompositionFilter::All).unwrap();
        assert_eq!(
            r.splits[0].rho_t.values.as_ref().unwrap(),
            &vec![Some(2.0), Some(0.0), Some(0.0), Some(2.0)]
        );
        assert!(run_scenario(&s, &DecompositionFilter::Only("x".into())).is_err());
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_scenario("{\n  \"schema\": \"qcorr/1\",\n  \"name\": 3\n}").unwrap_err();
        match err {
            ScenarioError::Parse { line, .. } => assert!(line >= 1),
            other => panic!("{other:?}"),
        }
        let err = Scenario::from_file(ScenarioFile {
            schema: "qcorr/2".into(),
            ..fuzzy_classical_scenario()
        })
        .unwrap_err();
        assert!(err.to_string().contains("schema"));
    }

    impl ScenarioFile {
        fn model_quantum(&self) -> &QuantumSpec {
            match &self.model {
                ModelSpec::Quantum(q) => q,
                ModelSpec::Classical(_) => panic!("not quantum"),
            }
        }
    }
}
