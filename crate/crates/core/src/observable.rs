//! Observables represented by positive-operator-valued measures, their
//! outcome distributions and joint observables.

use crate::error::{Error, Result};
use crate::hilbert::{eigh, expectation, tensor, ComplexMatrix, DensityOperator, PureState};
use crate::measure::{DiscreteMeasure, OutcomeSpace, ProductSpace, Side, Space};
use crate::tol::{EIGEN_GROUPING_TOL, EPS};

/// Finite-outcome POVM: one positive effect per outcome, summing to `I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    space: Space,
    effects: Vec<ComplexMatrix>,
    dim: usize,
    projective: bool,
}

impl Povm {
    pub fn new(space: impl Into<Space>, effects: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tolerance(space, effects, EPS)
    }

    pub fn with_tolerance(
        space: impl Into<Space>,
        effects: Vec<ComplexMatrix>,
        tol: f64,
    ) -> Result<Self> {
        let space = space.into();
        if effects.len() != space.len() {
            return Err(Error::invalid(
                "POVM",
                format!("{} effects for {} outcomes", effects.len(), space.len()),
            ));
        }
        let dim = effects[0].dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for (k, e) in effects.iter().enumerate() {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.dim(),
                });
            }
            if !e.is_positive_semidefinite(tol) {
                return Err(Error::invalid(
                    "POVM",
                    format!(
                        "effect for {} is not positive semidefinite",
                        space.point_label(k)
                    ),
                ));
            }
            sum = &sum + e;
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if dev > tol {
            return Err(Error::invalid(
                "POVM",
                format!("effects sum to identity only within {dev:.3e}"),
            ));
        }
        let projective = is_projective(&effects, tol);
        Ok(Self {
            space,
            effects,
            dim,
            projective,
        })
    }

    /// Projection-valued measure of a self-adjoint operator, one outcome per
    /// distinct eigenvalue (eigenvalues closer than 1e-7 are merged).
    /// Outcomes are ordered by decreasing eigenvalue and labelled by `label`.
    pub fn from_self_adjoint(op: &ComplexMatrix, label: impl Fn(f64) -> String) -> Result<Self> {
        let eig = eigh(op)?;
        let mut groups: Vec<(f64, ComplexMatrix)> = Vec::new();
        for (value, v) in eig.values.iter().zip(&eig.vectors) {
            let proj = ComplexMatrix::outer(v);
            match groups.last_mut() {
                Some((rep, acc)) if (*rep - value).abs() <= EIGEN_GROUPING_TOL => {
                    *acc = &*acc + &proj;
                }
                _ => groups.push((*value, proj)),
            }
        }
        let space = OutcomeSpace::new(groups.iter().map(|(v, _)| label(*v)))?;
        Self::new(space, groups.into_iter().map(|(_, p)| p).collect())
    }

    /// Single-outcome observable `{I}`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            space: OutcomeSpace::new(["*"]).expect("one label").into(),
            effects: vec![ComplexMatrix::identity(dim)],
            dim,
            projective: true,
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn effect(&self, label: &str) -> Result<&ComplexMatrix> {
        Ok(&self.effects[self.space.index_of(label)?])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_projective(&self) -> bool {
        self.projective
    }

    /// Largest entrywise difference between matching effects; infinite when
    /// the outcome spaces differ.
    pub fn max_effect_diff(&self, other: &Povm) -> f64 {
        if self.space.flatten() != other.space.flatten() || self.dim != other.dim {
            return f64::INFINITY;
        }
        self.effects
            .iter()
            .zip(&other.effects)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

fn is_projective(effects: &[ComplexMatrix], tol: f64) -> bool {
    if !effects.iter().all(|e| e.is_idempotent(tol)) {
        return false;
    }
    for (i, a) in effects.iter().enumerate() {
        for b in &effects[i + 1..] {
            if (a * b).frobenius_norm() > tol {
                return false;
            }
        }
    }
    true
}

/// Outcome distribution `ξ ↦ Tr(E(ξ)·D)`.
pub fn outcome_measure(a: &Povm, d: &DensityOperator) -> Result<DiscreteMeasure> {
    if a.dim != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: d.dim(),
        });
    }
    let weights = a
        .effects
        .iter()
        .map(|e| expectation(e, d))
        .collect::<Result<Vec<_>>>()?;
    DiscreteMeasure::new(a.space.clone(), weights)
}

/// The joint PVM `E(ξ₁,ξ₂) = E₁(ξ₁)·E₂(ξ₂)` of two commuting PVMs.
pub fn joint_from_commuting(a1: &Povm, a2: &Povm) -> Result<Povm> {
    if a1.dim != a2.dim {
        return Err(Error::DimensionMismatch {
            expected: a1.dim,
            found: a2.dim,
        });
    }
    if !a1.projective || !a2.projective {
        return Err(Error::NotProjective);
    }
    let mut effects = Vec::with_capacity(a1.effects.len() * a2.effects.len());
    for (i, e1) in a1.effects.iter().enumerate() {
        for (j, e2) in a2.effects.iter().enumerate() {
            let ab = e1 * e2;
            let ba = e2 * e1;
            let norm = (&ab - &ba).frobenius_norm();
            if norm > EPS {
                return Err(Error::NonCommuting {
                    left: a1.space.point_label(i),
                    right: a2.space.point_label(j),
                    norm,
                });
            }
            effects.push(ab.hermitian_part());
        }
    }
    let space = ProductSpace::new(a1.space.flatten(), a2.space.flatten());
    Povm::new(space, effects)
}

/// Coarse-grains a joint observable to one of its factors.
pub fn marginal_observable(j: &Povm, side: Side) -> Result<Povm> {
    let p = j.space.as_product()?;
    let (n_left, n_right) = (p.left().len(), p.right().len());
    let (space, effects) = match side {
        Side::Left => (
            p.left().clone(),
            (0..n_left)
                .map(|i| sum_effects((0..n_right).map(|k| &j.effects[p.index(i, k)]), j.dim))
                .collect::<Vec<_>>(),
        ),
        Side::Right => (
            p.right().clone(),
            (0..n_right)
                .map(|k| sum_effects((0..n_left).map(|i| &j.effects[p.index(i, k)]), j.dim))
                .collect::<Vec<_>>(),
        ),
    };
    let projective = is_projective(&effects, EPS);
    Ok(Povm {
        space: space.into(),
        effects,
        dim: j.dim,
        projective,
    })
}

fn sum_effects<'a>(effects: impl Iterator<Item = &'a ComplexMatrix>, dim: usize) -> ComplexMatrix {
    effects.fold(ComplexMatrix::zeros(dim), |acc, e| &acc + e)
}

/// Whether `j` is a joint observable of `a1` and `a2`, i.e. both of its
/// marginal observables match entrywise within ε.
pub fn check_joint(j: &Povm, a1: &Povm, a2: &Povm) -> bool {
    let Ok(p) = j.space.as_product() else {
        return false;
    };
    if *p.left() != a1.space.flatten() || *p.right() != a2.space.flatten() {
        return false;
    }
    let (Ok(m1), Ok(m2)) = (
        marginal_observable(j, Side::Left),
        marginal_observable(j, Side::Right),
    ) else {
        return false;
    };
    m1.max_effect_diff(a1) <= EPS && m2.max_effect_diff(a2) <= EPS
}

/// Spin-z observables of a two-qubit system and their joint PVM.
///
/// Returns `(A₁, A₂, J)` with `A₁ = (½P₊ − ½P₋) ⊗ I`, `A₂ = I ⊗ (½P₊ − ½P₋)`
/// on outcomes `{+1/2, -1/2}` and `J` the product PVM with effects
/// `P₊₊, P₊₋, P₋₊, P₋₋` in row-major order.
pub fn spin_z_pair() -> (Povm, Povm, Povm) {
    let p_up = PureState::spin_up().projector();
    let p_down = PureState::spin_down().projector();
    let id = ComplexMatrix::identity(2);
    let spin = OutcomeSpace::spin_half();
    let a1 = Povm {
        space: spin.clone().into(),
        effects: vec![tensor(&p_up, &id), tensor(&p_down, &id)],
        dim: 4,
        projective: true,
    };
    let a2 = Povm {
        space: spin.into(),
        effects: vec![tensor(&id, &p_up), tensor(&id, &p_down)],
        dim: 4,
        projective: true,
    };
    let j = joint_from_commuting(&a1, &a2).expect("spin-z components commute");
    (a1, a2, j)
}

/// Formats eigenvalues as outcome labels: `0.5` becomes `+1/2`, other values
/// use their shortest decimal form with an explicit sign.
pub fn default_value_label(value: f64) -> String {
    let v = if value.abs() < EIGEN_GROUPING_TOL {
        0.0
    } else {
        value
    };
    let twice = 2.0 * v;
    if (twice - twice.round()).abs() < EIGEN_GROUPING_TOL && twice.round() as i64 % 2 != 0 {
        let n = twice.round() as i64;
        return format!("{}{}/2", if n > 0 { "+" } else { "-" }, n.abs());
    }
    let rounded = (v * 1e9).round() / 1e9;
    if rounded == 0.0 {
        "0".into()
    } else {
        format!("{rounded:+}")
    }
}
