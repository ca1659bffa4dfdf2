//! Total correlation between two quantum observables and its split into
//! classical correlation and entanglement relative to a convex
//! decomposition of the state into pure states.
//!
//! With `J` the joint observable, `ν_dec = Σᵢ wᵢ A₁(Pᵢ) ⊠ A₂(Pᵢ)` the
//! decomposition-weighted product measure and `A₁(D) ⊠ A₂(D)` the product of
//! the marginals:
//!
//! | density | numerator   | denominator       |
//! |---------|-------------|-------------------|
//! | `ρ_t`   | `J(D)`      | `A₁(D) ⊠ A₂(D)`   |
//! | `ρ_c`   | `ν_dec`     | `A₁(D) ⊠ A₂(D)`   |
//! | `ρ_e`   | `J(D)`      | `ν_dec`           |
//!
//! `ρ_t` does not depend on the decomposition; `ρ_c` and `ρ_e` do, and
//! `ρ_c · ρ_e = ρ_t` wherever both exist.

use crate::error::{Error, Result};
use crate::hilbert::{spectral_decompose, ComplexMatrix, DensityOperator, PureState, C64};
use crate::measure::{density, mix, product, DensityFunction, DiscreteMeasure};
use crate::observable::{check_joint, outcome_measure, Povm};
use crate::tol::{EPS, PRODUCT_RULE_TOL, RECONSTRUCTION_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionOrigin {
    /// Supplied by the caller.
    Explicit,
    /// Eigendecomposition chosen by the engine; one of many.
    Spectral,
}

/// Weighted pure states realizing a density operator, `D = Σ wᵢ |ψᵢ⟩⟨ψᵢ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexDecomposition {
    components: Vec<(f64, PureState)>,
    target: DensityOperator,
    origin: DecompositionOrigin,
}

impl ConvexDecomposition {
    /// Decomposition whose target is the mixture it describes.
    pub fn new(components: Vec<(f64, PureState)>) -> Result<Self> {
        check_weights(&components, EPS)?;
        let target = DensityOperator::from_mixture(&components)?;
        Ok(Self {
            components,
            target,
            origin: DecompositionOrigin::Explicit,
        })
    }

    /// Decomposition claimed to realize `target`; the mixture must match it
    /// entrywise within 1e-8.
    pub fn with_target(components: Vec<(f64, PureState)>, target: DensityOperator) -> Result<Self> {
        Self::with_tolerance(components, target, EPS)
    }

    pub fn with_tolerance(
        components: Vec<(f64, PureState)>,
        target: DensityOperator,
        tol: f64,
    ) -> Result<Self> {
        check_weights(&components, tol)?;
        let mut sum = ComplexMatrix::zeros(target.dim());
        for (w, psi) in &components {
            if psi.dim() != target.dim() {
                return Err(Error::DimensionMismatch {
                    expected: target.dim(),
                    found: psi.dim(),
                });
            }
            sum = &sum + &psi.projector().scale(*w);
        }
        let dev = sum.max_abs_diff(target.matrix());
        if dev > RECONSTRUCTION_TOL.max(tol) {
            return Err(Error::invalid(
                "decomposition",
                format!("components do not reconstruct the state (max deviation {dev:.3e})"),
            ));
        }
        Ok(Self {
            components,
            target,
            origin: DecompositionOrigin::Explicit,
        })
    }

    /// The trivial one-component decomposition of a pure state.
    pub fn pure(state: PureState) -> Self {
        let target = DensityOperator::from_pure(&state);
        Self {
            components: vec![(1.0, state)],
            target,
            origin: DecompositionOrigin::Explicit,
        }
    }

    pub(crate) fn into_spectral(mut self) -> Self {
        self.origin = DecompositionOrigin::Spectral;
        self
    }

    pub fn components(&self) -> &[(f64, PureState)] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn target(&self) -> &DensityOperator {
        &self.target
    }

    pub fn origin(&self) -> DecompositionOrigin {
        self.origin
    }

    /// Another decomposition of the same state: with `φᵢ = √wᵢ ψᵢ`, the new
    /// unnormalized vectors are `φ′ⱼ = Σᵢ U_ji φᵢ` for a unitary `U` of size
    /// at least `len()`. Components with vanishing weight are dropped.
    pub fn remix(&self, unitary: &ComplexMatrix) -> Result<Self> {
        let m = unitary.dim();
        if m < self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: m,
            });
        }
        let dim = self.target.dim();
        let mut components = Vec::with_capacity(m);
        for j in 0..m {
            let mut phi = vec![C64::new(0.0, 0.0); dim];
            for (i, (w, psi)) in self.components.iter().enumerate() {
                let coeff = unitary[(j, i)] * w.sqrt();
                for (acc, a) in phi.iter_mut().zip(psi.amplitudes()) {
                    *acc += coeff * a;
                }
            }
            let weight: f64 = phi.iter().map(C64::norm_sqr).sum();
            if weight > 1e-14 {
                components.push((weight, PureState::normalized(phi)?));
            }
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        for (w, _) in &mut components {
            *w /= total;
        }
        Self::with_target(components, self.target.clone())
    }
}

fn check_weights(components: &[(f64, PureState)], tol: f64) -> Result<()> {
    if components.is_empty() {
        return Err(Error::invalid("decomposition", "no components"));
    }
    if let Some((w, _)) = components
        .iter()
        .find(|(w, _)| !(w.is_finite() && *w > 0.0))
    {
        return Err(Error::invalid(
            "decomposition",
            format!("component weight {w} is not positive"),
        ));
    }
    let sum: f64 = components.iter().map(|(w, _)| w).sum();
    if (sum - 1.0).abs() > tol {
        return Err(Error::invalid(
            "decomposition",
            format!("weights sum to {}", crate::error::shown(sum)),
        ));
    }
    Ok(())
}

fn check_dims(a1: &Povm, a2: &Povm, d: &DensityOperator) -> Result<()> {
    for a in [a1, a2] {
        if a.dim() != d.dim() {
            return Err(Error::DimensionMismatch {
                expected: d.dim(),
                found: a.dim(),
            });
        }
    }
    Ok(())
}

/// `Σᵢ wᵢ A₁(Pᵢ) ⊠ A₂(Pᵢ)` along the given decomposition.
pub fn classical_product_measure(
    a1: &Povm,
    a2: &Povm,
    dec: &ConvexDecomposition,
) -> Result<DiscreteMeasure> {
    check_dims(a1, a2, dec.target())?;
    let products = dec
        .components
        .iter()
        .map(|(_, psi)| {
            let p = DensityOperator::from_pure(psi);
            Ok(product(
                &outcome_measure(a1, &p)?,
                &outcome_measure(a2, &p)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let weighted: Vec<(f64, &DiscreteMeasure)> = dec
        .components
        .iter()
        .map(|(w, _)| *w)
        .zip(products.iter())
        .collect();
    mix(&weighted)
}

/// `A₁(D) ⊠ A₂(D)`.
pub fn marginal_product_measure(
    a1: &Povm,
    a2: &Povm,
    d: &DensityOperator,
) -> Result<DiscreteMeasure> {
    check_dims(a1, a2, d)?;
    Ok(product(&outcome_measure(a1, d)?, &outcome_measure(a2, d)?))
}

/// Total correlation `ρ_t = dJ(D) / d(A₁(D) ⊠ A₂(D))`.
pub fn total_correlation(
    j: &Povm,
    a1: &Povm,
    a2: &Povm,
    d: &DensityOperator,
) -> Result<DensityFunction> {
    if !check_joint(j, a1, a2) {
        return Err(Error::JointMarginalMismatch);
    }
    density(
        &outcome_measure(j, d)?,
        &marginal_product_measure(a1, a2, d)?,
    )
}

/// Classical correlation `ρ_c` relative to `dec`.
pub fn classical_correlation(
    a1: &Povm,
    a2: &Povm,
    dec: &ConvexDecomposition,
) -> Result<DensityFunction> {
    density(
        &classical_product_measure(a1, a2, dec)?,
        &marginal_product_measure(a1, a2, dec.target())?,
    )
}

/// Entanglement `ρ_e` relative to `dec`.
pub fn entanglement(
    j: &Povm,
    a1: &Povm,
    a2: &Povm,
    dec: &ConvexDecomposition,
) -> Result<DensityFunction> {
    if !check_joint(j, a1, a2) {
        return Err(Error::JointMarginalMismatch);
    }
    density(
        &outcome_measure(j, dec.target())?,
        &classical_product_measure(a1, a2, dec)?,
    )
}

/// All three densities for one decomposition, with the measures they were
/// built from and the product-rule audit.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub origin: DecompositionOrigin,
    pub rho_t: DensityFunction,
    pub rho_c: Result<DensityFunction>,
    pub rho_e: Result<DensityFunction>,
    /// `max |ρ_c·ρ_e − ρ_t|` over the common support; `None` when a factor
    /// does not exist.
    pub product_rule_residual: Option<f64>,
    /// `J(A₁,A₂)(D)`.
    pub joint_measure: DiscreteMeasure,
    /// `A₁(D)` and `A₂(D)`.
    pub marginals: (DiscreteMeasure, DiscreteMeasure),
    /// `A₁(D) ⊠ A₂(D)`.
    pub marginal_product: DiscreteMeasure,
    /// `Σ wᵢ A₁(Pᵢ) ⊠ A₂(Pᵢ)`.
    pub classical_product: DiscreteMeasure,
}

impl CorrelationReport {
    pub fn product_rule_holds(&self) -> Option<bool> {
        self.product_rule_residual.map(|r| r < PRODUCT_RULE_TOL)
    }
}

/// Product-rule residual `max |ρ_c·ρ_e − ρ_t|` on points where all three
/// densities are defined.
pub fn product_rule_residual(
    rho_t: &DensityFunction,
    rho_c: &DensityFunction,
    rho_e: &DensityFunction,
) -> f64 {
    rho_t
        .values()
        .iter()
        .zip(rho_c.values())
        .zip(rho_e.values())
        .filter_map(|((t, c), e)| Some((c.as_ref()? * e.as_ref()? - t.as_ref()?).abs()))
        .fold(0.0, f64::max)
}

pub fn correlation_report(
    j: &Povm,
    a1: &Povm,
    a2: &Povm,
    dec: &ConvexDecomposition,
) -> Result<CorrelationReport> {
    if !check_joint(j, a1, a2) {
        return Err(Error::JointMarginalMismatch);
    }
    let d = dec.target();
    check_dims(a1, a2, d)?;
    let joint_measure = outcome_measure(j, d)?;
    let marginals = (outcome_measure(a1, d)?, outcome_measure(a2, d)?);
    let marginal_product = product(&marginals.0, &marginals.1);
    let classical_product = classical_product_measure(a1, a2, dec)?;

    let rho_t = density(&joint_measure, &marginal_product)?;
    let rho_c = density(&classical_product, &marginal_product);
    let rho_e = density(&joint_measure, &classical_product);
    let product_rule_residual = match (&rho_c, &rho_e) {
        (Ok(c), Ok(e)) => Some(product_rule_residual(&rho_t, c, e)),
        _ => None,
    };
    Ok(CorrelationReport {
        origin: dec.origin(),
        rho_t,
        rho_c,
        rho_e,
        product_rule_residual,
        joint_measure,
        marginals,
        marginal_product,
        classical_product,
    })
}

/// Report for a bare state, using the spectral decomposition. The result is
/// flagged [`DecompositionOrigin::Spectral`]: the split it shows is one of
/// many.
pub fn correlation_report_for_state(
    j: &Povm,
    a1: &Povm,
    a2: &Povm,
    d: &DensityOperator,
) -> Result<CorrelationReport> {
    let dec = spectral_decompose(d)?.into_spectral();
    correlation_report(j, a1, a2, &dec)
}
