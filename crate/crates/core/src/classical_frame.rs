//! Generalized classical statistical models on a finite phase space.
//!
//! Observables are stochastic kernels `ω ↦ A(δ_ω)`; a deterministic
//! observable has Dirac rows, a fuzzy one does not. The canonical joint
//! `A₁ ⊠ A₂` takes the rowwise product of the two kernels. Any other kernel
//! into the product space can serve as a joint, which is where an
//! entanglement-like density can appear even at Dirac states.

use crate::correlation::product_rule_residual;
use crate::error::{Error, Result};
use crate::measure::{
    density, marginal, product, DensityFunction, DiscreteMeasure, OutcomeSpace, ProductSpace, Side,
    Space,
};
use crate::tol::{EPS, PRODUCT_RULE_TOL};

/// Finite phase space Ω.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseSpace(OutcomeSpace);

impl PhaseSpace {
    pub fn new<S: Into<String>>(points: impl IntoIterator<Item = S>) -> Result<Self> {
        OutcomeSpace::new(points).map(Self)
    }

    pub fn points(&self) -> &[String] {
        self.0.labels()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_space(&self) -> Space {
        Space::Simple(self.0.clone())
    }

    /// Pure state `δ_ω`.
    pub fn dirac(&self, point: &str) -> Result<DiscreteMeasure> {
        crate::measure::dirac(self.as_space(), point)
    }

    pub fn measure(&self, weights: Vec<f64>) -> Result<DiscreteMeasure> {
        DiscreteMeasure::new(self.as_space(), weights)
    }
}

/// Stochastic kernel from a phase space to an outcome space.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalObservable {
    domain: PhaseSpace,
    codomain: Space,
    rows: Vec<DiscreteMeasure>,
}

impl ClassicalObservable {
    pub fn new(
        domain: PhaseSpace,
        codomain: impl Into<Space>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        Self::with_tolerance(domain, codomain, rows, EPS)
    }

    pub fn with_tolerance(
        domain: PhaseSpace,
        codomain: impl Into<Space>,
        rows: Vec<Vec<f64>>,
        tol: f64,
    ) -> Result<Self> {
        let codomain = codomain.into();
        if rows.len() != domain.len() {
            return Err(Error::invalid(
                "classical observable",
                format!(
                    "{} kernel rows for {} phase-space points",
                    rows.len(),
                    domain.len()
                ),
            ));
        }
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                DiscreteMeasure::with_tolerance(codomain.clone(), r, tol).map_err(|e| {
                    Error::invalid(
                        "classical observable",
                        format!("row `{}`: {e}", domain.points()[i]),
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            domain,
            codomain,
            rows,
        })
    }

    /// Deterministic observable `δ_ω ↦ δ_{f(ω)}`.
    pub fn deterministic(
        domain: PhaseSpace,
        codomain: OutcomeSpace,
        f: impl Fn(&str) -> String,
    ) -> Result<Self> {
        let rows = domain
            .points()
            .iter()
            .map(|w| crate::measure::dirac(codomain.clone(), &f(w)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            domain,
            codomain: codomain.into(),
            rows,
        })
    }

    pub fn domain(&self) -> &PhaseSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &Space {
        &self.codomain
    }

    /// `A(δ_ω)` for each `ω` in phase-space order.
    pub fn rows(&self) -> &[DiscreteMeasure] {
        &self.rows
    }
}

/// A classical observable valued in a product space.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalJoint(ClassicalObservable);

impl ClassicalJoint {
    pub fn new(observable: ClassicalObservable) -> Result<Self> {
        observable.codomain.as_product()?;
        Ok(Self(observable))
    }

    pub fn observable(&self) -> &ClassicalObservable {
        &self.0
    }

    fn product_space(&self) -> &ProductSpace {
        self.0
            .codomain
            .as_product()
            .expect("checked on construction")
    }
}

/// `A(μ) = Σ_ω μ(ω)·A(δ_ω)`.
pub fn apply(a: &ClassicalObservable, mu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    if *mu.space() != a.domain.as_space() {
        return Err(Error::SpaceMismatch);
    }
    let mut weights = vec![0.0; a.codomain.len()];
    for (m, row) in mu.weights().iter().zip(&a.rows) {
        for (acc, x) in weights.iter_mut().zip(row.weights()) {
            *acc += m * x;
        }
    }
    DiscreteMeasure::new(a.codomain.clone(), weights)
}

pub fn is_deterministic(a: &ClassicalObservable) -> bool {
    a.rows.iter().all(|r| r.dirac_point(EPS).is_some())
}

/// Canonical joint `A₁ ⊠ A₂` with rows `A₁(δ_ω) ⊠ A₂(δ_ω)`.
pub fn classical_joint(
    a1: &ClassicalObservable,
    a2: &ClassicalObservable,
) -> Result<ClassicalJoint> {
    if a1.domain != a2.domain {
        return Err(Error::SpaceMismatch);
    }
    let rows: Vec<DiscreteMeasure> = a1
        .rows
        .iter()
        .zip(&a2.rows)
        .map(|(r1, r2)| product(r1, r2))
        .collect();
    let codomain = rows[0].space().clone();
    Ok(ClassicalJoint(ClassicalObservable {
        domain: a1.domain.clone(),
        codomain,
        rows,
    }))
}

/// Whether every row of `jo` has `a1`'s and `a2`'s rows as marginals.
pub fn marginally_consistent(
    jo: &ClassicalJoint,
    a1: &ClassicalObservable,
    a2: &ClassicalObservable,
) -> bool {
    if jo.0.domain != a1.domain || jo.0.domain != a2.domain {
        return false;
    }
    let p = jo.product_space();
    if *p.left() != a1.codomain.flatten() || *p.right() != a2.codomain.flatten() {
        return false;
    }
    jo.0.rows
        .iter()
        .zip(a1.rows.iter().zip(&a2.rows))
        .all(|(row, (r1, r2))| {
            let (Ok(m1), Ok(m2)) = (marginal(row, Side::Left), marginal(row, Side::Right)) else {
                return false;
            };
            max_weight_diff(&m1, r1) <= EPS && max_weight_diff(&m2, r2) <= EPS
        })
}

fn max_weight_diff(a: &DiscreteMeasure, b: &DiscreteMeasure) -> f64 {
    a.weights()
        .iter()
        .zip(b.weights())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn check_codomains(
    jo: &ClassicalJoint,
    a1: &ClassicalObservable,
    a2: &ClassicalObservable,
) -> Result<()> {
    let p = jo.product_space();
    if *p.left() != a1.codomain.flatten() || *p.right() != a2.codomain.flatten() {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

fn marginal_product(
    a1: &ClassicalObservable,
    a2: &ClassicalObservable,
    mu: &DiscreteMeasure,
) -> Result<DiscreteMeasure> {
    Ok(product(&apply(a1, mu)?, &apply(a2, mu)?))
}

/// `ρ_t = d jo(μ) / d(A₁(μ) ⊠ A₂(μ))`. Marginal consistency of `jo` is not
/// required.
pub fn classical_rho_t(
    jo: &ClassicalJoint,
    a1: &ClassicalObservable,
    a2: &ClassicalObservable,
    mu: &DiscreteMeasure,
) -> Result<DensityFunction> {
    check_codomains(jo, a1, a2)?;
    density(&apply(&jo.0, mu)?, &marginal_product(a1, a2, mu)?)
}

/// `ρ_c = d(A₁ ⊠ A₂)(μ) / d(A₁(μ) ⊠ A₂(μ))`.
pub fn classical_rho_c(
    a1: &ClassicalObservable,
    a2: &ClassicalObservable,
    mu: &DiscreteMeasure,
) -> Result<DensityFunction> {
    let canonical = classical_joint(a1, a2)?;
    density(&apply(&canonical.0, mu)?, &marginal_product(a1, a2, mu)?)
}

/// `ρ_e = d jo(μ) / d(A₁ ⊠ A₂)(μ)`.
pub fn classical_rho_e(
    jo: &ClassicalJoint,
    a1: &ClassicalObservable,
    a2: &ClassicalObservable,
    mu: &DiscreteMeasure,
) -> Result<DensityFunction> {
    check_codomains(jo, a1, a2)?;
    let canonical = classical_joint(a1, a2)?;
    density(&apply(&jo.0, mu)?, &apply(&canonical.0, mu)?)
}

/// Classical-frame counterpart of
/// [`CorrelationReport`](crate::correlation::CorrelationReport).
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalReport {
    pub rho_t: DensityFunction,
    pub rho_c: Result<DensityFunction>,
    pub rho_e: Result<DensityFunction>,
    pub product_rule_residual: Option<f64>,
    /// `jo(μ)`.
    pub joint_measure: DiscreteMeasure,
    pub marginals: (DiscreteMeasure, DiscreteMeasure),
    pub marginal_product: DiscreteMeasure,
    /// `(A₁ ⊠ A₂)(μ)`.
    pub classical_product: DiscreteMeasure,
    pub joint_consistent: bool,
    pub deterministic: (bool, bool),
}

impl ClassicalReport {
    pub fn product_rule_holds(&self) -> Option<bool> {
        self.product_rule_residual.map(|r| r < PRODUCT_RULE_TOL)
    }
}

pub fn classical_report(
    jo: &ClassicalJoint,
    a1: &ClassicalObservable,
    a2: &ClassicalObservable,
    mu: &DiscreteMeasure,
) -> Result<ClassicalReport> {
    check_codomains(jo, a1, a2)?;
    let joint_measure = apply(&jo.0, mu)?;
    let marginals = (apply(a1, mu)?, apply(a2, mu)?);
    let marginal_product = product(&marginals.0, &marginals.1);
    let classical_product = apply(&classical_joint(a1, a2)?.0, mu)?;
    let rho_t = density(&joint_measure, &marginal_product)?;
    let rho_c = density(&classical_product, &marginal_product);
    let rho_e = density(&joint_measure, &classical_product);
    let product_rule_residual = match (&rho_c, &rho_e) {
        (Ok(c), Ok(e)) => Some(product_rule_residual(&rho_t, c, e)),
        _ => None,
    };
    Ok(ClassicalReport {
        rho_t,
        rho_c,
        rho_e,
        product_rule_residual,
        joint_measure,
        marginals,
        marginal_product,
        classical_product,
        joint_consistent: marginally_consistent(jo, a1, a2),
        deterministic: (is_deterministic(a1), is_deterministic(a2)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega2() -> PhaseSpace {
        PhaseSpace::new(["w1", "w2"]).unwrap()
    }

    fn bits() -> OutcomeSpace {
        OutcomeSpace::new(["0", "1"]).unwrap()
    }

    fn identity_obs() -> ClassicalObservable {
        ClassicalObservable::new(omega2(), bits(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    fn fuzzy(rows: [[f64; 2]; 2]) -> ClassicalObservable {
        ClassicalObservable::new(omega2(), bits(), rows.iter().map(|r| r.to_vec()).collect())
            .unwrap()
    }

    fn joint_rows(rows: Vec<Vec<f64>>) -> ClassicalJoint {
        let space = ProductSpace::new(bits(), bits());
        ClassicalJoint::new(ClassicalObservable::new(omega2(), space, rows).unwrap()).unwrap()
    }

    /// Independent 2×2 brute force: ρ(x, y) = num(x, y) / (num₁(x)·num₂(y)).
    fn brute_force_rho_t(num: [[f64; 2]; 2]) -> [[Option<f64>; 2]; 2] {
        let m1 = [num[0][0] + num[0][1], num[1][0] + num[1][1]];
        let m2 = [num[0][0] + num[1][0], num[0][1] + num[1][1]];
        let mut out = [[None; 2]; 2];
        for x in 0..2 {
            for y in 0..2 {
                let den = m1[x] * m2[y];
                if den > 1e-9 {
                    out[x][y] = Some(num[x][y] / den);
                }
            }
        }
        out
    }

    #[test]
    fn apply_deterministic_maps_dirac_to_dirac() {
        let a = identity_obs();
        let out = apply(&a, &omega2().dirac("w2").unwrap()).unwrap();
        assert_eq!(out.weights(), &[0.0, 1.0]);
    }

    #[test]
    fn apply_at_uniform_averages_rows() {
        let a = fuzzy([[0.7, 0.3], [0.4, 0.6]]);
        let mu = DiscreteMeasure::uniform(omega2().as_space());
        let out = apply(&a, &mu).unwrap();
        assert!((out.weights()[0] - 0.55).abs() < 1e-15);
        let at_w1 = apply(&a, &omega2().dirac("w1").unwrap()).unwrap();
        assert_eq!(at_w1.weights(), &[0.7, 0.3]);
    }

    #[test]
    fn apply_rejects_foreign_state() {
        let a = identity_obs();
        let mu = DiscreteMeasure::uniform(bits());
        assert!(matches!(apply(&a, &mu), Err(Error::SpaceMismatch)));
    }

    #[test]
    fn determinism_tolerance() {
        assert!(is_deterministic(&identity_obs()));
        assert!(!is_deterministic(&fuzzy([[0.7, 0.3], [0.4, 0.6]])));
        assert!(is_deterministic(&fuzzy([[1.0 - 1e-12, 1e-12], [0.0, 1.0]])));
    }

    #[test]
    fn deterministic_joint_is_deterministic() {
        let parity = ClassicalObservable::deterministic(omega2(), bits(), |w| {
            if w == "w1" {
                "1".into()
            } else {
                "0".into()
            }
        })
        .unwrap();
        let jo = classical_joint(&identity_obs(), &parity).unwrap();
        assert!(is_deterministic(jo.observable()));
        // f(w1) = (0, 1) → row-major index 1
        assert_eq!(jo.observable().rows()[0].dirac_point(EPS), Some(1));
        assert_eq!(jo.observable().rows()[1].dirac_point(EPS), Some(2));
    }

    #[test]
    fn canonical_joint_marginals_match() {
        let a1 = fuzzy([[0.7, 0.3], [0.4, 0.6]]);
        let a2 = fuzzy([[0.1, 0.9], [0.8, 0.2]]);
        let jo = classical_joint(&a1, &a2).unwrap();
        assert!(marginally_consistent(&jo, &a1, &a2));
        let mu = omega2().measure(vec![0.35, 0.65]).unwrap();
        let out = apply(jo.observable(), &mu).unwrap();
        let m1 = marginal(&out, Side::Left).unwrap();
        let m2 = marginal(&out, Side::Right).unwrap();
        assert!(m1.max_abs_diff(&apply(&a1, &mu).unwrap()) < 1e-15);
        assert!(m2.max_abs_diff(&apply(&a2, &mu).unwrap()) < 1e-15);
        let at_dirac = apply(jo.observable(), &omega2().dirac("w1").unwrap()).unwrap();
        let expected = product(&a1.rows()[0], &a2.rows()[0]);
        assert!(at_dirac.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn rho_c_is_one_at_dirac_states() {
        let a1 = fuzzy([[0.7, 0.3], [0.4, 0.6]]);
        let a2 = fuzzy([[0.1, 0.9], [0.8, 0.2]]);
        for w in ["w1", "w2"] {
            let mu = omega2().dirac(w).unwrap();
            assert!(classical_rho_c(&a1, &a2, &mu)
                .unwrap()
                .is_constant(1.0, 1e-12));
            let jo = classical_joint(&a1, &a2).unwrap();
            assert!(classical_rho_t(&jo, &a1, &a2, &mu)
                .unwrap()
                .is_constant(1.0, 1e-12));
        }
    }

    #[test]
    fn identity_pair_at_uniform_state() {
        let a = identity_obs();
        let mu = DiscreteMeasure::uniform(omega2().as_space());
        let jo = classical_joint(&a, &a).unwrap();
        let oracle = brute_force_rho_t([[0.5, 0.0], [0.0, 0.5]]);
        let rho_t = classical_rho_t(&jo, &a, &a, &mu).unwrap();
        let rho_c = classical_rho_c(&a, &a, &mu).unwrap();
        for k in 0..4 {
            let expected = oracle[k / 2][k % 2];
            assert_eq!(rho_t.value(k), expected);
            assert_eq!(rho_c.value(k), expected);
        }
        assert_eq!(
            rho_t.values(),
            &[Some(2.0), Some(0.0), Some(0.0), Some(2.0)]
        );
    }

    #[test]
    fn independent_joint_has_no_correlation() {
        let a1 = fuzzy([[0.3, 0.7], [0.3, 0.7]]);
        let a2 = fuzzy([[0.6, 0.4], [0.6, 0.4]]);
        let mu = omega2().measure(vec![0.2, 0.8]).unwrap();
        let jo = classical_joint(&a1, &a2).unwrap();
        assert!(classical_rho_t(&jo, &a1, &a2, &mu)
            .unwrap()
            .is_constant(1.0, 1e-12));
        assert!(classical_rho_c(&a1, &a2, &mu)
            .unwrap()
            .is_constant(1.0, 1e-12));
    }

    #[test]
    fn canonical_joint_has_no_entanglement() {
        let a1 = fuzzy([[0.7, 0.3], [0.4, 0.6]]);
        let a2 = fuzzy([[0.1, 0.9], [0.8, 0.2]]);
        let mu = omega2().measure(vec![0.5, 0.5]).unwrap();
        let jo = classical_joint(&a1, &a2).unwrap();
        assert!(classical_rho_e(&jo, &a1, &a2, &mu)
            .unwrap()
            .is_constant(1.0, 1e-12));
    }

    #[test]
    fn correlated_joint_entangles_at_pure_state() {
        let a = fuzzy([[0.7, 0.3], [0.3, 0.7]]);
        let c = 0.21;
        let jo = joint_rows(vec![
            vec![0.49 + c, 0.21 - c, 0.21 - c, 0.09 + c],
            vec![0.09 + c, 0.21 - c, 0.21 - c, 0.49 + c],
        ]);
        assert!(marginally_consistent(&jo, &a, &a));
        let mu = omega2().dirac("w1").unwrap();
        let rho_e = classical_rho_e(&jo, &a, &a, &mu).unwrap();
        // jo(δ_w1) = (0.7, 0, 0, 0.3) against (0.49, 0.21, 0.21, 0.09)
        let expected = [0.7 / 0.49, 0.0, 0.0, 0.3 / 0.09];
        for (k, e) in expected.iter().enumerate() {
            assert!((rho_e.value(k).unwrap() - e).abs() < 1e-12);
        }
        assert!(!rho_e.is_constant(1.0, 1e-3));
        let rho_c = classical_rho_c(&a, &a, &mu).unwrap();
        let rho_t = classical_rho_t(&jo, &a, &a, &mu).unwrap();
        assert!(product_rule_residual(&rho_t, &rho_c, &rho_e) < 1e-12);
    }

    #[test]
    fn deterministic_pair_with_foreign_joint() {
        let a = identity_obs();
        let mu = omega2().dirac("w1").unwrap();
        // joint agreeing with a ⊠ a at w1
        let same = joint_rows(vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0, 1.0]]);
        assert!(classical_rho_e(&same, &a, &a, &mu)
            .unwrap()
            .is_constant(1.0, 0.0));
        // joint putting mass where a ⊠ a has none at w1
        let other = joint_rows(vec![vec![0.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0, 1.0]]);
        assert!(!marginally_consistent(&other, &a, &a));
        assert!(matches!(
            classical_rho_e(&other, &a, &a, &mu),
            Err(Error::AbsoluteContinuityViolation { .. })
        ));
        // general joints need not be marginally consistent for ρ_t
        assert!(matches!(
            classical_rho_t(&other, &a, &a, &mu),
            Err(Error::AbsoluteContinuityViolation { .. })
        ));
    }

    #[test]
    fn report_collects_flags() {
        let a = fuzzy([[0.7, 0.3], [0.3, 0.7]]);
        let jo = classical_joint(&a, &a).unwrap();
        let mu = omega2().measure(vec![0.5, 0.5]).unwrap();
        let r = classical_report(&jo, &a, &a, &mu).unwrap();
        assert!(r.joint_consistent);
        assert_eq!(r.deterministic, (false, false));
        assert_eq!(r.product_rule_holds(), Some(true));
        assert!(r.rho_e.unwrap().is_constant(1.0, 1e-12));
    }

    #[test]
    fn observable_validation() {
        assert!(
            ClassicalObservable::new(omega2(), bits(), vec![vec![0.5, 0.4], vec![1.0, 0.0]])
                .is_err()
        );
        assert!(ClassicalObservable::new(omega2(), bits(), vec![vec![1.0, 0.0]]).is_err());
        let not_joint = identity_obs();
        assert!(matches!(
            ClassicalJoint::new(not_joint),
            Err(Error::NotAProductSpace)
        ));
    }
}
