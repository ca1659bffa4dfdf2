//! Probability measures on finite labelled outcome spaces and their
//! pointwise Radon–Nikodym densities.
//!
//! Points of a [`ProductSpace`] are enumerated row-major: the right factor
//! varies fastest. Densities only carry values on the support of the
//! reference (denominator) measure; elsewhere they are undefined.

use std::fmt;

use crate::error::{Error, Result};
use crate::tol::EPS;

/// Ordered finite set of distinct outcome labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeSpace {
    labels: Vec<String>,
}

impl OutcomeSpace {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::invalid("outcome space", "no labels"));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::invalid(
                    "outcome space",
                    format!("duplicate label `{l}`"),
                ));
            }
        }
        Ok(Self { labels })
    }

    /// The two-point spin space `{+1/2, -1/2}`.
    pub fn spin_half() -> Self {
        Self {
            labels: vec!["+1/2".into(), "-1/2".into()],
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }
}

/// Cartesian product of two outcome spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductSpace {
    left: OutcomeSpace,
    right: OutcomeSpace,
}

impl ProductSpace {
    pub fn new(left: OutcomeSpace, right: OutcomeSpace) -> Self {
        Self { left, right }
    }

    pub fn left(&self) -> &OutcomeSpace {
        &self.left
    }

    pub fn right(&self) -> &OutcomeSpace {
        &self.right
    }

    pub fn len(&self) -> usize {
        self.left.len() * self.right.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.right.len() + j
    }

    pub fn split_index(&self, k: usize) -> (usize, usize) {
        (k / self.right.len(), k % self.right.len())
    }

    pub fn index_of(&self, left: &str, right: &str) -> Result<usize> {
        Ok(self.index(self.left.index_of(left)?, self.right.index_of(right)?))
    }

    pub fn point(&self, k: usize) -> (&str, &str) {
        let (i, j) = self.split_index(k);
        (&self.left.labels[i], &self.right.labels[j])
    }
}

/// Either a plain outcome space or a product of two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Space {
    Simple(OutcomeSpace),
    Product(ProductSpace),
}

impl From<OutcomeSpace> for Space {
    fn from(s: OutcomeSpace) -> Self {
        Space::Simple(s)
    }
}

impl From<ProductSpace> for Space {
    fn from(s: ProductSpace) -> Self {
        Space::Product(s)
    }
}

impl Space {
    pub fn len(&self) -> usize {
        match self {
            Space::Simple(s) => s.len(),
            Space::Product(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Display label of point `k`; product points render as `(l,r)`.
    pub fn point_label(&self, k: usize) -> String {
        match self {
            Space::Simple(s) => s.labels[k].clone(),
            Space::Product(p) => {
                let (l, r) = p.point(k);
                format!("({l},{r})")
            }
        }
    }

    pub fn point_labels(&self) -> Vec<String> {
        (0..self.len()).map(|k| self.point_label(k)).collect()
    }

    /// Looks up a point by its display label.
    pub fn index_of(&self, label: &str) -> Result<usize> {
        match self {
            Space::Simple(s) => s.index_of(label),
            Space::Product(_) => (0..self.len())
                .find(|&k| self.point_label(k) == label)
                .ok_or_else(|| Error::UnknownLabel(label.to_string())),
        }
    }

    pub fn as_product(&self) -> Result<&ProductSpace> {
        match self {
            Space::Product(p) => Ok(p),
            Space::Simple(_) => Err(Error::NotAProductSpace),
        }
    }

    /// The same points viewed as a plain outcome space.
    pub fn flatten(&self) -> OutcomeSpace {
        match self {
            Space::Simple(s) => s.clone(),
            Space::Product(_) => OutcomeSpace {
                labels: self.point_labels(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Probability measure on a finite space, one weight per point.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    space: Space,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(space: impl Into<Space>, weights: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(space, weights, EPS)
    }

    pub fn with_tolerance(space: impl Into<Space>, weights: Vec<f64>, tol: f64) -> Result<Self> {
        let space = space.into();
        if weights.len() != space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                found: weights.len(),
            });
        }
        if let Some((k, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < -tol)
        {
            return Err(Error::invalid(
                "measure",
                format!(
                    "weight {w} at {} is negative or not finite",
                    space.point_label(k)
                ),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::WeightSumInvalid { sum });
        }
        Ok(Self { space, weights })
    }

    pub fn uniform(space: impl Into<Space>) -> Self {
        let space = space.into();
        let n = space.len();
        Self {
            space,
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    pub fn weight_of(&self, label: &str) -> Result<f64> {
        Ok(self.weights[self.space.index_of(label)?])
    }

    pub fn weight_at(&self, left: &str, right: &str) -> Result<f64> {
        Ok(self.weights[self.space.as_product()?.index_of(left, right)?])
    }

    /// Index of the single point carrying all mass (within `tol`), if any.
    pub fn dirac_point(&self, tol: f64) -> Option<usize> {
        let k = self
            .weights
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))?
            .0;
        ((self.weights[k] - 1.0).abs() <= tol).then_some(k)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.space != other.space {
            return f64::INFINITY;
        }
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Dirac measure concentrated at `label`.
pub fn dirac(space: impl Into<Space>, label: &str) -> Result<DiscreteMeasure> {
    let space = space.into();
    let k = space.index_of(label)?;
    let mut weights = vec![0.0; space.len()];
    weights[k] = 1.0;
    Ok(DiscreteMeasure { space, weights })
}

/// Product measure `ν₁ ⊠ ν₂`. Factors on product spaces are flattened first.
pub fn product(nu1: &DiscreteMeasure, nu2: &DiscreteMeasure) -> DiscreteMeasure {
    let space = ProductSpace::new(nu1.space.flatten(), nu2.space.flatten());
    let weights = nu1
        .weights
        .iter()
        .flat_map(|a| nu2.weights.iter().map(move |b| a * b))
        .collect();
    DiscreteMeasure {
        space: space.into(),
        weights,
    }
}

/// Marginal projection onto one factor of a product space.
pub fn marginal(nu: &DiscreteMeasure, side: Side) -> Result<DiscreteMeasure> {
    let p = nu.space.as_product()?;
    let (n_left, n_right) = (p.left.len(), p.right.len());
    let (space, weights) = match side {
        Side::Left => (
            p.left.clone(),
            (0..n_left)
                .map(|i| (0..n_right).map(|j| nu.weights[p.index(i, j)]).sum())
                .collect(),
        ),
        Side::Right => (
            p.right.clone(),
            (0..n_right)
                .map(|j| (0..n_left).map(|i| nu.weights[p.index(i, j)]).sum())
                .collect(),
        ),
    };
    Ok(DiscreteMeasure {
        space: space.into(),
        weights,
    })
}

/// Convex combination of measures on a common space.
pub fn mix(components: &[(f64, &DiscreteMeasure)]) -> Result<DiscreteMeasure> {
    let (_, first) = components
        .first()
        .ok_or(Error::WeightSumInvalid { sum: 0.0 })?;
    if let Some((w, _)) = components.iter().find(|(w, _)| !w.is_finite() || *w < 0.0) {
        return Err(Error::invalid("mixture", format!("negative weight {w}")));
    }
    let sum: f64 = components.iter().map(|(w, _)| w).sum();
    if (sum - 1.0).abs() > EPS {
        return Err(Error::WeightSumInvalid { sum });
    }
    let space = first.space.clone();
    let mut weights = vec![0.0; space.len()];
    for (w, nu) in components {
        if nu.space != space {
            return Err(Error::SpaceMismatch);
        }
        for (acc, x) in weights.iter_mut().zip(&nu.weights) {
            *acc += w * x;
        }
    }
    Ok(DiscreteMeasure { space, weights })
}

/// Pointwise density of one measure with respect to another.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityFunction {
    space: Space,
    values: Vec<Option<f64>>,
}

impl DensityFunction {
    pub fn space(&self) -> &Space {
        &self.space
    }

    /// Per-point values in space order; `None` off the support.
    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn value(&self, k: usize) -> Option<f64> {
        self.values[k]
    }

    pub fn value_at(&self, left: &str, right: &str) -> Result<Option<f64>> {
        Ok(self.values[self.space.as_product()?.index_of(left, right)?])
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&k| self.values[k].is_some())
            .collect()
    }

    /// True when every defined value is within `tol` of `c`.
    pub fn is_constant(&self, c: f64, tol: f64) -> bool {
        self.values.iter().flatten().all(|v| (v - c).abs() <= tol)
    }

    /// `Σ_{x∈X} ρ(x)·den(x)` for every singleton `X`, i.e. the numerator
    /// measure rebuilt from the density.
    pub fn reconstruct(&self, den: &DiscreteMeasure) -> Result<Vec<f64>> {
        if den.space != self.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&den.weights)
            .map(|(v, d)| v.map_or(0.0, |v| v * d))
            .collect())
    }
}

impl fmt::Display for DensityFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = (0..self.values.len())
            .map(|k| match self.values[k] {
                Some(v) => format!("{}={v}", self.space.point_label(k)),
                None => format!("{}=—", self.space.point_label(k)),
            })
            .collect();
        write!(f, "{}", cells.join(" "))
    }
}

/// Radon–Nikodym density `d num / d den`, defined on `{x : den(x) > ε}`.
pub fn density(num: &DiscreteMeasure, den: &DiscreteMeasure) -> Result<DensityFunction> {
    if num.space != den.space {
        return Err(Error::SpaceMismatch);
    }
    let mut values = Vec::with_capacity(num.weights.len());
    for (k, (&n, &d)) in num.weights.iter().zip(&den.weights).enumerate() {
        if d > EPS {
            values.push(Some((n / d).max(0.0)));
        } else if n > EPS {
            return Err(Error::AbsoluteContinuityViolation {
                point: num.space.point_label(k),
                numerator: n,
                denominator: d,
            });
        } else {
            values.push(None);
        }
    }
    Ok(DensityFunction {
        space: num.space.clone(),
        values,
    })
}

/// Pointwise product of two densities, defined on the common support.
pub fn density_product(a: &DensityFunction, b: &DensityFunction) -> Result<DensityFunction> {
    if a.space != b.space {
        return Err(Error::SpaceMismatch);
    }
    let values = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| Some((*x)? * (*y)?))
        .collect();
    Ok(DensityFunction {
        space: a.space.clone(),
        values,
    })
}
