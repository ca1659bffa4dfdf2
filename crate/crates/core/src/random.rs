//! Seeded random instances for property checks: pure states, unitaries,
//! mixed and separable states, fuzzy kernels and marginally consistent
//! joints.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::classical_frame::{ClassicalJoint, ClassicalObservable, PhaseSpace};
use crate::correlation::ConvexDecomposition;
use crate::error::Result;
use crate::hilbert::{ComplexMatrix, PureState, C64};
use crate::measure::{OutcomeSpace, ProductSpace};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Haar-distributed pure state.
pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    loop {
        if let Ok(psi) = PureState::normalized(gaussian_vec(rng, dim)) {
            return psi;
        }
    }
}

/// Random unitary from Gram–Schmidt on Gaussian rows.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let mut rows: Vec<Vec<C64>> = Vec::with_capacity(n);
    while rows.len() < n {
        let mut v = gaussian_vec(rng, n);
        for r in &rows {
            let overlap: C64 = r.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, a) in v.iter_mut().zip(r) {
                *x -= overlap * a;
            }
        }
        let norm = v.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
        if norm > 1e-6 {
            rows.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    ComplexMatrix::from_rows(rows).expect("square, finite")
}

/// Point of the probability simplex bounded away from zero.
pub fn simplex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Mixture of `rank` random pure states in `C^dim`.
pub fn mixed_state<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    rank: usize,
) -> Result<ConvexDecomposition> {
    let weights = simplex(rng, rank);
    let components = weights
        .into_iter()
        .map(|w| (w, pure_state(rng, dim)))
        .collect();
    ConvexDecomposition::new(components)
}

/// Separable two-qubit state `Σ wᵢ 𝒫ᵢ ⊗ 𝒬ᵢ` with `terms` product components.
pub fn separable_state<R: Rng + ?Sized>(rng: &mut R, terms: usize) -> Result<ConvexDecomposition> {
    let weights = simplex(rng, terms);
    let components = weights
        .into_iter()
        .map(|w| (w, pure_state(rng, 2).tensor(&pure_state(rng, 2))))
        .collect();
    ConvexDecomposition::new(components)
}

/// Fuzzy observable with random kernel rows.
pub fn fuzzy_observable<R: Rng + ?Sized>(
    rng: &mut R,
    domain: &PhaseSpace,
    codomain: &OutcomeSpace,
) -> Result<ClassicalObservable> {
    let rows = (0..domain.len())
        .map(|_| simplex(rng, codomain.len()))
        .collect();
    ClassicalObservable::new(domain.clone(), codomain.clone(), rows)
}

/// A joint of `a1` and `a2` whose rows have the right marginals but differ
/// from the canonical product: each row starts as the product of marginal
/// rows and is perturbed along `+t` at `(i,j),(k,l)` and `−t` at
/// `(i,l),(k,j)`, which leaves both marginals unchanged.
pub fn consistent_joint<R: Rng + ?Sized>(
    rng: &mut R,
    a1: &ClassicalObservable,
    a2: &ClassicalObservable,
) -> Result<ClassicalJoint> {
    let n1 = a1.codomain().len();
    let n2 = a2.codomain().len();
    let space = ProductSpace::new(a1.codomain().flatten(), a2.codomain().flatten());
    let mut rows = Vec::with_capacity(a1.rows().len());
    for (r1, r2) in a1.rows().iter().zip(a2.rows()) {
        let mut row: Vec<f64> = r1
            .weights()
            .iter()
            .flat_map(|p| r2.weights().iter().map(move |q| p * q))
            .collect();
        if n1 >= 2 && n2 >= 2 {
            for _ in 0..4 {
                let i = rng.random_range(0..n1);
                let k = (i + rng.random_range(1..n1)) % n1;
                let j = rng.random_range(0..n2);
                let l = (j + rng.random_range(1..n2)) % n2;
                let max_t = row[i * n2 + l].min(row[k * n2 + j]);
                let t = rng.random_range(0.0..=1.0) * max_t;
                row[i * n2 + j] += t;
                row[k * n2 + l] += t;
                row[i * n2 + l] -= t;
                row[k * n2 + j] -= t;
            }
        }
        rows.push(row.into_iter().map(|x| x.max(0.0)).collect());
    }
    ClassicalJoint::new(ClassicalObservable::new(a1.domain().clone(), space, rows)?)
}
