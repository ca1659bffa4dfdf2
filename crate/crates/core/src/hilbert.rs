//! Finite-dimensional complex linear algebra: square matrices, pure states,
//! density operators, Kronecker products and a Hermitian Jacobi eigensolver.
//!
//! Basis ordering for tensor products is row-major Kronecker: for two qubits
//! with basis `(ψ₊, ψ₋)` the product basis is `(ψ₊ψ₊, ψ₊ψ₋, ψ₋ψ₊, ψ₋ψ₋)`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::correlation::ConvexDecomposition;
use crate::error::{Error, Result};
use crate::tol::{EPS, MAX_JACOBI_SWEEPS};

pub type C64 = Complex64;

/// Dense square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from rows, rejecting ragged, empty or non-finite input.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::invalid("matrix", "matrix is empty"));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::invalid(
                    "matrix",
                    format!("row {i} has {} entries, expected {dim}", row.len()),
                ));
            }
            data.extend(row);
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("matrix", "entries must be finite"));
        }
        Ok(Self { dim, data })
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// `|ψ⟩⟨ψ|` for an arbitrary (not necessarily normalized) vector.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.dim).map(<[C64]>::to_vec).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`; infinite on dimension mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Hermitian and all eigenvalues ≥ −tol.
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        match eigh(self) {
            Ok(eig) => eig.values.iter().all(|&v| v >= -tol),
            Err(_) => false,
        }
    }

    pub fn is_idempotent(&self, tol: f64) -> bool {
        (self * self).max_abs_diff(self) <= tol
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Hermitian part `(A + A†)/2`, used to strip rounding asymmetry.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Kronecker product `a ⊗ b` in row-major convention.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (m, n) = (a.dim, b.dim);
    ComplexMatrix::from_fn(m * n, |i, j| a[(i / n, j / n)] * b[(i % n, j % n)])
}

/// Kronecker product of two vectors.
pub fn tensor_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// Unit vector in `C^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        Self::with_tolerance(amplitudes, EPS)
    }

    pub fn with_tolerance(amplitudes: Vec<C64>, tol: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::invalid("pure state", "vector is empty"));
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::invalid("pure state", "amplitudes must be finite"));
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > tol {
            return Err(Error::invalid(
                "pure state",
                format!("vector norm is {norm}, expected 1"),
            ));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::invalid(
                "pure state",
                "cannot normalize a zero vector",
            ));
        }
        Self::new(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    /// Real-amplitude convenience constructor.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState {
            amplitudes: tensor_vec(&self.amplitudes, &other.amplitudes),
        }
    }

    /// Spin-up along z, `ψ₊`.
    pub fn spin_up() -> Self {
        Self {
            amplitudes: vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        }
    }

    /// Spin-down along z, `ψ₋`.
    pub fn spin_down() -> Self {
        Self {
            amplitudes: vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        }
    }

    /// Spin-up along x, `(ψ₊ + ψ₋)/√2`.
    pub fn spin_x_up() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amplitudes: vec![C64::new(h, 0.0), C64::new(h, 0.0)],
        }
    }
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
}

/// Positive, trace-one Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, EPS)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let deviation = matrix.hermitian_deviation();
        if deviation > tol {
            return Err(Error::NonHermitianInput { deviation });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > tol || trace.im.abs() > tol {
            return Err(Error::invalid(
                "density operator",
                format!("trace ≠ 1 (trace is {})", crate::error::shown(trace.re)),
            ));
        }
        let eig = eigh(&matrix)?;
        if let Some(&min) = eig.values.last() {
            if min < -tol {
                return Err(Error::invalid(
                    "density operator",
                    format!("negative eigenvalue {min}"),
                ));
            }
        }
        Ok(Self { matrix })
    }

    pub fn from_pure(state: &PureState) -> Self {
        Self {
            matrix: state.projector(),
        }
    }

    /// `Σ wᵢ Pᵢ` for convex weights over pure states.
    pub fn from_mixture(components: &[(f64, PureState)]) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::invalid("density operator", "empty mixture"))?;
        let dim = first.1.dim();
        let mut acc = ComplexMatrix::zeros(dim);
        for (w, psi) in components {
            if psi.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: psi.dim(),
                });
            }
            acc = &acc + &psi.projector().scale(*w);
        }
        Self::new(acc)
    }

    /// Maximally mixed state `I/dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// `Tr(e·d)`, the probability assigned to effect `e` at state `d`.
pub fn expectation(e: &ComplexMatrix, d: &DensityOperator) -> Result<f64> {
    if e.dim() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            found: e.dim(),
        });
    }
    let deviation = e.hermitian_deviation();
    if deviation > EPS {
        return Err(Error::NonHermitianInput { deviation });
    }
    let n = e.dim();
    let m = d.matrix();
    let mut tr = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            tr += e[(i, k)] * m[(k, i)];
        }
    }
    if tr.im.abs() > EPS {
        return Err(Error::NonHermitianInput {
            deviation: tr.im.abs(),
        });
    }
    Ok(tr.re)
}

/// Eigenpairs of a Hermitian matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, `vectors[k]` belongs to `values[k]`.
    pub vectors: Vec<Vec<C64>>,
}

impl Eigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.vectors.first().map_or(0, Vec::len);
        let mut acc = ComplexMatrix::zeros(n);
        for (&value, v) in self.values.iter().zip(&self.vectors) {
            acc = &acc + &ComplexMatrix::outer(v).scale(value);
        }
        acc
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation first removes the phase of the pivot `a_pq` and then applies
/// a real Givens rotation that annihilates it.
pub fn eigh(h: &ComplexMatrix) -> Result<Eigen> {
    let deviation = h.hermitian_deviation();
    if deviation > EPS.max(1e-12 * h.frobenius_norm()) {
        return Err(Error::NonHermitianInput { deviation });
    }
    let n = h.dim();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        if off_diagonal_norm(&a) <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > 1e-15 * scale {
        return Err(Error::ConvergenceFailure {
            sweeps: MAX_JACOBI_SWEEPS,
        });
    }

    let mut pairs: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|k| (a[(k, k)].re, (0..n).map(|i| v[(i, k)]).collect()))
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let (values, vectors) = pairs.into_iter().unzip();
    Ok(Eigen { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g < 1e-300 {
        return;
    }
    let phase = apq / g;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // U = diag(1, conj(phase)) · [[c, s], [-s, c]] restricted to (p, q)
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Default convex decomposition of `d` into its eigenvectors.
///
/// Eigenvalues at or below `EPS` are dropped. Inside a degenerate eigenspace
/// the basis returned is whatever the solver produced; callers must not rely
/// on it.
pub fn spectral_decompose(d: &DensityOperator) -> Result<ConvexDecomposition> {
    let eig = eigh(d.matrix())?;
    let components: Vec<(f64, PureState)> = eig
        .values
        .into_iter()
        .zip(eig.vectors)
        .filter(|(w, _)| *w > EPS)
        .map(|(w, vec)| Ok((w, PureState::normalized(vec)?)))
        .collect::<Result<_>>()?;
    ConvexDecomposition::with_target(components, d.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn p_plus() -> ComplexMatrix {
        PureState::spin_up().projector()
    }

    fn p_minus() -> ComplexMatrix {
        PureState::spin_down().projector()
    }

    #[test]
    fn tensor_of_projectors_is_projector_of_tensored_vectors() {
        let pp = tensor(&p_plus(), &p_plus());
        let psi = PureState::spin_up().tensor(&PureState::spin_up());
        assert!(pp.max_abs_diff(&psi.projector()) < 1e-15);
        assert_eq!(pp[(0, 0)], c(1.0));
        assert!(pp.is_idempotent(EPS));
    }

    #[test]
    fn tensor_identity_and_scalar_cases() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2), ComplexMatrix::identity(4));
        let half = i2.scale(0.5);
        assert!(tensor(&half, &half).max_abs_diff(&ComplexMatrix::identity(4).scale(0.25)) < 1e-15);
    }

    #[test]
    fn tensor_basis_order_is_row_major() {
        let pm = tensor(&p_plus(), &p_minus());
        // ψ₊⊗ψ₋ is the second basis vector
        assert_eq!(pm[(1, 1)], c(1.0));
        assert!(pm.trace().re == 1.0);
    }

    #[test]
    fn expectation_examples() {
        let ppp = DensityOperator::from_pure(&PureState::spin_up().tensor(&PureState::spin_up()));
        let pmm =
            DensityOperator::from_pure(&PureState::spin_down().tensor(&PureState::spin_down()));
        assert!((expectation(ppp.matrix(), &ppp).unwrap() - 1.0).abs() < EPS);
        let e = tensor(&p_plus(), &ComplexMatrix::identity(2));
        assert!((expectation(&e, &ppp).unwrap() - 1.0).abs() < EPS);
        assert!(expectation(&e, &pmm).unwrap().abs() < EPS);
        let px = DensityOperator::from_pure(&PureState::spin_x_up());
        assert!((expectation(&p_plus(), &px).unwrap() - 0.5).abs() < EPS);
        assert!((expectation(&p_minus(), &px).unwrap() - 0.5).abs() < EPS);
    }

    #[test]
    fn expectation_errors() {
        let px = DensityOperator::from_pure(&PureState::spin_x_up());
        let e4 = ComplexMatrix::identity(4);
        assert!(matches!(
            expectation(&e4, &px),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 4
            })
        ));
        let mut nh = ComplexMatrix::zeros(2);
        nh[(0, 1)] = c(1.0);
        assert!(matches!(
            expectation(&nh, &px),
            Err(Error::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn density_operator_validation() {
        let bad_trace = ComplexMatrix::identity(2).scale(0.45);
        let err = DensityOperator::new(bad_trace).unwrap_err();
        assert!(err.to_string().contains("trace ≠ 1"), "{err}");
        let negative = ComplexMatrix::diagonal(&[1.5, -0.5]);
        assert!(DensityOperator::new(negative).is_err());
        let mut nh = ComplexMatrix::identity(2).scale(0.5);
        nh[(0, 1)] = C64::new(0.0, 0.1);
        assert!(matches!(
            DensityOperator::new(nh),
            Err(Error::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn pure_state_rejects_non_unit_vectors() {
        assert!(PureState::from_real(&[1.0, 1.0]).is_err());
        assert!(PureState::normalized(vec![c(1.0), c(1.0)]).is_ok());
        assert!(PureState::normalized(vec![c(0.0), c(0.0)]).is_err());
        let p = PureState::spin_x_up().projector();
        assert!(p.is_idempotent(EPS));
        assert!((p.trace().re - 1.0).abs() < EPS);
    }

    #[test]
    fn spectral_decompose_diagonal_mixture() {
        let d = DensityOperator::new(&p_plus().scale(0.5) + &p_minus().scale(0.5)).unwrap();
        let dec = spectral_decompose(&d).unwrap();
        assert_eq!(dec.len(), 2);
        for (w, _) in dec.components() {
            assert!((w - 0.5).abs() < EPS);
        }
    }

    #[test]
    fn spectral_decompose_rank_one() {
        let d = DensityOperator::from_pure(&PureState::spin_x_up());
        let dec = spectral_decompose(&d).unwrap();
        assert_eq!(dec.len(), 1);
        assert!((dec.components()[0].0 - 1.0).abs() < EPS);
    }

    #[test]
    fn spectral_decompose_degenerate_state() {
        // aP₊₊ + aP₋₋ + bP₊₋ + bP₋₊ with a = 0.3, b = 0.2
        let d = DensityOperator::new(ComplexMatrix::diagonal(&[0.3, 0.2, 0.2, 0.3])).unwrap();
        let dec = spectral_decompose(&d).unwrap();
        let weights: Vec<f64> = dec.components().iter().map(|(w, _)| *w).collect();
        for (w, expected) in weights.iter().zip([0.3, 0.3, 0.2, 0.2]) {
            assert!((w - expected).abs() < 1e-12);
        }
        // direct matrix sum
        let mut sum = ComplexMatrix::zeros(4);
        for (w, psi) in dec.components() {
            sum = &sum + &psi.projector().scale(*w);
        }
        assert!(sum.max_abs_diff(d.matrix()) < 1e-8);
    }

    #[test]
    fn jacobi_handles_complex_offdiagonal() {
        // σ_y has eigenvalues ±1
        let mut sy = ComplexMatrix::zeros(2);
        sy[(0, 1)] = C64::new(0.0, -1.0);
        sy[(1, 0)] = C64::new(0.0, 1.0);
        let eig = eigh(&sy).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-14);
        assert!((eig.values[1] + 1.0).abs() < 1e-14);
        assert!(eig.reconstruct().max_abs_diff(&sy) < 1e-14);
        for (val, vec) in eig.values.iter().zip(&eig.vectors) {
            let hv = sy.mul_vec(vec);
            for (x, y) in hv.iter().zip(vec) {
                assert!((x - y * val).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let mut m = ComplexMatrix::zeros(2);
        m[(0, 1)] = c(1.0);
        assert!(matches!(eigh(&m), Err(Error::NonHermitianInput { .. })));
    }
}
