//! # qcorr
//!
//! Correlations between two observables of a finite quantum (or generalized
//! classical) model, described by discrete Radon–Nikodym densities.
//!
//! For a joint observable `J` of `A₁, A₂` at a state `D`:
//!
//! - **total correlation** `ρ_t = dJ(D) / d(A₁(D) ⊠ A₂(D))`,
//! - **classical correlation** `ρ_c`, relative to a convex decomposition
//!   `D = Σ wᵢ Pᵢ` into pure states,
//! - **entanglement** `ρ_e`, relative to the same decomposition,
//!
//! with `ρ_t = ρ_c · ρ_e`. Only `ρ_t` is a property of the state; the split
//! depends on which decomposition is referred to.
//!
//! ```
//! use qcorr::correlation::{correlation_report, ConvexDecomposition};
//! use qcorr::hilbert::PureState;
//! use qcorr::observable::spin_z_pair;
//!
//! let (a1, a2, joint) = spin_z_pair();
//! let up = PureState::spin_up();
//! let down = PureState::spin_down();
//! let dec = ConvexDecomposition::new(vec![
//!     (0.5, up.tensor(&up)),
//!     (0.5, down.tensor(&down)),
//! ])
//! .unwrap();
//! let report = correlation_report(&joint, &a1, &a2, &dec).unwrap();
//! assert!(report.rho_e.unwrap().is_constant(1.0, 1e-9));
//! ```

pub mod classical_frame;
pub mod correlation;
pub mod error;
pub mod hilbert;
pub mod measure;
pub mod observable;
pub mod random;
pub mod report;
pub mod scenario;
pub mod selftest;

pub use error::{Error, Result};

/// Numerical tolerances shared across the crate.
pub mod tol {
    use std::sync::OnceLock;

    /// Equality tolerance for validation and support decisions.
    pub const EPS: f64 = 1e-9;
    /// Entrywise tolerance for reconstructing a state from a decomposition.
    pub const RECONSTRUCTION_TOL: f64 = 1e-8;
    /// Bound on `|ρ_c·ρ_e − ρ_t|`.
    pub const PRODUCT_RULE_TOL: f64 = 1e-7;
    /// Eigenvalues closer than this are treated as one outcome.
    pub const EIGEN_GROUPING_TOL: f64 = 1e-7;
    pub const MAX_JACOBI_SWEEPS: usize = 100;

    /// Tolerance used when validating scenario input, `QCORR_EPS` or [`EPS`].
    pub fn validation_eps() -> f64 {
        static CELL: OnceLock<f64> = OnceLock::new();
        *CELL.get_or_init(|| {
            std::env::var("QCORR_EPS")
                .ok()
                .and_then(|s| s.trim().parse::<f64>().ok())
                .filter(|e| e.is_finite() && *e > 0.0)
                .unwrap_or(EPS)
        })
    }
}
