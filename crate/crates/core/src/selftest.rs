//! Seeded randomized checks of the structural identities.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classical_frame::{
    classical_report, classical_rho_c, marginally_consistent, PhaseSpace,
};
use crate::correlation::{
    correlation_report, entanglement, total_correlation, ConvexDecomposition,
};
use crate::error::Result;
use crate::hilbert::{spectral_decompose, tensor, ComplexMatrix, DensityOperator};
use crate::measure::{marginal, OutcomeSpace, Side};
use crate::observable::{joint_from_commuting, outcome_measure, spin_z_pair, Povm};
use crate::random::{self, SeededRng};
use crate::tol::{EPS, PRODUCT_RULE_TOL};

pub const DEFAULT_TRIALS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub trials: usize,
    pub max_error: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "selftest (seed {}, {} trials per check)\n",
            self.seed, self.trials
        );
        for c in &self.checks {
            out.push_str(&format!(
                "  {:<40} max error {:<12.3e} < {:.0e}: {}\n",
                c.name,
                c.max_error,
                c.threshold,
                if c.pass { "PASS" } else { "FAIL" }
            ));
        }
        out
    }
}

/// Projective measurement of a qubit in the basis given by the rows of `u`,
/// lifted to one tensor factor of two qubits.
fn local_pvm(u: &ComplexMatrix, side: Side) -> Result<Povm> {
    let id = ComplexMatrix::identity(2);
    let effects = u
        .rows()
        .into_iter()
        .map(|row| {
            let p = ComplexMatrix::outer(&row);
            match side {
                Side::Left => tensor(&p, &id),
                Side::Right => tensor(&id, &p),
            }
        })
        .collect();
    Povm::new(OutcomeSpace::spin_half(), effects)
}

struct Quantum {
    a1: Povm,
    a2: Povm,
    j: Povm,
    dec: ConvexDecomposition,
}

fn random_quantum(rng: &mut SeededRng) -> Result<Quantum> {
    let (a1, a2, j) = if rng.random_bool(0.5) {
        spin_z_pair()
    } else {
        let a1 = local_pvm(&random::unitary(rng, 2), Side::Left)?;
        let a2 = local_pvm(&random::unitary(rng, 2), Side::Right)?;
        let j = joint_from_commuting(&a1, &a2)?;
        (a1, a2, j)
    };
    let rank = rng.random_range(1..=6);
    let dec = random::mixed_state(rng, 4, rank)?;
    Ok(Quantum { a1, a2, j, dec })
}

fn check(
    name: &str,
    trials: usize,
    threshold: f64,
    mut trial: impl FnMut() -> Result<f64>,
) -> CheckResult {
    let mut max_error = 0.0_f64;
    let mut pass = true;
    for _ in 0..trials {
        match trial() {
            Ok(err) => max_error = max_error.max(err),
            Err(_) => {
                pass = false;
                max_error = f64::INFINITY;
            }
        }
    }
    CheckResult {
        name: name.into(),
        trials,
        max_error,
        threshold,
        pass: pass && max_error < threshold,
    }
}

fn max_option_diff(a: &[Option<f64>], b: &[Option<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| match (x, y) {
            (Some(x), Some(y)) => (x - y).abs(),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

pub fn run_selftest(seed: u64, trials: usize) -> SelftestReport {
    let mut rng = random::seeded(seed);
    let mut checks = Vec::new();

    checks.push(check(
        "quantum product rule",
        trials,
        PRODUCT_RULE_TOL,
        || {
            let q = random_quantum(&mut rng)?;
            let r = correlation_report(&q.j, &q.a1, &q.a2, &q.dec)?;
            Ok(r.product_rule_residual.unwrap_or(f64::INFINITY))
        },
    ));

    checks.push(check(
        "rho_t independent of decomposition",
        trials,
        PRODUCT_RULE_TOL,
        || {
            let q = random_quantum(&mut rng)?;
            let remixed = q.dec.remix(&random::unitary(&mut rng, q.dec.len()))?;
            let rebuilt = DensityOperator::from_mixture(remixed.components())?;
            let spectral = spectral_decompose(&rebuilt)?;
            let t0 = total_correlation(&q.j, &q.a1, &q.a2, q.dec.target())?;
            let t1 = total_correlation(&q.j, &q.a1, &q.a2, &rebuilt)?;
            let r1 = correlation_report(&q.j, &q.a1, &q.a2, &remixed)?;
            let r2 = correlation_report(&q.j, &q.a1, &q.a2, &spectral)?;
            let mut err = max_option_diff(t0.values(), t1.values());
            for r in [&r1, &r2] {
                let (c, e) = (
                    r.rho_c.as_ref().map_err(Clone::clone)?,
                    r.rho_e.as_ref().map_err(Clone::clone)?,
                );
                let ce: Vec<Option<f64>> = c
                    .values()
                    .iter()
                    .zip(e.values())
                    .map(|(c, e)| Some((*c)? * (*e)?))
                    .collect();
                err = err.max(max_option_diff(&ce, t0.values()));
            }
            Ok(err)
        },
    ));

    checks.push(check(
        "separable state has no entanglement",
        trials,
        PRODUCT_RULE_TOL,
        || {
            let n = rng.random_range(1..=8);
            let dec = random::separable_state(&mut rng, n)?;
            let (a1, a2, j) = spin_z_pair();
            let e = entanglement(&j, &a1, &a2, &dec)?;
            Ok(e.values()
                .iter()
                .flatten()
                .map(|v| (v - 1.0).abs())
                .fold(0.0, f64::max))
        },
    ));

    checks.push(check("quantum marginal consistency", trials, EPS, || {
        let q = random_quantum(&mut rng)?;
        let d = q.dec.target();
        let jm = outcome_measure(&q.j, d)?;
        let e1 = marginal(&jm, Side::Left)?.max_abs_diff(&outcome_measure(&q.a1, d)?);
        let e2 = marginal(&jm, Side::Right)?.max_abs_diff(&outcome_measure(&q.a2, d)?);
        Ok(e1.max(e2))
    }));

    let omega = PhaseSpace::new(["w1", "w2", "w3"]).expect("distinct points");
    let o1 = OutcomeSpace::new(["a", "b"]).expect("distinct labels");
    let o2 = OutcomeSpace::new(["x", "y", "z"]).expect("distinct labels");

    checks.push(check(
        "classical product rule",
        trials,
        PRODUCT_RULE_TOL,
        || {
            let a1 = random::fuzzy_observable(&mut rng, &omega, &o1)?;
            let a2 = random::fuzzy_observable(&mut rng, &omega, &o2)?;
            let jo = random::consistent_joint(&mut rng, &a1, &a2)?;
            let mu = omega.measure(random::simplex(&mut rng, omega.len()))?;
            let r = classical_report(&jo, &a1, &a2, &mu)?;
            let consistency = if r.joint_consistent {
                0.0
            } else {
                f64::INFINITY
            };
            Ok(r.product_rule_residual
                .unwrap_or(f64::INFINITY)
                .max(consistency))
        },
    ));

    checks.push(check("classical marginal consistency", trials, EPS, || {
        let a1 = random::fuzzy_observable(&mut rng, &omega, &o1)?;
        let a2 = random::fuzzy_observable(&mut rng, &omega, &o2)?;
        let jo = random::consistent_joint(&mut rng, &a1, &a2)?;
        Ok(if marginally_consistent(&jo, &a1, &a2) {
            0.0
        } else {
            f64::INFINITY
        })
    }));

    checks.push(check(
        "classical rho_c = 1 at Dirac states",
        trials,
        PRODUCT_RULE_TOL,
        || {
            let a1 = random::fuzzy_observable(&mut rng, &omega, &o1)?;
            let a2 = random::fuzzy_observable(&mut rng, &omega, &o2)?;
            let point = omega.points()[rng.random_range(0..omega.len())].clone();
            let c = classical_rho_c(&a1, &a2, &omega.dirac(&point)?)?;
            Ok(c.values()
                .iter()
                .flatten()
                .map(|v| (v - 1.0).abs())
                .fold(0.0, f64::max))
        },
    ));

    SelftestReport {
        seed,
        trials,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes_small() {
        let r = run_selftest(1, 20);
        assert!(r.all_pass(), "{}", r.render());
        assert_eq!(r.checks.len(), 7);
    }

    #[test]
    fn selftest_is_reproducible() {
        assert_eq!(run_selftest(5, 5), run_selftest(5, 5));
    }
}
