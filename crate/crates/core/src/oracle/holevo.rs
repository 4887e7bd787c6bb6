//! Optimality test for the eavesdropper's guessing measurement.
//!
//! A binary POVM maximizes the guessing probability iff Λ = Σ_x p_x σ_x T_x
//! dominates every p_x σ_x. The check assembles Λ with uniform priors,
//! verifies POVM validity and reports the worst eigenvalue of Λ − ½σ_{s'}.

use crate::attack::{EveDecomposition, SpectralParams};
use crate::bounds::trace_distance_at;
use crate::error::Result;
use crate::numerics::{
    c, eigvals_hermitian, hermiticity_deviation, CMatrix, Complex64, Tolerances,
};

#[derive(Debug, Clone, Copy)]
pub struct HolevoReport {
    pub d: usize,
    pub r: usize,
    pub k: usize,
    /// min eigenvalue of Λ − ½σ_{s'} over both bit values; ≥ 0 ⇔ optimal
    pub min_holevo_eigenvalue: f64,
    /// ‖Λ − Λ†‖ max entry; should vanish when the test passes
    pub hermiticity_residual: f64,
    /// smallest eigenvalue over both POVM elements
    pub povm_min_eigenvalue: f64,
    /// ½ tr(T₀σ₀) + ½ tr(T₁σ₁)
    pub guess_success: f64,
    /// ½ + D/2 from the closed trace-distance expression
    pub guess_success_closed: f64,
}

fn min_eig(m: &CMatrix) -> Result<f64> {
    let ev = eigvals_hermitian(m, &Tolerances::default())?;
    Ok(ev[0])
}

fn re_trace(m: CMatrix) -> f64 {
    m.diagonal().iter().sum::<Complex64>().re
}

pub fn holevo_check(sp: &SpectralParams, r: usize, k: usize) -> Result<HolevoReport> {
    let d = sp.d();
    let dec = EveDecomposition::new(sp, r, k)?;
    let s0 = dec.sigma(0)?;
    let s1 = dec.sigma(1)?;
    let t0 = dec.guess_povm_t0();
    let t1 = CMatrix::identity(d * d, d * d) - &t0;

    let povm_min_eigenvalue = min_eig(&t0)?.min(min_eig(&t1)?);

    let lambda = (s0.matrix() * &t0 + s1.matrix() * &t1) * c(0.5);
    let hermiticity_residual = hermiticity_deviation(&lambda);
    let lambda_h = (&lambda + lambda.adjoint()) * c(0.5);
    let min_holevo_eigenvalue = min_eig(&(&lambda_h - s0.matrix() * c(0.5)))?
        .min(min_eig(&(&lambda_h - s1.matrix() * c(0.5)))?);

    let guess_success = 0.5 * re_trace(&t0 * s0.matrix()) + 0.5 * re_trace(&t1 * s1.matrix());
    let dist = trace_distance_at(d, sp.beta(), sp.lambda_plus(), sp.lambda_minus());

    Ok(HolevoReport {
        d,
        r,
        k,
        min_holevo_eigenvalue,
        hermiticity_residual,
        povm_min_eigenvalue,
        guess_success,
        guess_success_closed: 0.5 + dist / 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::optimal_lambdas_min;

    #[test]
    fn optimal_measurement_passes_the_test() {
        for d in [4usize, 5] {
            for beta in [0.1, 0.4] {
                let (lp, lm) = optimal_lambdas_min(beta, d).unwrap();
                let sp = SpectralParams::from_lambda_pm(d, beta, lp, lm).unwrap();
                let report = holevo_check(&sp, 1, 0).unwrap();
                assert!(report.min_holevo_eigenvalue >= -1e-9, "d={d} beta={beta}");
                assert!(report.povm_min_eigenvalue >= -1e-12);
                assert!(report.hermiticity_residual < 1e-10);
                assert!(
                    (report.guess_success - report.guess_success_closed).abs() < 1e-10,
                    "d={d} beta={beta}"
                );
            }
        }
    }

    #[test]
    fn indistinguishable_states_give_coin_flip() {
        let sp = SpectralParams::from_lambda_pm(4, 0.0, 0.0, 0.0).unwrap();
        let report = holevo_check(&sp, 1, 0).unwrap();
        assert!((report.guess_success - 0.5).abs() < 1e-12);
    }

    #[test]
    fn success_also_holds_at_generic_feasible_points() {
        // T is tuned to σ₀ − σ₁, which it distinguishes optimally at any λ
        let sp = SpectralParams::from_lambda_pm(5, 0.3, 0.01, 0.004).unwrap();
        let report = holevo_check(&sp, 2, 3).unwrap();
        assert!((report.guess_success - report.guess_success_closed).abs() < 1e-10);
        assert!(report.min_holevo_eigenvalue >= -1e-9);
    }
}
