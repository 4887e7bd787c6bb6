//! Round-by-round Monte-Carlo execution of the protocol under the coupled
//! ancilla attack.
//!
//! Per round the sender string is drawn uniformly, the coupling isometry is
//! applied to the transmitted state, the receiver measures his marginal
//! (conditioning the joint receiver–ancilla pure state), and the eavesdropper
//! measures her optimal guessing POVM on the leftover ancilla state. All
//! randomness comes from one seeded ChaCha12 stream, drawn in a fixed order
//! (sender string, shift r, receiver outcome, eavesdropper outcome), so a
//! report is reproducible from its seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::attack::{omega_column, EveDecomposition, SpectralParams};
use crate::bounds::trace_distance_at;
use crate::error::{Error, Result};
use crate::numerics::{c, CVector, Complex64};
use crate::protocol::PhaseString;

pub const MAX_SIM_DIM: usize = 6;
pub const MAX_SIM_ROUNDS: u64 = 10_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct SimReport {
    pub d: usize,
    pub beta: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub rounds: u64,
    pub seed: u64,
    pub bit_error_rate: f64,
    pub ber_std_err: f64,
    pub eve_success: f64,
    pub eve_std_err: f64,
    /// expected guessing success ½ + D/2 at these attack parameters
    pub eve_success_expected: f64,
    pub k_frequencies: Vec<f64>,
}

fn std_err(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

pub fn simulate(sp: &SpectralParams, rounds: u64, seed: u64) -> Result<SimReport> {
    let d = sp.d();
    if d > MAX_SIM_DIM {
        return Err(Error::Size(format!("simulation capped at d ≤ {MAX_SIM_DIM}")));
    }
    if rounds == 0 || rounds > MAX_SIM_ROUNDS {
        return Err(Error::Domain(format!("rounds = {rounds} outside 1..{MAX_SIM_ROUNDS}")));
    }
    let d2 = d * d;
    let inv_sqrt_d = 1.0 / (d as f64).sqrt();
    let inv_sqrt_2 = std::f64::consts::FRAC_1_SQRT_2;

    // coupled receiver ⊗ ancilla states for all 2^d sender strings
    let columns: Vec<CVector> = (0..d).map(|t| omega_column(sp, t)).collect::<Result<_>>()?;
    let coupled: Vec<CVector> = (0..1u32 << d)
        .map(|mask| {
            let a = PhaseString::new(d, mask)?;
            let mut v = CVector::zeros(d * d2);
            for (t, col) in columns.iter().enumerate() {
                v += col * c(a.sign(t) * inv_sqrt_d);
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;

    // eavesdropper decompositions for every announced (r, k)
    let decs: Vec<Vec<EveDecomposition>> = (1..d)
        .map(|r| (0..d).map(|k| EveDecomposition::new(sp, r, k)).collect::<Result<_>>())
        .collect::<Result<_>>()?;

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut errors = 0u64;
    let mut eve_hits = 0u64;
    let mut k_counts = vec![0u64; d];

    let mut probs: Vec<f64> = vec![0.0; 2 * d];
    let mut conditioned = CVector::zeros(d2);
    for _ in 0..rounds {
        let mask: u32 = rng.gen_range(0..1u32 << d);
        let a = PhaseString::new(d, mask)?;
        let phi = &coupled[mask as usize];
        let r = rng.gen_range(1..d);

        // receiver outcome probabilities: p(k,s) = ½‖(φ_k ± φ_{k+r})/√2‖²
        for k in 0..d {
            let l = (k + r) % d;
            for s in 0..2usize {
                let sign = if s == 1 { -1.0 } else { 1.0 };
                let mut norm2 = 0.0;
                for e in 0..d2 {
                    let amp = (phi[k * d2 + e] + phi[l * d2 + e] * c(sign)) * c(inv_sqrt_2);
                    norm2 += amp.norm_sqr();
                }
                probs[2 * k + s] = 0.5 * norm2;
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!(
                "receiver outcome probabilities sum to {total}"
            )));
        }
        let u: f64 = rng.gen::<f64>() * total;
        let mut cdf = 0.0;
        let mut chosen = 2 * d - 1;
        for (idx, p) in probs.iter().enumerate() {
            cdf += p;
            if u < cdf {
                chosen = idx;
                break;
            }
        }
        let (k, s) = (chosen / 2, (chosen % 2) as u8);
        let l = (k + r) % d;
        k_counts[k] += 1;

        // condition the ancilla on the receiver outcome
        let sign = if s == 1 { -1.0 } else { 1.0 };
        let mut norm2 = 0.0;
        for e in 0..d2 {
            let amp = (phi[k * d2 + e] + phi[l * d2 + e] * c(sign)) * c(inv_sqrt_2);
            norm2 += amp.norm_sqr();
            conditioned[e] = amp;
        }
        let inv_norm = 1.0 / norm2.sqrt();
        for e in 0..d2 {
            conditioned[e] *= c(inv_norm);
        }

        let s_prime = a.secret_bit(k, r);
        if s != s_prime {
            errors += 1;
        }

        // eavesdropper's binary POVM via overlaps with the interference subspace
        let dec = &decs[r - 1][k];
        let mut p0 = 0.5;
        if let (Some(av), Some(cv)) = (&dec.a, &dec.c_vec) {
            let fa = inner(av, &conditioned);
            let fc = inner(cv, &conditioned);
            p0 += (fa.conj() * fc).re;
        }
        if let (Some(bv), Some(dv)) = (&dec.b, &dec.d_vec) {
            let fb = inner(bv, &conditioned);
            let fd = inner(dv, &conditioned);
            p0 -= (fb.conj() * fd).re;
        }
        let guess: u8 = if rng.gen::<f64>() < p0.clamp(0.0, 1.0) { 0 } else { 1 };
        if guess == s_prime {
            eve_hits += 1;
        }
    }

    let ber = errors as f64 / rounds as f64;
    let eve = eve_hits as f64 / rounds as f64;
    let dist = trace_distance_at(d, sp.beta(), sp.lambda_plus(), sp.lambda_minus());
    Ok(SimReport {
        d,
        beta: sp.beta(),
        lambda_plus: sp.lambda_plus(),
        lambda_minus: sp.lambda_minus(),
        rounds,
        seed,
        bit_error_rate: ber,
        ber_std_err: std_err(ber, rounds),
        eve_success: eve,
        eve_std_err: std_err(eve, rounds),
        eve_success_expected: 0.5 + dist / 2.0,
        k_frequencies: k_counts.iter().map(|&n| n as f64 / rounds as f64).collect(),
    })
}

fn inner(a: &CVector, b: &CVector) -> Complex64 {
    (a.adjoint() * b)[(0, 0)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::optimal_lambdas_min;

    #[test]
    fn noiseless_rounds_never_err() {
        let sp = SpectralParams::from_lambda_pm(3, 0.0, 0.0, 0.0).unwrap();
        let report = simulate(&sp, 20_000, 7).unwrap();
        assert_eq!(report.bit_error_rate, 0.0);
        // guessing is a fair coin
        assert!((report.eve_success - 0.5).abs() < 3.0 * report.eve_std_err + 1e-9);
    }

    #[test]
    fn reports_are_reproducible() {
        let (lp, lm) = optimal_lambdas_min(0.1, 4).unwrap();
        let sp = SpectralParams::from_lambda_pm(4, 0.1, lp, lm).unwrap();
        let a = simulate(&sp, 5_000, 42).unwrap();
        let b = simulate(&sp, 5_000, 42).unwrap();
        assert_eq!(a.bit_error_rate, b.bit_error_rate);
        assert_eq!(a.eve_success, b.eve_success);
        assert_eq!(a.k_frequencies, b.k_frequencies);
        let c = simulate(&sp, 5_000, 43).unwrap();
        assert!(a.eve_success != c.eve_success || a.bit_error_rate != c.bit_error_rate);
    }

    #[test]
    fn empirical_rates_track_the_closed_forms() {
        let d = 4;
        let beta = 0.1;
        let (lp, lm) = optimal_lambdas_min(beta, d).unwrap();
        let sp = SpectralParams::from_lambda_pm(d, beta, lp, lm).unwrap();
        let n = 40_000;
        let report = simulate(&sp, n, 11).unwrap();
        assert!((report.bit_error_rate - beta).abs() < 4.0 * report.ber_std_err);
        assert!(
            (report.eve_success - report.eve_success_expected).abs()
                < 4.0 * report.eve_std_err
        );
        let kf_sigma = (0.25 * 0.75 / n as f64).sqrt();
        for f in &report.k_frequencies {
            assert!((f - 0.25).abs() < 4.0 * kf_sigma, "k frequency {f}");
        }
        let total: f64 = report.k_frequencies.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn caps_are_enforced() {
        let sp = SpectralParams::from_lambda_pm(3, 0.0, 0.0, 0.0).unwrap();
        assert!(simulate(&sp, 0, 1).is_err());
        assert!(simulate(&sp, MAX_SIM_ROUNDS + 1, 1).is_err());
    }
}
