//! Exact enumeration of the privacy-amplification second-moment identity.
//!
//! The hash family is all ℓ×n binary matrices acting on the secret bits over
//! GF(2). For distinct inputs the collision probability is exactly 2^{−ℓ},
//! which turns the second-moment bound into an identity that can be checked
//! entrywise at desk scale:
//!
//!   E_{z,u} Δ²(z,u) = (2^ℓ − 1)/2^n · ⊗ᵢ (σ₀² + σ₁²)/2 .

use crate::attack::{eve_state_closed, SpectralParams};
use crate::error::{Error, Result};
use crate::numerics::{
    c, eigvals_hermitian, kron, max_abs_entry, trace_norm, CMatrix, Tolerances,
};

#[derive(Debug, Clone, Copy)]
pub struct UhfReport {
    pub n: u32,
    pub ell: u32,
    pub d: usize,
    /// max entry deviation of E Δ² from the closed form
    pub max_identity_deviation: f64,
    /// E ‖Δ‖₁
    pub jensen_lhs: f64,
    /// tr √(E Δ²)
    pub jensen_rhs: f64,
    pub jensen_ok: bool,
    /// ‖ρ − ρ_id‖₁ − E‖Δ‖₁ from the explicit block matrix, when small enough
    /// to build
    pub block_structure_deviation: Option<f64>,
}

const MAX_N: u32 = 2;
const MAX_ELL: u32 = 2;
const MAX_D: usize = 4;
const MAX_BLOCK_DIM: usize = 1024;

/// z = M·x over GF(2); `matrix` packs ℓ rows of n bits each.
fn ext(matrix: u32, n: u32, ell: u32, x: u32) -> u32 {
    let mut z = 0u32;
    for row in 0..ell {
        let row_bits = (matrix >> (row * n)) & ((1 << n) - 1);
        z |= (((row_bits & x).count_ones() & 1) as u32) << row;
    }
    z
}

/// ⊗ᵢ σ_{x_i}
fn tensor_chain(sigmas: &[&CMatrix; 2], n: u32, x: u32) -> Result<CMatrix> {
    let mut m = sigmas[(x & 1) as usize].clone();
    for i in 1..n {
        m = kron(&m, sigmas[((x >> i) & 1) as usize])?;
    }
    Ok(m)
}

pub fn uhf_identity_check(n: u32, ell: u32, d: usize, sp: &SpectralParams) -> Result<UhfReport> {
    if n == 0 || n > MAX_N || ell == 0 || ell > MAX_ELL || d > MAX_D {
        return Err(Error::Size(format!(
            "enumeration capped at n ≤ {MAX_N}, ℓ ≤ {MAX_ELL}, d ≤ {MAX_D}; got ({n}, {ell}, {d})"
        )));
    }
    if sp.d() != d {
        return Err(Error::Dimension("spectral parameters disagree with d".into()));
    }
    let (_, s0) = eve_state_closed(sp, 1, 0, 0)?;
    let (_, s1) = eve_state_closed(sp, 1, 0, 1)?;
    let sigmas = [s0.matrix(), s1.matrix()];

    let dim = (d * d).pow(n);
    let n_inputs = 1u32 << n;
    let n_keys = 1u32 << ell;
    let n_matrices = 1u32 << (ell * n);

    let chains: Vec<CMatrix> =
        (0..n_inputs).map(|x| tensor_chain(&sigmas, n, x)).collect::<Result<_>>()?;
    let mut omega_av = CMatrix::zeros(dim, dim);
    for chainm in &chains {
        omega_av += chainm;
    }
    omega_av /= c(n_inputs as f64);

    let weight = 1.0 / (n_keys as f64 * n_matrices as f64);
    let scale = c((n_keys as f64) / (n_inputs as f64));
    let mut e_delta_sq = CMatrix::zeros(dim, dim);
    let mut e_delta_trace_norm = 0.0;
    let mut deltas: Vec<CMatrix> = Vec::with_capacity((n_matrices * n_keys) as usize);
    for matrix in 0..n_matrices {
        for z in 0..n_keys {
            let mut omega = CMatrix::zeros(dim, dim);
            for x in 0..n_inputs {
                if ext(matrix, n, ell, x) == z {
                    omega += &chains[x as usize];
                }
            }
            omega *= scale;
            let delta = omega - &omega_av;
            e_delta_sq += &delta * &delta * c(weight);
            e_delta_trace_norm += weight * trace_norm(&delta)?;
            deltas.push(delta);
        }
    }

    let mut closed = chains.iter().fold(CMatrix::zeros(dim, dim), |acc, m| acc + m * m);
    closed *= c((n_keys as f64 - 1.0) / (n_inputs as f64 * n_inputs as f64));
    let max_identity_deviation = max_abs_entry(&(&e_delta_sq - &closed));

    let jensen_rhs: f64 = eigvals_hermitian(&e_delta_sq, &Tolerances::default())?
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .sum();

    // block-diagonal classical-quantum state: ‖ρ − ρ_id‖₁ must equal E‖Δ‖₁
    let full_dim = (n_keys * n_matrices) as usize * dim;
    let block_structure_deviation = if full_dim <= MAX_BLOCK_DIM {
        let mut full = CMatrix::zeros(full_dim, full_dim);
        for (idx, delta) in deltas.iter().enumerate() {
            let offset = idx * dim;
            for i in 0..dim {
                for j in 0..dim {
                    full[(offset + i, offset + j)] = delta[(i, j)] * c(weight);
                }
            }
        }
        Some((trace_norm(&full)? - e_delta_trace_norm).abs())
    } else {
        None
    };

    Ok(UhfReport {
        n,
        ell,
        d,
        max_identity_deviation,
        jensen_lhs: e_delta_trace_norm,
        jensen_rhs,
        jensen_ok: e_delta_trace_norm <= jensen_rhs + 1e-10,
        block_structure_deviation,
    })
}
