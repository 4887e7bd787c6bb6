//! The eavesdropper's noise-constrained ancilla coupling.
//!
//! At bit error rate β the symmetrized two-qudit state shared by the honest
//! parties has only two remaining degrees of freedom. They are carried here in
//! two equivalent parametrizations:
//!
//! - [`NoiseParams`]: the raw mixing weights (μ, V) of the constrained state,
//! - [`SpectralParams`]: its eigenvalues (λ₀, λ₁, λ₊, λ₋); canonical form,
//!   since every optimization downstream runs over (λ₊, λ₋) at fixed β.
//!
//! From the spectrum the module builds the purification, the eavesdropper's
//! conditional ancilla states (in closed form and by exhaustive enumeration),
//! and the receiver-side isometry picture used by the Monte-Carlo simulator.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::numerics::{
    c, kron, max_abs_entry, outer, partial_trace, CMatrix, CVector, DensityOperator,
    Keep, Tolerances,
};
use crate::protocol::{interference_state, mu_state, PhaseString, MIN_DIM};

/// Purification and isometry constructions materialize d⁴ amplitudes.
pub const MAX_ATTACK_DIM: usize = 8;

const FEAS_TOL: f64 = 1e-9;
const RADICAND_TOL: f64 = 1e-12;

/// Attack degrees of freedom in the (μ, V) parametrization at error rate β.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub d: usize,
    pub beta: f64,
    pub mu: f64,
    pub v: f64,
}

impl NoiseParams {
    pub fn spectral(&self) -> Result<SpectralParams> {
        SpectralParams::from_noise(self)
    }
}

/// Eigenvalues of the constrained two-qudit state: λ₀ (multiplicity 1),
/// λ₁ (d−1), λ₊ and λ₋ (d(d−1)/2 each).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParams {
    d: usize,
    lambda0: f64,
    lambda1: f64,
    lambda_plus: f64,
    lambda_minus: f64,
}

fn check_dim(d: usize) -> Result<()> {
    if d < MIN_DIM {
        return Err(Error::Domain(format!("dimension {d} < {MIN_DIM}")));
    }
    Ok(())
}

impl SpectralParams {
    /// Spectrum from the (μ, V) parametrization.
    pub fn from_noise(p: &NoiseParams) -> Result<Self> {
        check_dim(p.d)?;
        if !(0.0..=0.5).contains(&p.beta) {
            return Err(Error::Domain(format!("beta = {} outside [0, 1/2]", p.beta)));
        }
        let d = p.d as f64;
        let base = (2.0 * p.beta - p.mu) / (d * d);
        let lambda1 = base + (p.mu + p.v) / d;
        let lambda0 = lambda1 + 1.0 - 2.0 * p.beta - p.v;
        let lambda_plus = base + p.v / d;
        let lambda_minus = base - p.v / d;
        Self::validated(p.d, lambda0, lambda1, lambda_plus, lambda_minus)
    }

    /// Canonical form: (λ₊, λ₋) at fixed (d, β); λ₀ and λ₁ follow.
    pub fn from_lambda_pm(d: usize, beta: f64, lambda_plus: f64, lambda_minus: f64) -> Result<Self> {
        check_dim(d)?;
        if !(0.0..=0.5).contains(&beta) {
            return Err(Error::Domain(format!("beta = {beta} outside [0, 1/2]")));
        }
        let df = d as f64;
        let lambda1 =
            2.0 * beta / df + (1.0 - df / 2.0) * lambda_plus - df / 2.0 * lambda_minus;
        let lambda0 = 1.0 - 2.0 * beta + 2.0 * beta / df - (df - 1.0) * lambda_plus;
        Self::validated(d, lambda0, lambda1, lambda_plus, lambda_minus)
    }

    fn validated(
        d: usize,
        lambda0: f64,
        lambda1: f64,
        lambda_plus: f64,
        lambda_minus: f64,
    ) -> Result<Self> {
        for (name, value) in [
            ("lambda0", lambda0),
            ("lambda1", lambda1),
            ("lambda_plus", lambda_plus),
            ("lambda_minus", lambda_minus),
        ] {
            if value < -FEAS_TOL {
                return Err(Error::Infeasible { constraint: name, value });
            }
        }
        Ok(SpectralParams { d, lambda0, lambda1, lambda_plus, lambda_minus })
    }

    pub fn d(&self) -> usize {
        self.d
    }
    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }
    pub fn lambda_plus(&self) -> f64 {
        self.lambda_plus
    }
    pub fn lambda_minus(&self) -> f64 {
        self.lambda_minus
    }

    /// Bit error rate implied by the spectrum.
    pub fn beta(&self) -> f64 {
        let v = self.d as f64 / 2.0 * (self.lambda_plus - self.lambda_minus);
        (1.0 - v - (self.lambda0 - self.lambda1)) / 2.0
    }

    /// Exact inverse of [`SpectralParams::from_noise`].
    pub fn to_noise(&self) -> NoiseParams {
        let d = self.d as f64;
        NoiseParams {
            d: self.d,
            beta: self.beta(),
            mu: 2.0 * self.beta() - d * d / 2.0 * (self.lambda_plus + self.lambda_minus),
            v: d / 2.0 * (self.lambda_plus - self.lambda_minus),
        }
    }

    /// Normalization residual λ₀ + (d−1)λ₁ + d(d−1)/2·(λ₊+λ₋) − 1.
    pub fn trace_residual(&self) -> f64 {
        let d = self.d as f64;
        self.lambda0
            + (d - 1.0) * self.lambda1
            + d * (d - 1.0) / 2.0 * (self.lambda_plus + self.lambda_minus)
            - 1.0
    }

    /// The three ancilla-state eigenvalues (ξ₀, ξ₁, ξ₂); ξ₀ has multiplicity
    /// 2(d−2).
    pub fn xi(&self) -> (f64, f64, f64) {
        let d = self.d as f64;
        let xi0 = d / 4.0 * (self.lambda_plus + self.lambda_minus);
        let xi1 = d / 2.0 * (self.lambda1 + self.lambda_minus);
        let xi2 = d / 2.0 * (self.lambda1 + self.lambda_plus) + (self.lambda0 - self.lambda1);
        (xi0, xi1, xi2)
    }
}

// --- ancilla space layout -------------------------------------------------
//
// The ancilla has dimension d². Basis: indices 0..d hold the d "diagonal"
// vectors, then one (+,−) pair per unordered time pair (t < t') in
// lexicographic order.

fn pair_index(d: usize, t: usize, u: usize) -> usize {
    debug_assert!(t < u && u < d);
    t * d - t * (t + 1) / 2 + (u - t - 1)
}

fn e_plus(d: usize, t: usize, u: usize) -> usize {
    let (lo, hi) = if t < u { (t, u) } else { (u, t) };
    d + 2 * pair_index(d, lo, hi)
}

fn e_minus(d: usize, t: usize, u: usize) -> usize {
    e_plus(d, t, u) + 1
}

fn sqrt0(x: f64) -> f64 {
    x.max(0.0).sqrt()
}

/// Unnormalized ancilla vector obtained by projecting the purification onto
/// the two-qudit basis state |t t'⟩.
pub fn w_vector(sp: &SpectralParams, t: usize, t2: usize) -> CVector {
    let d = sp.d;
    let df = d as f64;
    let mut w = CVector::zeros(d * d);
    if t == t2 {
        w[0] = c(sqrt0(sp.lambda0 / df));
        let amp = sqrt0(sp.lambda1 / df);
        for j in 1..d {
            let phase = 2.0 * std::f64::consts::PI * (j * t) as f64 / df;
            w[j] = Complex::from_polar(amp, phase);
        }
    } else {
        let sgn = if t2 > t { 1.0 } else { -1.0 };
        w[e_plus(d, t, t2)] = c(sqrt0(sp.lambda_plus / 2.0));
        w[e_minus(d, t, t2)] = c(sgn * sqrt0(sp.lambda_minus / 2.0));
    }
    w
}

/// Purification of the constrained two-qudit state, as a d²×d² matrix whose
/// rows index the two-qudit (AB) space and columns the ancilla (E) space.
pub fn purification_matrix(sp: &SpectralParams) -> Result<CMatrix> {
    let d = sp.d;
    if d > MAX_ATTACK_DIM {
        return Err(Error::Size(format!("purification capped at d ≤ {MAX_ATTACK_DIM}")));
    }
    let df = d as f64;
    let mut psi = CMatrix::zeros(d * d, d * d);
    // Σ_j √λ_j |α_j⟩|E_j⟩ over the diagonal family
    let a0 = sqrt0(sp.lambda0 / df);
    let a1 = sqrt0(sp.lambda1 / df);
    for t in 0..d {
        psi[(t * d + t, 0)] = c(a0);
        for j in 1..d {
            let phase = 2.0 * std::f64::consts::PI * (j * t) as f64 / df;
            psi[(t * d + t, j)] = Complex::from_polar(a1, phase);
        }
    }
    // exchange families
    let ap = sqrt0(sp.lambda_plus / 2.0);
    let am = sqrt0(sp.lambda_minus / 2.0);
    for t in 0..d {
        for u in t + 1..d {
            psi[(t * d + u, e_plus(d, t, u))] = c(ap);
            psi[(u * d + t, e_plus(d, t, u))] = c(ap);
            psi[(t * d + u, e_minus(d, t, u))] = c(am);
            psi[(u * d + t, e_minus(d, t, u))] = c(-am);
        }
    }
    Ok(psi)
}

/// Purification as a flat state vector on (two qudits) ⊗ ancilla, d⁴ long.
pub fn purification(sp: &SpectralParams) -> Result<CVector> {
    let psi = purification_matrix(sp)?;
    let d2 = sp.d * sp.d;
    let mut v = CVector::zeros(d2 * d2);
    for x in 0..d2 {
        for e in 0..d2 {
            v[x * d2 + e] = psi[(x, e)];
        }
    }
    Ok(v)
}

/// The constrained two-qudit state assembled from its (μ, V) mixing form.
pub fn rho_ab(sp: &SpectralParams) -> Result<DensityOperator> {
    let d = sp.d;
    let df = d as f64;
    let p = sp.to_noise();
    let d2 = d * d;
    let mut m = CMatrix::identity(d2, d2) * c((2.0 * p.beta - p.mu) / (df * df));
    let epr = crate::protocol::epr_state(d);
    m += outer(&epr, &epr) * c(1.0 - 2.0 * p.beta - p.v);
    for t in 0..d {
        for t2 in 0..d {
            // |t t'⟩⟨t' t| exchange term
            m[(t * d + t2, t2 * d + t)] += c(p.v / df);
        }
        m[(t * d + t, t * d + t)] += c(p.mu / df);
    }
    DensityOperator::new(&(&m + m.adjoint()) * c(0.5))
}

/// tr_AB[|Ψ⟩⟨Ψ| (O ⊗ 1_E)] for an operator O on the two-qudit space.
fn trace_out_ab(psi: &CMatrix, op: &CMatrix) -> CMatrix {
    (op * psi).transpose() * psi.map(|z| z.conj())
}

/// Spectral data of the conditional ancilla states σ^{rk}_{s'} for one
/// announced (r, k): eigenvalues, the four-dimensional interference subspace
/// and the 2(d−2)-fold degenerate bulk.
#[derive(Debug, Clone)]
pub struct EveDecomposition {
    pub sp: SpectralParams,
    pub r: usize,
    pub k: usize,
    pub xi0: f64,
    pub xi1: f64,
    pub xi2: f64,
    /// normalized w_kk + w_ℓℓ (diagonal-family symmetric combination)
    pub a: Option<CVector>,
    /// normalized w_kk − w_ℓℓ
    pub b: Option<CVector>,
    /// normalized w_kℓ + w_ℓk
    pub c_vec: Option<CVector>,
    /// normalized w_kℓ − w_ℓk
    pub d_vec: Option<CVector>,
    /// normalized w_tk and w_tℓ for t ∉ {k, ℓ}; eigenvalue ξ₀ each
    pub bulk: Vec<CVector>,
    pub cos_2alpha: f64,
    pub cos_2phi: f64,
    pub alpha: f64,
    pub phi: f64,
}

fn normalize_or_none(v: CVector) -> Option<CVector> {
    let n2 = v.norm_squared();
    if n2 < 1e-20 {
        None
    } else {
        Some(v / c(n2.sqrt()))
    }
}

impl EveDecomposition {
    pub fn new(sp: &SpectralParams, r: usize, k: usize) -> Result<Self> {
        let d = sp.d;
        if r == 0 || r >= d {
            return Err(Error::Domain(format!("shift r = {r} outside 1..{}", d - 1)));
        }
        let k = k % d;
        let l = (k + r) % d;
        let w_kk = w_vector(sp, k, k);
        let w_ll = w_vector(sp, l, l);
        let w_kl = w_vector(sp, k, l);
        let w_lk = w_vector(sp, l, k);

        let diag_norm2 = w_kk.norm_squared();
        let off_norm2 = w_kl.norm_squared();
        let cos_2alpha = if diag_norm2 > 1e-20 {
            ((w_kk.adjoint() * &w_ll)[(0, 0)].re / diag_norm2).clamp(-1.0, 1.0)
        } else {
            f64::NAN
        };
        let cos_2phi = if off_norm2 > 1e-20 {
            ((w_kl.adjoint() * &w_lk)[(0, 0)].re / off_norm2).clamp(-1.0, 1.0)
        } else {
            f64::NAN
        };

        let a = normalize_or_none(&w_kk + &w_ll);
        let b = normalize_or_none(&w_kk - &w_ll);
        let c_vec = normalize_or_none(&w_kl + &w_lk);
        let d_vec = normalize_or_none(&w_kl - &w_lk);

        let mut bulk = Vec::with_capacity(2 * (d - 2));
        for t in 0..d {
            if t == k || t == l {
                continue;
            }
            if let Some(v) = normalize_or_none(w_vector(sp, t, k)) {
                bulk.push(v);
            }
            if let Some(v) = normalize_or_none(w_vector(sp, t, l)) {
                bulk.push(v);
            }
        }

        let (xi0, xi1, xi2) = sp.xi();
        Ok(EveDecomposition {
            sp: *sp,
            r,
            k,
            xi0,
            xi1,
            xi2,
            a,
            b,
            c_vec,
            d_vec,
            bulk,
            cos_2alpha,
            cos_2phi,
            alpha: 0.5 * cos_2alpha.acos(),
            phi: 0.5 * cos_2phi.acos(),
        })
    }

    fn half_d_lambda(&self) -> (f64, f64) {
        let d = self.sp.d as f64;
        (d / 2.0 * self.sp.lambda_plus, d / 2.0 * self.sp.lambda_minus)
    }

    fn radicand(&self, name: &'static str, value: f64) -> Result<f64> {
        if value < -RADICAND_TOL {
            return Err(Error::Infeasible { constraint: name, value });
        }
        Ok(value.max(0.0))
    }

    /// The ancilla state conditioned on the secret bit, assembled from the
    /// diagonal representation.
    pub fn sigma(&self, s_prime: u8) -> Result<DensityOperator> {
        let d2 = self.sp.d * self.sp.d;
        let sign = if s_prime == 0 { 1.0 } else { -1.0 };
        let (hp, hm) = self.half_d_lambda();
        let ca = self.radicand("xi2 - (d/2)lambda_plus", self.xi2 - hp)?.sqrt();
        let cb = self.radicand("xi1 - (d/2)lambda_minus", self.xi1 - hm)?.sqrt();

        let mut m = CMatrix::zeros(d2, d2);
        for v in &self.bulk {
            m += outer(v, v) * c(self.xi0);
        }
        let mut v2 = CVector::zeros(d2);
        if let Some(a) = &self.a {
            v2 += a * c(ca);
        }
        if let Some(cv) = &self.c_vec {
            v2 += cv * c(sign * hp.sqrt());
        }
        m += outer(&v2, &v2);
        let mut v1 = CVector::zeros(d2);
        if let Some(b) = &self.b {
            v1 += b * c(cb);
        }
        if let Some(dv) = &self.d_vec {
            v1 -= dv * c(sign * hm.sqrt());
        }
        m += outer(&v1, &v1);
        DensityOperator::new(m)
    }

    /// (σ₀ + σ₁)/2 without the cross terms.
    pub fn sigma_avg(&self) -> Result<DensityOperator> {
        let d2 = self.sp.d * self.sp.d;
        let (hp, hm) = self.half_d_lambda();
        let ca = self.radicand("xi2 - (d/2)lambda_plus", self.xi2 - hp)?;
        let cb = self.radicand("xi1 - (d/2)lambda_minus", self.xi1 - hm)?;
        let mut m = CMatrix::zeros(d2, d2);
        for v in &self.bulk {
            m += outer(v, v) * c(self.xi0);
        }
        for (vec, coeff) in [(&self.a, ca), (&self.c_vec, hp), (&self.b, cb), (&self.d_vec, hm)] {
            if let Some(v) = vec {
                m += outer(v, v) * c(coeff);
            }
        }
        DensityOperator::new(m)
    }

    /// (σ₀ − σ₁)/2: a rank ≤ 4 Hermitian cross-term operator.
    pub fn sigma_diff(&self) -> Result<CMatrix> {
        let d2 = self.sp.d * self.sp.d;
        let df = self.sp.d as f64;
        let beta = self.sp.beta();
        let lam_sum = self.sp.lambda_plus + self.sp.lambda_minus;
        let rad_ac = self.radicand(
            "d*lambda_minus + 2(1-beta) - d²/2 (lambda_plus+lambda_minus)",
            df * self.sp.lambda_minus + 2.0 * (1.0 - beta) - df * df / 2.0 * lam_sum,
        )?;
        let rad_bd = self.radicand(
            "d*lambda_plus + 2*beta - d²/2 (lambda_plus+lambda_minus)",
            df * self.sp.lambda_plus + 2.0 * beta - df * df / 2.0 * lam_sum,
        )?;
        let c_ac = 0.5 * sqrt0(df * self.sp.lambda_plus) * rad_ac.sqrt();
        let c_bd = 0.5 * sqrt0(df * self.sp.lambda_minus) * rad_bd.sqrt();
        let mut m = CMatrix::zeros(d2, d2);
        if let (Some(a), Some(cv)) = (&self.a, &self.c_vec) {
            m += (outer(a, cv) + outer(cv, a)) * c(c_ac);
        }
        if let (Some(b), Some(dv)) = (&self.b, &self.d_vec) {
            m -= (outer(b, dv) + outer(dv, b)) * c(c_bd);
        }
        Ok(m)
    }

    /// The eavesdropper's optimal binary POVM element for guessing the secret
    /// bit; the complement 1 − T₀ is the other element.
    pub fn guess_povm_t0(&self) -> CMatrix {
        let d2 = self.sp.d * self.sp.d;
        let mut t0 = CMatrix::identity(d2, d2) * c(0.5);
        if let (Some(a), Some(cv)) = (&self.a, &self.c_vec) {
            t0 += (outer(a, cv) + outer(cv, a)) * c(0.5);
        }
        if let (Some(b), Some(dv)) = (&self.b, &self.d_vec) {
            t0 -= (outer(b, dv) + outer(dv, b)) * c(0.5);
        }
        t0
    }

    /// Eigenvalue multiset of each conditional ancilla state.
    pub fn eigenvalue_multiset(&self) -> Vec<f64> {
        let d = self.sp.d;
        let mut ev = vec![self.xi0; 2 * (d - 2)];
        ev.push(self.xi1);
        ev.push(self.xi2);
        ev.resize(d * d, 0.0);
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }
}

/// Closed-form conditional ancilla state for announced (r, k) and secret bit.
pub fn eve_state_closed(
    sp: &SpectralParams,
    r: usize,
    k: usize,
    s_prime: u8,
) -> Result<(EveDecomposition, DensityOperator)> {
    let dec = EveDecomposition::new(sp, r, k)?;
    let sigma = dec.sigma(s_prime)?;
    Ok((dec, sigma))
}

/// Brute-force conditional ancilla state.
///
/// Computed along two independent routes and cross-checked to 1e−10 before
/// returning:
/// 1. exhaustive average over the 2^{d−1} sender strings with the right
///    secret bit and both receiver bits, each conditioned state obtained by
///    projecting the purification onto the rank-1 measurement operators;
/// 2. the closed average over sender strings, leaving a single two-qudit
///    operator to trace against the purification.
pub fn eve_state_bruteforce(
    sp: &SpectralParams,
    r: usize,
    k: usize,
    s_prime: u8,
) -> Result<DensityOperator> {
    let d = sp.d;
    if d > MAX_ATTACK_DIM {
        return Err(Error::Size(format!("brute force capped at d ≤ {MAX_ATTACK_DIM}")));
    }
    if r == 0 || r >= d {
        return Err(Error::Domain(format!("shift r = {r} outside 1..{}", d - 1)));
    }
    let k = k % d;
    let l = (k + r) % d;
    let d2 = d * d;
    let psi = purification_matrix(sp)?;

    // route 1: exhaustive sum over (a, s)
    let scale = d as f64 / (1u64 << d) as f64 * 0.5;
    let mut acc = CMatrix::zeros(d2, d2);
    let mut prob_sum = 0.0;
    for a in PhaseString::all(d)? {
        if a.secret_bit(k, r) != s_prime {
            continue;
        }
        let mu = mu_state(&a);
        for s in 0..2u8 {
            let bob = interference_state(d, k, r, s);
            // χ = |μ_a⟩ ⊗ |Ψ_ks⟩ on the two-qudit space
            let mut chi = CVector::zeros(d2);
            for t in 0..d {
                for t2 in 0..d {
                    chi[t * d + t2] = mu[t] * bob[t2];
                }
            }
            // unnormalized ancilla vector ⟨χ|Ψ⟩
            let phi = psi.transpose() * chi.map(|z| z.conj());
            let p = scale * phi.norm_squared();
            if p > 0.0 {
                acc += outer(&phi, &phi) * c(scale);
                prob_sum += p;
            }
        }
    }
    if prob_sum <= 0.0 {
        return Err(Error::InvalidState("conditioning event has zero probability".into()));
    }
    let route1 = acc / c(prob_sum);

    // route 2: closed sender average, σ = (d/2)·tr_AB[|Ψ⟩⟨Ψ| O ⊗ 1]
    let sign = if s_prime == 0 { 1.0 } else { -1.0 };
    let mut op_a = CMatrix::identity(d, d);
    op_a[(k, l)] += c(sign);
    op_a[(l, k)] += c(sign);
    let mut op_b = CMatrix::zeros(d, d);
    op_b[(k, k)] = c(1.0);
    op_b[(l, l)] = c(1.0);
    let op = kron(&op_a, &op_b)?;
    let route2 = trace_out_ab(&psi, &op) * c(d as f64 / 2.0);

    let dev = max_abs_entry(&(&route1 - &route2));
    if dev > 1e-10 {
        return Err(Error::InvalidState(format!(
            "exhaustive and closed sender averages disagree by {dev:.3e}"
        )));
    }
    DensityOperator::new(route1)
}

/// Column t of the receiver-side coupling isometry, a state on
/// (receiver qudit) ⊗ (ancilla), d³ long.
pub fn omega_column(sp: &SpectralParams, t: usize) -> Result<CVector> {
    let d = sp.d;
    if d > MAX_ATTACK_DIM {
        return Err(Error::Size(format!("isometry capped at d ≤ {MAX_ATTACK_DIM}")));
    }
    if t >= d {
        return Err(Error::Domain(format!("time slot {t} outside 0..{}", d - 1)));
    }
    let df = d as f64;
    let d2 = d * d;
    let mut v = CVector::zeros(d * d2);
    v[t * d2] = c(sqrt0(sp.lambda0));
    let amp1 = sqrt0(sp.lambda1);
    for j in 1..d {
        let phase = 2.0 * std::f64::consts::PI * (j * t) as f64 / df;
        v[t * d2 + j] = Complex::from_polar(amp1, phase);
    }
    let ap = sqrt0(df * sp.lambda_plus / 2.0);
    let am = sqrt0(df * sp.lambda_minus / 2.0);
    for t2 in 0..d {
        if t2 == t {
            continue;
        }
        let sgn = if t2 > t { 1.0 } else { -1.0 };
        v[t2 * d2 + e_plus(d, t, t2)] = c(ap);
        v[t2 * d2 + e_minus(d, t, t2)] = c(sgn * am);
    }
    Ok(v)
}

/// Gram-matrix deviation of the isometry columns from orthonormality.
#[derive(Debug, Clone, Copy)]
pub struct IsometryReport {
    pub d: usize,
    pub max_gram_deviation: f64,
}

pub fn attack_isometry_check(sp: &SpectralParams) -> Result<IsometryReport> {
    let d = sp.d;
    let cols: Vec<CVector> = (0..d).map(|t| omega_column(sp, t)).collect::<Result<_>>()?;
    let mut dev = 0.0_f64;
    for (i, a) in cols.iter().enumerate() {
        for (j, b) in cols.iter().enumerate() {
            let g = (a.adjoint() * b)[(0, 0)];
            let want = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((g - c(want)).norm());
        }
    }
    Ok(IsometryReport { d, max_gram_deviation: dev })
}

/// Ancilla vector coupled to receiver slot t when the sender string is `a`.
pub fn eve_vector_a(sp: &SpectralParams, a: &PhaseString, t: usize) -> Result<CVector> {
    let d = sp.d;
    if a.d() != d {
        return Err(Error::Dimension("phase string dimension mismatch".into()));
    }
    if t >= d {
        return Err(Error::Domain(format!("time slot {t} outside 0..{}", d - 1)));
    }
    let df = d as f64;
    let mut v = CVector::zeros(d * d);
    v[0] = c(sqrt0(sp.lambda0));
    let amp1 = sqrt0(sp.lambda1);
    for j in 1..d {
        let phase = 2.0 * std::f64::consts::PI * (j * t) as f64 / df;
        v[j] = Complex::from_polar(amp1, phase);
    }
    let ap = sqrt0(df / 2.0 * sp.lambda_plus);
    let am = sqrt0(df / 2.0 * sp.lambda_minus);
    for t2 in 0..d {
        if t2 == t {
            continue;
        }
        let rel = a.sign(t) * a.sign(t2);
        // antisymmetric components carry sgn(t − t'), the orientation under
        // which the coupling identity with the isometry columns holds exactly
        let sgn = if t > t2 { 1.0 } else { -1.0 };
        v[e_plus(d, t, t2)] = c(rel * ap);
        v[e_minus(d, t, t2)] = c(rel * sgn * am);
    }
    Ok(v)
}

/// Joint receiver ⊗ ancilla state after the coupling acts on |μ_a⟩⊗|E₀⟩.
pub fn coupled_be_state(sp: &SpectralParams, a: &PhaseString) -> Result<CVector> {
    let d = sp.d;
    if a.d() != d {
        return Err(Error::Dimension("phase string dimension mismatch".into()));
    }
    let mut v = CVector::zeros(d * d * d);
    let amp = 1.0 / (d as f64).sqrt();
    for t in 0..d {
        let col = omega_column(sp, t)?;
        v += col * c(a.sign(t) * amp);
    }
    Ok(v)
}

/// Receiver marginal of [`coupled_be_state`].
pub fn bob_reduced(sp: &SpectralParams, a: &PhaseString) -> Result<DensityOperator> {
    let d = sp.d;
    let be = coupled_be_state(sp, a)?;
    let full = outer(&be, &be);
    let reduced = partial_trace(&full, (d, d * d), Keep::Left)?;
    DensityOperator::new_with(reduced, &Tolerances { herm: 1e-9, trace: 1e-9, eig: 1e-9 })
}

/// One linear feasibility constraint c₀ + c₊λ₊ + c₋λ₋ ≥ 0.
#[derive(Debug, Clone, Copy)]
pub struct Constraint {
    pub name: &'static str,
    pub c0: f64,
    pub c_plus: f64,
    pub c_minus: f64,
}

impl Constraint {
    pub fn value(&self, lambda_plus: f64, lambda_minus: f64) -> f64 {
        self.c0 + self.c_plus * lambda_plus + self.c_minus * lambda_minus
    }
}

/// The polygon of admissible (λ₊, λ₋) at fixed (d, β).
#[derive(Debug, Clone)]
pub struct FeasibleRegion {
    pub d: usize,
    pub beta: f64,
    pub constraints: Vec<Constraint>,
    /// polygon corners, deduplicated
    pub vertices: Vec<(f64, f64)>,
}

impl FeasibleRegion {
    pub fn contains(&self, lambda_plus: f64, lambda_minus: f64) -> bool {
        self.constraints.iter().all(|con| con.value(lambda_plus, lambda_minus) >= -FEAS_TOL)
    }

    /// Upper end of the λ₊ range (at λ₋ = 0).
    pub fn lambda_plus_max(&self) -> f64 {
        let d = self.d as f64;
        let a1 = 4.0 * self.beta / (d * (d - 2.0));
        let a0 = 1.0 / (d - 1.0) - 2.0 * self.beta / d;
        a1.min(a0).max(0.0)
    }

    /// Upper end of the λ₋ range (at λ₊ = 0).
    pub fn lambda_minus_max(&self) -> f64 {
        let d = self.d as f64;
        4.0 * self.beta / (d * d)
    }
}

pub fn feasible_region(d: usize, beta: f64) -> Result<FeasibleRegion> {
    check_dim(d)?;
    if !(0.0..=0.5).contains(&beta) {
        return Err(Error::Domain(format!("beta = {beta} outside [0, 1/2]")));
    }
    let df = d as f64;
    let constraints = vec![
        Constraint { name: "lambda_plus", c0: 0.0, c_plus: 1.0, c_minus: 0.0 },
        Constraint { name: "lambda_minus", c0: 0.0, c_plus: 0.0, c_minus: 1.0 },
        Constraint {
            name: "lambda1",
            c0: 2.0 * beta / df,
            c_plus: 1.0 - df / 2.0,
            c_minus: -df / 2.0,
        },
        Constraint {
            name: "lambda0",
            c0: 1.0 - 2.0 * beta + 2.0 * beta / df,
            c_plus: -(df - 1.0),
            c_minus: 0.0,
        },
    ];
    let a1 = 4.0 * beta / (df * (df - 2.0));
    let a0 = 1.0 / (df - 1.0) - 2.0 * beta / df;
    let mmax = 4.0 * beta / (df * df);
    let mut vertices = vec![(0.0, 0.0)];
    if beta > 0.0 {
        vertices.push((0.0, mmax));
        if a1 <= a0 {
            vertices.push((a1, 0.0));
        } else {
            // λ₀ ≥ 0 truncates the λ₊ corner
            vertices.push((a0, 0.0));
            vertices.push((a0, (4.0 * beta / df - (df - 2.0) * a0) / df));
        }
    }
    Ok(FeasibleRegion { d, beta, constraints, vertices })
}
