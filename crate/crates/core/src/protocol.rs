//! Protocol objects: pulse-train states, the sender and receiver POVMs, the
//! maximally entangled two-qudit state, symmetrization maps and outcome
//! probabilities.
//!
//! Time indices are always reduced modulo `d` and the qudit dimension must be
//! at least 3.

use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::numerics::{
    c, kron, max_abs_entry, CMatrix, CVector, Complex64, DensityOperator, Tolerances,
};

pub const MIN_DIM: usize = 3;
/// Sender POVM materializes 2^d elements; keep d small.
pub const MAX_ALICE_DIM: usize = 12;

/// A phase bitstring of length `d` (one bit per time slot).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseString {
    d: usize,
    bits: u32,
}

impl PhaseString {
    pub fn new(d: usize, bits: u32) -> Result<Self> {
        if d < MIN_DIM {
            return Err(Error::Domain(format!("dimension {d} < {MIN_DIM}")));
        }
        if d > 32 {
            return Err(Error::Size(format!("dimension {d} > 32")));
        }
        if bits >> d != 0 {
            return Err(Error::Domain(format!("bit string 0x{bits:x} longer than {d} bits")));
        }
        Ok(PhaseString { d, bits })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut mask = 0u32;
        for (t, &b) in bits.iter().enumerate() {
            if b > 1 {
                return Err(Error::Domain(format!("bit {b} at position {t}")));
            }
            mask |= (b as u32) << t;
        }
        Self::new(bits.len(), mask)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn mask(&self) -> u32 {
        self.bits
    }

    /// Bit at time slot `t` (mod d).
    pub fn bit(&self, t: usize) -> u8 {
        ((self.bits >> (t % self.d)) & 1) as u8
    }

    /// Sign (−1)^{a_t}.
    pub fn sign(&self, t: usize) -> f64 {
        if self.bit(t) == 1 {
            -1.0
        } else {
            1.0
        }
    }

    /// The secret bit a_k ⊕ a_{k+r}.
    pub fn secret_bit(&self, k: usize, r: usize) -> u8 {
        self.bit(k) ^ self.bit(k + r)
    }

    /// All 2^d strings of length d.
    pub fn all(d: usize) -> Result<impl Iterator<Item = PhaseString>> {
        if d > MAX_ALICE_DIM {
            return Err(Error::Size(format!("enumerating 2^{d} phase strings (cap {MAX_ALICE_DIM})")));
        }
        Ok((0u32..1 << d).map(move |bits| PhaseString { d, bits }))
    }
}

/// Receiver outcome (time slot k, interference bit s).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BobOutcome {
    pub k: usize,
    pub s: u8,
}

/// Full sifted-round record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundOutcome {
    pub k: usize,
    pub r: usize,
    pub s: u8,
    pub s_prime: u8,
}

impl RoundOutcome {
    pub fn new(d: usize, k: usize, r: usize, s: u8, s_prime: u8) -> Result<Self> {
        if r == 0 || r >= d {
            return Err(Error::Domain(format!("shift r = {r} outside 1..{}", d - 1)));
        }
        Ok(RoundOutcome { k: k % d, r, s, s_prime })
    }

    /// The second announced slot, ℓ = k + r mod d (always ≠ k).
    pub fn ell(&self, d: usize) -> usize {
        (self.k + self.r) % d
    }
}

/// A positive-operator-valued measure with structured outcome labels.
#[derive(Debug, Clone)]
pub struct Povm<L> {
    elements: Vec<(L, CMatrix)>,
    dim: usize,
}

impl<L> Povm<L> {
    /// Validates positivity of each element and completeness Σ M = 1.
    pub fn new(elements: Vec<(L, CMatrix)>) -> Result<Self> {
        let dim = match elements.first() {
            Some((_, m)) => m.nrows(),
            None => return Err(Error::InvalidState("empty POVM".into())),
        };
        let tol = Tolerances::default();
        let mut sum = CMatrix::zeros(dim, dim);
        for (_, m) in &elements {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::Dimension("POVM elements of mixed dimension".into()));
            }
            let min_eig = m
                .clone()
                .symmetric_eigenvalues()
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            if min_eig < -tol.eig {
                return Err(Error::InvalidState(format!(
                    "POVM element has eigenvalue {min_eig:.3e}"
                )));
            }
            sum += m;
        }
        let dev = max_abs_entry(&(&sum - CMatrix::identity(dim, dim)));
        if dev > 1e-10 {
            return Err(Error::InvalidState(format!("POVM completeness deviation {dev:.3e}")));
        }
        Ok(Povm { elements, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[(L, CMatrix)] {
        &self.elements
    }
}

/// Phase-encoded pulse-train state: amplitude (−1)^{a_t}/√d on |t⟩.
pub fn mu_state(a: &PhaseString) -> CVector {
    let d = a.d();
    let amp = 1.0 / (d as f64).sqrt();
    CVector::from_fn(d, |t, _| c(a.sign(t) * amp))
}

/// Interference basis state (|k⟩ + (−1)^s |k+r⟩)/√2.
pub fn interference_state(d: usize, k: usize, r: usize, s: u8) -> CVector {
    let mut v = CVector::zeros(d);
    let x = std::f64::consts::FRAC_1_SQRT_2;
    v[k % d] = c(x);
    v[(k + r) % d] += c(if s == 1 { -x } else { x });
    v
}

/// Receiver POVM for shift r: 2d elements ½|Ψ_ks⟩⟨Ψ_ks|.
pub fn bob_povm(d: usize, r: usize) -> Result<Povm<BobOutcome>> {
    if d < MIN_DIM {
        return Err(Error::Domain(format!("dimension {d} < {MIN_DIM}")));
    }
    if r == 0 || r >= d {
        return Err(Error::Domain(format!("shift r = {r} outside 1..{}", d - 1)));
    }
    let mut elements = Vec::with_capacity(2 * d);
    for k in 0..d {
        for s in 0..2u8 {
            let psi = interference_state(d, k, r, s);
            let m = &psi * psi.adjoint() * c(0.5);
            elements.push((BobOutcome { k, s }, m));
        }
    }
    Povm::new(elements)
}

/// Sender POVM: 2^d elements (d/2^d)|μ_z⟩⟨μ_z|.
pub fn alice_povm(d: usize) -> Result<Povm<PhaseString>> {
    let scale = d as f64 / (1u64 << d) as f64;
    let mut elements = Vec::with_capacity(1 << d);
    for z in PhaseString::all(d)? {
        let mu = mu_state(&z);
        elements.push((z, &mu * mu.adjoint() * c(scale)));
    }
    Povm::new(elements)
}

/// Single sender POVM element (d/2^d)|μ_a⟩⟨μ_a| without materializing the rest.
pub fn alice_povm_element(a: &PhaseString) -> CMatrix {
    let d = a.d();
    let mu = mu_state(a);
    &mu * mu.adjoint() * c(d as f64 / (1u64 << d) as f64)
}

/// Maximally entangled two-qudit state (1/√d) Σ_t |tt⟩.
pub fn epr_state(d: usize) -> CVector {
    alpha_state(d, 0).unwrap()
}

/// Phased entangled basis state (1/√d) Σ_t e^{i2πjt/d} |tt⟩.
pub fn alpha_state(d: usize, j: usize) -> Result<CVector> {
    if j >= d {
        return Err(Error::Domain(format!("index j = {j} outside 0..{}", d - 1)));
    }
    let mut v = CVector::zeros(d * d);
    let amp = 1.0 / (d as f64).sqrt();
    for t in 0..d {
        let phase = 2.0 * std::f64::consts::PI * (j * t) as f64 / d as f64;
        v[t * d + t] = Complex::from_polar(amp, phase);
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Sym,
    Antisym,
}

/// Exchange basis state (|t t'⟩ ± |t' t⟩)/√2 for t < t'.
pub fn pair_state(d: usize, t: usize, t2: usize, parity: Parity) -> Result<CVector> {
    if t >= t2 || t2 >= d {
        return Err(Error::Domain(format!("need t < t' < d, got ({t},{t2}) at d={d}")));
    }
    let mut v = CVector::zeros(d * d);
    let x = std::f64::consts::FRAC_1_SQRT_2;
    v[t * d + t2] = c(x);
    v[t2 * d + t] = c(match parity {
        Parity::Sym => x,
        Parity::Antisym => -x,
    });
    Ok(v)
}

/// Joint outcome probability tr[(Q_a ⊗ M^{(r)}_{ks}) ρ] on a two-qudit state.
pub fn joint_probability(
    rho: &DensityOperator,
    a: &PhaseString,
    k: usize,
    s: u8,
    r: usize,
) -> Result<f64> {
    let d = a.d();
    if rho.dim() != d * d {
        return Err(Error::Dimension(format!(
            "state dim {} does not match d² = {}",
            rho.dim(),
            d * d
        )));
    }
    if r == 0 || r >= d {
        return Err(Error::Domain(format!("shift r = {r} outside 1..{}", d - 1)));
    }
    let q = alice_povm_element(a);
    let psi = interference_state(d, k, r, s);
    let m = &psi * psi.adjoint() * c(0.5);
    let op = kron(&q, &m)?;
    let p: Complex64 = (op * rho.matrix()).diagonal().iter().sum();
    Ok(p.re)
}

/// Same probability from the four surviving component families of a
/// symmetrized state; used to cross-check [`joint_probability`].
pub fn joint_probability_components(
    rho: &DensityOperator,
    a: &PhaseString,
    k: usize,
    s: u8,
    r: usize,
) -> Result<f64> {
    let d = a.d();
    if rho.dim() != d * d {
        return Err(Error::Dimension("state dim mismatch".into()));
    }
    let m = rho.matrix();
    let k = k % d;
    let l = (k + r) % d;
    let s_sign = if s == 1 { -1.0 } else { 1.0 };
    let mut total = Complex::new(0.0, 0.0);
    for t in 0..d {
        for tau in 0..d {
            let phase = a.sign(t) * a.sign(tau);
            let direct = m[(t * d + k, tau * d + k)] + m[(t * d + l, tau * d + l)];
            let cross = m[(t * d + k, tau * d + l)] + m[(t * d + l, tau * d + k)];
            total += c(phase) * (direct + c(s_sign) * cross);
        }
    }
    Ok((total / c(4.0 * (1u64 << d) as f64)).re)
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    // Heap's algorithm
    let mut items: Vec<usize> = (0..d).collect();
    let mut out = Vec::new();
    fn heap(k: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, items, out);
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    heap(d, &mut items, &mut out);
    out
}

/// Conjugate by the simultaneous permutation π ⊗ π of both qudits.
fn permute_two_qudit(m: &CMatrix, d: usize, pi: &[usize]) -> CMatrix {
    let mut out = CMatrix::zeros(d * d, d * d);
    for t in 0..d {
        for t2 in 0..d {
            for u in 0..d {
                for u2 in 0..d {
                    out[(pi[t] * d + pi[t2], pi[u] * d + pi[u2])] = m[(t * d + t2, u * d + u2)];
                }
            }
        }
    }
    out
}

/// Conjugate by the simultaneous phase flip F_c ⊗ F_c.
fn flip_two_qudit(m: &CMatrix, d: usize, cbits: u32) -> CMatrix {
    let sign = |t: usize| if (cbits >> t) & 1 == 1 { -1.0 } else { 1.0 };
    let mut out = m.clone();
    for t in 0..d {
        for t2 in 0..d {
            for u in 0..d {
                for u2 in 0..d {
                    let f = sign(t) * sign(t2) * sign(u) * sign(u2);
                    if f < 0.0 {
                        out[(t * d + t2, u * d + u2)] = -out[(t * d + t2, u * d + u2)];
                    }
                }
            }
        }
    }
    out
}

pub const MAX_EXACT_SYMMETRIZE_DIM: usize = 6;

/// Exact twirl of a two-qudit state: average over all d! simultaneous basis
/// permutations, then over all 2^d simultaneous phase flips. Only the four
/// real component families survive.
pub fn symmetrize(rho: &DensityOperator) -> Result<DensityOperator> {
    let d2 = rho.dim();
    let d = (d2 as f64).sqrt().round() as usize;
    if d * d != d2 {
        return Err(Error::Dimension(format!("dim {d2} is not a perfect square")));
    }
    if d > MAX_EXACT_SYMMETRIZE_DIM {
        return Err(Error::Size(format!(
            "exact symmetrization capped at d ≤ {MAX_EXACT_SYMMETRIZE_DIM}; use symmetrize_sampled"
        )));
    }
    let perms = permutations(d);
    let mut acc = CMatrix::zeros(d2, d2);
    for pi in &perms {
        acc += permute_two_qudit(rho.matrix(), d, pi);
    }
    acc /= c(perms.len() as f64);

    let mut out = CMatrix::zeros(d2, d2);
    for cbits in 0u32..1 << d {
        out += flip_two_qudit(&acc, d, cbits);
    }
    out /= c((1u64 << d) as f64);
    DensityOperator::new(out)
}

/// Monte-Carlo twirl for dimensions where d! is out of reach. Returns the
/// averaged state and the standard error of the matrix mean in Frobenius norm.
pub fn symmetrize_sampled(
    rho: &DensityOperator,
    samples: usize,
    seed: u64,
) -> Result<(DensityOperator, f64)> {
    let d2 = rho.dim();
    let d = (d2 as f64).sqrt().round() as usize;
    if d * d != d2 {
        return Err(Error::Dimension(format!("dim {d2} is not a perfect square")));
    }
    if samples == 0 {
        return Err(Error::Domain("samples must be positive".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut mean = CMatrix::zeros(d2, d2);
    let mut sq_norm_sum = 0.0;
    for _ in 0..samples {
        let mut pi: Vec<usize> = (0..d).collect();
        for i in (1..d).rev() {
            pi.swap(i, rng.gen_range(0..=i));
        }
        let cbits: u32 = rng.gen_range(0..1u32 << d);
        let x = flip_two_qudit(&permute_two_qudit(rho.matrix(), d, &pi), d, cbits);
        sq_norm_sum += x.norm_squared();
        mean += x;
    }
    mean /= c(samples as f64);
    let var = (sq_norm_sum / samples as f64 - mean.norm_squared()).max(0.0);
    let se = (var / samples as f64).sqrt();
    // sampled average drifts slightly off Hermitian/unit trace; re-validate loosely
    let sym = (&mean + mean.adjoint()) / c(2.0);
    let tr: Complex64 = sym.diagonal().iter().sum();
    let out = DensityOperator::new_with(
        sym / tr,
        &Tolerances { herm: 1e-9, trace: 1e-9, eig: 1e-6 },
    )?;
    Ok((out, se))
}

/// Sample an outcome from Born probabilities with a fixed seed.
pub fn measure<L: Clone>(state: &DensityOperator, povm: &Povm<L>, seed: u64) -> Result<L> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    measure_with_rng(state, povm, &mut rng)
}

/// Inverse-CDF Born sampling in the POVM's element order.
pub fn measure_with_rng<L: Clone>(
    state: &DensityOperator,
    povm: &Povm<L>,
    rng: &mut ChaCha12Rng,
) -> Result<L> {
    if state.dim() != povm.dim() {
        return Err(Error::Dimension(format!(
            "state dim {} vs POVM dim {}",
            state.dim(),
            povm.dim()
        )));
    }
    let probs: Vec<f64> = povm
        .elements()
        .iter()
        .map(|(_, m)| {
            let p: Complex64 = (m * state.matrix()).diagonal().iter().sum();
            p.re
        })
        .collect();
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidState(format!("outcome probabilities sum to {total}")));
    }
    let x: f64 = rng.gen::<f64>() * total;
    let mut cdf = 0.0;
    for (p, (label, _)) in probs.iter().zip(povm.elements()) {
        cdf += p.max(0.0);
        if x < cdf {
            return Ok(label.clone());
        }
    }
    Ok(povm.elements().last().unwrap().0.clone())
}

/// Born probability of a pure state under one POVM element.
pub fn born_probability(v: &CVector, element: &CMatrix) -> f64 {
    (v.adjoint() * element * v)[(0, 0)].re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{outer, partial_trace, Keep};
    use std::collections::HashMap;

    #[test]
    fn mu_state_examples() {
        let a = PhaseString::new(5, 0).unwrap();
        let v = mu_state(&a);
        assert!(v.iter().all(|z| (z - c(1.0 / 5f64.sqrt())).norm() < 1e-15));

        let a = PhaseString::from_bits(&[0, 1, 0, 1]).unwrap();
        let v = mu_state(&a);
        let want = [0.5, -0.5, 0.5, -0.5];
        for (z, w) in v.iter().zip(want) {
            assert!((z - c(w)).norm() < 1e-15);
        }

        for bits in 0..(1u32 << 4) {
            let a = PhaseString::new(4, bits).unwrap();
            assert!((mu_state(&a).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bob_povm_complete_and_orthogonal() {
        for d in 3..=8 {
            for r in 1..d {
                let povm = bob_povm(d, r).unwrap(); // Povm::new checks Σ = 1
                for k in 0..d {
                    let m0 = &povm.elements()[2 * k].1;
                    let m1 = &povm.elements()[2 * k + 1].1;
                    let prod: Complex64 = (m0 * m1).diagonal().iter().sum();
                    assert!(prod.norm() < 1e-14);
                }
            }
        }
        assert!(bob_povm(5, 0).is_err());
        assert!(bob_povm(5, 5).is_err());
    }

    #[test]
    fn bob_measurement_statistics_on_mu() {
        // outcome k uniform with s = a_k ⊕ a_{k+r}, zero otherwise
        let d = 5;
        let a = PhaseString::new(d, 0b10110).unwrap();
        let rho = DensityOperator::from_pure(&mu_state(&a)).unwrap();
        for r in 1..d {
            let povm = bob_povm(d, r).unwrap();
            for (label, m) in povm.elements() {
                let p: Complex64 = (m * rho.matrix()).diagonal().iter().sum();
                let expect = if label.s == a.secret_bit(label.k, r) { 1.0 / d as f64 } else { 0.0 };
                assert!((p.re - expect).abs() < 1e-12, "d={d} r={r} {label:?}");
            }
        }
    }

    #[test]
    fn alice_povm_examples() {
        let povm = alice_povm(3).unwrap(); // completeness checked in constructor
        for (_, q) in povm.elements() {
            let ev = q.clone().symmetric_eigenvalues();
            let mut nonzero: Vec<f64> = ev.iter().cloned().filter(|l| l.abs() > 1e-12).collect();
            assert_eq!(nonzero.len(), 1);
            assert!((nonzero.pop().unwrap() - 3.0 / 8.0).abs() < 1e-12);
        }
        // rank-1 overlap tr(Q_z |μ_z⟩⟨μ_z|) = d/2^d
        for (z, q) in povm.elements() {
            let mu = mu_state(z);
            let val = (mu.adjoint() * q * &mu)[(0, 0)].re;
            assert!((val - 3.0 / 8.0).abs() < 1e-12);
        }
        assert!(alice_povm(13).is_err());
    }

    #[test]
    fn entangled_basis_orthonormal() {
        let d = 5;
        for i in 0..d {
            for j in 0..d {
                let vi = alpha_state(d, i).unwrap();
                let vj = alpha_state(d, j).unwrap();
                let ip = (vi.adjoint() * &vj)[(0, 0)];
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - c(want)).norm() < 1e-12);
            }
        }
        for t in 0..d {
            for t2 in t + 1..d {
                for parity in [Parity::Sym, Parity::Antisym] {
                    let dv = pair_state(d, t, t2, parity).unwrap();
                    assert!((dv.norm() - 1.0).abs() < 1e-14);
                    for j in 0..d {
                        let ip = (alpha_state(d, j).unwrap().adjoint() * &dv)[(0, 0)];
                        assert!(ip.norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn epr_amplitudes() {
        let v = epr_state(3);
        for (idx, z) in v.iter().enumerate() {
            let (t, t2) = (idx / 3, idx % 3);
            let want = if t == t2 { 1.0 / 3f64.sqrt() } else { 0.0 };
            assert!((z - c(want)).norm() < 1e-15);
        }
    }

    #[test]
    fn joint_probability_on_epr() {
        // noiseless state: p = (1/(2^d d)) δ_{s, a_k ⊕ a_{k+r}}
        let d = 3;
        let rho = DensityOperator::from_pure(&epr_state(d)).unwrap();
        let mut sum = 0.0;
        for a in PhaseString::all(d).unwrap() {
            for r in 1..d {
                for k in 0..d {
                    for s in 0..2u8 {
                        let p = joint_probability(&rho, &a, k, s, r).unwrap();
                        let expect = if s == a.secret_bit(k, r) {
                            1.0 / ((1 << d) as f64 * d as f64)
                        } else {
                            0.0
                        };
                        assert!((p - expect).abs() < 1e-14);
                        if r == 1 {
                            sum += p;
                        }
                    }
                }
            }
        }
        assert!((sum - 1.0).abs() < 1e-12); // completeness at fixed r
    }

    #[test]
    fn joint_probability_matches_component_formula() {
        use crate::testutil::random_density;
        use rand::SeedableRng;
        let d = 4;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        let rho = symmetrize(&random_density(d * d, &mut rng)).unwrap();
        for a in PhaseString::all(d).unwrap() {
            for r in 1..d {
                for k in 0..d {
                    for s in 0..2u8 {
                        let p1 = joint_probability(&rho, &a, k, s, r).unwrap();
                        let p2 = joint_probability_components(&rho, &a, k, s, r).unwrap();
                        assert!((p1 - p2).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn symmetrize_fixes_epr() {
        let rho = DensityOperator::from_pure(&epr_state(4)).unwrap();
        let out = symmetrize(&rho).unwrap();
        assert!(max_abs_entry(&(out.matrix() - rho.matrix())) < 1e-12);
    }

    #[test]
    fn symmetrize_kills_odd_components_and_is_idempotent() {
        use crate::testutil::random_density;
        use rand::SeedableRng;
        let d = 4;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        let rho = random_density(d * d, &mut rng);
        let s1 = symmetrize(&rho).unwrap();
        // survivors: (tt,tt), (tt,uu), (tu,tu), (tu,ut); everything else ≤ 1e-12
        for t in 0..d {
            for t2 in 0..d {
                for u in 0..d {
                    for u2 in 0..d {
                        let v = s1.matrix()[(t * d + t2, u * d + u2)];
                        let surviving = (t == t2 && u == u2)
                            || (t == u && t2 == u2)
                            || (t == u2 && t2 == u);
                        if !surviving {
                            assert!(v.norm() < 1e-12, "({t}{t2},{u}{u2}) = {v}");
                        } else {
                            assert!(v.im.abs() < 1e-12);
                        }
                    }
                }
            }
        }
        let s2 = symmetrize(&s1).unwrap();
        assert!(max_abs_entry(&(s2.matrix() - s1.matrix())) < 1e-12);
    }

    #[test]
    fn symmetrize_sampled_approaches_exact() {
        use crate::testutil::random_density;
        use rand::SeedableRng;
        let d = 4;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(13);
        let rho = random_density(d * d, &mut rng);
        let exact = symmetrize(&rho).unwrap();
        let (sampled, se) = symmetrize_sampled(&rho, 20_000, 99).unwrap();
        assert!(se < 0.05);
        assert!(max_abs_entry(&(sampled.matrix() - exact.matrix())) < 0.02);
    }

    #[test]
    fn measure_deterministic_cases() {
        let d = 4;
        // computational-basis POVM
        let mut elems = Vec::new();
        for i in 0..d {
            let mut v = CVector::zeros(d);
            v[i] = c(1.0);
            elems.push((i, outer(&v, &v)));
        }
        let povm = Povm::new(elems).unwrap();
        let mut zero = CVector::zeros(d);
        zero[0] = c(1.0);
        let rho = DensityOperator::from_pure(&zero).unwrap();
        for seed in 0..20 {
            assert_eq!(measure(&rho, &povm, seed).unwrap(), 0);
        }
    }

    #[test]
    fn measure_frequencies_match_born() {
        let d = 4;
        let a = PhaseString::new(d, 0b0110).unwrap();
        let rho = DensityOperator::from_pure(&mu_state(&a)).unwrap();
        let r = 2;
        let povm = bob_povm(d, r).unwrap();
        let n = 100_000usize;
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let mut counts: HashMap<(usize, u8), usize> = HashMap::new();
        for _ in 0..n {
            let out = measure_with_rng(&rho, &povm, &mut rng).unwrap();
            // interference bit is always the secret bit
            assert_eq!(out.s, a.secret_bit(out.k, r));
            *counts.entry((out.k, out.s)).or_default() += 1;
        }
        let p = 1.0 / d as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        for (_, &count) in &counts {
            let freq = count as f64 / n as f64;
            assert!((freq - p).abs() < 3.0 * sigma + 1e-9, "freq {freq}");
        }
    }

    #[test]
    fn phase_flip_protocol_equivalent_to_plain() {
        // joint law of (k, reported bit) with explicit flips == plain protocol,
        // exhaustively over a, c, r at d = 3
        let d = 3;
        let mut plain: HashMap<(usize, usize, u8), f64> = HashMap::new();
        let mut flipped: HashMap<(usize, usize, u8), f64> = HashMap::new();
        let strings: Vec<PhaseString> = PhaseString::all(d).unwrap().collect();
        let weight = 1.0 / (strings.len() * strings.len() * (d - 1)) as f64;
        for a in &strings {
            for cflip in &strings {
                for r in 1..d {
                    let povm = bob_povm(d, r).unwrap();
                    // plain: measure |μ_a⟩ directly
                    let mu_a = mu_state(a);
                    // flipped: measure |μ_{a⊕c}⟩, then correct s by c_k ⊕ c_ℓ
                    let ac = PhaseString::new(d, a.mask() ^ cflip.mask()).unwrap();
                    let mu_ac = mu_state(&ac);
                    for (label, m) in povm.elements() {
                        let ell = (label.k + r) % d;
                        let p_plain = born_probability(&mu_a, m);
                        *plain.entry((r, label.k, label.s)).or_default() += weight * p_plain;
                        let corrected = label.s ^ cflip.bit(label.k) ^ cflip.bit(ell);
                        let p_flip = born_probability(&mu_ac, m);
                        *flipped.entry((r, label.k, corrected)).or_default() += weight * p_flip;
                    }
                }
            }
        }
        for (key, p) in &plain {
            let q = flipped.get(key).copied().unwrap_or(0.0);
            assert!((p - q).abs() < 1e-12, "{key:?}: {p} vs {q}");
        }
    }

    #[test]
    fn partial_trace_of_epr_projector() {
        let d = 3;
        let rho = DensityOperator::from_pure(&epr_state(d)).unwrap();
        let reduced = partial_trace(rho.matrix(), (d, d), Keep::Left).unwrap();
        let expect = CMatrix::identity(d, d) / c(d as f64);
        assert!(max_abs_entry(&(&reduced - &expect)) < 1e-14);
    }
}
