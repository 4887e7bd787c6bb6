//! Dense complex linear algebra and entropy primitives.
//!
//! Everything here works on small dense Hermitian matrices (dimension a few
//! thousand at most). Eigendecomposition is delegated to `nalgebra`'s
//! Hermitian solver; this module adds the validation, deterministic ordering
//! and entropy conventions the rest of the crate relies on. All logarithms
//! are base 2.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest matrix dimension `kron` will produce.
pub const KRON_DIM_CAP: usize = 1 << 16;

/// Numerical tolerances used when validating states and spectra.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// max allowed |M - M†| entry for a matrix declared Hermitian
    pub herm: f64,
    /// max allowed |tr ρ - 1|
    pub trace: f64,
    /// eigenvalues above `-eig` count as non-negative
    pub eig: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { herm: 1e-10, trace: 1e-10, eig: 1e-9 }
    }
}

pub fn c(re: f64) -> Complex64 {
    Complex::new(re, 0.0)
}

/// Largest |entry| of `m`.
pub fn max_abs_entry(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Max entry deviation from Hermiticity.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let mut dev = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..=i {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

fn require_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    Ok(m.nrows())
}

fn require_hermitian(m: &CMatrix, tol: f64) -> Result<()> {
    let dev = hermiticity_deviation(m);
    if dev > tol {
        return Err(Error::NotHermitian { deviation: dev, tol });
    }
    Ok(())
}

/// A validated density operator: Hermitian, unit trace, positive semidefinite
/// within [`Tolerances`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::new_with(matrix, &Tolerances::default())
    }

    pub fn new_with(matrix: CMatrix, tol: &Tolerances) -> Result<Self> {
        require_square(&matrix)?;
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        require_hermitian(&matrix, tol.herm)?;
        let tr: Complex64 = matrix.diagonal().iter().sum();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::InvalidState(format!("trace = {} instead of 1", tr)));
        }
        let min_eig = matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -tol.eig {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(DensityOperator { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Rank-1 projector |v⟩⟨v| for a normalized vector.
    pub fn from_pure(v: &CVector) -> Result<Self> {
        let n2 = v.norm_squared();
        if (n2 - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("vector norm² = {n2}, not 1")));
        }
        Self::new(outer(v, v))
    }
}

/// |u⟩⟨v|
pub fn outer(u: &CVector, v: &CVector) -> CMatrix {
    u * v.adjoint()
}

/// Kronecker product A ⊗ B.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    if ra.saturating_mul(rb) > KRON_DIM_CAP || ca.saturating_mul(cb) > KRON_DIM_CAP {
        return Err(Error::Size(format!(
            "kron result {}x{} exceeds cap {KRON_DIM_CAP}",
            ra * rb,
            ca * cb
        )));
    }
    Ok(a.kronecker(b))
}

/// Which tensor factor `partial_trace` keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    Left,
    Right,
}

/// Partial trace of an operator on a bipartite space of dimensions
/// `dims = (d_left, d_right)`.
pub fn partial_trace(m: &CMatrix, dims: (usize, usize), keep: Keep) -> Result<CMatrix> {
    let n = require_square(m)?;
    let (dl, dr) = dims;
    if dl * dr != n {
        return Err(Error::Dimension(format!("cannot split dim {n} as {dl}x{dr}")));
    }
    match keep {
        Keep::Left => {
            let mut out = CMatrix::zeros(dl, dl);
            for i in 0..dl {
                for j in 0..dl {
                    let mut s = Complex::new(0.0, 0.0);
                    for k in 0..dr {
                        s += m[(i * dr + k, j * dr + k)];
                    }
                    out[(i, j)] = s;
                }
            }
            Ok(out)
        }
        Keep::Right => {
            let mut out = CMatrix::zeros(dr, dr);
            for i in 0..dr {
                for j in 0..dr {
                    let mut s = Complex::new(0.0, 0.0);
                    for k in 0..dl {
                        s += m[(k * dr + i, k * dr + j)];
                    }
                    out[(i, j)] = s;
                }
            }
            Ok(out)
        }
    }
}

/// Eigendecomposition of a Hermitian matrix with a deterministic ordering:
/// eigenvalues ascending, ties broken by lexicographic comparison of the
/// phase-fixed eigenvector entries rounded to 10 decimals.
#[derive(Debug, Clone)]
pub struct HermitianEigensystem {
    pub eigenvalues: Vec<f64>,
    /// columns are the orthonormal eigenvectors, in eigenvalue order
    pub eigenvectors: CMatrix,
}

impl HermitianEigensystem {
    /// Σ λᵢ |vᵢ⟩⟨vᵢ|
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.eigenvectors.nrows();
        let mut m = CMatrix::zeros(n, n);
        for (i, &lam) in self.eigenvalues.iter().enumerate() {
            let v = self.eigenvectors.column(i).clone_owned();
            m += outer(&v, &v) * c(lam);
        }
        m
    }
}

fn round10(x: f64) -> f64 {
    (x * 1e10).round() / 1e10
}

/// Fix the global phase of `v` so its largest-magnitude entry is real positive.
fn phase_fix(v: &mut CVector) {
    let mut best = 0usize;
    let mut best_mag = 0.0_f64;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > best_mag + 1e-14 {
            best_mag = m;
            best = i;
        }
    }
    if best_mag > 0.0 {
        let phase = v[best] / best_mag;
        let correction = phase.conj();
        for z in v.iter_mut() {
            *z *= correction;
        }
    }
}

pub fn eig_hermitian(m: &CMatrix) -> Result<HermitianEigensystem> {
    eig_hermitian_with(m, &Tolerances::default())
}

pub fn eig_hermitian_with(m: &CMatrix, tol: &Tolerances) -> Result<HermitianEigensystem> {
    let n = require_square(m)?;
    require_hermitian(m, tol.herm)?;
    let se = m.clone().symmetric_eigen();

    let mut cols: Vec<(f64, CVector)> = (0..n)
        .map(|i| {
            let mut v = se.eigenvectors.column(i).clone_owned();
            phase_fix(&mut v);
            (se.eigenvalues[i], v)
        })
        .collect();
    cols.sort_by(|(la, va), (lb, vb)| {
        la.partial_cmp(lb).unwrap().then_with(|| {
            for (za, zb) in va.iter().zip(vb.iter()) {
                let key_a = (round10(za.re), round10(za.im));
                let key_b = (round10(zb.re), round10(zb.im));
                match key_a.partial_cmp(&key_b).unwrap() {
                    std::cmp::Ordering::Equal => continue,
                    other => return other,
                }
            }
            std::cmp::Ordering::Equal
        })
    });

    let eigenvalues: Vec<f64> = cols.iter().map(|(l, _)| *l).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (i, (_, v)) in cols.iter().enumerate() {
        eigenvectors.set_column(i, v);
    }

    // residual check: ‖Mv - λv‖ ≤ τ_eig·‖M‖ for every pair
    let scale = max_abs_entry(m).max(1.0) * n as f64;
    for (i, &lam) in eigenvalues.iter().enumerate() {
        let v = eigenvectors.column(i);
        let residual = (m * v - v * c(lam)).norm();
        if residual > tol.eig * scale {
            return Err(Error::InvalidState(format!(
                "eigensolver residual {residual:.3e} exceeds tolerance"
            )));
        }
    }
    Ok(HermitianEigensystem { eigenvalues, eigenvectors })
}

/// Eigenvalues only (ascending); cheaper than [`eig_hermitian`].
pub fn eigvals_hermitian(m: &CMatrix, tol: &Tolerances) -> Result<Vec<f64>> {
    require_square(m)?;
    require_hermitian(m, tol.herm)?;
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().cloned().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(ev)
}

/// Trace norm ‖M‖₁ = Σ |λᵢ| of a Hermitian matrix.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    let ev = eigvals_hermitian(m, &Tolerances::default())?;
    Ok(ev.iter().map(|l| l.abs()).sum())
}

/// Trace distance ½‖ρ - σ‖₁ between two density operators.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension(format!(
            "trace_distance: dims {} vs {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(0.5 * trace_norm(&(rho.matrix() - sigma.matrix()))?)
}

/// Von Neumann entropy in bits, −Σ λ log₂ λ with 0·log 0 := 0.
///
/// Eigenvalues in `[-τ_eig, 0)` are clamped to zero; anything below that is an
/// invalid state and rejected.
pub fn vn_entropy(rho: &DensityOperator) -> Result<f64> {
    vn_entropy_with(rho, &Tolerances::default())
}

pub fn vn_entropy_with(rho: &DensityOperator, tol: &Tolerances) -> Result<f64> {
    let ev = eigvals_hermitian(rho.matrix(), tol)?;
    let mut s = 0.0;
    for lam in ev {
        if lam < -tol.eig {
            return Err(Error::InvalidState(format!("negative eigenvalue {lam:.3e}")));
        }
        if lam > 0.0 {
            s -= lam * lam.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Binary entropy h(p) in bits; h(0) = h(1) = 0.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("binary_entropy: p = {p} outside [0,1]")));
    }
    Ok(binary_entropy_unchecked(p))
}

pub(crate) fn binary_entropy_unchecked(p: f64) -> f64 {
    let mut s = 0.0;
    if p > 0.0 {
        s -= p * p.log2();
    }
    let q = 1.0 - p;
    if q > 0.0 {
        s -= q * q.log2();
    }
    s
}
