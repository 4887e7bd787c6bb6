//! Closed-form leakage bounds, saturation points, asymptotics and key-rate
//! arithmetic.
//!
//! Four leakage measures are computed per round, all in bits:
//!
//! - `statdist_leak = 2·log₂ T`: governs the non-asymptotic distance of the
//!   extracted key from uniform,
//! - `i_ae`: von Neumann leakage, the asymptotic privacy-amplification rate,
//! - `minentropy_leak`: min-entropy loss of the secret bit under the optimal
//!   guessing measurement,
//! - `accessible_info`: Shannon information extractable by measuring each
//!   ancilla separately.
//!
//! Each measure grows concavely with the bit error rate β and freezes at its
//! own saturation point (β*, β₀ and β_sat respectively). The `*_at` functions
//! evaluate the measures at arbitrary admissible (λ₊, λ₋); the plain
//! functions return the eavesdropper's optimum.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::binary_entropy_unchecked;
use crate::protocol::MIN_DIM;

fn check_domain(d: usize, beta: f64) -> Result<()> {
    if d < MIN_DIM {
        return Err(Error::Domain(format!("dimension {d} < {MIN_DIM}")));
    }
    if !(0.0..=0.5).contains(&beta) {
        return Err(Error::Domain(format!("beta = {beta} outside [0, 1/2]")));
    }
    Ok(())
}

fn sqrt0(x: f64) -> f64 {
    x.max(0.0).sqrt()
}

/// ξ₀, ξ₁, ξ₂ as functions of (λ₊, λ₋) at fixed (d, β).
fn xi(d: usize, beta: f64, lp: f64, lm: f64) -> (f64, f64, f64) {
    let df = d as f64;
    let q = df / 2.0 * (df / 2.0 - 1.0) * (lp + lm);
    (df / 4.0 * (lp + lm), beta - q, 1.0 - beta - q)
}

/// The trace quantity T = tr √((σ₀² + σ₁²)/2) at arbitrary (λ₊, λ₋).
pub fn trace_t_at(d: usize, beta: f64, lp: f64, lm: f64) -> f64 {
    let df = d as f64;
    let (xi0, xi1, xi2) = xi(d, beta, lp, lm);
    let hp = df / 2.0 * lp;
    let hm = df / 2.0 * lm;
    2.0 * (df - 2.0) * xi0
        + sqrt0(xi2 * (xi2 - hp))
        + sqrt0(xi2 * hp)
        + sqrt0(xi1 * (xi1 - hm))
        + sqrt0(xi1 * hm)
}

/// Von Neumann leakage at arbitrary (λ₊, λ₋).
pub fn i_ae_at(d: usize, beta: f64, lp: f64, lm: f64) -> f64 {
    let df = d as f64;
    let (_, xi1, xi2) = xi(d, beta, lp, lm);
    let mut leak = 0.0;
    if xi1 > 0.0 {
        leak += xi1 * binary_entropy_unchecked((df / 2.0 * lm / xi1).clamp(0.0, 1.0));
    }
    if xi2 > 0.0 {
        leak += xi2 * binary_entropy_unchecked((df / 2.0 * lp / xi2).clamp(0.0, 1.0));
    }
    leak
}

/// Trace distance ½‖σ₀ − σ₁‖₁ at arbitrary (λ₊, λ₋).
pub fn trace_distance_at(d: usize, beta: f64, lp: f64, lm: f64) -> f64 {
    let df = d as f64;
    let (_, xi1, xi2) = xi(d, beta, lp, lm);
    let hp = df / 2.0 * lp;
    let hm = df / 2.0 * lm;
    2.0 * (sqrt0(hp * (xi2 - hp)) + sqrt0(hm * (xi1 - hm)))
}

/// Saturation point of the min-entropy and accessible-information measures:
/// β_sat = (1/4)(d−2)/(d−1).
pub fn beta_sat(d: usize) -> f64 {
    0.25 * (d as f64 - 2.0) / (d as f64 - 1.0)
}

/// Saturation point of the statistical-distance measure.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BetaStar {
    pub beta_star: f64,
    /// root of the stationarity equation; β* = (x/2)/(1+x)
    pub x: f64,
}

/// Stationarity condition for T in the substitution x = 2β/(1−2β).
fn beta_star_equation(d: usize, x: f64) -> f64 {
    let dm2 = d as f64 - 2.0;
    let coeff = (d as f64 - 1.0) / dm2;
    // algebraically identical second form of the coefficient
    debug_assert!((coeff - (1.0 + 1.0 / dm2)).abs() < 1e-12);
    let base = 1.0 - x / dm2;
    base.sqrt() + coeff / base.sqrt() + (x.sqrt() - 1.0 / x.sqrt()) / dm2.sqrt() - 2.0
}

fn bisect(mut lo: f64, mut hi: f64, mut f_lo: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-12 {
            return mid;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solve the saturation point β* of the statistical-distance bound.
///
/// The defining equation is scanned on a 10³-point grid of (0,1); exactly one
/// sign change is expected (uniqueness is observed numerically, not proven).
pub fn beta_star(d: usize) -> Result<BetaStar> {
    check_domain(d, 0.0)?;
    let f = |x: f64| beta_star_equation(d, x);
    let n = 1000;
    let mut brackets = Vec::new();
    let mut prev_x = 1e-9;
    let mut prev_f = f(prev_x);
    for i in 1..=n {
        let x = i as f64 / (n as f64 + 1.0);
        let fx = f(x);
        if prev_f.signum() != fx.signum() {
            brackets.push((prev_x, x, prev_f));
        }
        prev_x = x;
        prev_f = fx;
    }
    match brackets.as_slice() {
        [] => Err(Error::RootFind(format!("no sign change of the saturation equation for d = {d}"))),
        [(lo, hi, f_lo)] => {
            let x = bisect(*lo, *hi, *f_lo, f);
            Ok(BetaStar { beta_star: (x / 2.0) / (1.0 + x), x })
        }
        many => Err(Error::RootFind(format!(
            "saturation equation for d = {d} changed sign {} times; expected once",
            many.len()
        ))),
    }
}

/// Statistical-distance trace quantity T(β, d), saturated above β*.
pub fn trace_t(beta: f64, d: usize) -> Result<f64> {
    check_domain(d, beta)?;
    let bs = beta_star(d)?.beta_star;
    let b = beta.min(bs);
    let dm2 = d as f64 - 2.0;
    let rad = 1.0 - 2.0 * b * (d as f64 - 1.0) / dm2;
    debug_assert!(rad > -1e-12, "negative radicand below saturation");
    Ok(2.0 * b + (1.0 - 2.0 * b).sqrt() * (sqrt0(rad) + (2.0 * b).sqrt() / dm2.sqrt()))
}

/// Per-round statistical-distance leakage 2·log₂ T.
pub fn statdist_leak(beta: f64, d: usize) -> Result<f64> {
    Ok(2.0 * trace_t(beta, d)?.log2())
}

/// Optimal (λ₊, λ₋) below/above a saturation point; shared by all three
/// optimizations, which differ only in the saturation value.
fn optimal_lambdas(d: usize, beta: f64, sat: f64) -> (f64, f64) {
    let df = d as f64;
    if beta <= sat {
        (4.0 * beta / (df * (df - 2.0)), 0.0)
    } else {
        let denom = df * (df - 2.0) * (1.0 - 2.0 * sat);
        (4.0 * sat * (1.0 - beta - sat) / denom, 4.0 * sat * (beta - sat) / denom)
    }
}

pub fn optimal_lambdas_statdist(beta: f64, d: usize) -> Result<(f64, f64)> {
    check_domain(d, beta)?;
    Ok(optimal_lambdas(d, beta, beta_star(d)?.beta_star))
}

pub fn optimal_lambdas_vn(beta: f64, d: usize) -> Result<(f64, f64)> {
    check_domain(d, beta)?;
    Ok(optimal_lambdas(d, beta, beta_zero(d)?.beta_zero))
}

pub fn optimal_lambdas_min(beta: f64, d: usize) -> Result<(f64, f64)> {
    check_domain(d, beta)?;
    Ok(optimal_lambdas(d, beta, beta_sat(d)))
}

/// Saturation point of the von Neumann leakage.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BetaZero {
    pub beta_zero: f64,
    /// unique positive root of y^{d−1} + y − 1
    pub y: f64,
}

pub fn beta_zero(d: usize) -> Result<BetaZero> {
    check_domain(d, 0.0)?;
    let f = |y: f64| y.powi(d as i32 - 1) + y - 1.0;
    // f(0) = −1, f(1) = 1, strictly increasing
    let y = bisect(0.0, 1.0, -1.0, f);
    let dm2 = d as f64 - 2.0;
    Ok(BetaZero { beta_zero: 0.5 / (1.0 + 1.0 / (dm2 * (1.0 - y))), y })
}

/// Von Neumann leakage I_AE(β, d), saturated above β₀.
pub fn i_ae(beta: f64, d: usize) -> Result<f64> {
    check_domain(d, beta)?;
    let b0 = beta_zero(d)?.beta_zero;
    let b = beta.min(b0);
    if b == 0.0 {
        return Ok(0.0);
    }
    let dm2 = d as f64 - 2.0;
    Ok((1.0 - 2.0 * b) * binary_entropy_unchecked(2.0 * b / (dm2 * (1.0 - 2.0 * b))))
}

/// Optimized trace distance ½‖σ₀ − σ₁‖₁, saturated above β_sat.
pub fn optimal_trace_distance(beta: f64, d: usize) -> Result<f64> {
    check_domain(d, beta)?;
    let bsat = beta_sat(d);
    let root = 1.0 / (d as f64 - 1.0).sqrt();
    if beta >= bsat {
        Ok(root)
    } else {
        Ok(root * beta.sqrt() / bsat * (2.0 * bsat - beta).sqrt())
    }
}

/// Min-entropy loss of the secret bit given the announced values and the
/// ancilla: 1 + log₂(½ + D/2) with D the optimized trace distance.
pub fn min_entropy_leak(beta: f64, d: usize) -> Result<f64> {
    let dist = optimal_trace_distance(beta, d)?;
    Ok(1.0 + (0.5 + dist / 2.0).log2())
}

/// Accessible (Shannon) information about the secret bit: 1 − h(½ + D/2).
pub fn accessible_info(beta: f64, d: usize) -> Result<f64> {
    let dist = optimal_trace_distance(beta, d)?;
    Ok(1.0 - binary_entropy_unchecked(0.5 + dist / 2.0))
}

/// Large-d approximations of the saturation behaviour.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Asymptotics {
    pub d: usize,
    /// β* ≈ 1/4 − 1/(8√(d−2))
    pub beta_star: f64,
    /// T ≈ 1 + 1/(2√(d−2))
    pub trace_t: f64,
    /// saturated I_AE ≈ (log₂ d)/d
    pub i_ae_saturated: f64,
}

pub fn asymptotics(d: usize) -> Result<Asymptotics> {
    check_domain(d, 0.0)?;
    let dm2 = d as f64 - 2.0;
    Ok(Asymptotics {
        d,
        beta_star: 0.25 - 1.0 / (8.0 * dm2.sqrt()),
        trace_t: 1.0 + 1.0 / (2.0 * dm2.sqrt()),
        i_ae_saturated: (d as f64).log2() / d as f64,
    })
}

/// Small-β expansion of the von Neumann leakage,
/// (2β/(d−2))·log₂((d−2)(1−2β)e/(2β)).
pub fn i_ae_small_beta_asymptotic(beta: f64, d: usize) -> Result<f64> {
    check_domain(d, beta)?;
    if beta == 0.0 {
        return Ok(0.0);
    }
    let dm2 = d as f64 - 2.0;
    Ok(2.0 * beta / dm2 * (dm2 * (1.0 - 2.0 * beta) * std::f64::consts::E / (2.0 * beta)).log2())
}

/// Finite-key query: n rounds hashed down to ℓ bits.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KeyRateQuery {
    pub n: u64,
    pub ell: u64,
    pub epsilon: f64,
    pub d: usize,
    pub beta: f64,
}

impl KeyRateQuery {
    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Domain(format!("epsilon = {} outside (0,1)", self.epsilon)));
        }
        check_domain(self.d, self.beta)
    }
}

/// Bound ½·√(2^{ℓ − n(1 − 2log₂T)}) on the distance of the hashed key from
/// uniform, given everything the eavesdropper holds.
pub fn statdist_bound(q: &KeyRateQuery) -> Result<f64> {
    q.validate()?;
    let leak = statdist_leak(q.beta, q.d)?;
    let exponent = q.ell as f64 - q.n as f64 * (1.0 - leak);
    Ok(0.5 * (0.5 * exponent).exp2())
}

/// Key length achieving a target distance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KeyLength {
    pub ell: u64,
    /// real-valued rate ℓ/n before flooring
    pub rate: f64,
    /// distance bound achieved with the floored ℓ
    pub bound: f64,
    pub extractable: bool,
}

/// Largest integer ℓ with ℓ/n ≤ 1 − 2log₂T − (2/n)log₂(1/ε).
pub fn key_length_for_epsilon(n: u64, beta: f64, d: usize, epsilon: f64) -> Result<KeyLength> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon = {epsilon} outside (0,1)")));
    }
    let leak = statdist_leak(beta, d)?;
    let rate = 1.0 - leak - 2.0 / n as f64 * (1.0 / epsilon).log2();
    let raw = rate * n as f64;
    if raw <= 0.0 {
        return Ok(KeyLength { ell: 0, rate, bound: 0.0, extractable: false });
    }
    let ell = raw.floor() as u64;
    let bound = statdist_bound(&KeyRateQuery { n, ell, epsilon, d, beta })?;
    Ok(KeyLength { ell, rate, bound, extractable: true })
}

/// Asymptotic key rate 1 − h(β) − I_AE, clamped at zero.
pub fn qkd_rate(beta: f64, d: usize) -> Result<f64> {
    check_domain(d, beta)?;
    Ok((1.0 - binary_entropy_unchecked(beta) - i_ae(beta, d)?).max(0.0))
}

/// Leakage bounds from earlier analyses, for comparison curves.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PriorBounds {
    /// dimension-only bound h(1/(d−1))
    pub syk: f64,
    /// β-dependent bound h(2β/(d−2)), saturating at h(1/(d−1))
    pub sk2017: f64,
    /// intercept-resend attacks: lower bound 1 − h(½ + 1/d)
    pub intercept_resend_lower: f64,
}

pub fn prior_bounds(beta: f64, d: usize) -> Result<PriorBounds> {
    check_domain(d, beta)?;
    let df = d as f64;
    let syk = binary_entropy_unchecked(1.0 / (df - 1.0));
    let sk_sat = 0.5 * (df - 2.0) / (df - 1.0);
    let sk2017 = if beta <= sk_sat {
        binary_entropy_unchecked(2.0 * beta / (df - 2.0))
    } else {
        syk
    };
    Ok(PriorBounds {
        syk,
        sk2017,
        intercept_resend_lower: 1.0 - binary_entropy_unchecked(0.5 + 1.0 / df),
    })
}

/// Everything about one (d, β) point: the four leakage measures, saturation
/// points, saturation flags and the optimizing (λ₊, λ₋) per measure.
#[derive(Debug, Clone, Serialize)]
pub struct LeakageReport {
    pub d: usize,
    pub beta: f64,
    pub statdist_leak: f64,
    pub i_ae: f64,
    pub minentropy_leak: f64,
    pub accessible_info: f64,
    pub qkd_rate: f64,
    pub beta_star: f64,
    pub beta_zero: f64,
    pub beta_sat: f64,
    pub statdist_saturated: bool,
    pub vn_saturated: bool,
    pub minentropy_saturated: bool,
    pub lambdas_statdist: (f64, f64),
    pub lambdas_vn: (f64, f64),
    pub lambdas_min: (f64, f64),
}

pub fn leakage_report(d: usize, beta: f64) -> Result<LeakageReport> {
    check_domain(d, beta)?;
    let bstar = beta_star(d)?.beta_star;
    let bzero = beta_zero(d)?.beta_zero;
    let bsat = beta_sat(d);
    Ok(LeakageReport {
        d,
        beta,
        statdist_leak: statdist_leak(beta, d)?,
        i_ae: i_ae(beta, d)?,
        minentropy_leak: min_entropy_leak(beta, d)?,
        accessible_info: accessible_info(beta, d)?,
        qkd_rate: qkd_rate(beta, d)?,
        beta_star: bstar,
        beta_zero: bzero,
        beta_sat: bsat,
        statdist_saturated: beta >= bstar,
        vn_saturated: beta >= bzero,
        minentropy_saturated: beta >= bsat,
        lambdas_statdist: optimal_lambdas(d, beta, bstar),
        lambdas_vn: optimal_lambdas(d, beta, bzero),
        lambdas_min: optimal_lambdas(d, beta, bsat),
    })
}
