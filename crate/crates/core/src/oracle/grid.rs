//! Exhaustive maximization of the leakage objectives over the feasibility
//! polygon, with local refinement and a dense-matrix cross-check at the
//! optimum.

use crate::attack::{eve_state_closed, feasible_region, FeasibleRegion, SpectralParams};
use crate::bounds::{i_ae_at, trace_distance_at, trace_t_at};
use crate::error::{Error, Result};
use crate::numerics::{c, eigvals_hermitian, trace_norm, vn_entropy, DensityOperator, Tolerances};

/// Objective to maximize over (λ₊, λ₋).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// T = tr √((σ₀² + σ₁²)/2)
    TraceT,
    /// von Neumann leakage S((σ₀+σ₁)/2) − ½[S(σ₀)+S(σ₁)]
    VonNeumann,
    /// trace distance ½‖σ₀ − σ₁‖₁
    TraceDistance,
}

impl Objective {
    pub fn evaluate(&self, d: usize, beta: f64, lp: f64, lm: f64) -> f64 {
        match self {
            Objective::TraceT => trace_t_at(d, beta, lp, lm),
            Objective::VonNeumann => i_ae_at(d, beta, lp, lm),
            Objective::TraceDistance => trace_distance_at(d, beta, lp, lm),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GridSearchResult {
    pub objective: Objective,
    pub d: usize,
    pub beta: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub value: f64,
    /// same objective recomputed from dense ancilla states at the argmax
    pub numeric_value: f64,
    pub evaluations: usize,
}

pub const MAX_GRID_DIM: usize = 12;

/// λ₊ ceiling at fixed λ₋ (both active linear constraints).
fn lp_max_at(region: &FeasibleRegion, lm: f64) -> f64 {
    let d = region.d as f64;
    let from_l1 = 4.0 * region.beta / (d * (d - 2.0)) - d / (d - 2.0) * lm;
    let from_l0 = 1.0 / (d - 1.0) - 2.0 * region.beta / d;
    from_l1.min(from_l0).max(0.0)
}

fn lm_max_at(region: &FeasibleRegion, lp: f64) -> f64 {
    let d = region.d as f64;
    (4.0 * region.beta / (d * d) - (d - 2.0) / d * lp).max(0.0)
}

/// Recompute the objective from the dense conditional ancilla states.
fn numeric_objective(
    objective: Objective,
    d: usize,
    beta: f64,
    lp: f64,
    lm: f64,
) -> Result<f64> {
    let sp = SpectralParams::from_lambda_pm(d, beta, lp.max(0.0), lm.max(0.0))?;
    let (_, s0) = eve_state_closed(&sp, 1, 0, 0)?;
    let (_, s1) = eve_state_closed(&sp, 1, 0, 1)?;
    match objective {
        Objective::TraceT => {
            let m = (s0.matrix() * s0.matrix() + s1.matrix() * s1.matrix()) / c(2.0);
            let ev = eigvals_hermitian(&m, &Tolerances::default())?;
            Ok(ev.iter().map(|l| l.max(0.0).sqrt()).sum())
        }
        Objective::VonNeumann => {
            let avg = DensityOperator::new((s0.matrix() + s1.matrix()) / c(2.0))?;
            Ok(vn_entropy(&avg)? - 0.5 * (vn_entropy(&s0)? + vn_entropy(&s1)?))
        }
        Objective::TraceDistance => Ok(0.5 * trace_norm(&(s0.matrix() - s1.matrix()))?),
    }
}

/// Maximize `objective` over the feasibility polygon by a coarse scan at the
/// given absolute step, followed by three local refinement passes. Polygon
/// vertices and constraint-boundary projections are always evaluated exactly.
pub fn grid_lambda_search(
    d: usize,
    beta: f64,
    objective: Objective,
    step: f64,
) -> Result<GridSearchResult> {
    if d > MAX_GRID_DIM {
        return Err(Error::Size(format!("grid search capped at d ≤ {MAX_GRID_DIM}")));
    }
    if !(step > 0.0) {
        return Err(Error::Domain(format!("step = {step} must be positive")));
    }
    let region = feasible_region(d, beta)?;
    let mut best = (0.0_f64, 0.0_f64, f64::NEG_INFINITY);
    let mut evaluations = 0usize;
    let consider = |lp: f64, lm: f64, best: &mut (f64, f64, f64), evals: &mut usize| {
        if lp < -1e-15 || lm < -1e-15 || !region.contains(lp.max(0.0), lm.max(0.0)) {
            return;
        }
        let (lp, lm) = (lp.max(0.0), lm.max(0.0));
        let value = objective.evaluate(d, beta, lp, lm);
        *evals += 1;
        if value > best.2 {
            *best = (lp, lm, value);
        }
    };

    for &(lp, lm) in &region.vertices {
        consider(lp, lm, &mut best, &mut evaluations);
    }
    let lp_hi = region.lambda_plus_max();
    let lm_hi = region.lambda_minus_max();
    let n_lp = (lp_hi / step).ceil() as usize;
    let n_lm = (lm_hi / step).ceil() as usize;
    for i in 0..=n_lp {
        let lp = (i as f64 * step).min(lp_hi);
        // boundary projection at this λ₊
        consider(lp, lm_max_at(&region, lp), &mut best, &mut evaluations);
        for j in 0..=n_lm {
            let lm = (j as f64 * step).min(lm_hi);
            consider(lp, lm, &mut best, &mut evaluations);
        }
    }
    for j in 0..=n_lm {
        let lm = (j as f64 * step).min(lm_hi);
        consider(lp_max_at(&region, lm), lm, &mut best, &mut evaluations);
    }

    // local refinement around the incumbent; windows overlap generously so a
    // boundary-projection incumbent a few cells off the optimum still covers it
    let mut sub = step / 10.0;
    for _ in 0..3 {
        let (lp0, lm0, _) = best;
        for i in -32i32..=32 {
            let lp = lp0 + i as f64 * sub;
            consider(lp, lm_max_at(&region, lp.max(0.0)), &mut best, &mut evaluations);
            for j in -32i32..=32 {
                consider(lp, lm0 + j as f64 * sub, &mut best, &mut evaluations);
            }
        }
        sub /= 20.0;
    }

    let (lambda_plus, lambda_minus, value) = best;
    let numeric_value = numeric_objective(objective, d, beta, lambda_plus, lambda_minus)?;
    if (numeric_value - value).abs() > 1e-7 {
        return Err(Error::InvalidState(format!(
            "closed-form objective {value:.12e} disagrees with dense evaluation {numeric_value:.12e}"
        )));
    }
    Ok(GridSearchResult {
        objective,
        d,
        beta,
        lambda_plus,
        lambda_minus,
        value,
        numeric_value,
        evaluations,
    })
}
