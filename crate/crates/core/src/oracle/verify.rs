//! Named verification suites aggregating every cross-check in the crate.
//!
//! Each suite reports the worst deviation it observed together with its
//! tolerance; `verify_all` runs the full registry. Per-suite randomness is
//! split from the master seed as `seed + index·0x9E3779B97F4A7C15` so suites
//! stay reproducible when run individually.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::attack::{
    attack_isometry_check, eve_state_bruteforce, eve_state_closed, eve_vector_a, feasible_region,
    bob_reduced, purification, rho_ab, SpectralParams,
};
use crate::bounds;
use crate::error::Result;
use crate::numerics::{
    c, eigvals_hermitian, max_abs_entry, outer, partial_trace, trace_distance, vn_entropy,
    CMatrix, DensityOperator, Keep, Tolerances,
};
use crate::oracle::grid::{grid_lambda_search, Objective};
use crate::oracle::holevo::holevo_check;
use crate::oracle::sim::simulate;
use crate::oracle::uhf::uhf_identity_check;
use crate::protocol::{alice_povm, bob_povm, joint_probability, mu_state, PhaseString};

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub cases: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub worst_case: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    pub pass: bool,
}

struct Worst {
    cases: usize,
    dev: f64,
    label: String,
}

impl Worst {
    fn new() -> Self {
        Worst { cases: 0, dev: 0.0, label: String::from("-") }
    }

    fn record(&mut self, dev: f64, label: impl Fn() -> String) {
        self.cases += 1;
        if dev > self.dev {
            self.dev = dev;
            self.label = label();
        }
    }
}

fn random_feasible(d: usize, rng: &mut ChaCha12Rng) -> SpectralParams {
    loop {
        let beta = rng.gen_range(0.005..0.5);
        let region = feasible_region(d, beta).unwrap();
        let lp = rng.gen_range(0.0..=region.lambda_plus_max().max(1e-12));
        let lm = rng.gen_range(0.0..=region.lambda_minus_max().max(1e-12));
        if region.contains(lp, lm) {
            if let Ok(sp) = SpectralParams::from_lambda_pm(d, beta, lp, lm) {
                return sp;
            }
        }
    }
}

fn suite_povm_completeness(d_list: &[usize], _draws: usize, _rng: &mut ChaCha12Rng) -> Result<Worst> {
    let mut w = Worst::new();
    for &d in d_list {
        for r in 1..d {
            let povm = bob_povm(d, r)?;
            let sum = povm
                .elements()
                .iter()
                .fold(CMatrix::zeros(d, d), |acc, (_, m)| acc + m);
            let dev = max_abs_entry(&(&sum - CMatrix::identity(d, d)));
            w.record(dev, || format!("receiver POVM d={d} r={r}"));
        }
        if d <= 8 {
            let povm = alice_povm(d)?;
            let sum = povm
                .elements()
                .iter()
                .fold(CMatrix::zeros(d, d), |acc, (_, m)| acc + m);
            let dev = max_abs_entry(&(&sum - CMatrix::identity(d, d)));
            w.record(dev, || format!("sender POVM d={d}"));
        }
    }
    Ok(w)
}

fn suite_spectral(d_list: &[usize], draws: usize, rng: &mut ChaCha12Rng) -> Result<Worst> {
    let mut w = Worst::new();
    for &d in d_list {
        for _ in 0..draws {
            let sp = random_feasible(d, rng);
            let rho = rho_ab(&sp)?;
            let numeric = eigvals_hermitian(rho.matrix(), &Tolerances::default())?;
            let mut closed = vec![sp.lambda0()];
            closed.extend(std::iter::repeat(sp.lambda1()).take(d - 1));
            closed.extend(std::iter::repeat(sp.lambda_plus()).take(d * (d - 1) / 2));
            closed.extend(std::iter::repeat(sp.lambda_minus()).take(d * (d - 1) / 2));
            closed.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (n, cl) in numeric.iter().zip(&closed) {
                w.record((n - cl).abs(), || format!("d={d} beta={:.4}", sp.beta()));
            }
        }
    }
    Ok(w)
}

fn suite_sigma_equivalence(d_list: &[usize], draws: usize, rng: &mut ChaCha12Rng) -> Result<Worst> {
    let mut w = Worst::new();
    for &d in d_list {
        for _ in 0..draws {
            let sp = random_feasible(d, rng);
            for r in 1..d {
                for k in 0..d {
                    for s_prime in 0..2u8 {
                        let (_, closed) = eve_state_closed(&sp, r, k, s_prime)?;
                        let brute = eve_state_bruteforce(&sp, r, k, s_prime)?;
                        let dist = trace_distance(&closed, &brute)?;
                        w.record(dist, || {
                            format!("d={d} r={r} k={k} s'={s_prime} beta={:.4}", sp.beta())
                        });
                    }
                }
            }
        }
    }
    Ok(w)
}

fn suite_noise_constraint(d_list: &[usize], _draws: usize, rng: &mut ChaCha12Rng) -> Result<Worst> {
    let mut w = Worst::new();
    for &d in d_list.iter().filter(|&&d| d <= 5) {
        for _ in 0..3 {
            let sp = random_feasible(d, rng);
            let beta = sp.beta();
            let rho = rho_ab(&sp)?;
            let norm = 1.0 / ((1u64 << d) as f64 * d as f64);
            for a in PhaseString::all(d)? {
                for r in 1..d {
                    for k in 0..d {
                        for s in 0..2u8 {
                            let p = joint_probability(&rho, &a, k, s, r)?;
                            let expect = if s == a.secret_bit(k, r) {
                                norm * (1.0 - beta)
                            } else {
                                norm * beta
                            };
                            w.record((p - expect).abs(), || {
                                format!("d={d} a={:#06b} k={k} s={s} r={r}", a.mask())
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(w)
}

fn suite_purification(d_list: &[usize], draws: usize, rng: &mut ChaCha12Rng) -> Result<Worst> {
    let mut w = Worst::new();
    for &d in d_list {
        for _ in 0..draws.min(20) {
            let sp = random_feasible(d, rng);
            let psi = purification(&sp)?;
            let full = outer(&psi, &psi);
            let reduced = partial_trace(&full, (d * d, d * d), Keep::Left)?;
            let rho = rho_ab(&sp)?;
            let dev = max_abs_entry(&(&reduced - rho.matrix()))
                .max((psi.norm() - 1.0).abs());
            w.record(dev, || format!("d={d} beta={:.4}", sp.beta()));
        }
    }
    Ok(w)
}

fn suite_isometry(d_list: &[usize], draws: usize, rng: &mut ChaCha12Rng) -> Result<Worst> {
    let mut w = Worst::new();
    for &d in d_list {
        for _ in 0..draws.min(20) {
            let sp = random_feasible(d, rng);
            let report = attack_isometry_check(&sp)?;
            w.record(report.max_gram_deviation, || format!("d={d} beta={:.4}", sp.beta()));
        }
    }
    Ok(w)
}

fn suite_ancilla_overlaps(d_list: &[usize], draws: usize, rng: &mut ChaCha12Rng) -> Result<Worst> {
    let mut w = Worst::new();
    for &d in d_list {
        for _ in 0..draws.min(10) {
            let sp = random_feasible(d, rng);
            let beta = sp.beta();
            let mask = rng.gen_range(0..1u32 << d);
            let a = PhaseString::new(d, mask)?;
            let vecs: Vec<_> =
                (0..d).map(|t| eve_vector_a(&sp, &a, t)).collect::<Result<_>>()?;
            for (i, u) in vecs.iter().enumerate() {
                w.record((u.norm() - 1.0).abs(), || format!("norm d={d} t={i}"));
                for v in vecs.iter().skip(i + 1) {
                    let ip = (u.adjoint() * v)[(0, 0)];
                    w.record((ip - c(1.0 - 2.0 * beta)).norm(), || {
                        format!("overlap d={d} beta={beta:.4}")
                    });
                }
            }
            let marginal = bob_reduced(&sp, &a)?;
            let mu = mu_state(&a);
            let expect = outer(&mu, &mu) * c(1.0 - 2.0 * beta)
                + CMatrix::identity(d, d) * c(2.0 * beta / d as f64);
            w.record(max_abs_entry(&(marginal.matrix() - &expect)), || {
                format!("receiver marginal d={d} beta={beta:.4}")
            });
        }
    }
    Ok(w)
}

const GRID_BETAS: [f64; 4] = [0.05, 0.2, 0.35, 0.5];

fn suite_grid_vs_analytic(d_list: &[usize], _draws: usize, _rng: &mut ChaCha12Rng) -> Result<Worst> {
    let mut w = Worst::new();
    for &d in d_list {
        for beta in GRID_BETAS {
            for (obj, analytic) in [
                (Objective::TraceT, bounds::trace_t(beta, d)?),
                (Objective::VonNeumann, bounds::i_ae(beta, d)?),
                (Objective::TraceDistance, bounds::optimal_trace_distance(beta, d)?),
            ] {
                let res = grid_lambda_search(d, beta, obj, 1e-3)?;
                w.record((res.value - analytic).abs(), || {
                    format!("{obj:?} d={d} beta={beta}")
                });
            }
        }
    }
    Ok(w)
}

fn suite_holevo(d_list: &[usize], _draws: usize, _rng: &mut ChaCha12Rng) -> Result<Worst> {
    let mut w = Worst::new();
    for &d in d_list {
        for beta in [0.1, 0.4] {
            let (lp, lm) = bounds::optimal_lambdas_min(beta, d)?;
            let sp = SpectralParams::from_lambda_pm(d, beta, lp, lm)?;
            let report = holevo_check(&sp, 1, 0)?;
            let dev = (-report.min_holevo_eigenvalue)
                .max(0.0)
                .max((report.guess_success - report.guess_success_closed).abs())
                .max((-report.povm_min_eigenvalue).max(0.0));
            w.record(dev, || format!("d={d} beta={beta}"));
        }
    }
    Ok(w)
}

fn suite_uhf(_d_list: &[usize], _draws: usize, _rng: &mut ChaCha12Rng) -> Result<Worst> {
    let mut w = Worst::new();
    for (n, ell, d) in [(1u32, 1u32, 3usize), (2, 1, 3), (2, 2, 4)] {
        let (lp, lm) = bounds::optimal_lambdas_vn(0.1, d)?;
        let sp = SpectralParams::from_lambda_pm(d, 0.1, lp, lm)?;
        let report = uhf_identity_check(n, ell, d, &sp)?;
        let mut dev = report.max_identity_deviation;
        dev = dev.max((report.jensen_lhs - report.jensen_rhs).max(0.0));
        if let Some(block) = report.block_structure_deviation {
            dev = dev.max(block);
        }
        w.record(dev, || format!("(n,ℓ,d)=({n},{ell},{d})"));
    }
    Ok(w)
}

fn suite_vn_route(d_list: &[usize], draws: usize, rng: &mut ChaCha12Rng) -> Result<Worst> {
    let mut w = Worst::new();
    for &d in d_list.iter().filter(|&&d| d <= 5) {
        for _ in 0..draws.min(10) {
            let sp = random_feasible(d, rng);
            let (_, s0) = eve_state_closed(&sp, 1, 0, 0)?;
            let (_, s1) = eve_state_closed(&sp, 1, 0, 1)?;
            let avg = DensityOperator::new((s0.matrix() + s1.matrix()) / c(2.0))?;
            let numeric = vn_entropy(&avg)? - 0.5 * (vn_entropy(&s0)? + vn_entropy(&s1)?);
            let closed =
                bounds::i_ae_at(d, sp.beta(), sp.lambda_plus(), sp.lambda_minus());
            w.record((numeric - closed).abs(), || format!("d={d} beta={:.4}", sp.beta()));
        }
    }
    Ok(w)
}

fn suite_concavity(_d_list: &[usize], _draws: usize, _rng: &mut ChaCha12Rng) -> Result<Worst> {
    let mut w = Worst::new();
    let step = 1e-3;
    type Curve = fn(f64, usize) -> Result<f64>;
    for d in 3..=16 {
        for (name, f) in [
            ("statdist", bounds::statdist_leak as Curve),
            ("vn", bounds::i_ae as Curve),
            ("minentropy", bounds::min_entropy_leak as Curve),
        ] {
            let mut prev = f(0.0, d)?;
            let mut cur = f(step, d)?;
            for i in 2..=500 {
                let next = f(i as f64 * step, d)?;
                let second = next - 2.0 * cur + prev;
                w.record(second.max(0.0), || format!("{name} d={d} beta={}", i as f64 * step));
                prev = cur;
                cur = next;
            }
        }
    }
    Ok(w)
}

fn suite_monte_carlo(d_list: &[usize], _draws: usize, rng: &mut ChaCha12Rng) -> Result<Worst> {
    let mut w = Worst::new();
    let d = d_list.iter().copied().find(|&d| d <= 6).unwrap_or(4);
    let beta = 0.1;
    let (lp, lm) = bounds::optimal_lambdas_min(beta, d)?;
    let sp = SpectralParams::from_lambda_pm(d, beta, lp, lm)?;
    let n = 100_000u64;
    // deviations in standard-error units; rerun once on a 3σ–4σ outcome
    for attempt in 0..2 {
        let report = simulate(&sp, n, rng.gen())?;
        let mut z = (report.bit_error_rate - beta).abs() / report.ber_std_err.max(1e-12);
        z = z.max(
            (report.eve_success - report.eve_success_expected).abs()
                / report.eve_std_err.max(1e-12),
        );
        let kf_sigma = ((1.0 / d as f64) * (1.0 - 1.0 / d as f64) / n as f64).sqrt();
        for f in &report.k_frequencies {
            z = z.max((f - 1.0 / d as f64).abs() / kf_sigma);
        }
        if z <= 3.0 || attempt == 1 {
            w.record(z, || format!("d={d} beta={beta} n={n} (z-score)"));
            break;
        }
    }
    Ok(w)
}

type SuiteFn = fn(&[usize], usize, &mut ChaCha12Rng) -> Result<Worst>;

const SUITES: &[(&str, f64, SuiteFn)] = &[
    ("povm-completeness", 1e-10, suite_povm_completeness),
    ("spectral-eigensystem", 1e-10, suite_spectral),
    ("sigma-equivalence", 1e-9, suite_sigma_equivalence),
    ("noise-constraint", 1e-12, suite_noise_constraint),
    ("purification-trace", 1e-10, suite_purification),
    ("isometry-gram", 1e-12, suite_isometry),
    ("ancilla-overlaps", 1e-10, suite_ancilla_overlaps),
    ("grid-vs-analytic", 1e-6, suite_grid_vs_analytic),
    ("holevo-povm", 1e-9, suite_holevo),
    ("uhf-identity", 1e-10, suite_uhf),
    ("vn-route", 1e-8, suite_vn_route),
    ("concavity", 1e-9, suite_concavity),
    ("monte-carlo", 4.0, suite_monte_carlo),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(name, _, _)| *name).collect()
}

/// Run one suite by name. `tolerance` overrides the suite's builtin when set.
pub fn run_suite(
    name: &str,
    d_list: &[usize],
    draws: usize,
    seed: u64,
    tolerance: Option<f64>,
) -> Result<SuiteResult> {
    let (idx, (_, builtin_tol, f)) = SUITES
        .iter()
        .enumerate()
        .find(|(_, (n, _, _))| *n == name)
        .ok_or_else(|| crate::error::Error::Domain(format!("unknown suite '{name}'")))?;
    let mut rng =
        ChaCha12Rng::seed_from_u64(seed.wrapping_add((idx as u64).wrapping_mul(0x9E3779B97F4A7C15)));
    let worst = f(d_list, draws, &mut rng)?;
    let tol = tolerance.unwrap_or(*builtin_tol);
    Ok(SuiteResult {
        suite: name.to_string(),
        cases: worst.cases,
        max_deviation: worst.dev,
        tolerance: tol,
        pass: worst.dev <= tol,
        worst_case: worst.label,
    })
}

/// Run every suite. Failures are reported, not raised.
pub fn verify_all(d_list: &[usize], draws: usize, seed: u64) -> Result<VerifyReport> {
    verify_all_with_tolerance(d_list, draws, seed, None)
}

/// [`verify_all`] with one absolute tolerance applied to every suite.
pub fn verify_all_with_tolerance(
    d_list: &[usize],
    draws: usize,
    seed: u64,
    tolerance: Option<f64>,
) -> Result<VerifyReport> {
    let mut suites = Vec::new();
    for (name, _, _) in SUITES {
        suites.push(run_suite(name, d_list, draws, seed, tolerance)?);
    }
    let pass = suites.iter().all(|s| s.pass);
    Ok(VerifyReport { seed, suites, pass })
}
