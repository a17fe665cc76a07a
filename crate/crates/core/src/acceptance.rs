//! End-to-end acceptance checks, shared by the integration suite and the
//! `verify` command. Each criterion returns a pass flag and a one-line
//! summary of what was measured.

use std::f64::consts::PI;
use std::time::Instant;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{Grid, GridFunction};
use crate::lorentz::lorentz_norm;
use crate::nls::{
    contraction_budget, dispersive_constant, eps_for_budget, exponents_exact, orbit_manifold_diag, picard_solve,
    scale_to_data_size, SolverParams,
};
use crate::propagator::{
    bound_state_term, decay_scan, free_propagate, geometric_times, propagate, propagate_with, PropagatorMethod,
};
use crate::spectral::{bound_states, scattering, two_delta_kappas, two_delta_residual, Eigenfunction, PointInteraction};
use crate::wiener::{
    l1_convolve, lipschitz_bound, measure_convolve, periodic_picard_solve, AtomicMeasure, FourierCoeffs, WienerParams,
};
use crate::C64;

pub const DEFAULT_SEED: u64 = 20_240_601;

/// Titles of the ten criteria, indexed by `id - 1`.
pub const TITLES: [&str; 10] = [
    "scattering identities",
    "bound-state spectra",
    "delta propagator paths agree",
    "unitarity",
    "dispersive decay",
    "eigenstate phases",
    "weighted-space contraction",
    "Lorentz norms of the delta eigenfunction",
    "Fourier-side solver",
    "periodic-orbit manifold",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionOutcome {
    /// `criterion N [PASS] title: detail`.
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("criterion {:>2} [{verdict}] {} ({:.1} s): {}", self.id, self.title, self.seconds, self.detail)
    }
}

/// Runs one criterion; numerical errors count as failures.
pub fn run_criterion(id: u8, seed: u64) -> CriterionOutcome {
    let start = Instant::now();
    let result = match id {
        1 => scattering_identities(seed),
        2 => spectra(),
        3 => path_agreement(),
        4 => unitarity(),
        5 => dispersive_decay(),
        6 => eigen_phases(),
        7 => weighted_contraction(),
        8 => lorentz_norms(),
        9 => fourier_solver(seed),
        10 => periodic_orbits(),
        _ => Ok((false, format!("unknown criterion {id}"))),
    };
    let (passed, detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
    let title = TITLES.get(usize::from(id).wrapping_sub(1)).copied().unwrap_or("unknown").to_string();
    CriterionOutcome { id, title, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

/// All criteria, evaluated on separate threads, in id order.
pub fn run_all(seed: u64) -> Vec<CriterionOutcome> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = (1..=10u8).map(|id| scope.spawn(move || run_criterion(id, seed))).collect();
        handles.into_iter().map(|h| h.join().expect("criterion thread panicked")).collect()
    })
}

type Check = Result<(bool, String)>;

fn scattering_identities(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut unit, mut sum, mut cross, mut prod) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let sigma = rng.gen_range(-10.0..10.0);
        let lambda = rng.gen_range(0.01..10.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let p = scattering(sigma, lambda)?;
        let m = scattering(sigma, -lambda)?;
        unit = unit.max((p.t_coeff.norm_sqr() + p.r_coeff.norm_sqr() - 1.0).abs());
        sum = sum.max((p.r_coeff + 1.0 - p.t_coeff).norm());
        cross = cross.max((m.r_coeff * p.t_coeff + p.r_coeff * m.t_coeff).norm());
        prod = prod.max((m.r_coeff * p.r_coeff + m.t_coeff * p.t_coeff - 1.0).norm());
    }
    let passed = unit < 1e-12 && sum < 1e-12 && cross < 1e-14 && prod < 1e-14;
    Ok((passed, format!("max |t|²+|r|²-1 = {unit:.1e}, |r+1-t| = {sum:.1e}, cross = {cross:.1e}, product = {prod:.1e}")))
}

/// Even two-δ state by bisection on `2κ = -α(1 + e^{-2κa})`, `α < 0`.
pub fn two_delta_ground_bisection(alpha: f64, a: f64) -> f64 {
    let g = |k: f64| 2.0 * k + alpha * (1.0 + (-2.0 * k * a).exp());
    let (mut lo, mut hi) = (0.0, -alpha);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k = 0.5 * (lo + hi);
    -k * k
}

fn spectra() -> Check {
    let delta = bound_states(&PointInteraction::Delta { sigma: -2.0 })?;
    let prime = bound_states(&PointInteraction::DeltaPrime { beta: -2.0 })?;
    let exact = delta.len() == 1 && delta[0].gamma == -1.0 && prime.len() == 1 && prime[0].gamma == -1.0;
    // a·α = -1 is refused by the spectrum routine, so the formula is evaluated directly
    let refused = bound_states(&PointInteraction::TwoDelta { alpha: -1.0, a: 1.0 }).is_err();
    let two: Vec<f64> = two_delta_kappas(-1.0, 1.0)?.iter().map(|k| -k * k).collect();
    let oracle = two_delta_ground_bisection(-1.0, 1.0);
    let two_err = if two.len() == 1 { (two[0] - oracle).abs() } else { f64::INFINITY };
    let mut sweep_ok = true;
    let mut worst_res: f64 = 0.0;
    for k in 0..50 {
        let a = 0.5 + k as f64 / 49.0;
        let states = bound_states(&PointInteraction::TwoDelta { alpha: -1.0, a })?;
        let expected = if a <= 1.0 { 1 } else { 2 };
        sweep_ok &= states.len() == expected;
        for s in &states {
            worst_res = worst_res.max(two_delta_residual(s.gamma, -1.0, a));
        }
        sweep_ok &= (states[0].gamma - two_delta_ground_bisection(-1.0, a)).abs() < 1e-10;
    }
    let passed = exact && refused && two_err < 1e-10 && sweep_ok && worst_res < 1e-10;
    Ok((
        passed,
        format!(
            "delta/delta' exact: {exact}; two-delta(-1,1) refused by spectrum: {refused}, Lambert gamma = {:.12} vs bisection {oracle:.12}; count sweep over a in [0.5, 1.5]: {}, max residual {worst_res:.1e}",
            two.first().copied().unwrap_or(f64::NAN),
            if sweep_ok { "ok" } else { "mismatch" }
        ),
    ))
}

fn left_gaussians(g: Grid) -> Vec<GridFunction> {
    [(-3.0, 1.0), (-4.0, 1.0), (-3.5, 2.0), (-5.0, 0.7), (-4.5, 1.5)]
        .iter()
        .map(|&(c, w)| GridFunction::from_real_fn(g, move |x| (-w * (x - c) * (x - c)).exp()))
        .collect()
}

fn path_agreement() -> Check {
    let g = Grid::symmetric_with_spacing(20.0, 0.01)?;
    let data = left_gaussians(g);
    let cases: Vec<(usize, f64, f64)> =
        (0..5).flat_map(|k| [0.5, 1.0, 2.0].into_iter().flat_map(move |s| [0.2, 0.7].map(|t| (k, s, t)))).collect();
    let worst = std::thread::scope(|scope| -> Result<f64> {
        let handles: Vec<_> = cases
            .iter()
            .map(|&(k, sigma, t)| {
                let f = &data[k];
                scope.spawn(move || -> Result<f64> {
                    let pi = PointInteraction::Delta { sigma };
                    let a = propagate_with(&pi, f, t, PropagatorMethod::ClosedForm)?.state;
                    let b = propagate_with(&pi, f, t, PropagatorMethod::KernelQuadrature)?.state;
                    let c = propagate_with(&pi, f, t, PropagatorMethod::SpectralQuadrature)?.state;
                    Ok(a.sub(&b)?.l2_norm().max(a.sub(&c)?.l2_norm()).max(b.sub(&c)?.l2_norm()))
                })
            })
            .collect();
        let mut worst: f64 = 0.0;
        for h in handles {
            worst = worst.max(h.join().expect("path thread panicked")?);
        }
        Ok(worst)
    })?;
    Ok((worst < 1e-4, format!("max pairwise L² difference over 30 cases = {worst:.2e} (limit 1e-4)")))
}

fn unitarity() -> Check {
    let g = Grid::symmetric_with_spacing(30.0, 0.02)?;
    let f = GridFunction::from_real_fn(g, |x| (-(x + 3.0).powi(2)).exp());
    let norm = f.l2_norm();
    let free = (free_propagate(&f, 0.9).state.l2_norm() - norm).abs();
    let mut worst: f64 = 0.0;
    for sigma in [1.0, -1.0] {
        for method in [PropagatorMethod::ClosedForm, PropagatorMethod::KernelQuadrature, PropagatorMethod::SpectralQuadrature] {
            let out = propagate_with(&PointInteraction::Delta { sigma }, &f, 0.9, method)?.state;
            worst = worst.max((out.l2_norm() - norm).abs());
        }
    }
    for beta in [1.0, -1.0] {
        let out = propagate(&PointInteraction::DeltaPrime { beta }, &f, 0.9)?.state;
        worst = worst.max((out.l2_norm_with_jump(0.0)? - norm).abs());
    }
    for pi in [
        PointInteraction::TwoDelta { alpha: 1.0, a: 1.0 },
        PointInteraction::TwoDelta { alpha: -1.5, a: 1.0 },
    ] {
        let out = propagate(&pi, &f, 0.9)?.state;
        worst = worst.max((out.l2_norm() - norm).abs());
    }
    Ok((free < 1e-10 && worst < 1e-4, format!("free drift {free:.1e} (limit 1e-10), interacting drift {worst:.1e} (limit 1e-4)")))
}

fn dispersive_decay() -> Check {
    let g = Grid::symmetric_with_spacing(2400.0, 0.1)?;
    let narrow = GridFunction::from_real_fn(g, |x| (-16.0 * (x + 1.0).powi(2)).exp());
    let centred = GridFunction::from_real_fn(g, |x| (-x * x).exp());
    let times = geometric_times(1.0, 100.0, 10)?;
    let mut details = Vec::new();
    let mut passed = true;
    let scans = [
        ("sigma=0", PointInteraction::Delta { sigma: 0.0 }, &narrow, 0.02),
        ("sigma=1", PointInteraction::Delta { sigma: 1.0 }, &narrow, 0.05),
        ("beta=1", PointInteraction::DeltaPrime { beta: 1.0 }, &centred, 0.05),
        ("two-delta(1,1)", PointInteraction::TwoDelta { alpha: 1.0, a: 1.0 }, &centred, 0.05),
    ];
    for (name, pi, f, tol) in scans {
        let r = decay_scan(&pi, f, &times, false)?;
        passed &= (r.fitted_slope + 0.5).abs() < tol;
        details.push(format!("{name} {:.3}", r.fitted_slope));
    }
    let attractive = PointInteraction::Delta { sigma: -1.0 };
    let bound = bound_state_term(&attractive, &narrow, 0.0)?.sup_norm();
    let raw = decay_scan(&attractive, &narrow, &times, false)?;
    let stays = raw.sup_norms.iter().all(|&s| s >= 0.5 * bound);
    let sub = decay_scan(&attractive, &narrow, &times, true)?;
    passed &= stays && (sub.fitted_slope + 0.5).abs() < 0.05;
    details.push(format!(
        "sigma=-1 min/‖Pf‖ {:.3}, subtracted {:.3}",
        raw.sup_norms.iter().cloned().fold(f64::INFINITY, f64::min) / bound,
        sub.fitted_slope
    ));
    Ok((passed, format!("slopes over t in [1,100]: {}", details.join(", "))))
}

fn eigen_phases() -> Check {
    let g = Grid::symmetric_with_spacing(30.0, 0.01)?;
    let psi = Eigenfunction::Delta { sigma: -2.0 }.sample(&g);
    let phi = Eigenfunction::DeltaPrime { beta: -2.0 }.sample(&g);
    let mut worst: f64 = 0.0;
    for t in [0.5, 1.0, 2.0] {
        // e^{iσ²t/4} = e^{it}, e^{4it/β²} = e^{it}
        let rot = C64::from_polar(1.0, t);
        let a = propagate(&PointInteraction::Delta { sigma: -2.0 }, &psi, t)?.state;
        let b = propagate(&PointInteraction::DeltaPrime { beta: -2.0 }, &phi, t)?.state;
        worst = worst.max(a.sub(&psi.scale(rot))?.l2_norm());
        worst = worst.max(b.sub(&phi.scale(rot))?.l2_norm_with_jump(0.0)?);
    }
    Ok((worst < 1e-4, format!("max L² phase error {worst:.1e} (limit 1e-4)")))
}

fn weighted_contraction() -> Check {
    let mut exact = true;
    for r in [4, 5, 6, 7] {
        let rho = Ratio::from_integer(r);
        let (theta, zeta) = exponents_exact(rho)?;
        exact &= Ratio::from_integer(1) - zeta - theta * rho == -theta;
    }
    let g = Grid::symmetric_with_spacing(60.0, 0.05)?;
    let times = geometric_times(0.05, 2.0, 8)?;
    let probe = SolverParams::new(5.0, 1, 1.0, 1.0, times.clone())?;
    let k = contraction_budget(&probe, dispersive_constant(1.0)?)?.k;
    let params = SolverParams::new(5.0, 1, 1.0, eps_for_budget(5.0, k, 0.5), times)?;
    let data = scale_to_data_size(&GridFunction::from_real_fn(g, |x| (-(x + 3.0).powi(2)).exp()), &params)?;
    let u = picard_solve(&data, &params)?;
    let budget = u.budget.map_or(f64::NAN, |b| b.budget);
    let max_ratio = u.ratios.iter().cloned().fold(0.0, f64::max);
    let final_norm = u.final_weighted_norm().unwrap_or(f64::INFINITY);
    let passed = exact && max_ratio <= 0.6 && final_norm <= 2.0 * params.eps && (budget - 0.5).abs() < 1e-9;
    Ok((
        passed,
        format!(
            "budget {budget:.3}, eps {:.4}, max ratio {max_ratio:.2e}, final weighted norm / eps = {:.4}, exact identity for rho 4..7: {exact}",
            params.eps,
            final_norm / params.eps
        ),
    ))
}

/// `(‖Ψ_σ‖_{(p,q)})` from `(-σ/2)^{q/2} (-4/(qσ))^{q/p} Γ(q/p)`.
pub fn psi_lorentz_closed_form(sigma: f64, p: f64, q: f64) -> f64 {
    let v = (-sigma / 2.0).powf(q / 2.0) * (-4.0 / (q * sigma)).powf(q / p) * statrs::function::gamma::gamma(q / p);
    v.powf(1.0 / q)
}

fn lorentz_norms() -> Check {
    let sigma = -2.0;
    let psi = Eigenfunction::Delta { sigma };
    let coarse = psi.sample(&Grid::new(-30.0, 30.0, 6001)?);
    let fine = psi.sample(&Grid::new(-30.0, 30.0, 12001)?);
    let mut passed = true;
    let mut details = Vec::new();
    for (p, q) in [(1.0, 1.0), (2.0, 2.0), (3.0, 2.0)] {
        let exact = psi_lorentz_closed_form(sigma, p, q);
        let e1 = (lorentz_norm(&coarse, p, q)? - exact).abs();
        let e2 = (lorentz_norm(&fine, p, q)? - exact).abs();
        let ratio = e1 / e2;
        // trapezoid sums converge at second order, so the error at least halves
        passed &= e1 < 5e-3 && ratio >= 1.7;
        details.push(format!("({p},{q}) err {e1:.2e} -> {e2:.2e} (x{ratio:.2})"));
    }
    Ok((passed, details.join(", ")))
}

/// Truncated Galerkin reference for `i u_t + Δu + μu = λu^ρ` on modes
/// `|m| ≤ max_mode`, by fourth-order Runge–Kutta on the integrating-factor
/// form `w = e^{iωt} û`. Returns the state at each requested time (which must
/// be multiples of the step).
pub fn galerkin_reference(
    u0: &FourierCoeffs,
    mu: &FourierCoeffs,
    rho: u32,
    lambda_sign: f64,
    max_mode: i64,
    times: &[f64],
    step: f64,
) -> Vec<FourierCoeffs> {
    let size = (2 * max_mode + 1) as usize;
    let omega: Vec<f64> = (-max_mode..=max_mode).map(|m| 4.0 * PI * PI * (m * m) as f64).collect();
    let to_vec = |f: &FourierCoeffs| -> Vec<C64> {
        (-max_mode..=max_mode).map(|m| f.get(m)).collect()
    };
    let mu_v = to_vec(mu);
    let conv = |a: &[C64], b: &[C64]| -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); size];
        for (i, &x) in a.iter().enumerate() {
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                let k = i as i64 + j as i64 - max_mode;
                if (0..size as i64).contains(&k) {
                    out[k as usize] += x * y;
                }
            }
        }
        out
    };
    let rhs = |t: f64, w: &[C64]| -> Vec<C64> {
        let u: Vec<C64> = w.iter().zip(&omega).map(|(&z, &om)| z * C64::from_polar(1.0, -om * t)).collect();
        let lin = conv(&mu_v, &u);
        let mut pow = u.clone();
        for _ in 1..rho {
            pow = conv(&pow, &u);
        }
        let i = C64::new(0.0, 1.0);
        (0..size)
            .map(|k| (i * lin[k] - i * lambda_sign * pow[k]) * C64::from_polar(1.0, omega[k] * t))
            .collect()
    };
    let axpy = |a: &[C64], c: f64, b: &[C64]| -> Vec<C64> { a.iter().zip(b).map(|(&x, &y)| x + c * y).collect() };
    times
        .iter()
        .map(|&target| {
            let n = (target.abs() / step).round() as usize;
            let h = if target < 0.0 { -step } else { step };
            let mut w = to_vec(u0);
            let mut t = 0.0;
            for _ in 0..n {
                let k1 = rhs(t, &w);
                let k2 = rhs(t + 0.5 * h, &axpy(&w, 0.5 * h, &k1));
                let k3 = rhs(t + 0.5 * h, &axpy(&w, 0.5 * h, &k2));
                let k4 = rhs(t + h, &axpy(&w, h, &k3));
                w = (0..size).map(|k| w[k] + h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k])).collect();
                t += h;
            }
            let pairs = (-max_mode..=max_mode)
                .zip(&w)
                .zip(&omega)
                .map(|((m, &z), &om)| (m, z * C64::from_polar(1.0, -om * t)));
            FourierCoeffs::from_pairs(pairs).expect("finite state")
        })
        .collect()
}

fn random_coeffs(rng: &mut ChaCha8Rng, span: i64, count: usize) -> FourierCoeffs {
    let pairs: Vec<(i64, C64)> =
        (0..count).map(|_| (rng.gen_range(-span..=span), C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))).collect();
    FourierCoeffs::from_pairs(pairs).expect("finite")
}

fn random_measure(rng: &mut ChaCha8Rng, count: usize) -> AtomicMeasure {
    let atoms = (0..count)
        .map(|_| (rng.gen_range(-5.0..5.0), C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    AtomicMeasure::new(atoms).expect("finite")
}

fn fourier_solver(seed: u64) -> Check {
    let u0 = FourierCoeffs::mode(1, C64::new(0.05, 0.0));
    let mu = FourierCoeffs::mode(0, C64::new(0.1, 0.0));
    let params = WienerParams { n_times: 10, ..WienerParams::new(2, 1, 0.5)? };
    let sol = periodic_picard_solve(&u0, &mu, &params)?;
    let reference = galerkin_reference(&u0, &mu, 2, 1.0, 16, &sol.times, 1e-4);
    let gap = sol.states.iter().zip(&reference).map(|(a, b)| a.sub(b).l1_norm()).fold(0.0, f64::max);
    let sup = sol.sup_norm();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = sol.budget.lipschitz_q;
    let bound = lipschitz_bound(q);
    let mut worst_lip: f64 = 0.0;
    for _ in 0..5 {
        let pert = random_coeffs(&mut rng, 2, 3).scale(C64::new(2e-3, 0.0));
        let v0 = u0.axpy(C64::new(1.0, 0.0), &pert);
        let other = periodic_picard_solve(&v0, &mu, &params)?;
        let d = sol.states.iter().zip(&other.states).map(|(a, b)| a.sub(b).l1_norm()).fold(0.0, f64::max);
        worst_lip = worst_lip.max(d / pert.l1_norm());
    }

    let mut young_ok = true;
    for _ in 0..10_000 {
        let (nf, ng) = (rng.gen_range(1..6), rng.gen_range(1..6));
        let f = random_coeffs(&mut rng, 8, nf);
        let g = random_coeffs(&mut rng, 8, ng);
        young_ok &= l1_convolve(&f, &g).l1_norm() <= f.l1_norm() * g.l1_norm() * (1.0 + 1e-12);
        let m = random_measure(&mut rng, nf);
        let n = random_measure(&mut rng, ng);
        young_ok &= measure_convolve(&m, &n).total_variation() <= m.total_variation() * n.total_variation() * (1.0 + 1e-12);
    }
    let passed = sup <= 0.1 && gap < 1e-5 && worst_lip <= bound && young_ok && sol.budget.controlled;
    Ok((
        passed,
        format!(
            "sup ‖u‖₁ = {sup:.5}, Galerkin gap {gap:.1e}, Lipschitz ratio {worst_lip:.4} vs (1-q)^-1 = {bound:.4}, Young on 10^4 pairs: {young_ok}"
        ),
    ))
}

fn periodic_orbits() -> Check {
    let g = Grid::symmetric_with_spacing(2400.0, 0.1)?;
    let psi = Eigenfunction::Delta { sigma: -1.0 }.sample(&g);
    let u0 = psi.add(&GridFunction::from_real_fn(g, |x| (-16.0 * (x + 1.0).powi(2)).exp()))?;
    let d = orbit_manifold_diag(&u0, -1.0, &geometric_times(1.0, 100.0, 10)?, 1.0)?;
    Ok((
        (d.fitted_slope + 0.5).abs() < 0.05,
        format!("gamma0 {:.4}, slope {:.4} ± {:.4} over t in [1,100]", d.gamma0, d.fitted_slope, d.slope_stderr),
    ))
}
