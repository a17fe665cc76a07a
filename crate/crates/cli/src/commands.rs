//! Command implementations. Each resolves its defaults into the config (so
//! the echoed config is complete), runs, and returns a report with a verdict.

use serde_json::json;
use singular_nls::acceptance::{galerkin_reference, psi_lorentz_closed_form, run_all, run_criterion};
use singular_nls::lorentz::{lorentz_norm, weak_lp_norm};
use singular_nls::nls::{
    contraction_budget, dispersive_constant, eps_for_budget, integral_equation_residual, picard_solve, scale_to_data_size,
    SolverParams,
};
use singular_nls::propagator::{bound_state_term, decay_scan, default_method, propagate_with};
use singular_nls::spectral::{bound_states, two_delta_kappas, two_delta_residual, Eigenfunction};
use singular_nls::wiener::{nonperiodic_picard_solve, periodic_group, periodic_picard_solve, Nonlinearity, WienerParams};
use singular_nls::{Error, Grid, GridFunction, PointInteraction, Result};

use crate::config::{DataShape, RunConfig, SolverKind};
use crate::report::{Report, Table};

const NORM_CHECK_TOL: f64 = 1e-6;
const RESIDUAL_TOL: f64 = 1e-10;
const UNITARITY_TOL: f64 = 1e-4;

fn is_free(pi: &PointInteraction) -> bool {
    matches!(pi, PointInteraction::Delta { sigma } if *sigma == 0.0)
        || matches!(pi, PointInteraction::DeltaPrime { beta } if *beta == 0.0)
}

/// L² norm, split at 0 for the δ′ case where states jump there.
fn state_norm(pi: &PointInteraction, f: &GridFunction) -> Result<f64> {
    match pi {
        PointInteraction::DeltaPrime { .. } => f.l2_norm_with_jump(0.0),
        _ => Ok(f.l2_norm()),
    }
}

/// Numerical L² norm of an eigenfunction with decay rate `kappa`.
fn eigen_norm(ef: &Eigenfunction, kappa: f64, extra: f64) -> Result<f64> {
    let grid = Grid::symmetric_with_spacing(40.0 / kappa + extra, 5e-4 / kappa.max(1.0))?;
    let f = ef.sample(&grid);
    match ef {
        Eigenfunction::DeltaPrime { .. } => f.l2_norm_with_jump(0.0),
        _ => Ok(f.l2_norm()),
    }
}

pub fn spectrum(cfg: &mut RunConfig) -> Result<Report> {
    let pi = cfg.interaction()?;
    let mut eigenvalues = Vec::new();
    let mut residuals = Vec::new();
    let mut norms = Vec::new();
    let mut excluded = false;
    match bound_states(&pi) {
        Ok(states) => {
            for s in states {
                let kappa = (-s.gamma).sqrt();
                let (residual, extra) = match pi {
                    PointInteraction::TwoDelta { alpha, a } => (two_delta_residual(s.gamma, alpha, a), a),
                    PointInteraction::Delta { sigma } => ((s.gamma + sigma * sigma / 4.0).abs(), 0.0),
                    PointInteraction::DeltaPrime { beta } => ((s.gamma + 4.0 / (beta * beta)).abs(), 0.0),
                };
                eigenvalues.push(s.gamma);
                residuals.push(residual);
                norms.push(Some(eigen_norm(&s.eigenfunction, kappa, extra)?));
            }
        }
        Err(Error::ExcludedParameterLine) => {
            // the spectrum routine refuses a·α = -1; report the Lambert values with a flag
            let PointInteraction::TwoDelta { alpha, a } = pi else { unreachable!() };
            excluded = true;
            for k in two_delta_kappas(alpha, a)? {
                let gamma = -k * k;
                eigenvalues.push(gamma);
                residuals.push(two_delta_residual(gamma, alpha, a));
                norms.push(None);
            }
        }
        Err(e) => return Err(e),
    }
    let passed = residuals.iter().all(|&r| r < RESIDUAL_TOL)
        && norms.iter().flatten().all(|&n: &f64| (n - 1.0).abs() < NORM_CHECK_TOL);
    Ok(Report {
        command: "spectrum",
        body: json!({
            "interaction": pi.name(),
            "eigenvalues": eigenvalues,
            "residuals": residuals,
            "eigenfunction_norms": norms,
            "excluded_parameter_line": excluded,
        }),
        table: None,
        passed,
    })
}

pub fn propagate(cfg: &mut RunConfig) -> Result<Report> {
    let pi = cfg.interaction()?;
    let grid = cfg.grid_or(30.0, 0.02).build()?;
    let method = *cfg.method.get_or_insert(default_method(&pi));
    let f = cfg.data.build(grid, Some(&pi))?;
    let out = propagate_with(&pi, &f, cfg.t, method)?;
    let (n_in, n_out) = (f.l2_norm(), state_norm(&pi, &out.state)?);
    let mut table = Table::new(&["x", "re", "im", "abs"]);
    for (x, v) in grid.points().into_iter().zip(out.state.values()) {
        table.push(vec![x, v.re, v.im, v.norm()]);
    }
    let drift = (n_out - n_in).abs();
    Ok(Report {
        command: "propagate",
        body: json!({
            "interaction": pi.name(),
            "t": cfg.t,
            "method": method,
            "norm_in": n_in,
            "norm_out": n_out,
            "norm_drift": drift,
            "boundary_warning": out.boundary_warning,
        }),
        table: Some(table),
        passed: drift < UNITARITY_TOL && !out.boundary_warning,
    })
}

pub fn decay_scan_cmd(cfg: &mut RunConfig) -> Result<Report> {
    let pi = cfg.interaction()?;
    let grid = cfg.grid_or(2400.0, 0.1).build()?;
    let times = cfg.times_or(1.0, 100.0, 10).build()?;
    let tol = *cfg.slope_tol.get_or_insert(if is_free(&pi) { 0.02 } else { 0.05 });
    let f = cfg.data.build(grid, Some(&pi))?;
    let r = decay_scan(&pi, &f, &times, cfg.subtract_bound_states)?;
    let mut table = Table::new(&["t", "sup_norm", "weak_lp_norm"]);
    for ((t, s), w) in r.times.iter().zip(&r.sup_norms).zip(&r.weak_norms) {
        table.push(vec![*t, *s, *w]);
    }
    let (verdict, passed) = if r.no_decay_expected {
        let bound = bound_state_term(&pi, &f, 0.0)?.sup_norm();
        let stays = r.sup_norms.iter().all(|&s| s >= 0.5 * bound);
        (if stays { "no-decay (bound state)" } else { "fail" }, stays)
    } else if (r.fitted_slope + 0.5).abs() < tol {
        ("pass", true)
    } else {
        ("fail", false)
    };
    Ok(Report {
        command: "decay-scan",
        body: json!({
            "interaction": pi.name(),
            "fitted_slope": r.fitted_slope,
            "slope_stderr": r.slope_stderr,
            "expected_slope": -0.5,
            "tolerance": tol,
            "weak_exponent": r.weak_exponent,
            "no_decay_expected": r.no_decay_expected,
            "boundary_warning": r.boundary_warning,
            "verdict": verdict,
        }),
        table: Some(table),
        passed,
    })
}

pub fn evolve(cfg: &mut RunConfig) -> Result<Report> {
    match cfg.nls.solver {
        SolverKind::WeakLp => evolve_weak_lp(cfg),
        SolverKind::Measure => evolve_measure(cfg),
    }
}

fn evolve_weak_lp(cfg: &mut RunConfig) -> Result<Report> {
    let pi = *cfg.interaction.get_or_insert(PointInteraction::Delta { sigma: 1.0 });
    let PointInteraction::Delta { sigma } = pi else {
        return Err(Error::InvalidParameter("the weak-Lp solver supports the delta interaction only".into()));
    };
    let grid = cfg.grid_or(60.0, 0.05).build()?;
    let times = cfg.times_or(0.05, 2.0, 8).build()?;
    let nls = cfg.nls.clone();
    let eps = match nls.eps {
        Some(e) => e,
        None => {
            let probe = SolverParams::new(nls.rho, nls.lambda_sign, sigma, 1.0, times.clone())?;
            let k = contraction_budget(&probe, dispersive_constant(sigma)?)?.k;
            eps_for_budget(nls.rho, k, nls.budget)
        }
    };
    let mut params = SolverParams::new(nls.rho, nls.lambda_sign, sigma, eps, times)?;
    params.max_iters = nls.max_iters;
    params.tol = nls.tol;
    params.validate()?;
    let data = scale_to_data_size(&cfg.data.build(grid, Some(&pi))?, &params)?;
    let u = picard_solve(&data, &params)?;
    let residual = integral_equation_residual(&u, &params)?;
    let mut table = Table::new(&["t", "sup_norm", "l2_norm", "weighted_weak_norm"]);
    for (t, s) in u.times.iter().zip(&u.states) {
        let w = t.powf(params.theta) * weak_lp_norm(s, params.rho + 1.0)?;
        table.push(vec![*t, s.sup_norm(), s.l2_norm(), w]);
    }
    let final_norm = u.final_weighted_norm().unwrap_or(f64::INFINITY);
    let converged = u.differences.last().is_some_and(|&d| d < params.tol);
    let passed = converged && final_norm <= 2.0 * eps && u.ratios.iter().all(|&r| r < 1.0);
    Ok(Report {
        command: "evolve",
        body: json!({
            "solver": "weak_lp",
            "eps": eps,
            "theta": params.theta,
            "zeta": params.zeta,
            "budget": u.budget,
            "iterations": u.differences.len(),
            "differences": u.differences,
            "ratios": u.ratios,
            "weighted_history": u.weighted_history,
            "final_weighted_norm": final_norm,
            "residual": residual,
            "uncontrolled": u.uncontrolled,
            "converged": converged,
            "verdict": if passed { "contraction" } else { "fail" },
        }),
        table: Some(table),
        passed,
    })
}

fn wiener_params(cfg: &RunConfig) -> Result<WienerParams> {
    let w = &cfg.wiener;
    let p = WienerParams {
        n_times: w.panels,
        nonlinearity: w.nonlinearity,
        tol: w.tol,
        max_iters: w.max_iters,
        max_atoms: w.max_atoms,
        ..WienerParams::new(w.rho, w.lambda_sign, w.t_max)?
    };
    p.validate()?;
    Ok(p)
}

fn evolve_measure(cfg: &mut RunConfig) -> Result<Report> {
    let params = wiener_params(cfg)?;
    let w = &cfg.wiener;
    let sol = nonperiodic_picard_solve(&w.u0_hat, &w.mu_hat, &params)?;
    let mut table = Table::new(&["t", "total_variation", "atoms"]);
    for (t, s) in sol.times.iter().zip(&sol.states) {
        table.push(vec![*t, s.total_variation(), s.len() as f64]);
    }
    let converged = sol.differences.last().is_some_and(|&d| d < params.tol);
    let bounded = sol.uncontrolled || sol.sup_norm() <= 2.0 * w.u0_hat.total_variation();
    Ok(Report {
        command: "evolve",
        body: json!({
            "solver": "measure",
            "iterations": sol.iterations(),
            "differences": sol.differences,
            "ratios": sol.ratios,
            "budget": sol.budget,
            "sup_norm": sol.sup_norm(),
            "pruned": sol.pruned,
            "notes": sol.notes,
            "final_state": sol.states.last(),
            "converged": converged,
        }),
        table: Some(table),
        passed: converged && bounded,
    })
}

pub fn periodic_evolve(cfg: &mut RunConfig) -> Result<Report> {
    let params = wiener_params(cfg)?;
    let w = cfg.wiener.clone();
    let sol = periodic_picard_solve(&w.u0, &w.mu, &params)?;
    let converged = sol.differences.last().is_some_and(|&d| d < params.tol);
    let bounded = sol.uncontrolled || sol.sup_norm() <= 2.0 * w.u0.l1_norm();
    let mut passed = converged && bounded;

    let linear_residual = (w.lambda_sign == 0 && w.mu.is_empty()).then(|| {
        sol.times.iter().zip(&sol.states).map(|(t, s)| s.sub(&periodic_group(&w.u0, *t)).l1_norm()).fold(0.0, f64::max)
    });
    if let Some(r) = linear_residual {
        passed &= r < 1e-12;
    }
    let gaps = match w.galerkin_modes {
        Some(modes) => {
            if w.nonlinearity != Nonlinearity::Power {
                return Err(Error::InvalidParameter("the Galerkin reference supports the power nonlinearity only".into()));
            }
            let reference = galerkin_reference(&w.u0, &w.mu, w.rho, w.lambda_sign as f64, modes, &sol.times, w.galerkin_step);
            let gaps: Vec<f64> = sol.states.iter().zip(&reference).map(|(a, b)| a.sub(b).l1_norm()).collect();
            passed &= gaps.iter().all(|&g| g < 1e-5);
            Some(gaps)
        }
        None => None,
    };

    let header: &[&str] = if gaps.is_some() { &["t", "l1_norm", "galerkin_gap"] } else { &["t", "l1_norm"] };
    let mut table = Table::new(header);
    for (k, (t, s)) in sol.times.iter().zip(&sol.states).enumerate() {
        let mut row = vec![*t, s.l1_norm()];
        if let Some(g) = &gaps {
            row.push(g[k]);
        }
        table.push(row);
    }
    Ok(Report {
        command: "periodic-evolve",
        body: json!({
            "iterations": sol.iterations(),
            "differences": sol.differences,
            "ratios": sol.ratios,
            "budget": sol.budget,
            "lipschitz_bound": singular_nls::wiener::lipschitz_bound(sol.budget.lipschitz_q),
            "sup_norm": sol.sup_norm(),
            "notes": sol.notes,
            "linear_residual": linear_residual,
            "galerkin_max_gap": gaps.as_ref().map(|g| g.iter().cloned().fold(0.0, f64::max)),
            "final_state": sol.states.last(),
            "converged": converged,
        }),
        table: Some(table),
        passed,
    })
}

pub fn lorentz(cfg: &mut RunConfig) -> Result<Report> {
    let grid = cfg.grid_or(30.0, 0.01).build()?;
    let f = cfg.data.build(grid, cfg.interaction.as_ref())?;
    let (p, q) = (cfg.lorentz.p, cfg.lorentz.q);
    let value = lorentz_norm(&f, p, q.unwrap_or(f64::INFINITY))?;
    let weak = if p > 1.0 { Some(weak_lp_norm(&f, p)?) } else { None };
    let closed = match (cfg.interaction, cfg.data.shape, q) {
        (Some(PointInteraction::Delta { sigma }), DataShape::BoundState, Some(q)) if sigma < 0.0 => {
            Some(psi_lorentz_closed_form(sigma, p, q))
        }
        _ => None,
    };
    let error = closed.map(|c| (value - c).abs());
    Ok(Report {
        command: "lorentz-norm",
        body: json!({
            "p": p,
            "q": q.map_or(json!("inf"), |q| json!(q)),
            "lorentz_norm": value,
            "weak_lp_norm": weak,
            "closed_form": closed,
            "error": error,
        }),
        table: None,
        passed: error.is_none_or(|e| e < 5e-3),
    })
}

pub fn verify(cfg: &mut RunConfig) -> Result<Report> {
    let seed = cfg.seed;
    let outcomes = match &cfg.only {
        Some(ids) => ids.iter().map(|&id| run_criterion(id, seed)).collect(),
        None => run_all(seed),
    };
    for o in &outcomes {
        eprintln!("{}", o.line());
    }
    let passed = outcomes.iter().all(|o| o.passed);
    // timings are left out so that reports are reproducible
    let criteria: Vec<_> =
        outcomes.iter().map(|o| json!({"id": o.id, "title": o.title, "passed": o.passed, "detail": o.detail})).collect();
    Ok(Report { command: "verify", body: json!({ "seed": seed, "criteria": criteria }), table: None, passed })
}
