//! Global solutions of `i u_t + Δ_σ u = λ|u|^{ρ-1}u` in a time-weighted
//! weak-Lᵖ space, by Picard iteration on the Duhamel formula.
//!
//! The space is realised on a finite increasing time grid `t_1 < … < t_m`
//! with norm `sup_i t_i^ϑ ‖u(t_i)‖_(ρ+1,∞)`. Linear evolution is the δ group
//! `G_σ(t)` by its closed form.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64 as C64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::lorentz::weak_lp_norm;
use crate::propagator::{delta_propagate, fit_loglog_slope, PropagatorMethod};
use crate::quadrature;
use crate::spectral::Eigenfunction;

/// Weight exponent `ϑ`, kernel exponent `ζ` and the threshold `ρ₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub theta: f64,
    pub zeta: f64,
    pub rho0: f64,
}

/// `ρ₀ = (3 + √17)/2`, the positive root of `ρ² - 3ρ - 2`.
pub fn rho0() -> f64 {
    (3.0 + 17f64.sqrt()) / 2.0
}

/// `ϑ = 1/(ρ-1) - 1/(2(ρ+1))`, `ζ = (ρ-1)/(2(ρ+1))`.
pub fn exponents(rho: f64) -> Result<Exponents> {
    if !(rho > 1.0) || !rho.is_finite() {
        return Err(Error::InvalidParameter(format!("rho must exceed 1, got {rho}")));
    }
    Ok(Exponents {
        theta: 1.0 / (rho - 1.0) - 1.0 / (2.0 * (rho + 1.0)),
        zeta: (rho - 1.0) / (2.0 * (rho + 1.0)),
        rho0: rho0(),
    })
}

/// `(ϑ, ζ)` in exact rational arithmetic.
pub fn exponents_exact(rho: Ratio<i64>) -> Result<(Ratio<i64>, Ratio<i64>)> {
    let one = Ratio::from_integer(1);
    let two = Ratio::from_integer(2);
    if rho <= one {
        return Err(Error::InvalidParameter(format!("rho must exceed 1, got {rho}")));
    }
    let theta = one / (rho - one) - one / (two * (rho + one));
    let zeta = (rho - one) / (two * (rho + one));
    Ok((theta, zeta))
}

/// `B(ν, η) = ∫_0^1 (1-s)^{ν-1} s^{η-1} ds`.
///
/// The interval is split at ½. On `[0, ½]` the substitution `s = u^{1/η}`
/// absorbs `s^{η-1}`; on `[½, 1]`, `1 - s = u^{1/ν}` absorbs `(1-s)^{ν-1}`.
/// The remaining integrands are bounded and are integrated on panels graded
/// geometrically towards `u = 0`.
pub fn beta_function(nu: f64, eta: f64) -> Result<f64> {
    if !(nu > 0.0 && eta > 0.0) || !nu.is_finite() || !eta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta function needs positive arguments, got ({nu}, {eta})")));
    }
    let half = |a: f64, b: f64| -> Result<f64> {
        // ∫_0^½ s^{a-1} (1-s)^{b-1} ds = (1/a) ∫_0^{2^{-a}} (1 - u^{1/a})^{b-1} du
        let top = 0.5f64.powf(a);
        let g = |u: f64| (1.0 - u.powf(1.0 / a)).powf(b - 1.0);
        Ok(graded_integral(top, g)? / a)
    };
    Ok(half(eta, nu)? + half(nu, eta)?)
}

/// `∫_0^top g` on panels `[r^{k+1} top, r^k top]`, `r = ½`, down to
/// `2^{-60} top`, 20-point Gauss–Legendre on each.
fn graded_integral(top: f64, g: impl Fn(f64) -> f64) -> Result<f64> {
    let rule = quadrature::legendre(20)?;
    let mut acc = 0.0;
    let mut hi = top;
    for _ in 0..60 {
        let lo = 0.5 * hi;
        let (mid, rad) = (0.5 * (hi + lo), 0.5 * (hi - lo));
        acc += rule.iter().map(|(x, w)| rad * w * g(mid + rad * x)).sum::<f64>();
        hi = lo;
    }
    // the last sliver, where g is within rounding of g(0)
    Ok(acc + hi * g(0.5 * hi))
}

/// Parameters of a Picard run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub rho: f64,
    /// Sign of `λ`; `0` switches the nonlinear term off.
    pub lambda_sign: i8,
    pub sigma: f64,
    pub theta: f64,
    pub zeta: f64,
    pub eps: f64,
    pub times: Vec<f64>,
    pub s_quad_points: usize,
    pub max_iters: usize,
    pub tol: f64,
}

impl SolverParams {
    /// Parameters with `ϑ`, `ζ` derived from `ρ` and default quadrature and
    /// stopping settings.
    pub fn new(rho: f64, lambda_sign: i8, sigma: f64, eps: f64, times: Vec<f64>) -> Result<Self> {
        let e = exponents(rho)?;
        let p = Self {
            rho,
            lambda_sign,
            sigma,
            theta: e.theta,
            zeta: e.zeta,
            eps,
            times,
            s_quad_points: 16,
            max_iters: 40,
            tol: 1e-10,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let e = exponents(self.rho)?;
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if (self.theta - e.theta).abs() > 1e-12 || (self.zeta - e.zeta).abs() > 1e-12 {
            return bad(format!("theta/zeta inconsistent with rho = {}", self.rho));
        }
        if !matches!(self.lambda_sign, -1..=1) {
            return bad(format!("lambda_sign must be -1, 0 or 1, got {}", self.lambda_sign));
        }
        if !self.sigma.is_finite() {
            return bad("sigma must be finite".into());
        }
        if !(self.eps > 0.0) {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if self.times.is_empty() || self.times[0] <= 0.0 || self.times.windows(2).any(|w| w[1] <= w[0]) {
            return bad("times must be positive and strictly increasing".into());
        }
        if self.s_quad_points == 0 || self.max_iters == 0 || !(self.tol > 0.0) {
            return bad("s_quad_points, max_iters and tol must be positive".into());
        }
        Ok(())
    }

    /// `ρ + 1`, the exponent of the weak space.
    pub fn space_exponent(&self) -> f64 {
        self.rho + 1.0
    }
}

/// `K = C_disp · B(1-ζ, 1-ϑρ)` and the smallness quantity `2^ρ ε^{ρ-1} K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionBudget {
    pub k: f64,
    pub budget: f64,
    pub is_contractive: bool,
}

pub fn contraction_budget(params: &SolverParams, c_disp: f64) -> Result<ContractionBudget> {
    let theta_rho = params.theta * params.rho;
    if params.zeta >= 1.0 || theta_rho >= 1.0 {
        return Err(Error::OutsideGlobalRegime { zeta: params.zeta, theta_rho });
    }
    if !(c_disp > 0.0) {
        return Err(Error::InvalidParameter(format!("dispersive constant must be positive, got {c_disp}")));
    }
    let k = c_disp * beta_function(1.0 - params.zeta, 1.0 - theta_rho)?;
    let budget = 2f64.powf(params.rho) * params.eps.powf(params.rho - 1.0) * k;
    Ok(ContractionBudget { k, budget, is_contractive: contractive(budget) })
}

/// Strict smallness condition.
fn contractive(budget: f64) -> bool {
    budget < 1.0
}

/// `ε` for which `2^ρ ε^{ρ-1} K` equals `target`.
pub fn eps_for_budget(rho: f64, k: f64, target: f64) -> f64 {
    (target / (2f64.powf(rho) * k)).powf(1.0 / (rho - 1.0))
}

fn dispersive_cache() -> &'static Mutex<HashMap<u64, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Empirical `sup t^{1/2} ‖G_σ(t) f‖_∞ / ‖f‖_1` over a fixed set of Gaussians
/// and times; cached per `σ`.
pub fn dispersive_constant(sigma: f64) -> Result<f64> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("dispersive constant is measured for sigma >= 0, got {sigma}")));
    }
    if let Some(&c) = dispersive_cache().lock().expect("cache lock").get(&sigma.to_bits()) {
        return Ok(c);
    }
    let grid = Grid::symmetric_with_spacing(80.0, 0.02)?;
    let mut best: f64 = 0.0;
    for width in [0.25, 0.5, 1.0] {
        for centre in [0.0, -2.0] {
            let f = GridFunction::from_real_fn(grid, |x| (-((x - centre) / width).powi(2)).exp());
            let l1 = f.l1_norm();
            for t in [0.25, 1.0, 4.0] {
                let out = delta_propagate(&f, sigma, t, PropagatorMethod::ClosedForm)?.state;
                best = best.max(t.sqrt() * out.sup_norm() / l1);
            }
        }
    }
    dispersive_cache().lock().expect("cache lock").insert(sigma.to_bits(), best);
    Ok(best)
}

/// A solution sampled on the parameter time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<GridFunction>,
    /// Weighted norm of each Picard iterate, starting with the linear one.
    pub weighted_history: Vec<f64>,
    /// Weighted distance between successive iterates.
    pub differences: Vec<f64>,
    /// Ratios of successive differences.
    pub ratios: Vec<f64>,
    pub u0: GridFunction,
    pub budget: Option<ContractionBudget>,
    /// Set when the run was not covered by the contraction estimate.
    pub uncontrolled: bool,
}

impl Trajectory {
    /// `t ↦ G_σ(t) u0` on `times`.
    pub fn linear(u0: &GridFunction, sigma: f64, times: &[f64]) -> Result<Self> {
        let states = parallel_map(times, |&t| evolve(u0, sigma, t))?;
        Ok(Self {
            times: times.to_vec(),
            states,
            weighted_history: Vec::new(),
            differences: Vec::new(),
            ratios: Vec::new(),
            u0: u0.clone(),
            budget: None,
            uncontrolled: false,
        })
    }

    /// `sup_i t_i^ϑ ‖u(t_i)‖_(ρ+1,∞)`.
    pub fn weighted_norm(&self, params: &SolverParams) -> Result<f64> {
        weighted_norm(&self.times, &self.states, params)
    }

    pub fn final_weighted_norm(&self) -> Option<f64> {
        self.weighted_history.last().copied()
    }
}

fn weighted_norm(times: &[f64], states: &[GridFunction], params: &SolverParams) -> Result<f64> {
    let mut best: f64 = 0.0;
    for (t, s) in times.iter().zip(states) {
        best = best.max(t.powf(params.theta) * weak_lp_norm(s, params.space_exponent())?);
    }
    Ok(best)
}

fn weighted_distance(times: &[f64], a: &[GridFunction], b: &[GridFunction], params: &SolverParams) -> Result<f64> {
    let diffs: Vec<GridFunction> = a.iter().zip(b).map(|(x, y)| x.sub(y)).collect::<Result<_>>()?;
    weighted_norm(times, &diffs, params)
}

fn evolve(f: &GridFunction, sigma: f64, t: f64) -> Result<GridFunction> {
    Ok(delta_propagate(f, sigma, t, PropagatorMethod::ClosedForm)?.state)
}

fn parallel_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> Result<R> + Sync) -> Result<Vec<R>> {
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = items.iter().map(|item| scope.spawn(move || f(item))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// `|u|^{ρ-1} u` pointwise.
pub fn power_nonlinearity(u: &GridFunction, rho: f64) -> GridFunction {
    u.map(|z| {
        let r = z.norm();
        if r == 0.0 {
            z
        } else {
            z * r.powf(rho - 1.0)
        }
    })
}

/// `u(s)` from the stored states by linear interpolation of `G_σ(-t)u(t)`,
/// with `u(0) = u0` as the left anchor.
struct Interpolant<'a> {
    anchors: Vec<f64>,
    pulled_back: Vec<GridFunction>,
    sigma: f64,
    direction: f64,
    u0: &'a GridFunction,
}

impl<'a> Interpolant<'a> {
    fn new(traj: &'a Trajectory, sigma: f64, direction: f64) -> Result<Self> {
        let pairs: Vec<(f64, &GridFunction)> = traj.times.iter().copied().zip(traj.states.iter()).collect();
        let mut pulled_back = vec![traj.u0.clone()];
        pulled_back.extend(parallel_map(&pairs, |(t, s)| evolve(s, sigma, -direction * t))?);
        let mut anchors = vec![0.0];
        anchors.extend(&traj.times);
        Ok(Self { anchors, pulled_back, sigma, direction, u0: &traj.u0 })
    }

    fn at(&self, s: f64) -> Result<GridFunction> {
        let last = *self.anchors.last().expect("non-empty");
        if !(0.0..=last).contains(&s) {
            return Err(Error::MissingTimeCoverage(format!("s = {s} outside [0, {last}]")));
        }
        if s == 0.0 {
            return Ok(self.u0.clone());
        }
        let j = self.anchors.partition_point(|&a| a < s).max(1);
        let (a, b) = (self.anchors[j - 1], self.anchors[j]);
        let w = (s - a) / (b - a);
        let v = self.pulled_back[j - 1].scale(C64::new(1.0 - w, 0.0)).axpy(C64::new(w, 0.0), &self.pulled_back[j])?;
        evolve(&v, self.sigma, self.direction * s)
    }
}

/// `𝓝(u)(t) = -iλ ∫_0^t G_σ(t-s) |u(s)|^{ρ-1} u(s) ds` on `params.times`.
///
/// With `s = t w`, the `w`-integral uses Gauss–Jacobi nodes for the weight
/// `(1-w)^{-ζ} w^{-ϑρ}`; `u(s)` between stored times comes from
/// [`Interpolant`]. The result carries `traj.u0` and no iteration history.
pub fn duhamel_nonlinear(traj: &Trajectory, params: &SolverParams) -> Result<Trajectory> {
    duhamel_nonlinear_directed(traj, params, false)
}

/// [`duhamel_nonlinear`] with `G_σ(t-s)` replaced by `G_σ(s-t)` when
/// `reversed` is set, i.e. the Duhamel term of the conjugate equation.
/// Then `conj 𝓝_λ(u) = 𝓝_{-λ}^{rev}(conj u)`.
pub fn duhamel_nonlinear_directed(traj: &Trajectory, params: &SolverParams, reversed: bool) -> Result<Trajectory> {
    params.validate()?;
    check_sigma(params.sigma)?;
    if traj.times != params.times || traj.states.len() != traj.times.len() {
        return Err(Error::MissingTimeCoverage("trajectory is not sampled on the parameter times".into()));
    }
    let grid = *traj.u0.grid();
    if params.lambda_sign == 0 {
        let states = vec![GridFunction::zeros(grid); params.times.len()];
        return Ok(Trajectory { states, ..bare(traj) });
    }
    let direction = if reversed { -1.0 } else { 1.0 };
    let interp = Interpolant::new(traj, params.sigma, direction)?;
    let (alpha, beta) = (-params.zeta, -params.theta * params.rho);
    let rule = quadrature::jacobi(params.s_quad_points, alpha, beta)?;
    // ∫_0^1 g(w) dw = Σ W_k g(w_k) with w = (1+x)/2
    let nodes: Vec<(f64, f64)> = rule
        .iter()
        .map(|(x, om)| ((1.0 + x) / 2.0, 0.5 * om * (1.0 - x).powf(-alpha) * (1.0 + x).powf(-beta)))
        .collect();
    let coeff = C64::new(0.0, -(params.lambda_sign as f64));
    let states = parallel_map(&params.times, |&t| {
        let mut acc = GridFunction::zeros(grid);
        for &(w, weight) in &nodes {
            let s = t * w;
            let f = power_nonlinearity(&interp.at(s)?, params.rho);
            acc = acc.axpy(C64::new(t * weight, 0.0), &evolve(&f, params.sigma, direction * (t - s))?)?;
        }
        Ok(acc.scale(coeff))
    })?;
    Ok(Trajectory { states, ..bare(traj) })
}

fn bare(traj: &Trajectory) -> Trajectory {
    Trajectory {
        times: traj.times.clone(),
        states: Vec::new(),
        weighted_history: Vec::new(),
        differences: Vec::new(),
        ratios: Vec::new(),
        u0: traj.u0.clone(),
        budget: None,
        uncontrolled: false,
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma < 0.0 {
        return Err(Error::InvalidParameter(format!("nonlinear solver is for sigma >= 0, got {sigma}")));
    }
    Ok(())
}

/// Picard iteration `u ↦ G_σ(t)u0 + 𝓝(u)` from the linear evolution.
///
/// Stops when the weighted distance between iterates drops below `tol` or
/// after `max_iters`. Three consecutive ratios above 1 abort the run.
pub fn picard_solve(u0: &GridFunction, params: &SolverParams) -> Result<Trajectory> {
    params.validate()?;
    check_sigma(params.sigma)?;
    let budget = contraction_budget(params, dispersive_constant(params.sigma)?).ok();
    let linear = Trajectory::linear(u0, params.sigma, &params.times)?;
    let mut current = linear.clone();
    let mut history = vec![linear.weighted_norm(params)?];
    let mut differences = Vec::new();
    let mut ratios = Vec::new();
    let mut rising = 0;
    for _ in 0..params.max_iters {
        let n = duhamel_nonlinear(&current, params)?;
        let states: Vec<GridFunction> =
            linear.states.iter().zip(&n.states).map(|(l, d)| l.add(d)).collect::<Result<_>>()?;
        let diff = weighted_distance(&params.times, &states, &current.states, params)?;
        if let Some(&prev) = differences.last() {
            let ratio = if prev > 0.0 { diff / prev } else { 0.0 };
            ratios.push(ratio);
            rising = if ratio > 1.0 { rising + 1 } else { 0 };
            if rising >= 3 {
                return Err(Error::ContractionFailed { iterations: differences.len() + 1, ratio });
            }
        }
        differences.push(diff);
        current.states = states;
        history.push(current.weighted_norm(params)?);
        if diff < params.tol {
            break;
        }
    }
    Ok(Trajectory {
        weighted_history: history,
        differences,
        ratios,
        budget,
        uncontrolled: !budget.is_some_and(|b| b.is_contractive),
        ..current
    })
}

/// Scales `u0` so that its linear evolution has weighted norm `eps`.
pub fn scale_to_data_size(u0: &GridFunction, params: &SolverParams) -> Result<GridFunction> {
    let n = Trajectory::linear(u0, params.sigma, &params.times)?.weighted_norm(params)?;
    if n == 0.0 {
        return Err(Error::InvalidParameter("cannot scale zero data".into()));
    }
    Ok(u0.scale(C64::new(params.eps / n, 0.0)))
}

/// `‖u - G_σ u0 - 𝓝(u)‖` in the weighted norm.
pub fn integral_equation_residual(traj: &Trajectory, params: &SolverParams) -> Result<f64> {
    let linear = Trajectory::linear(&traj.u0, params.sigma, &params.times)?;
    let n = duhamel_nonlinear(traj, params)?;
    let rhs: Vec<GridFunction> = linear.states.iter().zip(&n.states).map(|(l, d)| l.add(d)).collect::<Result<_>>()?;
    weighted_distance(&params.times, &traj.states, &rhs, params)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticDiag {
    pub times: Vec<f64>,
    /// `t^ϑ ‖u(t) - v(t)‖_(ρ+1,∞)`.
    pub nonlinear: Vec<f64>,
    /// `t^ϑ ‖G_σ(t)(u0 - v0)‖_(ρ+1,∞)`.
    pub linear: Vec<f64>,
}

pub fn asymptotic_diag(u: &Trajectory, v: &Trajectory, params: &SolverParams) -> Result<AsymptoticDiag> {
    if u.times != v.times {
        return Err(Error::InvalidParameter("trajectories are sampled on different times".into()));
    }
    let p = params.space_exponent();
    let d0 = u.u0.sub(&v.u0)?;
    let lin = Trajectory::linear(&d0, params.sigma, &u.times)?;
    let mut nonlinear = Vec::with_capacity(u.times.len());
    let mut linear = Vec::with_capacity(u.times.len());
    for (k, &t) in u.times.iter().enumerate() {
        let w = t.powf(params.theta);
        nonlinear.push(w * weak_lp_norm(&u.states[k].sub(&v.states[k])?, p)?);
        linear.push(w * weak_lp_norm(&lin.states[k], p)?);
    }
    Ok(AsymptoticDiag { times: u.times.clone(), nonlinear, linear })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldDiag {
    pub gamma0: f64,
    pub theta: f64,
    pub times: Vec<f64>,
    /// `‖G_σ(t)u0 - γ₀ e^{i(σ²t/4+θ)} Ψ_σ‖` in weak-L^{p′} (`p = 1`: sup norm).
    pub norms: Vec<f64>,
    pub fitted_slope: f64,
    pub slope_stderr: f64,
    /// `-½(2/p - 1)`.
    pub expected_slope: f64,
}

/// Distance of the linear evolution from the periodic orbit through the
/// projection of `u0` on `Ψ_σ`.
///
/// The projection is `⟨u0,Ψ⟩/⟨Ψ,Ψ⟩` in the grid inner product, which equals
/// `⟨u0,Ψ⟩` for the continuum-normalised `Ψ` up to quadrature error.
pub fn orbit_manifold_diag(u0: &GridFunction, sigma: f64, times: &[f64], p: f64) -> Result<ManifoldDiag> {
    if !(sigma < 0.0) {
        return Err(Error::InvalidParameter(format!("periodic orbits need sigma < 0, got {sigma}")));
    }
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p must lie in [1, 2], got {p}")));
    }
    if times.is_empty() || times[0] <= 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("times must be positive and strictly increasing".into()));
    }
    let psi = Eigenfunction::Delta { sigma }.sample(u0.grid());
    let proj = u0.inner(&psi)? / psi.inner(&psi)?;
    let (gamma0, theta) = (proj.norm(), proj.arg());
    let norms = parallel_map(times, |&t| {
        let orbit = psi.scale(C64::from_polar(gamma0, sigma * sigma * t / 4.0 + theta));
        let rest = evolve(u0, sigma, t)?.sub(&orbit)?;
        if p == 1.0 {
            Ok(rest.sup_norm())
        } else {
            weak_lp_norm(&rest, p / (p - 1.0))
        }
    })?;
    let (fitted_slope, slope_stderr) = if norms.len() >= 2 && norms.iter().all(|&v| v > 0.0) {
        let fit = fit_loglog_slope(times, &norms)?;
        (fit.slope, fit.stderr)
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(ManifoldDiag {
        gamma0,
        theta,
        times: times.to_vec(),
        norms,
        fitted_slope,
        slope_stderr,
        expected_slope: -0.5 * (2.0 / p - 1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_examples() {
        let e = exponents(5.0).unwrap();
        assert!((e.theta - 1.0 / 6.0).abs() < 1e-15);
        assert!((e.zeta - 1.0 / 3.0).abs() < 1e-15);
        let e = exponents(3.0).unwrap();
        assert!((e.theta - 3.0 / 8.0).abs() < 1e-15);
        assert!((e.zeta - 0.25).abs() < 1e-15);
        assert!((rho0() - 3.561_552_812_8).abs() < 1e-10);
        assert!(exponents(1.0).is_err());
        let (th, ze) = exponents_exact(Ratio::from_integer(5)).unwrap();
        assert_eq!(th, Ratio::new(1, 6));
        assert_eq!(ze, Ratio::new(1, 3));
    }

    #[test]
    fn beta_examples() {
        assert!((beta_function(1.0, 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((beta_function(2.0, 3.0).unwrap() - 1.0 / 12.0).abs() < 1e-14);
        assert!(beta_function(0.0, 1.0).is_err());
    }

    #[test]
    fn budget_regime() {
        let times = vec![0.1, 1.0];
        let p = SolverParams::new(3.0, 1, 1.0, 0.1, times.clone()).unwrap();
        // ρ = 3 < ρ₀: ϑρ = 9/8 ≥ 1
        assert!(matches!(contraction_budget(&p, 1.0), Err(Error::OutsideGlobalRegime { .. })));
        let mut p = SolverParams::new(5.0, 1, 1.0, 1e-6, times).unwrap();
        let b = contraction_budget(&p, 1.0).unwrap();
        assert!(b.is_contractive);
        assert!(!contractive(1.0));
        p.eps = 10.0 * eps_for_budget(5.0, b.k, 1.0);
        assert!(!contraction_budget(&p, 1.0).unwrap().is_contractive);
    }
}
