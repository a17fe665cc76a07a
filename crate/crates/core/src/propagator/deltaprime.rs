//! The δ′ interaction by kernel quadrature.
//!
//! The kernel is `S(x-y) + sgn(xy) P(|x|+|y|)` where `P` is the free evolution
//! of the reflection coefficient `R(λ) = iβλ/(iβλ - 2)`:
//! `P(z) = S(z) - c I₊(c, z)` with `c = 2/β` when `β > 0`, and
//! `P(z) = S(z) - d I₋(d, z)` with `d = -2/β` when `β < 0`, the latter plus
//! the bound-state term `e^{4it/β²} Φ_β(x) Φ_β(y)`.
//!
//! Data that jump at the origin are split as `g + J Θ_μ` with
//! `Θ_μ = sgn(x) e^{-μ|x|}` and `g` continuous. The grid quadrature handles
//! `g`; `Θ_μ` is evolved in closed form through the `I±` integrals.

use num_complex::Complex64 as C64;

use super::delta::apply_radial;
use super::kernel::{exp_weighted_free_integral, free_kernel, minus_at_sorted, table_minus, table_plus};
use super::{free_propagate, with_time_reversal, Propagated};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::spectral::Eigenfunction;

pub fn deltaprime_propagate(f: &GridFunction, beta: f64, t: f64) -> Result<Propagated> {
    if !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be finite, got {beta}")));
    }
    if t == 0.0 {
        return Err(Error::ZeroTime);
    }
    if beta == 0.0 {
        return Ok(free_propagate(f, t));
    }
    let state = with_time_reversal(f, t, |g, s| forward(g, beta, s))?;
    Ok(Propagated::new(state, f))
}

fn forward(f: &GridFunction, beta: f64, t: f64) -> Result<GridFunction> {
    let mu = profile_rate(beta);
    match split_jump(f, mu)? {
        Some((g, jump)) => forward_continuous(&g, beta, t)?.axpy(jump, &profile_evolution(f.grid(), beta, mu, t)?),
        None => forward_continuous(f, beta, t),
    }
}

/// Decay rate of the jump profile, kept away from the pole at `2/β`.
fn profile_rate(beta: f64) -> f64 {
    if beta > 0.0 && (2.0 / beta - 1.0).abs() < 0.5 {
        2.0
    } else {
        1.0
    }
}

fn profile(x: f64, mu: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * (-mu * x.abs()).exp()
    }
}

/// `(g, J)` with `f = g + J Θ_μ` and `g` continuous at the origin, or `None`
/// when the grid has no node at 0 or the jump is negligible.
fn split_jump(f: &GridFunction, mu: f64) -> Result<Option<(GridFunction, C64)>> {
    let grid = f.grid();
    let Some(c) = grid.node_index(0.0) else { return Ok(None) };
    if c < 4 || c + 4 >= grid.n() {
        return Ok(None);
    }
    let v = f.values();
    let left = 4.0 * v[c - 1] - 6.0 * v[c - 2] + 4.0 * v[c - 3] - v[c - 4];
    let right = 4.0 * v[c + 1] - 6.0 * v[c + 2] + 4.0 * v[c + 3] - v[c + 4];
    let jump = 0.5 * (right - left);
    if jump.norm() <= 1e-10 * f.sup_norm() {
        return Ok(None);
    }
    let mut g = f.map_indexed(|x, z| z - jump * profile(x, mu));
    g.values_mut()[c] = 0.5 * (left + right);
    Ok(Some((g, jump)))
}

/// `e^{-itH} Θ_μ` on the grid nodes, `t > 0`.
///
/// For `x > 0` the free part is `I₋(μ,x) - I₊(μ,x)` and the reflected part is
/// `2∫_0^∞ P(x+y) e^{-μy} dy`, which reduces to
/// `2[I₊(μ) - c(I₊(μ) - I₊(c))/(c-μ)]` for `β > 0` and
/// `2[I₊(μ) - d(I₋(d) + I₊(μ))/(d+μ)]` for `β < 0`.
fn profile_evolution(grid: &Grid, beta: f64, mu: f64, t: f64) -> Result<GridFunction> {
    let h = grid.spacing();
    let m = (grid.x_min().abs().max(grid.x_max().abs()) / h).round() as usize;
    let xs: Vec<f64> = (1..=m).map(|k| k as f64 * h).collect();
    let plus = |c: f64| -> Result<Vec<C64>> { xs.iter().map(|&x| exp_weighted_free_integral(c, x, t)).collect() };
    let plus_mu = plus(mu)?;
    let minus_mu = minus_at_sorted(mu, t, &xs)?;
    let reflected: Vec<C64> = if beta > 0.0 {
        let c = 2.0 / beta;
        let plus_c = plus(c)?;
        plus_mu.iter().zip(&plus_c).map(|(&p, &q)| 2.0 * (p - c * (p - q) / (c - mu))).collect()
    } else {
        let d = -2.0 / beta;
        let minus_d = minus_at_sorted(d, t, &xs)?;
        plus_mu.iter().zip(&minus_d).map(|(&p, &q)| 2.0 * (p - d * (q + p) / (d + mu))).collect()
    };
    let half: Vec<C64> = (0..m).map(|k| minus_mu[k] - plus_mu[k] + reflected[k]).collect();
    let mut out = GridFunction::from_fn(*grid, |x| {
        let k = (x.abs() / h).round() as usize;
        if k == 0 { C64::new(0.0, 0.0) } else { x.signum() * half[k - 1] }
    });
    if beta < 0.0 {
        let d = -2.0 / beta;
        let phi = Eigenfunction::DeltaPrime { beta }.sample(grid);
        let c = 2.0 * d.sqrt() / (d + mu) * C64::from_polar(1.0, 4.0 * t / (beta * beta));
        out = out.axpy(c, &phi)?;
    }
    Ok(out)
}

/// `⟨f,φ⟩/⟨φ,φ⟩`, integrating across the jump of `φ` at the origin when
/// there is a node there.
fn projection(f: &GridFunction, phi: &GridFunction) -> Result<C64> {
    if f.grid().node_index(0.0).is_some_and(|c| c >= 4 && c + 4 < f.grid().n()) {
        Ok(f.inner_with_jump(phi, 0.0)? / phi.inner_with_jump(phi, 0.0)?)
    } else {
        Ok(f.inner(phi)? / phi.inner(phi)?)
    }
}

fn forward_continuous(f: &GridFunction, beta: f64, t: f64) -> Result<GridFunction> {
    let grid = f.grid();
    let h = grid.spacing();
    let m = ((grid.x_max().abs().max(grid.x_min().abs()) * 2.0) / h).ceil() as usize + 2;
    let table: Vec<C64> = if beta > 0.0 {
        let c = 2.0 / beta;
        table_plus(c, t, h, m)?
            .into_iter()
            .enumerate()
            .map(|(k, v)| free_kernel(k as f64 * h, t) - c * v)
            .collect()
    } else {
        let d = -2.0 / beta;
        table_minus(d, t, h, m)?
            .into_iter()
            .enumerate()
            .map(|(k, v)| free_kernel(k as f64 * h, t) - d * v)
            .collect()
    };
    let mut out = free_propagate(f, t).state.add(&apply_radial(f, &table, true)?)?;
    if beta < 0.0 {
        let phi = Eigenfunction::DeltaPrime { beta }.sample(grid);
        let c = projection(f, &phi)? * C64::from_polar(1.0, 4.0 * t / (beta * beta));
        out = out.axpy(c, &phi)?;
    }
    Ok(out)
}
