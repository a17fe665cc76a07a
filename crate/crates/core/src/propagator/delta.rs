//! The δ interaction: closed form, kernel quadrature and spectral synthesis.

use num_complex::Complex64 as C64;

use super::kernel::{table_minus, table_plus};
use super::{evolve_with_kinks_removed, free_propagate, with_time_reversal, Propagated, PropagatorMethod};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::quadrature;
use crate::spectral::{generalized_fourier, lambda_nodes, scattering, Eigenfunction, PointInteraction};

/// `ρ_σ`: `-(σ/2) e^{σx/2} χ₋` for `σ >= 0`, `(σ/2) e^{σx/2} χ₊` for `σ < 0`,
/// sampled with half weight at the origin.
pub fn rho_kernel(sigma: f64, grid: &Grid) -> GridFunction {
    GridFunction::from_real_fn(*grid, |x| {
        let side = if x == 0.0 {
            0.5
        } else if (sigma >= 0.0 && x < 0.0) || (sigma < 0.0 && x > 0.0) {
            1.0
        } else {
            0.0
        };
        if side == 0.0 {
            return 0.0;
        }
        let v = (sigma / 2.0) * (sigma * x / 2.0).exp();
        side * if sigma >= 0.0 { -v } else { v }
    })
}

pub fn delta_propagate(f: &GridFunction, sigma: f64, t: f64, method: PropagatorMethod) -> Result<Propagated> {
    if !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("sigma must be finite, got {sigma}")));
    }
    if sigma == 0.0 {
        if method == PropagatorMethod::KernelQuadrature && t == 0.0 {
            return Err(Error::ZeroTime);
        }
        return Ok(free_propagate(f, t));
    }
    let state = match method {
        PropagatorMethod::ClosedForm => closed_form(f, sigma, t)?,
        PropagatorMethod::KernelQuadrature => with_time_reversal(f, t, |g, s| kernel_quadrature(g, sigma, s))?,
        PropagatorMethod::SpectralQuadrature => spectral(f, sigma, t)?,
    };
    Ok(Propagated::new(state, f))
}

/// Padding beyond the input grid: `e^{-|σ|W/2}` is about `e^{-30}` at `W = 60/|σ|`.
const TAIL_LENGTH: f64 = 60.0;
const MAX_PADDED_HALF: usize = 1 << 20;

/// For `f = φ⁻ + Rφ⁺` the closed form collapses to
/// `e^{itΔ} f + B(|x|)` with `B = e^{itΔ}((φ⁻ + φ⁺) ∗ ρ_σ)`, plus the
/// projection term when `σ < 0`.
///
/// `φ = φ⁻ + φ⁺` equals `f(x) + f(-x)` on `x <= 0` and is smooth there, so
/// `φ ∗ ρ_σ` is a one-sided exponentially weighted running integral of a
/// smooth function; it is accumulated cell by cell with cubic interpolation.
/// Both free evolutions run on the same zero-padded grid.
fn closed_form(f: &GridFunction, sigma: f64, t: f64) -> Result<GridFunction> {
    if t == 0.0 {
        return Ok(f.clone());
    }
    let grid = *f.grid();
    if !grid.is_symmetric() || !grid.contains_node(0.0) {
        return Err(Error::InvalidGrid("closed form needs a symmetric grid with a node at 0".into()));
    }
    let h = grid.spacing();
    let half = (grid.n() - 1) / 2;
    let tail = ((TAIL_LENGTH / sigma.abs()) / h).ceil() as usize;
    let wide_half = (half + tail.max(half)).min(MAX_PADDED_HALF.max(half));
    let wide = Grid::new(-(wide_half as f64) * h, wide_half as f64 * h, 2 * wide_half + 1)?;
    let embed = |v: &[C64]| {
        let mut out = vec![C64::new(0.0, 0.0); wide.n()];
        out[wide_half - half..wide_half + half + 1].copy_from_slice(v);
        out
    };
    let fv = f.values();
    // φ on x <= 0 of the wide grid, index k <-> x = (k - wide_half) h
    let mut phi = vec![C64::new(0.0, 0.0); wide_half + 1];
    for j in 0..=half {
        phi[wide_half - j] = fv[half - j] + fv[half + j];
    }
    let conv = exp_running_integral(&phi, sigma, h)?;
    let mut conv_full = vec![C64::new(0.0, 0.0); wide.n()];
    conv_full[..=wide_half].copy_from_slice(&conv);
    if sigma < 0.0 {
        let at0 = conv[wide_half];
        for k in 1..=wide_half {
            conv_full[wide_half + k] = at0 * (sigma * k as f64 * h / 2.0).exp();
        }
    }
    let b = free_propagate(&GridFunction::new(wide, conv_full)?, t).state;
    let free = free_propagate(&GridFunction::new(wide, embed(fv))?, t).state;
    let values: Vec<C64> = (0..grid.n())
        .map(|i| {
            let k = i.abs_diff(half);
            free.values()[wide_half - half + i] + b.values()[wide_half + k]
        })
        .collect();
    let mut out = GridFunction::new(grid, values)?;
    if sigma < 0.0 {
        out = out.add(&projection_term(f, sigma, t)?)?;
    }
    Ok(out)
}

/// `(φ ∗ ρ_σ)(x)` at the nodes `x_k = (k - K) h <= 0` for `φ` given on those nodes.
///
/// `σ > 0`: `-(σ/2) ∫_x^0 φ(y) e^{σ(x-y)/2} dy`, accumulated from `0` leftwards.
/// `σ < 0`: `(σ/2) ∫_{-∞}^x φ(y) e^{σ(x-y)/2} dy`, accumulated rightwards.
fn exp_running_integral(phi: &[C64], sigma: f64, h: f64) -> Result<Vec<C64>> {
    let n = phi.len();
    let mut out = vec![C64::new(0.0, 0.0); n];
    if n < 4 {
        return Err(Error::InvalidGrid("closed form needs at least 7 grid points".into()));
    }
    let rule = quadrature::legendre(6)?;
    // weights of φ at stencil nodes s..s+3 for the cell [c, c+1], integrand
    // e^{σ(x_end - y)/2} where x_end is the end the recursion moves towards
    let cell_weights = |cell: usize, towards_left: bool| -> (usize, [f64; 4]) {
        let s = cell.saturating_sub(1).min(n - 4);
        let mut w = [0.0; 4];
        for (u, wu) in rule.iter() {
            let y = cell as f64 + 0.5 + 0.5 * u; // in units of h
            let end = if towards_left { cell as f64 } else { cell as f64 + 1.0 };
            let e = (sigma * (end - y) * h / 2.0).exp() * 0.5 * wu * h;
            for (j, wj) in w.iter_mut().enumerate() {
                let mut l = 1.0;
                for m in 0..4 {
                    if m != j {
                        l *= (y - (s + m) as f64) / (j as f64 - m as f64);
                    }
                }
                *wj += l * e;
            }
        }
        (s, w)
    };
    let decay = (-sigma.abs() * h / 2.0).exp();
    if sigma > 0.0 {
        let mut acc = C64::new(0.0, 0.0);
        for cell in (0..n - 1).rev() {
            let (s, w) = cell_weights(cell, true);
            let piece: C64 = (0..4).map(|j| phi[s + j] * w[j]).sum();
            acc = decay * acc + piece;
            out[cell] = -(sigma / 2.0) * acc;
        }
    } else {
        let mut acc = C64::new(0.0, 0.0);
        for cell in 0..n - 1 {
            let (s, w) = cell_weights(cell, false);
            let piece: C64 = (0..4).map(|j| phi[s + j] * w[j]).sum();
            acc = decay * acc + piece;
            out[cell + 1] = (sigma / 2.0) * acc;
        }
    }
    Ok(out)
}

fn projection_term(f: &GridFunction, sigma: f64, t: f64) -> Result<GridFunction> {
    let psi = Eigenfunction::Delta { sigma }.sample(f.grid());
    let c = f.inner(&psi)? / psi.inner(&psi)? * C64::from_polar(1.0, sigma * sigma * t / 4.0);
    Ok(psi.scale(c))
}

/// `∫ S_σ(x,y,t) f(y) dy` with `S_σ(x,y,t) = S(x-y,t) + K(|x|+|y|)`, where
/// `K(z) = -(σ/2) I₊(σ/2, z)` for `σ > 0` and `K(z) = (σ/2) I₋(-σ/2, z)` for
/// `σ < 0` (plus the bound-state term).
fn kernel_quadrature(f: &GridFunction, sigma: f64, t: f64) -> Result<GridFunction> {
    let table = perturbation_table(sigma, t, f.grid())?;
    if sigma >= 0.0 {
        return free_propagate(f, t).state.add(&apply_radial(f, &table, false)?);
    }
    evolve_with_kinks_removed(&PointInteraction::Delta { sigma }, f, t, |g| {
        free_propagate(g, t).state.add(&apply_radial(g, &table, false)?)?.add(&projection_term(g, sigma, t)?)
    })
}

/// `K(z_k)` on `z_k = k h` up to the largest `|x| + |y|` on the grid.
fn perturbation_table(sigma: f64, t: f64, grid: &Grid) -> Result<Vec<C64>> {
    let h = grid.spacing();
    let m = ((grid.x_max().abs().max(grid.x_min().abs()) * 2.0) / h).ceil() as usize + 2;
    if sigma > 0.0 {
        let c = sigma / 2.0;
        Ok(table_plus(c, t, h, m)?.into_iter().map(|v| -c * v).collect())
    } else {
        let d = -sigma / 2.0;
        Ok(table_minus(d, t, h, m)?.into_iter().map(|v| -d * v).collect())
    }
}

/// `Σ_j w_j K(|x_i| + |y_j|) s_{ij} f(y_j)` with `s_{ij} = sgn(x_i y_j)` when `odd`.
pub(crate) fn apply_radial(f: &GridFunction, table: &[C64], odd: bool) -> Result<GridFunction> {
    let grid = f.grid();
    let h = grid.spacing();
    let w = grid.weights();
    let cut = f.sup_norm() * 1e-16;
    let support: Vec<usize> = (0..grid.n()).filter(|&j| f.values()[j].norm() > cut).collect();
    let idx = |x: f64| (x.abs() / h).round() as usize;
    let values: Vec<C64> = (0..grid.n())
        .map(|i| {
            let xi = grid.x(i);
            let ki = idx(xi);
            let mut acc = C64::new(0.0, 0.0);
            for &j in &support {
                let yj = grid.x(j);
                let s = if odd { (xi * yj).signum() * ((xi != 0.0 && yj != 0.0) as i32 as f64) } else { 1.0 };
                if s != 0.0 {
                    acc += table[ki + idx(yj)] * (f.values()[j] * (w[j] * s));
                }
            }
            acc
        })
        .collect();
    GridFunction::new(*grid, values)
}

/// Spectral synthesis: bound-state term plus
/// `∫ e^{-iλ²t} 𝓕f(λ) ψ_λ(x) dλ / √(2π)` on a truncated composite
/// Gauss–Legendre λ-grid.
fn spectral(f: &GridFunction, sigma: f64, t: f64) -> Result<GridFunction> {
    if sigma < 0.0 {
        evolve_with_kinks_removed(&PointInteraction::Delta { sigma }, f, t, |g| spectral_sum(g, sigma, t))
    } else {
        spectral_sum(f, sigma, t)
    }
}

fn spectral_sum(f: &GridFunction, sigma: f64, t: f64) -> Result<GridFunction> {
    let grid = *f.grid();
    let lambda_max = spectral_cutoff(f, sigma);
    let reach = grid.x_max().abs().max(grid.x_min().abs());
    let centre_spread = support_extent(f);
    // phase rate in λ: |x| + |y| + 2|t|λ
    let rate = reach + centre_spread + 2.0 * t.abs() * lambda_max + 1.0;
    let panels = ((2.0 * lambda_max * rate) / 6.0).ceil() as usize;
    let nodes = lambda_nodes(lambda_max, panels.max(8), 16)?;
    let lams: Vec<f64> = nodes.iter().map(|p| p.0).collect();
    let tr = generalized_fourier(f, sigma, &lams);
    let norm = (2.0 * std::f64::consts::PI).sqrt().recip();
    let mut acc = vec![C64::new(0.0, 0.0); grid.n()];
    let x0 = grid.x_min();
    let h = grid.spacing();
    for (k, &(lam, w)) in nodes.iter().enumerate() {
        let amp = tr.values[k] * C64::from_polar(w * norm, -lam * lam * t);
        if amp.norm() == 0.0 {
            continue;
        }
        let s = scattering(sigma, lam.abs())?;
        let dir = lam.signum();
        // e^{±iλx} by rotation along the grid
        let step = C64::from_polar(1.0, dir * lam.abs() * h);
        let mut plus = C64::from_polar(1.0, dir * lam.abs() * x0);
        let mut minus = plus.conj();
        let step_c = step.conj();
        for (i, slot) in acc.iter_mut().enumerate() {
            let x = grid.x(i);
            let incoming = if dir > 0.0 { x <= 0.0 } else { x >= 0.0 };
            let psi = if incoming { plus + s.r_coeff * minus } else { s.t_coeff * plus };
            *slot += amp * psi;
            plus *= step;
            minus *= step_c;
        }
    }
    let mut out = GridFunction::new(grid, acc)?;
    if sigma < 0.0 {
        out = out.add(&projection_term(f, sigma, t)?)?;
    }
    Ok(out)
}

/// Smallest `Λ` beyond which `|𝓕f(λ)|` stays below `1e-12` of its peak.
fn spectral_cutoff(f: &GridFunction, sigma: f64) -> f64 {
    let nyquist = std::f64::consts::PI / f.grid().spacing();
    let probe: Vec<f64> = (1..=400).map(|k| k as f64 * nyquist / 400.0).flat_map(|l| [l, -l]).collect();
    let tr = generalized_fourier(f, sigma, &probe);
    let peak = tr.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut last = probe[0].abs();
    for (l, v) in probe.iter().zip(&tr.values) {
        if v.norm() > 1e-12 * peak {
            last = last.max(l.abs());
        }
    }
    (last + 2.0 * nyquist / 400.0).min(nyquist)
}

fn support_extent(f: &GridFunction) -> f64 {
    let cut = f.sup_norm() * 1e-14;
    let grid = f.grid();
    (0..grid.n())
        .filter(|&i| f.values()[i].norm() > cut)
        .map(|i| grid.x(i).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_transform_is_reflection_coefficient() {
        for sigma in [1.5, -1.0] {
            let g = Grid::symmetric_with_spacing(80.0, 0.005).unwrap();
            let rho = rho_kernel(sigma, &g);
            for lam in [-3.0, -0.7, 0.4, 2.0, 5.0] {
                let hat = rho.map_indexed(|x, v| v * C64::from_polar(1.0, -lam * x)).integrate();
                let r = scattering(sigma, lam).unwrap().r_coeff;
                assert!((hat - r).norm() < 1e-5, "sigma={sigma} lam={lam}: {hat} vs {r}");
                assert!((1.0 + hat - scattering(sigma, lam).unwrap().t_coeff).norm() < 1e-5);
            }
        }
    }

    #[test]
    fn zero_coupling_is_free() {
        let g = Grid::symmetric(20.0, 2001).unwrap();
        let f = GridFunction::from_real_fn(g, |x| (-(x + 1.0).powi(2)).exp());
        let a = delta_propagate(&f, 0.0, 0.4, PropagatorMethod::ClosedForm).unwrap().state;
        let b = super::super::free_propagate(&f, 0.4).state;
        assert!(a.sub(&b).unwrap().sup_norm() < 1e-10);
        assert_eq!(
            delta_propagate(&f, 1.0, 0.0, PropagatorMethod::KernelQuadrature).map(|_| ()),
            Err(Error::ZeroTime)
        );
    }
}
