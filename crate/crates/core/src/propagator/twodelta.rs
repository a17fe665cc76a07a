//! The two-δ interaction `α(δ(x+a) + δ(x-a))`.
//!
//! With `y₁ = -a`, `y₂ = a` and `g_j(ξ) = ∫ e^{iξ|y-y_j|} f(y) dy`, the
//! continuous part of `e^{-itH} f` is
//!
//! ```text
//! e^{itΔ} f(x) + (1/2πi) ∫ e^{-itξ²} Σ_i e^{iξ|x-y_i|} H_i(ξ) dξ,
//! H_i = Σ_j C_ij g_j / D,   D(ξ) = (2ξ+iα)² + α² e^{4iξa},
//! C_11 = C_22 = α(2ξ+iα),   C_12 = C_21 = -iα² e^{2iξa}.
//! ```
//!
//! The same `α` is used for both signs; for `α < 0` the bound-state terms
//! `e^{-iγ_j t} ⟨f, Γ_j⟩ Γ_j` are added.
//!
//! [`twodelta_propagate`] evaluates the ξ-integral on the FFT frequency grid of
//! the spatial grid, splitting `|x - y_i|` by region so that every piece is a
//! plain DFT. [`twodelta_pointwise`] evaluates it at individual nodes with a
//! truncated Filon rule and serves as an independent check.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::kernel::{exp_weighted_free_integral, minus_at_sorted};
use super::{bound_state_term, evolve_with_kinks_removed, free_propagate, with_time_reversal, Propagated};
use crate::error::{Error, Result};
use crate::grid::{angular_frequencies, fft_forward, fft_inverse, GridFunction};
use crate::quadrature;
use crate::spectral::{bound_states, lambert_w0, PointInteraction};

fn check(alpha: f64, a: f64) -> Result<PointInteraction> {
    let pi = PointInteraction::TwoDelta { alpha, a };
    pi.validate()?;
    Ok(pi)
}

pub fn twodelta_propagate(f: &GridFunction, alpha: f64, a: f64, t: f64) -> Result<Propagated> {
    let pi = check(alpha, a)?;
    if t == 0.0 {
        return Err(Error::ZeroTime);
    }
    let state = evolve_with_kinks_removed(&pi, f, t, |g| {
        let cont = with_time_reversal(g, t, |h, s| continuous_fft(h, alpha, a, s))?;
        if alpha < 0.0 {
            cont.add(&bound_state_term(&pi, g, t)?)
        } else {
            Ok(cont)
        }
    })?;
    Ok(Propagated::new(state, f))
}

/// Support of `f` as `(y, w_y f(y))` pairs.
fn weighted_support(f: &GridFunction) -> Vec<(f64, C64)> {
    let grid = f.grid();
    let w = grid.weights();
    let cut = f.sup_norm() * 1e-16;
    (0..grid.n())
        .filter(|&j| f.values()[j].norm() > cut)
        .map(|j| (grid.x(j), f.values()[j] * w[j]))
        .collect()
}

/// `H_1, H_2` and their ingredients for one input function.
struct Amplitude {
    support: Vec<(f64, C64)>,
    alpha: f64,
    a: f64,
}

impl Amplitude {
    fn new(f: &GridFunction, alpha: f64, a: f64) -> Self {
        Self { support: weighted_support(f), alpha, a }
    }

    fn g(&self, xi: C64) -> (C64, C64) {
        let i = C64::new(0.0, 1.0);
        let mut g1 = C64::new(0.0, 0.0);
        let mut g2 = C64::new(0.0, 0.0);
        for &(y, fw) in &self.support {
            g1 += fw * (i * xi * (y + self.a).abs()).exp();
            g2 += fw * (i * xi * (y - self.a).abs()).exp();
        }
        (g1, g2)
    }

    fn g_real(&self, xi: f64) -> (C64, C64) {
        let mut g1 = C64::new(0.0, 0.0);
        let mut g2 = C64::new(0.0, 0.0);
        for &(y, fw) in &self.support {
            g1 += fw * C64::from_polar(1.0, xi * (y + self.a).abs());
            g2 += fw * C64::from_polar(1.0, xi * (y - self.a).abs());
        }
        (g1, g2)
    }

    fn numerators(&self, xi: C64, g: (C64, C64)) -> (C64, C64) {
        let i = C64::new(0.0, 1.0);
        let al = self.alpha;
        let diag = al * (2.0 * xi + i * al);
        let off = -i * al * al * (2.0 * i * xi * self.a).exp();
        (diag * g.0 + off * g.1, off * g.0 + diag * g.1)
    }

    fn denominator(&self, xi: C64) -> C64 {
        let i = C64::new(0.0, 1.0);
        let al = self.alpha;
        (2.0 * xi + i * al).powi(2) + al * al * (4.0 * i * xi * self.a).exp()
    }

    fn denominator_prime(&self, xi: C64) -> C64 {
        let i = C64::new(0.0, 1.0);
        let al = self.alpha;
        4.0 * (2.0 * xi + i * al) + 4.0 * i * self.a * al * al * (4.0 * i * xi * self.a).exp()
    }

    /// `H_i(ξ)` on the real line; at `ξ = 0`, where numerator and denominator
    /// both vanish, the limit is taken analytically.
    fn h(&self, xi: f64) -> (C64, C64) {
        if xi == 0.0 {
            return self.h_at_zero();
        }
        let z = C64::new(xi, 0.0);
        let (n1, n2) = self.numerators(z, self.g_real(xi));
        let d = self.denominator(z);
        (n1 / d, n2 / d)
    }

    fn h_at_zero(&self) -> (C64, C64) {
        let i = C64::new(0.0, 1.0);
        let mut g0 = C64::new(0.0, 0.0);
        let mut dg1 = C64::new(0.0, 0.0);
        let mut dg2 = C64::new(0.0, 0.0);
        for &(y, fw) in &self.support {
            g0 += fw;
            dg1 += i * (y + self.a).abs() * fw;
            dg2 += i * (y - self.a).abs() * fw;
        }
        let (al, a) = (self.alpha, self.a);
        let shift = al * (dg1 - dg2) / (4.0 * (1.0 + a * al));
        (g0 / (2.0 * i) + shift, g0 / (2.0 * i) - shift)
    }

    /// Zeros of `D` on the imaginary axis that sit close to the real line:
    /// `ξ = -iκ` for `α > 0` (when `aα e^{aα} <= 1/e`) and the bound states
    /// `ξ = iκ_j` for `α < 0`. Returned with the residues of `H_1, H_2`.
    fn axis_poles(&self, pi: &PointInteraction) -> Result<Vec<AxisPole>> {
        let (al, a) = (self.alpha, self.a);
        let mut kappas = Vec::new();
        if al > 0.0 {
            let q = a * al * (a * al).exp();
            if q <= (-1.0f64).exp() {
                let s = -lambert_w0(-q)? / a;
                kappas.push(-(s + al) / 2.0);
            }
        } else {
            for st in bound_states(pi)? {
                kappas.push((-st.gamma).sqrt());
            }
        }
        let mut out = Vec::with_capacity(kappas.len());
        for signed in kappas {
            let xi = C64::new(0.0, signed);
            let (n1, n2) = self.numerators(xi, self.g(xi));
            let dp = self.denominator_prime(xi);
            out.push(AxisPole { kappa: signed.abs(), upper: signed > 0.0, residues: (n1 / dp, n2 / dp) });
        }
        Ok(out)
    }
}

/// A zero of `D` at `ξ = ±iκ`. It is removed from the sampled integrand as
/// `R (1/(ξ ∓ iκ) - 1/(ξ ∓ iμ))` with a companion `μ = κ + 1`, which decays like
/// `ξ^{-2}` so the band truncation stays harmless; both pieces are integrated
/// exactly as `±R I_∓(·, d)`.
struct AxisPole {
    kappa: f64,
    upper: bool,
    residues: (C64, C64),
}

impl AxisPole {
    fn companion(&self) -> f64 {
        self.kappa + 1.0
    }

    fn at(&self, xi: f64) -> (C64, C64) {
        let sign = if self.upper { 1.0 } else { -1.0 };
        let shape = C64::new(xi, -sign * self.kappa).inv() - C64::new(xi, -sign * self.companion()).inv();
        (self.residues.0 * shape, self.residues.1 * shape)
    }

    /// `(1/2πi) ∫ e^{-itξ²+iξd} shape(ξ) dξ` at each `d >= 0`.
    fn exact(&self, t: f64, ds: &[f64]) -> Result<Vec<C64>> {
        let (near, far) = if self.upper {
            (minus_unsorted(self.kappa, t, ds)?, minus_unsorted(self.companion(), t, ds)?)
        } else {
            (plus_all(self.kappa, t, ds)?, plus_all(self.companion(), t, ds)?)
        };
        let sign = if self.upper { 1.0 } else { -1.0 };
        Ok(near.into_iter().zip(far).map(|(a, b)| sign * (a - b)).collect())
    }
}

/// Frequency spacing for the FFT path: a fraction of the distance from the
/// real line to the nearest resonance, estimated from `|2ξ+iα| = |α| e^{-2a Im ξ}`
/// at `Re ξ = π/(2a)`.
fn target_dxi(alpha: f64, a: f64) -> f64 {
    let r = PI / (a * alpha.abs());
    let resonance = (1.0 + r * r).ln() / (4.0 * a);
    resonance.min(1.0 / (2.0 * a)) / 6.0
}

const MAX_FFT_LEN: usize = 1 << 22;

fn continuous_fft(f: &GridFunction, alpha: f64, a: f64, t: f64) -> Result<GridFunction> {
    let pi = PointInteraction::TwoDelta { alpha, a };
    let grid = *f.grid();
    let n = grid.n();
    let h = grid.spacing();
    let x0 = grid.x_min();
    let amp = Amplitude::new(f, alpha, a);
    let poles = amp.axis_poles(&pi)?;

    let wanted = (2.0 * PI / (h * target_dxi(alpha, a))).ceil() as usize;
    let m = wanted.max(4 * n).next_power_of_two().min(MAX_FFT_LEN.max(n.next_power_of_two()));
    let xis = angular_frequencies(m, h);
    let dxi = 2.0 * PI / (m as f64 * h);
    let hs: Vec<(C64, C64)> = xis
        .iter()
        .map(|&xi| {
            let mut v = amp.h(xi);
            for p in &poles {
                let q = p.at(xi);
                v.0 -= q.0;
                v.1 -= q.1;
            }
            v
        })
        .collect();

    let prefactor = dxi / C64::new(0.0, 2.0 * PI);
    let mut out = free_propagate(f, t).state.into_values();
    for (which, yi) in [(0usize, -a), (1usize, a)] {
        let mut plus = vec![C64::new(0.0, 0.0); m];
        let mut minus = vec![C64::new(0.0, 0.0); m];
        for (j, &xi) in xis.iter().enumerate() {
            let hv = if which == 0 { hs[j].0 } else { hs[j].1 };
            let base = hv * C64::from_polar(1.0, -t * xi * xi);
            plus[j] = base * C64::from_polar(1.0, xi * (x0 - yi));
            minus[j] = base * C64::from_polar(1.0, -xi * (x0 - yi));
        }
        fft_inverse(&mut plus);
        fft_forward(&mut minus);
        for (k, slot) in out.iter_mut().enumerate() {
            let v = if grid.x(k) >= yi { plus[k] } else { minus[k] };
            *slot += prefactor * v;
        }
        // removed poles, added back exactly as functions of d = |x - y_i|
        let ds: Vec<f64> = (0..n).map(|k| (grid.x(k) - yi).abs()).collect();
        for p in &poles {
            let r = if which == 0 { p.residues.0 } else { p.residues.1 };
            for (slot, v) in out.iter_mut().zip(p.exact(t, &ds)?) {
                *slot += r * v;
            }
        }
    }
    GridFunction::new(grid, out)
}

fn plus_all(kappa: f64, t: f64, ds: &[f64]) -> Result<Vec<C64>> {
    ds.iter().map(|&d| exp_weighted_free_integral(kappa, d, t)).collect()
}

fn minus_unsorted(kappa: f64, t: f64, ds: &[f64]) -> Result<Vec<C64>> {
    let mut order: Vec<usize> = (0..ds.len()).collect();
    order.sort_by(|&i, &j| ds[i].total_cmp(&ds[j]));
    let sorted: Vec<f64> = order.iter().map(|&i| ds[i]).collect();
    let vals = minus_at_sorted(kappa, t, &sorted)?;
    let mut out = vec![C64::new(0.0, 0.0); ds.len()];
    for (v, &i) in vals.into_iter().zip(&order) {
        out[i] = v;
    }
    Ok(out)
}

/// Controls for [`twodelta_pointwise`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointwiseOptions {
    /// Target size of the discarded tail `|ξ| > Λ`.
    pub tail_tol: f64,
    /// Nodes per Filon panel.
    pub order: usize,
}

impl Default for PointwiseOptions {
    fn default() -> Self {
        Self { tail_tol: 1e-7, order: 8 }
    }
}

/// `e^{-itH} f` at the grid nodes `indices` (`t > 0`), with the ξ-integral
/// truncated at `Λ` and done by a Filon rule that integrates the linear part
/// of the phase `-tξ² + ξ|x - y_i|` exactly on each panel.
///
/// `Λ` is doubled until the tail estimate
/// `Σ_± |H(±Λ)| / (2π (2tΛ - X))`, with `|D| >= (2|ξ| - |α|)² - α²`
/// bounding the amplitude, falls below `tail_tol`.
pub fn twodelta_pointwise(
    f: &GridFunction,
    alpha: f64,
    a: f64,
    t: f64,
    indices: &[usize],
    opts: PointwiseOptions,
) -> Result<Vec<C64>> {
    let pi = check(alpha, a)?;
    if !(t > 0.0) {
        return Err(Error::InvalidParameter("pointwise two-delta oracle needs t > 0".into()));
    }
    let grid = *f.grid();
    let amp = Amplitude::new(f, alpha, a);
    let support = &amp.support;
    let xs: Vec<f64> = indices.iter().map(|&i| grid.x(i)).collect();
    let reach = xs.iter().map(|x| (x - a).abs().max((x + a).abs())).fold(0.0, f64::max);
    let spread = support.iter().map(|p| (p.0 - a).abs().max((p.0 + a).abs())).fold(0.0, f64::max);

    let mut lambda = (2.0 * reach / (2.0 * t) + 10.0).max(10.0);
    loop {
        let mut bound = 0.0;
        for s in [lambda, -lambda] {
            let (g1, g2) = amp.g_real(s);
            let den = (2.0 * lambda - alpha.abs()).powi(2) - alpha * alpha;
            let num = (alpha.abs() * (2.0 * lambda + alpha.abs()) + alpha * alpha) * (g1.norm() + g2.norm());
            bound += num / den / (2.0 * PI);
        }
        let slope = 2.0 * t * lambda - reach;
        if slope > 0.0 && bound / slope < opts.tail_tol {
            break;
        }
        lambda *= 2.0;
        if lambda > 1e6 {
            return Err(Error::Numerical("two-delta truncation did not converge".into()));
        }
    }

    let width = (0.5 / t.sqrt()).min(0.5 / (1.0 + spread));
    let panels = (2.0 * lambda / width).ceil() as usize;
    let w_half = lambda / panels as f64;
    let rule = quadrature::legendre(opts.order)?;
    let lagrange = lagrange_monomials(&rule.nodes);

    // amplitudes at all nodes, shared by every x
    let mut centres = Vec::with_capacity(panels);
    let mut amps: Vec<[Vec<C64>; 2]> = Vec::with_capacity(panels);
    for p in 0..panels {
        let c = -lambda + (2 * p + 1) as f64 * w_half;
        let mut a0 = Vec::with_capacity(rule.len());
        let mut a1 = Vec::with_capacity(rule.len());
        for &u in &rule.nodes {
            let xi = c + w_half * u;
            let q = C64::from_polar(1.0, -t * (xi - c) * (xi - c));
            let (h1, h2) = amp.h(xi);
            a0.push(h1 * q);
            a1.push(h2 * q);
        }
        centres.push(c);
        amps.push([a0, a1]);
    }

    let free = free_propagate(f, t).state;
    let extra = if alpha < 0.0 { Some(bound_state_term(&pi, f, t)?) } else { None };
    let prefactor = C64::new(0.0, 2.0 * PI).inv();
    let mut out = Vec::with_capacity(indices.len());
    for (k, &x) in xs.iter().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (which, yi) in [(0usize, -a), (1usize, a)] {
            let d = (x - yi).abs();
            for (p, &c) in centres.iter().enumerate() {
                let phase = -t * c * c + c * d;
                let b = (-2.0 * t * c + d) * w_half;
                let weights = filon_weights(b, &lagrange);
                let s: C64 = weights.iter().zip(&amps[p][which]).map(|(w, v)| w * v).sum();
                acc += C64::from_polar(w_half, phase) * s;
            }
        }
        let mut v = free.values()[indices[k]] + prefactor * acc;
        if let Some(e) = &extra {
            v += e.values()[indices[k]];
        }
        out.push(v);
    }
    Ok(out)
}

/// Monomial coefficients of the Lagrange basis on `nodes`: `ℓ_k(u) = Σ_j c[k][j] u^j`.
fn lagrange_monomials(nodes: &[f64]) -> Vec<Vec<f64>> {
    let m = nodes.len();
    // invert the Vandermonde matrix V[k][j] = nodes[k]^j by Gauss–Jordan
    let mut a: Vec<Vec<f64>> = nodes.iter().map(|&u| (0..m).map(|j| u.powi(j as i32)).collect()).collect();
    let mut inv: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|j| (i == j) as i32 as f64).collect()).collect();
    for col in 0..m {
        let piv = (col..m).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs())).unwrap();
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for j in 0..m {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for r in 0..m {
            if r != col {
                let fac = a[r][col];
                if fac != 0.0 {
                    for j in 0..m {
                        a[r][j] -= fac * a[col][j];
                        inv[r][j] -= fac * inv[col][j];
                    }
                }
            }
        }
    }
    // V c_k = e_k  =>  c_k is column k of V^{-1}
    (0..m).map(|k| (0..m).map(|j| inv[j][k]).collect()).collect()
}

/// `∫_{-1}^{1} ℓ_k(u) e^{iBu} du` for each Lagrange basis polynomial.
fn filon_weights(b: f64, lagrange: &[Vec<f64>]) -> Vec<C64> {
    let m = lagrange.len();
    let moments = monomial_moments(b, m);
    lagrange.iter().map(|c| c.iter().zip(&moments).map(|(ck, mk)| mk * *ck).sum()).collect()
}

/// `M_j(B) = ∫_{-1}^{1} u^j e^{iBu} du`, `j < m`.
fn monomial_moments(b: f64, m: usize) -> Vec<C64> {
    let i = C64::new(0.0, 1.0);
    if b.abs() <= 2.0 {
        let mut out = vec![C64::new(0.0, 0.0); m];
        for (j, slot) in out.iter_mut().enumerate() {
            let mut term = C64::new(1.0, 0.0);
            for n in 0..48 {
                if (j + n) % 2 == 0 {
                    *slot += term * (2.0 / (j + n + 1) as f64);
                }
                term *= i * b / (n + 1) as f64;
            }
        }
        return out;
    }
    let ep = C64::from_polar(1.0, b);
    let em = ep.conj();
    let ib = i * b;
    let mut out = Vec::with_capacity(m);
    out.push((ep - em) / ib);
    for j in 1..m {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let prev = out[j - 1];
        out.push((ep - sign * em) / ib - prev * (j as f64) / ib);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_agree_across_branches() {
        for b in [0.3, 1.9, 2.1, 5.0, 17.0] {
            let m = monomial_moments(b, 8);
            let rule = quadrature::composite_legendre(-1.0, 1.0, 64, 16).unwrap();
            for (j, mj) in m.iter().enumerate() {
                let direct: C64 = rule.iter().map(|&(u, w)| w * u.powi(j as i32) * C64::from_polar(1.0, b * u)).sum();
                assert!((mj - direct).norm() < 1e-12, "b={b} j={j}");
            }
        }
    }

    #[test]
    fn filon_is_exact_for_polynomial_amplitudes() {
        let rule = quadrature::legendre(8).unwrap();
        let lag = lagrange_monomials(&rule.nodes);
        let b = 9.0;
        let w = filon_weights(b, &lag);
        let p = |u: f64| 1.0 - 2.0 * u + 0.5 * u.powi(5);
        let approx: C64 = w.iter().zip(&rule.nodes).map(|(wk, &u)| wk * p(u)).sum();
        let fine = quadrature::composite_legendre(-1.0, 1.0, 64, 16).unwrap();
        let exact: C64 = fine.iter().map(|&(u, wt)| wt * p(u) * C64::from_polar(1.0, b * u)).sum();
        assert!((approx - exact).norm() < 1e-12);
    }
}
