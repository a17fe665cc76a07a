//! Decreasing rearrangements and weak-Lᵖ / Lorentz norms.
//!
//! A grid function is treated as a step function in which every sample owns a
//! cell of measure `h`. Under that model `f*` is the sorted list of `|f_i|`
//! laid out on consecutive cells, and both `f**` and the Lorentz integrals are
//! computed exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// `f*` and `f**` of a grid function sampled at the cell boundaries `t_k = k h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RearrangementProfile {
    /// Right cell boundaries `h, 2h, ..., n h`.
    pub t_samples: Vec<f64>,
    /// Value of `f*` on the cell ending at `t_samples[k]`.
    pub fstar: Vec<f64>,
    /// `f**(t_samples[k])`.
    pub fstarstar: Vec<f64>,
    /// Cell measure `h`.
    pub cell: f64,
}

impl RearrangementProfile {
    /// Step evaluation of `f*` (right-continuous).
    pub fn fstar_at(&self, t: f64) -> f64 {
        if t < 0.0 {
            return self.fstar.first().copied().unwrap_or(0.0);
        }
        let k = (t / self.cell).floor() as usize;
        self.fstar.get(k).copied().unwrap_or(0.0)
    }

    /// `∫_0^∞ f*(t) dt`.
    pub fn mass(&self) -> f64 {
        self.fstar.iter().sum::<f64>() * self.cell
    }
}

pub fn decreasing_rearrangement(f: &GridFunction) -> RearrangementProfile {
    let h = f.grid().spacing();
    let mut fstar: Vec<f64> = f.values().iter().map(|v| v.norm()).collect();
    fstar.sort_by(|a, b| b.total_cmp(a));
    let mut running = 0.0;
    let mut t_samples = Vec::with_capacity(fstar.len());
    let mut fstarstar = Vec::with_capacity(fstar.len());
    for (k, &v) in fstar.iter().enumerate() {
        running += v;
        t_samples.push((k + 1) as f64 * h);
        fstarstar.push(running / (k + 1) as f64);
    }
    RearrangementProfile { t_samples, fstar, fstarstar, cell: h }
}

/// `‖f‖_(p,∞) = sup_t t^{1/p} f**(t)`, using `f**`.
///
/// On each cell `t^{1/p} f**(t) = A t^{1/p-1} + v t^{1/p}` with `A >= 0`, which
/// is convex in `t`, so the supremum is attained at a cell boundary. Past the
/// last cell the expression decreases. `p = ∞` gives the sup norm.
pub fn weak_lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    if p.is_nan() || p <= 1.0 {
        return Err(Error::InvalidParameter(format!("weak L^p norm needs p > 1, got {p}")));
    }
    Ok(weak_norm_of_profile(&decreasing_rearrangement(f), p))
}

pub fn weak_norm_of_profile(profile: &RearrangementProfile, p: f64) -> f64 {
    let inv = 1.0 / p;
    profile
        .t_samples
        .iter()
        .zip(&profile.fstarstar)
        .map(|(&t, &m)| t.powf(inv) * m)
        .fold(0.0, f64::max)
}

/// `‖f‖_{L^{(p,q)}} = (∫_0^∞ (t^{1/p} f*(t))^q dt/t)^{1/q}`, using `f*`.
///
/// The integral over each cell is done in closed form. `q = ∞` gives
/// `sup_t t^{1/p} f*(t)`.
pub fn lorentz_norm(f: &GridFunction, p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("Lorentz norm needs finite p > 0, got {p}")));
    }
    if q.is_nan() || q <= 0.0 {
        return Err(Error::InvalidParameter(format!("Lorentz norm needs q > 0, got {q}")));
    }
    let prof = decreasing_rearrangement(f);
    let h = prof.cell;
    if q.is_infinite() {
        return Ok(prof
            .fstar
            .iter()
            .enumerate()
            .map(|(k, &v)| ((k + 1) as f64 * h).powf(1.0 / p) * v)
            .fold(0.0, f64::max));
    }
    let e = q / p;
    let mut total = 0.0;
    let mut prev = 0.0;
    for (k, &v) in prof.fstar.iter().enumerate() {
        let next = ((k + 1) as f64 * h).powf(e);
        if v > 0.0 {
            total += v.powf(q) * (next - prev);
        }
        prev = next;
    }
    Ok((total / e).powf(1.0 / q))
}
