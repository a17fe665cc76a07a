//! Sup-norm decay of `e^{-itH} f` over a time scan.

use serde::{Deserialize, Serialize};

use super::{bound_state_term, propagate};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::lorentz::weak_lp_norm;
use crate::spectral::{bound_states, PointInteraction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayScanResult {
    pub times: Vec<f64>,
    pub sup_norms: Vec<f64>,
    /// Weak-Lᵖ norms of the same states, exponent `weak_exponent`.
    pub weak_norms: Vec<f64>,
    pub weak_exponent: f64,
    pub fitted_slope: f64,
    pub slope_stderr: f64,
    /// Set when bound states are present and were not subtracted.
    pub no_decay_expected: bool,
    pub boundary_warning: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
}

/// Default exponent for the weak-norm column.
pub const DEFAULT_WEAK_EXPONENT: f64 = 6.0;

/// `n` points from `t0` to `t1` with constant ratio.
pub fn geometric_times(t0: f64, t1: f64, n: usize) -> Result<Vec<f64>> {
    if !(t0 > 0.0 && t1 > t0) || n < 2 {
        return Err(Error::InvalidParameter(format!("geometric_times needs 0 < t0 < t1, n >= 2 (t0={t0}, t1={t1}, n={n})")));
    }
    let r = (t1 / t0).ln() / (n - 1) as f64;
    Ok((0..n).map(|k| if k + 1 == n { t1 } else { t0 * (r * k as f64).exp() }).collect())
}

/// Ordinary least squares of `ln y` against `ln t`.
pub fn fit_loglog_slope(times: &[f64], values: &[f64]) -> Result<SlopeFit> {
    if times.len() != values.len() || times.len() < 2 {
        return Err(Error::InvalidParameter("slope fit needs at least two paired samples".into()));
    }
    if times.iter().chain(values).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidParameter("slope fit needs positive finite samples".into()));
    }
    let xs: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if xs.len() > 2 {
        let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(SlopeFit { slope, intercept, stderr })
}

pub fn decay_scan(pi: &PointInteraction, f: &GridFunction, times: &[f64], subtract_bound_states: bool) -> Result<DecayScanResult> {
    decay_scan_with_exponent(pi, f, times, subtract_bound_states, DEFAULT_WEAK_EXPONENT)
}

pub fn decay_scan_with_exponent(
    pi: &PointInteraction,
    f: &GridFunction,
    times: &[f64],
    subtract_bound_states: bool,
    weak_exponent: f64,
) -> Result<DecayScanResult> {
    pi.validate()?;
    if times.is_empty() || times[0] <= 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("times must be positive and strictly increasing".into()));
    }
    let has_bound = !bound_states(pi)?.is_empty();
    let rows: Vec<Result<(f64, f64, bool)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = times
            .iter()
            .map(|&t| {
                scope.spawn(move || -> Result<(f64, f64, bool)> {
                    let out = propagate(pi, f, t)?;
                    let mut state = out.state;
                    if subtract_bound_states && has_bound {
                        state = state.sub(&bound_state_term(pi, f, t)?)?;
                    }
                    Ok((state.sup_norm(), weak_lp_norm(&state, weak_exponent)?, out.boundary_warning))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("decay scan worker panicked")).collect()
    });
    let mut sup_norms = Vec::with_capacity(times.len());
    let mut weak_norms = Vec::with_capacity(times.len());
    let mut boundary_warning = false;
    for r in rows {
        let (s, w, b) = r?;
        sup_norms.push(s);
        weak_norms.push(w);
        boundary_warning |= b;
    }
    let fit = fit_loglog_slope(times, &sup_norms)?;
    Ok(DecayScanResult {
        times: times.to_vec(),
        sup_norms,
        weak_norms,
        weak_exponent,
        fitted_slope: fit.slope,
        slope_stderr: fit.stderr,
        no_decay_expected: has_bound && !subtract_bound_states,
        boundary_warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_fit() {
        let t = geometric_times(0.5, 20.0, 9).unwrap();
        let y: Vec<f64> = t.iter().map(|t| 3.0 * t.powf(-0.5)).collect();
        let fit = fit_loglog_slope(&t, &y).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(fit.stderr < 1e-12);
        assert_eq!(t[8], 20.0);
    }
}
