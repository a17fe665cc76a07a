//! Linear Schrödinger groups `e^{-itH}` for the free Laplacian and the point
//! interactions.
//!
//! Frequencies follow `û(k) = ∫ f e^{-ikx} dx`, so the free group is the
//! multiplier `e^{-ik²t}` and its kernel is `S(x,t) = e^{ix²/(4t)} / √(4πit)`.

mod decay;
mod delta;
mod deltaprime;
mod kernel;
mod twodelta;

pub use decay::{
    decay_scan, decay_scan_with_exponent, fit_loglog_slope, geometric_times, DecayScanResult, SlopeFit,
    DEFAULT_WEAK_EXPONENT,
};
pub use delta::{delta_propagate, rho_kernel};
pub use deltaprime::deltaprime_propagate;
pub use kernel::{exp_weighted_free_integral, free_kernel};
pub use twodelta::{twodelta_pointwise, twodelta_propagate, PointwiseOptions};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{angular_frequencies, fft_forward, fft_inverse, GridFunction};
use crate::spectral::{bound_states, PointInteraction};

/// Edge amplitude above which an input or output is flagged as touching the
/// grid boundary.
pub const BOUNDARY_TOL: f64 = 1e-10;

/// Computation path for [`delta_propagate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagatorMethod {
    ClosedForm,
    KernelQuadrature,
    SpectralQuadrature,
}

impl PropagatorMethod {
    pub fn supports(&self, pi: &PointInteraction) -> bool {
        matches!(
            (self, pi),
            (Self::KernelQuadrature, _)
                | (Self::ClosedForm, PointInteraction::Delta { .. })
                | (Self::SpectralQuadrature, PointInteraction::Delta { .. })
        )
    }
}

/// A propagated state and whether it came close to the grid boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagated {
    pub state: GridFunction,
    pub boundary_warning: bool,
}

impl Propagated {
    pub(crate) fn new(state: GridFunction, input: &GridFunction) -> Self {
        let boundary_warning =
            input.edge_amplitude(2) > BOUNDARY_TOL || state.edge_amplitude(2) > 1e3 * BOUNDARY_TOL;
        Self { state, boundary_warning }
    }
}

/// `e^{itΔ} f` by the FFT multiplier `e^{-ik²t}` on the periodic extension of the grid.
pub fn free_propagate(f: &GridFunction, t: f64) -> Propagated {
    if t == 0.0 {
        return Propagated::new(f.clone(), f);
    }
    let mut buf = f.values().to_vec();
    free_evolve_in_place(&mut buf, f.grid().spacing(), t);
    let state = GridFunction::new(*f.grid(), buf).expect("unitary multiplier keeps values finite");
    Propagated::new(state, f)
}

pub(crate) fn free_evolve_in_place(buf: &mut [C64], h: f64, t: f64) {
    let n = buf.len();
    fft_forward(buf);
    let ks = angular_frequencies(n, h);
    let inv = 1.0 / n as f64;
    for (v, k) in buf.iter_mut().zip(ks) {
        *v *= C64::from_polar(inv, -k * k * t);
    }
    fft_inverse(buf);
}

/// `Σ_j e^{-iγ_j t} ⟨f, e_j⟩ e_j` over the bound states of `pi`, with the
/// projection taken in the grid inner product.
pub fn bound_state_term(pi: &PointInteraction, f: &GridFunction, t: f64) -> Result<GridFunction> {
    let mut out = GridFunction::zeros(*f.grid());
    for s in bound_states(pi)? {
        let e = s.eigenfunction.sample(f.grid());
        let c = f.inner(&e)? / e.inner(&e)? * C64::from_polar(1.0, -s.gamma * t);
        out = out.axpy(c, &e)?;
    }
    Ok(out)
}

/// `f'(x0+) - f'(x0-)` from one-sided fourth-order differences, when `x0` is
/// a node with four neighbours on each side.
pub(crate) fn derivative_jump(f: &GridFunction, x0: f64) -> Option<C64> {
    let grid = f.grid();
    let c = grid.node_index(x0)?;
    if c < 4 || c + 4 >= grid.n() {
        return None;
    }
    let v = f.values();
    let coef = [-25.0, 48.0, -36.0, 16.0, -3.0];
    let right: C64 = (0..5).map(|k| coef[k] * v[c + k]).sum();
    let left: C64 = (0..5).map(|k| coef[k] * v[c - k]).sum();
    Some((right + left) / (12.0 * grid.spacing()))
}

/// Evolves `f` as `rest + Σ b_j e_j`, where the bound-state combination is
/// fitted (least squares) to the derivative jumps of `f` at the interaction
/// points. The `e_j` part rotates exactly; `evolve` handles the smoother
/// `rest`. Falls back to `evolve(f)` when the fit is unavailable.
pub(crate) fn evolve_with_kinks_removed(
    pi: &PointInteraction,
    f: &GridFunction,
    t: f64,
    evolve: impl Fn(&GridFunction) -> Result<GridFunction>,
) -> Result<GridFunction> {
    let points: Vec<f64> = match *pi {
        PointInteraction::Delta { .. } => vec![0.0],
        PointInteraction::TwoDelta { a, .. } => vec![-a, a],
        PointInteraction::DeltaPrime { .. } => return evolve(f),
    };
    let states = bound_states(pi)?;
    if states.is_empty() {
        return evolve(f);
    }
    let modes: Vec<GridFunction> = states.iter().map(|s| s.eigenfunction.sample(f.grid())).collect();
    let jumps = |g: &GridFunction| points.iter().map(|&p| derivative_jump(g, p)).collect::<Option<Vec<C64>>>();
    let (Some(rhs), Some(cols)) = (jumps(f), modes.iter().map(jumps).collect::<Option<Vec<_>>>()) else {
        return evolve(f);
    };
    // normal equations, at most 2x2
    let m = cols.len();
    let gram: Vec<Vec<C64>> =
        (0..m).map(|i| (0..m).map(|j| (0..points.len()).map(|p| cols[i][p].conj() * cols[j][p]).sum()).collect()).collect();
    let proj: Vec<C64> = (0..m).map(|i| (0..points.len()).map(|p| cols[i][p].conj() * rhs[p]).sum()).collect();
    let coeffs: Vec<C64> = match m {
        1 if gram[0][0].norm() > 0.0 => vec![proj[0] / gram[0][0]],
        2 => {
            let det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0];
            if det.norm() <= 1e-12 * gram[0][0].norm() * gram[1][1].norm() {
                return evolve(f);
            }
            vec![
                (gram[1][1] * proj[0] - gram[0][1] * proj[1]) / det,
                (gram[0][0] * proj[1] - gram[1][0] * proj[0]) / det,
            ]
        }
        _ => return evolve(f),
    };
    let mut rest = f.clone();
    for (b, e) in coeffs.iter().zip(&modes) {
        rest = rest.axpy(-*b, e)?;
    }
    let mut out = evolve(&rest)?;
    for ((b, e), s) in coeffs.iter().zip(&modes).zip(&states) {
        out = out.axpy(b * C64::from_polar(1.0, -s.gamma * t), e)?;
    }
    Ok(out)
}

/// `e^{-itH} f` with the default path for each interaction.
pub fn propagate(pi: &PointInteraction, f: &GridFunction, t: f64) -> Result<Propagated> {
    propagate_with(pi, f, t, default_method(pi))
}

pub fn default_method(pi: &PointInteraction) -> PropagatorMethod {
    match pi {
        PointInteraction::Delta { .. } => PropagatorMethod::ClosedForm,
        _ => PropagatorMethod::KernelQuadrature,
    }
}

pub fn propagate_with(
    pi: &PointInteraction,
    f: &GridFunction,
    t: f64,
    method: PropagatorMethod,
) -> Result<Propagated> {
    pi.validate()?;
    if !method.supports(pi) {
        return Err(Error::UnsupportedMethod { method: format!("{method:?}"), interaction: pi.name() });
    }
    match *pi {
        PointInteraction::Delta { sigma } => delta_propagate(f, sigma, t, method),
        PointInteraction::DeltaPrime { beta } => deltaprime_propagate(f, beta, t),
        PointInteraction::TwoDelta { alpha, a } => twodelta_propagate(f, alpha, a, t),
    }
}

/// Kernel paths are written for `t > 0`; `t < 0` follows from
/// `e^{-itH} f = conj(e^{itH} conj f)` for real `H`.
pub(crate) fn with_time_reversal(
    f: &GridFunction,
    t: f64,
    forward: impl Fn(&GridFunction, f64) -> Result<GridFunction>,
) -> Result<GridFunction> {
    if t == 0.0 {
        return Err(Error::ZeroTime);
    }
    if t > 0.0 {
        forward(f, t)
    } else {
        Ok(forward(&f.conj(), -t)?.conj())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn free_gaussian_matches_closed_form() {
        let g = Grid::symmetric(40.0, 4001).unwrap();
        let f = GridFunction::from_real_fn(g, |x| (-x * x).exp());
        let t = 1.0;
        let out = free_propagate(&f, t);
        assert!(!out.boundary_warning);
        let z = C64::new(1.0, 4.0 * t);
        let err = (0..g.n())
            .map(|i| {
                let x = g.x(i);
                (out.state.values()[i] - (-x * x / z).exp() / z.sqrt()).norm()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
        assert!((out.state.l2_norm() - f.l2_norm()).abs() < 1e-10);
        assert_eq!(free_propagate(&f, 0.0).state, f);
    }

    #[test]
    fn method_availability() {
        let dp = PointInteraction::DeltaPrime { beta: 1.0 };
        assert!(!PropagatorMethod::ClosedForm.supports(&dp));
        assert!(PropagatorMethod::KernelQuadrature.supports(&dp));
        let f = GridFunction::zeros(Grid::symmetric(1.0, 11).unwrap());
        assert!(matches!(
            propagate_with(&dp, &f, 1.0, PropagatorMethod::SpectralQuadrature),
            Err(Error::UnsupportedMethod { .. })
        ));
    }
}
