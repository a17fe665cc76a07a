//! Spectral data of the point-interaction Hamiltonians.
//!
//! Conventions: the δ interaction of strength `σ` imposes
//! `ψ'(0+) - ψ'(0-) = σ ψ(0)`; the δ′ interaction of strength `β` imposes
//! `ζ'(0+) = ζ'(0-)` and `ζ(0+) - ζ(0-) = β ζ'(0-)`; the two-δ interaction
//! imposes the δ condition with strength `α` at `x = ±a`. Attractive couplings
//! are negative.

use std::f64::consts::{E, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointInteraction {
    Delta { sigma: f64 },
    DeltaPrime { beta: f64 },
    TwoDelta { alpha: f64, a: f64 },
}

impl PointInteraction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Delta { sigma } if !sigma.is_finite() => {
                Err(Error::InvalidParameter(format!("sigma must be finite, got {sigma}")))
            }
            Self::DeltaPrime { beta } if !beta.is_finite() => {
                Err(Error::InvalidParameter(format!("beta must be finite, got {beta}")))
            }
            Self::TwoDelta { alpha, a } => {
                if !(alpha.is_finite() && a.is_finite() && a > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "two-delta needs finite alpha and a > 0, got alpha={alpha}, a={a}"
                    )));
                }
                if (a * alpha + 1.0).abs() < 1e-12 {
                    return Err(Error::ExcludedParameterLine);
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Self::Delta { sigma } => format!("delta(sigma={sigma})"),
            Self::DeltaPrime { beta } => format!("delta-prime(beta={beta})"),
            Self::TwoDelta { alpha, a } => format!("two-delta(alpha={alpha}, a={a})"),
        }
    }
}

/// Closed-form shape of a normalized eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Eigenfunction {
    /// `√(-σ/2) e^{σ|x|/2}`.
    Delta { sigma: f64 },
    /// `√(-2/β) sign(x) e^{2|x|/β}`; the value at `x = 0` is the mean of the one-sided limits, 0.
    DeltaPrime { beta: f64 },
    /// `c cosh(κx)` on `|x| < a`, `c cosh(κa) e^{-κ(|x|-a)}` outside.
    TwoDeltaEven { kappa: f64, a: f64, c: f64 },
    /// `c sinh(κx)` on `|x| < a`, `c sign(x) sinh(κa) e^{-κ(|x|-a)}` outside.
    TwoDeltaOdd { kappa: f64, a: f64, c: f64 },
}

impl Eigenfunction {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::Delta { sigma } => (-sigma / 2.0).sqrt() * (sigma * x.abs() / 2.0).exp(),
            Self::DeltaPrime { beta } => {
                if x == 0.0 {
                    0.0
                } else {
                    (-2.0 / beta).sqrt() * x.signum() * (2.0 * x.abs() / beta).exp()
                }
            }
            Self::TwoDeltaEven { kappa, a, c } => {
                if x.abs() < a {
                    c * (kappa * x).cosh()
                } else {
                    c * (kappa * a).cosh() * (-kappa * (x.abs() - a)).exp()
                }
            }
            Self::TwoDeltaOdd { kappa, a, c } => {
                if x.abs() < a {
                    c * (kappa * x).sinh()
                } else {
                    c * x.signum() * (kappa * a).sinh() * (-kappa * (x.abs() - a)).exp()
                }
            }
        }
    }

    /// One-sided limit at `x` from the left (`side < 0`) or right (`side > 0`).
    pub fn eval_side(&self, x: f64, side: f64) -> f64 {
        match *self {
            Self::DeltaPrime { beta } if x == 0.0 => {
                side.signum() * (-2.0 / beta).sqrt()
            }
            _ => self.eval(x),
        }
    }

    pub fn sample(&self, grid: &crate::grid::Grid) -> GridFunction {
        GridFunction::from_real_fn(*grid, |x| self.eval(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub gamma: f64,
    pub label: u8,
    pub eigenfunction: Eigenfunction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringData {
    pub lambda: f64,
    pub t_coeff: C64,
    pub r_coeff: C64,
}

/// Principal branch of the Lambert W function on `[-1/e, ∞)`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    let branch = -1.0 / E;
    if x.is_nan() || x < branch {
        return Err(Error::LambertDomain(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == branch {
        return Ok(-1.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let mut w = if x < -0.3 {
        // series about the branch point
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        let l = (1.0 + x).ln();
        let mut w = l * (1.0 - (1.0 + l).ln() / (2.0 + l));
        for _ in 0..3 {
            let ew = w.exp();
            w -= (w * ew - x) / (ew * (w + 1.0));
        }
        w
    };
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        let next = (w - step).max(-1.0);
        let settled = (next - w).abs() <= 4.0 * f64::EPSILON * w.abs();
        w = next;
        if settled {
            break;
        }
    }
    Ok(w)
}

/// `|(2κ + α)² - α² e^{-4κa}|` with `κ = √(-γ)`.
pub fn two_delta_residual(gamma: f64, alpha: f64, a: f64) -> f64 {
    let kappa = (-gamma).sqrt();
    ((2.0 * kappa + alpha).powi(2) - alpha * alpha * (-4.0 * kappa * a).exp()).abs()
}

pub fn bound_states(pi: &PointInteraction) -> Result<Vec<BoundState>> {
    pi.validate()?;
    Ok(match *pi {
        PointInteraction::Delta { sigma } if sigma < 0.0 => vec![BoundState {
            gamma: -sigma * sigma / 4.0,
            label: 1,
            eigenfunction: Eigenfunction::Delta { sigma },
        }],
        PointInteraction::DeltaPrime { beta } if beta < 0.0 => vec![BoundState {
            gamma: -4.0 / (beta * beta),
            label: 1,
            eigenfunction: Eigenfunction::DeltaPrime { beta },
        }],
        PointInteraction::TwoDelta { alpha, a } if alpha < 0.0 => {
            let out: Vec<BoundState> = two_delta_kappas(alpha, a)?
                .into_iter()
                .zip(1..)
                .map(|(k, label)| two_delta_state(label, k, a))
                .collect();
            for s in &out {
                let res = two_delta_residual(s.gamma, alpha, a);
                if !(res < 1e-10) {
                    return Err(Error::Numerical(format!(
                        "two-delta eigenvalue {} fails implicit equation (residual {res:e})",
                        s.gamma
                    )));
                }
            }
            out
        }
        _ => Vec::new(),
    })
}

/// Decay rates `κ` of the two-δ bound states from the Lambert-W formulas,
/// without the parameter-line check (on `aα = -1` the odd state has merged
/// into the threshold and only the even one is returned).
pub fn two_delta_kappas(alpha: f64, a: f64) -> Result<Vec<f64>> {
    if !(alpha < 0.0 && a > 0.0) {
        return Ok(Vec::new());
    }
    let big_a = -a * alpha;
    let w1 = lambert_w0(big_a * (-big_a).exp())?;
    let mut out = vec![(w1 + big_a) / (2.0 * a)];
    if big_a > 1.0 {
        let w2 = lambert_w0(a * alpha * (a * alpha).exp())?;
        out.push((w2 - a * alpha) / (2.0 * a));
    }
    Ok(out)
}

fn two_delta_state(label: u8, kappa: f64, a: f64) -> BoundState {
    let ka = kappa * a;
    let eigenfunction = if label == 1 {
        let norm2 = a + (2.0 * ka).sinh() / (2.0 * kappa) + ka.cosh().powi(2) / kappa;
        Eigenfunction::TwoDeltaEven { kappa, a, c: norm2.sqrt().recip() }
    } else {
        let norm2 = (2.0 * ka).sinh() / (2.0 * kappa) - a + ka.sinh().powi(2) / kappa;
        Eigenfunction::TwoDeltaOdd { kappa, a, c: norm2.sqrt().recip() }
    };
    BoundState { gamma: -kappa * kappa, label, eigenfunction }
}

pub fn scattering(sigma: f64, lambda: f64) -> Result<ScatteringData> {
    let den = C64::new(-sigma, 2.0 * lambda);
    if den.norm() == 0.0 {
        return Err(Error::DegenerateScattering);
    }
    Ok(ScatteringData {
        lambda,
        t_coeff: C64::new(0.0, 2.0 * lambda) / den,
        r_coeff: C64::new(sigma, 0.0) / den,
    })
}

/// Generalized eigenfunction `ψ_λ(x)` (plane-wave normalization, no `1/√(2π)`).
pub fn generalized_eigenfunction(sigma: f64, lambda: f64, x: f64) -> C64 {
    if sigma == 0.0 {
        return C64::from_polar(1.0, lambda * x);
    }
    if lambda == 0.0 {
        // t(0) = 0, r(0) = -1: the λ → 0 limit vanishes identically
        return C64::new(0.0, 0.0);
    }
    let s = scattering(sigma, lambda.abs()).expect("lambda != 0");
    // e₊(x, λ) for λ ≥ 0 and e₋(x, |λ|) for λ < 0
    let k = lambda.abs();
    let incoming_side = if lambda > 0.0 { x <= 0.0 } else { x >= 0.0 };
    let dir = lambda.signum();
    if incoming_side {
        C64::from_polar(1.0, dir * k * x) + s.r_coeff * C64::from_polar(1.0, -dir * k * x)
    } else {
        s.t_coeff * C64::from_polar(1.0, dir * k * x)
    }
}

/// Result of [`generalized_fourier`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedTransform {
    pub lambdas: Vec<f64>,
    pub values: Vec<C64>,
    /// Set when `|f|` at the grid ends exceeds `1e-8`.
    pub decay_warning: bool,
}

/// `𝓕f(λ) = (2π)^{-1/2} ∫ f(x) conj(ψ_λ(x)) dx`, trapezoid in `x`.
///
/// With the `1/√(2π)` factor the transform is an isometry from the continuous
/// subspace onto `L²(dλ)`.
pub fn generalized_fourier(f: &GridFunction, sigma: f64, lambdas: &[f64]) -> GeneralizedTransform {
    let grid = f.grid();
    let w = grid.weights();
    let xs = grid.points();
    let norm = (2.0 * PI).sqrt().recip();
    let support: Vec<usize> = {
        let cut = 1e-300_f64.max(f.sup_norm() * 1e-17);
        (0..xs.len()).filter(|&i| f.values()[i].norm() > cut).collect()
    };
    let values = lambdas
        .iter()
        .map(|&lam| {
            let acc: C64 = support
                .iter()
                .map(|&i| f.values()[i] * generalized_eigenfunction(sigma, lam, xs[i]).conj() * w[i])
                .sum();
            acc * norm
        })
        .collect();
    GeneralizedTransform { lambdas: lambdas.to_vec(), values, decay_warning: f.edge_amplitude(1) > 1e-8 }
}

/// Composite Gauss–Legendre nodes on `[-lambda_max, lambda_max]` for spectral synthesis.
pub fn lambda_nodes(lambda_max: f64, panels: usize, order: usize) -> Result<Vec<(f64, f64)>> {
    quadrature::composite_legendre(-lambda_max, lambda_max, panels, order)
}
