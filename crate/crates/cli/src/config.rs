//! Run configuration: JSON file contents merged with command-line overrides.

use serde::{Deserialize, Serialize};
use singular_nls::propagator::{geometric_times, PropagatorMethod};
use singular_nls::wiener::{AtomicMeasure, FourierCoeffs, Nonlinearity};
use singular_nls::{Error, Grid, GridFunction, PointInteraction, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub half_width: f64,
    pub spacing: f64,
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid> {
        Grid::symmetric_with_spacing(self.half_width, self.spacing)
    }
}

/// Geometric time grid `start … end` with `count` points, or explicit values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimesConfig {
    pub start: f64,
    pub end: f64,
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl TimesConfig {
    pub fn build(&self) -> Result<Vec<f64>> {
        match &self.values {
            Some(v) => Ok(v.clone()),
            None => geometric_times(self.start, self.end, self.count),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DataShape {
    /// `amplitude · e^{-width (x - center)²}`.
    Gaussian,
    /// Normalized ground state of the interaction.
    BoundState,
    /// Ground state plus the Gaussian.
    BoundStatePlusGaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub shape: DataShape,
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self { shape: DataShape::Gaussian, center: -3.0, width: 1.0, amplitude: 1.0 }
    }
}

impl DataConfig {
    pub fn build(&self, grid: Grid, pi: Option<&PointInteraction>) -> Result<GridFunction> {
        let (c, w, amp) = (self.center, self.width, self.amplitude);
        let gauss = GridFunction::from_real_fn(grid, move |x| amp * (-w * (x - c).powi(2)).exp());
        let ground = || -> Result<GridFunction> {
            let pi = pi.ok_or_else(|| Error::InvalidParameter("bound-state data needs an interaction".into()))?;
            let states = singular_nls::spectral::bound_states(pi)?;
            let s = states.first().ok_or_else(|| Error::InvalidParameter(format!("{} has no bound state", pi.name())))?;
            Ok(s.eigenfunction.sample(&grid))
        };
        match self.shape {
            DataShape::Gaussian => Ok(gauss),
            DataShape::BoundState => ground(),
            DataShape::BoundStatePlusGaussian => ground()?.add(&gauss),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    /// Weighted weak-Lᵖ Picard solver on the line.
    WeakLp,
    /// Fourier-side solver on atomic measures.
    Measure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NlsConfig {
    pub solver: SolverKind,
    pub rho: f64,
    pub lambda_sign: i8,
    /// Target for `2^ρ ε^{ρ-1} K`; ignored when `eps` is given.
    pub budget: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for NlsConfig {
    fn default() -> Self {
        Self { solver: SolverKind::WeakLp, rho: 5.0, lambda_sign: 1, budget: 0.5, eps: None, max_iters: 40, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WienerConfig {
    pub u0: FourierCoeffs,
    pub mu: FourierCoeffs,
    /// Atomic data for the line solver.
    pub u0_hat: AtomicMeasure,
    pub mu_hat: AtomicMeasure,
    pub rho: u32,
    pub lambda_sign: i8,
    pub t_max: f64,
    pub panels: usize,
    pub nonlinearity: Nonlinearity,
    pub tol: f64,
    pub max_iters: usize,
    pub max_atoms: usize,
    /// Compare against a truncated Galerkin reference on `|m| ≤ galerkin_modes`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub galerkin_modes: Option<i64>,
    pub galerkin_step: f64,
}

impl Default for WienerConfig {
    fn default() -> Self {
        let c = |re| singular_nls::C64::new(re, 0.0);
        Self {
            u0: FourierCoeffs::mode(1, c(0.05)),
            mu: FourierCoeffs::mode(0, c(0.1)),
            u0_hat: AtomicMeasure::new(vec![(-1.0, c(0.05)), (1.0, c(0.05))]).expect("finite"),
            mu_hat: AtomicMeasure::dirac(0.0, c(0.1)),
            rho: 2,
            lambda_sign: 1,
            t_max: 0.5,
            panels: 8,
            nonlinearity: Nonlinearity::Power,
            tol: 1e-13,
            max_iters: 60,
            max_atoms: 4096,
            galerkin_modes: None,
            galerkin_step: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LorentzConfig {
    pub p: f64,
    /// `None` is `q = ∞`.
    pub q: Option<f64>,
}

impl Default for LorentzConfig {
    fn default() -> Self {
        Self { p: 2.0, q: Some(2.0) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interaction: Option<PointInteraction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub times: Option<TimesConfig>,
    pub data: DataConfig,
    /// Time for `propagate`.
    pub t: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<PropagatorMethod>,
    pub subtract_bound_states: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_tol: Option<f64>,
    pub nls: NlsConfig,
    pub wiener: WienerConfig,
    pub lorentz: LorentzConfig,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub only: Option<Vec<u8>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            interaction: None,
            grid: None,
            times: None,
            data: DataConfig::default(),
            t: 0.5,
            method: None,
            subtract_bound_states: false,
            slope_tol: None,
            nls: NlsConfig::default(),
            wiener: WienerConfig::default(),
            lorentz: LorentzConfig::default(),
            seed: singular_nls::acceptance::DEFAULT_SEED,
            only: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))
    }

    pub fn interaction(&self) -> Result<PointInteraction> {
        let pi = self.interaction.ok_or_else(|| Error::InvalidParameter("no interaction given".into()))?;
        Ok(pi)
    }

    pub fn grid_or(&mut self, half_width: f64, spacing: f64) -> GridConfig {
        *self.grid.get_or_insert(GridConfig { half_width, spacing })
    }

    pub fn times_or(&mut self, start: f64, end: f64, count: usize) -> TimesConfig {
        self.times.get_or_insert(TimesConfig { start, end, count, values: None }).clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips() {
        let mut cfg = RunConfig {
            interaction: Some(PointInteraction::TwoDelta { alpha: -1.5, a: 0.75 }),
            method: Some(PropagatorMethod::SpectralQuadrature),
            only: Some(vec![1, 4]),
            ..RunConfig::default()
        };
        cfg.grid_or(12.5, 0.025);
        cfg.times = Some(TimesConfig { start: 0.1, end: 3.0, count: 4, values: Some(vec![0.1, 0.3, 1.0, 3.0]) });
        cfg.nls.eps = Some(1e-3);
        cfg.wiener.galerkin_modes = Some(16);
        cfg.lorentz.q = None;
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
        assert!(RunConfig::from_json(r#"{"gird": {}}"#).is_err());
    }
}
