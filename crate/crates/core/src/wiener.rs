//! Fourier-side solvers for `i u_t + Δu + μu = λ N(u)` with the transform
//! `f̂(ξ) = ∫ f e^{-2πiξx} dx`.
//!
//! Periodic states are finitely supported coefficient maps in ℓ¹(ℤ), line
//! states are finite atomic measures. Both use the mild form
//!
//! `û(t) = e^{-iωt}û₀ + i∫_0^t e^{-iω(t-s)}(μ̂∗û)(s) ds - iλ∫_0^t e^{-iω(t-s)} N̂(u)(s) ds`
//!
//! with `ω = 4π²ξ²`, where `N(u) = u^ρ` (a `ρ`-fold convolution on the
//! Fourier side) or `|u|^{ρ-1}u` for odd `ρ`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::quadrature;

/// Atoms closer than this are merged.
pub const MERGE_TOL: f64 = 1e-12;

fn dispersion(xi: f64) -> f64 {
    4.0 * PI * PI * xi * xi
}

fn check_finite(z: C64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("non-finite coefficient {z}")))
    }
}

/// Fourier coefficients of a periodic function, modes outside the map are 0.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<(i64, f64, f64)>", try_from = "Vec<(i64, f64, f64)>")]
pub struct FourierCoeffs {
    coeffs: BTreeMap<i64, C64>,
}

impl From<FourierCoeffs> for Vec<(i64, f64, f64)> {
    fn from(f: FourierCoeffs) -> Self {
        f.coeffs.into_iter().map(|(m, z)| (m, z.re, z.im)).collect()
    }
}

impl TryFrom<Vec<(i64, f64, f64)>> for FourierCoeffs {
    type Error = Error;
    fn try_from(v: Vec<(i64, f64, f64)>) -> Result<Self> {
        Self::from_pairs(v.into_iter().map(|(m, re, im)| (m, C64::new(re, im))))
    }
}

impl FourierCoeffs {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sums repeated modes.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, C64)>) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (m, z) in pairs {
            check_finite(z)?;
            *coeffs.entry(m).or_insert(C64::new(0.0, 0.0)) += z;
        }
        Ok(Self { coeffs })
    }

    /// `c e_m`.
    pub fn mode(m: i64, c: C64) -> Self {
        Self { coeffs: BTreeMap::from([(m, c)]) }
    }

    pub fn unit(m: i64) -> Self {
        Self::mode(m, C64::new(1.0, 0.0))
    }

    pub fn get(&self, m: i64) -> C64 {
        self.coeffs.get(&m).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.coeffs.iter().map(|(&m, &z)| (m, z))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|z| z.norm()).sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|(&m, &z)| (m, c * z)).collect() }
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: C64, other: &Self) -> Self {
        let mut out = self.coeffs.clone();
        for (&m, &z) in &other.coeffs {
            *out.entry(m).or_insert(C64::new(0.0, 0.0)) += c * z;
        }
        Self { coeffs: out }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(C64::new(-1.0, 0.0), other)
    }

    /// Coefficients of `ū`: `m ↦ conj û(-m)`.
    pub fn conj_reflect(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|(&m, &z)| (-m, z.conj())).collect() }
    }

    /// `Σ û(m) e^{2πimx}`.
    pub fn evaluate(&self, x: f64) -> C64 {
        self.iter().map(|(m, z)| z * C64::from_polar(1.0, 2.0 * PI * m as f64 * x)).sum()
    }

    /// Drops coefficients with modulus below `tol`, returning how many.
    pub fn prune(&mut self, tol: f64) -> usize {
        let before = self.coeffs.len();
        self.coeffs.retain(|_, z| z.norm() >= tol);
        before - self.coeffs.len()
    }
}

/// `(f∗g)(m) = Σ_ξ f(m-ξ) g(ξ)`.
pub fn l1_convolve(f: &FourierCoeffs, g: &FourierCoeffs) -> FourierCoeffs {
    let mut out: BTreeMap<i64, C64> = BTreeMap::new();
    for (a, x) in f.iter() {
        for (b, y) in g.iter() {
            *out.entry(a + b).or_insert(C64::new(0.0, 0.0)) += x * y;
        }
    }
    FourierCoeffs { coeffs: out }
}

/// `f∗…∗f` with `rho` factors.
pub fn convolution_power(f: &FourierCoeffs, rho: u32) -> Result<FourierCoeffs> {
    power(f, rho)
}

/// Coefficients of `|u|^{ρ-1}u = (uū)^{(ρ-1)/2} u` for odd `ρ ≥ 3`.
pub fn conjugate_power(u: &FourierCoeffs, rho: u32) -> Result<FourierCoeffs> {
    gauge_power(u, rho)
}

/// Multiplies mode `m` by `e^{-4π²im²t}`.
pub fn periodic_group(u: &FourierCoeffs, t: f64) -> FourierCoeffs {
    u.rotate(t)
}

/// A finite complex measure `Σ w_j δ_{ξ_j}`, atoms sorted by location.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<(f64, f64, f64)>", try_from = "Vec<(f64, f64, f64)>")]
pub struct AtomicMeasure {
    atoms: Vec<(f64, C64)>,
}

impl From<AtomicMeasure> for Vec<(f64, f64, f64)> {
    fn from(m: AtomicMeasure) -> Self {
        m.atoms.into_iter().map(|(x, z)| (x, z.re, z.im)).collect()
    }
}

impl TryFrom<Vec<(f64, f64, f64)>> for AtomicMeasure {
    type Error = Error;
    fn try_from(v: Vec<(f64, f64, f64)>) -> Result<Self> {
        Self::new(v.into_iter().map(|(x, re, im)| (x, C64::new(re, im))).collect())
    }
}

impl AtomicMeasure {
    /// Sorts and merges atoms within [`MERGE_TOL`].
    pub fn new(atoms: Vec<(f64, C64)>) -> Result<Self> {
        for &(x, z) in &atoms {
            if !x.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite atom location {x}")));
            }
            check_finite(z)?;
        }
        Ok(Self::merged(atoms))
    }

    fn merged(mut atoms: Vec<(f64, C64)>) -> Self {
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, C64)> = Vec::with_capacity(atoms.len());
        for (x, z) in atoms {
            match out.last_mut() {
                Some(last) if (x - last.0).abs() <= MERGE_TOL => last.1 += z,
                _ => out.push((x, z)),
            }
        }
        Self { atoms: out }
    }

    pub fn dirac(xi: f64, c: C64) -> Self {
        Self { atoms: vec![(xi, c)] }
    }

    /// Atoms `h_j f(x_j)` at the grid nodes, with `h_j` the trapezoid weights.
    pub fn from_density(f: &GridFunction) -> Self {
        let g = f.grid();
        let w = g.weights();
        Self { atoms: (0..g.n()).map(|j| (g.x(j), w[j] * f.values()[j])).collect() }
    }

    /// Atoms at `ξ = m` carrying the periodic coefficients.
    pub fn from_lattice(f: &FourierCoeffs) -> Self {
        Self { atoms: f.iter().map(|(m, z)| (m as f64, z)).collect() }
    }

    pub fn atoms(&self) -> &[(f64, C64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Weight of the atom at `xi` (within [`MERGE_TOL`]), 0 if none.
    pub fn weight_at(&self, xi: f64) -> C64 {
        self.atoms.iter().find(|a| (a.0 - xi).abs() <= MERGE_TOL).map(|a| a.1).unwrap_or_default()
    }

    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.1.norm()).sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { atoms: self.atoms.iter().map(|&(x, z)| (x, c * z)).collect() }
    }

    pub fn axpy(&self, c: C64, other: &Self) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().map(|&(x, z)| (x, c * z)));
        Self::merged(atoms)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(C64::new(-1.0, 0.0), other)
    }

    pub fn conj_reflect(&self) -> Self {
        Self::merged(self.atoms.iter().map(|&(x, z)| (-x, z.conj())).collect())
    }

    /// `∫ e^{2πiξx} dû(ξ)`.
    pub fn evaluate(&self, x: f64) -> C64 {
        self.atoms.iter().map(|&(xi, z)| z * C64::from_polar(1.0, 2.0 * PI * xi * x)).sum()
    }

    pub fn prune(&mut self, tol: f64) -> usize {
        let before = self.atoms.len();
        self.atoms.retain(|a| a.1.norm() >= tol);
        before - self.atoms.len()
    }
}

/// Atoms at all pairwise sums with product weights.
pub fn measure_convolve(mu: &AtomicMeasure, nu: &AtomicMeasure) -> AtomicMeasure {
    let mut atoms = Vec::with_capacity(mu.len() * nu.len());
    for &(x, a) in &mu.atoms {
        for &(y, b) in &nu.atoms {
            atoms.push((x + y, a * b));
        }
    }
    AtomicMeasure::merged(atoms)
}

pub fn measure_power(mu: &AtomicMeasure, rho: u32) -> Result<AtomicMeasure> {
    power(mu, rho)
}

pub fn measure_conjugate_power(mu: &AtomicMeasure, rho: u32) -> Result<AtomicMeasure> {
    gauge_power(mu, rho)
}

/// Multiplies the atom at `ξ` by `e^{-4π²iξ²t}`.
pub fn measure_group(mu: &AtomicMeasure, t: f64) -> AtomicMeasure {
    mu.rotate(t)
}

/// Operations shared by the two coefficient spaces.
trait Coefficients: Clone + Default {
    fn norm(&self) -> f64;
    fn combine(&self, c: C64, other: &Self) -> Self;
    fn convolve(&self, other: &Self) -> Self;
    fn reflect(&self) -> Self;
    fn scaled(&self, c: C64) -> Self;
    /// Multiplies each entry by `e^{-iωt}`.
    fn rotate(&self, t: f64) -> Self;
    fn drop_small(&mut self, tol: f64) -> usize;
    fn size(&self) -> usize;
}

impl Coefficients for FourierCoeffs {
    fn norm(&self) -> f64 {
        self.l1_norm()
    }
    fn combine(&self, c: C64, other: &Self) -> Self {
        self.axpy(c, other)
    }
    fn convolve(&self, other: &Self) -> Self {
        l1_convolve(self, other)
    }
    fn reflect(&self) -> Self {
        self.conj_reflect()
    }
    fn scaled(&self, c: C64) -> Self {
        self.scale(c)
    }
    fn rotate(&self, t: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|(&m, &z)| (m, z * C64::from_polar(1.0, -dispersion(m as f64) * t))).collect() }
    }
    fn drop_small(&mut self, tol: f64) -> usize {
        self.prune(tol)
    }
    fn size(&self) -> usize {
        self.len()
    }
}

impl Coefficients for AtomicMeasure {
    fn norm(&self) -> f64 {
        self.total_variation()
    }
    fn combine(&self, c: C64, other: &Self) -> Self {
        self.axpy(c, other)
    }
    fn convolve(&self, other: &Self) -> Self {
        measure_convolve(self, other)
    }
    fn reflect(&self) -> Self {
        self.conj_reflect()
    }
    fn scaled(&self, c: C64) -> Self {
        self.scale(c)
    }
    fn rotate(&self, t: f64) -> Self {
        Self { atoms: self.atoms.iter().map(|&(x, z)| (x, z * C64::from_polar(1.0, -dispersion(x) * t))).collect() }
    }
    fn drop_small(&mut self, tol: f64) -> usize {
        self.prune(tol)
    }
    fn size(&self) -> usize {
        self.len()
    }
}

fn power<A: Coefficients>(f: &A, rho: u32) -> Result<A> {
    if rho < 1 {
        return Err(Error::InvalidParameter("convolution power needs rho >= 1".into()));
    }
    let mut out = f.clone();
    for _ in 1..rho {
        out = out.convolve(f);
    }
    Ok(out)
}

fn gauge_power<A: Coefficients>(u: &A, rho: u32) -> Result<A> {
    if rho < 3 || rho.is_multiple_of(2) {
        return Err(Error::EvenConjugatePower(rho));
    }
    let modulus = u.convolve(&u.reflect());
    Ok(power(&modulus, (rho - 1) / 2)?.convolve(u))
}

/// Form of the nonlinear term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    /// `u^ρ`.
    Power,
    /// `|u|^{ρ-1}u`, odd `ρ` only.
    Gauge,
}

/// Settings of a Fourier-side Picard run on `(-T, T)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WienerParams {
    pub rho: u32,
    /// Sign of `λ`; `0` switches the nonlinear term off.
    pub lambda_sign: i8,
    pub t_max: f64,
    /// Time panels on each side of 0; output times are the panel ends.
    pub n_times: usize,
    pub nonlinearity: Nonlinearity,
    pub tol: f64,
    pub max_iters: usize,
    /// Entries below this modulus are dropped after each iteration.
    pub prune_tol: f64,
    pub max_atoms: usize,
    /// Space dimension; only 1 is implemented.
    pub dim: usize,
}

/// Gauss–Legendre order on each time panel.
const PANEL_ORDER: usize = 16;

impl WienerParams {
    pub fn new(rho: u32, lambda_sign: i8, t_max: f64) -> Result<Self> {
        let p = Self {
            rho,
            lambda_sign,
            t_max,
            n_times: 8,
            nonlinearity: Nonlinearity::Power,
            tol: 1e-13,
            max_iters: 60,
            prune_tol: 1e-14,
            max_atoms: 4096,
            dim: 1,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.rho < 1 {
            return bad("rho must be a positive integer".into());
        }
        if !matches!(self.lambda_sign, -1..=1) {
            return bad(format!("lambda_sign must be -1, 0 or 1, got {}", self.lambda_sign));
        }
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return bad(format!("T must be positive, got {}", self.t_max));
        }
        if self.n_times == 0 || self.max_iters == 0 || self.max_atoms == 0 || !(self.tol > 0.0) || !(self.prune_tol >= 0.0) {
            return bad("n_times, max_iters, max_atoms and tol must be positive".into());
        }
        if self.dim != 1 {
            return bad(format!("only dimension 1 is implemented, got {}", self.dim));
        }
        if self.nonlinearity == Nonlinearity::Gauge && (self.rho < 3 || self.rho.is_multiple_of(2)) {
            return Err(Error::EvenConjugatePower(self.rho));
        }
        Ok(())
    }
}

/// The smallness quantities of the contraction argument with `K = ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallnessBudget {
    pub k: f64,
    pub eps: f64,
    pub mu_norm: f64,
    /// `T(2‖μ‖ + 2^ρ ε^{ρ-1} K)`, must be below 1.
    pub existence: f64,
    /// `q = T(‖μ‖ + 2^ρ ε^{ρ-1} K)`.
    pub lipschitz_q: f64,
    pub controlled: bool,
}

pub fn smallness_budget(eps: f64, mu_norm: f64, rho: u32, t_max: f64) -> SmallnessBudget {
    let k = rho as f64;
    let growth = 2f64.powi(rho as i32) * eps.powi(rho as i32 - 1) * k;
    let existence = t_max * (2.0 * mu_norm + growth);
    SmallnessBudget { k, eps, mu_norm, existence, lipschitz_q: t_max * (mu_norm + growth), controlled: existence < 1.0 }
}

/// `(1-q)^{-1}`, infinite for `q ≥ 1`.
pub fn lipschitz_bound(q: f64) -> f64 {
    if q < 1.0 {
        1.0 / (1.0 - q)
    } else {
        f64::INFINITY
    }
}

/// A solution sampled at the panel ends `-T, …, 0, …, T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffTrajectory<A> {
    pub times: Vec<f64>,
    pub states: Vec<A>,
    /// `sup_t ‖u(t)‖` of each iterate, starting with the free evolution.
    pub sup_norm_history: Vec<f64>,
    pub differences: Vec<f64>,
    pub ratios: Vec<f64>,
    pub budget: SmallnessBudget,
    pub uncontrolled: bool,
    /// Entries dropped by pruning over the whole run.
    pub pruned: usize,
    pub notes: Vec<String>,
}

pub type PeriodicTrajectory = CoeffTrajectory<FourierCoeffs>;
pub type MeasureTrajectory = CoeffTrajectory<AtomicMeasure>;

impl<A> CoeffTrajectory<A> {
    pub fn iterations(&self) -> usize {
        self.differences.len()
    }
}

impl<A: Clone> CoeffTrajectory<A> {
    /// State at an output time, matched within `1e-12`.
    pub fn at(&self, t: f64) -> Option<&A> {
        self.times.iter().position(|&s| (s - t).abs() <= 1e-12).map(|k| &self.states[k])
    }
}

impl CoeffTrajectory<FourierCoeffs> {
    pub fn sup_norm(&self) -> f64 {
        self.states.iter().map(|s| s.l1_norm()).fold(0.0, f64::max)
    }
}

impl CoeffTrajectory<AtomicMeasure> {
    pub fn sup_norm(&self) -> f64 {
        self.states.iter().map(|s| s.total_variation()).fold(0.0, f64::max)
    }
}

/// Panels `[0, ±h], [±h, ±2h], …` with Gauss–Legendre nodes.
struct TimeMesh {
    /// `(start, end)` per panel; panels of one side are consecutive.
    panels: Vec<(f64, f64)>,
    /// Node times, `PANEL_ORDER` per panel.
    nodes: Vec<f64>,
    weights: Vec<f64>,
    matrix: Vec<Vec<f64>>,
    per_side: usize,
}

impl TimeMesh {
    fn new(t_max: f64, per_side: usize) -> Result<Self> {
        let (rule, matrix) = quadrature::legendre_integration_matrix(PANEL_ORDER)?;
        let h = t_max / per_side as f64;
        let mut panels = Vec::with_capacity(2 * per_side);
        for side in [1.0, -1.0] {
            for p in 0..per_side {
                panels.push((side * p as f64 * h, side * (p + 1) as f64 * h));
            }
        }
        let nodes = panels
            .iter()
            .flat_map(|&(a, b)| rule.nodes.iter().map(move |&x| a + 0.5 * (x + 1.0) * (b - a)))
            .collect();
        Ok(Self { panels, nodes, weights: rule.weights.clone(), matrix, per_side })
    }

    /// `∫_0^{s}` of the node samples `g` at every node, and `∫_0^{end}` for
    /// every panel end.
    fn cumulative<A: Coefficients>(&self, g: &[A]) -> (Vec<A>, Vec<A>) {
        let n = PANEL_ORDER;
        let mut at_nodes = Vec::with_capacity(g.len());
        let mut at_ends = Vec::with_capacity(self.panels.len());
        let mut carry = A::default();
        for (p, &(a, b)) in self.panels.iter().enumerate() {
            if p % self.per_side == 0 {
                carry = A::default();
            }
            let half = C64::new(0.5 * (b - a), 0.0);
            let block = &g[p * n..(p + 1) * n];
            for row in &self.matrix {
                let mut acc = carry.clone();
                for (k, gk) in block.iter().enumerate() {
                    acc = acc.combine(half * row[k], gk);
                }
                at_nodes.push(acc);
            }
            for (k, gk) in block.iter().enumerate() {
                carry = carry.combine(half * self.weights[k], gk);
            }
            at_ends.push(carry.clone());
        }
        (at_nodes, at_ends)
    }
}

fn nonlinear_term<A: Coefficients>(u: &A, params: &WienerParams) -> Result<A> {
    match params.nonlinearity {
        Nonlinearity::Power => power(u, params.rho),
        Nonlinearity::Gauge => gauge_power(u, params.rho),
    }
}

fn picard<A: Coefficients>(u0: &A, mu: &A, params: &WienerParams) -> Result<CoeffTrajectory<A>> {
    params.validate()?;
    let budget = smallness_budget(u0.norm(), mu.norm(), params.rho, params.t_max);
    let mut notes = Vec::new();
    if params.rho == 1 {
        notes.push("rho = 1: the nonlinear term is linear".to_string());
    }
    if !budget.controlled {
        notes.push(format!("uncontrolled: smallness quantity {:.6} >= 1", budget.existence));
    }
    let mesh = TimeMesh::new(params.t_max, params.n_times)?;
    let i = C64::new(0.0, 1.0);
    let lambda = params.lambda_sign as f64;
    let sup = |states: &[A]| states.iter().map(|s| s.norm()).fold(0.0, f64::max);

    let mut current: Vec<A> = mesh.nodes.iter().map(|&s| u0.rotate(s)).collect();
    let mut ends: Vec<A> = mesh.panels.iter().map(|&(_, b)| u0.rotate(b)).collect();
    let mut history = vec![sup(&current).max(sup(&ends)).max(u0.norm())];
    let mut differences = Vec::new();
    let mut ratios = Vec::new();
    let mut rising = 0;
    let mut pruned = 0;
    for _ in 0..params.max_iters {
        // e^{iωs} F(s) at every node
        let mut g = Vec::with_capacity(current.len());
        for (u, &s) in current.iter().zip(&mesh.nodes) {
            let mut f = mu.convolve(u).scaled(i);
            if params.lambda_sign != 0 {
                f = f.combine(-i * lambda, &nonlinear_term(u, params)?);
            }
            g.push(f.rotate(-s));
        }
        let (int_nodes, int_ends) = mesh.cumulative(&g);
        let mut next = Vec::with_capacity(current.len());
        for (int, &s) in int_nodes.iter().zip(&mesh.nodes) {
            let mut v = u0.combine(C64::new(1.0, 0.0), int).rotate(s);
            pruned += v.drop_small(params.prune_tol);
            if v.size() > params.max_atoms {
                return Err(Error::SupportExplosion { count: v.size(), cap: params.max_atoms });
            }
            next.push(v);
        }
        ends = int_ends
            .iter()
            .zip(&mesh.panels)
            .map(|(int, &(_, b))| {
                let mut v = u0.combine(C64::new(1.0, 0.0), int).rotate(b);
                v.drop_small(params.prune_tol);
                v
            })
            .collect();
        let diff = next.iter().zip(&current).map(|(a, b)| a.combine(C64::new(-1.0, 0.0), b).norm()).fold(0.0, f64::max);
        if let Some(&prev) = differences.last() {
            let ratio = if prev > 0.0 { diff / prev } else { 0.0 };
            ratios.push(ratio);
            rising = if ratio > 1.0 { rising + 1 } else { 0 };
            if rising >= 3 {
                return Err(Error::ContractionFailed { iterations: differences.len() + 1, ratio });
            }
        }
        differences.push(diff);
        current = next;
        history.push(sup(&current).max(sup(&ends)).max(u0.norm()));
        if diff < params.tol {
            break;
        }
    }

    // output on -T, …, 0, …, T
    let per = params.n_times;
    let mut times = Vec::with_capacity(2 * per + 1);
    let mut states = Vec::with_capacity(2 * per + 1);
    for p in (per..2 * per).rev() {
        times.push(mesh.panels[p].1);
        states.push(ends[p].clone());
    }
    times.push(0.0);
    states.push(u0.clone());
    for (panel, end) in mesh.panels.iter().zip(&ends).take(per) {
        times.push(panel.1);
        states.push(end.clone());
    }
    Ok(CoeffTrajectory {
        times,
        states,
        sup_norm_history: history,
        differences,
        ratios,
        budget,
        uncontrolled: !budget.controlled,
        pruned,
        notes,
    })
}

/// Mild solution on the torus by Picard iteration in `L^∞((-T,T); ℓ¹)`.
pub fn periodic_picard_solve(u0: &FourierCoeffs, mu: &FourierCoeffs, params: &WienerParams) -> Result<PeriodicTrajectory> {
    picard(u0, mu, params)
}

/// Mild solution on the line for atomic `û₀` and `μ̂`.
pub fn nonperiodic_picard_solve(
    u0_hat: &AtomicMeasure,
    mu_hat: &AtomicMeasure,
    params: &WienerParams,
) -> Result<MeasureTrajectory> {
    picard(u0_hat, mu_hat, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn convolution_examples() {
        let f = FourierCoeffs::from_pairs([(0, c(1.0, 2.0)), (3, c(-0.5, 0.0))]).unwrap();
        assert_eq!(l1_convolve(&f, &FourierCoeffs::unit(0)), f);
        assert_eq!(l1_convolve(&FourierCoeffs::unit(1), &FourierCoeffs::unit(2)), FourierCoeffs::unit(3));
        assert_eq!(convolution_power(&f, 1).unwrap(), f);
        assert_eq!(convolution_power(&FourierCoeffs::unit(1), 3).unwrap(), FourierCoeffs::unit(3));
        assert!(convolution_power(&f, 0).is_err());
    }

    #[test]
    fn conjugate_power_examples() {
        let e1 = FourierCoeffs::unit(1);
        let out = conjugate_power(&e1, 3).unwrap();
        assert!((out.get(1) - 1.0).norm() < 1e-15);
        assert!((out.l1_norm() - 1.0).abs() < 1e-15);
        assert!(matches!(conjugate_power(&e1, 4), Err(Error::EvenConjugatePower(4))));
    }

    #[test]
    fn periodic_group_phase() {
        let u = FourierCoeffs::unit(1);
        let out = periodic_group(&u, 1.0 / (4.0 * PI));
        assert!((out.get(1) + 1.0).norm() < 1e-14);
        assert_eq!(periodic_group(&u, 0.0), u);
    }

    #[test]
    fn measure_merging() {
        let m = AtomicMeasure::new(vec![(1.0, c(1.0, 0.0)), (1.0 + 1e-13, c(2.0, 0.0)), (-2.0, c(0.0, 1.0))]).unwrap();
        assert_eq!(m.len(), 2);
        assert!((m.weight_at(1.0) - 3.0).norm() < 1e-15);
        let a = AtomicMeasure::new(vec![(1.0, c(1.0, 0.0)), (2.0, c(1.0, 0.0))]).unwrap();
        let b = measure_convolve(&a, &AtomicMeasure::dirac(3.0, c(1.0, 0.0)));
        assert_eq!(b, AtomicMeasure::new(vec![(4.0, c(1.0, 0.0)), (5.0, c(1.0, 0.0))]).unwrap());
        assert_eq!(measure_convolve(&a, &AtomicMeasure::dirac(0.0, c(1.0, 0.0))), a);
    }

    #[test]
    fn serde_triples() {
        let f = FourierCoeffs::from_pairs([(-2, c(0.5, -1.0)), (4, c(0.0, 2.0))]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, "[[-2,0.5,-1.0],[4,0.0,2.0]]");
        assert_eq!(serde_json::from_str::<FourierCoeffs>(&s).unwrap(), f);
        let m = AtomicMeasure::new(vec![(0.25, c(1.0, 0.0))]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<AtomicMeasure>(&s).unwrap(), m);
    }

    #[test]
    fn params_validation() {
        assert!(WienerParams::new(2, 1, 0.5).is_ok());
        assert!(WienerParams::new(0, 1, 0.5).is_err());
        assert!(WienerParams::new(2, 2, 0.5).is_err());
        let p = WienerParams { dim: 2, ..WienerParams::new(2, 1, 0.5).unwrap() };
        assert!(p.validate().is_err());
        let p = WienerParams { nonlinearity: Nonlinearity::Gauge, ..WienerParams::new(2, 1, 0.5).unwrap() };
        assert!(matches!(p.validate(), Err(Error::EvenConjugatePower(2))));
    }
}
