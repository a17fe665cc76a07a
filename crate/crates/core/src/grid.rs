//! Uniform grids and complex grid functions.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when matching node positions.
const NODE_TOL: f64 = 1e-9;

/// A uniform grid `x_min = x_0 < x_1 < ... < x_{n-1} = x_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::InvalidGrid("non-finite endpoint".into()));
        }
        if x_min >= x_max {
            return Err(Error::InvalidGrid(format!("x_min {x_min} >= x_max {x_max}")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need n >= 2, got {n}")));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Grid on `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    /// Symmetric grid with spacing close to `h` and a node at the origin.
    pub fn symmetric_with_spacing(half_width: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {h}")));
        }
        let half = (half_width / h).round().max(1.0) as usize;
        Self::new(-(half as f64) * h, half as f64 * h, 2 * half + 1)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (self.x_min + self.x_max).abs() <= NODE_TOL * self.spacing()
    }

    /// Index of the node located at `x`, if any.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let h = self.spacing();
        let k = ((x - self.x_min) / h).round();
        if k < 0.0 || k > (self.n - 1) as f64 {
            return None;
        }
        let i = k as usize;
        ((self.x(i) - x).abs() <= NODE_TOL * h.max(x.abs())).then_some(i)
    }

    pub fn contains_node(&self, x: f64) -> bool {
        self.node_index(x).is_some()
    }

    /// Trapezoid weights.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.spacing();
        let mut w = vec![h; self.n];
        w[0] = 0.5 * h;
        w[self.n - 1] = 0.5 * h;
        w
    }

    fn require_symmetric(&self) -> Result<()> {
        if self.is_symmetric() {
            Ok(())
        } else {
            Err(Error::AsymmetricGrid)
        }
    }
}

/// Complex samples on a [`Grid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<C64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.n,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> C64) -> Self {
        let values = (0..grid.n).map(|i| f(grid.x(i))).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| C64::new(f(x), 0.0))
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![C64::new(0.0, 0.0); grid.n] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    /// Composite trapezoid approximation of `∫ f dx`.
    pub fn integrate(&self) -> C64 {
        let h = self.grid.spacing();
        let n = self.values.len();
        let inner: C64 = self.values[1..n - 1].iter().sum();
        (inner + 0.5 * (self.values[0] + self.values[n - 1])) * h
    }

    fn integrate_real(&self, f: impl Fn(C64) -> f64) -> f64 {
        let h = self.grid.spacing();
        let n = self.values.len();
        let inner: f64 = self.values[1..n - 1].iter().map(|&v| f(v)).sum();
        (inner + 0.5 * (f(self.values[0]) + f(self.values[n - 1]))) * h
    }

    pub fn l1_norm(&self) -> f64 {
        self.integrate_real(|v| v.norm())
    }

    pub fn l2_norm(&self) -> f64 {
        self.integrate_real(|v| v.norm_sqr()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `⟨f, g⟩ = ∫ f conj(g) dx`.
    pub fn inner(&self, other: &GridFunction) -> Result<C64> {
        self.check_same_grid(other)?;
        let prod: Vec<C64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .collect();
        Ok(GridFunction { grid: self.grid, values: prod }.integrate())
    }

    /// `‖f‖₂` for a function that jumps at the node `x0`; see [`Self::inner_with_jump`].
    pub fn l2_norm_with_jump(&self, x0: f64) -> Result<f64> {
        Ok(self.inner_with_jump(self, x0)?.re.max(0.0).sqrt())
    }

    /// `∫ f ḡ` for functions that may jump at the node `x0`: each side is
    /// integrated separately, with the one-sided limits at `x0` extrapolated
    /// by a cubic through the four neighbouring nodes on that side.
    pub fn inner_with_jump(&self, other: &GridFunction, x0: f64) -> Result<C64> {
        self.check_same_grid(other)?;
        let c = self
            .grid
            .node_index(x0)
            .ok_or_else(|| Error::InvalidGrid(format!("{x0} is not a grid node")))?;
        let n = self.grid.n;
        if c < 4 || c + 4 >= n {
            return Err(Error::InvalidGrid("jump node too close to the grid edge".into()));
        }
        let (u, v) = (&self.values, &other.values);
        let left = |w: &[C64]| 4.0 * w[c - 1] - 6.0 * w[c - 2] + 4.0 * w[c - 3] - w[c - 4];
        let right = |w: &[C64]| 4.0 * w[c + 1] - 6.0 * w[c + 2] + 4.0 * w[c + 3] - w[c + 4];
        let p = |a: C64, b: C64| a * b.conj();
        let mut acc = 0.5 * (p(u[0], v[0]) + p(left(u), left(v)) + p(right(u), right(v)) + p(u[n - 1], v[n - 1]));
        acc += (1..c).chain(c + 1..n - 1).map(|i| p(u[i], v[i])).sum::<C64>();
        Ok(acc * self.grid.spacing())
    }

    /// Largest modulus among the `k` outermost nodes at each end.
    pub fn edge_amplitude(&self, k: usize) -> f64 {
        let n = self.values.len();
        let k = k.min(n / 2).max(1);
        self.values[..k]
            .iter()
            .chain(&self.values[n - k..])
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, c: C64) -> GridFunction {
        self.map(|v| v * c)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> GridFunction {
        GridFunction { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn map_indexed(&self, f: impl Fn(f64, C64) -> C64) -> GridFunction {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(self.grid.x(i), v))
            .collect();
        GridFunction { grid: self.grid, values }
    }

    pub fn conj(&self) -> GridFunction {
        self.map(|v| v.conj())
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, |a, b| a * b)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: C64, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, |a, b| a + c * b)
    }

    pub fn zip_with(
        &self,
        other: &GridFunction,
        f: impl Fn(C64, C64) -> C64,
    ) -> Result<GridFunction> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(GridFunction { grid: self.grid, values })
    }

    pub fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        let (a, b) = (self.grid, other.grid);
        let h = a.spacing();
        if a.n != b.n || (a.x_min - b.x_min).abs() > NODE_TOL * h || (a.x_max - b.x_max).abs() > NODE_TOL * h {
            return Err(Error::IncompatibleGrids(format!("{a:?} vs {b:?}")));
        }
        Ok(())
    }
}

/// `χ₋` on the grid with weight ½ at the origin node.
pub fn chi_minus(grid: &Grid) -> GridFunction {
    half_mask(grid, |x| x < 0.0)
}

/// `χ₊` on the grid with weight ½ at the origin node.
pub fn chi_plus(grid: &Grid) -> GridFunction {
    half_mask(grid, |x| x > 0.0)
}

fn half_mask(grid: &Grid, inside: impl Fn(f64) -> bool) -> GridFunction {
    let zero = grid.node_index(0.0);
    let values = (0..grid.n)
        .map(|i| {
            if Some(i) == zero {
                C64::new(0.5, 0.0)
            } else if inside(grid.x(i)) {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    GridFunction { grid: *grid, values }
}

/// `g(x) = f(-x)`.
pub fn reflect(f: &GridFunction) -> Result<GridFunction> {
    f.grid.require_symmetric()?;
    let mut values = f.values.clone();
    values.reverse();
    Ok(GridFunction { grid: f.grid, values })
}

/// Splits `f = φ⁻ + R φ⁺` with both parts supported on `x <= 0`.
pub fn halfline_split(f: &GridFunction) -> Result<(GridFunction, GridFunction)> {
    let chi = chi_minus(&f.grid);
    let minus = f.mul(&chi)?;
    let plus = reflect(f)?.mul(&chi)?;
    Ok((minus, plus))
}

/// Linear convolution `h Σ f(y_i) g(x - y_i)` restricted to `f`'s grid.
///
/// `g` may live on a different grid with the same spacing, provided its nodes
/// are aligned with the lattice `hℤ`.
pub fn convolve(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    let h = f.grid.spacing();
    let hg = g.grid.spacing();
    if (h - hg).abs() > NODE_TOL * h {
        return Err(Error::IncompatibleGrids(format!("spacing {h} vs {hg}")));
    }
    let shift_f = f.grid.x_min / h;
    let shift_g = g.grid.x_min / h;
    let c = shift_g.round();
    if (shift_g - c).abs() > 1e-6 || (shift_f - shift_f.round()).abs() > 1e-6 {
        return Err(Error::IncompatibleGrids("grids not aligned with the lattice hZ".into()));
    }
    let c = c as i64;
    let (nf, ng) = (f.values.len(), g.values.len());
    let len = (nf + ng - 1).next_power_of_two();
    let mut a = vec![C64::new(0.0, 0.0); len];
    let mut b = vec![C64::new(0.0, 0.0); len];
    a[..nf].copy_from_slice(&f.values);
    b[..ng].copy_from_slice(&g.values);
    fft_forward(&mut a);
    fft_forward(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    fft_inverse(&mut a);
    let scale = h / len as f64;
    let full = (nf + ng - 1) as i64;
    let values = (0..nf as i64)
        .map(|m| {
            let k = m - c;
            if (0..full).contains(&k) {
                a[k as usize] * scale
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(GridFunction { grid: f.grid, values })
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if forward {
            p.plan_fft_forward(len)
        } else {
            p.plan_fft_inverse(len)
        }
    })
}

/// Unnormalised forward DFT `Σ x_j e^{-2πi jk/N}`.
pub(crate) fn fft_forward(buf: &mut [C64]) {
    plan(buf.len(), true).process(buf);
}

/// Unnormalised inverse DFT `Σ x_k e^{+2πi jk/N}`.
pub(crate) fn fft_inverse(buf: &mut [C64]) {
    plan(buf.len(), false).process(buf);
}

/// Angular frequencies of an `n`-point DFT with sample spacing `h`.
pub(crate) fn angular_frequencies(n: usize, h: f64) -> Vec<f64> {
    let dk = 2.0 * std::f64::consts::PI / (n as f64 * h);
    (0..n)
        .map(|j| {
            let j = if j < n.div_ceil(2) { j as f64 } else { j as f64 - n as f64 };
            j * dk
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn trapezoid_exact_for_linear() {
        let g = Grid::new(0.0, 1.0, 101).unwrap();
        assert_eq!(GridFunction::from_real_fn(g, |_| 1.0).integrate(), c(1.0));
        let lin = GridFunction::from_real_fn(g, |x| x).integrate();
        assert!((lin.re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gaussian_integral() {
        let g = Grid::symmetric(10.0, 4001).unwrap();
        let v = GridFunction::from_real_fn(g, |x| (-x * x).exp()).integrate();
        assert!((v.re - std::f64::consts::PI.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(1.0, 0.0, 10).is_err());
        assert!(Grid::new(0.0, 1.0, 1).is_err());
        let g = Grid::new(0.0, 1.0, 3).unwrap();
        assert!(GridFunction::new(g, vec![c(0.0); 2]).is_err());
        assert!(GridFunction::new(g, vec![c(0.0), c(f64::NAN), c(0.0)]).is_err());
    }

    #[test]
    fn convolution_identity() {
        let g = Grid::symmetric(5.0, 101).unwrap();
        let h = g.spacing();
        let f = GridFunction::from_real_fn(g, |x| (-(x - 0.7).powi(2)).exp() * (1.0 + x));
        let delta = GridFunction::from_real_fn(g, |x| if x.abs() < h / 2.0 { 1.0 / h } else { 0.0 });
        let out = convolve(&f, &delta).unwrap();
        for (a, b) in out.values().iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn tent_function() {
        let g = Grid::new(-1.0, 3.0, 401).unwrap();
        let ind = GridFunction::from_real_fn(g, |x| if (-1e-9..=1.0 + 1e-9).contains(&x) { 1.0 } else { 0.0 });
        let out = convolve(&ind, &ind).unwrap();
        let h = g.spacing();
        for i in 0..g.n() {
            let x = g.x(i);
            // discrete tent: h * #{overlapping nodes}
            let tent = if (0.0..=2.0).contains(&x) { 1.0 - (x - 1.0).abs() } else { 0.0 };
            assert!((out.values()[i].re - tent).abs() <= 1.5 * h, "x={x}");
        }
        let peak = g.node_index(1.0).unwrap();
        assert!((out.values()[peak].re - 1.0).abs() <= 1.01 * h);
    }

    #[test]
    fn convolution_rejects_spacing_mismatch() {
        let f = GridFunction::zeros(Grid::new(0.0, 1.0, 11).unwrap());
        let g = GridFunction::zeros(Grid::new(0.0, 1.0, 21).unwrap());
        assert!(matches!(convolve(&f, &g), Err(Error::IncompatibleGrids(_))));
    }

    #[test]
    fn reflection_and_split() {
        let g = Grid::symmetric(4.0, 81).unwrap();
        let f = GridFunction::from_real_fn(g, |x| x);
        let r = reflect(&f).unwrap();
        for i in 0..g.n() {
            assert!((r.values()[i].re + g.x(i)).abs() < 1e-12);
        }
        let ones = GridFunction::from_real_fn(g, |_| 1.0);
        let (m, p) = halfline_split(&ones).unwrap();
        let back = m.add(&reflect(&p).unwrap()).unwrap();
        for v in back.values() {
            assert!((v - c(1.0)).norm() < 1e-12);
        }
        let asym = GridFunction::zeros(Grid::new(-1.0, 2.0, 31).unwrap());
        assert_eq!(reflect(&asym), Err(Error::AsymmetricGrid));
        assert_eq!(halfline_split(&asym).map(|_| ()), Err(Error::AsymmetricGrid));
    }

    #[test]
    fn split_of_right_gaussian() {
        let g = Grid::symmetric(10.0, 2001).unwrap();
        let f = GridFunction::from_real_fn(g, |x| (-(x - 2.0).powi(2)).exp());
        let (m, p) = halfline_split(&f).unwrap();
        assert!(m.sup_norm() < 2e-2);
        for i in 0..g.n() {
            let x = g.x(i);
            if x < 0.0 {
                assert!((p.values()[i].re - (-(x + 2.0).powi(2)).exp()).abs() < 1e-14);
            }
        }
    }
}
