//! Gaussian rules used inside the kernel and time quadratures.
//!
//! Nodes and weights come from `gauss-quad`; rules are cached per thread
//! because the kernel tables request the same orders many times.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use gauss_quad::{GaussJacobi, GaussLaguerre, GaussLegendre};

use crate::error::{Error, Result};

/// Nodes and weights of a quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    Legendre(usize),
    Laguerre(usize),
    Jacobi(usize, u64, u64),
}

thread_local! {
    static CACHE: RefCell<HashMap<Key, Rc<Rule>>> = RefCell::new(HashMap::new());
}

fn cached(key: Key, build: impl FnOnce() -> Result<Rule>) -> Result<Rc<Rule>> {
    if let Some(r) = CACHE.with(|c| c.borrow().get(&key).cloned()) {
        return Ok(r);
    }
    let rule = Rc::new(build()?);
    CACHE.with(|c| c.borrow_mut().insert(key, rule.clone()));
    Ok(rule)
}

/// Gauss–Legendre rule on `[-1, 1]`.
pub fn legendre(n: usize) -> Result<Rc<Rule>> {
    cached(Key::Legendre(n), || {
        let q = GaussLegendre::new(n).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Ok(Rule::from_pairs(q.as_node_weight_pairs()))
    })
}

/// Gauss–Laguerre rule for `∫_0^∞ e^{-x} f(x) dx`.
pub fn laguerre(n: usize) -> Result<Rc<Rule>> {
    cached(Key::Laguerre(n), || {
        let q = GaussLaguerre::new(n, 0.0).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Ok(Rule::from_pairs(q.as_node_weight_pairs()))
    })
}

/// Gauss–Jacobi rule for `∫_{-1}^{1} (1-x)^α (1+x)^β f(x) dx`.
///
/// Odd orders are rounded up: the backing implementation pins the middle node
/// of odd-order rules to 0, which is only correct when `α = β`.
pub fn jacobi(n: usize, alpha: f64, beta: f64) -> Result<Rc<Rule>> {
    let n = n + n % 2;
    cached(Key::Jacobi(n, alpha.to_bits(), beta.to_bits()), || {
        let q = GaussJacobi::new(n, alpha, beta).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Ok(Rule::from_pairs(q.as_node_weight_pairs()))
    })
}

/// Composite Gauss–Legendre nodes and weights on `[a, b]`.
pub fn composite_legendre(a: f64, b: f64, panels: usize, order: usize) -> Result<Vec<(f64, f64)>> {
    let rule = legendre(order)?;
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let mid = lo + 0.5 * width;
        for (x, w) in rule.iter() {
            out.push((mid + 0.5 * width * x, 0.5 * width * w));
        }
    }
    Ok(out)
}

/// Composite Gauss–Legendre approximation of `∫_a^b f`.
pub fn integrate<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, order: usize, mut f: F) -> Result<f64> {
    Ok(composite_legendre(a, b, panels, order)?.into_iter().map(|(x, w)| w * f(x)).sum())
}

/// `P_0(x), …, P_{n}(x)` by the three-term recurrence.
fn legendre_values(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![1.0, x];
    for k in 1..n {
        let kf = k as f64;
        p.push(((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0));
    }
    p.truncate(n + 1);
    p
}

/// `A[j][k] = ∫_{-1}^{x_j} ℓ_k(x) dx` for the Lagrange basis `ℓ_k` on the
/// `n`-point Gauss–Legendre nodes, so `Σ_k A[j][k] g(x_k)` integrates the
/// interpolant of `g` from `-1` to each node.
///
/// Uses `ℓ_k = w_k Σ_{m<n} (m+½) P_m(x_k) P_m` and
/// `∫_{-1}^x P_m = (P_{m+1}(x) - P_{m-1}(x))/(2m+1)`.
pub fn legendre_integration_matrix(n: usize) -> Result<(Rc<Rule>, Vec<Vec<f64>>)> {
    let rule = legendre(n)?;
    let at_nodes: Vec<Vec<f64>> = rule.nodes.iter().map(|&x| legendre_values(n, x)).collect();
    let a = (0..n)
        .map(|j| {
            let pj = &at_nodes[j];
            (0..n)
                .map(|k| {
                    let pk = &at_nodes[k];
                    let mut s = 0.5 * (pj[1] + 1.0);
                    for m in 1..n {
                        s += 0.5 * pk[m] * (pj[m + 1] - pj[m - 1]);
                    }
                    rule.weights[k] * s
                })
                .collect()
        })
        .collect();
    Ok((rule, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let v = integrate(0.0, 2.0, 1, 8, |x| x.powi(7)).unwrap();
        assert!((v - 2f64.powi(8) / 8.0).abs() < 1e-12);
    }

    #[test]
    fn laguerre_moments() {
        let r = laguerre(64).unwrap();
        // ∫ x^k e^{-x} = k!
        let m: f64 = r.iter().map(|(x, w)| w * x.powi(5)).sum();
        assert!((m - 120.0).abs() < 1e-9);
    }

    #[test]
    fn jacobi_beta_weights() {
        // ∫_{-1}^{1} (1-x)^α (1+x)^β dx = 2^{α+β+1} B(α+1, β+1)
        let (a, b) = (-1.0 / 3.0, -5.0 / 6.0);
        for n in [7, 8, 16] {
            let r = jacobi(n, a, b).unwrap();
            let total: f64 = r.weights.iter().sum();
            let exact = 2f64.powf(a + b + 1.0) * statrs::function::beta::beta(a + 1.0, b + 1.0);
            assert!((total - exact).abs() < 1e-10 * exact, "n={n}: {total} vs {exact}");
            let first: f64 = r.iter().map(|(x, w)| w * x).sum();
            // ∫ x (1-x)^α (1+x)^β via beta functions
            let bb = |p: f64, q: f64| statrs::function::beta::beta(p, q);
            let m1 = 2f64.powf(a + b + 1.0) * (2.0 * bb(a + 1.0, b + 2.0) - bb(a + 1.0, b + 1.0));
            assert!((first - m1).abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn integration_matrix_is_exact_on_polynomials() {
        let (rule, a) = legendre_integration_matrix(16).unwrap();
        for (j, &xj) in rule.nodes.iter().enumerate() {
            let approx: f64 = rule.nodes.iter().zip(&a[j]).map(|(&x, w)| w * x.powi(7)).sum();
            assert!((approx - (xj.powi(8) - 1.0) / 8.0).abs() < 1e-14);
        }
    }
}
