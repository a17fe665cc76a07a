//! Free kernel and the exponentially weighted integrals of it that make up the
//! δ and δ′ perturbation kernels.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::quadrature;

/// `S(x,t) = e^{ix²/(4t)} / √(4πit)`, principal branch of the square root.
pub fn free_kernel(x: f64, t: f64) -> C64 {
    let root = C64::new(0.0, 4.0 * PI * t).sqrt();
    C64::from_polar(1.0, x * x / (4.0 * t)) / root
}

/// `∫_0^∞ e^{-cu} S(u+z, t) du` for `c >= 0`, `z >= 0`, `t > 0`.
///
/// The path is rotated to `u = s e^{iπ/4}`, where the integrand decays like a
/// Gaussian times an exponential, and the ray integral is done by
/// Gauss–Laguerre after rescaling `s = v/r`. The order starts at 64 and is
/// doubled until successive values agree to `1e-8`.
pub fn exp_weighted_free_integral(c: f64, z: f64, t: f64) -> Result<C64> {
    if !(t > 0.0) || c < 0.0 || z < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "weighted kernel integral needs c >= 0, z >= 0, t > 0 (c={c}, z={z}, t={t})"
        )));
    }
    let mut prev = ray_integral(c, z, t, 64)?;
    let mut order = 128;
    loop {
        let next = ray_integral(c, z, t, order)?;
        if (next - prev).norm() < 1e-8 * next.norm().max(1e-3) || order >= 512 {
            return Ok(next);
        }
        prev = next;
        order *= 2;
    }
}

fn ray_integral(c: f64, z: f64, t: f64, order: usize) -> Result<C64> {
    let rule = quadrature::laguerre(order)?;
    let p = (c + z / (2.0 * t)) * FRAC_1_SQRT_2;
    let q = 1.0 / (4.0 * t).sqrt();
    let r = p + q;
    let omega = C64::from_polar(1.0, FRAC_PI_4);
    let i4t = C64::new(0.0, 1.0 / (4.0 * t));
    let mut acc = C64::new(0.0, 0.0);
    for (v, w) in rule.iter() {
        let s = v / r;
        let u = omega * s;
        let expo = v - c * u + i4t * (u + z) * (u + z);
        acc += w * expo.exp();
    }
    let root = C64::new(0.0, 4.0 * PI * t).sqrt();
    Ok(acc * omega / (r * root))
}

/// `I₊(c, k h) = ∫_0^∞ e^{-cu} S(u + kh) du` for `k = 0..=m`.
pub(crate) fn table_plus(c: f64, t: f64, h: f64, m: usize) -> Result<Vec<C64>> {
    (0..=m).map(|k| exp_weighted_free_integral(c, k as f64 * h, t)).collect()
}

/// `I₋(d, k h) = ∫_0^∞ e^{-du} S(u - kh) du` for `k = 0..=m`.
pub(crate) fn table_minus(d: f64, t: f64, h: f64, m: usize) -> Result<Vec<C64>> {
    let zs: Vec<f64> = (0..=m).map(|k| k as f64 * h).collect();
    minus_at_sorted(d, t, &zs)
}

/// `I₋(d, z)` at nondecreasing `z >= 0`.
///
/// Writes `I₋(d, z) = e^{-dz} I₊(d, 0) + J(z)` with
/// `J(z) = ∫_0^z e^{-d(z-v)} S(v) dv`, accumulated along the list through
/// `J(z') = e^{-d(z'-z)} J(z) + ∫_z^{z'} e^{-d(z'-v)} S(v) dv`.
pub(crate) fn minus_at_sorted(d: f64, t: f64, zs: &[f64]) -> Result<Vec<C64>> {
    if zs.first().is_some_and(|&z| z < 0.0) || zs.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("I₋ evaluation points must be sorted and nonnegative".into()));
    }
    let tail = exp_weighted_free_integral(d, 0.0, t)?;
    let rule = quadrature::legendre(16)?;
    let root = C64::new(0.0, 4.0 * PI * t).sqrt();
    let mut j = C64::new(0.0, 0.0);
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(zs.len());
    for &z in zs {
        if z > prev {
            // phase v²/4t changes by about v·Δv/2t across the step
            let phase_span = z * (z - prev) / (2.0 * t);
            let pieces = (phase_span / 3.0).ceil().max(1.0) as usize;
            let width = (z - prev) / pieces as f64;
            let mut seg = C64::new(0.0, 0.0);
            for p in 0..pieces {
                let mid = prev + (p as f64 + 0.5) * width;
                for (x, w) in rule.iter() {
                    let v = mid + 0.5 * width * x;
                    seg += 0.5 * width * w * C64::from_polar((-d * (z - v)).exp(), v * v / (4.0 * t));
                }
            }
            j = (-d * (z - prev)).exp() * j + seg / root;
            prev = z;
        }
        out.push((-d * z).exp() * tail + j);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct real-axis evaluation with an explicit cutoff, for comparison.
    fn brute_plus(c: f64, z: f64, t: f64) -> C64 {
        // ∫_0^U e^{-cu} S(u+z) du, U where e^{-cU} is negligible
        let upper = 40.0 / c;
        let nodes = quadrature::composite_legendre(0.0, upper, 20000, 8).unwrap();
        nodes.iter().map(|&(u, w)| w * (-c * u).exp() * free_kernel(u + z, t)).sum()
    }

    #[test]
    fn rotated_ray_matches_real_axis() {
        for &(c, z, t) in &[(1.0, 0.0, 0.5), (0.5, 2.0, 0.7), (2.0, 5.0, 0.2), (1.0, 0.3, 2.0)] {
            let a = exp_weighted_free_integral(c, z, t).unwrap();
            let b = brute_plus(c, z, t);
            assert!((a - b).norm() < 1e-7, "c={c} z={z} t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn minus_table_matches_real_axis() {
        let (d, t, h) = (0.5, 0.7, 0.05);
        let tab = table_minus(d, t, h, 100).unwrap();
        for k in [0usize, 7, 40, 100] {
            let z = k as f64 * h;
            let upper = 80.0 / d;
            let nodes = quadrature::composite_legendre(0.0, upper, 40000, 8).unwrap();
            let b: C64 = nodes.iter().map(|&(u, w)| w * (-d * u).exp() * free_kernel(u - z, t)).sum();
            assert!((tab[k] - b).norm() < 1e-7, "k={k}: {} vs {b}", tab[k]);
        }
    }
}
