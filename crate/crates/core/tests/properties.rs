use num_rational::Ratio;
use proptest::prelude::*;
use singular_nls::grid::{convolve, halfline_split, reflect};
use singular_nls::lorentz::{decreasing_rearrangement, lorentz_norm, weak_lp_norm};
use singular_nls::nls::{exponents_exact, rho0};
use singular_nls::spectral::{generalized_eigenfunction, scattering};
use singular_nls::wiener::{
    convolution_power, l1_convolve, measure_convolve, periodic_group, AtomicMeasure, FourierCoeffs,
};
use singular_nls::{Grid, GridFunction, C64};

/// Hölder constant for `(p,∞)` norms built on `f**`, measured once on random
/// bump sums (worst ratio 1.085) and frozen.
const HOLDER_C: f64 = 1.5;

fn grid() -> Grid {
    Grid::symmetric_with_spacing(8.0, 0.02).unwrap()
}

/// Sum of up to three complex Gaussians, optionally with an integrable spike.
fn bumps() -> impl Strategy<Value = GridFunction> {
    prop::collection::vec((-4.0..4.0f64, 0.2..10.0f64, -2.0..2.0f64, -2.0..2.0f64, 0.0..0.8f64), 1..4).prop_map(|bs| {
        GridFunction::from_fn(grid(), move |x| {
            bs.iter()
                .map(|&(c, w, re, im, s)| C64::new(re, im) * (-w * (x - c).powi(2)).exp() / (1e-2 + (x - c).abs()).powf(s))
                .sum()
        })
    })
}

fn complex() -> impl Strategy<Value = C64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| C64::new(a, b))
}

fn coeffs() -> impl Strategy<Value = FourierCoeffs> {
    prop::collection::vec((-6i64..=6, complex()), 1..6).prop_map(|v| FourierCoeffs::from_pairs(v).unwrap())
}

fn measure() -> impl Strategy<Value = AtomicMeasure> {
    prop::collection::vec((-5.0..5.0f64, complex()), 1..6).prop_map(|v| AtomicMeasure::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_reconstructs(f in bumps()) {
        let (minus, plus) = halfline_split(&f).unwrap();
        let back = minus.add(&reflect(&plus).unwrap()).unwrap();
        prop_assert!(back.sub(&f).unwrap().sup_norm() <= 1e-12 * f.sup_norm().max(1.0));
    }

    #[test]
    fn convolution_is_linear(f in bumps(), g in bumps(), k in -4i32..4, c in complex()) {
        let base = convolve(&f, &g).unwrap();
        // powers of two commute with every rounding step
        let two = C64::new(2f64.powi(k), 0.0);
        prop_assert_eq!(convolve(&f.scale(two), &g).unwrap(), base.scale(two));
        let scaled = convolve(&f.scale(c), &g).unwrap();
        prop_assert!(scaled.sub(&base.scale(c)).unwrap().sup_norm() <= 1e-11 * (c.norm() * base.sup_norm()).max(1e-300));
    }

    #[test]
    fn integration_is_linear_and_conjugation_equivariant(f in bumps(), g in bumps(), c in complex()) {
        prop_assert_eq!(f.conj().integrate(), f.integrate().conj());
        let lhs = f.axpy(c, &g).unwrap().integrate();
        let rhs = f.integrate() + c * g.integrate();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + f.l1_norm() + c.norm() * g.l1_norm()));
    }

    #[test]
    fn rearrangement_shape_and_mass(f in bumps()) {
        let p = decreasing_rearrangement(&f);
        prop_assert!(p.fstar.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(p.fstar.iter().zip(&p.fstarstar).all(|(a, b)| *b >= *a * (1.0 - 1e-15)));
        let mass: f64 = f.values().iter().map(|v| v.norm()).sum::<f64>() * f.grid().spacing();
        prop_assert!((p.mass() - mass).abs() <= 1e-10 * mass.max(1.0));
    }

    #[test]
    fn weak_norm_homogeneity(f in bumps(), c in complex(), p in 1.1..10.0f64) {
        let a = weak_lp_norm(&f.scale(c), p).unwrap();
        let b = c.norm() * weak_lp_norm(&f, p).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
    }

    #[test]
    fn holder_with_frozen_constant(f in bumps(), g in bumps(), q1 in 2.05..8.0f64, q2 in 2.05..8.0f64) {
        let r = 1.0 / (1.0 / q1 + 1.0 / q2);
        let lhs = weak_lp_norm(&f.mul(&g).unwrap(), r).unwrap();
        let rhs = weak_lp_norm(&f, q1).unwrap() * weak_lp_norm(&g, q2).unwrap();
        prop_assert!(lhs <= HOLDER_C * rhs, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn lorentz_two_two_is_l2(f in bumps()) {
        let a = lorentz_norm(&f, 2.0, 2.0).unwrap();
        let b = (f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * f.grid().spacing()).sqrt();
        prop_assert!((a - b).abs() <= 1e-8 * b.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn scattering_identities(sigma in -20.0..20.0f64, lambda in 1e-3..20.0f64, flip in any::<bool>()) {
        let lambda = if flip { -lambda } else { lambda };
        let p = scattering(sigma, lambda).unwrap();
        let m = scattering(sigma, -lambda).unwrap();
        prop_assert!((p.t_coeff.norm_sqr() + p.r_coeff.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!((p.r_coeff + 1.0 - p.t_coeff).norm() < 1e-12);
        prop_assert!((m.r_coeff * p.t_coeff + p.r_coeff * m.t_coeff).norm() < 1e-14);
        prop_assert!((m.r_coeff * p.r_coeff + m.t_coeff * p.t_coeff - 1.0).norm() < 1e-14);
    }

    #[test]
    fn generalized_eigenfunction_is_continuous(sigma in -10.0..10.0f64, lambda in -10.0..10.0f64) {
        prop_assume!(lambda.abs() > 1e-6);
        let a = generalized_eigenfunction(sigma, lambda, 1e-300);
        let b = generalized_eigenfunction(sigma, lambda, -1e-300);
        prop_assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn exponent_identity_for_rational_rho(num in 5i64..400, den in 1i64..60) {
        let rho = Ratio::new(num, den);
        prop_assume!(num as f64 / den as f64 > rho0());
        let (theta, zeta) = exponents_exact(rho).unwrap();
        prop_assert_eq!(Ratio::from_integer(1) - zeta - theta * rho, -theta);
    }

    #[test]
    fn young_for_coefficients(f in coeffs(), g in coeffs()) {
        prop_assert!(l1_convolve(&f, &g).l1_norm() <= f.l1_norm() * g.l1_norm() + 1e-12);
    }

    #[test]
    fn young_for_measures(m in measure(), n in measure()) {
        prop_assert!(measure_convolve(&m, &n).total_variation() <= m.total_variation() * n.total_variation() + 1e-12);
    }

    #[test]
    fn group_preserves_l1(f in coeffs(), t in -5.0..5.0f64) {
        let a = periodic_group(&f, t).l1_norm();
        prop_assert!((a - f.l1_norm()).abs() <= 1e-14 * f.l1_norm());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn telescoping_bound(u in coeffs(), v in coeffs(), rho in 1u32..5) {
        let d = convolution_power(&u, rho).unwrap().sub(&convolution_power(&v, rho).unwrap()).l1_norm();
        let (nu, nv) = (u.l1_norm(), v.l1_norm());
        let bound = rho as f64 * u.sub(&v).l1_norm() * (nu.powi(rho as i32 - 1) + nv.powi(rho as i32 - 1));
        prop_assert!(d <= bound * (1.0 + 1e-12) + 1e-12);
    }
}
