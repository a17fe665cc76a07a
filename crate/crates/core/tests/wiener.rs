use std::f64::consts::PI;

use singular_nls::acceptance::galerkin_reference;
use singular_nls::wiener::{
    conjugate_power, convolution_power, lipschitz_bound, measure_group, nonperiodic_picard_solve, periodic_group,
    periodic_picard_solve, AtomicMeasure, FourierCoeffs, Nonlinearity, WienerParams,
};
use singular_nls::{Error, Grid, GridFunction, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn sample() -> FourierCoeffs {
    FourierCoeffs::from_pairs([(-1, c(0.02, 0.01)), (0, c(0.01, 0.0)), (2, c(0.0, -0.015))]).unwrap()
}

fn linear_params(t_max: f64) -> WienerParams {
    WienerParams::new(2, 0, t_max).unwrap()
}

#[test]
fn free_run_is_the_group_after_one_iteration() {
    let u0 = sample();
    let sol = periodic_picard_solve(&u0, &FourierCoeffs::new(), &linear_params(0.4)).unwrap();
    assert_eq!(sol.iterations(), 1);
    assert_eq!(sol.times.len(), 17);
    for (t, s) in sol.times.iter().zip(&sol.states) {
        assert!(s.sub(&periodic_group(&u0, *t)).l1_norm() < 1e-15, "t={t}");
    }
}

#[test]
fn constant_potential_is_a_phase() {
    let u0 = sample();
    let cst = 0.7;
    let sol = periodic_picard_solve(&u0, &FourierCoeffs::mode(0, c(cst, 0.0)), &linear_params(0.4)).unwrap();
    for (t, s) in sol.times.iter().zip(&sol.states) {
        let exact = periodic_group(&u0, *t).scale(C64::from_polar(1.0, cst * t));
        let err = s.sub(&exact).l1_norm();
        assert!(err < 1e-8, "t={t}: {err:e}");
    }
}

#[test]
fn quadratic_run_matches_galerkin() {
    let u0 = FourierCoeffs::mode(1, c(0.05, 0.0));
    let mu = FourierCoeffs::mode(0, c(0.1, 0.0));
    let params = WienerParams { n_times: 10, ..WienerParams::new(2, 1, 0.5).unwrap() };
    let sol = periodic_picard_solve(&u0, &mu, &params).unwrap();
    assert!(sol.budget.controlled && !sol.uncontrolled);
    assert!(sol.sup_norm() <= 0.1);
    let reference = galerkin_reference(&u0, &mu, 2, 1.0, 16, &sol.times, 1e-4);
    for ((t, a), b) in sol.times.iter().zip(&sol.states).zip(&reference) {
        let gap = a.sub(b).l1_norm();
        assert!(gap < 1e-5, "t={t}: {gap:e}");
    }
    assert!(sol.sup_norm_history.iter().all(|&v| v <= 2.0 * u0.l1_norm()));
}

#[test]
fn two_mode_binomial() {
    let (a, b) = (c(0.3, -0.2), c(1.1, 0.4));
    let f = FourierCoeffs::from_pairs([(0, a), (1, b)]).unwrap();
    let sq = convolution_power(&f, 2).unwrap();
    assert_eq!(sq.len(), 3);
    for (m, want) in [(0, a * a), (1, 2.0 * a * b), (2, b * b)] {
        assert!((sq.get(m) - want).norm() < 1e-15, "m={m}");
    }
}

#[test]
fn conjugate_power_of_real_symmetric_data() {
    // real even u: û real and symmetric, so |u|²u = u³
    let f = FourierCoeffs::from_pairs([(-2, c(0.1, 0.0)), (-1, c(0.4, 0.0)), (0, c(1.0, 0.0)), (1, c(0.4, 0.0)), (2, c(0.1, 0.0))])
        .unwrap();
    let a = conjugate_power(&f, 3).unwrap();
    let b = convolution_power(&f, 3).unwrap();
    assert!(a.sub(&b).l1_norm() < 1e-14);
    let g = sample();
    for rho in [3, 5] {
        assert!(conjugate_power(&g, rho).unwrap().l1_norm() <= g.l1_norm().powi(rho as i32) * (1.0 + 1e-12));
    }
    // pointwise check against |u|^{ρ-1}u
    let out = conjugate_power(&g, 3).unwrap();
    for x in [0.0, 0.13, 0.71] {
        let u = g.evaluate(x);
        assert!((out.evaluate(x) - u.norm_sqr() * u).norm() < 1e-15);
    }
}

#[test]
fn gauge_run_preserves_phase_rotation() {
    // |u|²u commutes with constant phases, so the solution from e^{iφ}u₀ is e^{iφ}u
    let u0 = sample();
    let params = WienerParams { nonlinearity: Nonlinearity::Gauge, ..WienerParams::new(3, -1, 0.3).unwrap() };
    let a = periodic_picard_solve(&u0, &FourierCoeffs::new(), &params).unwrap();
    let rot = C64::from_polar(1.0, 0.9);
    let b = periodic_picard_solve(&u0.scale(rot), &FourierCoeffs::new(), &params).unwrap();
    for (x, y) in a.states.iter().zip(&b.states) {
        assert!(x.scale(rot).sub(y).l1_norm() < 1e-13);
    }
    let bad = WienerParams { rho: 4, ..params };
    assert_eq!(periodic_picard_solve(&u0, &FourierCoeffs::new(), &bad).unwrap_err(), Error::EvenConjugatePower(4));
}

#[test]
fn lipschitz_dependence_on_data() {
    let u0 = FourierCoeffs::mode(1, c(0.05, 0.0));
    let mu = FourierCoeffs::mode(0, c(0.1, 0.0));
    let params = WienerParams::new(2, 1, 0.5).unwrap();
    let a = periodic_picard_solve(&u0, &mu, &params).unwrap();
    let bound = lipschitz_bound(a.budget.lipschitz_q);
    for k in 0..5 {
        let pert = FourierCoeffs::from_pairs([(k - 2, c(1e-3, 5e-4 * k as f64))]).unwrap();
        let b = periodic_picard_solve(&u0.axpy(c(1.0, 0.0), &pert), &mu, &params).unwrap();
        let d = a.states.iter().zip(&b.states).map(|(x, y)| x.sub(y).l1_norm()).fold(0.0, f64::max);
        assert!(d <= bound * pert.l1_norm(), "k={k}: {} vs {bound}", d / pert.l1_norm());
    }
}

#[test]
fn rho_one_is_flagged_and_large_data_uncontrolled() {
    let u0 = sample();
    let sol = periodic_picard_solve(&u0, &FourierCoeffs::new(), &WienerParams::new(1, 1, 0.2).unwrap()).unwrap();
    assert!(sol.notes.iter().any(|n| n.contains("rho = 1")));
    // ρ = 1, λ = 1: the term -iλu is a phase e^{-it}
    for (t, s) in sol.times.iter().zip(&sol.states) {
        let exact = periodic_group(&u0, *t).scale(C64::from_polar(1.0, -t));
        assert!(s.sub(&exact).l1_norm() < 1e-10);
    }
    let big = FourierCoeffs::mode(0, c(2.0, 0.0));
    match periodic_picard_solve(&big, &FourierCoeffs::new(), &WienerParams::new(3, 1, 0.3).unwrap()) {
        Ok(sol) => assert!(sol.uncontrolled),
        Err(e) => assert!(matches!(e, Error::ContractionFailed { .. }), "{e}"),
    }
}

#[test]
fn measure_free_and_zero_frequency_runs() {
    let m = AtomicMeasure::new(vec![(0.3, c(0.02, 0.0)), (-1.7, c(0.0, 0.01))]).unwrap();
    let sol = nonperiodic_picard_solve(&m, &AtomicMeasure::default(), &linear_params(0.3)).unwrap();
    for (t, s) in sol.times.iter().zip(&sol.states) {
        assert!(s.sub(&measure_group(&m, *t)).total_variation() < 1e-15);
        let w = s.weight_at(0.3);
        let phase = C64::from_polar(1.0, -4.0 * PI * PI * 0.09 * t);
        assert!((w - 0.02 * phase).norm() < 1e-15);
    }
    let still = AtomicMeasure::dirac(0.0, c(0.04, 0.0));
    let sol = nonperiodic_picard_solve(&still, &AtomicMeasure::default(), &linear_params(0.3)).unwrap();
    assert!(sol.states.iter().all(|s| *s == still));
}

#[test]
fn lattice_measure_matches_periodic_solver() {
    let u0 = FourierCoeffs::from_pairs([(-1, c(0.05, 0.0)), (1, c(0.05, 0.0))]).unwrap();
    let mu = FourierCoeffs::mode(0, c(0.1, 0.0));
    let params = WienerParams::new(2, 1, 0.3).unwrap();
    let per = periodic_picard_solve(&u0, &mu, &params).unwrap();
    let line = nonperiodic_picard_solve(&AtomicMeasure::from_lattice(&u0), &AtomicMeasure::from_lattice(&mu), &params).unwrap();
    assert_eq!(per.times, line.times);
    for (a, b) in per.states.iter().zip(&line.states) {
        let gap = AtomicMeasure::from_lattice(a).sub(b).total_variation();
        assert!(gap < 1e-8, "{gap:e}");
    }
}

#[test]
fn support_cap_is_enforced() {
    let m = AtomicMeasure::new((0..12).map(|k| (k as f64 * 0.37 + 0.01 * (k * k) as f64, c(0.004, 0.0))).collect()).unwrap();
    let params = WienerParams { max_atoms: 40, ..WienerParams::new(3, 1, 0.2).unwrap() };
    let err = nonperiodic_picard_solve(&m, &AtomicMeasure::default(), &params).unwrap_err();
    assert!(matches!(err, Error::SupportExplosion { cap: 40, .. }), "{err}");
}

#[test]
fn density_data_decays_in_space() {
    // û₀ = h·e^{-ξ²} on a lattice of spacing h; u(·,t) is then periodic with
    // period 1/h, so the tail is probed inside one period
    let g = Grid::symmetric_with_spacing(4.0, 0.05).unwrap();
    let density = GridFunction::from_real_fn(g, |xi| 0.02 * (-xi * xi).exp());
    let u0 = AtomicMeasure::from_density(&density);
    let params = WienerParams { n_times: 4, ..WienerParams::new(2, 1, 0.05).unwrap() };
    let sol = nonperiodic_picard_solve(&u0, &AtomicMeasure::default(), &params).unwrap();
    let state = sol.at(0.05).unwrap();
    let tail = |x0: f64| (0..200).map(|k| x0 + k as f64 * (9.0 - x0) / 199.0).map(|x| state.evaluate(x).norm()).fold(0.0, f64::max);
    let tails: Vec<f64> = [0.5, 1.0, 2.0, 4.0].into_iter().map(tail).collect();
    assert!(tails.windows(2).all(|w| w[1] < w[0]), "{tails:?}");
    assert!(tails[3] < 1e-3 * tails[0], "{tails:?}");
}
