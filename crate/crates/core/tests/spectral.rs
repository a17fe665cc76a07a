use singular_nls::spectral::{
    bound_states, generalized_eigenfunction, generalized_fourier, lambda_nodes, lambert_w0, two_delta_kappas,
    two_delta_residual, Eigenfunction,
};
use singular_nls::{Error, Grid, GridFunction, PointInteraction, C64};

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let up = f(hi) > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == up {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn lambert_at_one() {
    let oracle = bisect(|w| w * w.exp() - 1.0, 0.0, 1.0);
    assert!((lambert_w0(1.0).unwrap() - oracle).abs() < 1e-12);
    assert!((oracle - 0.5671432904).abs() < 1e-10);
}

#[test]
fn two_delta_on_the_transition_line() {
    // a·α = -1 is refused, but the Lambert formula still gives one even state
    assert_eq!(bound_states(&PointInteraction::TwoDelta { alpha: -1.0, a: 1.0 }), Err(Error::ExcludedParameterLine));
    let kappas = two_delta_kappas(-1.0, 1.0).unwrap();
    assert_eq!(kappas.len(), 1);
    let gamma = -kappas[0] * kappas[0];
    let kappa = bisect(|k| 2.0 * k - 1.0 - (-2.0 * k).exp(), 1e-9, 1.0);
    assert!((gamma + kappa * kappa).abs() < 1e-10, "{gamma} vs {}", -kappa * kappa);
    let w = lambert_w0((-1.0f64).exp()).unwrap();
    assert!((gamma + 0.25 * (w + 1.0).powi(2)).abs() < 1e-14);
    assert!(two_delta_residual(gamma, -1.0, 1.0) < 1e-10);
}

#[test]
fn two_delta_states_off_the_line() {
    for (alpha, a, count) in [(-1.0, 0.6, 1), (-1.0, 1.4, 2), (-2.0, 3.0, 2), (1.0, 1.0, 0)] {
        let states = bound_states(&PointInteraction::TwoDelta { alpha, a }).unwrap();
        assert_eq!(states.len(), count, "alpha={alpha} a={a}");
        for s in &states {
            assert!(s.gamma < 0.0);
            assert!(two_delta_residual(s.gamma, alpha, a) < 1e-10);
        }
    }
}

fn all_attractive_states() -> Vec<(f64, Eigenfunction, Vec<f64>)> {
    let mut out = Vec::new();
    for pi in [
        PointInteraction::Delta { sigma: -2.0 },
        PointInteraction::Delta { sigma: -0.7 },
        PointInteraction::DeltaPrime { beta: -2.0 },
        PointInteraction::DeltaPrime { beta: -3.0 },
        PointInteraction::TwoDelta { alpha: -1.0, a: 1.5 },
    ] {
        let singular = match pi {
            PointInteraction::TwoDelta { a, .. } => vec![-a, a],
            _ => vec![0.0],
        };
        for s in bound_states(&pi).unwrap() {
            out.push((s.gamma, s.eigenfunction, singular.clone()));
        }
    }
    out
}

#[test]
fn eigenfunctions_are_normalized() {
    let g = Grid::symmetric_with_spacing(80.0, 0.001).unwrap();
    for (gamma, ef, singular) in all_attractive_states() {
        let f = ef.sample(&g);
        // the δ′ state jumps at 0; its midpoint value would bias the trapezoid sum
        let norm = if matches!(ef, Eigenfunction::DeltaPrime { .. }) { f.l2_norm_with_jump(0.0).unwrap() } else { f.l2_norm() };
        // kinks at the singular points leave an O(h²) trapezoid error
        assert!((norm - 1.0).abs() < 1e-6, "gamma={gamma} {singular:?}: {norm}");
    }
}

#[test]
fn eigenfunctions_solve_the_ode_away_from_singular_points() {
    let h = 1e-3;
    for (gamma, ef, singular) in all_attractive_states() {
        for x in [-4.3, -2.1, -0.6, 0.4, 1.1, 2.7, 5.0] {
            if singular.iter().any(|&s| (x - s).abs() < 2.0 * h) {
                continue;
            }
            let d2 = (ef.eval(x + h) - 2.0 * ef.eval(x) + ef.eval(x - h)) / (h * h);
            // truncation h²γ²|ψ|/12 plus rounding of order ε/h²
            let tol = h * h * gamma * gamma * ef.eval(x).abs() + 1e-9;
            assert!((-d2 - gamma * ef.eval(x)).abs() < tol, "gamma={gamma} x={x}");
        }
    }
}

#[test]
fn deltaprime_state_is_odd_with_robin_jump() {
    for beta in [-2.0, -0.5, -3.0] {
        let ef = Eigenfunction::DeltaPrime { beta };
        for x in [0.1, 0.7, 3.0] {
            assert_eq!(ef.eval(-x), -ef.eval(x));
        }
        let h = 1e-3;
        let left = (25.0 * ef.eval_side(0.0, -1.0) - 48.0 * ef.eval(-h) + 36.0 * ef.eval(-2.0 * h) - 16.0 * ef.eval(-3.0 * h)
            + 3.0 * ef.eval(-4.0 * h))
            / (12.0 * h);
        let jump = ef.eval_side(0.0, 1.0) - ef.eval_side(0.0, -1.0);
        assert!((jump - beta * left).abs() < 1e-6, "beta={beta}: {jump} vs {}", beta * left);
    }
}

#[test]
fn free_eigenfunction_is_a_plane_wave() {
    for x in [-2.0, 0.0, 1.3] {
        assert_eq!(generalized_eigenfunction(0.0, 1.7, x), C64::from_polar(1.0, 1.7 * x));
    }
}

#[test]
fn generalized_fourier_examples() {
    let g = Grid::symmetric_with_spacing(20.0, 0.005).unwrap();
    let gauss = GridFunction::from_real_fn(g, |x| (-(x - 0.5).powi(2)).exp());
    let lams: Vec<f64> = (0..41).map(|k| -5.0 + 0.25 * k as f64).collect();

    // σ = 0: (2π)^{-1/2} ∫ e^{-(x-½)²} e^{-iλx} dx = 2^{-1/2} e^{-λ²/4} e^{-iλ/2}
    let tr = generalized_fourier(&gauss, 0.0, &lams);
    for (l, v) in lams.iter().zip(&tr.values) {
        let exact = C64::from_polar((-l * l / 4.0).exp() / 2f64.sqrt(), -l / 2.0);
        assert!((v - exact).norm() < 1e-6, "lambda={l}");
    }
    assert!(!tr.decay_warning);

    let psi = Eigenfunction::Delta { sigma: -2.0 }.sample(&g);
    let tr = generalized_fourier(&psi, -2.0, &lams);
    let worst = tr.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert!(worst < 1e-4, "{worst:e}");

    // Plancherel for σ = 3 (no bound states)
    let nodes = lambda_nodes(14.0, 56, 16).unwrap();
    let ls: Vec<f64> = nodes.iter().map(|n| n.0).collect();
    let tr = generalized_fourier(&gauss, 3.0, &ls);
    let mass: f64 = tr.values.iter().zip(&nodes).map(|(v, n)| v.norm_sqr() * n.1).sum();
    let norm2 = gauss.l2_norm().powi(2);
    assert!((mass - norm2).abs() < 1e-3, "{mass} vs {norm2}");
}
