mod common;

use common::{constant_model, shear_model};
use shearfront::diagnostics::{mass_balance_residual, y_inf_bound_a_star, DEFAULT_DECAY_WINDOW};
use shearfront::dispersion::{k_of_lambda, minimal_speed};
use shearfront::front::{
    build_sandwich, lambda_c, minimal_speed_front, phi_a_map, solve_front, FrontOptions,
};
use shearfront::Error;

fn small(n_x: usize) -> FrontOptions {
    FrontOptions {
        half_length: 40.0,
        n_x,
        tol: 1e-10,
        ..FrontOptions::default()
    }
}

#[test]
fn lambda_c_examples() {
    let m = constant_model(9, 1.0, 0.25);
    assert!((lambda_c(&m, 2.0).unwrap() - 0.5).abs() < 1e-14);
    let ms = minimal_speed(&m).unwrap();
    let near = lambda_c(&m, ms.c_star * (1.0 + 1e-6)).unwrap();
    assert!(near < ms.lambda_star && ms.lambda_star - near < 1e-2);

    let s = shear_model(65);
    let ms = minimal_speed(&s).unwrap();
    let c = ms.c_star + 1.0;
    let l = lambda_c(&s, c).unwrap();
    let h = |x: f64| k_of_lambda(&s, x).unwrap() - c * x;
    assert!(h(l - 1e-4) > 0.0 && h(l + 1e-4) < 0.0);
}

#[test]
fn shear_sandwich_verifies() {
    let m = shear_model(33);
    let ms = minimal_speed(&m).unwrap();
    let b = build_sandwich(&m, ms.c_star + 0.5, 40.0, 401).unwrap();
    b.verify(&m).unwrap();
    assert!(b.eta > 0.0 && b.epsilon > 0.0 && b.delta > 0.0);
}

#[test]
fn slow_speed_rejected_up_front() {
    let m = constant_model(9, 1.0, 0.25);
    let err = solve_front(&m, 1.5, &small(201)).unwrap_err();
    assert!(matches!(err, Error::SpeedNotAdmissible { .. }), "{err}");
}

#[test]
fn phi_map_respects_the_extreme_pairs() {
    let m = shear_model(9);
    let ms = minimal_speed(&m).unwrap();
    let b = build_sandwich(&m, ms.c_star + 0.5, 40.0, 401).unwrap();
    let (t, _) = phi_a_map(&m, &b, &b.t_lower, &b.y_lower).unwrap();
    let below = t.iter().zip(&b.t_lower).map(|(t, l)| l - t).fold(f64::NEG_INFINITY, f64::max);
    assert!(below <= 1e-10, "T dips below T_lower by {below}");

    let ones = vec![1.0; b.t_upper.len()];
    let (t, y) = phi_a_map(&m, &b, &b.t_upper, &ones).unwrap();
    let above = t.iter().zip(&b.t_upper).map(|(t, u)| t - u).fold(f64::NEG_INFINITY, f64::max);
    assert!(above <= 1e-10, "T exceeds T_upper by {above}");
    assert!(y.iter().all(|v| *v <= 1.0 + 1e-12));
}

#[test]
fn converged_front_is_a_fixed_point() {
    let m = constant_model(5, 1.0, 0.25);
    let f = solve_front(&m, 2.0, &small(201)).unwrap().into_converged().unwrap();
    assert!(f.in_sandwich());
    let (t, y) = phi_a_map(&m, &f.bounds, &f.temperature, &f.fuel).unwrap();
    let gap = t
        .iter()
        .zip(&f.temperature)
        .chain(y.iter().zip(&f.fuel))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(gap <= 1e-8, "{gap}");

    let peak = f.temperature.iter().cloned().fold(0.0, f64::max);
    assert!(f.residual <= 1e-6 * peak);
    let a_star = y_inf_bound_a_star(&m, f.bounds.beta).unwrap();
    assert!(f.y_inf > 0.0 && f.y_inf < a_star);
    let decay = f.right_decay_rate(&m, DEFAULT_DECAY_WINDOW).unwrap();
    assert!((decay - 0.5).abs() <= 0.01, "{decay}");
}

#[test]
fn mass_balance_improves_under_refinement() {
    let m = constant_model(5, 1.0, 0.25);
    let coarse = solve_front(&m, 2.0, &small(201)).unwrap();
    let fine = solve_front(&m, 2.0, &small(401)).unwrap();
    let (rc, rf) = (mass_balance_residual(&m, &coarse).unwrap(), mass_balance_residual(&m, &fine).unwrap());
    assert!(rc <= 0.05 && rf < rc, "{rc} {rf}");

    let mut unconverged = coarse.clone();
    unconverged.converged = false;
    assert!(matches!(mass_balance_residual(&m, &unconverged), Err(Error::NotConverged)));
}

#[test]
fn iteration_budget_is_reported() {
    let m = constant_model(5, 1.0, 0.25);
    let opts = FrontOptions {
        max_iter: 3,
        ..small(101)
    };
    let f = solve_front(&m, 2.0, &opts).unwrap();
    assert!(!f.converged && f.iterations == 3);
    assert!(matches!(f.into_converged(), Err(Error::NoConvergence { .. })));
}

#[test]
fn minimal_speed_sequence() {
    let m = constant_model(5, 1.0, 0.25);
    // dx = 0.1: at dx = 0.4 the discrete tail decays 5% slower than λ_c.
    let opts = FrontOptions {
        tol: 1e-8,
        ..small(801)
    };
    let f = minimal_speed_front(&m, &opts).unwrap();
    let ms = minimal_speed(&m).unwrap();
    assert!((f.c - ms.c_star * (1.0 + 1.0 / 64.0)).abs() < 1e-12);
    assert_eq!(f.sequence.len(), 6);
    let a_star = y_inf_bound_a_star(&m, f.bounds.beta).unwrap();
    for (_, y_inf) in &f.sequence {
        assert!(*y_inf < a_star + 1e-3);
    }
    assert!(f.fuel_front(&m).unwrap().abs() <= f.dx());
    let decay = f.right_decay_rate(&m, DEFAULT_DECAY_WINDOW).unwrap();
    let lc = lambda_c(&m, f.c).unwrap();
    assert!((decay - lc).abs() <= 0.05 * lc, "{decay} vs {lc}");
}
