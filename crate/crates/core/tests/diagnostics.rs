mod common;

use common::constant_model;
use shearfront::diagnostics::{
    crossing, decay_rate_on, front_position, left_plateau_y, right_decay_rate, speed_estimate, time_decay_rate, Field,
};
use shearfront::ivp::{CylinderGrid, FieldState};
use shearfront::Error;

fn state_from(grid: &CylinderGrid, n_y: usize, t: impl Fn(f64, usize) -> f64, y: impl Fn(f64) -> f64) -> FieldState {
    let mut s = FieldState::uniform(grid.n_x(), n_y, 0.0, 0.0);
    for (i, &x) in grid.xs().iter().enumerate() {
        for j in 0..n_y {
            let k = s.index(i, j);
            s.temperature[k] = t(x, j);
            s.fuel[k] = y(x);
        }
    }
    s
}

#[test]
fn smoothed_step_located() {
    let m = constant_model(9, 1.0, 0.25);
    let grid = CylinderGrid::new(-20.0, 40.0, 601).unwrap();
    let s = state_from(&grid, 9, |_, _| 0.0, |x| 0.5 * (1.0 + (x - 10.0).tanh()));
    let x = front_position(&m, &grid, &s, Field::Fuel, Some(0.5)).unwrap();
    assert!((x - 10.0).abs() <= grid.dx());
    assert!(matches!(
        front_position(&m, &grid, &s, Field::Temperature, None),
        Err(Error::NoCrossing { .. })
    ));
}

#[test]
fn translation_equivariance() {
    let m = constant_model(9, 1.0, 0.25);
    let grid = CylinderGrid::new(-20.0, 40.0, 601).unwrap();
    let profile = |x: f64| 1.0 / (1.0 + (1.3 * (x - 3.7)).exp());
    let shift = 37;
    let s = state_from(&grid, 9, |x, _| profile(x), |x| 1.0 - profile(x));
    let moved = state_from(&grid, 9, |x, _| profile(x - shift as f64 * grid.dx()), |x| 1.0 - profile(x - shift as f64 * grid.dx()));
    for f in [Field::Temperature, Field::Fuel] {
        let a = front_position(&m, &grid, &s, f, Some(0.5)).unwrap();
        let b = front_position(&m, &grid, &moved, f, Some(0.5)).unwrap();
        assert!((b - a - shift as f64 * grid.dx()).abs() < 1e-9, "{f:?}: {a} {b}");
    }
}

#[test]
fn decay_fit_exact_and_scale_invariant() {
    let m = constant_model(9, 1.0, 0.25);
    let grid = CylinderGrid::new(-20.0, 80.0, 1001).unwrap();
    let phi = |j: usize| 1.0 + 0.1 * j as f64;
    let s = state_from(&grid, 9, |x, j| (-0.5 * x.max(0.0)).exp() * phi(j), |_| 1.0);
    let r = right_decay_rate(&m, &grid, &s, (10.0, 20.0)).unwrap();
    assert!((r - 0.5).abs() < 1e-6, "{r}");
    let doubled = state_from(&grid, 9, |x, j| 2.0 * (-0.5 * x.max(0.0)).exp() * phi(j), |_| 1.0);
    let r2 = right_decay_rate(&m, &grid, &doubled, (10.0, 20.0)).unwrap();
    assert!((r - r2).abs() < 1e-12);
    assert!(matches!(
        decay_rate_on(grid.xs(), &vec![1.0; 1001], 70.0, 90.0),
        Err(Error::RegionOutsideGrid { .. })
    ));
    assert!(matches!(
        decay_rate_on(grid.xs(), &vec![0.0; 1001], 10.0, 20.0),
        Err(Error::UnderflowRegion)
    ));
}

#[test]
fn speed_of_a_noisy_line() {
    let samples: Vec<(f64, f64)> = (0..40)
        .map(|k| {
            let t = k as f64 * 0.5;
            let noise = 0.001 * ((k * 7919 % 13) as f64 / 13.0 - 0.5);
            (t, 2.0 * t + 3.0 + noise)
        })
        .collect();
    let fit = speed_estimate(&samples, 0.5).unwrap();
    assert!((fit.speed - 2.0).abs() <= 0.01 && fit.r2 > 0.999);

    let flat: Vec<(f64, f64)> = (0..12).map(|k| (k as f64, 4.0)).collect();
    assert_eq!(speed_estimate(&flat, 0.5).unwrap().speed, 0.0);
    assert!(matches!(speed_estimate(&flat[..9], 0.5), Err(Error::TooFewSamples { .. })));
}

#[test]
fn plateau_and_time_decay() {
    let m = constant_model(9, 1.0, 0.25);
    let grid = CylinderGrid::new(-20.0, 80.0, 1001).unwrap();
    let s = state_from(&grid, 9, |_, _| 0.0, |x| if x < 0.0 { 0.3 } else { 1.0 });
    assert!((left_plateau_y(&m, &grid, &s).unwrap() - 0.3).abs() < 1e-15);

    let burning = state_from(&grid, 9, |_, _| 0.0, |x| 0.5 * (1.0 + (x + 15.0).tanh()));
    assert!(matches!(left_plateau_y(&m, &grid, &burning), Err(Error::FrontInStrip)));

    let series: Vec<(f64, f64)> = (0..30).map(|k| (k as f64 * 0.5, 3.0 * (-0.5 * k as f64 * 0.5).exp())).collect();
    assert!((time_decay_rate(&series, 0.0, 100.0).unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn crossing_picks_rightmost() {
    let xs: Vec<f64> = (0..6).map(|i| i as f64).collect();
    let t = [1.0, 0.2, 0.9, 0.8, 0.1, 0.0];
    let x = crossing(&xs, &t, 0.5, Field::Temperature).unwrap();
    assert!((x - (3.0 + 0.3 / 0.7)).abs() < 1e-14);
}
