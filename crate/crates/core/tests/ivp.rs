mod common;

use std::f64::consts::PI;

use common::{constant_model, shear_model};
use shearfront::diagnostics::{extinction_rate, speed_estimate};
use shearfront::ivp::{make_initial_profile, run, step, CylinderGrid, FieldState, InitialProfile, RunOptions, Simulator};
use shearfront::Error;

fn unit_profile() -> InitialProfile {
    InitialProfile {
        decay: 0.5,
        fuel_decay: 1.0,
        c1: 1.0,
        c2: 1.0,
        c3: 1.0,
        plateau: 1.0,
    }
}

#[test]
fn initial_profile_values() {
    let m = constant_model(9, 1.0, 0.25);
    let grid = CylinderGrid::new(-20.0, 20.0, 41).unwrap();
    let s = make_initial_profile(&grid, &m, &unit_profile()).unwrap();
    let at = |x: f64| grid.xs().iter().position(|v| *v == x).unwrap();
    let (i2, i0, im) = (at(2.0), at(0.0), at(-5.0));
    assert!((s.temperature[s.index(i2, 4)] - (-1.0f64).exp()).abs() < 1e-15);
    assert_eq!(s.fuel[s.index(i0, 0)], 0.0);
    assert_eq!(s.temperature[s.index(im, 8)], 1.0);
}

#[test]
fn infeasible_plateau() {
    let m = constant_model(9, 1.0, 0.25);
    let grid = CylinderGrid::new(-20.0, 20.0, 41).unwrap();
    let p = InitialProfile {
        plateau: 2.0,
        ..unit_profile()
    };
    assert!(matches!(make_initial_profile(&grid, &m, &p), Err(Error::SandwichInfeasible(_))));
}

#[test]
fn refinement_keeps_shared_nodes() {
    let m = constant_model(9, 1.0, 0.25);
    let coarse = CylinderGrid::new(-20.0, 80.0, 201).unwrap();
    let fine = CylinderGrid::new(-20.0, 80.0, 401).unwrap();
    let a = make_initial_profile(&coarse, &m, &unit_profile()).unwrap();
    let b = make_initial_profile(&fine, &m, &unit_profile()).unwrap();
    for i in 0..201 {
        assert_eq!(coarse.xs()[i], fine.xs()[2 * i]);
        for j in 0..9 {
            assert_eq!(a.temperature[a.index(i, j)], b.temperature[b.index(2 * i, j)]);
            assert_eq!(a.fuel[a.index(i, j)], b.fuel[b.index(2 * i, j)]);
        }
    }
}

#[test]
fn constant_fuel_without_heat_is_an_equilibrium() {
    let m = shear_model(17);
    let grid = CylinderGrid::new(0.0, 40.0, 81).unwrap();
    let mut s = FieldState::uniform(81, 17, 0.0, 0.7);
    let sim = Simulator::new(&m, &grid, 0.01).unwrap();
    for _ in 0..20 {
        sim.step(&mut s).unwrap();
    }
    assert!(s.temperature.iter().all(|t| *t == 0.0));
    assert!(s.fuel.iter().all(|y| (y - 0.7).abs() < 1e-14));
}

#[test]
fn zero_temperature_stays_zero() {
    let m = shear_model(17);
    let grid = CylinderGrid::new(0.0, 40.0, 161).unwrap();
    let mut s = FieldState::uniform(161, 17, 0.0, 0.0);
    for i in 0..161 {
        let y = 0.5 * (1.0 + ((grid.xs()[i] - 20.0) / 3.0).tanh());
        for j in 0..17 {
            let k = s.index(i, j);
            s.fuel[k] = y;
        }
    }
    let before = s.fuel.clone();
    let sim = Simulator::new(&m, &grid, 0.01).unwrap();
    for _ in 0..50 {
        sim.step(&mut s).unwrap();
    }
    assert!(s.temperature.iter().all(|t| *t == 0.0));
    assert!(s.fuel.iter().all(|y| (0.0..=1.0).contains(y)));
    assert_ne!(s.fuel, before);
}

#[test]
fn conservation_without_reaction() {
    let m = constant_model(17, 1.0, 0.3).without_reaction_unchecked();
    let grid = CylinderGrid::new(0.0, 40.0, 161).unwrap();
    let mut s = FieldState::uniform(161, 17, 0.0, 0.0);
    for i in 0..161 {
        for j in 0..17 {
            let x = grid.xs()[i];
            let k = s.index(i, j);
            s.temperature[k] = (-(x - 20.0).powi(2) / 4.0).exp() * (1.0 + 0.5 * (PI * j as f64 / 16.0).cos());
            s.fuel[k] = 0.5 * (-(x - 15.0).powi(2)).exp();
        }
    }
    let total = |v: &[f64]| {
        let dx = grid.dx();
        let rows: Vec<f64> = v.chunks(17).map(|r| m.quadrature(r)).collect();
        dx * (rows.iter().sum::<f64>() - 0.5 * (rows[0] + rows[160]))
    };
    let (t0, y0) = (total(&s.temperature), total(&s.fuel));
    let dt = 0.01;
    let sim = Simulator::new(&m, &grid, dt).unwrap();
    let n = 100;
    for _ in 0..n {
        sim.step(&mut s).unwrap();
    }
    // Each step scales total heat by exactly (1 − q dt); diffusion conserves.
    let expect = t0 * (1.0 - 0.3 * dt).powi(n);
    assert!((total(&s.temperature) - expect).abs() <= 1e-12 * t0);
    assert!((total(&s.fuel) - y0).abs() <= 1e-12 * y0);
}

#[test]
fn single_mode_matches_linear_symbol() {
    // u = 0, a = 1, q = 0.25; T ≪ 1 so Y stays at 1 to O(T).
    let m = constant_model(33, 1.0, 0.25);
    let (len, n_x) = (40.0, 401);
    let grid = CylinderGrid::new(0.0, len, n_x).unwrap();
    let k = 4.0 * PI / len;
    let eps = 1e-8;
    let mode = |i: usize, j: usize| (k * grid.xs()[i]).cos() * (PI * j as f64 / 32.0).cos();
    let mut s = FieldState::uniform(n_x, 33, 0.0, 1.0);
    for i in 0..n_x {
        for j in 0..33 {
            let idx = s.index(i, j);
            s.temperature[idx] = eps * (1.0 + 0.5 * mode(i, j));
        }
    }
    let project = |st: &FieldState| -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n_x {
            let wx = if i == 0 || i == n_x - 1 { 0.5 } else { 1.0 };
            for j in 0..33 {
                let wy = if j == 0 || j == 32 { 0.5 } else { 1.0 };
                let p = mode(i, j);
                num += wx * wy * p * st.temperature[st.index(i, j)];
                den += wx * wy * p * p;
            }
        }
        num / den
    };
    let a0 = project(&s);
    let dt = 1e-3;
    let steps = 200;
    let sim = Simulator::new(&m, &grid, dt).unwrap();
    for _ in 0..steps {
        sim.step(&mut s).unwrap();
    }
    let rate = (project(&s) / a0).ln() / (steps as f64 * dt);
    // Oracle: the symbol of ∂t T = ΔT + (a − q) T on this mode.
    let symbol = 1.0 - 0.25 - k * k - PI * PI;
    assert!((rate - symbol).abs() <= 0.02 * symbol.abs(), "{rate} vs {symbol}");
}

#[test]
fn step_rejects_unstable_dt() {
    let m = shear_model(9);
    let grid = CylinderGrid::new(0.0, 40.0, 801).unwrap();
    let s = FieldState::uniform(801, 9, 0.0, 1.0);
    assert!(matches!(step(&s, &m, &grid, 0.05), Err(Error::CflViolation { .. })));
    assert!(step(&s, &m, &grid, 0.01).is_ok());
}

#[test]
fn zero_horizon_returns_initial_row() {
    let m = constant_model(9, 1.0, 0.25);
    let grid = CylinderGrid::new(-20.0, 80.0, 401).unwrap();
    let s = make_initial_profile(&grid, &m, &unit_profile()).unwrap();
    let sim = Simulator::for_horizon(&m, &grid, 0.0, 0.01).unwrap();
    let out = run(&sim, s, &RunOptions::new(0.0, 10), |_, _| Ok(())).unwrap();
    assert_eq!(out.rows.len(), 1);
    assert_eq!(out.steps, 0);
}

#[test]
fn extinction_sup_bound() {
    let m = constant_model(9, 1.0, 1.5);
    let grid = CylinderGrid::new(-20.0, 80.0, 801).unwrap();
    let p = InitialProfile {
        c1: 0.01,
        c2: 0.01,
        c3: 1e-3,
        plateau: 0.01,
        ..unit_profile()
    };
    let s = make_initial_profile(&grid, &m, &p).unwrap();
    let sup0 = s.sup_temperature();
    let sim = Simulator::for_horizon(&m, &grid, 10.0, 0.01).unwrap();
    let out = run(&sim, s, &RunOptions::new(10.0, 50), |_, _| Ok(())).unwrap();
    assert!(out.state.sup_temperature() <= sup0 * (-5.0f64).exp() * 1.5);
    let series: Vec<(f64, f64)> = out.rows.iter().map(|r| (r.t, r.sup_t)).collect();
    let g = extinction_rate(&series).unwrap();
    assert!((g - 0.5).abs() <= 0.05, "{g}");
}

#[test]
fn propagation_on_a_coarse_grid() {
    let m = constant_model(9, 1.0, 0.25);
    let grid = CylinderGrid::new(-20.0, 80.0, 1001).unwrap();
    let s = make_initial_profile(&grid, &m, &unit_profile()).unwrap();
    let sim = Simulator::for_horizon(&m, &grid, 20.0, 0.01).unwrap();
    let out = run(&sim, s, &RunOptions::new(20.0, 50), |_, _| Ok(())).unwrap();
    assert!(out.boundary_touched.is_none());
    let track: Vec<(f64, f64)> = out.rows.iter().filter_map(|r| r.front_pos_t.map(|x| (r.t, x))).collect();
    let fit = speed_estimate(&track, 0.5).unwrap();
    assert!((fit.speed - 2.0).abs() <= 0.1 && fit.r2 > 0.999, "{fit:?}");
    let decay = out.rows.last().unwrap().decay_rate_right.unwrap();
    assert!((decay - 0.5).abs() <= 0.025, "{decay}");
}

#[test]
fn guard_stops_the_run() {
    let m = constant_model(9, 1.0, 0.25);
    let grid = CylinderGrid::new(-20.0, 20.0, 401).unwrap();
    let s = make_initial_profile(&grid, &m, &unit_profile()).unwrap();
    let sim = Simulator::for_horizon(&m, &grid, 20.0, 0.01).unwrap();
    let out = run(&sim, s, &RunOptions::new(20.0, 50), |_, _| Ok(())).unwrap();
    assert!(matches!(out.boundary_touched, Some(Error::FrontTouchedBoundary { .. })));
    assert!(out.state.t < 20.0);
}
