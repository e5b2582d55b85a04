//! Lie-split time stepping of the reaction-advection-diffusion system on a
//! truncated cylinder [x_min, x_max] × ω, Neumann on every wall.

use std::io::Write;

use rayon::prelude::*;

use crate::cross_section::CrossSectionModel;
use crate::diagnostics::{self, Field};
use crate::error::{Error, Result};
use crate::output::{num, opt_num};
use crate::tridiag::{implicit_neumann_diffusion, TridiagLu};

/// Minimum x-extent of the truncated cylinder.
pub const MIN_WIDTH: f64 = 40.0;
/// Rounding-level bound violations below this are clamped instead of reported.
pub const CLAMP_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_GUARD_MARGIN: f64 = 5.0;
pub const DEFAULT_DT_MAX: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct CylinderGrid {
    x_min: f64,
    x_max: f64,
    xs: Vec<f64>,
    dx: f64,
}

impl CylinderGrid {
    pub fn new(x_min: f64, x_max: f64, n_x: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max - x_min < MIN_WIDTH {
            return Err(Error::BadGrid(format!(
                "x-extent [{x_min}, {x_max}] is shorter than {MIN_WIDTH}"
            )));
        }
        if n_x < 3 {
            return Err(Error::BadGrid(format!("n_x = {n_x} < 3")));
        }
        let m = (n_x - 1) as f64;
        let dx = (x_max - x_min) / m;
        // Shared nodes of a refined grid get bit-identical coordinates.
        let xs = (0..n_x)
            .map(|i| (x_min * (m - i as f64) + x_max * i as f64) / m)
            .collect();
        Ok(Self { x_min, x_max, xs, dx })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_x(&self) -> usize {
        self.xs.len()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }
}

/// Temperature and fuel on the grid, stored x-major (`i * n_y + j`).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub n_x: usize,
    pub n_y: usize,
    pub temperature: Vec<f64>,
    pub fuel: Vec<f64>,
}

impl FieldState {
    pub fn uniform(n_x: usize, n_y: usize, temperature: f64, fuel: f64) -> Self {
        Self {
            t: 0.0,
            n_x,
            n_y,
            temperature: vec![temperature; n_x * n_y],
            fuel: vec![fuel; n_x * n_y],
        }
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_y + j
    }

    pub fn field(&self, field: Field) -> &[f64] {
        match field {
            Field::Temperature => &self.temperature,
            Field::Fuel => &self.fuel,
        }
    }

    pub fn sup_temperature(&self) -> f64 {
        self.temperature.iter().cloned().fold(0.0, f64::max)
    }

    /// Checks T ≥ 0 and 0 ≤ Y ≤ 1, clamping rounding-level violations.
    pub fn enforce_bounds(&mut self) -> Result<()> {
        let n_y = self.n_y;
        for (k, v) in self.temperature.iter_mut().enumerate() {
            if *v < 0.0 {
                if *v < -CLAMP_TOLERANCE || v.is_nan() {
                    return Err(Error::BoundInvariantBroken {
                        field: "T",
                        i: k / n_y,
                        j: k % n_y,
                        value: *v,
                    });
                }
                *v = 0.0;
            } else if v.is_nan() {
                return Err(Error::BoundInvariantBroken {
                    field: "T",
                    i: k / n_y,
                    j: k % n_y,
                    value: *v,
                });
            }
        }
        for (k, v) in self.fuel.iter_mut().enumerate() {
            if !(*v >= -CLAMP_TOLERANCE && *v <= 1.0 + CLAMP_TOLERANCE) {
                return Err(Error::BoundInvariantBroken {
                    field: "Y",
                    i: k / n_y,
                    j: k % n_y,
                    value: *v,
                });
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(())
    }
}

/// Initial data with C1 e^{−λx} ≤ T₀ ≤ C2 e^{−λx} and 1 − Y₀ ≤ C3 e^{−λ′x}
/// for x ≥ 0, and T₀ = plateau behind x = 0.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialProfile {
    pub decay: f64,
    pub fuel_decay: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub plateau: f64,
}

pub fn make_initial_profile(grid: &CylinderGrid, model: &CrossSectionModel, p: &InitialProfile) -> Result<FieldState> {
    for (name, v) in [
        ("decay", p.decay),
        ("fuel_decay", p.fuel_decay),
        ("c1", p.c1),
        ("c2", p.c2),
        ("c3", p.c3),
        ("plateau", p.plateau),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::BadParameter(format!("{name} must be positive, got {v}")));
        }
    }
    if p.c1 > p.c2 {
        return Err(Error::SandwichInfeasible(format!("c1 = {} exceeds c2 = {}", p.c1, p.c2)));
    }
    if p.plateau < p.c1 || p.plateau > p.c2 {
        return Err(Error::SandwichInfeasible(format!(
            "plateau {} outside [c1, c2] = [{}, {}]",
            p.plateau, p.c1, p.c2
        )));
    }
    let n_y = model.n_y();
    let mut state = FieldState::uniform(grid.n_x(), n_y, 0.0, 0.0);
    for (i, &x) in grid.xs().iter().enumerate() {
        let (t0, y0) = if x <= 0.0 {
            (p.plateau, if x < 0.0 { (1.0 - p.c3).max(0.0) } else { 1.0 - p.c3.min(1.0) })
        } else {
            let e = (-p.decay * x).exp();
            let t0 = (p.plateau * e).clamp(p.c1 * e, p.c2 * e);
            (t0, 1.0 - (p.c3 * (-p.fuel_decay * x).exp()).min(1.0))
        };
        if x >= 0.0 {
            let e = (-p.decay * x).exp();
            debug_assert!(t0 >= p.c1 * e * (1.0 - 1e-14) && t0 <= p.c2 * e * (1.0 + 1e-14));
            debug_assert!(1.0 - y0 <= p.c3 * (-p.fuel_decay * x).exp() + 1e-15);
        }
        for j in 0..n_y {
            let k = state.index(i, j);
            state.temperature[k] = t0;
            state.fuel[k] = y0;
        }
    }
    Ok(state)
}

/// Largest admissible step: advective CFL 0.9·Δx/max|u| and the explicit
/// loss bound 0.5/K. Diffusion is implicit and imposes no limit.
pub fn stability_limit(model: &CrossSectionModel, grid: &CylinderGrid) -> f64 {
    let umax = model.max_abs_flow();
    let cfl = if umax > 0.0 { 0.9 * grid.dx() / umax } else { f64::INFINITY };
    cfl.min(0.5 / model.loss().global_bound)
}

/// Time stepper with the implicit diffusion factors precomputed for a fixed Δt.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    model: &'a CrossSectionModel,
    grid: &'a CylinderGrid,
    dt: f64,
    heat_x: TridiagLu,
    heat_y: TridiagLu,
    fuel_x: TridiagLu,
    fuel_y: TridiagLu,
}

impl<'a> Simulator<'a> {
    pub fn new(model: &'a CrossSectionModel, grid: &'a CylinderGrid, dt: f64) -> Result<Self> {
        let limit = stability_limit(model, grid);
        if !(dt > 0.0) || dt > limit {
            return Err(Error::CflViolation { dt, limit });
        }
        let le_inv = 1.0 / model.lewis();
        Ok(Self {
            model,
            grid,
            dt,
            heat_x: implicit_neumann_diffusion(grid.n_x(), grid.dx(), 1.0, dt),
            heat_y: implicit_neumann_diffusion(model.n_y(), model.dy(), 1.0, dt),
            fuel_x: implicit_neumann_diffusion(grid.n_x(), grid.dx(), le_inv, dt),
            fuel_y: implicit_neumann_diffusion(model.n_y(), model.dy(), le_inv, dt),
        })
    }

    /// Largest step not exceeding `dt_max` or the stability limit that
    /// divides `t_end` into a whole number of steps.
    pub fn for_horizon(model: &'a CrossSectionModel, grid: &'a CylinderGrid, t_end: f64, dt_max: f64) -> Result<Self> {
        let bound = stability_limit(model, grid).min(dt_max);
        let dt = if t_end > 0.0 {
            t_end / (t_end / bound).ceil()
        } else {
            bound
        };
        Self::new(model, grid, dt)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn model(&self) -> &CrossSectionModel {
        self.model
    }

    pub fn grid(&self) -> &CylinderGrid {
        self.grid
    }

    fn check_shape(&self, state: &FieldState) -> Result<()> {
        if state.n_x != self.grid.n_x() || state.n_y != self.model.n_y() {
            return Err(Error::BadGrid(format!(
                "state is {}×{}, grid is {}×{}",
                state.n_x,
                state.n_y,
                self.grid.n_x(),
                self.model.n_y()
            )));
        }
        Ok(())
    }

    /// Reaction substep: exact integrating factor for Y, explicit Euler for T
    /// with coefficients frozen at the old state.
    pub fn react(&self, state: &mut FieldState) -> Result<()> {
        let n_y = state.n_y;
        let dt = self.dt;
        for (k, (t, y)) in state.temperature.iter_mut().zip(state.fuel.iter_mut()).enumerate() {
            let j = k % n_y;
            let f = self.model.eval_reaction(j, *t)?;
            let h = self.model.eval_loss(j, *t)?;
            let t_new = *t + dt * (f * *y - h);
            *y *= (-f * dt).exp();
            *t = t_new;
        }
        Ok(())
    }

    /// First-order upwind transport by u(y)∂x; the end nodes are left as is.
    pub fn advect(&self, state: &mut FieldState) {
        let n_x = state.n_x;
        let n_y = state.n_y;
        let flow = self.model.flow();
        let dt_dx = self.dt / self.grid.dx();
        for data in [&mut state.temperature, &mut state.fuel] {
            let old = data.clone();
            data.par_chunks_mut(n_y).enumerate().for_each(|(i, row)| {
                if i == 0 || i == n_x - 1 {
                    return;
                }
                for j in 0..n_y {
                    let u = flow[j];
                    let c = old[i * n_y + j];
                    let delta = if u > 0.0 {
                        c - old[(i - 1) * n_y + j]
                    } else {
                        old[(i + 1) * n_y + j] - c
                    };
                    row[j] = c - u * dt_dx * delta;
                }
            });
        }
    }

    /// Backward-Euler diffusion, one implicit sweep per direction.
    pub fn diffuse(&self, state: &mut FieldState) {
        let (n_x, n_y) = (state.n_x, state.n_y);
        for (data, lu_x, lu_y) in [
            (&mut state.temperature, &self.heat_x, &self.heat_y),
            (&mut state.fuel, &self.fuel_x, &self.fuel_y),
        ] {
            let mut columns = transpose(data, n_x, n_y);
            columns.par_chunks_mut(n_x).for_each(|line| lu_x.solve_in_place(line));
            *data = transpose(&columns, n_y, n_x);
            data.par_chunks_mut(n_y).for_each(|line| lu_y.solve_in_place(line));
        }
    }

    pub fn step(&self, state: &mut FieldState) -> Result<()> {
        self.check_shape(state)?;
        self.react(state)?;
        self.advect(state);
        self.diffuse(state);
        state.enforce_bounds()?;
        state.t += self.dt;
        Ok(())
    }
}

fn transpose(data: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}

/// One step with a freshly built stepper.
pub fn step(state: &FieldState, model: &CrossSectionModel, grid: &CylinderGrid, dt: f64) -> Result<FieldState> {
    let sim = Simulator::new(model, grid, dt)?;
    let mut next = state.clone();
    sim.step(&mut next)?;
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticRow {
    pub t: f64,
    pub front_pos_t: Option<f64>,
    pub front_pos_y: Option<f64>,
    pub sup_t: f64,
    pub decay_rate_right: Option<f64>,
    pub y_left_plateau: Option<f64>,
}

pub fn observe(model: &CrossSectionModel, grid: &CylinderGrid, state: &FieldState, window: (f64, f64)) -> DiagnosticRow {
    let t_avg = diagnostics::y_average(model, state, Field::Temperature);
    let y_avg = diagnostics::y_average(model, state, Field::Fuel);
    let front_t = diagnostics::default_threshold(&t_avg, Field::Temperature, grid)
        .and_then(|thr| diagnostics::crossing(grid.xs(), &t_avg, thr, Field::Temperature));
    let front_y = diagnostics::default_threshold(&y_avg, Field::Fuel, grid)
        .and_then(|thr| diagnostics::crossing(grid.xs(), &y_avg, thr, Field::Fuel));
    let decay = front_t.as_ref().ok().and_then(|&xf| {
        diagnostics::decay_rate_on(grid.xs(), &t_avg, xf + window.0, xf + window.1).ok()
    });
    DiagnosticRow {
        t: state.t,
        front_pos_t: front_t.ok(),
        front_pos_y: front_y.ok(),
        sup_t: state.sup_temperature(),
        decay_rate_right: decay,
        y_left_plateau: diagnostics::left_plateau_y(model, grid, state).ok(),
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub rows: Vec<DiagnosticRow>,
    pub state: FieldState,
    pub steps: usize,
    /// Set when a front came within the guard margin of an x-end; the run
    /// stopped there and later times were not computed.
    pub boundary_touched: Option<Error>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub t_end: f64,
    /// Steps between observations.
    pub cadence: usize,
    pub guard_margin: f64,
    /// Offsets ahead of the T front for the right decay-rate fit.
    pub decay_window: (f64, f64),
}

impl RunOptions {
    pub fn new(t_end: f64, cadence: usize) -> Self {
        Self {
            t_end,
            cadence,
            guard_margin: DEFAULT_GUARD_MARGIN,
            decay_window: diagnostics::DEFAULT_DECAY_WINDOW,
        }
    }
}

/// Fails with `FrontTouchedBoundary` if either front is within `margin` of
/// an x-end.
pub fn check_guard(grid: &CylinderGrid, row: &DiagnosticRow, margin: f64) -> Result<()> {
    for (field, pos) in [("T", row.front_pos_t), ("Y", row.front_pos_y)] {
        if let Some(p) = pos {
            if p > grid.x_max() - margin || p < grid.x_min() + margin {
                return Err(Error::FrontTouchedBoundary { field, position: p });
            }
        }
    }
    Ok(())
}

/// Steps to `t_end`, recording diagnostics every `cadence` steps (and at
/// t = 0). The observer sees each observed state together with its row.
pub fn run<F>(sim: &Simulator<'_>, mut state: FieldState, opts: &RunOptions, mut observer: F) -> Result<RunOutcome>
where
    F: FnMut(&FieldState, &DiagnosticRow) -> Result<()>,
{
    sim.check_shape(&state)?;
    if !(opts.t_end >= 0.0) {
        return Err(Error::BadParameter(format!("t_end must be nonnegative, got {}", opts.t_end)));
    }
    let cadence = opts.cadence.max(1);
    let n_steps = (opts.t_end / sim.dt() - 1e-9).ceil().max(0.0) as usize;
    let t0 = state.t;
    let first = observe(sim.model(), sim.grid(), &state, opts.decay_window);
    observer(&state, &first)?;
    let mut rows = vec![first];
    let mut touched = check_guard(sim.grid(), &first, opts.guard_margin).err();
    let mut steps = 0;
    while touched.is_none() && steps < n_steps {
        sim.step(&mut state)?;
        steps += 1;
        state.t = t0 + steps as f64 * sim.dt();
        if steps % cadence == 0 || steps == n_steps {
            let row = observe(sim.model(), sim.grid(), &state, opts.decay_window);
            if let Err(e) = check_guard(sim.grid(), &row, opts.guard_margin) {
                touched = Some(e);
                break;
            }
            observer(&state, &row)?;
            rows.push(row);
        }
    }
    Ok(RunOutcome {
        rows,
        state,
        steps,
        boundary_touched: touched,
    })
}

pub fn write_diagnostics_csv<W: Write>(out: &mut W, rows: &[DiagnosticRow]) -> std::io::Result<()> {
    writeln!(out, "t,front_pos_T,front_pos_Y,sup_T,decay_rate_right,y_left_plateau")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            num(r.t),
            opt_num(r.front_pos_t),
            opt_num(r.front_pos_y),
            num(r.sup_t),
            opt_num(r.decay_rate_right),
            opt_num(r.y_left_plateau)
        )?;
    }
    Ok(())
}

/// Writes every `stride_x`-th x node and `stride_y`-th y node.
pub fn write_snapshot_csv<W: Write>(
    out: &mut W,
    model: &CrossSectionModel,
    grid: &CylinderGrid,
    state: &FieldState,
    stride_x: usize,
    stride_y: usize,
    with_header: bool,
) -> std::io::Result<()> {
    if with_header {
        writeln!(out, "t,x,y,T,Y")?;
    }
    for i in (0..state.n_x).step_by(stride_x.max(1)) {
        for j in (0..state.n_y).step_by(stride_y.max(1)) {
            let k = state.index(i, j);
            writeln!(
                out,
                "{},{},{},{},{}",
                num(state.t),
                num(grid.xs()[i]),
                num(model.ys()[j]),
                num(state.temperature[k]),
                num(state.fuel[k])
            )?;
        }
    }
    Ok(())
}
