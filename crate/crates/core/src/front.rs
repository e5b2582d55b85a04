//! Traveling fronts on the finite cylinder [−a, a] × ω, found by damped
//! Picard iteration of the linearized map Φ_a inside the set bracketed by
//! explicit sub- and super-solutions.

use std::io::Write;

use crate::banded::{BandedLu, BandedMatrix};
use crate::cross_section::CrossSectionModel;
use crate::diagnostics::{self, Field};
use crate::dispersion::{k_of_lambda, minimal_speed, sup_mu_minus_square, MinimalSpeed};
use crate::eigen::{mu_pair, nu_pair};
use crate::error::{Error, Result};
use crate::optimize::bisect;
use crate::output::num;

/// Safety factor applied to every strict inequality of the parameter search.
pub const MARGIN: f64 = 1.1;
const LINEAR_RESIDUAL: f64 = 1e-10;
const HALVINGS: usize = 60;

/// Smallest positive root of k(λ) = cλ, by bisection on (0, λ*].
pub fn lambda_c(model: &CrossSectionModel, c: f64) -> Result<f64> {
    let ms = minimal_speed(model)?;
    lambda_c_with(model, c, &ms)
}

fn lambda_c_with(model: &CrossSectionModel, c: f64, ms: &MinimalSpeed) -> Result<f64> {
    if !(c > ms.c_star.max(0.0)) {
        return Err(Error::SpeedNotAdmissible { c, c_star: ms.c_star });
    }
    let err = std::cell::RefCell::new(None);
    let g = |l: f64| match k_of_lambda(model, l) {
        Ok(k) => k - c * l,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let root = bisect(g, 0.0, ms.lambda_star, 1e-16, 0.0);
    if let Some(e) = err.borrow_mut().take() {
        return Err(e);
    }
    root.ok_or(Error::SpeedNotAdmissible { c, c_star: ms.c_star })
}

/// Parameters of the sub/super-solutions, and their values on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichBounds {
    pub c: f64,
    pub lambda_c: f64,
    pub beta: f64,
    pub gamma: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub quad_bound: f64,
    pub x0: f64,
    /// φ_{λc}, φ_{λc+η} and ψ_{βLe}, each scaled to unit maximum.
    pub phi_c: Vec<f64>,
    pub phi_eta: Vec<f64>,
    pub psi: Vec<f64>,
    pub xs: Vec<f64>,
    pub n_y: usize,
    pub t_upper: Vec<f64>,
    pub t_lower: Vec<f64>,
    pub y_lower: Vec<f64>,
}

impl SandwichBounds {
    pub fn t_upper_at(&self, x: f64, j: usize) -> f64 {
        self.phi_c[j] * (-self.lambda_c * x).exp()
    }

    pub fn t_lower_at(&self, x: f64, j: usize) -> f64 {
        let v = self.phi_c[j] * (-self.lambda_c * x).exp()
            - self.delta * self.phi_eta[j] * (-(self.lambda_c + self.eta) * x).exp();
        v.max(0.0)
    }

    pub fn y_lower_at(&self, x: f64, j: usize) -> f64 {
        (1.0 - self.gamma * self.psi[j] * (-self.beta * x).exp()).max(0.0)
    }

    fn tabulate(&mut self) {
        let n = self.xs.len() * self.n_y;
        let (mut tu, mut tl, mut yl) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for &x in &self.xs {
            for j in 0..self.n_y {
                tu.push(self.t_upper_at(x, j));
                tl.push(self.t_lower_at(x, j));
                yl.push(self.y_lower_at(x, j));
            }
        }
        self.t_upper = tu;
        self.t_lower = tl;
        self.y_lower = yl;
    }

    /// Re-evaluates every inequality the parameters were chosen to satisfy.
    pub fn verify(&self, model: &CrossSectionModel) -> Result<()> {
        let fail = |what: &str| Err(Error::ParameterSearchFailed(what.to_string()));
        let le = model.lewis();
        let nu_b = nu_pair(model, self.beta * le)?.value;
        let nu_cond = nu_b - self.beta * self.beta + self.c * self.beta * le;
        let min_psi = self.psi.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_a = model.reaction().amplitude.iter().cloned().fold(0.0, f64::max);
        let min_phi_eta = self.phi_eta.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(self.beta > 0.0 && self.beta < self.lambda_c && nu_cond > 0.0) {
            return fail("0 < beta < lambda_c and nu(beta Le) - beta^2 + c beta Le > 0");
        }
        if !(self.gamma * min_psi >= 1.0 && self.gamma / le * nu_cond * min_psi > max_a) {
            return fail("gamma conditions");
        }
        let eps = self.c * (self.lambda_c + self.eta) - k_of_lambda(model, self.lambda_c + self.eta)?;
        let alpha = model.holder_alpha();
        if !(self.eta > 0.0 && self.eta < self.beta.min(alpha * self.lambda_c) && eps > 0.0) {
            return fail("0 < eta < min(beta, alpha lambda_c) and epsilon > 0");
        }
        if !(self.delta * eps * min_phi_eta >= self.gamma * max_a + 2.0 * self.quad_bound) {
            return fail("delta epsilon min(phi) >= gamma max(a) + 2M");
        }
        if self.t_lower.iter().zip(&self.t_upper).any(|(l, u)| l > u)
            || self.t_lower.iter().any(|&v| v > model.s0() * (1.0 + 1e-12))
        {
            return fail("0 <= T_lower <= min(T_upper, s0)");
        }
        for (i, &x) in self.xs.iter().enumerate() {
            for j in 0..self.n_y {
                let k = i * self.n_y + j;
                if x <= self.x0 && self.t_lower[k] > 0.0 {
                    return fail("T_lower = 0 for x <= x0");
                }
                // Beyond x0 the clipping at zero is inactive.
                if x > self.x0 && !(self.y_lower[k] > 0.0) {
                    return fail("Y_lower > 0 for x > x0");
                }
                if !(0.0..=1.0).contains(&self.y_lower[k]) {
                    return fail("0 <= Y_lower <= 1");
                }
            }
        }
        Ok(())
    }
}

/// Uniform nodes on [−a, a].
pub fn front_nodes(half_length: f64, n_x: usize) -> Result<Vec<f64>> {
    if !(half_length > 0.0) || n_x < 3 {
        return Err(Error::BadGrid(format!("half-length {half_length}, n_x {n_x}")));
    }
    let m = (n_x - 1) as f64;
    Ok((0..n_x)
        .map(|i| half_length * (2.0 * i as f64 - m) / m)
        .collect())
}

pub fn build_sandwich(model: &CrossSectionModel, c: f64, half_length: f64, n_x: usize) -> Result<SandwichBounds> {
    let ms = minimal_speed(model)?;
    build_sandwich_with(model, c, half_length, n_x, &ms)
}

fn build_sandwich_with(
    model: &CrossSectionModel,
    c: f64,
    half_length: f64,
    n_x: usize,
    ms: &MinimalSpeed,
) -> Result<SandwichBounds> {
    let xs = front_nodes(half_length, n_x)?;
    let lc = lambda_c_with(model, c, ms)?;
    let le = model.lewis();
    let max_a = model.reaction().amplitude.iter().cloned().fold(0.0, f64::max);
    let min_of = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);

    // β: halve from λc/2 until the ν-condition holds.
    let mut beta = 0.5 * lc;
    let mut found = None;
    for _ in 0..HALVINGS {
        let pair = nu_pair(model, beta * le)?;
        let cond = pair.value - beta * beta + c * beta * le;
        if cond > 0.0 {
            found = Some((pair, cond));
            break;
        }
        beta *= 0.5;
    }
    let (psi_pair, nu_cond) =
        found.ok_or_else(|| Error::ParameterSearchFailed("nu(beta Le) - beta^2 + c beta Le > 0".into()))?;
    let psi = psi_pair.sup_normalized();
    let min_psi = min_of(&psi);
    let gamma = (1.0 / min_psi).max(MARGIN * max_a * le / (nu_cond * min_psi));

    // η: halve from min(β, αλc)/2 until ε > 0.
    let alpha = model.holder_alpha();
    let mut eta = 0.5 * beta.min(alpha * lc);
    let mut epsilon = f64::NAN;
    for _ in 0..HALVINGS {
        epsilon = c * (lc + eta) - k_of_lambda(model, lc + eta)?;
        if epsilon > 0.0 {
            break;
        }
        eta *= 0.5;
    }
    if !(epsilon > 0.0) {
        return Err(Error::ParameterSearchFailed("epsilon = c(lc+eta) - k(lc+eta) > 0".into()));
    }

    let phi_c = mu_pair(model, lc)?.sup_normalized();
    let phi_eta = mu_pair(model, lc + eta)?.sup_normalized();
    let m = model.quad_bound();
    let s0 = model.s0();
    let max_psi = psi.iter().cloned().fold(0.0, f64::max);
    let x0 = ((gamma * max_psi).ln() / beta).max(0.0);

    let a_max = phi_c.iter().cloned().fold(0.0, f64::max);
    let b_min = min_of(&phi_eta);
    // T_lower ≤ s0 everywhere: the x-maximum of A e^{−λc x} − δB e^{−(λc+η)x}
    // equals s0 exactly for this δ.
    let d_cap = a_max * lc / (b_min * (lc + eta)) * (a_max * eta / ((lc + eta) * s0)).powf(eta / lc);
    // T_lower ≤ 0 for x ≤ x0.
    let d_left = phi_c
        .iter()
        .zip(&phi_eta)
        .map(|(p, q)| p / q)
        .fold(0.0, f64::max)
        * (eta * x0).exp();
    let d_gain = (gamma * max_a + 2.0 * m) / (epsilon * b_min);
    let delta = MARGIN * d_cap.max(d_left).max(d_gain);

    let mut bounds = SandwichBounds {
        c,
        lambda_c: lc,
        beta,
        gamma,
        eta,
        epsilon,
        delta,
        quad_bound: m,
        x0,
        phi_c,
        phi_eta,
        psi,
        xs,
        n_y: model.n_y(),
        t_upper: Vec::new(),
        t_lower: Vec::new(),
        y_lower: Vec::new(),
    };
    bounds.tabulate();
    bounds.verify(model)?;
    Ok(bounds)
}

/// Builds −D·Δ − b(y)∂x + k on the nodes, with Dirichlet rows at the x-ends
/// and ghost-point Neumann rows in y. The convection term is central where
/// the cell Péclet number allows it and upwind elsewhere.
fn assemble(model: &CrossSectionModel, xs: &[f64], c: f64, diffusivity: f64, sink: &[f64]) -> BandedMatrix {
    let n_x = xs.len();
    let n_y = model.n_y();
    let dx = xs[1] - xs[0];
    let dy = model.dy();
    let (ax, ay) = (diffusivity / (dx * dx), diffusivity / (dy * dy));
    let mut m = BandedMatrix::zeros(n_x * n_y, n_y);
    for i in 0..n_x {
        for j in 0..n_y {
            let k = i * n_y + j;
            if i == 0 || i == n_x - 1 {
                m.set(k, k, 1.0);
                continue;
            }
            let b = c - model.flow()[j];
            let (mut west, mut east) = (-ax, -ax);
            let mut diag = 2.0 * ax + 2.0 * ay + sink[k];
            if b.abs() * dx <= 2.0 * diffusivity {
                east -= b / (2.0 * dx);
                west += b / (2.0 * dx);
            } else if b > 0.0 {
                east -= b / dx;
                diag += b / dx;
            } else {
                west += b / dx;
                diag -= b / dx;
            }
            m.add(k, k, diag);
            m.add(k, k - n_y, west);
            m.add(k, k + n_y, east);
            let (south, north) = if j == 0 {
                (None, Some(-2.0 * ay))
            } else if j == n_y - 1 {
                (Some(-2.0 * ay), None)
            } else {
                (Some(-ay), Some(-ay))
            };
            if let Some(v) = south {
                m.add(k, k - 1, v);
            }
            if let Some(v) = north {
                m.add(k, k + 1, v);
            }
        }
    }
    m
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves `A x = b` and checks the relative residual, refining once.
fn checked_solve(matrix: &BandedMatrix, lu: &BandedLu, rhs: &[f64], what: &str) -> Result<Vec<f64>> {
    let scale = sup_norm(rhs).max(f64::MIN_POSITIVE);
    let mut x = rhs.to_vec();
    lu.solve_in_place(&mut x);
    let mut r = vec![0.0; rhs.len()];
    for pass in 0..2 {
        matrix.mul_vec(&x, &mut r);
        for (ri, bi) in r.iter_mut().zip(rhs) {
            *ri = bi - *ri;
        }
        let rel = sup_norm(&r) / scale;
        if rel <= LINEAR_RESIDUAL {
            return Ok(x);
        }
        if pass == 1 || !rel.is_finite() {
            return Err(Error::LinearSolveFailed(format!("{what}: relative residual {rel:.3e}")));
        }
        lu.solve_in_place(&mut r);
        for (xi, ri) in x.iter_mut().zip(&r) {
            *xi += ri;
        }
    }
    unreachable!()
}

/// The map (T₀, Y₀) ↦ (T, Y) of two decoupled linear elliptic problems with
/// the sub-solution values as Dirichlet data at x = ±a.
pub struct PhiMap<'a> {
    model: &'a CrossSectionModel,
    bounds: &'a SandwichBounds,
    ka: f64,
    t_matrix: BandedMatrix,
    t_lu: BandedLu,
}

impl<'a> PhiMap<'a> {
    pub fn new(model: &'a CrossSectionModel, bounds: &'a SandwichBounds) -> Result<Self> {
        let ka = model.loss().global_bound + 1.0;
        let sink = vec![ka; bounds.xs.len() * model.n_y()];
        let t_matrix = assemble(model, &bounds.xs, bounds.c, 1.0, &sink);
        let t_lu = t_matrix
            .clone()
            .factor()
            .ok_or_else(|| Error::LinearSolveFailed("temperature operator: zero pivot".into()))?;
        Ok(Self {
            model,
            bounds,
            ka,
            t_matrix,
            t_lu,
        })
    }

    pub fn stabilization(&self) -> f64 {
        self.ka
    }

    pub fn apply(&self, t0: &[f64], y0: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let model = self.model;
        let n_y = model.n_y();
        let n_x = self.bounds.xs.len();
        let last = n_x - 1;
        let mut burn = vec![0.0; t0.len()];
        let mut rhs_t = vec![0.0; t0.len()];
        for k in 0..t0.len() {
            let j = k % n_y;
            let f = model.eval_reaction(j, t0[k])?;
            burn[k] = f;
            rhs_t[k] = f * y0[k] - model.eval_loss(j, t0[k])? + self.ka * t0[k];
        }
        let mut rhs_y = vec![0.0; t0.len()];
        for i in [0, last] {
            for j in 0..n_y {
                let k = i * n_y + j;
                rhs_t[k] = self.bounds.t_lower[k];
                rhs_y[k] = self.bounds.y_lower[k];
            }
        }
        let t = checked_solve(&self.t_matrix, &self.t_lu, &rhs_t, "temperature")?;

        let y_matrix = assemble(model, &self.bounds.xs, self.bounds.c, 1.0 / model.lewis(), &burn);
        let y_lu = y_matrix
            .clone()
            .factor()
            .ok_or_else(|| Error::LinearSolveFailed("fuel operator: zero pivot".into()))?;
        let y = checked_solve(&y_matrix, &y_lu, &rhs_y, "fuel")?;
        Ok((t, y))
    }
}

pub fn phi_a_map(
    model: &CrossSectionModel,
    bounds: &SandwichBounds,
    t0: &[f64],
    y0: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    PhiMap::new(model, bounds)?.apply(t0, y0)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrontOptions {
    pub half_length: f64,
    pub n_x: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub damping: f64,
    /// Largest clipping correction accepted at convergence.
    pub violation_tol: f64,
}

impl Default for FrontOptions {
    fn default() -> Self {
        Self {
            half_length: 40.0,
            n_x: 801,
            max_iter: 5000,
            tol: 1e-8,
            damping: 0.7,
            violation_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontSolution {
    pub c: f64,
    pub half_length: f64,
    /// Node positions; shifted when the front is recentered.
    pub xs: Vec<f64>,
    pub n_y: usize,
    pub temperature: Vec<f64>,
    pub fuel: Vec<f64>,
    pub bounds: SandwichBounds,
    pub iterations: usize,
    /// Sup-norm change of the last Picard update.
    pub change: f64,
    /// Largest clipping correction of the last update.
    pub violation: f64,
    /// Max discrete residual of both traveling-wave equations at interior nodes.
    pub residual: f64,
    /// Mean of the y-averaged Y over [−a/2, −a/4] (relative to the domain).
    pub y_inf: f64,
    pub converged: bool,
    /// Y∞ of the approximating fronts, for `minimal_speed_front`.
    pub sequence: Vec<(f64, f64)>,
}

impl FrontSolution {
    pub fn dx(&self) -> f64 {
        self.xs[1] - self.xs[0]
    }

    pub fn into_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NoConvergence {
                c: self.c,
                iterations: self.iterations,
                change: self.change,
            })
        }
    }

    /// True when T̲ ≤ T ≤ T̄ and Y̲ ≤ Y ≤ 1 at every node.
    pub fn in_sandwich(&self) -> bool {
        let b = &self.bounds;
        (0..self.temperature.len()).all(|k| {
            b.t_lower[k] <= self.temperature[k]
                && self.temperature[k] <= b.t_upper[k]
                && b.y_lower[k] <= self.fuel[k]
                && self.fuel[k] <= 1.0
        })
    }

    pub fn y_average(&self, model: &CrossSectionModel, field: Field) -> Vec<f64> {
        let data = match field {
            Field::Temperature => &self.temperature,
            Field::Fuel => &self.fuel,
        };
        diagnostics::average_rows(model, data, self.n_y)
    }

    /// Position of the Y front at level (1 + Y∞)/2.
    pub fn fuel_front(&self, model: &CrossSectionModel) -> Result<f64> {
        let profile = self.y_average(model, Field::Fuel);
        diagnostics::crossing(&self.xs, &profile, 0.5 * (1.0 + self.y_inf), Field::Fuel)
    }

    /// Position of the T front at half the maximum of the y-averaged T.
    pub fn temperature_front(&self, model: &CrossSectionModel) -> Result<f64> {
        let profile = self.y_average(model, Field::Temperature);
        let peak = profile.iter().cloned().fold(0.0, f64::max);
        if !(peak > 0.0) {
            return Err(Error::NoCrossing { threshold: 0.0 });
        }
        diagnostics::crossing(&self.xs, &profile, 0.5 * peak, Field::Temperature)
    }

    /// Λ̂ over [front + window.0, front + window.1].
    pub fn right_decay_rate(&self, model: &CrossSectionModel, window: (f64, f64)) -> Result<f64> {
        let front = self.temperature_front(model)?;
        let profile = self.y_average(model, Field::Temperature);
        diagnostics::decay_rate_on(&self.xs, &profile, front + window.0, front + window.1)
    }

    /// Translates the x-coordinates by −shift.
    pub fn shift(&mut self, shift: f64) {
        for x in self.xs.iter_mut().chain(self.bounds.xs.iter_mut()) {
            *x -= shift;
        }
    }
}

fn plateau_strip_mean(xs: &[f64], profile: &[f64], half_length: f64) -> f64 {
    let x_ref = xs[0] + half_length;
    let (lo, hi) = (x_ref - 0.5 * half_length, x_ref - 0.25 * half_length);
    let picked: Vec<f64> = xs
        .iter()
        .zip(profile)
        .filter(|(x, _)| **x >= lo && **x <= hi)
        .map(|(_, v)| *v)
        .collect();
    picked.iter().sum::<f64>() / picked.len().max(1) as f64
}

/// Max over interior nodes of the discrete residuals of
/// ΔT + (c−u)T_x + fY − h = 0 and Le⁻¹ΔY + (c−u)Y_x − fY = 0.
pub fn front_residual(model: &CrossSectionModel, xs: &[f64], c: f64, t: &[f64], y: &[f64]) -> Result<f64> {
    let n = t.len();
    let n_y = model.n_y();
    let mut f = vec![0.0; n];
    let mut h = vec![0.0; n];
    for k in 0..n {
        f[k] = model.eval_reaction(k % n_y, t[k])?;
        h[k] = model.eval_loss(k % n_y, t[k])?;
    }
    let zero = vec![0.0; n];
    let mut lt = vec![0.0; n];
    let mut ly = vec![0.0; n];
    assemble(model, xs, c, 1.0, &zero).mul_vec(t, &mut lt);
    assemble(model, xs, c, 1.0 / model.lewis(), &f).mul_vec(y, &mut ly);
    let n_x = xs.len();
    let mut worst: f64 = 0.0;
    for i in 1..n_x - 1 {
        for j in 0..n_y {
            let k = i * n_y + j;
            // The assembled operator is the negative of the differential one.
            worst = worst.max((f[k] * y[k] - h[k] - lt[k]).abs()).max(ly[k].abs());
        }
    }
    Ok(worst)
}

/// Damped Picard iteration (T, Y) ← (1−θ)(T, Y) + θΦ_a(T, Y), clipped into
/// the sandwich after every update, from the sub-solution pair.
pub fn solve_front(model: &CrossSectionModel, c: f64, opts: &FrontOptions) -> Result<FrontSolution> {
    let ms = minimal_speed(model)?;
    solve_front_with(model, c, opts, &ms)
}

fn solve_front_with(model: &CrossSectionModel, c: f64, opts: &FrontOptions, ms: &MinimalSpeed) -> Result<FrontSolution> {
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(Error::BadParameter(format!("damping must lie in (0, 1], got {}", opts.damping)));
    }
    let bounds = build_sandwich_with(model, c, opts.half_length, opts.n_x, ms)?;
    let map = PhiMap::new(model, &bounds)?;
    let theta = opts.damping;
    let mut t = bounds.t_lower.clone();
    let mut y = bounds.y_lower.clone();
    let (mut iterations, mut change, mut violation) = (0, f64::INFINITY, f64::INFINITY);
    let mut converged = false;
    while iterations < opts.max_iter {
        let (tn, yn) = map.apply(&t, &y)?;
        iterations += 1;
        change = 0.0;
        violation = 0.0;
        for k in 0..t.len() {
            let t1 = (1.0 - theta) * t[k] + theta * tn[k];
            let y1 = (1.0 - theta) * y[k] + theta * yn[k];
            let tc = t1.clamp(bounds.t_lower[k], bounds.t_upper[k]);
            let yc = y1.clamp(bounds.y_lower[k], 1.0);
            violation = violation.max((t1 - tc).abs()).max((y1 - yc).abs());
            change = change.max((tc - t[k]).abs()).max((yc - y[k]).abs());
            t[k] = tc;
            y[k] = yc;
        }
        if change <= opts.tol && violation <= opts.violation_tol {
            converged = true;
            break;
        }
    }
    let residual = front_residual(model, &bounds.xs, c, &t, &y)?;
    let xs = bounds.xs.clone();
    let y_avg = diagnostics::average_rows(model, &y, model.n_y());
    let y_inf = plateau_strip_mean(&xs, &y_avg, opts.half_length);
    Ok(FrontSolution {
        c,
        half_length: opts.half_length,
        xs,
        n_y: model.n_y(),
        temperature: t,
        fuel: y,
        bounds,
        iterations,
        change,
        violation,
        residual,
        y_inf,
        converged,
        sequence: Vec::new(),
    })
}

/// Fronts at c_n = c*(1 + 2^{−n}), n = 1..=6, each recentered so its Y
/// front sits at x = 0. Returns the last, carrying every (c_n, Y∞).
pub fn minimal_speed_front(model: &CrossSectionModel, opts: &FrontOptions) -> Result<FrontSolution> {
    let (_, sup) = sup_mu_minus_square(model)?;
    if !(sup < 0.0) {
        return Err(Error::SupConditionFails { sup });
    }
    let ms = minimal_speed(model)?;
    let mut sequence = Vec::new();
    let mut last = None;
    for n in 1..=6 {
        let c = ms.c_star * (1.0 + 0.5f64.powi(n));
        let mut front = solve_front_with(model, c, opts, &ms)?.into_converged()?;
        let pos = front.fuel_front(model)?;
        front.shift(pos);
        sequence.push((c, front.y_inf));
        last = Some(front);
    }
    let mut front = last.expect("six members");
    front.sequence = sequence;
    Ok(front)
}

pub fn write_front_csv<W: Write>(out: &mut W, model: &CrossSectionModel, front: &FrontSolution, stride_x: usize) -> std::io::Result<()> {
    writeln!(out, "x,y,T,Y,T_lower,T_upper,Y_lower")?;
    let n_y = front.n_y;
    for i in (0..front.xs.len()).step_by(stride_x.max(1)) {
        for j in 0..n_y {
            let k = i * n_y + j;
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                num(front.xs[i]),
                num(model.ys()[j]),
                num(front.temperature[k]),
                num(front.fuel[k]),
                num(front.bounds.t_lower[k]),
                num(front.bounds.t_upper[k]),
                num(front.bounds.y_lower[k])
            )?;
        }
    }
    Ok(())
}
