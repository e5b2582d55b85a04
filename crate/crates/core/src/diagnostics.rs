//! Front positions, spreading speeds, decay rates and plateau estimates
//! extracted from field states, time series and traveling fronts.

use crate::cross_section::CrossSectionModel;
use crate::eigen::{mu_pair, mu_scaled};
use crate::error::{Error, Result};
use crate::front::FrontSolution;
use crate::ivp::{CylinderGrid, FieldState};

/// Offsets ahead of the T front over which the right decay rate is fitted.
pub const DEFAULT_DECAY_WINDOW: (f64, f64) = (10.0, 20.0);
/// Fraction of the domain, from the left end, treated as the burnt plateau.
pub const LEFT_STRIP_FRACTION: f64 = 0.1;
const UNDERFLOW: f64 = 1e-280;
const MIN_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Temperature,
    Fuel,
}

/// Quadrature mean over ω at every x node.
pub fn y_average(model: &CrossSectionModel, state: &FieldState, field: Field) -> Vec<f64> {
    average_rows(model, state.field(field), state.n_y)
}

pub fn average_rows(model: &CrossSectionModel, data: &[f64], n_y: usize) -> Vec<f64> {
    data.chunks(n_y).map(|row| model.mean(row)).collect()
}

/// Largest x at which `profile` crosses `threshold`: downward for T,
/// upward for Y. Linear interpolation between nodes.
pub fn crossing(xs: &[f64], profile: &[f64], threshold: f64, field: Field) -> Result<f64> {
    let above = |v: f64| match field {
        Field::Temperature => v >= threshold,
        Field::Fuel => v <= threshold,
    };
    for i in (0..profile.len().saturating_sub(1)).rev() {
        if above(profile[i]) && !above(profile[i + 1]) {
            let (p0, p1) = (profile[i], profile[i + 1]);
            let s = if p1 != p0 { (threshold - p0) / (p1 - p0) } else { 0.0 };
            return Ok(xs[i] + s * (xs[i + 1] - xs[i]));
        }
    }
    Err(Error::NoCrossing { threshold })
}

fn left_strip_len(grid: &CylinderGrid) -> usize {
    ((LEFT_STRIP_FRACTION * grid.n_x() as f64).round() as usize).clamp(1, grid.n_x())
}

/// 0.5·max for T; (1 + left-strip mean)/2 for Y.
pub fn default_threshold(profile: &[f64], field: Field, grid: &CylinderGrid) -> Result<f64> {
    match field {
        Field::Temperature => {
            let peak = profile.iter().cloned().fold(0.0, f64::max);
            if peak > 0.0 {
                Ok(0.5 * peak)
            } else {
                Err(Error::NoCrossing { threshold: 0.0 })
            }
        }
        Field::Fuel => {
            let m = left_strip_len(grid);
            let left = profile[..m].iter().sum::<f64>() / m as f64;
            Ok(0.5 * (1.0 + left))
        }
    }
}

pub fn front_position(
    model: &CrossSectionModel,
    grid: &CylinderGrid,
    state: &FieldState,
    field: Field,
    threshold: Option<f64>,
) -> Result<f64> {
    let profile = y_average(model, state, field);
    let thr = match threshold {
        Some(t) => t,
        None => default_threshold(&profile, field, grid)?,
    };
    let lo = profile.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = profile.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(thr > lo && thr < hi) {
        return Err(Error::NoCrossing { threshold: thr });
    }
    crossing(grid.xs(), &profile, thr, field)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares; r² = 1 for an exactly flat series.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let r2 = if syy > 0.0 && sxx > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    LinearFit {
        slope,
        intercept: my - slope * mx,
        r2,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontTrack {
    pub samples: Vec<(f64, f64)>,
    pub fit_window: f64,
    pub speed: f64,
    pub r2: f64,
    /// At least ten samples in the window and r² ≥ 0.99.
    pub reliable: bool,
}

/// Least-squares slope of the trailing `fit_window` fraction of samples.
pub fn speed_estimate(samples: &[(f64, f64)], fit_window: f64) -> Result<FrontTrack> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            have: samples.len(),
            need: MIN_SAMPLES,
        });
    }
    let keep = ((samples.len() as f64 * fit_window).round() as usize).clamp(2, samples.len());
    let tail = &samples[samples.len() - keep..];
    let ts: Vec<f64> = tail.iter().map(|s| s.0).collect();
    let xs: Vec<f64> = tail.iter().map(|s| s.1).collect();
    let fit = linear_fit(&ts, &xs);
    Ok(FrontTrack {
        samples: samples.to_vec(),
        fit_window,
        speed: fit.slope,
        r2: fit.r2,
        reliable: keep >= MIN_SAMPLES && fit.r2 >= 0.99,
    })
}

/// −slope of log(profile) against x over [lo, hi].
pub fn decay_rate_on(xs: &[f64], profile: &[f64], lo: f64, hi: f64) -> Result<f64> {
    let (first, last) = (xs[0], xs[xs.len() - 1]);
    if lo < first || hi > last || lo >= hi {
        return Err(Error::RegionOutsideGrid { lo, hi });
    }
    let mut px = Vec::new();
    let mut py = Vec::new();
    for (x, v) in xs.iter().zip(profile) {
        if *x >= lo && *x <= hi {
            if !(*v > UNDERFLOW) {
                return Err(Error::UnderflowRegion);
            }
            px.push(*x);
            py.push(v.ln());
        }
    }
    if px.len() < 2 {
        return Err(Error::RegionOutsideGrid { lo, hi });
    }
    Ok(-linear_fit(&px, &py).slope)
}

/// Λ̂ fitted on [front + window.0, front + window.1] of the y-averaged T.
pub fn right_decay_rate(
    model: &CrossSectionModel,
    grid: &CylinderGrid,
    state: &FieldState,
    window: (f64, f64),
) -> Result<f64> {
    let profile = y_average(model, state, Field::Temperature);
    let thr = default_threshold(&profile, Field::Temperature, grid)?;
    let front = crossing(grid.xs(), &profile, thr, Field::Temperature)?;
    decay_rate_on(grid.xs(), &profile, front + window.0, front + window.1)
}

/// Mean of Y over the leftmost tenth of the domain.
pub fn left_plateau_y(model: &CrossSectionModel, grid: &CylinderGrid, state: &FieldState) -> Result<f64> {
    let profile = y_average(model, state, Field::Fuel);
    let m = left_strip_len(grid);
    let strip = &profile[..m];
    let lo = strip.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = strip.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // A plateau varies little; a front passing through does not.
    if hi - lo > 0.25 * (1.0 - lo).max(1e-3) {
        return Err(Error::FrontInStrip);
    }
    Ok(strip.iter().sum::<f64>() / m as f64)
}

/// −slope of log(sup T) against t over samples with t ∈ [t_lo, t_hi].
pub fn time_decay_rate(series: &[(f64, f64)], t_lo: f64, t_hi: f64) -> Result<f64> {
    let (ts, logs): (Vec<f64>, Vec<f64>) = series
        .iter()
        .filter(|(t, _)| *t >= t_lo && *t <= t_hi)
        .map(|(t, s)| (*t, s.ln()))
        .unzip();
    if ts.len() < 2 {
        return Err(Error::TooFewSamples { have: ts.len(), need: 2 });
    }
    if logs.iter().any(|v| !v.is_finite()) {
        return Err(Error::UnderflowRegion);
    }
    Ok(-linear_fit(&ts, &logs).slope)
}

/// γ̂ from the trailing half of a (t, sup T) series.
pub fn extinction_rate(series: &[(f64, f64)]) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::TooFewSamples {
            have: series.len(),
            need: 2,
        });
    }
    let tail = &series[series.len() / 2..];
    time_decay_rate(tail, tail[0].0, tail[tail.len() - 1].0)
}

/// Relative mismatch of the mass balance c·|ω|·(1 − Y∞) = ∬ f(y,T) Y.
///
/// Both sides are evaluated from every starting point x_s of the plateau
/// strip [−a/2, −a/4], with the integral taken over [x_s, a], and averaged
/// over x_s. Averaging cancels the slow drift of Y across the strip.
pub fn mass_balance_residual(model: &CrossSectionModel, front: &FrontSolution) -> Result<f64> {
    if !front.converged {
        return Err(Error::NotConverged);
    }
    let xs = &front.xs;
    let n_y = model.n_y();
    let burn: Vec<f64> = front
        .temperature
        .chunks(n_y)
        .zip(front.fuel.chunks(n_y))
        .map(|(t, y)| {
            let row: Vec<f64> = (0..n_y).map(|j| model.reaction().rate(j, t[j]) * y[j]).collect();
            model.quadrature(&row)
        })
        .collect();
    let fuel = average_rows(model, &front.fuel, n_y);
    let dx = front.dx();
    // Cumulative trapezoid integral from the right end.
    let n = xs.len();
    let mut tail = vec![0.0; n];
    for i in (0..n - 1).rev() {
        tail[i] = tail[i + 1] + 0.5 * dx * (burn[i] + burn[i + 1]);
    }
    // The strip is placed relative to the domain, which may be recentered.
    let a = front.half_length;
    let mid = xs[0] + a;
    let (lo, hi) = (mid - 0.5 * a, mid - 0.25 * a);
    let strip: Vec<usize> = (0..n).filter(|&i| xs[i] >= lo && xs[i] <= hi).collect();
    if strip.is_empty() {
        return Err(Error::RegionOutsideGrid { lo, hi });
    }
    let k = strip.len() as f64;
    let y_inf = strip.iter().map(|&i| fuel[i]).sum::<f64>() / k;
    let burned = strip.iter().map(|&i| tail[i]).sum::<f64>() / k;
    let lhs = front.c * model.length() * (1.0 - y_inf);
    if lhs.abs() <= 1e-300 && burned.abs() <= 1e-300 {
        return Ok(0.0);
    }
    Ok((lhs - burned).abs() / lhs.abs())
}

/// β̂: growth rate of the y-averaged T toward +x, fitted over [lo, hi]
/// (so T ≈ e^{β̂x} there).
pub fn left_decay_rate(model: &CrossSectionModel, front: &FrontSolution, lo: f64, hi: f64) -> Result<f64> {
    let profile = average_rows(model, &front.temperature, model.n_y());
    Ok(-decay_rate_on(&front.xs, &profile, lo, hi)?)
}

/// Relative mismatch |μ_{h,Y∞f}(−β) − (cβ + β²)| / (cβ + β²).
pub fn left_decay_mismatch(model: &CrossSectionModel, c: f64, beta: f64, y_inf: f64) -> Result<f64> {
    let lhs = mu_scaled(model, -beta, y_inf)?;
    let rhs = c * beta + beta * beta;
    Ok((lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE))
}

/// a* = 1 + μ(0) / ∫ a(y) φ_{−β}² dy.
pub fn y_inf_bound_a_star(model: &CrossSectionModel, beta: f64) -> Result<f64> {
    let mu0 = crate::eigen::mu(model, 0.0)?;
    let pair = mu_pair(model, -beta)?;
    let weighted: Vec<f64> = pair
        .eigenfunction
        .iter()
        .zip(&model.reaction().amplitude)
        .map(|(p, a)| a * p * p)
        .collect();
    Ok(1.0 + mu0 / model.quadrature(&weighted))
}

/// mean(q) / mean(a).
pub fn y_inf_bound_means(model: &CrossSectionModel) -> f64 {
    model.mean(&model.loss().rate) / model.mean(&model.reaction().amplitude)
}
