//! Principal eigenpairs of the cross-sectional operator
//!
//! ```text
//!     −φ'' − λ u(y) φ + V(y) φ = value · φ   on [0, L],   φ'(0) = φ'(L) = 0.
//! ```
//!
//! With `V = q − a` the eigenvalue is μ(λ); with `V = 0` it is ν(λ); with
//! `V = q − s·a` it is the eigenvalue for a reaction scaled by `s`.
//!
//! Discretization: second-order central differences with ghost-point Neumann
//! ends. Weighting by the trapezoid weights makes the discrete operator
//! symmetric, so we work with the similar symmetric tridiagonal matrix
//! `B = W^{1/2} A W^{-1/2}`. The smallest eigenvalue is bracketed by Sturm
//! bisection, the eigenvector comes from shifted inverse iteration, and the
//! reported value is the discrete Rayleigh quotient of that eigenvector in
//! gradient form (no cancellation between the 1/h² terms).

use std::io::Write;

use rayon::prelude::*;

use crate::cross_section::CrossSectionModel;
use crate::error::{Error, Result};
use crate::tridiag::TridiagLu;

const BISECTION_TOL: f64 = 1e-12;
const SHIFT_OFFSET: f64 = 1e-10;
const INVERSE_ITERATIONS: usize = 12;

/// Eigenvalue with its positive, L²(ω)-normalized eigenfunction.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalEigenpair {
    pub lambda: f64,
    pub value: f64,
    pub eigenfunction: Vec<f64>,
}

impl PrincipalEigenpair {
    /// Eigenfunction rescaled so that its maximum is 1.
    pub fn sup_normalized(&self) -> Vec<f64> {
        let max = self.eigenfunction.iter().cloned().fold(0.0_f64, f64::max);
        self.eigenfunction.iter().map(|v| v / max).collect()
    }

    /// Eigenfunction rescaled so that its minimum is 1.
    pub fn min_normalized(&self) -> Vec<f64> {
        let min = self.eigenfunction.iter().cloned().fold(f64::INFINITY, f64::min);
        self.eigenfunction.iter().map(|v| v / min).collect()
    }
}

/// Potential `V = ∂h/∂T(·,0) − scale · ∂f/∂T(·,0)`.
pub fn scaled_potential(model: &CrossSectionModel, scale: f64) -> Vec<f64> {
    model
        .loss()
        .rate
        .iter()
        .zip(&model.reaction().amplitude)
        .map(|(q, a)| q - scale * a)
        .collect()
}

pub fn principal_eigenpair(
    model: &CrossSectionModel,
    lambda: f64,
    potential: &[f64],
) -> Result<PrincipalEigenpair> {
    let n = model.n_y();
    if potential.len() != n {
        return Err(Error::BadGrid(format!(
            "potential has {} entries, grid has {n}",
            potential.len()
        )));
    }
    if let Some(bad) = potential.iter().find(|v| !v.is_finite()) {
        return Err(Error::BadParameter(format!("non-finite potential entry {bad}")));
    }
    if !lambda.is_finite() {
        return Err(Error::BadParameter(format!("non-finite lambda {lambda}")));
    }

    let coef: Vec<f64> = model
        .flow()
        .iter()
        .zip(potential)
        .map(|(u, v)| -lambda * u + v)
        .collect();

    // Constant zeroth-order term: the constant function is the eigenvector.
    if coef.iter().all(|c| *c == coef[0]) {
        return Ok(PrincipalEigenpair {
            lambda,
            value: coef[0],
            eigenfunction: vec![1.0 / model.length().sqrt(); n],
        });
    }

    let h = model.dy();
    let inv_h2 = 1.0 / (h * h);
    let diag: Vec<f64> = coef.iter().map(|c| 2.0 * inv_h2 + c).collect();
    let mut off = vec![-inv_h2; n - 1];
    off[0] = -std::f64::consts::SQRT_2 * inv_h2;
    off[n - 2] = -std::f64::consts::SQRT_2 * inv_h2;

    let (lo, _hi) = smallest_eigenvalue_bracket(&diag, &off).ok_or_else(|| Error::EigenNoConvergence {
        lambda,
        reason: "Sturm bisection failed to bracket the smallest eigenvalue".into(),
    })?;

    let shift = lo - SHIFT_OFFSET;
    let shifted: Vec<f64> = diag.iter().map(|d| d - shift).collect();
    let mut sub = vec![0.0; n];
    let mut sup = vec![0.0; n];
    sub[1..].copy_from_slice(&off);
    sup[..n - 1].copy_from_slice(&off);
    let lu = TridiagLu::new(&sub, &shifted, &sup).ok_or_else(|| Error::EigenNoConvergence {
        lambda,
        reason: "singular shifted matrix".into(),
    })?;

    // Iterate until the direction stops changing, or until the change
    // stagnates at rounding level; the residual check below decides.
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut previous_change = f64::INFINITY;
    for iteration in 0..INVERSE_ITERATIONS {
        let mut z = v.clone();
        lu.solve_in_place(&mut z);
        let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
        z.iter_mut().for_each(|x| *x /= norm);
        orient(&mut z);
        let change = z.iter().zip(&v).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        v = z;
        if change < 1e-14 || (iteration >= 3 && change > 0.5 * previous_change) {
            break;
        }
        previous_change = change;
    }
    if v.iter().any(|x| *x <= 0.0) {
        let mut z = v.clone();
        lu.solve_in_place(&mut z);
        let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
        z.iter_mut().for_each(|x| *x /= norm);
        orient(&mut z);
        v = z;
        if v.iter().any(|x| *x <= 0.0) {
            return Err(Error::SignAmbiguity { lambda });
        }
    }

    // Back to nodal values: φ = W^{-1/2} v, then unit quadrature norm.
    let rel_w = |j: usize| if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
    let mut phi: Vec<f64> = (0..n).map(|j| v[j] / f64::sqrt(rel_w(j))).collect();
    let norm = model
        .quadrature(&phi.iter().map(|p| p * p).collect::<Vec<_>>())
        .sqrt();
    phi.iter_mut().for_each(|p| *p /= norm);

    let value = discrete_rayleigh(model, &coef, &phi);

    // Residual of the symmetric form, scaled back to nodal units.
    let mut residual = 0.0_f64;
    let scale = diag.iter().fold(0.0_f64, |m, d| m.max(d.abs())) + 2.0 * std::f64::consts::SQRT_2 * inv_h2;
    let phi_max = phi.iter().cloned().fold(0.0_f64, f64::max);
    for j in 0..n {
        let left = if j == 0 { phi[1] } else { phi[j - 1] };
        let right = if j == n - 1 { phi[n - 2] } else { phi[j + 1] };
        let a_phi = (2.0 * phi[j] - left - right) * inv_h2 + coef[j] * phi[j];
        residual = residual.max((a_phi - value * phi[j]).abs());
    }
    let allowed = 1e-10 * (1.0 + value.abs()) * phi_max + 64.0 * f64::EPSILON * scale * phi_max;
    if residual > allowed {
        return Err(Error::EigenNoConvergence {
            lambda,
            reason: format!("residual {residual:e} exceeds {allowed:e}"),
        });
    }

    Ok(PrincipalEigenpair {
        lambda,
        value,
        eigenfunction: phi,
    })
}

/// Flip sign so the entry of largest magnitude is positive.
fn orient(v: &mut [f64]) {
    let pivot = v.iter().cloned().fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
    if pivot < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Number of eigenvalues of the symmetric tridiagonal (diag, off) below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let e = off[i - 1];
        let denom = if q == 0.0 { f64::EPSILON * (e.abs() + 1.0) } else { q };
        q = diag[i] - x - e * e / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn smallest_eigenvalue_bracket(diag: &[f64], off: &[f64]) -> Option<(f64, f64)> {
    let n = diag.len();
    let radius = |i: usize| {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        left + right
    };
    let mut lo = (0..n).map(|i| diag[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..n).map(|i| diag[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    lo -= 1e-8 * (1.0 + lo.abs());
    hi += 1e-8 * (1.0 + hi.abs());
    if sturm_count(diag, off, lo) != 0 || sturm_count(diag, off, hi) == 0 {
        return None;
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= BISECTION_TOL || mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some((lo, hi))
}

/// Discrete Rayleigh quotient in gradient form:
/// `[Σ_edges (Δφ)²/h + Σ w_j c_j φ_j²] / Σ w_j φ_j²`.
fn discrete_rayleigh(model: &CrossSectionModel, coef: &[f64], phi: &[f64]) -> f64 {
    let h = model.dy();
    let w = model.weights();
    let grad: f64 = phi.windows(2).map(|p| (p[1] - p[0]).powi(2)).sum::<f64>() / h;
    let pot: f64 = (0..phi.len()).map(|j| w[j] * coef[j] * phi[j] * phi[j]).sum();
    let mass: f64 = (0..phi.len()).map(|j| w[j] * phi[j] * phi[j]).sum();
    (grad + pot) / mass
}

/// Discrete version of the variational functional
/// `∫|ψ'|² − λ∫uψ² + ∫Vψ²` over `∫ψ²` for any trial function.
pub fn rayleigh_quotient(model: &CrossSectionModel, lambda: f64, potential: &[f64], trial: &[f64]) -> f64 {
    let coef: Vec<f64> = model
        .flow()
        .iter()
        .zip(potential)
        .map(|(u, v)| -lambda * u + v)
        .collect();
    discrete_rayleigh(model, &coef, trial)
}

/// μ_{h,f}(λ).
pub fn mu(model: &CrossSectionModel, lambda: f64) -> Result<f64> {
    Ok(mu_pair(model, lambda)?.value)
}

pub fn mu_pair(model: &CrossSectionModel, lambda: f64) -> Result<PrincipalEigenpair> {
    principal_eigenpair(model, lambda, &scaled_potential(model, 1.0))
}

/// ν(λ): zero potential.
pub fn nu(model: &CrossSectionModel, lambda: f64) -> Result<f64> {
    Ok(nu_pair(model, lambda)?.value)
}

pub fn nu_pair(model: &CrossSectionModel, lambda: f64) -> Result<PrincipalEigenpair> {
    principal_eigenpair(model, lambda, &vec![0.0; model.n_y()])
}

/// μ for the reaction scaled by `scale` (e.g. μ_{h,Y∞f}).
pub fn mu_scaled(model: &CrossSectionModel, lambda: f64, scale: f64) -> Result<f64> {
    Ok(principal_eigenpair(model, lambda, &scaled_potential(model, scale))?.value)
}

/// d/dλ of the eigenvalue from its eigenpair: `−∫ u φ²`.
pub fn derivative_from_pair(model: &CrossSectionModel, pair: &PrincipalEigenpair) -> f64 {
    let integrand: Vec<f64> = model
        .flow()
        .iter()
        .zip(&pair.eigenfunction)
        .map(|(u, p)| u * p * p)
        .collect();
    -model.quadrature(&integrand)
}

/// μ'_{h,f}(λ).
pub fn mu_derivative(model: &CrossSectionModel, lambda: f64) -> Result<f64> {
    Ok(derivative_from_pair(model, &mu_pair(model, lambda)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub mu: f64,
    pub mu_prime: f64,
    pub nu: f64,
}

/// Evaluates μ, μ' and ν at each λ. Rows come back in input order.
pub fn sweep(model: &CrossSectionModel, lambdas: &[f64]) -> Result<Vec<SweepRow>> {
    lambdas
        .par_iter()
        .map(|&lambda| {
            let pair = mu_pair(model, lambda)?;
            Ok(SweepRow {
                lambda,
                mu: pair.value,
                mu_prime: derivative_from_pair(model, &pair),
                nu: nu(model, lambda)?,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(out: &mut W, rows: &[SweepRow]) -> std::io::Result<()> {
    writeln!(out, "lambda,mu,mu_prime,nu")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            crate::output::num(r.lambda),
            crate::output::num(r.mu),
            crate::output::num(r.mu_prime),
            crate::output::num(r.nu)
        )?;
    }
    Ok(())
}
