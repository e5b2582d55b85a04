//! Cross-section ω = [0, L], the shear flow u(y) and the reaction / heat-loss
//! nonlinearities, sampled on a uniform node grid.
//!
//! All coefficients live on the nodes `y_j = j L / (n_y - 1)`. Integrals over
//! ω use the trapezoid rule, which is also the inner product the eigen module
//! symmetrizes against.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A coefficient profile over the cross-section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    Constant {
        value: f64,
    },
    /// `mean + amplitude * cos(2π modes y / L)`
    Cosine {
        #[serde(default)]
        mean: f64,
        amplitude: f64,
        #[serde(default = "one_mode")]
        modes: u32,
    },
    /// `base + height * (g(y - L/4) + g(y - 3L/4))` with `g(s) = exp(-(s/width)^2)`
    TwoBump {
        #[serde(default)]
        base: f64,
        height: f64,
        width: f64,
    },
    /// Explicit node values; the length must equal `n_y`.
    Nodes {
        values: Vec<f64>,
    },
}

fn one_mode() -> u32 {
    1
}

impl Profile {
    pub fn constant(value: f64) -> Self {
        Profile::Constant { value }
    }

    pub fn cosine(mean: f64, amplitude: f64) -> Self {
        Profile::Cosine {
            mean,
            amplitude,
            modes: 1,
        }
    }

    pub fn sample(&self, ys: &[f64], length: f64) -> Result<Vec<f64>> {
        let values: Vec<f64> = match self {
            Profile::Constant { value } => vec![*value; ys.len()],
            Profile::Cosine {
                mean,
                amplitude,
                modes,
            } => ys
                .iter()
                .map(|&y| mean + amplitude * (2.0 * PI * f64::from(*modes) * y / length).cos())
                .collect(),
            Profile::TwoBump {
                base,
                height,
                width,
            } => {
                if !(*width > 0.0) {
                    return Err(Error::BadParameter(format!(
                        "two_bump width must be positive, got {width}"
                    )));
                }
                let bump = |s: f64| (-(s / width).powi(2)).exp();
                ys.iter()
                    .map(|&y| base + height * (bump(y - 0.25 * length) + bump(y - 0.75 * length)))
                    .collect()
            }
            Profile::Nodes { values } => {
                if values.len() != ys.len() {
                    return Err(Error::BadGrid(format!(
                        "node profile has {} values, grid has {}",
                        values.len(),
                        ys.len()
                    )));
                }
                values.clone()
            }
        };
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::BadParameter(format!("non-finite profile value {bad}")));
        }
        Ok(values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReactionKind {
    /// f(y, T) = a(y) T
    Linear,
    /// f(y, T) = a(y) ln(1 + T)
    LogKpp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// h(y, T) = q(y) T
    Linear,
    /// h(y, T) = q(y) T (2 - 1/(1 + T))
    Saturating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReactionSpec {
    pub kind: ReactionKind,
    pub amplitude: Profile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossSpec {
    pub kind: LossKind,
    pub rate: Profile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReactionModel {
    pub kind: ReactionKind,
    /// ∂f/∂T(y, 0) at every node.
    pub amplitude: Vec<f64>,
    pub holder_alpha: f64,
    pub s0: f64,
    /// Smallest M with f(y,s) ≥ a(y) s − M s^{1+α} on [0, s0].
    pub quad_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossModel {
    pub kind: LossKind,
    /// ∂h/∂T(y, 0) at every node.
    pub rate: Vec<f64>,
    /// K with h(y, T) ≤ K T for all T ≥ 0.
    pub global_bound: f64,
    pub holder_alpha: f64,
    pub s0: f64,
    /// Smallest M with h(y,s) ≤ q(y) s + M s^{1+α} on [0, s0].
    pub quad_bound: f64,
}

impl ReactionModel {
    #[inline]
    pub fn rate(&self, j: usize, t: f64) -> f64 {
        let a = self.amplitude[j];
        match self.kind {
            ReactionKind::Linear => a * t,
            ReactionKind::LogKpp => a * t.ln_1p(),
        }
    }
}

impl LossModel {
    #[inline]
    pub fn rate(&self, j: usize, t: f64) -> f64 {
        let q = self.rate[j];
        match self.kind {
            LossKind::Linear => q * t,
            LossKind::Saturating => q * t * (2.0 - 1.0 / (1.0 + t)),
        }
    }
}

/// The cross-section ω = [0, L] with its flow and nonlinearities.
/// Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSectionModel {
    length: f64,
    ys: Vec<f64>,
    weights: Vec<f64>,
    flow: Vec<f64>,
    lewis: f64,
    reaction: ReactionModel,
    loss: LossModel,
}

/// Serializable description of a model; `build` validates it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub length: f64,
    pub n_y: usize,
    pub lewis: f64,
    #[serde(default = "default_s0")]
    pub s0: f64,
    pub flow: Profile,
    pub reaction: ReactionSpec,
    pub loss: LossSpec,
}

fn default_s0() -> f64 {
    1.0
}

impl ModelSpec {
    pub fn build(&self) -> Result<CrossSectionModel> {
        build_model_with_s0(
            self.length,
            self.n_y,
            &self.flow,
            &self.reaction,
            &self.loss,
            self.lewis,
            self.s0,
        )
    }
}

/// Trapezoid weights on a uniform grid of `n` nodes with spacing `h`.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    w[0] = 0.5 * h;
    w[n - 1] = 0.5 * h;
    w
}

pub fn build_model(
    length: f64,
    n_y: usize,
    flow: &Profile,
    reaction: &ReactionSpec,
    loss: &LossSpec,
    lewis: f64,
) -> Result<CrossSectionModel> {
    build_model_with_s0(length, n_y, flow, reaction, loss, lewis, 1.0)
}

pub fn build_model_with_s0(
    length: f64,
    n_y: usize,
    flow: &Profile,
    reaction: &ReactionSpec,
    loss: &LossSpec,
    lewis: f64,
    s0: f64,
) -> Result<CrossSectionModel> {
    if n_y < 3 {
        return Err(Error::BadGrid(format!("n_y must be at least 3, got {n_y}")));
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::BadGrid(format!("length must be positive, got {length}")));
    }
    if !(lewis > 0.0) || !lewis.is_finite() {
        return Err(Error::BadParameter(format!("Lewis number must be positive, got {lewis}")));
    }
    if !(s0 > 0.0) || !s0.is_finite() {
        return Err(Error::BadParameter(format!("s0 must be positive, got {s0}")));
    }
    let h = length / (n_y - 1) as f64;
    let ys: Vec<f64> = (0..n_y).map(|j| j as f64 * h).collect();
    let weights = trapezoid_weights(n_y, h);

    let raw_flow = flow.sample(&ys, length)?;
    let flow = project_zero_mean(&raw_flow, &weights);

    let amplitude = reaction.amplitude.sample(&ys, length)?;
    let rate = loss.rate.sample(&ys, length)?;

    let alpha = 1.0;
    let reaction = ReactionModel {
        kind: reaction.kind,
        quad_bound: reaction_quad_bound(reaction.kind, &amplitude, s0, alpha),
        amplitude,
        holder_alpha: alpha,
        s0,
    };
    let max_q = rate.iter().cloned().fold(0.0_f64, f64::max);
    let loss = LossModel {
        kind: loss.kind,
        global_bound: match loss.kind {
            LossKind::Linear => max_q,
            LossKind::Saturating => 2.0 * max_q,
        },
        quad_bound: loss_quad_bound(loss.kind, &rate, s0, alpha),
        rate,
        holder_alpha: alpha,
        s0,
    };

    let model = CrossSectionModel {
        length,
        ys,
        weights,
        flow,
        lewis,
        reaction,
        loss,
    };
    model.validate()?;
    Ok(model)
}

/// Subtracts the trapezoid mean.
pub fn project_zero_mean(values: &[f64], weights: &[f64]) -> Vec<f64> {
    let length: f64 = weights.iter().sum();
    let mean = values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / length;
    values.iter().map(|v| v - mean).collect()
}

/// sup over s in (0, s0] of `excess(s) / s^{1+α}`, where `limit_at_zero` is
/// the value of the ratio as s → 0⁺. Log-spaced sampling followed by a
/// golden-section refinement around the best sample.
fn sup_ratio(excess: impl Fn(f64) -> f64, s0: f64, alpha: f64, limit_at_zero: f64) -> f64 {
    let ratio = |s: f64| excess(s) / s.powf(1.0 + alpha);
    let n = 200;
    let lo = s0 * 1e-4;
    let samples: Vec<f64> = (0..n)
        .map(|k| lo * (s0 / lo).powf(k as f64 / (n - 1) as f64))
        .collect();
    let (best_k, best) = samples
        .iter()
        .map(|&s| ratio(s))
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (k, r)| if r > acc.1 { (k, r) } else { acc });
    let a = samples[best_k.saturating_sub(1)];
    let b = samples[(best_k + 1).min(n - 1)];
    let refined = crate::optimize::golden_section_max(&ratio, a, b, 1e-12 * s0).1;
    best.max(refined).max(limit_at_zero).max(0.0)
}

fn reaction_quad_bound(kind: ReactionKind, amplitude: &[f64], s0: f64, alpha: f64) -> f64 {
    match kind {
        ReactionKind::Linear => 0.0,
        ReactionKind::LogKpp => {
            // (s - ln(1+s)) / s^2 → 1/2 as s → 0.
            let per_unit = sup_ratio(|s| s - s.ln_1p(), s0, alpha, 0.5);
            per_unit * amplitude.iter().cloned().fold(0.0_f64, f64::max)
        }
    }
}

fn loss_quad_bound(kind: LossKind, rate: &[f64], s0: f64, alpha: f64) -> f64 {
    match kind {
        LossKind::Linear => 0.0,
        LossKind::Saturating => {
            // h - q s = q s^2 / (1 + s); ratio → 1 as s → 0.
            let per_unit = sup_ratio(|s| s * s / (1.0 + s), s0, alpha, 1.0);
            per_unit * rate.iter().cloned().fold(0.0_f64, f64::max)
        }
    }
}

impl CrossSectionModel {
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n_y(&self) -> usize {
        self.ys.len()
    }

    pub fn dy(&self) -> f64 {
        self.ys[1] - self.ys[0]
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    /// Trapezoid quadrature weights (sum to L).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn flow(&self) -> &[f64] {
        &self.flow
    }

    pub fn lewis(&self) -> f64 {
        self.lewis
    }

    pub fn reaction(&self) -> &ReactionModel {
        &self.reaction
    }

    pub fn loss(&self) -> &LossModel {
        &self.loss
    }

    pub fn max_abs_flow(&self) -> f64 {
        self.flow.iter().fold(0.0_f64, |m, u| m.max(u.abs()))
    }

    /// Shared constant M of the quadratic bounds on f and h.
    pub fn quad_bound(&self) -> f64 {
        self.reaction.quad_bound.max(self.loss.quad_bound)
    }

    pub fn holder_alpha(&self) -> f64 {
        self.reaction.holder_alpha.min(self.loss.holder_alpha)
    }

    pub fn s0(&self) -> f64 {
        self.reaction.s0
    }

    pub fn quadrature(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    pub fn mean(&self, values: &[f64]) -> f64 {
        self.quadrature(values) / self.length
    }

    pub fn eval_reaction(&self, j: usize, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::NegativeTemperature(t));
        }
        Ok(self.reaction.rate(j, t))
    }

    pub fn eval_loss(&self, j: usize, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::NegativeTemperature(t));
        }
        Ok(self.loss.rate(j, t))
    }

    fn validate(&self) -> Result<()> {
        let violation = |condition: &str, j: usize, t: f64| Error::HypothesisViolation {
            condition: condition.to_string(),
            y: self.ys[j],
            temperature: t,
        };
        for j in 0..self.n_y() {
            if !(self.reaction.amplitude[j] > 0.0) {
                return Err(violation("df/dT(y,0) > 0", j, 0.0));
            }
            if self.loss.rate[j] < 0.0 {
                return Err(violation("dh/dT(y,0) >= 0", j, 0.0));
            }
        }
        if !(self.quadrature(&self.loss.rate) > 0.0) {
            return Err(Error::HypothesisViolation {
                condition: "integral of dh/dT(y,0) over the cross-section must be positive"
                    .to_string(),
                y: f64::NAN,
                temperature: 0.0,
            });
        }

        let s0 = self.s0();
        let samples: Vec<f64> = (0..64)
            .map(|k| s0 * 1e-6 * (1e7_f64).powf(k as f64 / 63.0))
            .collect();
        let k_bound = self.loss.global_bound;
        let m = self.quad_bound();
        let alpha = self.holder_alpha();
        let rel = 1e-12;
        for j in 0..self.n_y() {
            let a = self.reaction.amplitude[j];
            let q = self.loss.rate[j];
            if self.reaction.rate(j, 0.0) != 0.0 {
                return Err(violation("f(y,0) = 0", j, 0.0));
            }
            if self.loss.rate(j, 0.0) != 0.0 {
                return Err(violation("h(y,0) = 0", j, 0.0));
            }
            let mut previous = 0.0;
            for &t in &samples {
                let f = self.reaction.rate(j, t);
                let h = self.loss.rate(j, t);
                if !(f > 0.0) || f > a * t * (1.0 + rel) {
                    return Err(violation("0 < f(y,T) <= df/dT(y,0) T", j, t));
                }
                if f < previous {
                    return Err(violation("f nondecreasing in T", j, t));
                }
                previous = f;
                if h < q * t * (1.0 - rel) || h > k_bound * t * (1.0 + rel) {
                    return Err(violation("dh/dT(y,0) T <= h(y,T) <= K T", j, t));
                }
                if t <= s0 {
                    let slack = 1e-12 * a.max(q).max(1.0) * t;
                    if f < a * t - m * t.powf(1.0 + alpha) - slack {
                        return Err(violation("f >= a s - M s^(1+alpha) on [0, s0]", j, t));
                    }
                    if h > q * t + m * t.powf(1.0 + alpha) + slack {
                        return Err(violation("h <= q s + M s^(1+alpha) on [0, s0]", j, t));
                    }
                }
            }
        }
        Ok(())
    }

    /// Test-only copy with the reaction switched off, bypassing validation.
    #[doc(hidden)]
    pub fn without_reaction_unchecked(&self) -> Self {
        let mut m = self.clone();
        m.reaction.amplitude.iter_mut().for_each(|a| *a = 0.0);
        m
    }
}
