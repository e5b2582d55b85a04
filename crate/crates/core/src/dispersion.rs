//! Dispersion relation k(λ) = λ² − μ(λ), the minimal speed c* = min k(λ)/λ,
//! speed-to-decay roots, and the extinction / blow-off / propagation
//! classification of initial decay rates.

use std::io::Write;

use rayon::prelude::*;

use crate::cross_section::CrossSectionModel;
use crate::eigen::{derivative_from_pair, mu, mu_pair};
use crate::error::{Error, Result};
use crate::optimize::{bisect, golden_section_max, golden_section_min};

/// |μ(0)| at or below this is treated as the undecided case μ(0) = 0.
pub const MU0_DEGENERACY: f64 = 1e-10;
const SEARCH_FLOOR: f64 = 1e-6;
const SPEED_TANGENCY: f64 = 1e-9;

pub fn k_of_lambda(model: &CrossSectionModel, lambda: f64) -> Result<f64> {
    Ok(lambda * lambda - mu(model, lambda)?)
}

/// (k(λ), k'(λ)), with k' = 2λ − μ'(λ) from the eigenfunction.
pub fn k_and_slope(model: &CrossSectionModel, lambda: f64) -> Result<(f64, f64)> {
    let pair = mu_pair(model, lambda)?;
    let slope = 2.0 * lambda - derivative_from_pair(model, &pair);
    Ok((lambda * lambda - pair.value, slope))
}

/// Evaluates a fallible scalar function inside a routine that wants `f64`,
/// remembering the first error.
struct Guarded<'a, F> {
    f: F,
    error: std::cell::RefCell<Option<Error>>,
    _marker: std::marker::PhantomData<&'a ()>,
}

impl<'a, F: Fn(f64) -> Result<f64>> Guarded<'a, F> {
    fn new(f: F) -> Self {
        Self {
            f,
            error: std::cell::RefCell::new(None),
            _marker: std::marker::PhantomData,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        match (self.f)(x) {
            Ok(v) => v,
            Err(e) => {
                self.error.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    }

    fn check(&self) -> Result<()> {
        match self.error.borrow_mut().take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimalSpeed {
    pub c_star: f64,
    pub lambda_star: f64,
    /// |d/dλ (k/λ)| at λ*.
    pub stationarity: f64,
}

/// c* = min_{λ>0} k(λ)/λ and its minimizer λ*.
///
/// A doubling search from λ = 1e−6 brackets the minimum, golden-section
/// narrows it, and bisection on `k'(λ)λ − k(λ)` polishes λ*.
pub fn minimal_speed(model: &CrossSectionModel) -> Result<MinimalSpeed> {
    let mu0 = mu(model, 0.0)?;
    if mu0 >= -MU0_DEGENERACY {
        return Err(Error::PreconditionMu0 { mu0 });
    }
    let guess = (-mu0).sqrt();
    let cap = 50.0 * guess.max(1.0);

    let g = Guarded::new(|l: f64| Ok(k_of_lambda(model, l)? / l));
    let mut points = vec![SEARCH_FLOOR];
    let mut values = vec![g.eval(SEARCH_FLOOR)];
    let mut bracket = None;
    while *points.last().unwrap() < cap {
        let next = points.last().unwrap() * 2.0;
        points.push(next);
        values.push(g.eval(next));
        g.check()?;
        let k = values.len() - 1;
        if values[k] >= values[k - 1] {
            let lo = if k >= 2 { points[k - 2] } else { points[0] };
            bracket = Some((lo, points[k]));
            break;
        }
    }
    let (lo, hi) = bracket.ok_or(Error::BracketNotFound {
        lo: SEARCH_FLOOR,
        hi: *points.last().unwrap(),
    })?;

    let (l_gold, _) = golden_section_min(|l| g.eval(l), lo, hi, 1e-9 * hi);
    g.check()?;

    // F(λ) = k'(λ)λ − k(λ) is increasing and vanishes at λ*.
    let stationarity = Guarded::new(|l: f64| {
        let (k, dk) = k_and_slope(model, l)?;
        Ok(dk * l - k)
    });
    let mut a = (l_gold - 1e-6 * hi).max(0.5 * lo);
    let mut b = l_gold + 1e-6 * hi;
    for _ in 0..60 {
        let fa = stationarity.eval(a);
        let fb = stationarity.eval(b);
        stationarity.check()?;
        if fa <= 0.0 && fb >= 0.0 {
            break;
        }
        if fa > 0.0 {
            a = (a - (b - a)).max(0.5 * a);
        }
        if fb < 0.0 {
            b += b - a;
        }
    }
    let lambda_star = bisect(|l| stationarity.eval(l), a, b, 1e-15, 0.0).unwrap_or(l_gold);
    stationarity.check()?;

    let (k, dk) = k_and_slope(model, lambda_star)?;
    Ok(MinimalSpeed {
        c_star: k / lambda_star,
        lambda_star,
        stationarity: ((dk * lambda_star - k) / (lambda_star * lambda_star)).abs(),
    })
}

/// The two positive solutions λ₁ ≤ λ* ≤ λ₂ of k(λ) = cλ.
pub fn roots_for_speed(model: &CrossSectionModel, c: f64) -> Result<(f64, f64)> {
    let ms = minimal_speed(model)?;
    roots_for_speed_with(model, c, &ms)
}

pub fn roots_for_speed_with(model: &CrossSectionModel, c: f64, ms: &MinimalSpeed) -> Result<(f64, f64)> {
    if c < ms.c_star - SPEED_TANGENCY {
        return Err(Error::SpeedBelowMinimal { c, c_star: ms.c_star });
    }
    if (c - ms.c_star).abs() <= SPEED_TANGENCY {
        return Ok((ms.lambda_star, ms.lambda_star));
    }
    let gap = Guarded::new(|l: f64| Ok(k_of_lambda(model, l)? - c * l));
    let lower = bisect(|l| gap.eval(l), 0.0, ms.lambda_star, 1e-15, 1e-13);
    gap.check()?;
    let lower = lower.ok_or(Error::SpeedBelowMinimal { c, c_star: ms.c_star })?;

    let cap = 50.0 * ms.lambda_star.max(1.0) * c.abs().max(1.0);
    let mut hi = 2.0 * ms.lambda_star;
    while gap.eval(hi) <= 0.0 {
        gap.check()?;
        hi *= 2.0;
        if hi > cap {
            return Err(Error::UpperBracketNotFound { c, hi });
        }
    }
    let upper = bisect(|l| gap.eval(l), ms.lambda_star, hi, 1e-15, 1e-13);
    gap.check()?;
    let upper = upper.ok_or(Error::UpperBracketNotFound { c, hi })?;
    Ok((lower, upper))
}

/// Maximizer and value of μ(λ) − λ² over λ ∈ ℝ (strictly concave).
pub fn sup_mu_minus_square(model: &CrossSectionModel) -> Result<(f64, f64)> {
    // μ' is bounded by max|u|, so the stationary point lies in this bracket.
    let reach = 0.5 * model.max_abs_flow() + 1.0;
    let slope = Guarded::new(|l: f64| {
        let pair = mu_pair(model, l)?;
        Ok(derivative_from_pair(model, &pair) - 2.0 * l)
    });
    let arg = bisect(|l| slope.eval(l), -reach, reach, 1e-13, 0.0).unwrap_or(0.0);
    slope.check()?;
    Ok((arg, mu(model, arg)? - arg * arg))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedAnalysis {
    pub mu0: f64,
    pub c_star: Option<f64>,
    pub lambda_star: Option<f64>,
    pub sup_condition_holds: bool,
    pub sup_value: f64,
    pub k_samples: Vec<(f64, f64)>,
}

pub fn analyze(model: &CrossSectionModel, lambdas: &[f64]) -> Result<SpeedAnalysis> {
    let mu0 = mu(model, 0.0)?;
    let (c_star, lambda_star) = if mu0 < -MU0_DEGENERACY {
        let ms = minimal_speed(model)?;
        (Some(ms.c_star), Some(ms.lambda_star))
    } else {
        (None, None)
    };
    let (_, sup_value) = sup_mu_minus_square(model)?;
    let k_samples = lambdas
        .par_iter()
        .map(|&l| Ok((l, k_of_lambda(model, l)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpeedAnalysis {
        mu0,
        c_star,
        lambda_star,
        sup_condition_holds: sup_value < 0.0,
        sup_value,
        k_samples,
    })
}

pub fn write_k_csv<W: Write>(out: &mut W, samples: &[(f64, f64)]) -> std::io::Result<()> {
    use crate::output::num;
    writeln!(out, "lambda,k,k_over_lambda")?;
    for &(l, k) in samples {
        let ratio = if l != 0.0 { k / l } else { f64::NAN };
        writeln!(out, "{},{},{}", num(l), num(k), num(ratio))?;
    }
    Ok(())
}

/// Evidence that T is bounded by C e^{−η(x + γ t)}: positive
/// `margin = μ(η) − η²`, with certified drift `drift = margin / η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowOffCertificate {
    pub eta: f64,
    pub margin: f64,
    pub drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RegimeKind {
    Extinction {
        rate: f64,
        blow_off: Option<BlowOffCertificate>,
    },
    BlowOff(BlowOffCertificate),
    Propagation {
        speed: f64,
    },
    /// λ ≥ λ*: spreading at c* is conjectured, not proven.
    OpenConjectured {
        c_star: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeVerdict {
    pub decay: f64,
    pub kind: RegimeKind,
}

impl RegimeVerdict {
    pub fn label(&self) -> &'static str {
        match self.kind {
            RegimeKind::Extinction { .. } => "Extinction",
            RegimeKind::BlowOff(_) => "BlowOff",
            RegimeKind::Propagation { .. } => "Propagation",
            RegimeKind::OpenConjectured { .. } => "OpenConjectured",
        }
    }
}

const ETA_SAMPLES: usize = 200;

/// Searches η ∈ (0, λ_decay] with μ(η) − η² > 0.
///
/// The margin is concave in η. We locate its best value on a log-spaced scan
/// (refined by golden section), then report the largest η whose margin is at
/// least half of that best value: the strongest spatial decay that still
/// carries a margin of the same order.
pub fn blow_off_certificate(model: &CrossSectionModel, decay: f64) -> Result<Option<BlowOffCertificate>> {
    let margin = Guarded::new(|eta: f64| Ok(mu(model, eta)? - eta * eta));
    let lo = decay * 1e-4;
    let etas: Vec<f64> = (0..ETA_SAMPLES)
        .map(|k| lo * (decay / lo).powf(k as f64 / (ETA_SAMPLES - 1) as f64))
        .collect();
    let margins = etas
        .par_iter()
        .map(|&e| Ok(mu(model, e)? - e * e))
        .collect::<Result<Vec<f64>>>()?;
    let (best_k, _) = margins
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (k, m)| if *m > acc.1 { (k, *m) } else { acc });
    let a = etas[best_k.saturating_sub(1)];
    let b = etas[(best_k + 1).min(ETA_SAMPLES - 1)];
    let (_, refined) = golden_section_max(|e| margin.eval(e), a, b, 1e-12 * decay);
    margin.check()?;
    let best = refined.max(margins[best_k]);
    if !(best > 0.0) {
        return Ok(None);
    }
    let target = 0.5 * best;
    let eta = if margins[ETA_SAMPLES - 1] >= target {
        decay
    } else {
        // Largest η with margin ≥ target: bisect between the last sample
        // that meets it and the next one.
        let last = margins.iter().rposition(|m| *m >= target).unwrap_or(best_k);
        let root = bisect(|e| margin.eval(e) - target, etas[last], etas[last + 1], 1e-14, 0.0);
        margin.check()?;
        root.unwrap_or(etas[last])
    };
    let m = mu(model, eta)? - eta * eta;
    Ok(Some(BlowOffCertificate {
        eta,
        margin: m,
        drift: m / eta,
    }))
}

/// Sorts an initial decay rate into the extinction / blow-off / propagation
/// regimes. Extinction takes precedence over blow-off; the blow-off
/// certificate is attached when it exists.
pub fn classify_regime(model: &CrossSectionModel, decay: f64) -> Result<RegimeVerdict> {
    if !(decay > 0.0) || !decay.is_finite() {
        return Err(Error::BadParameter(format!("decay rate must be positive, got {decay}")));
    }
    let mu0 = mu(model, 0.0)?;
    if mu0.abs() <= MU0_DEGENERACY {
        return Err(Error::DegenerateMuZero { mu0 });
    }
    let certificate = blow_off_certificate(model, decay)?;
    let kind = if mu0 > 0.0 {
        RegimeKind::Extinction {
            rate: mu0,
            blow_off: certificate,
        }
    } else if let Some(cert) = certificate {
        RegimeKind::BlowOff(cert)
    } else {
        let ms = minimal_speed(model)?;
        let at_decay = mu(model, decay)? - decay * decay;
        if at_decay < 0.0 && decay < ms.lambda_star {
            RegimeKind::Propagation {
                speed: k_of_lambda(model, decay)? / decay,
            }
        } else if decay >= ms.lambda_star {
            RegimeKind::OpenConjectured { c_star: ms.c_star }
        } else {
            return Err(Error::UnclassifiableBoundary { lambda: decay });
        }
    };
    Ok(RegimeVerdict { decay, kind })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cross_section::{build_model, LossKind, LossSpec, Profile, ReactionKind, ReactionSpec};

    fn constant(a: f64, q: f64) -> CrossSectionModel {
        build_model(
            1.0,
            9,
            &Profile::constant(0.0),
            &ReactionSpec {
                kind: ReactionKind::Linear,
                amplitude: Profile::constant(a),
            },
            &LossSpec {
                kind: LossKind::Linear,
                rate: Profile::constant(q),
            },
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn constant_k_is_quadratic() {
        let m = constant(1.0, 0.25);
        for l in [0.0, 0.3, 1.7] {
            assert_eq!(k_of_lambda(&m, l).unwrap(), l * l + 0.75);
        }
        assert_eq!(k_of_lambda(&m, 0.0).unwrap(), -mu(&m, 0.0).unwrap());
    }

    #[test]
    fn constant_minimal_speed() {
        let ms = minimal_speed(&constant(1.0, 0.25)).unwrap();
        assert!((ms.c_star - 2.0 * 0.75f64.sqrt()).abs() < 1e-10);
        assert!((ms.lambda_star - 0.75f64.sqrt()).abs() < 1e-10);
        assert!(ms.stationarity <= 1e-8);

        let ms = minimal_speed(&constant(1.0, 1e-3)).unwrap();
        assert!((ms.c_star - 2.0 * 0.999f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn minimal_speed_requires_negative_mu0() {
        assert!(matches!(minimal_speed(&constant(1.0, 1.5)), Err(Error::PreconditionMu0 { .. })));
    }

    #[test]
    fn roots_of_quadratic() {
        let m = constant(1.0, 0.25);
        let (l1, l2) = roots_for_speed(&m, 2.0).unwrap();
        assert!((l1 - 0.5).abs() < 1e-12);
        assert!((l2 - 1.5).abs() < 1e-12);
        let ms = minimal_speed(&m).unwrap();
        let (a, b) = roots_for_speed(&m, ms.c_star).unwrap();
        assert!((a - ms.lambda_star).abs() < 1e-4 && (b - ms.lambda_star).abs() < 1e-4);
        assert!(matches!(roots_for_speed(&m, 1.0), Err(Error::SpeedBelowMinimal { .. })));
    }

    #[test]
    fn classification_of_constant_cases() {
        let v = classify_regime(&constant(1.0, 0.25), 0.5).unwrap();
        assert_eq!(v.kind, RegimeKind::Propagation { speed: 2.0 });

        let v = classify_regime(&constant(1.0, 1.5), 0.5).unwrap();
        match v.kind {
            RegimeKind::Extinction { rate, blow_off } => {
                assert_eq!(rate, 0.5);
                let cert = blow_off.expect("certificate");
                assert_eq!(cert.eta, 0.5);
                assert!((cert.margin - 0.25).abs() < 1e-15);
                assert!((cert.drift - 0.5).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }

        match classify_regime(&constant(1.0, 0.25), 1.2).unwrap().kind {
            RegimeKind::OpenConjectured { c_star } => assert!((c_star - 3f64.sqrt()).abs() < 1e-9),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_mu0_is_refused() {
        let m = constant(1.0, 1.0);
        assert!(matches!(classify_regime(&m, 0.5), Err(Error::DegenerateMuZero { .. })));
    }

    #[test]
    fn sup_condition_for_constant_case() {
        let (arg, sup) = sup_mu_minus_square(&constant(1.0, 0.25)).unwrap();
        assert!(arg.abs() < 1e-12);
        assert_eq!(sup, -0.75);
    }
}
