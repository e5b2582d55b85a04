#![allow(dead_code)]

use std::f64::consts::PI;

use shearfront::cross_section::{build_model, CrossSectionModel, LossKind, LossSpec, Profile, ReactionKind, ReactionSpec};

pub fn linear_model(n_y: usize, flow: Profile, a: Profile, q: Profile, lewis: f64) -> CrossSectionModel {
    build_model(
        1.0,
        n_y,
        &flow,
        &ReactionSpec {
            kind: ReactionKind::Linear,
            amplitude: a,
        },
        &LossSpec {
            kind: LossKind::Linear,
            rate: q,
        },
        lewis,
    )
    .unwrap()
}

/// u = 0, a ≡ a0, q ≡ q0 on [0, 1].
pub fn constant_model(n_y: usize, a0: f64, q0: f64) -> CrossSectionModel {
    linear_model(n_y, Profile::constant(0.0), Profile::constant(a0), Profile::constant(q0), 1.0)
}

/// u = 2cos(2πy), q = 0.25(1 + cos(2πy)), a ≡ 1.
pub fn shear_model(n_y: usize) -> CrossSectionModel {
    linear_model(
        n_y,
        Profile::cosine(0.0, 2.0),
        Profile::constant(1.0),
        Profile::cosine(0.25, 0.25),
        1.0,
    )
}

pub fn shear_flow(y: f64) -> f64 {
    2.0 * (2.0 * PI * y).cos()
}

pub fn shear_loss(y: f64) -> f64 {
    0.25 * (1.0 + (2.0 * PI * y).cos())
}

/// Smallest eigenvalue of −d²/dy² + c(y) on [0, 1] with Neumann ends,
/// discretized on `n` nodes and solved as a dense symmetric matrix.
pub fn dense_smallest(n: usize, c: impl Fn(f64) -> f64) -> f64 {
    let h = 1.0 / (n - 1) as f64;
    let w = |i: usize| if i == 0 || i == n - 1 { 0.5 * h } else { h };
    // Ghost-point matrix A, then B = W^{1/2} A W^{-1/2}.
    let a = |i: usize, j: usize| -> f64 {
        let y = i as f64 * h;
        if i == j {
            2.0 / (h * h) + c(y)
        } else if (i == 0 && j == 1) || (i == n - 1 && j == n - 2) {
            -2.0 / (h * h)
        } else if i.abs_diff(j) == 1 {
            -1.0 / (h * h)
        } else {
            0.0
        }
    };
    let b = faer::Mat::<f64>::from_fn(n, n, |i, j| a(i, j) * (w(i) / w(j)).sqrt());
    let b = faer::Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (b[(i, j)] + b[(j, i)]));
    let vals = b.self_adjoint_eigenvalues(faer::Side::Lower).expect("dense eigensolver");
    vals[0]
}

/// Refined node count with `factor` times as many intervals.
pub fn refined(n: usize, factor: usize) -> usize {
    factor * (n - 1) + 1
}
