//! Thomas algorithm for tridiagonal systems, with a factored form for
//! matrices that are solved against many right-hand sides.

/// LU factors of a tridiagonal matrix (no pivoting).
///
/// Only valid for matrices where elimination without pivoting is stable,
/// e.g. diagonally dominant or symmetric positive definite ones.
#[derive(Debug, Clone)]
pub struct TridiagLu {
    sub: Vec<f64>,
    inv_pivot: Vec<f64>,
    sup: Vec<f64>,
}

impl TridiagLu {
    /// `sub[i]` couples row i to i−1 (`sub[0]` unused), `sup[i]` couples row i
    /// to i+1 (`sup[n−1]` unused). Returns `None` on a zero pivot.
    pub fn new(sub: &[f64], diag: &[f64], sup: &[f64]) -> Option<Self> {
        let n = diag.len();
        assert!(n > 0);
        assert_eq!(sub.len(), n);
        assert_eq!(sup.len(), n);
        let mut inv_pivot = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut pivot = diag[0];
        for i in 0..n {
            if i > 0 {
                pivot = diag[i] - sub[i] * upper[i - 1];
            }
            if pivot == 0.0 || !pivot.is_finite() {
                return None;
            }
            inv_pivot[i] = 1.0 / pivot;
            if i + 1 < n {
                upper[i] = sup[i] * inv_pivot[i];
            }
        }
        Some(Self {
            sub: sub.to_vec(),
            inv_pivot,
            sup: upper,
        })
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    /// Overwrites `rhs` with the solution.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.len();
        debug_assert_eq!(rhs.len(), n);
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.sub[i] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.sup[i] * rhs[i + 1];
        }
    }

    /// Solves for the line `data[offset + k * stride]`, k = 0..n.
    pub fn solve_strided(&self, data: &mut [f64], offset: usize, stride: usize, scratch: &mut Vec<f64>) {
        let n = self.len();
        scratch.clear();
        scratch.extend((0..n).map(|k| data[offset + k * stride]));
        self.solve_in_place(scratch);
        for (k, v) in scratch.iter().enumerate() {
            data[offset + k * stride] = *v;
        }
    }
}

/// Backward-Euler factor `I − dt·D·∂²` on a uniform grid with homogeneous
/// Neumann (ghost-point) ends.
pub fn implicit_neumann_diffusion(n: usize, spacing: f64, diffusivity: f64, dt: f64) -> TridiagLu {
    let r = diffusivity * dt / (spacing * spacing);
    let diag = vec![1.0 + 2.0 * r; n];
    let mut sub = vec![-r; n];
    let mut sup = vec![-r; n];
    sup[0] = -2.0 * r;
    sub[n - 1] = -2.0 * r;
    sub[0] = 0.0;
    sup[n - 1] = 0.0;
    TridiagLu::new(&sub, &diag, &sup).expect("diagonally dominant matrix has nonzero pivots")
}
