//! Banded LU factorization without pivoting, for the diagonally dominant
//! finite-difference operators of the traveling-front solver.

#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    bw: usize,
    // Row-major storage of the band: row i holds columns i−bw ..= i+bw.
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        Self {
            n,
            bw: bandwidth,
            data: vec![0.0; n * (2 * bandwidth + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.bw >= i && j <= i + self.bw, "({i}, {j}) outside band");
        i * (2 * self.bw + 1) + (j + self.bw - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.bw < i || j > i + self.bw || j >= self.n {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            let hi = (i + self.bw).min(self.n - 1);
            let mut s = 0.0;
            for j in lo..=hi {
                s += self.data[self.idx(i, j)] * x[j];
            }
            out[i] = s;
        }
    }

    /// In-place LU. Returns `None` on a vanishing pivot.
    pub fn factor(mut self) -> Option<BandedLu> {
        let (n, bw) = (self.n, self.bw);
        for k in 0..n {
            let pivot = self.data[self.idx(k, k)];
            if pivot == 0.0 || !pivot.is_finite() {
                return None;
            }
            let last = (k + bw).min(n - 1);
            for i in k + 1..=last {
                let ik = self.idx(i, k);
                let l = self.data[ik] / pivot;
                if l == 0.0 {
                    continue;
                }
                self.data[ik] = l;
                for j in k + 1..=last {
                    let kj = self.data[self.idx(k, j)];
                    if kj != 0.0 {
                        let ij = self.idx(i, j);
                        self.data[ij] -= l * kj;
                    }
                }
            }
        }
        Some(BandedLu { m: self })
    }
}

#[derive(Debug, Clone)]
pub struct BandedLu {
    m: BandedMatrix,
}

impl BandedLu {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, bw) = (self.m.n, self.m.bw);
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut s = b[i];
            for j in lo..i {
                s -= self.m.data[self.m.idx(i, j)] * b[j];
            }
            b[i] = s;
        }
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let mut s = b[i];
            for j in i + 1..=hi {
                s -= self.m.data[self.m.idx(i, j)] * b[j];
            }
            b[i] = s / self.m.data[self.m.idx(i, i)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_pentadiagonal_system() {
        let n = 12;
        let mut a = BandedMatrix::zeros(n, 2);
        for i in 0..n {
            a.set(i, i, 6.0);
            if i >= 1 {
                a.set(i, i - 1, -1.0);
            }
            if i >= 2 {
                a.set(i, i - 2, -0.5);
            }
            if i + 1 < n {
                a.set(i, i + 1, -2.0);
            }
            if i + 2 < n {
                a.set(i, i + 2, 0.3);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin() + 1.0).collect();
        let mut b = vec![0.0; n];
        a.mul_vec(&x, &mut b);
        let lu = a.factor().unwrap();
        lu.solve_in_place(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).abs() < 1e-13);
        }
    }
}
