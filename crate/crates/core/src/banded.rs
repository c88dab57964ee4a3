//! Symmetric positive definite band matrices and their Cholesky factors.

use crate::error::{Error, Result};

/// Lower band of a symmetric matrix with half-bandwidth `bw`.
///
/// Entry `(i, k)` with `i - bw <= k <= i` lives at `i * (bw + 1) + k + bw - i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBanded {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl SymBanded {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn index(&self, i: usize, k: usize) -> usize {
        debug_assert!(k <= i && i - k <= self.bw);
        i * (self.bw + 1) + k + self.bw - i
    }

    /// Entry `(i, k)`; zero outside the band.
    pub fn get(&self, i: usize, k: usize) -> f64 {
        let (i, k) = if i >= k { (i, k) } else { (k, i) };
        if i - k > self.bw {
            0.0
        } else {
            self.data[self.index(i, k)]
        }
    }

    /// Adds `v` to entries `(i, k)` and `(k, i)`.
    pub fn add(&mut self, i: usize, k: usize, v: f64) {
        let (i, k) = if i >= k { (i, k) } else { (k, i) };
        assert!(i - k <= self.bw, "entry ({i}, {k}) outside band {}", self.bw);
        let idx = self.index(i, k);
        self.data[idx] += v;
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.apply_into(x, &mut y);
        y
    }

    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            let row = &self.data[i * (self.bw + 1)..(i + 1) * (self.bw + 1)];
            let off = self.bw + lo - i;
            let mut s = row[self.bw] * x[i];
            for k in lo..i {
                let a = row[off + k - lo];
                s += a * x[k];
                y[k] += a * x[i];
            }
            y[i] += s;
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, k| self.get(i, k))
    }

    /// Cholesky factorization `A = L Lᵀ` within the band.
    pub fn cholesky(&self, context: &'static str) -> Result<BandedCholesky> {
        let (n, bw) = (self.n, self.bw);
        let mut l = self.data.clone();
        let at = |i: usize, k: usize| i * (bw + 1) + k + bw - i;
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for k in lo..=i {
                let mut s = l[at(i, k)];
                let mlo = lo.max(k.saturating_sub(bw));
                for m in mlo..k {
                    s -= l[at(i, m)] * l[at(k, m)];
                }
                if k == i {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite {
                            context,
                            pivot: i,
                            value: s,
                        });
                    }
                    l[at(i, i)] = s.sqrt();
                } else {
                    l[at(i, k)] = s / l[at(k, k)];
                }
            }
        }
        Ok(BandedCholesky { n, bw, l })
    }
}

/// Cholesky factor of a [`SymBanded`] matrix, reused across solves.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandedCholesky {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, bw) = (self.n, self.bw);
        let at = |i: usize, k: usize| i * (bw + 1) + k + bw - i;
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut s = x[i];
            for k in lo..i {
                s -= self.l[at(i, k)] * x[k];
            }
            x[i] = s / self.l[at(i, i)];
        }
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let mut s = x[i];
            for k in i + 1..=hi {
                s -= self.l[at(k, i)] * x[k];
            }
            x[i] = s / self.l[at(i, i)];
        }
    }
}
