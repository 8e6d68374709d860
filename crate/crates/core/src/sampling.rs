//! Seeded random sampling used by scans and property suites.
//!
//! Every random draw in the workspace goes through [`Sampler`], so a seed fully
//! determines the output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::families::{CholeskyParams, HBlockParams};
use crate::matcore::{inner, normalize, ComplexMatrix, C64};

pub struct Sampler {
    rng: ChaCha8Rng,
    seed: u64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    /// Standard complex normal with `E|z|^2 = 1`.
    pub fn complex_normal(&mut self) -> C64 {
        let s = 0.5f64.sqrt();
        C64::new(self.normal() * s, self.normal() * s)
    }

    pub fn gaussian_vector(&mut self, n: usize) -> Vec<C64> {
        (0..n).map(|_| self.complex_normal()).collect()
    }

    /// Unit vector from a normalized complex Gaussian (Haar-distributed).
    pub fn haar_vector(&mut self, n: usize) -> Vec<C64> {
        loop {
            if let Ok(v) = normalize(&self.gaussian_vector(n)) {
                return v;
            }
        }
    }

    /// Haar-random unitary via Gram-Schmidt on Gaussian columns.
    pub fn haar_unitary(&mut self, n: usize) -> ComplexMatrix {
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
        while cols.len() < n {
            let mut v = self.gaussian_vector(n);
            for q in &cols {
                let ov = inner(q, &v);
                for (a, b) in v.iter_mut().zip(q) {
                    *a -= ov * b;
                }
            }
            if let Ok(v) = normalize(&v) {
                cols.push(v);
            }
        }
        let mut u = ComplexMatrix::zeros(n, n);
        for (j, col) in cols.iter().enumerate() {
            u.set_column(j, col);
        }
        u
    }

    /// Random positive semidefinite matrix of the given rank and unit trace.
    pub fn psd(&mut self, n: usize, rank: usize) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(n, rank, |_, _| self.complex_normal());
        let m = &g * &g.adjoint();
        let tr = m.trace().re;
        m.scale_real(1.0 / tr)
    }

    /// Cholesky parameters with `a, b, c` drawn from `|N(0,1)| + 0.05` and complex normal `x, y, z`.
    pub fn cholesky_params(&mut self) -> CholeskyParams {
        CholeskyParams {
            a: self.normal().abs() + 0.05,
            b: self.normal().abs() + 0.05,
            c: self.normal().abs() + 0.05,
            x: self.complex_normal(),
            y: self.complex_normal(),
            z: self.complex_normal(),
        }
    }

    /// Standard-family block `H = L L^dagger` from random Cholesky data.
    pub fn h_block(&mut self) -> HBlockParams {
        HBlockParams::from_cholesky(&self.cholesky_params())
    }
}
