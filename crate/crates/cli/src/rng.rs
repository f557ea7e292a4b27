//! Per-check random streams.
//!
//! Each check draws from `ChaCha8Rng::seed_from_u64(seed ^ fnv1a64(check))`
//! (`rand_chacha` 0.9, whose `seed_from_u64` expands the key with PCG32).
//! A float in `[0, 1)` is `(next_u64() >> 11) · 2⁻⁵³`; `uniform(lo, hi)` is
//! `lo + (hi − lo) · u`. Points are filled coordinate by coordinate.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 64-bit FNV-1a.
pub fn fnv1a64(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

pub struct CheckRng(ChaCha8Rng);

impl CheckRng {
    pub fn new(seed: u64, check: &str) -> Self {
        CheckRng(ChaCha8Rng::seed_from_u64(seed ^ fnv1a64(check)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Point of `[−r, r]^dim`.
    pub fn point(&mut self, dim: usize, r: f64) -> Vec<f64> {
        (0..dim).map(|_| self.uniform(-r, r)).collect()
    }

    pub fn complex(&mut self, r: f64) -> Complex<f64> {
        let re = self.uniform(-r, r);
        Complex::new(re, self.uniform(-r, r))
    }

    /// Entries uniform in `[−1, 1]`, row-major.
    pub fn matrix(&mut self, rows: usize, cols: usize) -> DMatrix<f64> {
        let v: Vec<f64> = (0..rows * cols).map(|_| self.uniform(-1.0, 1.0)).collect();
        DMatrix::from_row_slice(rows, cols, &v)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.unit() * n as f64) as usize
    }
}
