#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twistor_core::jet::{PolyMap, SurfacePoly};
use twistor_core::twistor::{special_orthogonal_from, HermitianStructure};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

pub fn point(rng: &mut ChaCha8Rng, dim: usize, r: f64) -> Vec<f64> {
    (0..dim).map(|_| uniform(rng, -r, r)).collect()
}

pub fn cplx(rng: &mut ChaCha8Rng, r: f64) -> Complex<f64> {
    Complex::new(uniform(rng, -r, r), uniform(rng, -r, r))
}

pub fn matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| uniform(rng, -1.0, 1.0))
}

pub fn rotation(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    special_orthogonal_from(matrix(rng, n, n)).unwrap()
}

pub fn positive_structure(rng: &mut ChaCha8Rng, k: usize) -> HermitianStructure<f64> {
    HermitianStructure::canonical(k).so_action(&rotation(rng, 2 * k)).unwrap()
}

pub fn poly(rng: &mut ChaCha8Rng, domain: usize, codomain: usize, degree: usize) -> PolyMap<f64> {
    let n = PolyMap::<f64>::coeff_count(domain, degree);
    let coeffs = (0..codomain).map(|_| (0..n).map(|_| uniform(rng, -1.0, 1.0)).collect()).collect();
    PolyMap::new(domain, degree, coeffs).unwrap()
}

/// Random `ℂ → ℂⁿ` polynomial of degree `≤ degree` using only `z` powers
/// (`holomorphic`), only `z̄` powers, or both.
pub fn surface_poly(rng: &mut ChaCha8Rng, n: usize, degree: u32, z: bool, zbar: bool) -> SurfacePoly<f64> {
    let terms = (0..n)
        .map(|_| {
            let mut t = Vec::new();
            for a in 0..=degree {
                for b in 0..=degree - a {
                    if (a > 0 && !z) || (b > 0 && !zbar) {
                        continue;
                    }
                    t.push(((a, b), cplx(rng, 1.0)));
                }
            }
            t
        })
        .collect();
    SurfacePoly::new(terms)
}
