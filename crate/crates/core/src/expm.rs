//! Matrix exponential by scaling and squaring with a degree-6 Padé approximant.

use nalgebra::{ComplexField, DMatrix};
use num_traits::Zero;

/// `exp(a)` for a square matrix.
pub fn expm<T: ComplexField + Copy>(a: &DMatrix<T>) -> DMatrix<T> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return a.clone();
    }
    let norm = one_norm(a);
    // keep ‖A / 2^s‖₁ below 1/2
    let half: T::RealField = nalgebra::convert(0.5);
    let mut s = 0u32;
    let mut scaled_norm = norm;
    while scaled_norm > half.clone() {
        scaled_norm *= half.clone();
        s += 1;
    }
    let scale = T::from_real(nalgebra::convert(0.5f64.powi(s as i32)));
    let a = a * scale;

    // c_k = (2p-k)! p! / ((2p)! k! (p-k)!), p = 6
    const C: [f64; 7] = [
        1.0,
        0.5,
        5.0 / 44.0,
        1.0 / 66.0,
        1.0 / 792.0,
        1.0 / 15840.0,
        1.0 / 665280.0,
    ];
    let id = DMatrix::<T>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let c = |k: usize| T::from_real(nalgebra::convert(C[k]));
    let even = &id * c(0) + &a2 * c(2) + &a4 * c(4) + &a6 * c(6);
    let odd = &a * (&id * c(1) + &a2 * c(3) + &a4 * c(5));
    let num = &even + &odd;
    let den = &even - &odd;
    let mut r = den
        .lu()
        .solve(&num)
        .expect("Padé denominator is nonsingular for ‖A‖ ≤ 1/2");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

fn one_norm<T: ComplexField + Copy>(a: &DMatrix<T>) -> T::RealField {
    let mut best = T::RealField::zero();
    for col in a.column_iter() {
        let sum = col
            .iter()
            .fold(T::RealField::zero(), |acc, x| acc + x.modulus());
        if sum > best {
            best = sum;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex;

    #[test]
    fn rotation_generator() {
        let t = 2.3_f64;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -t, t, 0.0]);
        let e = expm(&a);
        assert_relative_eq!(e[(0, 0)], t.cos(), epsilon = 1e-14);
        assert_relative_eq!(e[(1, 0)], t.sin(), epsilon = 1e-14);
        assert_relative_eq!(e[(0, 1)], -t.sin(), epsilon = 1e-14);
    }

    #[test]
    fn nilpotent_is_exact_polynomial() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 5.0, 1.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0]);
        let e = expm(&a);
        // I + A + A²/2
        assert_relative_eq!(e[(0, 1)], 5.0, epsilon = 1e-12);
        assert_relative_eq!(e[(0, 2)], 1.0 + 7.5, epsilon = 1e-12);
        assert_relative_eq!(e[(1, 2)], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn diagonal_large_entries() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-4.0, 1.5, 7.0]));
        let e = expm(&a);
        for (i, v) in [-4.0f64, 1.5, 7.0].iter().enumerate() {
            assert_relative_eq!(e[(i, i)], v.exp(), max_relative = 1e-13);
        }
    }

    #[test]
    fn complex_scalar() {
        let z = Complex::new(0.3, 1.9);
        let e = expm(&DMatrix::from_element(1, 1, z));
        let expect = z.exp();
        assert_relative_eq!(e[(0, 0)].re, expect.re, epsilon = 1e-14);
        assert_relative_eq!(e[(0, 0)].im, expect.im, epsilon = 1e-14);
    }

    #[test]
    fn inverse_property() {
        let a = DMatrix::from_row_slice(2, 2, &[0.4, -1.2, 0.7, 0.1]);
        let p = expm(&a) * expm(&(-&a));
        assert_relative_eq!(p, DMatrix::identity(2, 2), epsilon = 1e-13);
    }
}
