//! Generalized Gell-Mann basis of su(n), scaled to unit Hilbert-Schmidt norm
//! and multiplied by `i` so every element is skew-Hermitian.
//!
//! Canonical order: symmetric off-diagonal `(j, k)` for `j < k` in
//! row-major order, then antisymmetric off-diagonal in the same order, then
//! diagonal elements `l = 1..n-1`.

use num_complex::Complex;

use crate::matrix::ComplexMatrix;
use crate::scalar::{cone, Real};

/// Hermitian generalized Gell-Mann matrices, orthonormal under `Tr(AB*)`.
pub fn hermitian_basis<T: Real>(n: usize) -> Vec<ComplexMatrix<T>> {
    let mut out = Vec::with_capacity(n * n - 1);
    let r = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    for j in 0..n {
        for k in j + 1..n {
            let mut m = ComplexMatrix::zeros(n);
            m[(j, k)] = Complex::new(r, T::zero());
            m[(k, j)] = Complex::new(r, T::zero());
            out.push(m);
        }
    }
    for j in 0..n {
        for k in j + 1..n {
            let mut m = ComplexMatrix::zeros(n);
            m[(j, k)] = Complex::new(T::zero(), -r);
            m[(k, j)] = Complex::new(T::zero(), r);
            out.push(m);
        }
    }
    for l in 1..n {
        let lf = T::from_count(l);
        let norm = T::one() / (lf * (lf + T::one())).sqrt();
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..l {
            m[(i, i)] = cone::<T>() * norm;
        }
        m[(l, l)] = Complex::new(-lf * norm, T::zero());
        out.push(m);
    }
    out
}

/// Skew-Hermitian orthonormal basis of su(n).
pub fn su_basis<T: Real>(n: usize) -> Vec<ComplexMatrix<T>> {
    hermitian_basis(n).iter().map(ComplexMatrix::mul_i).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::hs_inner;

    #[test]
    fn orthonormal_and_traceless() {
        for n in 2..=5 {
            let b = su_basis::<f64>(n);
            assert_eq!(b.len(), n * n - 1);
            for (i, x) in b.iter().enumerate() {
                assert!(x.is_skew_hermitian(1e-15));
                assert!(x.trace().norm() < 1e-14);
                for (j, y) in b.iter().enumerate() {
                    let g = hs_inner(x, y).unwrap();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((g.re - want).abs() < 1e-14 && g.im.abs() < 1e-14);
                }
            }
        }
    }
}
