//! Seeded random matrices for sampling and tests.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{traceless_shift, ComplexMatrix};
use crate::scalar::Real;

/// Deterministic generator for a given seed.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::lit(re), T::lit(im))
}

/// Matrix with independent standard complex Gaussian entries.
pub fn ginibre<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(n, |_, _| gaussian(rng))
}

pub fn hermitian<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix<T> {
    ginibre(rng, n).hermitian_part()
}

/// Nonzero traceless Hermitian matrix.
pub fn traceless_hermitian<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix<T> {
    traceless_shift(&hermitian(rng, n))
}

/// `n`-dimensional complex Gaussian vector.
pub fn vector<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex<T>> {
    (0..n).map(|_| gaussian(rng)).collect()
}

/// Haar-distributed unitary from Gram-Schmidt on Gaussian columns.
pub fn unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix<T> {
    let cols = orthonormalize((0..n).map(|_| vector(rng, n)).collect());
    ComplexMatrix::from_fn(n, |i, j| cols[j][i])
}

/// Gram-Schmidt (two passes) on complex vectors; dependent vectors are
/// dropped.
pub(crate) fn orthonormalize<T: Real>(vs: Vec<Vec<Complex<T>>>) -> Vec<Vec<Complex<T>>> {
    let mut out: Vec<Vec<Complex<T>>> = Vec::with_capacity(vs.len());
    for mut v in vs {
        for _ in 0..2 {
            for q in &out {
                let c: Complex<T> = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(q) {
                    *x = *x - c * y;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt();
        if norm > T::lit(1e-6) {
            out.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    out
}

/// Full-rank density matrix `G G* / Tr(G G*)`.
pub fn density<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix<T> {
    let g = ginibre::<T, R>(rng, n);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    m.scale(T::one() / tr).hermitian_part()
}

/// Kraus operators of a random channel: the `n × n` blocks of the first
/// `n` columns of a random `(count·n)`-dimensional unitary.
pub fn kraus_operators<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, count: usize) -> Vec<ComplexMatrix<T>> {
    let u = unitary::<T, R>(rng, n * count);
    (0..count)
        .map(|k| ComplexMatrix::from_fn(n, |i, j| u[(k * n + i, j)]))
        .collect()
}

/// Traceless Hermitian matrix whose spectrum has random multiplicities.
/// Returns the matrix together with the multiplicities used.
pub fn clustered_observable<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> (ComplexMatrix<T>, Vec<usize>) {
    let clusters = rng.random_range(2..=n);
    // random composition of n into `clusters` positive parts
    let mut cuts: Vec<usize> = (1..n).collect();
    for i in (1..cuts.len()).rev() {
        let j = rng.random_range(0..=i);
        cuts.swap(i, j);
    }
    let mut chosen: Vec<usize> = cuts[..clusters - 1].to_vec();
    chosen.sort_unstable();
    let mut mult = Vec::with_capacity(clusters);
    let mut prev = 0;
    for c in chosen.into_iter().chain(std::iter::once(n)) {
        mult.push(c - prev);
        prev = c;
    }
    // well separated distinct values
    let mut diag = Vec::with_capacity(n);
    let mut value = rng.random_range(-2.0..-1.0);
    for &m in &mult {
        for _ in 0..m {
            diag.push(T::lit(value));
        }
        value += rng.random_range(0.5..1.5);
    }
    let u = unitary::<T, R>(rng, n);
    let s = traceless_shift(&ComplexMatrix::diagonal(&diag)).conjugate_by(&u);
    (s.hermitian_part(), mult)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eigh;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = seeded(1);
        for n in 1..6 {
            assert!(unitary::<f64, _>(&mut rng, n).is_unitary(1e-12));
        }
    }

    #[test]
    fn density_is_physical() {
        let mut rng = seeded(2);
        let rho = density::<f64, _>(&mut rng, 4);
        assert!((rho.trace().re - 1.0).abs() < 1e-14);
        assert!(eigh(&rho).unwrap().values[0] > 0.0);
    }

    #[test]
    fn kraus_sum_is_identity() {
        let mut rng = seeded(3);
        let ops = kraus_operators::<f64, _>(&mut rng, 3, 4);
        let mut sum = ComplexMatrix::zeros(3);
        for k in &ops {
            sum += &(&k.adjoint() * k);
        }
        assert!((&sum - &ComplexMatrix::identity(3)).max_abs() < 1e-12);
    }

    #[test]
    fn clustered_multiplicities_sum_to_n() {
        let mut rng = seeded(4);
        for n in 2..7 {
            let (s, m) = clustered_observable::<f64, _>(&mut rng, n);
            assert_eq!(m.iter().sum::<usize>(), n);
            assert!(m.len() >= 2);
            assert!(s.trace().norm() < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_matrix() {
        let a = hermitian::<f64, _>(&mut seeded(9), 3);
        let b = hermitian::<f64, _>(&mut seeded(9), 3);
        assert_eq!(a, b);
    }
}
