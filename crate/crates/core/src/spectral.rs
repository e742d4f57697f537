//! Hermitian eigendecomposition (cyclic complex Jacobi) and eigenspace
//! projectors.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::{czero, Real};
use crate::tolerance::Tolerance;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Eigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

/// Diagonalizes a Hermitian matrix. Only the Hermitian part of `a` is used.
pub fn eigh<T: Real>(a: &ComplexMatrix<T>) -> Result<Eigen<T>> {
    let n = a.dim();
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.norm();
    if scale == T::zero() {
        return Ok(Eigen {
            values: vec![T::zero(); n],
            vectors: v,
        });
    }
    let eps = T::epsilon();
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= eps * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap());
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(Eigen { values, vectors })
}

/// Zeroes the (p, q) entry with the unitary `diag(1, e^{-iφ}) R(θ)`.
fn rotate<T: Real>(m: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let b = m[(p, q)];
    let babs = b.norm();
    if babs == T::zero() {
        return;
    }
    let n = m.dim();
    let phase = b / babs;
    let two = T::lit(2.0);
    let theta = (two * babs).atan2(m[(q, q)].re - m[(p, p)].re) / two;
    let (s, c) = theta.sin_cos();
    let cc = Complex::new(c, T::zero());
    // columns of U: u_p = (c, -s e^{-iφ}), u_q = (s, c e^{-iφ})
    let u_pp = cc;
    let u_qp = -phase.conj() * s;
    let u_pq = Complex::new(s, T::zero());
    let u_qq = phase.conj() * c;

    for k in 0..n {
        let (akp, akq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = akp * u_pp + akq * u_qp;
        m[(k, q)] = akp * u_pq + akq * u_qq;
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
    for k in 0..n {
        let (apk, aqk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        m[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    m[(p, q)] = czero();
    m[(q, p)] = czero();
    m[(p, p)] = Complex::new(m[(p, p)].re, T::zero());
    m[(q, q)] = Complex::new(m[(q, q)].re, T::zero());
}

/// Distinct eigenvalues of a Hermitian matrix with their eigenspace
/// projectors (Lüders form) and multiplicities.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct SpectralDecomposition<T: Real> {
    #[serde(serialize_with = "ser_reals")]
    pub eigenvalues: Vec<T>,
    pub projectors: Vec<ComplexMatrix<T>>,
    pub multiplicities: Vec<usize>,
}

fn ser_reals<T: Real, S: serde::Serializer>(v: &[T], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.as_f64()))
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// `Σ Π_j F Π_j`, the non-selective measurement map.
    pub fn pinch(&self, f: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let mut out = ComplexMatrix::zeros(f.dim());
        for p in &self.projectors {
            out += &(&(p * f) * p);
        }
        out
    }

    /// `Σ λ_j Π_j`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n);
        for (l, p) in self.eigenvalues.iter().zip(&self.projectors) {
            out.axpy(*l, p);
        }
        out
    }
}

/// Clusters the spectrum of a Hermitian matrix. Consecutive sorted
/// eigenvalues within `eig_tol * max(1, spectral radius)` of each other are
/// merged.
pub fn spectral<T: Real>(s: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<SpectralDecomposition<T>> {
    let dev = s.hermitian_deviation();
    if dev > tol.rank_tol * T::one().max(s.max_abs()) {
        return Err(Error::NotHermitian {
            what: "observable",
            deviation: dev.as_f64(),
        });
    }
    let eig = eigh(s)?;
    let n = s.dim();
    let radius = eig.values.iter().map(|x| x.abs()).fold(T::one(), T::max);
    let gap = tol.eig_tol * radius;

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        match clusters.last_mut() {
            Some(c) if eig.values[i] - eig.values[*c.last().unwrap()] <= gap => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }

    let mut eigenvalues = Vec::with_capacity(clusters.len());
    let mut projectors = Vec::with_capacity(clusters.len());
    let mut multiplicities = Vec::with_capacity(clusters.len());
    for c in clusters {
        let mean = c.iter().map(|&i| eig.values[i]).sum::<T>() / T::from_count(c.len());
        let mut proj = ComplexMatrix::zeros(n);
        for &i in &c {
            let col = eig.vectors.column(i);
            proj += &ComplexMatrix::outer(&col, &col);
        }
        eigenvalues.push(mean);
        projectors.push(proj);
        multiplicities.push(c.len());
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        projectors,
        multiplicities,
    })
}
