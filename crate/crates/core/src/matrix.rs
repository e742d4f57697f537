//! Dense square complex matrices.
//!
//! Entries are stored row-major. On the wire a matrix is a nested array of
//! rows, each entry a `[re, im]` pair.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{cone, czero, imag_unit, Real};

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![czero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = cone();
        }
        m
    }

    /// Builds a matrix from rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Empty);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != dim {
                return Err(Error::NotSquare {
                    row,
                    len: r.len(),
                    expected: dim,
                });
            }
            data.extend(r);
        }
        Ok(Self { dim, data })
    }

    /// Real-valued rows, convenient for literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex::new(T::lit(x), T::zero())).collect())
                .collect(),
        )
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn diagonal(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex::new(v, T::zero());
        }
        m
    }

    /// Outer product `u v*`.
    pub fn outer(u: &[Complex<T>], v: &[Complex<T>]) -> Self {
        debug_assert_eq!(u.len(), v.len());
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex<T>]> {
        self.data.chunks(self.dim)
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn diag(&self) -> Vec<Complex<T>> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn real_diag(&self) -> Vec<T> {
        (0..self.dim).map(|i| self[(i, i)].re).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(czero(), |acc, i| acc + self[(i, i)])
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_c(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    /// Multiplication by the imaginary unit; maps Hermitian to skew-Hermitian.
    pub fn mul_i(&self) -> Self {
        self.map(|z| Complex::new(-z.im, z.re))
    }

    /// Multiplication by `-i`; maps skew-Hermitian to Hermitian.
    pub fn mul_neg_i(&self) -> Self {
        self.map(|z| Complex::new(z.im, -z.re))
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Frobenius norm, `sqrt(Tr(A A*))`.
    pub fn norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm_one(&self) -> T {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        check_dims(self, rhs)?;
        Ok(self.mul_unchecked(rhs))
    }

    pub(crate) fn mul_unchecked(&self, rhs: &Self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d = *d + a * b;
                }
            }
        }
        out
    }

    /// `U A U*`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.mul_unchecked(self).mul_unchecked(&u.adjoint())
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (p, q) = (self.dim, rhs.dim);
        Self::from_fn(p * q, |i, j| self[(i / q, j / q)] * rhs[(i % q, j % q)])
    }

    pub fn mat_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        self.rows()
            .map(|r| r.iter().zip(v).fold(czero(), |acc, (&a, &b)| acc + a * b))
            .collect()
    }

    /// Largest entry of `A - A*` in magnitude.
    pub fn hermitian_deviation(&self) -> T {
        let n = self.dim;
        let mut dev = T::zero();
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn skew_hermitian_deviation(&self) -> T {
        let n = self.dim;
        let mut dev = T::zero();
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] + self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn unitary_deviation(&self) -> T {
        let p = self.mul_unchecked(&self.adjoint());
        (&p - &Self::identity(self.dim)).max_abs()
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn is_skew_hermitian(&self, tol: T) -> bool {
        self.skew_hermitian_deviation() <= tol
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitary_deviation() <= tol
    }

    pub fn is_traceless(&self, tol: T) -> bool {
        self.trace().norm() <= tol
    }

    pub fn off_diagonal_max(&self) -> T {
        let n = self.dim;
        let mut dev = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    dev = dev.max(self[(i, j)].norm());
                }
            }
        }
        dev
    }

    /// Symmetrized copy `(A + A*)/2`, dropping rounding asymmetry.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half)
    }

    pub fn skew_hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.dim, |i, j| (self[(i, j)] - self[(j, i)].conj()) * half)
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<[f64; 2]>> {
        self.rows()
            .map(|r| r.iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect())
            .collect()
    }

    pub fn from_f64_rows(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&[re, im]| Complex::new(T::lit(re), T::lit(im))).collect())
                .collect(),
        )
    }
}

fn check_dims<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    Ok(())
}

impl<T: Real> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

// Operator impls panic on dimension mismatch; the fallible entry points
// (`matmul`, `commutator`, `hs_inner`) check first.
impl<'a, T: Real> Add<&'a ComplexMatrix<T>> for &'a ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<'a, T: Real> Sub<&'a ComplexMatrix<T>> for &'a ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<'a, T: Real> Mul<&'a ComplexMatrix<T>> for &'a ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        self.mul_unchecked(rhs)
    }
}

impl<T: Real> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn neg(self) -> ComplexMatrix<T> {
        self.map(|z| -z)
    }
}

impl<T: Real> AddAssign<&ComplexMatrix<T>> for ComplexMatrix<T> {
    fn add_assign(&mut self, rhs: &ComplexMatrix<T>) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a = *a + b;
        }
    }
}

impl<T: Real> SubAssign<&ComplexMatrix<T>> for ComplexMatrix<T> {
    fn sub_assign(&mut self, rhs: &ComplexMatrix<T>) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a = *a - b;
        }
    }
}

impl<T: Real> ComplexMatrix<T> {
    /// `self += s * rhs` for a real coefficient.
    pub fn axpy(&mut self, s: T, rhs: &Self) {
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a = *a + b * s;
        }
    }
}

impl<T: Real> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for r in self.rows() {
            write!(f, "  ")?;
            for z in r {
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<T: Real> Serialize for ComplexMatrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_f64_rows().serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for ComplexMatrix<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        Self::from_f64_rows(&rows).map_err(D::Error::custom)
    }
}

/// `AB - BA`.
pub fn commutator<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    check_dims(a, b)?;
    Ok(bracket(a, b))
}

pub(crate) fn bracket<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let mut ab = a.mul_unchecked(b);
    ab -= &b.mul_unchecked(a);
    ab
}

/// Hilbert-Schmidt inner product `Tr(A B*)`.
pub fn hs_inner<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<Complex<T>> {
    check_dims(a, b)?;
    Ok(hs(a, b))
}

pub(crate) fn hs<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Complex<T> {
    a.data
        .iter()
        .zip(&b.data)
        .fold(czero(), |acc, (&x, &y)| acc + x * y.conj())
}

/// Real part of `Tr(A B*)`; the inner product of the real space su(n).
pub(crate) fn hs_re<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> T {
    a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum()
}

/// `Tr(AB)` without forming the product.
pub fn trace_product<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Complex<T> {
    let n = a.dim;
    let mut acc = czero();
    for i in 0..n {
        for k in 0..n {
            acc = acc + a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// `M - (Tr M / n) I`.
pub fn traceless_shift<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let shift = m.trace() / T::from_count(m.dim);
    let mut out = m.clone();
    for i in 0..m.dim {
        out[(i, i)] = out[(i, i)] - shift;
    }
    out
}

/// Spin-1/2 operators `σ/2` for x, y, z.
pub fn half_paulis<T: Real>() -> [ComplexMatrix<T>; 3] {
    let h = T::lit(0.5);
    let z = czero::<T>();
    let sx = ComplexMatrix::from_rows(vec![
        vec![z, Complex::new(h, T::zero())],
        vec![Complex::new(h, T::zero()), z],
    ])
    .unwrap();
    let sy = ComplexMatrix::from_rows(vec![
        vec![z, -imag_unit::<T>() * h],
        vec![imag_unit::<T>() * h, z],
    ])
    .unwrap();
    let sz = ComplexMatrix::diagonal(&[h, -h]);
    [sx, sy, sz]
}
