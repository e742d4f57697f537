//! Small dense real linear algebra for design matrices: rank, least squares,
//! singular values.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::Real;
use crate::spectral::eigh;

/// Numerical rank by Gaussian elimination with partial pivoting. A pivot
/// counts when it exceeds `tol` times the largest absolute entry.
pub fn rank<T: Real>(rows: &[Vec<T>], tol: T) -> usize {
    let mut echelon = Echelon::new(rows.first().map_or(0, Vec::len), tol);
    let scale = rows
        .iter()
        .flat_map(|r| r.iter().map(|x| x.abs()))
        .fold(T::zero(), T::max);
    if scale == T::zero() {
        return 0;
    }
    echelon.scale = scale;
    for r in rows {
        echelon.insert(r);
    }
    echelon.rank()
}

/// Incrementally maintained row-echelon basis. Rows are reduced against
/// the stored pivots; a residual whose largest entry exceeds
/// `tol * scale` becomes a new pivot row.
#[derive(Debug, Clone)]
pub struct Echelon<T: Real> {
    cols: usize,
    tol: T,
    scale: T,
    pivots: Vec<(usize, Vec<T>)>,
}

impl<T: Real> Echelon<T> {
    pub fn new(cols: usize, tol: T) -> Self {
        Self {
            cols,
            tol,
            scale: T::one(),
            pivots: Vec::new(),
        }
    }

    pub fn with_scale(mut self, scale: T) -> Self {
        self.scale = scale;
        self
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn reduce(&self, row: &[T]) -> Vec<T> {
        let mut r = row.to_vec();
        for (col, p) in &self.pivots {
            let f = r[*col] / p[*col];
            if f != T::zero() {
                for (x, &y) in r.iter_mut().zip(p) {
                    *x = *x - f * y;
                }
            }
        }
        r
    }

    /// Would `row` raise the rank?
    pub fn would_extend(&self, row: &[T]) -> bool {
        let r = self.reduce(row);
        r.iter().map(|x| x.abs()).fold(T::zero(), T::max) > self.tol * self.scale
    }

    /// Inserts `row`; returns whether the rank increased.
    pub fn insert(&mut self, row: &[T]) -> bool {
        debug_assert_eq!(row.len(), self.cols);
        let r = self.reduce(row);
        let (col, max) = r
            .iter()
            .enumerate()
            .map(|(i, x)| (i, x.abs()))
            .fold((0, T::zero()), |a, b| if b.1 > a.1 { b } else { a });
        if max > self.tol * self.scale {
            self.pivots.push((col, r));
            true
        } else {
            false
        }
    }
}

/// Singular values of a real `rows × cols` matrix, descending.
pub fn singular_values<T: Real>(rows: &[Vec<T>]) -> Result<Vec<T>> {
    let (_, gram) = gram_eigen(rows)?;
    Ok(gram)
}

fn gram_eigen<T: Real>(rows: &[Vec<T>]) -> Result<(ComplexMatrix<T>, Vec<T>)> {
    let cols = rows.first().map_or(0, Vec::len);
    let gram = ComplexMatrix::from_fn(cols, |i, j| {
        Complex::new(rows.iter().map(|r| r[i] * r[j]).sum(), T::zero())
    });
    let e = eigh(&gram)?;
    // ascending eigenvalues -> descending singular values
    let n = e.values.len();
    let svals = e.values.iter().rev().map(|&l| l.max(T::zero()).sqrt()).collect();
    let vecs = ComplexMatrix::from_fn(n, |r, c| e.vectors[(r, n - 1 - c)]);
    Ok((vecs, svals))
}

/// Right singular vectors whose singular value is below
/// `tol * largest singular value`.
pub fn null_directions<T: Real>(rows: &[Vec<T>], tol: T) -> Result<Vec<Vec<T>>> {
    let (vecs, svals) = gram_eigen(rows)?;
    let top = svals.first().copied().unwrap_or(T::zero());
    Ok(svals
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= tol * top)
        .map(|(c, _)| (0..vecs.dim()).map(|r| vecs[(r, c)].re).collect())
        .collect())
}

/// Least-squares solution of `A x ≈ b`.
#[derive(Debug, Clone)]
pub struct LeastSquares<T: Real> {
    pub x: Vec<T>,
    /// Euclidean norm of `A x - b`.
    pub residual: T,
    /// Ratio of extreme singular values of `A`.
    pub condition: T,
}

/// Solves an overdetermined full-column-rank system by Householder QR.
pub fn lstsq<T: Real>(rows: &[Vec<T>], b: &[T], tol: T) -> Result<LeastSquares<T>> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if b.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: b.len() });
    }
    let r = rank(rows, tol);
    if r < n {
        return Err(Error::Singular { rank: r, needed: n });
    }
    let mut a: Vec<Vec<T>> = rows.to_vec();
    let mut y = b.to_vec();
    for k in 0..n {
        let norm = (k..m).map(|i| a[i][k] * a[i][k]).sum::<T>().sqrt();
        if norm == T::zero() {
            continue;
        }
        let alpha = if a[k][k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..m).map(|i| a[i][k]).collect();
        v[0] = v[0] - alpha;
        let vnorm2: T = v.iter().map(|x| *x * *x).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::lit(2.0);
        for j in k..n {
            let dot: T = v.iter().enumerate().map(|(t, vi)| *vi * a[k + t][j]).sum();
            let f = two * dot / vnorm2;
            for (t, vi) in v.iter().enumerate() {
                a[k + t][j] = a[k + t][j] - f * *vi;
            }
        }
        let dot: T = v.iter().enumerate().map(|(t, vi)| *vi * y[k + t]).sum();
        let f = two * dot / vnorm2;
        for (t, vi) in v.iter().enumerate() {
            y[k + t] = y[k + t] - f * *vi;
        }
    }
    let mut x = vec![T::zero(); n];
    for k in (0..n).rev() {
        let s: T = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (y[k] - s) / a[k][k];
    }
    let residual = rows
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let d = row.iter().zip(&x).map(|(p, q)| *p * *q).sum::<T>() - bi;
            d * d
        })
        .sum::<T>()
        .sqrt();
    let sv = singular_values(rows)?;
    let smin = sv.last().copied().unwrap_or(T::zero());
    let condition = if smin > T::zero() { sv[0] / smin } else { T::infinity() };
    Ok(LeastSquares { x, residual, condition })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_simple_matrices() {
        assert_eq!(rank(&[vec![1.0, 1.0], vec![1.0, 1.0]], 1e-12), 1);
        assert_eq!(rank(&[vec![1.0, 0.0], vec![0.0, 2.0], vec![1.0, 2.0]], 1e-12), 2);
        assert_eq!(rank::<f64>(&[vec![0.0, 0.0]], 1e-12), 0);
    }

    #[test]
    fn echelon_incremental() {
        let mut e = Echelon::new(3, 1e-12);
        assert!(e.insert(&[1.0, 2.0, 3.0]));
        assert!(!e.would_extend(&[2.0, 4.0, 6.0]));
        assert!(e.insert(&[0.0, 1.0, 0.0]));
        assert!(!e.insert(&[1.0, 5.0, 3.0]));
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn lstsq_exact_and_overdetermined() {
        let rows = vec![vec![2.0, 1.0], vec![1.0, 3.0], vec![1.0, 1.0]];
        let x_true = [0.5, -1.25];
        let b: Vec<f64> = rows.iter().map(|r| r[0] * x_true[0] + r[1] * x_true[1]).collect();
        let sol = lstsq(&rows, &b, 1e-12).unwrap();
        assert!((sol.x[0] - x_true[0]).abs() < 1e-14 && (sol.x[1] - x_true[1]).abs() < 1e-14);
        assert!(sol.residual < 1e-14);
        assert!(sol.condition >= 1.0);

        // inconsistent: least-squares mean
        let sol = lstsq::<f64>(&[vec![1.0], vec![1.0]], &[1.0, 3.0], 1e-12).unwrap();
        assert!((sol.x[0] - 2.0).abs() < 1e-14);
        assert!((sol.residual - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn lstsq_singular() {
        let rows: Vec<Vec<f64>> = vec![vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(matches!(lstsq(&rows, &[1.0, 2.0], 1e-12), Err(Error::Singular { rank: 1, needed: 2 })));
        let null = null_directions::<f64>(&rows, 1e-9).unwrap();
        assert_eq!(null.len(), 1);
        assert!((null[0][0] + null[0][1]).abs() < 1e-12);
    }
}
