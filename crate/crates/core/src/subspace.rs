//! Real subspaces of su(n) held as orthonormal bases.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{hs_re, ComplexMatrix};
use crate::scalar::Real;
use crate::tolerance::Tolerance;

/// Orthonormal basis (under `Re Tr(AB*)`) of a real subspace of
/// skew-Hermitian traceless `n × n` matrices. `depth_tags[i]` records the
/// bracket depth at which `basis[i]` was inserted.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct OperatorSubspace<T: Real> {
    dim_n: usize,
    basis: Vec<ComplexMatrix<T>>,
    depth_tags: Vec<usize>,
}

impl<T: Real> OperatorSubspace<T> {
    pub fn empty(dim_n: usize) -> Self {
        Self {
            dim_n,
            basis: Vec::new(),
            depth_tags: Vec::new(),
        }
    }

    /// Orthonormalizes `elements` in order, dropping dependent ones.
    pub fn span(dim_n: usize, elements: &[ComplexMatrix<T>], tol: &Tolerance<T>) -> Result<Self> {
        let mut s = Self::empty(dim_n);
        for e in elements {
            s.extend(e, 0, tol)?;
        }
        Ok(s)
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `n² - 1`.
    pub fn ambient_dim(&self) -> usize {
        self.dim_n * self.dim_n - 1
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    pub fn basis(&self) -> &[ComplexMatrix<T>] {
        &self.basis
    }

    pub fn depth_tags(&self) -> &[usize] {
        &self.depth_tags
    }

    /// Largest insertion depth, i.e. the saturation depth of a closure.
    pub fn max_depth(&self) -> usize {
        self.depth_tags.iter().copied().max().unwrap_or(0)
    }

    /// Orthogonal projection of `x` onto the span (real coefficients).
    pub fn project(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let mut out = ComplexMatrix::zeros(self.dim_n);
        for b in &self.basis {
            out.axpy(hs_re(x, b), b);
        }
        out
    }

    /// Real coordinates `Re Tr(x F_k*)` against the basis.
    pub fn coordinates(&self, x: &ComplexMatrix<T>) -> Vec<T> {
        self.basis.iter().map(|b| hs_re(x, b)).collect()
    }

    /// `x` minus its projection, computed with one re-orthogonalization pass.
    pub fn residual(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let mut r = x.clone();
        for _ in 0..2 {
            for b in &self.basis {
                let c = hs_re(&r, b);
                r.axpy(-c, b);
            }
        }
        r
    }

    pub fn residual_norm(&self, x: &ComplexMatrix<T>) -> T {
        self.residual(x).norm()
    }

    /// Membership test at `rank_tol`, relative to `max(1, ‖x‖)`.
    pub fn contains(&self, x: &ComplexMatrix<T>, tol: &Tolerance<T>) -> bool {
        self.residual_norm(x) <= tol.rank_tol * T::one().max(x.norm())
    }

    /// Every basis element of `other` lies in `self`.
    pub fn contains_subspace(&self, other: &Self, tol: &Tolerance<T>) -> bool {
        other.basis.iter().all(|b| self.contains(b, tol))
    }

    /// Adds the normalized residual of `candidate` when it exceeds
    /// `rank_tol * max(1, ‖candidate‖)`. Returns whether the basis grew.
    pub fn extend(&mut self, candidate: &ComplexMatrix<T>, depth: usize, tol: &Tolerance<T>) -> Result<bool> {
        if candidate.dim() != self.dim_n {
            return Err(Error::DimensionMismatch {
                expected: self.dim_n,
                found: candidate.dim(),
            });
        }
        let scale = T::one().max(candidate.norm());
        let dev = candidate.skew_hermitian_deviation();
        if dev > tol.rank_tol * scale {
            return Err(Error::NotSkewHermitian {
                what: "subspace candidate",
                deviation: dev.as_f64(),
            });
        }
        if self.is_full() {
            return Ok(false);
        }
        let r = self.residual(&candidate.skew_hermitian_part());
        let norm = r.norm();
        if norm <= tol.rank_tol * scale {
            return Ok(false);
        }
        self.basis.push(r.scale(T::one() / norm));
        self.depth_tags.push(depth);
        Ok(true)
    }

    /// Same subspace (mutual containment).
    pub fn same_as(&self, other: &Self, tol: &Tolerance<T>) -> bool {
        self.dim() == other.dim() && self.contains_subspace(other, tol)
    }
}

/// Functional form of [`OperatorSubspace::extend`].
pub fn orthonormal_extend<T: Real>(
    basis: &OperatorSubspace<T>,
    candidate: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<(OperatorSubspace<T>, bool)> {
    let mut out = basis.clone();
    let depth = out.max_depth();
    let added = out.extend(candidate, depth, tol)?;
    Ok((out, added))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::half_paulis;

    type M = ComplexMatrix<f64>;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn isz() -> (M, M) {
        let [sx, _, sz] = half_paulis::<f64>();
        (sz.mul_i(), sx.mul_i())
    }

    #[test]
    fn extend_cases() {
        let (iz, ix) = isz();
        let base = OperatorSubspace::span(2, &[iz.clone()], &tol()).unwrap();
        assert_eq!(base.dim(), 1);

        let (same, added) = orthonormal_extend(&base, &iz, &tol()).unwrap();
        assert!(!added);
        assert_eq!(same.dim(), 1);

        let (two, added) = orthonormal_extend(&base, &ix, &tol()).unwrap();
        assert!(added);
        assert_eq!(two.dim(), 2);

        let tiny = &iz + &ix.scale(1e-14);
        let (still, added) = orthonormal_extend(&base, &tiny, &tol()).unwrap();
        assert!(!added);
        assert_eq!(still.dim(), 1);
    }

    #[test]
    fn rejects_hermitian_candidate() {
        let [_, _, sz] = half_paulis::<f64>();
        let base = OperatorSubspace::<f64>::empty(2);
        assert!(matches!(
            orthonormal_extend(&base, &sz, &tol()),
            Err(Error::NotSkewHermitian { .. })
        ));
    }

    #[test]
    fn full_space_stops_growing() {
        let b = crate::gellmann::su_basis::<f64>(2);
        let s = OperatorSubspace::span(2, &b, &tol()).unwrap();
        assert!(s.is_full());
        let (same, added) = orthonormal_extend(&s, &b[0].scale(3.0), &tol()).unwrap();
        assert!(!added && same.dim() == 3);
    }

    #[test]
    fn projection_and_residual() {
        let (iz, ix) = isz();
        let s = OperatorSubspace::span(2, &[iz.clone()], &tol()).unwrap();
        let x = &iz.scale(2.0) + &ix;
        let p = s.project(&x);
        assert!((&p - &iz.scale(2.0)).max_abs() < 1e-14);
        assert!((s.residual_norm(&x) - ix.norm()).abs() < 1e-14);
        assert!(s.contains(&iz.scale(5.0), &tol()));
        assert!(!s.contains(&ix, &tol()));
    }
}
