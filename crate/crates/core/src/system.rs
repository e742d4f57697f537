use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{traceless_shift, ComplexMatrix};
use crate::scalar::Real;
use crate::tolerance::Tolerance;

/// A closed quantum control system: skew-Hermitian generators `iH_j`
/// (one per control channel) and a measured observable `S`.
///
/// Both are stored traceless. `observable_shift` keeps `Tr(S)/n` of the
/// observable as supplied so raw expectation values can be recovered.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct ControlSystem<T: Real> {
    dim_n: usize,
    generators: Vec<ComplexMatrix<T>>,
    observable: ComplexMatrix<T>,
    #[serde(with = "crate::tolerance::real_as_f64")]
    observable_shift: T,
    label: String,
}

fn check_dim<T: Real>(n: usize, m: &ComplexMatrix<T>) -> Result<()> {
    if m.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.dim(),
        });
    }
    Ok(())
}

impl<T: Real> ControlSystem<T> {
    /// Builds a system from Hermitian control Hamiltonians `H_j`.
    pub fn from_hamiltonians(
        hamiltonians: &[ComplexMatrix<T>],
        observable: &ComplexMatrix<T>,
        label: impl Into<String>,
        tol: &Tolerance<T>,
    ) -> Result<Self> {
        let n = observable.dim();
        let mut generators = Vec::with_capacity(hamiltonians.len());
        for h in hamiltonians {
            check_dim(n, h)?;
            let dev = h.hermitian_deviation();
            if dev > tol.rank_tol * T::one().max(h.norm()) {
                return Err(Error::NotHermitian {
                    what: "Hamiltonian",
                    deviation: dev.as_f64(),
                });
            }
            generators.push(traceless_shift(&h.hermitian_part()).mul_i());
        }
        Self::assemble(n, generators, observable, label.into(), tol)
    }

    /// Builds a system from skew-Hermitian generators `iH_j`.
    pub fn from_generators(
        generators: &[ComplexMatrix<T>],
        observable: &ComplexMatrix<T>,
        label: impl Into<String>,
        tol: &Tolerance<T>,
    ) -> Result<Self> {
        let n = observable.dim();
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            check_dim(n, g)?;
            let dev = g.skew_hermitian_deviation();
            if dev > tol.rank_tol * T::one().max(g.norm()) {
                return Err(Error::NotSkewHermitian {
                    what: "generator",
                    deviation: dev.as_f64(),
                });
            }
            gens.push(traceless_shift(&g.skew_hermitian_part()));
        }
        Self::assemble(n, gens, observable, label.into(), tol)
    }

    fn assemble(
        n: usize,
        generators: Vec<ComplexMatrix<T>>,
        observable: &ComplexMatrix<T>,
        label: String,
        tol: &Tolerance<T>,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("system dimension must be at least 2".into()));
        }
        let dev = observable.hermitian_deviation();
        if dev > tol.rank_tol * T::one().max(observable.norm()) {
            return Err(Error::NotHermitian {
                what: "observable",
                deviation: dev.as_f64(),
            });
        }
        let sym = observable.hermitian_part();
        let observable_shift = sym.trace().re / T::from_count(n);
        Ok(Self {
            dim_n: n,
            generators,
            observable: traceless_shift(&sym),
            observable_shift,
            label,
        })
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn generators(&self) -> &[ComplexMatrix<T>] {
        &self.generators
    }

    /// `H_j = -i B_j`.
    pub fn hamiltonians(&self) -> Vec<ComplexMatrix<T>> {
        self.generators.iter().map(ComplexMatrix::mul_neg_i).collect()
    }

    /// Traceless observable `S`.
    pub fn observable(&self) -> &ComplexMatrix<T> {
        &self.observable
    }

    /// Observable as originally supplied, `S + shift·I`.
    pub fn raw_observable(&self) -> ComplexMatrix<T> {
        let mut s = self.observable.clone();
        for i in 0..self.dim_n {
            s[(i, i)].re = s[(i, i)].re + self.observable_shift;
        }
        s
    }

    pub fn observable_shift(&self) -> T {
        self.observable_shift
    }

    /// `iS`.
    pub fn skew_observable(&self) -> ComplexMatrix<T> {
        self.observable.mul_i()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Same system with the generator list permuted.
    pub fn with_generator_order(&self, order: &[usize]) -> Self {
        let mut s = self.clone();
        s.generators = order.iter().map(|&i| self.generators[i].clone()).collect();
        s
    }

    /// Same generators, different observable.
    pub fn with_observable(&self, observable: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<Self> {
        check_dim(self.dim_n, observable)?;
        Self::assemble(self.dim_n, self.generators.clone(), observable, self.label.clone(), tol)
    }

    pub(crate) fn require_observable(&self, tol: &Tolerance<T>) -> Result<()> {
        if self.observable.norm() <= tol.rank_tol {
            return Err(Error::ZeroObservable);
        }
        Ok(())
    }
}
