use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Numerical thresholds shared by every routine.
///
/// `rank_tol` decides subspace membership: a residual below `rank_tol`
/// (relative to unit-norm basis elements) counts as zero. `eig_tol` merges
/// nearby eigenvalues into one cluster. `sim_tol` is the accuracy target for
/// propagators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Tolerance<T: Real> {
    #[serde(with = "real_as_f64")]
    pub rank_tol: T,
    #[serde(with = "real_as_f64")]
    pub eig_tol: T,
    #[serde(with = "real_as_f64")]
    pub sim_tol: T,
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        let (rank_tol, eig_tol, sim_tol) = T::default_tolerances();
        Self {
            rank_tol,
            eig_tol,
            sim_tol,
        }
    }
}

impl<T: Real> Tolerance<T> {
    pub fn new(rank_tol: T, eig_tol: T, sim_tol: T) -> Result<Self> {
        let t = Self {
            rank_tol,
            eig_tol,
            sim_tol,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_tol", self.rank_tol),
            ("eig_tol", self.eig_tol),
            ("sim_tol", self.sim_tol),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be positive and finite")));
            }
        }
        Ok(())
    }

    pub fn with_rank_tol(mut self, rank_tol: T) -> Self {
        self.rank_tol = rank_tol;
        self
    }
}

pub(crate) mod real_as_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::scalar::Real;

    pub fn serialize<T: Real, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(v.as_f64())
    }

    pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
        Ok(T::lit(f64::deserialize(d)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let t = Tolerance::<f64>::default();
        assert_eq!((t.rank_tol, t.eig_tol, t.sim_tol), (1e-10, 1e-9, 1e-12));
        assert!(t.validate().is_ok());
    }

    #[test]
    fn rejects_non_positive() {
        assert!(Tolerance::new(0.0, 1e-9, 1e-12).is_err());
        assert!(Tolerance::new(1e-10, -1.0, 1e-12).is_err());
        assert!(Tolerance::new(1e-10, 1e-9, f64::NAN).is_err());
    }
}
