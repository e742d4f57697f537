//! Worked example systems.

use crate::error::Result;
use crate::matrix::{half_paulis, ComplexMatrix};
use crate::scalar::{cplx, Real};
use crate::system::ControlSystem;
use crate::tolerance::Tolerance;

fn real<T: Real>(rows: &[&[f64]]) -> ComplexMatrix<T> {
    ComplexMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&x| cplx(T::lit(x), T::zero())).collect())
            .collect(),
    )
    .expect("square literal")
}

/// Qubit whose algebra is the planar rotations while `iS = [[i, 1], [-1, -i]]`.
/// Observable in one step without being controllable.
pub fn rotation_qubit<T: Real>(tol: &Tolerance<T>) -> Result<ControlSystem<T>> {
    let one = T::one();
    let zero = T::zero();
    let s = ComplexMatrix::from_rows(vec![
        vec![cplx(one, zero), cplx(zero, -one)],
        vec![cplx(zero, one), cplx(-one, zero)],
    ])?;
    let g = real(&[&[0.0, 1.0], &[-1.0, 0.0]]);
    ControlSystem::from_generators(&[g], &s, "rotation-qubit", tol)
}

/// Two spins with Ising coupling `σz⊗σz`, a field `σx⊗1` on the first spin,
/// and total magnetization `σz⊗1 + 1⊗σz` measured (half-Pauli matrices).
pub fn ising_pair<T: Real>(tol: &Tolerance<T>) -> Result<ControlSystem<T>> {
    let [sx, _, sz] = half_paulis::<T>();
    let one = ComplexMatrix::identity(2);
    let s = &sz.kron(&one) + &one.kron(&sz);
    ControlSystem::from_hamiltonians(&[sz.kron(&sz), sx.kron(&one)], &s, "ising-pair", tol)
}

/// Qutrit where a second measurement enlarges the observability space.
pub fn qutrit_second_measurement<T: Real>(tol: &Tolerance<T>) -> Result<ControlSystem<T>> {
    let z = T::zero();
    let o = T::one();
    let g = ComplexMatrix::from_rows(vec![
        vec![cplx(z, o), cplx(z, z), cplx(T::lit(2.0), z)],
        vec![cplx(z, z), cplx(z, -o), cplx(z, z)],
        vec![cplx(T::lit(-2.0), z), cplx(z, z), cplx(z, z)],
    ])?;
    let s = ComplexMatrix::diagonal(&[o, T::lit(-3.0), T::lit(2.0)]);
    ControlSystem::from_generators(&[g], &s, "qutrit-second-measurement", tol)
}

/// `S = diag(1, -1)` under planar rotations only.
pub fn planar_rotation_qubit<T: Real>(tol: &Tolerance<T>) -> Result<ControlSystem<T>> {
    let g = real(&[&[0.0, 1.0], &[-1.0, 0.0]]);
    let s = ComplexMatrix::diagonal(&[T::one(), -T::one()]);
    ControlSystem::from_generators(&[g], &s, "planar-rotation-qubit", tol)
}

/// Unknown qubit `[[m, l], [l*, 1-m]]` coupled to two known spins in state
/// `diag(1/3, 2/3) ⊗ diag(1/3, 2/3)`; the ancilla magnetization is measured.
pub struct AncillaQubitExample<T: Real> {
    /// Known state of the two ancilla spins.
    pub ancilla_state: ComplexMatrix<T>,
    /// `σz⊗1⊗1 + 1⊗σz⊗1 + 1⊗1⊗σz`, diagonal.
    pub joint_observable: ComplexMatrix<T>,
}

impl<T: Real> AncillaQubitExample<T> {
    pub fn new() -> Self {
        let [_, _, sz] = half_paulis::<T>();
        let one = ComplexMatrix::identity(2);
        let third = T::one() / T::lit(3.0);
        let spin = ComplexMatrix::diagonal(&[third, third + third]);
        let s = &(&sz.kron(&one).kron(&one) + &one.kron(&sz).kron(&one)) + &one.kron(&one).kron(&sz);
        Self {
            ancilla_state: spin.kron(&spin),
            joint_observable: s,
        }
    }

    /// `[[m, l], [l*, 1-m]]`.
    pub fn unknown_state(m: T, l: num_complex::Complex<T>) -> ComplexMatrix<T> {
        ComplexMatrix::from_rows(vec![
            vec![cplx(m, T::zero()), l],
            vec![l.conj(), cplx(T::one() - m, T::zero())],
        ])
        .expect("2x2")
    }
}

impl<T: Real> Default for AncillaQubitExample<T> {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_build() {
        let tol = Tolerance::<f64>::default();
        assert_eq!(rotation_qubit(&tol).unwrap().dim_n(), 2);
        assert_eq!(ising_pair(&tol).unwrap().dim_n(), 4);
        assert_eq!(qutrit_second_measurement(&tol).unwrap().dim_n(), 3);
        assert_eq!(planar_rotation_qubit(&tol).unwrap().dim_n(), 2);
        let ex = AncillaQubitExample::<f64>::new();
        assert_eq!(ex.joint_observable.dim(), 8);
        assert_eq!(
            ex.joint_observable.real_diag(),
            vec![1.5, 0.5, 0.5, -0.5, 0.5, -0.5, -0.5, -1.5]
        );
    }

    #[test]
    fn rotation_qubit_skew_observable() {
        let tol = Tolerance::<f64>::default();
        let sys = rotation_qubit(&tol).unwrap();
        let is = sys.skew_observable();
        assert!((is[(0, 0)] - cplx(0.0, 1.0)).norm() < 1e-15);
        assert!((is[(0, 1)] - cplx(1.0, 0.0)).norm() < 1e-15);
    }
}
