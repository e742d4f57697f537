//! Bracket closure and subspace stabilization.
//!
//! All spaces are real subspaces of su(n). A closure is computed by depth
//! iteration: the elements inserted at depth `d` are bracketed with every
//! acting element to produce the candidates of depth `d + 1`, and the
//! iteration stops when a sweep adds nothing or the space is all of su(n).
//! Candidates are inserted in a fixed order (frontier order × acting order),
//! so bases are reproducible.

use crate::error::{Error, Result};
use crate::gellmann::su_basis;
use crate::matrix::{bracket, traceless_shift, ComplexMatrix};
use crate::measurement::KrausChannel;
use crate::scalar::Real;
use crate::spectral::{spectral, SpectralDecomposition};
use crate::subspace::OperatorSubspace;
use crate::system::ControlSystem;
use crate::tolerance::Tolerance;

/// Unit-norm copies of the nonzero acting elements.
fn normalized<T: Real>(acting: &[ComplexMatrix<T>]) -> Vec<ComplexMatrix<T>> {
    acting
        .iter()
        .filter_map(|a| {
            let n = a.norm();
            (n > T::zero()).then(|| a.scale(T::one() / n))
        })
        .collect()
}

/// Smallest subspace containing `seeds` and stable under `ad_a` for every
/// `a` in `acting`.
pub fn stabilize_with<T: Real>(
    dim_n: usize,
    seeds: &[ComplexMatrix<T>],
    acting: &[ComplexMatrix<T>],
    tol: &Tolerance<T>,
) -> Result<OperatorSubspace<T>> {
    let mut space = OperatorSubspace::empty(dim_n);
    let mut frontier = Vec::new();
    for s in seeds {
        if space.extend(s, 0, tol)? {
            frontier.push(space.dim() - 1);
        }
    }
    if space.dim() == 0 {
        return Err(Error::ZeroSeeds);
    }
    let acting = normalized(acting);
    let cap = space.ambient_dim();
    let mut depth = 0;
    while !frontier.is_empty() && !space.is_full() {
        depth += 1;
        if depth > cap {
            return Err(Error::ClosureDiverged { sweeps: depth });
        }
        let mut next = Vec::new();
        for &idx in &frontier {
            for a in &acting {
                let candidate = bracket(a, &space.basis()[idx]);
                if space.extend(&candidate, depth, tol)? {
                    next.push(space.dim() - 1);
                }
                if space.is_full() {
                    break;
                }
            }
        }
        frontier = next;
    }
    Ok(space)
}

/// Smallest subspace containing `seeds` and stable under bracketing with `l`.
pub fn stabilize<T: Real>(
    seeds: &[ComplexMatrix<T>],
    l: &OperatorSubspace<T>,
    tol: &Tolerance<T>,
) -> Result<OperatorSubspace<T>> {
    stabilize_with(l.dim_n(), seeds, l.basis(), tol)
}

/// Dynamical Lie algebra generated by the system's `iH_j`. Depth tags give
/// the bracket depth at which each element first appeared.
pub fn dynamical_algebra<T: Real>(sys: &ControlSystem<T>, tol: &Tolerance<T>) -> Result<OperatorSubspace<T>> {
    match stabilize_with(sys.dim_n(), sys.generators(), sys.generators(), tol) {
        Err(Error::ZeroSeeds) => Ok(OperatorSubspace::empty(sys.dim_n())),
        other => other,
    }
}

/// Observability space: the smallest subspace containing `iS` and stable
/// under the dynamical algebra. The saturation depth is its `max_depth()`.
///
/// The generators alone are used as acting set; that yields the same space
/// as a full basis of the algebra.
pub fn observability_space<T: Real>(sys: &ControlSystem<T>, tol: &Tolerance<T>) -> Result<OperatorSubspace<T>> {
    sys.require_observable(tol)?;
    stabilize_with(sys.dim_n(), &[sys.skew_observable()], sys.generators(), tol)
}

/// The map applied to `V_{k-1}` before re-stabilizing.
#[derive(Debug, Clone)]
pub enum BackAction<T: Real> {
    /// Non-selective projective measurement `Σ Π_j F Π_j` of the observable.
    VonNeumann(SpectralDecomposition<T>),
    /// Dual `F*(X) = Σ Ω* X Ω` of a Kraus channel.
    Kraus(KrausChannel<T>),
}

impl<T: Real> BackAction<T> {
    pub fn von_neumann(sys: &ControlSystem<T>, tol: &Tolerance<T>) -> Result<Self> {
        Ok(Self::VonNeumann(spectral(sys.observable(), tol)?))
    }

    /// Heisenberg-picture image of `f`, traceless part only (the identity
    /// component never affects traceless states).
    pub fn dual(&self, f: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        match self {
            Self::VonNeumann(sd) => sd.pinch(f),
            Self::Kraus(ch) => traceless_shift(&ch.dual_unchecked(f)),
        }
    }
}

/// `V_0, V_1, ...` together with the algebra they were stabilized under.
#[derive(Debug, Clone)]
pub struct ObservabilitySequence<T: Real> {
    pub algebra: OperatorSubspace<T>,
    /// `spaces[k]` is `V_k`; `spaces[0] = span{iS}`.
    pub spaces: Vec<OperatorSubspace<T>>,
    /// True when the last entry is a fixpoint (or all of su(n)).
    pub saturated: bool,
}

impl<T: Real> ObservabilitySequence<T> {
    /// Highest order computed.
    pub fn last_k(&self) -> usize {
        self.spaces.len() - 1
    }

    pub fn last(&self) -> &OperatorSubspace<T> {
        self.spaces.last().expect("V_0 always present")
    }
}

/// Computes `V_0..V_k` for `k ≤ max_k`, stopping early at a fixpoint
/// `V_{k} = V_{k-1}` (the repeated space is not stored) or at su(n).
pub fn observability_sequence<T: Real>(
    sys: &ControlSystem<T>,
    max_k: usize,
    back_action: &BackAction<T>,
    tol: &Tolerance<T>,
) -> Result<ObservabilitySequence<T>> {
    if max_k < 1 {
        return Err(Error::InvalidArgument("max_k must be at least 1".into()));
    }
    sys.require_observable(tol)?;
    let algebra = dynamical_algebra(sys, tol)?;
    let acting = sys.generators();
    let n = sys.dim_n();
    let v0 = OperatorSubspace::span(n, &[sys.skew_observable()], tol)?;
    let v1 = stabilize_with(n, &[sys.skew_observable()], acting, tol)?;
    let mut spaces = vec![v0, v1];
    let mut saturated = spaces[1].is_full();
    while !saturated && spaces.len() <= max_k {
        let prev = spaces.last().unwrap();
        let seeds: Vec<_> = prev.basis().iter().map(|f| back_action.dual(f)).collect();
        let next = stabilize_with(n, &seeds, acting, tol)?;
        if next.dim() <= prev.dim() {
            saturated = true;
        } else {
            saturated = next.is_full();
            spaces.push(next);
        }
    }
    // A sequence that stopped at max_k may still sit at a fixpoint; probe once.
    if !saturated {
        let prev = spaces.last().unwrap();
        let seeds: Vec<_> = prev.basis().iter().map(|f| back_action.dual(f)).collect();
        let next = stabilize_with(n, &seeds, acting, tol)?;
        saturated = next.dim() <= prev.dim();
    }
    Ok(ObservabilitySequence {
        algebra,
        spaces,
        saturated,
    })
}

/// Generalized observability space of order `k`. `k = 0` gives `span{iS}`.
/// Without a channel the back-action is the projective measurement of the
/// system observable. Past the fixpoint `V_k` no longer changes.
pub fn generalized_observability_space<T: Real>(
    sys: &ControlSystem<T>,
    k: usize,
    channel: Option<&KrausChannel<T>>,
    tol: &Tolerance<T>,
) -> Result<OperatorSubspace<T>> {
    sys.require_observable(tol)?;
    if k == 0 {
        return OperatorSubspace::span(sys.dim_n(), &[sys.skew_observable()], tol);
    }
    let back_action = match channel {
        Some(ch) => BackAction::Kraus(ch.clone()),
        None => BackAction::von_neumann(sys, tol)?,
    };
    let seq = observability_sequence(sys, k, &back_action, tol)?;
    let idx = k.min(seq.last_k());
    Ok(seq.spaces[idx].clone())
}

/// Dimension of `[iS, su(n)]` from the eigenvalue multiplicities of `S`:
/// `2 Σ_{j<k} n_j n_k`.
pub fn commutator_dimension<T: Real>(s: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<usize> {
    let shifted = traceless_shift(s);
    if shifted.norm() <= tol.rank_tol {
        return Err(Error::ZeroObservable);
    }
    let sd = spectral(&shifted, tol)?;
    let m = &sd.multiplicities;
    let mut total = 0;
    for j in 0..m.len() {
        for k in j + 1..m.len() {
            total += m[j] * m[k];
        }
    }
    Ok(2 * total)
}

/// `dim span{[x, e] : e ∈ elements}`.
pub fn bracket_span_dim<T: Real>(
    x: &ComplexMatrix<T>,
    elements: &[ComplexMatrix<T>],
    tol: &Tolerance<T>,
) -> Result<usize> {
    let unit_x = x.scale(T::one() / x.norm());
    let mut space = OperatorSubspace::empty(x.dim());
    for e in normalized(elements) {
        space.extend(&bracket(&e, &unit_x), 1, tol)?;
    }
    Ok(space.dim())
}

/// `dim [iS, su(n)]` computed directly from the Gell-Mann basis.
pub fn commutator_dimension_direct<T: Real>(s: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<usize> {
    let is = traceless_shift(s).mul_i();
    if is.norm() <= tol.rank_tol {
        return Err(Error::ZeroObservable);
    }
    bracket_span_dim(&is, &su_basis(s.dim()), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{half_paulis, hs_inner};
    use crate::scalar::cplx;

    type M = ComplexMatrix<f64>;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn ising() -> ControlSystem<f64> {
        let [sx, _, sz] = half_paulis::<f64>();
        let one = M::identity(2);
        let s = &sz.kron(&one) + &one.kron(&sz);
        ControlSystem::from_hamiltonians(&[sz.kron(&sz), sx.kron(&one)], &s, "ising", &tol()).unwrap()
    }

    #[test]
    fn abelian_algebra() {
        let [_, _, sz] = half_paulis::<f64>();
        let sys = ControlSystem::from_hamiltonians(&[sz.clone()], &sz, "z", &tol()).unwrap();
        assert_eq!(dynamical_algebra(&sys, &tol()).unwrap().dim(), 1);
        assert_eq!(observability_space(&sys, &tol()).unwrap().dim(), 1);
    }

    #[test]
    fn su2_from_two_generators() {
        let [sx, _, sz] = half_paulis::<f64>();
        let sys = ControlSystem::from_hamiltonians(&[sx, sz.clone()], &sz, "xz", &tol()).unwrap();
        let l = dynamical_algebra(&sys, &tol()).unwrap();
        assert_eq!(l.dim(), 3);
        assert_eq!(l.depth_tags(), &[0, 0, 1]);
    }

    #[test]
    fn ising_algebra_matches_hand_closure() {
        let sys = ising();
        let l = dynamical_algebra(&sys, &tol()).unwrap();
        assert_eq!(l.dim(), 3);
        let [_, sy, sz] = half_paulis::<f64>();
        assert!(l.contains(&sy.kron(&sz).mul_i(), &tol()));
        let is = sys.skew_observable();
        for b in l.basis() {
            assert!(hs_inner(&is, b).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn rotation_example_reaches_su2() {
        let is = M::from_rows(vec![
            vec![cplx(0.0, 1.0), cplx(1.0, 0.0)],
            vec![cplx(-1.0, 0.0), cplx(0.0, -1.0)],
        ])
        .unwrap();
        let g = M::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        let sys = ControlSystem::from_generators(&[g.clone()], &is.mul_neg_i(), "r", &tol()).unwrap();
        let l = dynamical_algebra(&sys, &tol()).unwrap();
        assert_eq!(l.dim(), 1);
        let v = stabilize(&[is], &l, &tol()).unwrap();
        assert_eq!(v.dim(), 3);
    }

    #[test]
    fn stabilize_zero_seeds() {
        let l = OperatorSubspace::<f64>::empty(2);
        assert_eq!(stabilize(&[M::zeros(2)], &l, &tol()).unwrap_err(), Error::ZeroSeeds);
    }

    #[test]
    fn ising_observability_inside_complement() {
        let sys = ising();
        let l = dynamical_algebra(&sys, &tol()).unwrap();
        let v = observability_space(&sys, &tol()).unwrap();
        assert!(v.dim() < 15);
        for f in v.basis() {
            for b in l.basis() {
                assert!(hs_inner(f, b).unwrap().norm() < 1e-10);
            }
        }
    }

    #[test]
    fn commutator_dimension_cases() {
        assert_eq!(commutator_dimension(&M::diagonal(&[1.0, -1.0]), &tol()).unwrap(), 2);
        assert_eq!(commutator_dimension(&M::diagonal(&[1.0, 1.0, -2.0]), &tol()).unwrap(), 4);
        assert_eq!(commutator_dimension_direct(&M::diagonal(&[1.0, 1.0, -2.0]), &tol()).unwrap(), 4);
        let s = ising().observable().clone();
        assert_eq!(commutator_dimension(&s, &tol()).unwrap(), 10);
        assert_eq!(
            commutator_dimension(&M::identity(3), &tol()).unwrap_err(),
            Error::ZeroObservable
        );
    }

    #[test]
    fn order_zero_and_monotone() {
        let s = M::diagonal(&[1.0, -3.0, 2.0]);
        let g = M::from_rows(vec![
            vec![cplx(0.0, 1.0), cplx(0.0, 0.0), cplx(2.0, 0.0)],
            vec![cplx(0.0, 0.0), cplx(0.0, -1.0), cplx(0.0, 0.0)],
            vec![cplx(-2.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0)],
        ])
        .unwrap();
        let sys = ControlSystem::from_generators(&[g], &s, "q", &tol()).unwrap();
        let v0 = generalized_observability_space(&sys, 0, None, &tol()).unwrap();
        assert_eq!(v0.dim(), 1);
        let v1 = generalized_observability_space(&sys, 1, None, &tol()).unwrap();
        let v2 = generalized_observability_space(&sys, 2, None, &tol()).unwrap();
        assert!(v1.dim() < v2.dim());
        assert!(v2.contains_subspace(&v1, &tol()));
    }
}
