//! Observability verdicts, indistinguishability tests, state decomposition
//! and orbit sampling.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::lie::{
    bracket_span_dim, commutator_dimension, commutator_dimension_direct, dynamical_algebra, observability_sequence,
    BackAction,
};
use crate::matrix::{hs, ComplexMatrix};
use crate::measurement::KrausChannel;
use crate::random::seeded;
use crate::scalar::Real;
use crate::spectral::eigh;
use crate::subspace::OperatorSubspace;
use crate::system::ControlSystem;
use crate::tolerance::Tolerance;

/// Everything [`analyze`] decides about a system. Field order is the
/// serialization order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservabilityReport {
    pub label: String,
    pub dim_n: usize,
    /// `n² - 1`.
    pub dim_su: usize,
    pub dim_l: usize,
    /// `dim V_k` for `k = 1..=saturation_k`.
    pub dims_vk: Vec<usize>,
    /// First `k` with `V_k = V_{k+1}` (or `V_k = su(n)`).
    pub saturation_k: usize,
    /// Bracket depth needed to close `V_1`.
    pub closure_depth: usize,
    pub controllable: bool,
    pub observable_one_step: bool,
    /// Verdict for `k = 1..=max_k`.
    pub observable_k: BTreeMap<usize, bool>,
    pub observable_overall: bool,
    pub first_order_condition: bool,
    /// `(dim [iS, L], dim [iS, su(n)])`.
    pub bracket_dims: (usize, usize),
    /// `dim [iS, su(n)]` from eigenvalue multiplicities.
    pub commutator_formula_dim: usize,
    /// `Tr(S)/n` removed from the observable.
    pub observable_shift: f64,
}

/// Computes the algebra and the observability spaces up to their fixpoint.
///
/// The fixpoint is always reached (the dimensions grow strictly until it),
/// so `observable_overall` is exact. `max_k` only bounds the length of the
/// per-order verdict map.
pub fn analyze<T: Real>(sys: &ControlSystem<T>, max_k: usize, tol: &Tolerance<T>) -> Result<ObservabilityReport> {
    analyze_with(sys, max_k, None, tol)
}

/// [`analyze`] with an optional Kraus back-action in place of the projective
/// measurement of the observable.
pub fn analyze_with<T: Real>(
    sys: &ControlSystem<T>,
    max_k: usize,
    channel: Option<&KrausChannel<T>>,
    tol: &Tolerance<T>,
) -> Result<ObservabilityReport> {
    if max_k < 1 {
        return Err(Error::InvalidArgument("max_k must be at least 1".into()));
    }
    sys.require_observable(tol)?;
    let n = sys.dim_n();
    let dim_su = n * n - 1;
    let back_action = match channel {
        Some(ch) => BackAction::Kraus(ch.clone()),
        None => BackAction::von_neumann(sys, tol)?,
    };
    // strict growth bounds the number of orders by n² - 1
    let seq = observability_sequence(sys, dim_su + 1, &back_action, tol)?;
    if !seq.saturated {
        return Err(Error::ClosureDiverged { sweeps: seq.last_k() });
    }
    let dims_vk: Vec<usize> = seq.spaces[1..].iter().map(OperatorSubspace::dim).collect();
    let saturation_k = seq.last_k();
    let dim_at = |k: usize| dims_vk[k.min(saturation_k) - 1];
    let observable_k: BTreeMap<usize, bool> = (1..=max_k).map(|k| (k, dim_at(k) == dim_su)).collect();
    let fo = first_order_from(sys, &seq.algebra, tol)?;
    Ok(ObservabilityReport {
        label: sys.label().to_string(),
        dim_n: n,
        dim_su,
        dim_l: seq.algebra.dim(),
        saturation_k,
        closure_depth: seq.spaces[1].max_depth(),
        controllable: seq.algebra.dim() == dim_su,
        observable_one_step: dims_vk[0] == dim_su,
        observable_overall: *dims_vk.last().unwrap() == dim_su,
        dims_vk,
        observable_k,
        first_order_condition: fo.holds,
        bracket_dims: (fo.bracket_with_algebra, fo.bracket_with_su),
        commutator_formula_dim: fo.formula,
        observable_shift: sys.observable_shift().as_f64(),
    })
}

/// Outcome of the first-order test `[L, iS] = [su(n), iS]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FirstOrderCondition {
    /// Equality holds. Sufficient for one-step observability, not necessary.
    pub holds: bool,
    pub bracket_with_algebra: usize,
    /// Computed from the Gell-Mann basis.
    pub bracket_with_su: usize,
    /// From eigenvalue multiplicities; agrees with `bracket_with_su`.
    pub formula: usize,
}

pub fn first_order_condition<T: Real>(sys: &ControlSystem<T>, tol: &Tolerance<T>) -> Result<FirstOrderCondition> {
    sys.require_observable(tol)?;
    let l = dynamical_algebra(sys, tol)?;
    first_order_from(sys, &l, tol)
}

fn first_order_from<T: Real>(
    sys: &ControlSystem<T>,
    l: &OperatorSubspace<T>,
    tol: &Tolerance<T>,
) -> Result<FirstOrderCondition> {
    let is = sys.skew_observable();
    let with_l = bracket_span_dim(&is, l.basis(), tol)?;
    let with_su = commutator_dimension_direct(sys.observable(), tol)?;
    let formula = commutator_dimension(sys.observable(), tol)?;
    Ok(FirstOrderCondition {
        holds: with_l == with_su,
        bracket_with_algebra: with_l,
        bracket_with_su: with_su,
        formula,
    })
}

/// Indistinguishability verdict for a pair of states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub indistinguishable: bool,
    /// Largest `|Tr(F (ρ1 - ρ2))|` over the orthonormal basis of `V_k`.
    pub max_separation: f64,
    pub k: usize,
    pub dim_vk: usize,
}

/// Are `rho1` and `rho2` indistinguishable with `k` measurements? True iff
/// `ρ1 - ρ2` is orthogonal to `V_k` (to `rank_tol` relative to the states).
pub fn indistinguishable<T: Real>(
    sys: &ControlSystem<T>,
    rho1: &ComplexMatrix<T>,
    rho2: &ComplexMatrix<T>,
    k: usize,
    tol: &Tolerance<T>,
) -> Result<Verdict> {
    indistinguishable_with(sys, rho1, rho2, k, None, tol)
}

pub fn indistinguishable_with<T: Real>(
    sys: &ControlSystem<T>,
    rho1: &ComplexMatrix<T>,
    rho2: &ComplexMatrix<T>,
    k: usize,
    channel: Option<&KrausChannel<T>>,
    tol: &Tolerance<T>,
) -> Result<Verdict> {
    if k < 1 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    for rho in [rho1, rho2] {
        if rho.dim() != sys.dim_n() {
            return Err(Error::DimensionMismatch {
                expected: sys.dim_n(),
                found: rho.dim(),
            });
        }
    }
    let vk = crate::lie::generalized_observability_space(sys, k, channel, tol)?;
    let mut verdict = separation(&vk, rho1, rho2, tol);
    verdict.k = k;
    Ok(verdict)
}

/// Indistinguishability against a precomputed `V_k`.
pub fn separation<T: Real>(
    vk: &OperatorSubspace<T>,
    rho1: &ComplexMatrix<T>,
    rho2: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Verdict {
    let delta = rho1 - rho2;
    let max = vk
        .basis()
        .iter()
        .map(|f| hs(f, &delta).norm())
        .fold(T::zero(), T::max);
    let scale = T::one().max(rho1.norm()).max(rho2.norm());
    Verdict {
        indistinguishable: max <= tol.rank_tol * scale,
        max_separation: max.as_f64(),
        k: 0,
        dim_vk: vk.dim(),
    }
}

/// `ρ = ρ_par + ρ_perp` with `i ρ_par` in `V_k` and `i ρ_perp` orthogonal to it.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct StateDecomposition<T: Real> {
    pub rho_par: ComplexMatrix<T>,
    pub rho_perp: ComplexMatrix<T>,
    /// Order of the space used, when known.
    pub k_used: Option<usize>,
}

pub fn decompose_state<T: Real>(
    rho: &ComplexMatrix<T>,
    vk: &OperatorSubspace<T>,
    tol: &Tolerance<T>,
) -> Result<StateDecomposition<T>> {
    if rho.dim() != vk.dim_n() {
        return Err(Error::DimensionMismatch {
            expected: vk.dim_n(),
            found: rho.dim(),
        });
    }
    let dev = rho.hermitian_deviation();
    if dev > tol.rank_tol * T::one().max(rho.norm()) {
        return Err(Error::NotHermitian {
            what: "state",
            deviation: dev.as_f64(),
        });
    }
    let rho = rho.hermitian_part();
    let rho_par = vk.project(&rho.mul_i()).mul_neg_i().hermitian_part();
    let rho_perp = &rho - &rho_par;
    Ok(StateDecomposition {
        rho_par,
        rho_perp,
        k_used: None,
    })
}

/// Decomposition against the system's own `V_k`.
pub fn decompose_for_system<T: Real>(
    sys: &ControlSystem<T>,
    rho: &ComplexMatrix<T>,
    k: usize,
    tol: &Tolerance<T>,
) -> Result<StateDecomposition<T>> {
    let vk = crate::lie::generalized_observability_space(sys, k, None, tol)?;
    let mut d = decompose_state(rho, &vk, tol)?;
    d.k_used = Some(k);
    Ok(d)
}

/// Default longest word for [`sample_propagators`].
pub const DEFAULT_WORD_LEN: usize = 8;

/// Random elements of `e^L`: products of up to `max_word_len` letters
/// `exp(t·A)`, where `A` is a random combination of the generators scaled to
/// spectral radius one and `t` is uniform in `[-π, π]`.
pub fn sample_propagators<T: Real>(
    sys: &ControlSystem<T>,
    count: usize,
    seed: u64,
    max_word_len: usize,
) -> Result<Vec<ComplexMatrix<T>>> {
    let mut rng = seeded(seed);
    let n = sys.dim_n();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let len = rng.random_range(0..=max_word_len);
        let mut x = ComplexMatrix::identity(n);
        for _ in 0..len {
            let mut a = ComplexMatrix::zeros(n);
            for g in sys.generators() {
                let c: f64 = rng.sample(rand_distr::StandardNormal);
                a.axpy(T::lit(c), g);
            }
            let t = T::lit(rng.random_range(-std::f64::consts::PI..=std::f64::consts::PI));
            let radius = spectral_radius_skew(&a)?;
            if radius > T::zero() {
                x = &expm(&a.scale(t / radius)) * &x;
            }
        }
        out.push(x);
    }
    Ok(out)
}

fn spectral_radius_skew<T: Real>(a: &ComplexMatrix<T>) -> Result<T> {
    if a.max_abs() == T::zero() {
        return Ok(T::zero());
    }
    let e = eigh(&a.mul_neg_i().hermitian_part())?;
    Ok(e.values.iter().map(|x| x.abs()).fold(T::zero(), T::max))
}

/// Points `X ρ0 X*` of the orbit for sampled propagators `X`.
pub fn orbit_sample<T: Real>(
    sys: &ControlSystem<T>,
    rho0: &ComplexMatrix<T>,
    count: usize,
    seed: u64,
    max_word_len: usize,
) -> Result<Vec<ComplexMatrix<T>>> {
    if count < 1 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    if rho0.dim() != sys.dim_n() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim_n(),
            found: rho0.dim(),
        });
    }
    Ok(sample_propagators(sys, count, seed, max_word_len)?
        .iter()
        .map(|x| rho0.conjugate_by(x))
        .collect())
}
