//! Piecewise-constant evolution, projective back-action, Kraus channels and
//! multi-measurement experiments.
//!
//! Outputs are expectation values `Tr(S ρ)`; no shot sampling is done.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::matrix::{trace_product, ComplexMatrix};
use crate::scalar::Real;
use crate::spectral::{eigh, spectral, SpectralDecomposition};
use crate::system::ControlSystem;
use crate::tolerance::{real_as_f64, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// Physical density matrix, unit trace and positive.
    TraceOne,
    /// `ρ - shift·I` with zero trace.
    TracelessShifted,
}

/// A density matrix tagged with its trace convention.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct DensityState<T: Real> {
    pub matrix: ComplexMatrix<T>,
    pub convention: Convention,
    /// `Tr(ρ)/n` removed by the shift; zero for trace-one states.
    #[serde(with = "real_as_f64")]
    pub shift_record: T,
}

impl<T: Real> DensityState<T> {
    /// Validates a physical state: Hermitian, unit trace, eigenvalues ≥ -tol.
    pub fn trace_one(matrix: ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<Self> {
        let dev = matrix.hermitian_deviation();
        if dev > tol.rank_tol {
            return Err(Error::NotHermitian {
                what: "density matrix",
                deviation: dev.as_f64(),
            });
        }
        let tr = matrix.trace().re;
        if (tr - T::one()).abs() > tol.rank_tol {
            return Err(Error::WrongTrace {
                expected: 1.0,
                found: tr.as_f64(),
            });
        }
        let matrix = matrix.hermitian_part();
        let min = eigh(&matrix)?.values[0];
        if min < -tol.rank_tol {
            return Err(Error::NotPositive {
                min_eigenvalue: min.as_f64(),
            });
        }
        Ok(Self {
            matrix,
            convention: Convention::TraceOne,
            shift_record: T::zero(),
        })
    }

    /// A traceless Hermitian matrix standing for `ρ - I/n`. Positivity is
    /// not checked, so arbitrary traceless directions are allowed.
    pub fn traceless(matrix: ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<Self> {
        let dev = matrix.hermitian_deviation();
        if dev > tol.rank_tol * T::one().max(matrix.norm()) {
            return Err(Error::NotHermitian {
                what: "density matrix",
                deviation: dev.as_f64(),
            });
        }
        let tr = matrix.trace().re;
        if tr.abs() > tol.rank_tol * T::one().max(matrix.norm()) {
            return Err(Error::NotTraceless {
                what: "density matrix",
                deviation: tr.abs().as_f64(),
            });
        }
        let n = matrix.dim();
        Ok(Self {
            matrix: matrix.hermitian_part(),
            convention: Convention::TracelessShifted,
            shift_record: T::one() / T::from_count(n),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Trace-one form. A traceless state gets `shift_record·I` added back.
    pub fn physical(&self) -> ComplexMatrix<T> {
        match self.convention {
            Convention::TraceOne => self.matrix.clone(),
            Convention::TracelessShifted => add_identity(&self.matrix, self.shift_record),
        }
    }

    /// Traceless form `ρ - I/n`.
    pub fn shifted(&self) -> ComplexMatrix<T> {
        match self.convention {
            Convention::TraceOne => add_identity(&self.matrix, -T::one() / T::from_count(self.dim())),
            Convention::TracelessShifted => self.matrix.clone(),
        }
    }

    pub fn to_traceless(&self) -> Self {
        Self {
            matrix: self.shifted(),
            convention: Convention::TracelessShifted,
            shift_record: T::one() / T::from_count(self.dim()),
        }
    }

    /// Rebuilds a state in `convention` from a physical matrix.
    fn from_physical(physical: ComplexMatrix<T>, convention: Convention) -> Self {
        let n = physical.dim();
        match convention {
            Convention::TraceOne => Self {
                matrix: physical,
                convention,
                shift_record: T::zero(),
            },
            Convention::TracelessShifted => {
                let s = T::one() / T::from_count(n);
                Self {
                    matrix: add_identity(&physical, -s),
                    convention,
                    shift_record: s,
                }
            }
        }
    }

    fn map(&self, f: impl FnOnce(&ComplexMatrix<T>) -> ComplexMatrix<T>) -> Self {
        Self {
            matrix: f(&self.matrix),
            convention: self.convention,
            shift_record: self.shift_record,
        }
    }
}

fn add_identity<T: Real>(m: &ComplexMatrix<T>, s: T) -> ComplexMatrix<T> {
    let mut out = m.clone();
    for i in 0..m.dim() {
        out[(i, i)].re = out[(i, i)].re + s;
    }
    out
}

/// Propagator of one segment: `Π exp(-i H_k Δt)` with `H_k = Σ_j u_kj H_j`,
/// later sub-steps multiplied on the left.
pub fn segment_propagator<T: Real>(
    sys: &ControlSystem<T>,
    duration: T,
    controls: &[Vec<T>],
) -> Result<ComplexMatrix<T>> {
    if !(duration > T::zero()) {
        return Err(Error::InvalidArgument("segment duration must be positive".into()));
    }
    if controls.is_empty() {
        return Err(Error::InvalidArgument("segment needs at least one control sub-step".into()));
    }
    let dt = duration / T::from_count(controls.len());
    let n = sys.dim_n();
    let mut x = ComplexMatrix::identity(n);
    for step in controls {
        if step.len() != sys.generators().len() {
            return Err(Error::ControlCount {
                expected: sys.generators().len(),
                found: step.len(),
            });
        }
        // -i H dt = -(Σ u_j B_j) dt with B_j = i H_j
        let mut a = ComplexMatrix::zeros(n);
        for (u, b) in step.iter().zip(sys.generators()) {
            a.axpy(-*u * dt, b);
        }
        x = &expm(&a) * &x;
    }
    Ok(x)
}

/// `X ρ X*` for the piecewise-constant schedule `controls` over `duration`.
pub fn evolve<T: Real>(
    rho: &DensityState<T>,
    sys: &ControlSystem<T>,
    duration: T,
    controls: &[Vec<T>],
) -> Result<DensityState<T>> {
    if rho.dim() != sys.dim_n() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim_n(),
            found: rho.dim(),
        });
    }
    let x = segment_propagator(sys, duration, controls)?;
    Ok(rho.map(|m| m.conjugate_by(&x).hermitian_part()))
}

/// Non-selective projective measurement `Σ Π_j ρ Π_j`.
pub fn project<T: Real>(rho: &DensityState<T>, spec: &SpectralDecomposition<T>) -> DensityState<T> {
    // pinching maps I to I, so it commutes with the shift
    rho.map(|m| spec.pinch(m))
}

/// Kraus operators grouped by outcome label.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct KrausChannel<T: Real> {
    outcomes: Vec<KrausOutcome<T>>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct KrausOutcome<T: Real> {
    pub label: String,
    pub operators: Vec<ComplexMatrix<T>>,
}

impl<T: Real> KrausChannel<T> {
    /// Checks `Σ Ω* Ω = I` to `rank_tol` (entrywise).
    pub fn new(outcomes: Vec<KrausOutcome<T>>, tol: &Tolerance<T>) -> Result<Self> {
        let n = outcomes
            .iter()
            .flat_map(|o| o.operators.first())
            .map(ComplexMatrix::dim)
            .next()
            .ok_or_else(|| Error::InvalidArgument("Kraus channel has no operators".into()))?;
        let mut sum = ComplexMatrix::zeros(n);
        for op in outcomes.iter().flat_map(|o| &o.operators) {
            if op.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: op.dim(),
                });
            }
            sum += &(&op.adjoint() * op);
        }
        let deviation = (&sum - &ComplexMatrix::identity(n)).max_abs();
        if deviation > tol.rank_tol {
            return Err(Error::NotTracePreserving {
                deviation: deviation.as_f64(),
            });
        }
        Ok(Self { outcomes })
    }

    /// One outcome per operator, labelled by index.
    pub fn from_operators(operators: Vec<ComplexMatrix<T>>, tol: &Tolerance<T>) -> Result<Self> {
        Self::new(
            operators
                .into_iter()
                .enumerate()
                .map(|(i, op)| KrausOutcome {
                    label: i.to_string(),
                    operators: vec![op],
                })
                .collect(),
            tol,
        )
    }

    /// The projective measurement of `spec` written as a channel.
    pub fn from_projectors(spec: &SpectralDecomposition<T>) -> Self {
        Self {
            outcomes: spec
                .eigenvalues
                .iter()
                .zip(&spec.projectors)
                .map(|(l, p)| KrausOutcome {
                    label: format!("{}", l.as_f64()),
                    operators: vec![p.clone()],
                })
                .collect(),
        }
    }

    pub fn outcomes(&self) -> &[KrausOutcome<T>] {
        &self.outcomes
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].operators[0].dim()
    }

    fn operators(&self) -> impl Iterator<Item = &ComplexMatrix<T>> {
        self.outcomes.iter().flat_map(|o| &o.operators)
    }

    pub(crate) fn apply_unchecked(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let mut out = ComplexMatrix::zeros(rho.dim());
        for op in self.operators() {
            out += &(&(op * rho) * &op.adjoint());
        }
        out
    }

    pub(crate) fn dual_unchecked(&self, s: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let mut out = ComplexMatrix::zeros(s.dim());
        for op in self.operators() {
            out += &(&(&op.adjoint() * s) * op);
        }
        out
    }
}

/// `F(ρ) = Σ Ω ρ Ω*`. Traceless states are mapped through their physical
/// form so non-unital channels are handled correctly.
pub fn kraus_apply<T: Real>(ch: &KrausChannel<T>, rho: &DensityState<T>) -> Result<DensityState<T>> {
    if rho.dim() != ch.dim() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim(),
            found: rho.dim(),
        });
    }
    let out = ch.apply_unchecked(&rho.physical()).hermitian_part();
    Ok(DensityState::from_physical(out, rho.convention))
}

/// `F*(S) = Σ Ω* S Ω`.
pub fn kraus_dual<T: Real>(ch: &KrausChannel<T>, s: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if s.dim() != ch.dim() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim(),
            found: s.dim(),
        });
    }
    Ok(ch.dual_unchecked(s))
}

/// What a segment does before its optional measurement.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "", rename_all = "snake_case")]
pub enum Action<T: Real> {
    /// Piecewise-constant controls: `controls[k]` holds one value per
    /// generator, applied for `duration / controls.len()`.
    Evolve {
        #[serde(with = "real_as_f64")]
        duration: T,
        #[serde(serialize_with = "ser_controls")]
        controls: Vec<Vec<T>>,
    },
    /// An explicit propagator.
    Unitary(ComplexMatrix<T>),
}

fn ser_controls<T: Real, S: serde::Serializer>(c: &[Vec<T>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(c.iter().map(|r| r.iter().map(|x| x.as_f64()).collect::<Vec<_>>()))
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct Segment<T: Real> {
    pub action: Action<T>,
    pub measure_after: bool,
}

/// Measurement back-action used by a script.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "", rename_all = "snake_case")]
pub enum ScriptBackAction<T: Real> {
    /// Projective measurement of whichever observable is measured.
    VonNeumann,
    Kraus(KrausChannel<T>),
}

/// Alternating evolutions and measurements.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct ExperimentScript<T: Real> {
    pub segments: Vec<Segment<T>>,
    /// One observable per measurement; the system observable when absent.
    pub observables: Option<Vec<ComplexMatrix<T>>>,
    pub back_action: ScriptBackAction<T>,
}

impl<T: Real> ExperimentScript<T> {
    /// Apply each unitary, then measure.
    pub fn from_unitaries(unitaries: Vec<ComplexMatrix<T>>) -> Self {
        Self {
            segments: unitaries
                .into_iter()
                .map(|u| Segment {
                    action: Action::Unitary(u),
                    measure_after: true,
                })
                .collect(),
            observables: None,
            back_action: ScriptBackAction::VonNeumann,
        }
    }

    pub fn measurement_count(&self) -> usize {
        self.segments.iter().filter(|s| s.measure_after).count()
    }

    pub fn validate(&self, sys: &ControlSystem<T>, tol: &Tolerance<T>) -> Result<()> {
        let n = sys.dim_n();
        let count = self.measurement_count();
        if count == 0 {
            return Err(Error::InvalidArgument("script performs no measurement".into()));
        }
        for seg in &self.segments {
            match &seg.action {
                Action::Evolve { duration, controls } => {
                    if !(*duration > T::zero()) {
                        return Err(Error::InvalidArgument("segment duration must be positive".into()));
                    }
                    if controls.is_empty() {
                        return Err(Error::InvalidArgument("segment needs at least one control sub-step".into()));
                    }
                    for c in controls {
                        if c.len() != sys.generators().len() {
                            return Err(Error::ControlCount {
                                expected: sys.generators().len(),
                                found: c.len(),
                            });
                        }
                    }
                }
                Action::Unitary(u) => {
                    if u.dim() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            found: u.dim(),
                        });
                    }
                    let dev = u.unitary_deviation();
                    if dev > tol.rank_tol {
                        return Err(Error::NotUnitary {
                            what: "script unitary",
                            deviation: dev.as_f64(),
                        });
                    }
                }
            }
        }
        if let Some(obs) = &self.observables {
            if obs.len() != count {
                return Err(Error::InvalidArgument(format!(
                    "script lists {} observables for {} measurements",
                    obs.len(),
                    count
                )));
            }
            for o in obs {
                if o.dim() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: o.dim(),
                    });
                }
                if !o.is_hermitian(tol.rank_tol * T::one().max(o.norm())) {
                    return Err(Error::NotHermitian {
                        what: "script observable",
                        deviation: o.hermitian_deviation().as_f64(),
                    });
                }
            }
        }
        if let ScriptBackAction::Kraus(ch) = &self.back_action {
            if ch.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: ch.dim(),
                });
            }
        }
        Ok(())
    }

    /// Stable identifier: SHA-256 of the JSON form, first 16 hex digits.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("script serializes");
        let digest = Sha256::digest(&json);
        hex::encode(&digest[..8])
    }
}

/// Outputs and post-measurement states of one experiment.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct MeasurementRecord<T: Real> {
    /// `Tr(S ρ)` with the observable and state as supplied (trace-one state).
    #[serde(serialize_with = "ser_vec")]
    pub outputs: Vec<T>,
    /// Same outputs for the traceless observable; differs by `Tr(S)/n`.
    #[serde(serialize_with = "ser_vec")]
    pub outputs_shifted: Vec<T>,
    pub post_states: Vec<DensityState<T>>,
    pub script_hash: String,
}

fn ser_vec<T: Real, S: serde::Serializer>(v: &[T], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.as_f64()))
}

/// Runs `script` from `rho0`. Each measurement records `Tr(S ρ)` and then
/// replaces the state by its back-action image.
pub fn run_experiment<T: Real>(
    rho0: &DensityState<T>,
    sys: &ControlSystem<T>,
    script: &ExperimentScript<T>,
    tol: &Tolerance<T>,
) -> Result<MeasurementRecord<T>> {
    if rho0.dim() != sys.dim_n() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim_n(),
            found: rho0.dim(),
        });
    }
    script.validate(sys, tol)?;
    let n = sys.dim_n();

    // raw observables as supplied, with their spectral decompositions
    let raw_observables: Vec<ComplexMatrix<T>> = match &script.observables {
        Some(obs) => obs.iter().map(ComplexMatrix::hermitian_part).collect(),
        None => vec![sys.raw_observable(); script.measurement_count()],
    };
    let needs_spectra = matches!(script.back_action, ScriptBackAction::VonNeumann);
    let spectra: Vec<Option<SpectralDecomposition<T>>> = if needs_spectra {
        let mut cache: Vec<(ComplexMatrix<T>, SpectralDecomposition<T>)> = Vec::new();
        let mut out = Vec::with_capacity(raw_observables.len());
        for o in &raw_observables {
            if let Some((_, sd)) = cache.iter().find(|(m, _)| m == o) {
                out.push(Some(sd.clone()));
            } else {
                let sd = spectral(o, tol)?;
                cache.push((o.clone(), sd.clone()));
                out.push(Some(sd));
            }
        }
        out
    } else {
        vec![None; raw_observables.len()]
    };

    let mut rho = rho0.physical();
    let mut outputs = Vec::new();
    let mut outputs_shifted = Vec::new();
    let mut post_states = Vec::new();
    let mut m = 0;
    for seg in &script.segments {
        let x = match &seg.action {
            Action::Evolve { duration, controls } => segment_propagator(sys, *duration, controls)?,
            Action::Unitary(u) => u.clone(),
        };
        rho = rho.conjugate_by(&x).hermitian_part();
        if !seg.measure_after {
            continue;
        }
        let s = &raw_observables[m];
        let y = trace_product(s, &rho).re;
        let shift = s.trace().re / T::from_count(n);
        outputs.push(y);
        outputs_shifted.push(y - shift);
        rho = match &script.back_action {
            ScriptBackAction::VonNeumann => spectra[m].as_ref().unwrap().pinch(&rho),
            ScriptBackAction::Kraus(ch) => ch.apply_unchecked(&rho),
        }
        .hermitian_part();
        post_states.push(DensityState::from_physical(rho.clone(), rho0.convention));
        m += 1;
    }
    Ok(MeasurementRecord {
        outputs,
        outputs_shifted,
        post_states,
        script_hash: script.hash(),
    })
}

/// Heisenberg-picture observable of a k-measurement experiment with
/// propagators `X_1..X_k` and projective back-action:
/// `X_1* P(X_2* P(··· P(X_k* S X_k) ···) X_2) X_1`.
///
/// `Tr(result · ρ0)` equals the k-th output.
pub fn pullback_observable<T: Real>(
    s: &ComplexMatrix<T>,
    unitaries: &[ComplexMatrix<T>],
    spec: &SpectralDecomposition<T>,
) -> ComplexMatrix<T> {
    let mut acc = s.clone();
    for (i, x) in unitaries.iter().enumerate().rev() {
        acc = acc.conjugate_by(&x.adjoint());
        if i > 0 {
            acc = spec.pinch(&acc);
        }
    }
    acc
}

/// `Tr(A ρ)` as a real number (both Hermitian).
pub fn expectation<T: Real>(a: &ComplexMatrix<T>, rho: &ComplexMatrix<T>) -> T {
    let z: Complex<T> = trace_product(a, rho);
    z.re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::half_paulis;
    use crate::scalar::cplx;

    type M = ComplexMatrix<f64>;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn qubit(a: f64, b: num_complex::Complex<f64>) -> M {
        M::from_rows(vec![vec![cplx(a, 0.0), b], vec![b.conj(), cplx(1.0 - a, 0.0)]]).unwrap()
    }

    fn z_system() -> ControlSystem<f64> {
        let [_, _, sz] = half_paulis::<f64>();
        ControlSystem::from_hamiltonians(&[sz], &M::diagonal(&[1.0, -1.0]), "z", &tol()).unwrap()
    }

    #[test]
    fn zero_controls_is_identity() {
        let sys = z_system();
        let rho = DensityState::trace_one(qubit(0.3, cplx(0.1, 0.2)), &tol()).unwrap();
        let out = evolve(&rho, &sys, 2.0, &[vec![0.0]]).unwrap();
        assert!((&out.matrix - &rho.matrix).max_abs() < 1e-15);
    }

    #[test]
    fn commuting_generator_keeps_diagonal_states() {
        let sys = z_system();
        let rho = DensityState::trace_one(M::diagonal(&[0.25, 0.75]), &tol()).unwrap();
        let out = evolve(&rho, &sys, 3.7, &[vec![1.3], vec![-0.4]]).unwrap();
        assert!((&out.matrix - &rho.matrix).max_abs() < 1e-14);
    }

    #[test]
    fn control_count_mismatch() {
        let sys = z_system();
        let rho = DensityState::trace_one(M::diagonal(&[0.5, 0.5]), &tol()).unwrap();
        assert_eq!(
            evolve(&rho, &sys, 1.0, &[vec![1.0, 2.0]]).unwrap_err(),
            Error::ControlCount { expected: 1, found: 2 }
        );
    }

    #[test]
    fn projection_erases_coherences() {
        let sd = spectral(&M::diagonal(&[1.0, -1.0]), &tol()).unwrap();
        let rho = DensityState::trace_one(qubit(0.3, cplx(0.2, -0.1)), &tol()).unwrap();
        let p = project(&rho, &sd);
        assert!((&p.matrix - &M::diagonal(&[0.3, 0.7])).max_abs() < 1e-15);
        let pp = project(&p, &sd);
        assert!((&pp.matrix - &p.matrix).max_abs() < 1e-15);
    }

    #[test]
    fn degenerate_projection_keeps_block() {
        let sd = spectral(&M::diagonal(&[1.0, 1.0, -2.0]), &tol()).unwrap();
        let m = M::from_fn(3, |i, j| {
            if i == j {
                cplx([0.2, 0.3, 0.5][i], 0.0)
            } else {
                cplx(0.05 * (i + j) as f64, 0.01 * (i as f64 - j as f64))
            }
        });
        let rho = DensityState::trace_one(m.clone(), &tol()).unwrap();
        let p = project(&rho, &sd).matrix;
        for i in 0..3 {
            for j in 0..3 {
                let keep = (i < 2 && j < 2) || i == j;
                let want = if keep { m[(i, j)] } else { cplx(0.0, 0.0) };
                assert!((p[(i, j)] - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn kraus_identity_and_projectors() {
        let ch = KrausChannel::from_operators(vec![M::identity(2)], &tol()).unwrap();
        let rho = DensityState::trace_one(qubit(0.4, cplx(0.1, 0.3)), &tol()).unwrap();
        assert!((&kraus_apply(&ch, &rho).unwrap().matrix - &rho.matrix).max_abs() < 1e-15);

        let sd = spectral(&M::diagonal(&[1.0, -1.0]), &tol()).unwrap();
        let pch = KrausChannel::from_projectors(&sd);
        assert!((&kraus_apply(&pch, &rho).unwrap().matrix - &project(&rho, &sd).matrix).max_abs() < 1e-15);
    }

    #[test]
    fn kraus_rejects_non_trace_preserving() {
        let r = KrausChannel::from_operators(vec![M::identity(2).scale(0.5)], &tol());
        assert!(matches!(r, Err(Error::NotTracePreserving { .. })));
    }

    #[test]
    fn single_measurement_reads_expectation() {
        let sys = z_system();
        let rho = DensityState::trace_one(qubit(0.8, cplx(0.1, 0.0)), &tol()).unwrap();
        let script = ExperimentScript::from_unitaries(vec![M::identity(2)]);
        let rec = run_experiment(&rho, &sys, &script, &tol()).unwrap();
        assert!((rec.outputs[0] - 0.6).abs() < 1e-15);
        assert_eq!(rec.post_states.len(), 1);
    }

    #[test]
    fn output_shift_matches_observable_trace() {
        let [sx, _, _] = half_paulis::<f64>();
        let sys = ControlSystem::from_hamiltonians(&[sx], &M::diagonal(&[3.0, 1.0]), "s", &tol()).unwrap();
        let rho = DensityState::trace_one(qubit(0.3, cplx(0.2, 0.1)), &tol()).unwrap();
        let script = ExperimentScript {
            segments: vec![
                Segment {
                    action: Action::Evolve {
                        duration: 0.7,
                        controls: vec![vec![1.0], vec![0.5]],
                    },
                    measure_after: true,
                },
                Segment {
                    action: Action::Evolve {
                        duration: 1.1,
                        controls: vec![vec![-2.0]],
                    },
                    measure_after: true,
                },
            ],
            observables: None,
            back_action: ScriptBackAction::VonNeumann,
        };
        let a = run_experiment(&rho, &sys, &script, &tol()).unwrap();
        let b = run_experiment(&rho.to_traceless(), &sys, &script, &tol()).unwrap();
        for k in 0..2 {
            assert!((a.outputs[k] - a.outputs_shifted[k] - 2.0).abs() < 1e-14);
            assert!((a.outputs[k] - b.outputs[k]).abs() < 1e-14);
        }
        assert_eq!(a.script_hash, b.script_hash);
        assert_eq!(a.script_hash.len(), 16);
        assert_eq!(b.post_states[0].convention, Convention::TracelessShifted);
        assert!(b.post_states[0].matrix.trace().norm() < 1e-14);
    }

    #[test]
    fn script_validation() {
        let sys = z_system();
        let rho = DensityState::trace_one(M::diagonal(&[0.5, 0.5]), &tol()).unwrap();
        let none = ExperimentScript::<f64> {
            segments: vec![Segment {
                action: Action::Unitary(M::identity(2)),
                measure_after: false,
            }],
            observables: None,
            back_action: ScriptBackAction::VonNeumann,
        };
        assert!(run_experiment(&rho, &sys, &none, &tol()).is_err());
        let bad = ExperimentScript::from_unitaries(vec![M::identity(2).scale(2.0)]);
        assert!(matches!(
            run_experiment(&rho, &sys, &bad, &tol()),
            Err(Error::NotUnitary { .. })
        ));
        let wrong_dim = ExperimentScript::from_unitaries(vec![M::identity(3)]);
        assert!(run_experiment(&rho, &sys, &wrong_dim, &tol()).is_err());
    }

    #[test]
    fn state_validation() {
        assert!(matches!(
            DensityState::trace_one(M::diagonal(&[1.5, -0.5]), &tol()),
            Err(Error::NotPositive { .. })
        ));
        assert!(matches!(
            DensityState::trace_one(M::diagonal(&[0.5, 0.6]), &tol()),
            Err(Error::WrongTrace { .. })
        ));
        assert!(DensityState::traceless(M::diagonal(&[0.5, 0.6]), &tol()).is_err());
        let t = DensityState::traceless(M::diagonal(&[0.25, -0.25]), &tol()).unwrap();
        assert!((&t.physical() - &M::diagonal(&[0.75, 0.25])).max_abs() < 1e-15);
    }
}
