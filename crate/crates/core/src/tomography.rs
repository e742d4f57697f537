//! Initial-state determination.
//!
//! With a diagonal observable `S`, measuring after permutation unitaries
//! gives outputs `Tr(ρ̃ S_σ)` where `ρ̃ = X1 ρ0 X1*` and `S_σ` is the
//! permuted diagonal. Those equations plus `Tr ρ̃ = 0` fix the diagonal of
//! `ρ̃`. Coupling to a known ancilla turns diagonals of the joint state into
//! equations for the full unknown state.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{lstsq, null_directions, rank, Echelon};
use crate::matrix::{traceless_shift, ComplexMatrix};
use crate::measurement::{run_experiment, DensityState, ExperimentScript};
use crate::random::orthonormalize;
use crate::scalar::{cplx, Real};
use crate::spectral::eigh;
use crate::system::ControlSystem;
use crate::tolerance::Tolerance;

/// Largest `n` for which all `n!` permutations are enumerated.
pub const MAX_ENUMERATED: usize = 7;

/// Rearranges `p` into the next permutation in lexicographic order.
/// Returns false (leaving `p` sorted ascending) after the last one.
pub fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        p.reverse();
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Cycle notation with 1-based points; fixed points omitted, identity `()`.
pub fn cycle_notation(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        out.push('(');
        let mut i = start;
        let mut first = true;
        while !seen[i] {
            seen[i] = true;
            if !first {
                out.push(' ');
            }
            out.push_str(&(i + 1).to_string());
            first = false;
            i = p[i];
        }
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

/// Unitary with `P e_i = e_{p[i]}`. Then `(P* S P)_ii = S_{p[i] p[i]}`.
pub fn permutation_matrix<T: Real>(p: &[usize]) -> ComplexMatrix<T> {
    let mut m = ComplexMatrix::zeros(p.len());
    for (i, &j) in p.iter().enumerate() {
        m[(j, i)] = cplx(T::one(), T::zero());
    }
    m
}

fn permuted<T: Real>(values: &[T], p: &[usize]) -> Vec<T> {
    p.iter().map(|&j| values[j]).collect()
}

/// Distinct values (ascending, clustered at `tol`) and their counts.
fn distinct_values<T: Real>(values: &[T], tol: T) -> (Vec<T>, Vec<usize>) {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let mut d: Vec<T> = Vec::new();
    let mut l: Vec<usize> = Vec::new();
    for v in sorted {
        match d.last() {
            Some(&last) if v - last <= tol => *l.last_mut().unwrap() += 1,
            _ => {
                d.push(v);
                l.push(1);
            }
        }
    }
    (d, l)
}

#[derive(Debug, Clone, Serialize)]
pub struct PermutationLabel {
    /// 0-based images `p[i]`.
    pub one_line: Vec<usize>,
    pub cycles: String,
}

/// A solvable set of permutation measurements for a diagonal observable.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct PermutationDesign<T: Real> {
    /// Traceless diagonal observable.
    pub base_observable: ComplexMatrix<T>,
    /// Trace removed from the observable as supplied, divided by `n`.
    #[serde(with = "crate::tolerance::real_as_f64")]
    pub observable_shift: T,
    /// Identity first; one measurement per entry.
    pub permutations: Vec<PermutationLabel>,
    /// One permuted diagonal per permutation, then the all-ones row.
    #[serde(serialize_with = "ser_rows")]
    pub design_matrix: Vec<Vec<T>>,
    /// Distinct diagonal values, ascending.
    #[serde(serialize_with = "ser_vec")]
    pub values: Vec<T>,
    pub multiplicities: Vec<usize>,
    pub rank: usize,
}

fn ser_vec<T: Real, S: serde::Serializer>(v: &[T], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.as_f64()))
}

fn ser_rows<T: Real, S: serde::Serializer>(v: &[Vec<T>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.iter().map(|x| x.as_f64()).collect::<Vec<_>>()))
}

impl<T: Real> PermutationDesign<T> {
    pub fn dim(&self) -> usize {
        self.base_observable.dim()
    }

    /// The measurement unitaries `X_2, X_3, ...` that follow `X1`:
    /// `X_j = P_j P_{j-1}*`.
    pub fn chained_unitaries(&self) -> Vec<ComplexMatrix<T>> {
        let mats: Vec<ComplexMatrix<T>> = self
            .permutations
            .iter()
            .map(|p| permutation_matrix(&p.one_line))
            .collect();
        mats.windows(2).map(|w| &w[1] * &w[0].adjoint()).collect()
    }
}

/// Greedy design: permutations are scanned in lexicographic order starting
/// at the identity, and one is kept when its permuted diagonal raises the
/// rank of the all-ones row together with the rows kept so far. The scan
/// stops at rank `n`.
pub fn design_permutation_experiment<T: Real>(s: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<PermutationDesign<T>> {
    let n = s.dim();
    if n < 2 {
        return Err(Error::InvalidArgument("observable dimension must be at least 2".into()));
    }
    let scale = T::one().max(s.max_abs());
    let herm = s.hermitian_deviation();
    if herm > tol.rank_tol * scale {
        return Err(Error::NotHermitian {
            what: "observable",
            deviation: herm.as_f64(),
        });
    }
    let off = s.off_diagonal_max();
    if off > tol.rank_tol * scale {
        return Err(Error::NotDiagonal { deviation: off.as_f64() });
    }
    let shift = s.trace().re / T::from_count(n);
    let base = ComplexMatrix::diagonal(&traceless_shift(&s.hermitian_part()).real_diag());
    let diag = base.real_diag();
    let spread = diag.iter().map(|x| x.abs()).fold(T::zero(), T::max);
    if spread <= tol.rank_tol * scale {
        return Err(Error::ScalarObservable);
    }

    let mut echelon = Echelon::new(n, tol.rank_tol).with_scale(spread.max(T::one()));
    echelon.insert(&vec![T::one(); n]);
    let mut chosen: Vec<Vec<usize>> = Vec::new();
    let mut rows: Vec<Vec<T>> = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        let row = permuted(&diag, &p);
        if chosen.is_empty() || echelon.would_extend(&row) {
            echelon.insert(&row);
            chosen.push(p.clone());
            rows.push(row);
            if echelon.rank() == n {
                break;
            }
        }
        if !next_permutation(&mut p) {
            break;
        }
    }
    rows.push(vec![T::one(); n]);
    let r = rank(&rows, tol.rank_tol);
    if r < n {
        return Err(Error::Singular { rank: r, needed: n });
    }
    let (values, multiplicities) = distinct_values(&diag, tol.eig_tol * spread);
    Ok(PermutationDesign {
        base_observable: base,
        observable_shift: shift,
        permutations: chosen
            .into_iter()
            .map(|p| PermutationLabel {
                cycles: cycle_notation(&p),
                one_line: p,
            })
            .collect(),
        design_matrix: rows,
        values,
        multiplicities,
        rank: r,
    })
}

/// Rank of the matrix of all `n!` permutations of `values`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankLemma {
    pub rank: usize,
    pub full: bool,
}

pub fn verify_rank_lemma<T: Real>(values: &[T], tol: &Tolerance<T>) -> Result<RankLemma> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two values".into()));
    }
    if n > MAX_ENUMERATED {
        return Err(Error::TooLarge(n));
    }
    if values.iter().any(|v| *v < T::zero() || !v.is_finite()) {
        return Err(Error::InvalidArgument("values must be finite and non-negative".into()));
    }
    let mut rows = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        rows.push(permuted(values, &p));
        if !next_permutation(&mut p) {
            break;
        }
    }
    let r = rank(&rows, tol.rank_tol);
    Ok(RankLemma { rank: r, full: r == n })
}

/// Seeded additive Gaussian noise on the outputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutputNoise {
    pub sigma: f64,
    pub seed: u64,
}

/// Recovered diagonal of `X1 ρ0 X1*`.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct ReconstructionResult<T: Real> {
    /// Traceless diagonal; sums to zero.
    #[serde(serialize_with = "ser_vec")]
    pub diagonal: Vec<T>,
    /// Same diagonal in trace-one form (`+ 1/n`).
    #[serde(serialize_with = "ser_vec")]
    pub diagonal_trace_one: Vec<T>,
    /// Outputs used in the solve (noise included), traceless observable.
    #[serde(serialize_with = "ser_vec")]
    pub outputs: Vec<T>,
    #[serde(with = "crate::tolerance::real_as_f64")]
    pub residual: T,
    #[serde(with = "crate::tolerance::real_as_f64")]
    pub condition_estimate: T,
    pub permutations: Vec<String>,
}

/// Simulates the permutation experiment from `rho0` (projective
/// back-action after every measurement) and solves for the diagonal.
pub fn run_permutation_tomography<T: Real>(
    rho0: &DensityState<T>,
    x1: &ComplexMatrix<T>,
    design: &PermutationDesign<T>,
    noise: Option<OutputNoise>,
    tol: &Tolerance<T>,
) -> Result<ReconstructionResult<T>> {
    let n = design.dim();
    for d in [rho0.dim(), x1.dim()] {
        if d != n {
            return Err(Error::DimensionMismatch { expected: n, found: d });
        }
    }
    let dev = x1.unitary_deviation();
    if dev > tol.rank_tol {
        return Err(Error::NotUnitary {
            what: "frame unitary",
            deviation: dev.as_f64(),
        });
    }
    let sys = ControlSystem::from_generators(&[], &design.base_observable, "permutation design", tol)?;
    let mut unitaries = vec![x1.clone()];
    unitaries.extend(design.chained_unitaries());
    let record = run_experiment(rho0, &sys, &ExperimentScript::from_unitaries(unitaries), tol)?;
    let mut outputs = record.outputs_shifted;
    if let Some(noise) = noise {
        let dist = Normal::new(0.0, noise.sigma)
            .map_err(|e| Error::InvalidArgument(format!("noise sigma: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
        for y in &mut outputs {
            *y = *y + T::lit(dist.sample(&mut rng));
        }
    }
    solve_design(design, outputs, tol)
}

/// Solves the design rows against measured outputs plus `Σ x = 0`.
pub fn solve_design<T: Real>(
    design: &PermutationDesign<T>,
    outputs: Vec<T>,
    tol: &Tolerance<T>,
) -> Result<ReconstructionResult<T>> {
    let n = design.dim();
    let m = design.permutations.len();
    if outputs.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: outputs.len(),
        });
    }
    let mut b = outputs.clone();
    b.push(T::zero());
    let ls = lstsq(&design.design_matrix, &b, tol.rank_tol)?;
    let inv_n = T::one() / T::from_count(n);
    Ok(ReconstructionResult {
        diagonal_trace_one: ls.x.iter().map(|x| *x + inv_n).collect(),
        diagonal: ls.x,
        outputs,
        residual: ls.residual,
        condition_estimate: ls.condition,
        permutations: design.permutations.iter().map(|p| p.cycles.clone()).collect(),
    })
}

/// Real parameters of an `n × n` density matrix: `ρ_aa` for `a < n-1`, then
/// `Re ρ_ab, Im ρ_ab` for each `a < b` in row-major order.
pub fn state_parameters<T: Real>(rho: &ComplexMatrix<T>) -> Vec<T> {
    let n = rho.dim();
    let mut out: Vec<T> = (0..n - 1).map(|a| rho[(a, a)].re).collect();
    for a in 0..n {
        for b in a + 1..n {
            out.push(rho[(a, b)].re);
            out.push(rho[(a, b)].im);
        }
    }
    out
}

/// Trace-one density matrix with parameters `theta`.
pub fn state_from_parameters<T: Real>(n: usize, theta: &[T]) -> ComplexMatrix<T> {
    let mut rho = ComplexMatrix::zeros(n);
    let mut last = T::one();
    for a in 0..n - 1 {
        rho[(a, a)] = cplx(theta[a], T::zero());
        last = last - theta[a];
    }
    rho[(n - 1, n - 1)] = cplx(last, T::zero());
    let mut idx = n - 1;
    for a in 0..n {
        for b in a + 1..n {
            let z = cplx(theta[idx], theta[idx + 1]);
            rho[(a, b)] = z;
            rho[(b, a)] = z.conj();
            idx += 2;
        }
    }
    rho
}

/// Probe vectors for the parameters: `e_a` for diagonals,
/// `(e_a + e_b)/√2` for real parts and `(e_a - i e_b)/√2` for imaginary parts.
fn probe_vectors<T: Real>(n: usize) -> Vec<Vec<Complex<T>>> {
    let r = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let zero = cplx(T::zero(), T::zero());
    let mut out = Vec::new();
    for a in 0..n - 1 {
        let mut v = vec![zero; n];
        v[a] = cplx(T::one(), T::zero());
        out.push(v);
    }
    for a in 0..n {
        for b in a + 1..n {
            let mut v = vec![zero; n];
            v[a] = cplx(r, T::zero());
            v[b] = cplx(r, T::zero());
            out.push(v);
            let mut w = vec![zero; n];
            w[a] = cplx(r, T::zero());
            w[b] = cplx(T::zero(), -r);
            out.push(w);
        }
    }
    out
}

/// Ancilla vectors with nonzero weight: computational basis vectors when
/// `rho2` is diagonal, its eigenvectors otherwise.
fn ancilla_slots<T: Real>(rho2: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<Vec<Vec<Complex<T>>>> {
    let m = rho2.dim();
    if rho2.off_diagonal_max() <= tol.rank_tol {
        return Ok((0..m)
            .filter(|&i| rho2[(i, i)].re > tol.rank_tol)
            .map(|i| {
                let mut v = vec![cplx(T::zero(), T::zero()); m];
                v[i] = cplx(T::one(), T::zero());
                v
            })
            .collect());
    }
    let e = eigh(rho2)?;
    Ok((0..m)
        .rev()
        .filter(|&c| e.values[c] > tol.rank_tol)
        .map(|c| e.vectors.column(c))
        .collect())
}

fn kron_vec<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    a.iter().flat_map(|x| b.iter().map(move |y| *x * *y)).collect()
}

/// Default probes: each parameter's probe vector is tensored with an
/// ancilla slot; vectors are grouped (one per slot) into the leading
/// columns of `X1*`, which is completed to a unitary.
pub fn default_probes<T: Real>(
    n: usize,
    rho2: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<Vec<ComplexMatrix<T>>> {
    let slots = ancilla_slots(rho2, tol)?;
    if slots.is_empty() {
        return Err(Error::InvalidArgument("ancilla state has no positive weight".into()));
    }
    let dim = n * rho2.dim();
    let vectors = probe_vectors::<T>(n);
    let mut probes = Vec::new();
    for chunk in vectors.chunks(slots.len()) {
        let mut cols: Vec<Vec<Complex<T>>> = chunk
            .iter()
            .zip(&slots)
            .map(|(v, s)| kron_vec(v, s))
            .collect();
        for i in 0..dim {
            let mut e = vec![cplx(T::zero(), T::zero()); dim];
            e[i] = cplx(T::one(), T::zero());
            cols.push(e);
        }
        let cols = orthonormalize(cols);
        // columns of X1* become rows of X1 (conjugated)
        probes.push(ComplexMatrix::from_fn(dim, |i, j| cols[i][j].conj()));
    }
    Ok(probes)
}

/// Result of [`ancilla_tomography`].
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct AncillaReconstruction<T: Real> {
    /// Trace-one estimate of the unknown state.
    pub rho1: ComplexMatrix<T>,
    #[serde(serialize_with = "ser_vec")]
    pub parameters: Vec<T>,
    /// Trace-one diagonals of `X1 (ρ1 ⊗ ρ2) X1*`, one list per probe.
    #[serde(serialize_with = "ser_rows")]
    pub probe_diagonals: Vec<Vec<T>>,
    pub probe_count: usize,
    pub sensitivity_rank: usize,
    #[serde(with = "crate::tolerance::real_as_f64")]
    pub residual: T,
    #[serde(with = "crate::tolerance::real_as_f64")]
    pub condition_estimate: T,
    pub design: PermutationDesign<T>,
}

/// Affine map from parameters to the trace-one diagonal of
/// `X (ρ1(θ) ⊗ ρ2) X*`: returns `(offset, columns)`.
fn probe_sensitivity<T: Real>(
    x: &ComplexMatrix<T>,
    n: usize,
    rho2: &ComplexMatrix<T>,
) -> (Vec<T>, Vec<Vec<T>>) {
    let params = n * n - 1;
    let zero = vec![T::zero(); params];
    let diag_of = |theta: &[T]| {
        let joint = state_from_parameters(n, theta).kron(rho2);
        joint.conjugate_by(x).real_diag()
    };
    let offset = diag_of(&zero);
    let columns = (0..params)
        .map(|j| {
            let mut e = zero.clone();
            e[j] = T::one();
            diag_of(&e).iter().zip(&offset).map(|(a, b)| *a - *b).collect()
        })
        .collect();
    (offset, columns)
}

/// Reconstructs an unknown `n`-dimensional state coupled to a known ancilla
/// `rho2`. For each probe `X1` the permutation experiment is simulated on
/// the joint system (observable `s_joint`, diagonal) to obtain the diagonal
/// of `X1 (ρ1 ⊗ ρ2) X1*`; the stacked diagonals are then solved for the
/// parameters of `ρ1`.
pub fn ancilla_tomography<T: Real>(
    rho1: &DensityState<T>,
    rho2: &DensityState<T>,
    s_joint: &ComplexMatrix<T>,
    probes: Option<Vec<ComplexMatrix<T>>>,
    tol: &Tolerance<T>,
) -> Result<AncillaReconstruction<T>> {
    let n = rho1.dim();
    let r2 = rho2.physical();
    let dim = n * r2.dim();
    if s_joint.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: s_joint.dim(),
        });
    }
    let probes = match probes {
        Some(p) => p,
        None => default_probes(n, &r2, tol)?,
    };
    if probes.is_empty() {
        return Err(Error::InvalidArgument("no probes supplied".into()));
    }
    let params = n * n - 1;

    // sensitivity matrix: stacked affine maps of all probes
    let mut rows: Vec<Vec<T>> = Vec::new();
    let mut offsets: Vec<T> = Vec::new();
    for x in &probes {
        if x.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: x.dim(),
            });
        }
        let (offset, cols) = probe_sensitivity(x, n, &r2);
        for i in 0..dim {
            rows.push((0..params).map(|j| cols[j][i]).collect());
        }
        offsets.extend(offset);
    }
    let scale = rows
        .iter()
        .flat_map(|r| r.iter().map(|x| x.abs()))
        .fold(T::zero(), T::max);
    let sens_rank = rank(&rows, tol.rank_tol);
    if sens_rank < params || scale == T::zero() {
        let directions = null_directions(&rows, T::lit(1e-8))?
            .into_iter()
            .map(|d| d.iter().map(|x| x.as_f64()).collect())
            .collect();
        return Err(Error::Unobserved {
            rank: sens_rank,
            needed: params,
            directions,
        });
    }

    let design = design_permutation_experiment(s_joint, tol)?;
    let joint = DensityState::trace_one(rho1.physical().kron(&r2), tol)?;
    let mut measured: Vec<T> = Vec::new();
    let mut probe_diagonals = Vec::new();
    for x in &probes {
        let rec = run_permutation_tomography(&joint, x, &design, None, tol)?;
        measured.extend(rec.diagonal_trace_one.iter().copied());
        probe_diagonals.push(rec.diagonal_trace_one);
    }
    let rhs: Vec<T> = measured.iter().zip(&offsets).map(|(a, b)| *a - *b).collect();
    let ls = lstsq(&rows, &rhs, tol.rank_tol)?;
    Ok(AncillaReconstruction {
        rho1: state_from_parameters(n, &ls.x),
        parameters: ls.x,
        probe_diagonals,
        probe_count: probes.len(),
        sensitivity_rank: sens_rank,
        residual: ls.residual,
        condition_estimate: ls.condition,
        design,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    type M = ComplexMatrix<f64>;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    #[test]
    fn lexicographic_permutations() {
        let mut p = vec![0, 1, 2];
        let mut all = vec![p.clone()];
        while next_permutation(&mut p) {
            all.push(p.clone());
        }
        assert_eq!(all.len(), 6);
        assert_eq!(all[1], vec![0, 2, 1]);
        assert_eq!(all[5], vec![2, 1, 0]);
        assert_eq!(p, vec![0, 1, 2]);
    }

    #[test]
    fn cycles() {
        assert_eq!(cycle_notation(&[0, 1, 2]), "()");
        assert_eq!(cycle_notation(&[1, 0, 2]), "(1 2)");
        assert_eq!(cycle_notation(&[1, 2, 0, 3]), "(1 2 3)");
    }

    #[test]
    fn permutation_matrix_permutes_diagonal() {
        let s = M::diagonal(&[1.0, -3.0, 2.0]);
        let p = [2, 0, 1];
        let pm = permutation_matrix::<f64>(&p);
        let sp = s.conjugate_by(&pm.adjoint());
        assert_eq!(sp.real_diag(), vec![2.0, 1.0, -3.0]);
    }

    #[test]
    fn qubit_design() {
        let d = design_permutation_experiment(&M::diagonal(&[1.0, -1.0]), &tol()).unwrap();
        assert_eq!(d.rank, 2);
        assert_eq!(d.permutations.len(), 1);
        assert_eq!(d.permutations[0].cycles, "()");
    }

    #[test]
    fn qutrit_design() {
        let d = design_permutation_experiment(&M::diagonal(&[1.0, -3.0, 2.0]), &tol()).unwrap();
        assert_eq!(d.rank, 3);
        assert_eq!(d.permutations.len(), 2);
        assert_eq!(d.design_matrix.len(), 3);
        assert_eq!(d.values, vec![-3.0, 1.0, 2.0]);
    }

    #[test]
    fn design_rejects_scalar_and_non_diagonal() {
        assert_eq!(
            design_permutation_experiment(&M::identity(3).scale(2.0), &tol()).unwrap_err(),
            Error::ScalarObservable
        );
        let nd = M::from_real_rows(&[&[1.0, 0.5], &[0.5, -1.0]]).unwrap();
        assert!(matches!(
            design_permutation_experiment(&nd, &tol()),
            Err(Error::NotDiagonal { .. })
        ));
    }

    #[test]
    fn rank_lemma_small_cases() {
        assert_eq!(
            verify_rank_lemma(&[1.0, 1.0], &tol()).unwrap(),
            RankLemma { rank: 1, full: false }
        );
        assert_eq!(
            verify_rank_lemma(&[0.0, 1.0, 1.0], &tol()).unwrap(),
            RankLemma { rank: 3, full: true }
        );
        assert_eq!(verify_rank_lemma(&[1.0; 8], &tol()).unwrap_err(), Error::TooLarge(8));
    }

    #[test]
    fn diagonal_state_roundtrip() {
        let design = design_permutation_experiment(&M::diagonal(&[1.0, -1.0]), &tol()).unwrap();
        let rho = DensityState::trace_one(M::diagonal(&[0.8, 0.2]), &tol()).unwrap();
        let r = run_permutation_tomography(&rho, &M::identity(2), &design, None, &tol()).unwrap();
        assert!((r.diagonal[0] - 0.3).abs() < 1e-14);
        assert!((r.diagonal[1] + 0.3).abs() < 1e-14);
    }

    #[test]
    fn noise_is_reported_in_residual() {
        let design = design_permutation_experiment(&M::diagonal(&[1.0, -3.0, 2.0]), &tol()).unwrap();
        let mut rng = random::seeded(7);
        let rho = DensityState::trace_one(random::density(&mut rng, 3), &tol()).unwrap();
        let x = random::unitary(&mut rng, 3);
        let noise = Some(OutputNoise { sigma: 1e-3, seed: 1 });
        let a = run_permutation_tomography(&rho, &x, &design, noise, &tol()).unwrap();
        let b = run_permutation_tomography(&rho, &x, &design, noise, &tol()).unwrap();
        assert_eq!(a.diagonal, b.diagonal);
        assert!(a.condition_estimate.is_finite());
        let exact = rho.shifted().conjugate_by(&x).real_diag();
        let err = a.diagonal.iter().zip(&exact).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(err > 0.0 && err < 1e-2);
    }

    #[test]
    fn parameters_roundtrip() {
        let mut rng = random::seeded(8);
        let rho = random::density::<f64, _>(&mut rng, 3);
        let back = state_from_parameters(3, &state_parameters(&rho));
        assert!((&back - &rho).max_abs() < 1e-15);
    }

    #[test]
    fn default_probes_are_unitary() {
        let rho2 = M::diagonal(&[0.5, 0.5]);
        let probes = default_probes(2, &rho2, &tol()).unwrap();
        assert_eq!(probes.len(), 2);
        assert!(probes.iter().all(|p| p.is_unitary(1e-12)));
    }

    #[test]
    fn single_slot_ancilla_recovers_qubit() {
        // a pure ancilla gives one slot per probe, three probes in total
        let mut rng = random::seeded(9);
        let rho1 = DensityState::trace_one(random::density(&mut rng, 2), &tol()).unwrap();
        let rho2 = DensityState::trace_one(M::diagonal(&[1.0, 0.0]), &tol()).unwrap();
        let s = M::diagonal(&[1.5, 0.5, -0.5, -1.5]);
        let r = ancilla_tomography(&rho1, &rho2, &s, None, &tol()).unwrap();
        assert_eq!(r.probe_count, 3);
        assert!((&r.rho1 - &rho1.matrix).max_abs() < 1e-9);
    }

    #[test]
    fn identity_probe_leaves_coherences_unobserved() {
        let rho1 = DensityState::trace_one(M::diagonal(&[0.3, 0.7]), &tol()).unwrap();
        let rho2 = DensityState::trace_one(M::diagonal(&[0.4, 0.6]), &tol()).unwrap();
        let s = M::diagonal(&[1.5, 0.5, -0.5, -1.5]);
        let err = ancilla_tomography(&rho1, &rho2, &s, Some(vec![M::identity(4)]), &tol()).unwrap_err();
        match err {
            Error::Unobserved { rank, needed, directions } => {
                assert_eq!((rank, needed), (1, 3));
                assert_eq!(directions.len(), 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
