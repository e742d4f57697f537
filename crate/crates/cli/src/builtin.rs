//! Named example scenarios shipped with the binary.
//!
//! Each is generated from the library presets so the matrices match the
//! library exactly, then goes through the same loader as a file would.

use qobserve::presets::{self, AncillaQubitExample};
use qobserve::{cplx, expm, gellmann, generalized_observability_space, Matrix, Subspace, System, Tol};
use serde_json::{json, Value};

/// `(name, summary)` of every built-in scenario.
pub const CATALOG: &[(&str, &str)] = &[
    (
        "rotation-qubit",
        "qubit under planar rotations; observable in one step, not controllable",
    ),
    (
        "ising",
        "two Ising-coupled spins with a field on one; not observable for any number of measurements",
    ),
    (
        "qutrit",
        "qutrit where a second measurement enlarges the observability space",
    ),
    (
        "planar-rotation",
        "diagonal qubit observable under planar rotations; permutation tomography",
    ),
    (
        "three-qubit",
        "unknown qubit read out through two known spins by ancilla tomography",
    ),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    CATALOG.iter().map(|(n, _)| *n)
}

/// The scenario document for `name`, or `None` if there is no such built-in.
pub fn scenario(name: &str) -> Option<Value> {
    let tol = Tol::default();
    let doc = match name {
        "rotation-qubit" => rotation_qubit(&tol),
        "ising" => ising(&tol),
        "qutrit" => qutrit(&tol),
        "planar-rotation" => planar_rotation(&tol),
        "three-qubit" => three_qubit(),
        _ => return None,
    };
    Some(doc)
}

fn m(x: &Matrix) -> Value {
    serde_json::to_value(x).expect("matrices serialize")
}

fn state(x: &Matrix) -> Value {
    json!({ "matrix": m(x) })
}

fn rows(r: &[&[(f64, f64)]]) -> Matrix {
    Matrix::from_rows(r.iter().map(|row| row.iter().map(|&(a, b)| cplx(a, b)).collect()).collect())
        .expect("square literal")
}

fn describe(name: &str) -> &'static str {
    CATALOG.iter().find(|(n, _)| *n == name).map(|(_, d)| *d).unwrap_or("")
}

/// A unit Hermitian direction whose skew form lies outside `inner` but
/// inside `outer` (or anywhere when `outer` is `None`).
fn hidden_direction(n: usize, inner: &Subspace, outer: Option<&Subspace>) -> Matrix {
    let candidates: Vec<Matrix> = match outer {
        Some(o) => o.basis().to_vec(),
        None => gellmann::su_basis(n),
    };
    let r = candidates
        .iter()
        .map(|e| inner.residual(e))
        .find(|r| r.norm() > 0.1)
        .expect("a direction outside the inner space");
    r.mul_neg_i().hermitian_part().scale(1.0 / r.norm())
}

fn generators_doc(sys: &System) -> Value {
    json!({
        "label": sys.label(),
        "generators": sys.generators().iter().map(m).collect::<Vec<_>>(),
        "observable": m(&sys.raw_observable()),
    })
}

fn rotation_qubit(tol: &Tol) -> Value {
    let sys = presets::rotation_qubit(tol).expect("preset");
    let a = rows(&[&[(0.7, 0.0), (0.1, -0.2)], &[(0.1, 0.2), (0.3, 0.0)]]);
    let b = rows(&[&[(0.5, 0.0), (0.3, 0.0)], &[(0.3, 0.0), (0.5, 0.0)]]);
    let (p, q) = (0.8f64.sqrt(), 0.2f64.sqrt());
    let segments = json!([
        { "action": { "evolve": { "duration": 0.7, "controls": [[1.0]] } }, "measure_after": true },
        { "action": { "evolve": { "duration": 1.1, "controls": [[-0.5], [2.0]] } }, "measure_after": true },
        { "action": { "evolve": { "duration": 0.3, "controls": [[1.5]] } }, "measure_after": true },
    ]);
    json!({
        "schema_version": 1,
        "description": describe("rotation-qubit"),
        "system": generators_doc(&sys),
        "states": { "a": state(&a), "b": state(&b) },
        "channels": {
            "blurred": { "outcomes": [
                { "label": "up", "operators": [m(&Matrix::diagonal(&[p, q]))] },
                { "label": "down", "operators": [m(&Matrix::diagonal(&[q, p]))] },
            ]}
        },
        "scripts": {
            "pulses": { "segments": segments, "back_action": "von_neumann" },
            "weak-pulses": { "segments": segments, "back_action": { "kraus": "blurred" } },
        },
        "analysis": { "max_k": 3, "seed": 7 },
        "expected": { "controllable": false, "observable_one_step": true, "observable_overall": true, "dims_vk": [3] },
    })
}

fn ising(tol: &Tol) -> Value {
    let sys = presets::ising_pair(tol).expect("preset");
    let v = qobserve::observability_space(&sys, tol).expect("observability space");
    let base = Matrix::diagonal(&[0.4, 0.3, 0.2, 0.1]);
    let hidden = &base + &hidden_direction(4, &v, None).scale(0.05);
    let [sx, _, sz] = qobserve::half_paulis::<f64>();
    let one = Matrix::identity(2);
    json!({
        "schema_version": 1,
        "description": describe("ising"),
        "system": {
            "label": sys.label(),
            "hamiltonians": [m(&sz.kron(&sz)), m(&sx.kron(&one))],
            "observable": m(&sys.raw_observable()),
        },
        "states": { "base": state(&base), "hidden": state(&hidden) },
        "scripts": {
            "drive": { "segments": [
                { "action": { "evolve": { "duration": 1.0, "controls": [[1.0, 0.5]] } }, "measure_after": true },
                { "action": { "evolve": { "duration": 0.8, "controls": [[-0.3, 1.2], [0.9, 0.0]] } }, "measure_after": true },
                { "action": { "evolve": { "duration": 2.5, "controls": [[0.2, -1.0]] } }, "measure_after": true },
            ]}
        },
        "analysis": { "max_k": 4, "seed": 11 },
        "expected": { "observable_one_step": false, "observable_overall": false, "dims_vk": [4] },
    })
}

fn qutrit(tol: &Tol) -> Value {
    let sys = presets::qutrit_second_measurement(tol).expect("preset");
    let v1 = generalized_observability_space(&sys, 1, None, tol).expect("V1");
    let v2 = generalized_observability_space(&sys, 2, None, tol).expect("V2");
    let base = Matrix::diagonal(&[0.5, 0.3, 0.2]);
    let shadow = &base + &hidden_direction(3, &v1, Some(&v2)).scale(0.05);
    let tilted = rows(&[
        &[(0.5, 0.0), (0.1, 0.0), (0.0, 0.05)],
        &[(0.1, 0.0), (0.3, 0.0), (0.0, 0.0)],
        &[(0.0, -0.05), (0.0, 0.0), (0.2, 0.0)],
    ]);
    let frame = expm(&sys.generators()[0].scale(0.6));
    json!({
        "schema_version": 1,
        "description": describe("qutrit"),
        "system": generators_doc(&sys),
        "states": { "base": state(&base), "shadow": state(&shadow), "tilted": state(&tilted) },
        "scripts": {
            "two-measurements": { "segments": [
                { "action": { "evolve": { "duration": 0.9, "controls": [[1.0]] } }, "measure_after": true },
                { "action": { "evolve": { "duration": 0.4, "controls": [[-1.3]] } }, "measure_after": true },
            ]}
        },
        "analysis": { "max_k": 3, "seed": 3 },
        "reconstruction": {
            "permutation": { "state": "tilted", "frame": m(&frame) }
        },
        "expected": { "controllable": false, "observable_one_step": false, "dims_vk": [3, 4] },
    })
}

fn planar_rotation(tol: &Tol) -> Value {
    let sys = presets::planar_rotation_qubit(tol).expect("preset");
    let a = rows(&[&[(0.8, 0.0), (0.1, 0.1)], &[(0.1, -0.1), (0.2, 0.0)]]);
    json!({
        "schema_version": 1,
        "description": describe("planar-rotation"),
        "system": generators_doc(&sys),
        "states": { "a": state(&a) },
        "analysis": { "max_k": 3, "seed": 5 },
        "reconstruction": {
            "permutation": { "state": "a", "noise_sigma": 0.0 }
        },
        "expected": { "controllable": false, "observable_one_step": false },
    })
}

fn three_qubit() -> Value {
    let ex = AncillaQubitExample::<f64>::new();
    let unknown = AncillaQubitExample::unknown_state(0.6, cplx(0.2, -0.1));
    json!({
        "schema_version": 1,
        "description": describe("three-qubit"),
        "system": {
            "label": "three-qubit-ancilla",
            "hamiltonians": [],
            "observable": m(&ex.joint_observable),
        },
        "states": { "unknown": state(&unknown), "ancilla": state(&ex.ancilla_state) },
        "analysis": { "max_k": 2, "seed": 1 },
        "reconstruction": {
            "ancilla": { "unknown": "unknown", "ancilla": "ancilla" }
        },
        "expected": { "controllable": false, "observable_one_step": false },
    })
}
