//! Scenario files: loading, validation and name resolution.
//!
//! Files are JSON. Every check runs before any analysis, and every error
//! carries the path of the offending field (`system.hamiltonians[1][0]`).

use std::collections::BTreeMap;
use std::path::Path;

use qobserve::{
    cplx, Action, Channel, DensityState, KrausChannel, KrausOutcome, Matrix, Script, ScriptBackAction, Segment,
    State, System, Tol,
};
use serde_json::{Map, Value};

use crate::builtin;
use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u64 = 1;

/// Report fields a scenario may pin in its `expected` section.
pub const EXPECTABLE: &[&str] = &[
    "controllable",
    "observable_one_step",
    "observable_overall",
    "first_order_condition",
    "dim_l",
    "dims_vk",
    "saturation_k",
];

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub max_k: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub max_k: usize,
    pub tolerance: Tol,
    pub seed: u64,
    /// Kraus channel replacing the projective back-action in `analyze`.
    pub channel: Option<String>,
}

#[derive(Debug, Clone)]
pub struct PermutationSetup {
    pub state: String,
    /// `X1`; identity when omitted.
    pub frame: Matrix,
    /// Diagonal observable of the design; the system observable when omitted.
    pub observable: Matrix,
    pub noise_sigma: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct AncillaSetup {
    pub unknown: String,
    pub ancilla: String,
    pub joint_observable: Matrix,
    pub probes: Option<Vec<Matrix>>,
}

#[derive(Debug, Clone, Default)]
pub struct Reconstruction {
    pub permutation: Option<PermutationSetup>,
    pub ancilla: Option<AncillaSetup>,
}

/// A validated scenario. Every name it mentions resolves.
#[derive(Debug, Clone)]
pub struct Scenario {
    /// File path or `builtin:NAME`.
    pub source: String,
    pub system: System,
    pub states: BTreeMap<String, State>,
    pub channels: BTreeMap<String, Channel>,
    pub scripts: BTreeMap<String, Script>,
    pub analysis: Analysis,
    pub reconstruction: Reconstruction,
    pub expected: BTreeMap<String, Value>,
}

impl Scenario {
    pub fn state(&self, name: &str, path: &str) -> CliResult<&State> {
        self.states
            .get(name)
            .ok_or_else(|| CliError::validation(path, format!("no state named '{name}'")))
    }

    pub fn script(&self, name: &str, path: &str) -> CliResult<&Script> {
        self.scripts
            .get(name)
            .ok_or_else(|| CliError::validation(path, format!("no script named '{name}'")))
    }

    pub fn channel(&self) -> Option<&Channel> {
        self.analysis.channel.as_ref().map(|c| &self.channels[c])
    }
}

/// Reads a scenario reference: a file path or `builtin:NAME`.
pub fn read_source(reference: &str) -> CliResult<Value> {
    if let Some(name) = reference.strip_prefix("builtin:") {
        return builtin::scenario(name)
            .ok_or_else(|| CliError::validation(reference, format!("unknown built-in scenario '{name}'")));
    }
    let text = std::fs::read_to_string(Path::new(reference))
        .map_err(|e| CliError::validation(reference, format!("cannot read file: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::validation(reference, format!("invalid JSON: {e}")))
}

/// Reads and validates a scenario reference.
pub fn load(reference: &str, overrides: &Overrides) -> CliResult<Scenario> {
    let value = read_source(reference)?;
    parse(&value, reference, overrides)
}

/// Validates a scenario document.
pub fn parse(value: &Value, source: &str, overrides: &Overrides) -> CliResult<Scenario> {
    let root = object(value, "")?;
    check_keys(
        root,
        &[
            "schema_version",
            "description",
            "system",
            "states",
            "scripts",
            "channels",
            "analysis",
            "reconstruction",
            "expected",
        ],
        "",
    )?;
    let version = unsigned(required(root, "schema_version", "")?, "schema_version")?;
    if version != SCHEMA_VERSION {
        return Err(CliError::validation(
            "schema_version",
            format!("unsupported version {version}, expected {SCHEMA_VERSION}"),
        ));
    }
    if let Some(d) = root.get("description") {
        string(d, "description")?;
    }

    let analysis = parse_analysis(root.get("analysis"), overrides)?;
    let tol = analysis.tolerance;
    let system = parse_system(required(root, "system", "")?, &tol)?;

    let mut channels = BTreeMap::new();
    for (name, v) in named(root.get("channels"), "channels")? {
        let path = format!("channels.{name}");
        channels.insert(name.clone(), parse_channel(v, &path, &tol)?);
    }

    let mut states = BTreeMap::new();
    for (name, v) in named(root.get("states"), "states")? {
        let path = format!("states.{name}");
        states.insert(name.clone(), parse_state(v, &path, &tol)?);
    }

    let mut scripts = BTreeMap::new();
    for (name, v) in named(root.get("scripts"), "scripts")? {
        let path = format!("scripts.{name}");
        let script = parse_script(v, &path, &channels, &tol)?;
        script
            .validate(&system, &tol)
            .map_err(|e| CliError::validation(&path, e.to_string()))?;
        scripts.insert(name.clone(), script);
    }

    if let Some(c) = &analysis.channel {
        let ch = channels
            .get(c)
            .ok_or_else(|| CliError::validation("analysis.channel", format!("no channel named '{c}'")))?;
        if ch.dim() != system.dim_n() {
            return Err(dim_error("analysis.channel", system.dim_n(), ch.dim()));
        }
    }

    let reconstruction = match root.get("reconstruction") {
        None => Reconstruction::default(),
        Some(v) => parse_reconstruction(v, &system, &states)?,
    };

    let mut expected = BTreeMap::new();
    if let Some(v) = root.get("expected") {
        for (key, value) in object(v, "expected")? {
            if !EXPECTABLE.contains(&key.as_str()) {
                return Err(CliError::validation(
                    format!("expected.{key}"),
                    format!("not an expectable report field (one of {})", EXPECTABLE.join(", ")),
                ));
            }
            expected.insert(key.clone(), value.clone());
        }
    }

    Ok(Scenario {
        source: source.to_string(),
        system,
        states,
        channels,
        scripts,
        analysis,
        reconstruction,
        expected,
    })
}

fn parse_analysis(v: Option<&Value>, overrides: &Overrides) -> CliResult<Analysis> {
    let empty = Map::new();
    let map = match v {
        Some(v) => object(v, "analysis")?,
        None => &empty,
    };
    check_keys(map, &["max_k", "tolerances", "seed", "channel"], "analysis")?;
    let mut tolerance = Tol::default();
    if let Some(t) = map.get("tolerances") {
        let tm = object(t, "analysis.tolerances")?;
        check_keys(tm, &["rank_tol", "eig_tol", "sim_tol"], "analysis.tolerances")?;
        for (key, slot) in [
            ("rank_tol", &mut tolerance.rank_tol),
            ("eig_tol", &mut tolerance.eig_tol),
            ("sim_tol", &mut tolerance.sim_tol),
        ] {
            if let Some(x) = tm.get(key) {
                *slot = number(x, &format!("analysis.tolerances.{key}"))?;
            }
        }
        tolerance
            .validate()
            .map_err(|e| CliError::validation("analysis.tolerances", e.to_string()))?;
    }
    if let Some(t) = overrides.tol {
        tolerance = tolerance.with_rank_tol(t);
        tolerance.validate().map_err(|e| CliError::validation("--tol", e.to_string()))?;
    }
    let mut max_k = match map.get("max_k") {
        Some(x) => unsigned(x, "analysis.max_k")? as usize,
        None => 4,
    };
    let mut max_k_path = "analysis.max_k";
    if let Some(k) = overrides.max_k {
        max_k = k;
        max_k_path = "--max-k";
    }
    if max_k < 1 {
        return Err(CliError::validation(max_k_path, "must be at least 1"));
    }
    let seed = match (overrides.seed, map.get("seed")) {
        (Some(s), _) => s,
        (None, Some(x)) => unsigned(x, "analysis.seed")?,
        (None, None) => 0,
    };
    let channel = map
        .get("channel")
        .map(|c| string(c, "analysis.channel").map(str::to_string))
        .transpose()?;
    Ok(Analysis {
        max_k,
        tolerance,
        seed,
        channel,
    })
}

fn parse_system(v: &Value, tol: &Tol) -> CliResult<System> {
    let map = object(v, "system")?;
    check_keys(map, &["label", "hamiltonians", "generators", "observable"], "system")?;
    let label = match map.get("label") {
        Some(l) => string(l, "system.label")?.to_string(),
        None => "unnamed".to_string(),
    };
    let observable = matrix(required(map, "observable", "system")?, "system.observable")?;
    let n = observable.dim();
    let list = |key: &str| -> CliResult<Vec<Matrix>> {
        let path = format!("system.{key}");
        let ms = matrices(&map[key], &path)?;
        for (i, m) in ms.iter().enumerate() {
            if m.dim() != n {
                return Err(dim_error(&format!("{path}[{i}]"), n, m.dim()));
            }
        }
        Ok(ms)
    };
    let built = match (map.contains_key("hamiltonians"), map.contains_key("generators")) {
        (true, true) => {
            return Err(CliError::validation(
                "system",
                "give either 'hamiltonians' or 'generators', not both",
            ))
        }
        (true, false) => System::from_hamiltonians(&list("hamiltonians")?, &observable, label, tol),
        (false, true) => System::from_generators(&list("generators")?, &observable, label, tol),
        (false, false) => {
            return Err(CliError::validation(
                "system",
                "missing 'hamiltonians' or 'generators'",
            ))
        }
    };
    built.map_err(|e| CliError::validation("system", e.to_string()))
}

fn parse_state(v: &Value, path: &str, tol: &Tol) -> CliResult<State> {
    let map = object(v, path)?;
    check_keys(map, &["matrix", "convention"], path)?;
    let m = matrix(required(map, "matrix", path)?, &format!("{path}.matrix"))?;
    let convention = match map.get("convention") {
        None => "trace_one",
        Some(c) => string(c, &format!("{path}.convention"))?,
    };
    let state = match convention {
        "trace_one" => DensityState::trace_one(m, tol),
        "traceless_shifted" => DensityState::traceless(m, tol),
        other => {
            return Err(CliError::validation(
                format!("{path}.convention"),
                format!("unknown convention '{other}' (trace_one or traceless_shifted)"),
            ))
        }
    };
    state.map_err(|e| CliError::validation(format!("{path}.matrix"), e.to_string()))
}

fn parse_channel(v: &Value, path: &str, tol: &Tol) -> CliResult<Channel> {
    let map = object(v, path)?;
    check_keys(map, &["outcomes"], path)?;
    let list = array(required(map, "outcomes", path)?, &format!("{path}.outcomes"))?;
    let mut outcomes = Vec::with_capacity(list.len());
    for (i, o) in list.iter().enumerate() {
        let op = format!("{path}.outcomes[{i}]");
        let om = object(o, &op)?;
        check_keys(om, &["label", "operators"], &op)?;
        let label = match om.get("label") {
            Some(l) => string(l, &format!("{op}.label"))?.to_string(),
            None => i.to_string(),
        };
        let operators = matrices(required(om, "operators", &op)?, &format!("{op}.operators"))?;
        outcomes.push(KrausOutcome { label, operators });
    }
    KrausChannel::new(outcomes, tol).map_err(|e| CliError::validation(path, e.to_string()))
}

fn parse_script(v: &Value, path: &str, channels: &BTreeMap<String, Channel>, tol: &Tol) -> CliResult<Script> {
    let map = object(v, path)?;
    check_keys(map, &["segments", "observables", "back_action"], path)?;
    let seg_path = format!("{path}.segments");
    let mut segments = Vec::new();
    for (i, s) in array(required(map, "segments", path)?, &seg_path)?.iter().enumerate() {
        let sp = format!("{seg_path}[{i}]");
        let sm = object(s, &sp)?;
        check_keys(sm, &["action", "measure_after"], &sp)?;
        let ap = format!("{sp}.action");
        let am = object(required(sm, "action", &sp)?, &ap)?;
        if am.len() != 1 {
            return Err(CliError::validation(&ap, "expected exactly one of 'evolve' or 'unitary'"));
        }
        let action = if let Some(u) = am.get("unitary") {
            Action::Unitary(matrix(u, &format!("{ap}.unitary"))?)
        } else if let Some(e) = am.get("evolve") {
            let ep = format!("{ap}.evolve");
            let em = object(e, &ep)?;
            check_keys(em, &["duration", "controls"], &ep)?;
            let duration = number(required(em, "duration", &ep)?, &format!("{ep}.duration"))?;
            let cp = format!("{ep}.controls");
            let controls = array(required(em, "controls", &ep)?, &cp)?
                .iter()
                .enumerate()
                .map(|(k, row)| {
                    let rp = format!("{cp}[{k}]");
                    array(row, &rp)?
                        .iter()
                        .enumerate()
                        .map(|(j, x)| number(x, &format!("{rp}[{j}]")))
                        .collect::<CliResult<Vec<f64>>>()
                })
                .collect::<CliResult<Vec<_>>>()?;
            Action::Evolve { duration, controls }
        } else {
            let key = am.keys().next().cloned().unwrap_or_default();
            return Err(CliError::validation(
                format!("{ap}.{key}"),
                "unknown action (evolve or unitary)",
            ));
        };
        let measure_after = match sm.get("measure_after") {
            Some(b) => boolean(b, &format!("{sp}.measure_after"))?,
            None => true,
        };
        segments.push(Segment { action, measure_after });
    }
    let observables = map
        .get("observables")
        .map(|o| matrices(o, &format!("{path}.observables")))
        .transpose()?;
    let bp = format!("{path}.back_action");
    let back_action = match map.get("back_action") {
        None => ScriptBackAction::VonNeumann,
        Some(Value::String(s)) if s == "von_neumann" => ScriptBackAction::VonNeumann,
        Some(Value::Object(m)) if m.len() == 1 && m.contains_key("kraus") => match &m["kraus"] {
            Value::String(name) => ScriptBackAction::Kraus(
                channels
                    .get(name)
                    .cloned()
                    .ok_or_else(|| CliError::validation(format!("{bp}.kraus"), format!("no channel named '{name}'")))?,
            ),
            inline => ScriptBackAction::Kraus(parse_channel(inline, &format!("{bp}.kraus"), tol)?),
        },
        Some(_) => {
            return Err(CliError::validation(
                bp,
                "expected \"von_neumann\" or {\"kraus\": CHANNEL}",
            ))
        }
    };
    Ok(Script {
        segments,
        observables,
        back_action,
    })
}

fn parse_reconstruction(v: &Value, system: &System, states: &BTreeMap<String, State>) -> CliResult<Reconstruction> {
    let map = object(v, "reconstruction")?;
    check_keys(map, &["permutation", "ancilla"], "reconstruction")?;
    let state_ref = |m: &Map<String, Value>, key: &str, path: &str| -> CliResult<(String, usize)> {
        let p = format!("{path}.{key}");
        let name = string(required(m, key, path)?, &p)?;
        let st = states
            .get(name)
            .ok_or_else(|| CliError::validation(&p, format!("no state named '{name}'")))?;
        Ok((name.to_string(), st.dim()))
    };

    let permutation = match map.get("permutation") {
        None => None,
        Some(p) => {
            let path = "reconstruction.permutation";
            let pm = object(p, path)?;
            check_keys(pm, &["state", "frame", "observable", "noise_sigma"], path)?;
            let (state, n) = state_ref(pm, "state", path)?;
            let frame = match pm.get("frame") {
                Some(f) => matrix(f, &format!("{path}.frame"))?,
                None => Matrix::identity(n),
            };
            if frame.dim() != n {
                return Err(dim_error(&format!("{path}.frame"), n, frame.dim()));
            }
            let observable = match pm.get("observable") {
                Some(o) => matrix(o, &format!("{path}.observable"))?,
                None => system.raw_observable(),
            };
            if observable.dim() != n {
                return Err(dim_error(&format!("{path}.observable"), n, observable.dim()));
            }
            let noise_sigma = pm
                .get("noise_sigma")
                .map(|s| number(s, &format!("{path}.noise_sigma")))
                .transpose()?;
            if let Some(s) = noise_sigma {
                if !(s >= 0.0 && s.is_finite()) {
                    return Err(CliError::validation(format!("{path}.noise_sigma"), "must be finite and non-negative"));
                }
            }
            Some(PermutationSetup {
                state,
                frame,
                observable,
                noise_sigma,
            })
        }
    };

    let ancilla = match map.get("ancilla") {
        None => None,
        Some(a) => {
            let path = "reconstruction.ancilla";
            let am = object(a, path)?;
            check_keys(am, &["unknown", "ancilla", "joint_observable", "probes"], path)?;
            let (unknown, n1) = state_ref(am, "unknown", path)?;
            let (ancilla, n2) = state_ref(am, "ancilla", path)?;
            let joint_observable = match am.get("joint_observable") {
                Some(o) => matrix(o, &format!("{path}.joint_observable"))?,
                None => system.raw_observable(),
            };
            let dim = n1 * n2;
            if joint_observable.dim() != dim {
                return Err(dim_error(&format!("{path}.joint_observable"), dim, joint_observable.dim()));
            }
            let probes = am
                .get("probes")
                .map(|p| matrices(p, &format!("{path}.probes")))
                .transpose()?;
            for (i, p) in probes.iter().flatten().enumerate() {
                if p.dim() != dim {
                    return Err(dim_error(&format!("{path}.probes[{i}]"), dim, p.dim()));
                }
            }
            Some(AncillaSetup {
                unknown,
                ancilla,
                joint_observable,
                probes,
            })
        }
    };

    Ok(Reconstruction { permutation, ancilla })
}

fn dim_error(path: &str, expected: usize, found: usize) -> CliError {
    CliError::validation(path, format!("dimension {found}, expected {expected}"))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

fn object<'a>(v: &'a Value, path: &str) -> CliResult<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| CliError::validation(display(path), format!("expected an object, found {}", kind(v))))
}

fn array<'a>(v: &'a Value, path: &str) -> CliResult<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| CliError::validation(display(path), format!("expected an array, found {}", kind(v))))
}

fn string<'a>(v: &'a Value, path: &str) -> CliResult<&'a str> {
    v.as_str()
        .ok_or_else(|| CliError::validation(path, format!("expected a string, found {}", kind(v))))
}

fn boolean(v: &Value, path: &str) -> CliResult<bool> {
    v.as_bool()
        .ok_or_else(|| CliError::validation(path, format!("expected a boolean, found {}", kind(v))))
}

fn number(v: &Value, path: &str) -> CliResult<f64> {
    v.as_f64()
        .ok_or_else(|| CliError::validation(path, format!("expected a number, found {}", kind(v))))
}

fn unsigned(v: &Value, path: &str) -> CliResult<u64> {
    v.as_u64()
        .ok_or_else(|| CliError::validation(path, "expected a non-negative integer"))
}

fn display(path: &str) -> &str {
    if path.is_empty() {
        "<root>"
    } else {
        path
    }
}

fn required<'a>(map: &'a Map<String, Value>, key: &str, path: &str) -> CliResult<&'a Value> {
    map.get(key)
        .ok_or_else(|| CliError::validation(join(path, key), "missing required field"))
}

fn check_keys(map: &Map<String, Value>, allowed: &[&str], path: &str) -> CliResult<()> {
    match map.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(CliError::validation(
            join(path, k),
            format!("unknown field (allowed: {})", allowed.join(", ")),
        )),
        None => Ok(()),
    }
}

fn named<'a>(v: Option<&'a Value>, path: &str) -> CliResult<Vec<(&'a String, &'a Value)>> {
    match v {
        None => Ok(Vec::new()),
        Some(v) => Ok(object(v, path)?.iter().collect()),
    }
}

fn matrices(v: &Value, path: &str) -> CliResult<Vec<Matrix>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, m)| matrix(m, &format!("{path}[{i}]")))
        .collect()
}

/// Square matrix given as rows; each entry is a number or `[re, im]`.
pub fn matrix(v: &Value, path: &str) -> CliResult<Matrix> {
    let rows = array(v, path)?;
    if rows.is_empty() {
        return Err(CliError::validation(path, "matrix has no rows"));
    }
    let n = rows.len();
    let mut parsed = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let rp = format!("{path}[{i}]");
        let entries = array(row, &rp)?;
        if entries.len() != n {
            return Err(CliError::validation(
                &rp,
                format!("matrix is not square: row has {} entries, expected {n}", entries.len()),
            ));
        }
        let mut out = Vec::with_capacity(n);
        for (j, e) in entries.iter().enumerate() {
            let ep = format!("{rp}[{j}]");
            let z = match e {
                Value::Number(_) => cplx(number(e, &ep)?, 0.0),
                Value::Array(pair) if pair.len() == 2 => {
                    cplx(number(&pair[0], &format!("{ep}[0]"))?, number(&pair[1], &format!("{ep}[1]"))?)
                }
                _ => return Err(CliError::validation(&ep, "expected a number or [re, im]")),
            };
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(CliError::validation(&ep, "entry is not finite"));
            }
            out.push(z);
        }
        parsed.push(out);
    }
    Matrix::from_rows(parsed).map_err(|e| CliError::validation(path, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn minimal() -> Value {
        json!({
            "schema_version": 1,
            "system": {
                "generators": [[[0, 1], [-1, 0]]],
                "observable": [[1, 0], [0, -1]]
            }
        })
    }

    fn error_path(v: &Value) -> String {
        match parse(v, "test", &Overrides::default()).unwrap_err() {
            CliError::Validation { path, .. } => path,
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn minimal_scenario_loads() {
        let s = parse(&minimal(), "test", &Overrides::default()).unwrap();
        assert_eq!(s.system.dim_n(), 2);
        assert_eq!(s.analysis.max_k, 4);
        assert!(s.states.is_empty());
    }

    #[test]
    fn complex_entries() {
        let m = matrix(&json!([[[1, 0], [0, -1]], [[0, 1], -1]]), "m").unwrap();
        assert_eq!(m[(0, 1)], cplx(0.0, -1.0));
        assert_eq!(m[(1, 1)], cplx(-1.0, 0.0));
    }

    #[test]
    fn non_square_names_row() {
        let mut v = minimal();
        v["system"]["observable"] = json!([[1, 0], [0, -1, 3]]);
        assert_eq!(error_path(&v), "system.observable[1]");
    }

    #[test]
    fn unknown_field_is_rejected() {
        let mut v = minimal();
        v["system"]["hamiltonian"] = json!([]);
        assert_eq!(error_path(&v), "system.hamiltonian");
    }

    #[test]
    fn bad_state_names_matrix() {
        let mut v = minimal();
        v["states"] = json!({"rho": {"matrix": [[2, 0], [0, 0]]}});
        assert_eq!(error_path(&v), "states.rho.matrix");
    }

    #[test]
    fn unresolved_channel() {
        let mut v = minimal();
        v["scripts"] = json!({"s": {
            "segments": [{"action": {"unitary": [[1, 0], [0, 1]]}}],
            "back_action": {"kraus": "missing"}
        }});
        assert_eq!(error_path(&v), "scripts.s.back_action.kraus");
    }

    #[test]
    fn generator_dimension_checked() {
        let mut v = minimal();
        v["system"]["generators"] = json!([[[0, 1, 0], [-1, 0, 0], [0, 0, 0]]]);
        assert_eq!(error_path(&v), "system.generators[0]");
    }

    #[test]
    fn overrides_apply() {
        let o = Overrides {
            tol: Some(1e-6),
            max_k: Some(7),
            seed: Some(5),
        };
        let s = parse(&minimal(), "test", &o).unwrap();
        assert_eq!(s.analysis.tolerance.rank_tol, 1e-6);
        assert_eq!(s.analysis.max_k, 7);
        assert_eq!(s.analysis.seed, 5);
        let bad = Overrides {
            tol: Some(-1.0),
            ..Overrides::default()
        };
        assert!(matches!(
            parse(&minimal(), "test", &bad),
            Err(CliError::Validation { path, .. }) if path == "--tol"
        ));
    }

    #[test]
    fn wrong_version() {
        let mut v = minimal();
        v["schema_version"] = json!(2);
        assert_eq!(error_path(&v), "schema_version");
    }
}
