//! Fixed-layout text reports. JSON is the machine contract; these are for
//! reading at a terminal.

use std::fmt::Write;

use qobserve::{Matrix, Tol, Verdict};

use crate::commands::{AncillaDoc, AnalyzeDoc, DistinguishDoc, PermutationDoc, ReconstructDoc, SimulateDoc};

const WIDTH: usize = 28;

struct Report(String);

impl Report {
    fn new() -> Self {
        Self(String::new())
    }

    fn line(&mut self, key: &str, value: impl std::fmt::Display) {
        let width = WIDTH.max(key.len() + 2);
        let _ = writeln!(self.0, "{key:<width$}{value}");
    }

    fn heading(&mut self, title: &str) {
        let _ = writeln!(self.0, "{title}");
    }

    fn matrix(&mut self, key: &str, m: &Matrix) {
        self.heading(key);
        for row in m.rows() {
            let cells: Vec<String> = row.iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
            let _ = writeln!(self.0, "  [ {} ]", cells.join("  "));
        }
    }

    fn finish(self) -> String {
        self.0
    }
}

fn list<T: std::fmt::Display>(xs: &[T]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn floats(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:+.6}")).collect();
    format!("[{}]", parts.join(", "))
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn tolerance(r: &mut Report, t: &Tol) {
    r.line(
        "tolerance",
        format!("rank {:.1e}  eig {:.1e}  sim {:.1e}", t.rank_tol, t.eig_tol, t.sim_tol),
    );
}

pub fn analyze(d: &AnalyzeDoc) -> String {
    let rep = &d.report;
    let mut r = Report::new();
    r.line("scenario", &d.scenario);
    r.line("system", format!("{} (n = {})", rep.label, rep.dim_n));
    tolerance(&mut r, &d.tolerance);
    r.line("back-action", &d.back_action);
    r.line("dim su(n)", rep.dim_su);
    r.line("dim L", rep.dim_l);
    r.line("controllable", yes(rep.controllable));
    r.line("dims V_k", list(&rep.dims_vk));
    r.line("saturation k", rep.saturation_k);
    r.line("closure depth", rep.closure_depth);
    r.line("observable (1 step)", yes(rep.observable_one_step));
    for (k, v) in &rep.observable_k {
        r.line(&format!("observable (k = {k})"), yes(*v));
    }
    r.line("observable (any k)", yes(rep.observable_overall));
    r.line("first-order condition", yes(rep.first_order_condition));
    r.line(
        "dim [iS, L] / [iS, su]",
        format!("{} / {} (formula {})", rep.bracket_dims.0, rep.bracket_dims.1, rep.commutator_formula_dim),
    );
    r.line("observable shift", format!("{:+.6}", rep.observable_shift));
    for c in &d.expectations {
        let status = if c.pass { "ok" } else { "FAILED" };
        r.line(
            &format!("expect {}", c.field),
            format!("{status} (expected {}, got {})", c.expected, c.actual),
        );
    }
    r.finish()
}

pub fn batch(docs: &[AnalyzeDoc]) -> String {
    docs.iter().map(analyze).collect::<Vec<_>>().join("\n")
}

fn verdict_line(v: &Verdict) -> String {
    format!(
        "{} (separation {:.3e}, dim V_k {})",
        if v.indistinguishable {
            "indistinguishable"
        } else {
            "distinguishable"
        },
        v.max_separation,
        v.dim_vk
    )
}

pub fn distinguish(d: &DistinguishDoc) -> String {
    let mut r = Report::new();
    r.line("scenario", &d.scenario);
    r.line("states", format!("{} vs {}", d.state_a, d.state_b));
    tolerance(&mut r, &d.tolerance);
    for v in &d.by_order {
        r.line(&format!("k = {}", v.k), verdict_line(v));
    }
    r.line("verdict", verdict_line(&d.verdict));
    r.line(
        "sampled experiments",
        format!(
            "{} (seed {}), max output gap {:.3e}",
            d.sampled.experiments, d.sampled.seed, d.sampled.max_output_gap
        ),
    );
    r.finish()
}

pub fn simulate(d: &SimulateDoc) -> String {
    let mut r = Report::new();
    r.line("scenario", &d.scenario);
    r.line("script", format!("{} ({})", d.script, d.record.script_hash));
    r.line("initial state", &d.state);
    tolerance(&mut r, &d.tolerance);
    r.line("outputs", floats(&d.record.outputs));
    r.line("outputs (traceless S)", floats(&d.record.outputs_shifted));
    for (i, s) in d.record.post_states.iter().enumerate() {
        r.matrix(&format!("state after measurement {}", i + 1), &s.physical());
    }
    r.finish()
}

fn permutation(d: &PermutationDoc) -> String {
    let mut r = Report::new();
    r.line("scenario", &d.scenario);
    r.line("mode", "permutation");
    r.line("state", &d.state);
    tolerance(&mut r, &d.tolerance);
    r.line("design values", floats(&d.design.values));
    r.line("design rank", d.design.rank);
    let cycles: Vec<&str> = d.design.permutations.iter().map(|p| p.cycles.as_str()).collect();
    r.line("permutations", cycles.join(" "));
    match &d.noise {
        Some(n) => r.line("noise", format!("sigma {} (seed {})", n.sigma, n.seed)),
        None => r.line("noise", "none"),
    }
    r.line("outputs", floats(&d.result.outputs));
    r.line("diagonal", floats(&d.result.diagonal_trace_one));
    r.line("true diagonal", floats(&d.true_diagonal));
    r.line("max error", format!("{:.3e}", d.max_error));
    r.line("residual", format!("{:.3e}", d.result.residual));
    r.line("condition", format!("{:.3e}", d.result.condition_estimate));
    r.finish()
}

fn ancilla(d: &AncillaDoc) -> String {
    let mut r = Report::new();
    r.line("scenario", &d.scenario);
    r.line("mode", "ancilla");
    r.line("unknown state", &d.unknown);
    r.line("ancilla state", &d.ancilla);
    tolerance(&mut r, &d.tolerance);
    r.line("probes", d.result.probe_count);
    r.line("sensitivity rank", d.result.sensitivity_rank);
    r.line("parameters", floats(&d.result.parameters));
    r.matrix("estimate", &d.result.rho1);
    r.line("max error", format!("{:.3e}", d.max_error));
    r.line("residual", format!("{:.3e}", d.result.residual));
    r.line("condition", format!("{:.3e}", d.result.condition_estimate));
    r.finish()
}

pub fn reconstruct(d: &ReconstructDoc) -> String {
    match d {
        ReconstructDoc::Permutation(p) => permutation(p),
        ReconstructDoc::Ancilla(a) => ancilla(a),
    }
}

pub fn catalog(entries: &[(&str, &str)]) -> String {
    let mut r = Report::new();
    for (name, summary) in entries {
        r.line(name, summary);
    }
    r.finish()
}
