//! JSON and text renderings of core results. Keys are emitted in sorted
//! order and floats in shortest round-trip form, so equal inputs give
//! byte-identical output.

use std::fmt::Write as _;

use biconformal::biconformal::IdentityReport;
use biconformal::classify::{BoundResult, ClassificationReport};
use biconformal::expr::ZeroVerdict;
use biconformal::geometry::{TensorField, Variance};
use serde_json::{json, Map, Value};

pub const SCHEMA: u64 = 1;

/// `ProvablyZero` is settled by canonical simplification alone; the other
/// verdicts rest on sampling.
pub fn provenance(v: &ZeroVerdict) -> &'static str {
    match v {
        ZeroVerdict::ProvablyZero => "symbolic",
        _ => "sampled",
    }
}

pub fn verdict(v: &ZeroVerdict) -> Value {
    let mut out = Map::new();
    out.insert("verdict".into(), json!(v.label()));
    out.insert("provenance".into(), json!(provenance(v)));
    if let Some(w) = v.witness() {
        let point: Map<String, Value> = w.point.iter().map(|(k, x)| (k.clone(), json!(x))).collect();
        out.insert(
            "witness".into(),
            json!({ "point": point, "value": w.value, "scale": w.scale, "component": w.component }),
        );
    }
    Value::Object(out)
}

/// Nonzero components as `{"index": [names], "value": "expr"}`, row-major.
pub fn tensor(t: &TensorField) -> Value {
    let chart = t.chart();
    let slots: Vec<&str> = t
        .slots()
        .iter()
        .map(|s| match s {
            Variance::Up => "up",
            Variance::Down => "down",
        })
        .collect();
    let components: Vec<Value> = t
        .components()
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.is_zero())
        .map(|(k, e)| {
            let index: Vec<&str> = t.multi_index(k).iter().map(|&i| chart.name(i)).collect();
            json!({ "index": index, "value": e.to_string() })
        })
        .collect();
    json!({ "slots": slots, "components": components })
}

pub fn bound(b: &BoundResult) -> Value {
    match b {
        BoundResult::Finite(n) => json!(n),
        BoundResult::PossiblyInfinite => json!("PossiblyInfinite"),
    }
}

const EVIDENCE: [&str; 5] = ["E", "W", "dE", "dW", "du"];

fn evidence(r: &ClassificationReport) -> [&ZeroVerdict; 5] {
    let e = &r.evidence;
    [&e.e_zero, &e.w_zero, &e.de_zero, &e.dw_zero, &e.du_zero]
}

pub fn classification(r: &ClassificationReport) -> Value {
    let ev: Map<String, Value> =
        EVIDENCE.iter().zip(evidence(r)).map(|(k, v)| (k.to_string(), verdict(v))).collect();
    json!({
        "schema": SCHEMA,
        "class": r.class.name(),
        "n": r.n,
        "p": r.p,
        "separable": verdict(&r.separable),
        "evidence": ev,
        "symmetry_bound": bound(&r.bound),
    })
}

pub fn classification_summary(r: &ClassificationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "class: {}", r.class);
    let _ = writeln!(out, "n = {}, p = {}", r.n, r.p);
    let _ = writeln!(out, "T = 0: {} ({})", r.separable.label(), provenance(&r.separable));
    for (k, v) in EVIDENCE.iter().zip(evidence(r)) {
        let _ = writeln!(out, "{k:>2} = 0: {} ({})", v.label(), provenance(v));
    }
    match r.bound {
        BoundResult::Finite(n) => {
            let _ = writeln!(out, "symmetry bound: {n}");
        }
        BoundResult::PossiblyInfinite => {
            let _ = writeln!(out, "symmetry bound: possibly infinite");
        }
    }
    out
}

pub fn identities(r: &IdentityReport) -> Value {
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| {
            let mut v = verdict(&c.verdict);
            v.as_object_mut().expect("verdict is an object").insert("name".into(), json!(c.name));
            v
        })
        .collect();
    json!({ "schema": SCHEMA, "all_pass": r.all_pass(), "checks": checks })
}

pub fn identities_text(r: &IdentityReport) -> String {
    let width = r.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for c in &r.checks {
        let _ = write!(out, "{:width$}  {:<12} {}", c.name, c.verdict.label(), provenance(&c.verdict));
        if let Some(w) = c.verdict.witness() {
            let at: Vec<String> = w.point.iter().map(|(k, x)| format!("{k}={x}")).collect();
            let _ = write!(out, "  |value| = {:e} at {}", w.value.abs(), at.join(", "));
        }
        out.push('\n');
    }
    let failed = r.failures().count();
    let _ = writeln!(out, "{} of {} identities hold", r.checks.len() - failed, r.checks.len());
    out
}

pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}
