//! JSON encodings. Every exact value is a string; object keys come out sorted.

use std::collections::BTreeMap;
use std::fmt::Display;

use dimgroup::decide::{Certificate, Config, Mode, UnknownReport, Verdict, VerifyOutcome, WitnessReport};
use dimgroup::exactmat::{IntMatrix, RatMatrix};
use dimgroup::invariants::{InvariantReport, TraceModule};
use dimgroup::padic::{PadicMatrix, RowModule};
use dimgroup::quadmod::omega_string;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

fn s(x: impl Display) -> Value {
    Value::String(x.to_string())
}

fn strings<T: Display>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(s).collect())
}

fn keyed<K: Display, V>(m: &BTreeMap<K, V>, f: impl Fn(&V) -> Value) -> Value {
    Value::Object(m.iter().map(|(k, v)| (k.to_string(), f(v))).collect())
}

pub fn int_matrix(a: &IntMatrix) -> Value {
    Value::Array((0..a.rows()).map(|i| strings(&a.row(i))).collect())
}

pub fn rat_matrix(a: &RatMatrix) -> Value {
    Value::Array((0..a.rows()).map(|i| strings(&a.row(i))).collect())
}

fn padic_matrix(x: &PadicMatrix) -> Value {
    json!({ "p": s(&x.p), "precision": x.m, "entries": int_matrix(&x.entries) })
}

pub fn row_module(r: &RowModule) -> Value {
    json!({
        "p": s(&r.p),
        "precision": r.m,
        "rows": Value::Array(r.rows.iter().map(|v| strings(v)).collect()),
        "free_rank": r.free_rank(),
        "invariant_valuations": r.invariant_valuations(),
    })
}

pub fn config(cfg: &Config) -> Value {
    json!({
        "height": cfg.height,
        "precision": cfg.precision,
        "exp_bound": cfg.exp_bound,
        "k_max": cfg.k_max,
        "l_max": cfg.l_max,
        "n_max": cfg.n_max,
        "factorization_entry_bound": cfg.factorization_entry_bound,
        "candidate_cap": cfg.candidate_cap,
    })
}

fn trace_module(t: &TraceModule) -> Value {
    let basis = match t {
        TraceModule::Rational { content, .. } => vec![s(content)],
        TraceModule::Quadratic { module, .. } => {
            let (a, b) = module.basis();
            vec![s(omega_string(&a, &module.d)), s(omega_string(&b, &module.d))]
        }
    };
    json!({ "module": s(t), "basis": basis })
}

pub fn report(r: &InvariantReport) -> Value {
    let mut out = Map::new();
    out.insert("dimension".into(), json!(r.dimension));
    out.insert("core_dimension".into(), json!(r.core_dimension));
    out.insert("det".into(), s(&r.det));
    out.insert("prim_det".into(), strings(&r.prim_det));
    out.insert("ulm".into(), keyed(&r.ulm, |n| json!(n)));
    out.insert("lambda".into(), r.lambda.as_ref().map_or(Value::Null, s));
    out.insert("field".into(), r.field_tag.as_ref().map_or(Value::Null, s));
    out.insert("lambda_primes".into(), strings(&r.lambda_primes));
    out.insert("trace_module".into(), r.trace_module.as_ref().map_or(Value::Null, trace_module));
    out.insert(
        "inner_product".into(),
        r.inner_product.as_ref().map_or(Value::Null, |ip| {
            json!({ "value": s(&ip.value), "modulo_primes": strings(&ip.lambda_primes) })
        }),
    );
    out.insert("extension_columns".into(), keyed(&r.extension_columns, padic_matrix));
    out.insert("spectral_note".into(), r.spectral_note.as_ref().map_or(Value::Null, s));
    Value::Object(out)
}

fn witness(w: &WitnessReport) -> Value {
    json!({
        "matrix": rat_matrix(&w.j),
        "mu": w.mu.as_ref().map_or(Value::Null, s),
        "padic_checks": keyed(&w.padic_checks, |(ok, m)| json!({ "agree": ok, "precision": m })),
        "schedule": w.schedule.map_or(Value::Null, |sc| json!({ "k": sc.k, "l": sc.l, "n_max": sc.n_max })),
        "source": w.source,
        "cores": w.cores.as_ref().map_or(Value::Null, |(a, b)| json!([int_matrix(a), int_matrix(b)])),
    })
}

fn certificate(c: &Certificate) -> Value {
    json!({ "invariant": c.invariant, "value_A": c.value_a, "value_B": c.value_b, "anchor": c.anchor })
}

fn unknown(u: &UnknownReport) -> Value {
    json!({ "checks_passed": u.checks_passed, "unsupported": u.unsupported, "bounds": u.bounds })
}

pub fn verdict(v: &Verdict, mode: Mode, cfg: &Config) -> Value {
    let mut out = Map::new();
    out.insert("schema_version".into(), json!(SCHEMA_VERSION));
    out.insert("verdict".into(), json!(v.name()));
    out.insert("mode".into(), s(mode));
    out.insert("config".into(), config(cfg));
    let (w, c, u) = match v {
        Verdict::Equivalent(w) => (witness(w), Value::Null, Value::Null),
        Verdict::NotEquivalent(c) => (Value::Null, certificate(c), Value::Null),
        Verdict::Unknown(u) => (Value::Null, Value::Null, unknown(u)),
    };
    out.insert("witness".into(), w);
    out.insert("certificate".into(), c);
    out.insert("unknown".into(), u);
    Value::Object(out)
}

pub fn verification(o: &VerifyOutcome, mode: Mode, cfg: &Config) -> Value {
    let (status, detail) = match o {
        VerifyOutcome::Verified(w) => ("verified", witness(w)),
        VerifyOutcome::Refuted(why) => ("refuted", s(why)),
        VerifyOutcome::Inconclusive(why) => ("inconclusive", s(why)),
    };
    json!({
        "schema_version": SCHEMA_VERSION,
        "status": status,
        "detail": detail,
        "mode": s(mode),
        "config": config(cfg),
    })
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut out = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    out.push('\n');
    out
}
