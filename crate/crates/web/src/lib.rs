//! WebAssembly entry points behind `www/index.html`. Every entry point returns
//! a JSON string; the `*_json` functions are the same operations for native
//! callers and tests.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use opcheck::cm_operad::{mul_set, Color, Variant};
use opcheck::envelope::{comparison_on_objects, envelope_objects, tuple_label, EnvObject};
use opcheck::finset::{PointedMap, BASEPOINT};
use opcheck::report::cmd_verify_envelope;
use opcheck::semantics::{build_A, bundled_algebra, check_algebra, check_functoriality, parse_algebra, ModuleData};

/// Larger bounds are fine natively but stall a browser tab.
pub const MAX_MUL_ARITY: usize = 5;
pub const MAX_ENVELOPE_BOUND: usize = 2;
pub const MAX_EVAL_ARITY: usize = 4;

fn variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: opcheck::Error| e.to_string())
}

fn words(k: usize) -> impl Iterator<Item = Vec<Color>> {
    (0..1u32 << k).map(move |bits| {
        (0..k)
            .map(|i| if bits & (1 << (k - 1 - i)) != 0 { Color::M } else { Color::A })
            .collect()
    })
}

/// Multimorphism counts for every input word up to `max_arity`.
pub fn mul_table_json(max_arity: usize, variant_name: &str) -> Result<String, String> {
    let v = variant(variant_name)?;
    if max_arity > MAX_MUL_ARITY {
        return Err(format!("arity is capped at {MAX_MUL_ARITY} in the browser"));
    }
    let mut rows = Vec::new();
    for k in 0..=max_arity {
        for word in words(k) {
            let mut row = json!({
                "inputs": word.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
            });
            for out in [Color::A, Color::M] {
                let ms = mul_set(&word, out, v).map_err(|e| e.to_string())?;
                row[out.to_string()] = json!({
                    "count": ms.len(),
                    "morphisms": ms.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                });
            }
            rows.push(row);
        }
    }
    Ok(json!({"variant": v, "rows": rows}).to_string())
}

/// The envelope comparison report plus the object correspondence.
pub fn envelope_json(max_size: usize, shape: usize, variant_name: &str) -> Result<String, String> {
    let v = variant(variant_name)?;
    if max_size > MAX_ENVELOPE_BOUND || shape > MAX_ENVELOPE_BOUND {
        return Err(format!("bounds are capped at {MAX_ENVELOPE_BOUND} in the browser"));
    }
    let run = cmd_verify_envelope(max_size, shape, v, opcheck::envelope::DEFAULT_CEILING).map_err(|e| e.to_string())?;
    let objects: Vec<Value> = envelope_objects(max_size, shape)
        .iter()
        .map(|e| json!({"envelope": e.to_string(), "fplus": tuple_label(&comparison_on_objects(e))}))
        .collect();
    Ok(json!({"report": run.report, "objects": objects}).to_string())
}

/// Image of one envelope object, e.g. `(2|1)@2:1,2`.
pub fn compare_object_json(object: &str) -> Result<String, String> {
    let e: EnvObject = object.parse().map_err(|e: opcheck::Error| e.to_string())?;
    Ok(json!({"object": e.to_string(), "image": tuple_label(&comparison_on_objects(&e))}).to_string())
}

fn load_algebra(spec: &str) -> Result<ModuleData, String> {
    if spec.trim_start().starts_with('{') {
        parse_algebra(spec).map_err(|e| e.to_string())
    } else {
        bundled_algebra(spec).ok_or_else(|| format!("unknown algebra `{spec}`"))
    }
}

fn lookup(labels: &[String], x: &str, what: &str) -> Result<usize, String> {
    labels
        .iter()
        .position(|l| l == x)
        .ok_or_else(|| format!("`{x}` is not an element of {what}"))
}

/// `A_{E,M}(f)` on one input `(e_1, .., e_n, m)`, with the fiber each output
/// component was folded over.
pub fn evaluate_json(algebra: &str, map: &str, input: &str) -> Result<String, String> {
    let alg = load_algebra(algebra)?;
    let f: PointedMap = map.parse().map_err(|e: opcheck::Error| e.to_string())?;
    let (m, n) = (f.source().arity, f.target().arity);
    if m.max(n) > MAX_EVAL_ARITY {
        return Err(format!("arities are capped at {MAX_EVAL_ARITY} in the browser"));
    }
    let parts: Vec<&str> = input.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if parts.len() != m + 1 {
        return Err(format!("expected {} comma-separated values (e_1..e_{m}, m), got {}", m + 1, parts.len()));
    }
    let mut x = Vec::with_capacity(m + 1);
    for p in &parts[..m] {
        x.push(lookup(&alg.monoid.elements, p, "E")?);
    }
    x.push(lookup(&alg.elements, parts[m], "M")?);

    let laws = check_algebra(&alg);
    if !laws.is_pass() {
        return Ok(json!({"laws": laws}).to_string());
    }
    let a = build_A(&alg, m.max(n));
    let y = a.apply(&f, &x).ok_or("map outside the truncation")?;
    let fibers: Vec<Value> = (1..=n)
        .map(|t| json!({"target": t, "fiber": f.fiber(t).elements()}))
        .chain([json!({"target": "*", "fiber": f.fiber(BASEPOINT).elements()})])
        .collect();
    Ok(json!({
        "laws": laws,
        "map": f.to_string(),
        "input": a.label(m, &x),
        "output": a.label(n, y),
        "fibers": fibers,
        "functoriality": check_functoriality(&a),
    })
    .to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn mul_table(max_arity: usize, variant: &str) -> Result<String, JsError> {
    js(mul_table_json(max_arity, variant))
}

#[wasm_bindgen]
pub fn compare_envelope(max_size: usize, shape: usize, variant: &str) -> Result<String, JsError> {
    js(envelope_json(max_size, shape, variant))
}

#[wasm_bindgen]
pub fn compare_object(object: &str) -> Result<String, JsError> {
    js(compare_object_json(object))
}

#[wasm_bindgen]
pub fn evaluate(algebra: &str, map: &str, input: &str) -> Result<String, JsError> {
    js(evaluate_json(algebra, map, input))
}
