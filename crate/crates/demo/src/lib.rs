//! WebAssembly bindings for the static page in `www/`.
//!
//! Each export has a plain Rust twin returning `Result<_, String>` so the
//! logic is testable without a JavaScript host.

use hecke_core::modfactor::default_max_weight;
use hecke_core::traceformula::trace_mod;
use hecke_core::Engine;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest weight the page will request; keeps a click under a second or so.
pub const MAX_WEIGHT: u32 = 240;

fn engine() -> Engine {
    Engine::default()
}

/// Roots of `T_{p,k} mod l` along `k = kclass mod (l - 1)`, as JSON:
/// `{"ell": l, "p": p, "terms": [...], "period": n | null}`.
pub fn root_grid_json(p: u64, ell: u64, kclass: u32, max_weight: u32) -> Result<String, String> {
    if max_weight > MAX_WEIGHT {
        return Err(format!("weights above {MAX_WEIGHT} are too slow for the page"));
    }
    let engine = engine();
    let seq = engine
        .root_terms(p, ell, kclass, max_weight)
        .map_err(|e| e.to_string())?;
    let period = hecke_core::modfactor::detect_period(
        &seq.terms,
        hecke_core::modfactor::max_period_steps(ell),
    );
    Ok(json!({
        "ell": ell,
        "p": p,
        "period": period,
        "terms": seq.terms,
    })
    .to_string())
}

/// `T_{p,k}(x)` and its factorization mod `l`, one per line.
pub fn factor_text(p: u64, k: u32, ell: u64) -> Result<String, String> {
    if k > MAX_WEIGHT {
        return Err(format!("weights above {MAX_WEIGHT} are too slow for the page"));
    }
    let engine = engine();
    let poly = engine.charpoly(p, k).map_err(|e| e.to_string())?;
    let fac = engine.factor_mod(p, k, ell).map_err(|e| e.to_string())?;
    Ok(format!("T_{{{p},{k}}}(x) = {poly}\nmod {ell}: {fac}"))
}

/// `tr T_n mod l` at the weights `k0, k0 + (l - 1), ...` (`count` of them),
/// with `k0` the least weight `>= 4` in the class.
pub fn trace_residues_vec(n: u64, ell: u64, kclass: u32, count: usize) -> Result<Vec<u32>, String> {
    if ell < 5 || count > 2000 {
        return Err("need l >= 5 and at most 2000 weights".into());
    }
    let step = ell as u32 - 1;
    let mut k = kclass % step;
    while k < 4 {
        k += step;
    }
    (0..count as u32)
        .map(|i| {
            trace_mod(n, k + i * step, ell)
                .map(|r| r as u32)
                .map_err(|e| e.to_string())
        })
        .collect()
}

#[wasm_bindgen]
pub fn root_grid(p: u32, ell: u32, kclass: u32, max_weight: u32) -> Result<String, JsValue> {
    root_grid_json(p as u64, ell as u64, kclass, max_weight).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn factor(p: u32, k: u32, ell: u32) -> Result<String, JsValue> {
    factor_text(p as u64, k, ell as u64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn trace_residues(n: u32, ell: u32, kclass: u32, count: u32) -> Result<Vec<u32>, JsValue> {
    trace_residues_vec(n as u64, ell as u64, kclass, count as usize).map_err(|e| JsValue::from_str(&e))
}

/// Default weight window for a table cell, exposed so the page can prefill it.
#[wasm_bindgen]
pub fn suggested_max_weight(ell: u32, kclass: u32) -> u32 {
    default_max_weight(ell as u64, kclass).min(MAX_WEIGHT)
}
